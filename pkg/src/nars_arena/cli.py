"""Command-line entry point: ``run``, ``plot``, ``oracle`` and ``list-envs``.

Exit codes: 0 success, 1 usage error, 2 configuration error, 3 runtime error.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from .agents import MiniNarsConfig, QLearningConfig
from .envs import ALL_ENV_IDS, ACTION_NAMES, EnvId, enumerate_model, make_env
from .errors import ArenaError, ConfigError, ContractViolation, UnsupportedEnvironment
from .harness import (
    FAMILIES,
    BridgeSettings,
    ExperimentConfig,
    read_steps_csv,
    run_experiment,
    start_value,
    value_iteration,
    write_outputs,
)
from .svg import line_chart

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3

log = logging.getLogger("nars_arena")

# key -> converter
RUN_KEYS = {
    "env": str,
    "agent": str,
    "steps": int,
    "seed": int,
    "out": str,
    "slippery": None,  # boolean, parsed separately
    "step_limit": int,
    "q.alpha": float,
    "q.gamma": float,
    "q.eps_max": float,
    "q.eps_min": float,
    "q.decay": float,
    "nars.babble_chance": float,
    "nars.decision_threshold": float,
    "nars.window": int,
    "bridge.command": str,
    "bridge.deadline_ms": float,
    "bridge.pattern": str,
    "bridge.babbling": str,
}


class UsageErr(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageErr(f"{self.prog}: {message}")


def parse_bool(text: str) -> bool:
    v = text.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def read_config_file(path: Path) -> Dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment line."""
    values: Dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in RUN_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def build_config(values: Dict[str, str]) -> ExperimentConfig:
    """Turn a flat key/value mapping into an :class:`ExperimentConfig`."""
    unknown = set(values) - set(RUN_KEYS)
    if unknown:
        raise ConfigError(f"unknown keys: {sorted(unknown)}")
    conv = {}
    try:
        for key, raw in values.items():
            if key == "slippery":
                conv[key] = parse_bool(raw) if isinstance(raw, str) else bool(raw)
            else:
                conv[key] = RUN_KEYS[key](raw)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad value: {exc}") from exc
    if "env" not in conv:
        raise ConfigError("no environment given (env / --env)")
    try:
        env = EnvId.parse(conv["env"], conv.get("slippery", False))
        q = QLearningConfig(**{k[2:]: v for k, v in conv.items() if k.startswith("q.")})
        nars = MiniNarsConfig(
            babble_chance=conv.get("nars.babble_chance", 0.2),
            decision_threshold=conv.get("nars.decision_threshold", 0.501),
            window=conv.get("nars.window", 10),
        )
        bridge = BridgeSettings()
        bridge = replace(bridge, **{k[7:]: v for k, v in conv.items() if k.startswith("bridge.")})
        if bridge.babbling is not None and bridge.babbling.lower() in ("", "none"):
            bridge = replace(bridge, babbling=None)
        out = conv.get("out") or os.environ.get("ARENA_OUT") or "runs"
        return ExperimentConfig(
            env=env,
            agent=conv.get("agent", "qlearning"),
            total_steps=conv.get("steps", 100000),
            seed=conv.get("seed", 1),
            step_limit=conv.get("step_limit"),
            q=q,
            nars=nars,
            bridge=bridge,
            out_dir=Path(out),
        )
    except ContractViolation as exc:
        raise ConfigError(str(exc)) from exc


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="key = value configuration file")
    p.add_argument("--batch", type=Path, help="directory of configuration files to run in parallel")
    p.add_argument("--jobs", type=int, default=None, help="parallel workers for --batch")
    p.add_argument("--slippery", action="store_const", const="true", default=None)
    for key in RUN_KEYS:
        if key == "slippery":
            continue
        flag = "--" + key.replace("_", "-") if "." not in key else "--" + key
        p.add_argument(flag, dest=key, default=None, metavar=key.split(".")[-1].upper())


def _flag_values(args: argparse.Namespace) -> Dict[str, str]:
    return {k: getattr(args, k) for k in RUN_KEYS if getattr(args, k, None) is not None}


def _run_one(values: Dict[str, str]) -> str:
    cfg = build_config(values)
    mlog = run_experiment(cfg)
    write_outputs(cfg, mlog, cfg.out_dir)
    return str(cfg.out_dir)


def cmd_run(args: argparse.Namespace) -> int:
    flags = _flag_values(args)
    if args.batch is not None:
        return _run_batch(args, flags)
    values = read_config_file(args.config) if args.config else {}
    values.update(flags)
    if "env" not in values:
        raise UsageErr("run: --env is required (or env = ... in --config)")
    out = _run_one(values)
    print(f"wrote {out}")
    return EXIT_OK


def _run_batch(args: argparse.Namespace, flags: Dict[str, str]) -> int:
    files = sorted(p for p in Path(args.batch).iterdir()
                   if p.is_file() and p.suffix in (".conf", ".cfg", ".ini", ".txt"))
    if not files:
        raise ConfigError(f"no configuration files in {args.batch}")
    base_out = Path(flags.get("out") or os.environ.get("ARENA_OUT") or "runs")
    jobs = []
    for f in files:
        values = read_config_file(f)
        values.update(flags)
        values["out"] = str(base_out / f.stem)
        build_config(values)  # validate everything before starting
        jobs.append(values)
    with ProcessPoolExecutor(max_workers=args.jobs) as pool:
        for out in pool.map(_run_one, jobs):
            print(f"wrote {out}")
    return EXIT_OK


def cmd_plot(args: argparse.Namespace) -> int:
    if args.family == "list":
        for name, fam in FAMILIES.items():
            print(f"{name}\t{fam.title}")
        return EXIT_OK
    if args.family != "all" and args.family not in FAMILIES:
        raise UsageErr(f"plot: unknown family {args.family!r}; try --family list")
    if args.input is None:
        raise UsageErr("plot: --input is required")
    try:
        with open(args.input, encoding="utf-8", newline="") as fh:
            records = read_steps_csv(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {args.input}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    names = list(FAMILIES) if args.family == "all" else [args.family]
    if args.family == "all":
        out_dir = Path(args.output or ".")
        out_dir.mkdir(parents=True, exist_ok=True)
        targets = [out_dir / f"{n}.svg" for n in names]
    else:
        targets = [Path(args.output or f"{args.family}.svg")]
        targets[0].parent.mkdir(parents=True, exist_ok=True)
    for name, target in zip(names, targets):
        fam = FAMILIES[name]
        xs, ys = fam.series(records)
        title = fam.title if not args.title else f"{fam.title} ({args.title})"
        target.write_text(line_chart(xs, ys, title, fam.xlabel, fam.ylabel), encoding="utf-8")
        print(f"wrote {target}")
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    try:
        env = EnvId.parse(args.env, args.slippery)
    except ContractViolation as exc:
        raise ConfigError(str(exc)) from exc
    model = enumerate_model(env)
    values, policy = value_iteration(model, args.discount, args.tol)
    v0 = start_value(model, values)
    out_dir = Path(args.out or os.environ.get("ARENA_OUT") or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"policy-{env.name}.csv"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("state,action,value\n")
        for s, (a, v) in enumerate(zip(policy, values)):
            fh.write(f"{s},{a},{v!r}\n")
    print(f"{v0:.12g}")
    log.info("greedy policy written to %s", path)
    return EXIT_OK


def cmd_list_envs(args: argparse.Namespace) -> int:
    for env_id in ALL_ENV_IDS:
        env = make_env(env_id)
        n_obs = env.n_states if env.n_states is not None else "unbounded"
        print(f"{env_id.name}\tactions={env.n_actions}\tobservations={n_obs}\t"
              f"ops={','.join(ACTION_NAMES[env_id.kind])}")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nars-arena", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    run = sub.add_parser("run", help="run an experiment and write its logs")
    _add_run_flags(run)
    run.set_defaults(func=cmd_run)

    plot = sub.add_parser("plot", help="render SVG learning curves from a step log")
    plot.add_argument("--input", "-i", type=Path)
    plot.add_argument("--family", "-f", required=True, help="family name, 'all' or 'list'")
    plot.add_argument("--output", "-o", type=Path, help="SVG path (directory for --family all)")
    plot.add_argument("--title", default=None, help="suffix appended to the chart title")
    plot.set_defaults(func=cmd_plot)

    oracle = sub.add_parser("oracle", help="solve a tabular environment by value iteration")
    oracle.add_argument("--env", required=True)
    oracle.add_argument("--slippery", action="store_true")
    oracle.add_argument("--discount", type=float, default=1.0)
    oracle.add_argument("--tol", type=float, default=1e-10)
    oracle.add_argument("--out", default=None)
    oracle.set_defaults(func=cmd_oracle)

    envs = sub.add_parser("list-envs", help="list the available environments")
    envs.set_defaults(func=cmd_list_envs)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageErr(parser.format_usage().strip())
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return args.func(args)
    except UsageErr as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, UnsupportedEnvironment) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ArenaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
