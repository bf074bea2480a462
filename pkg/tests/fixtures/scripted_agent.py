#!/usr/bin/env python3
"""Fake reasoner for bridge tests.

Answers every standing goal line ``G! :|:`` with the next scripted entry:

    <name>      print "^<name> executed with args"
    -           stay silent
    garbage     print a malformed line and nothing else
    unknown     execute an op that was never registered
    exit        terminate immediately

Belief events are echoed as ``Input: ...`` lines, like a chatty reasoner.
"""
import argparse
import itertools
import sys
import time


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--script", help="file with one entry per line")
    ap.add_argument("--cycle", help="comma separated entries repeated forever")
    ap.add_argument("--delay-ms", type=float, default=0.0)
    ap.add_argument("--fail-on-start", action="store_true")
    args = ap.parse_args()
    if args.fail_on_start:
        print("fixture: refusing to start", file=sys.stderr)
        sys.exit(7)
    if args.script:
        with open(args.script) as fh:
            entries = iter([ln.strip() for ln in fh if ln.strip()])
    elif args.cycle:
        entries = itertools.cycle(args.cycle.split(","))
    else:
        entries = itertools.repeat("-")
    out = sys.stdout
    for raw in sys.stdin:
        line = raw.rstrip("\n")
        if line.endswith(". :|:"):
            out.write(f"Input: {line}\n")
            out.flush()
        if line != "G! :|:":
            continue
        entry = next(entries, "-")
        if args.delay_ms:
            time.sleep(args.delay_ms / 1000.0)
        if entry == "exit":
            out.flush()
            sys.exit(0)
        if entry == "-":
            continue
        if entry == "garbage":
            out.write("^^ \x01 partial outp\n")
        elif entry == "unknown":
            out.write("^teleport executed with args\n")
        else:
            out.write(f"^{entry} executed with args\n")
        out.flush()


if __name__ == "__main__":
    main()
