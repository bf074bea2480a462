from .experiment import (
    AGENT_KINDS,
    BridgeSettings,
    EpisodeSummary,
    ExperimentConfig,
    MetricsLog,
    StepRecord,
    build_agent,
    run_experiment,
    state_label,
    write_outputs,
)
from .metrics import FAMILIES, Family, cumulative, read_steps_csv
from .oracle import EvalResult, evaluate_policy, start_value, value_iteration
