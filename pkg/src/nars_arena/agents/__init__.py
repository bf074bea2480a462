from .base import Agent, AgentDecision, RandomAgent, Source
from .mininars import (
    HistoryEntry,
    LinkTable,
    MiniNarsAgent,
    MiniNarsConfig,
    TemporalLink,
    Truth,
    expectation,
    nars_decide,
    nars_learn,
    truth_from_evidence,
)
from .qlearning import (
    QLearningAgent,
    QLearningConfig,
    QTable,
    argmax,
    epsilon_at,
    q_update,
    select_action_q,
)
