"""Reinforcement learning on string-and-hole spatial puzzles."""

from .asp import GlobalProgram, StateProgram, parse_program
from .env import NOOP, EnvConfig, Perturbation, PuzzleEnv, RewardSchedule, make_config
from .harness import ExperimentConfig, aggregate, run_experiment, t_test
from .learn import Agent, AlgorithmKind, HeuristicSource, LearnerConfig, QTable, TraceMapper
from .puzzle import (
    ActionTriple,
    PuzzleSpec,
    PuzzleState,
    apply,
    bfs_solve,
    build_spec,
    canonical_key,
    enumerate_actions,
    is_goal,
    parse_action,
    parse_state,
    print_state,
)

__version__ = "0.1.0"
