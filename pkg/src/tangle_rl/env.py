"""Episodic MDP wrapper around the puzzle simulator."""

from __future__ import annotations

from dataclasses import dataclass, field

from .puzzle import (
    ActionTriple,
    Impossible,
    PuzzleSpec,
    PuzzleState,
    apply,
    is_goal,
)


class _NoOp:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NoOp"

    def __str__(self) -> str:
        return "noop"


NOOP = _NoOp()


@dataclass(frozen=True)
class RewardSchedule:
    impossible: float = -100
    goal: float = 1000
    step: float = -1
    noop: float = -100  # reward when a non-deterministic no-op leaves the agent in place

    def __post_init__(self):
        if not (self.goal > self.step > self.impossible):
            raise ValueError("rewards must satisfy goal > step > impossible")


@dataclass(frozen=True)
class Perturbation:
    p_intended: float = 0.8
    p_opposite: float = 0.1
    p_noop: float = 0.1

    def __post_init__(self):
        total = self.p_intended + self.p_opposite + self.p_noop
        if abs(total - 1.0) > 1e-12 or min(self.p_intended, self.p_opposite, self.p_noop) < 0:
            raise ValueError(f"perturbation probabilities must be non-negative and sum to 1, got {total}")


@dataclass(frozen=True)
class NonStationarySwitch:
    """Fit changes applied once, from episode `after_episode + 1` onward."""

    after_episode: int = 2000
    changes: dict = field(
        default_factory=lambda: {
            ("Disk1", "Ring"): False,
            ("Disk2", "Ring"): False,
            ("Disk1", "PostHole1"): True,
            ("Disk2", "PostHole1"): True,
        }
    )


@dataclass(frozen=True)
class EnvConfig:
    spec: PuzzleSpec
    perturbation: Perturbation | None = None
    nonstationary: NonStationarySwitch | None = None
    max_steps: int = 500
    rewards: RewardSchedule = RewardSchedule()


def make_config(spec: PuzzleSpec, *, switch_after: int | None = None, **kw) -> EnvConfig:
    """Environment config matching the PuzzleSpec variant name."""
    if spec.variant == "nondeterministic" and "perturbation" not in kw:
        kw["perturbation"] = Perturbation()
    if spec.variant == "nonstationary-disk" and "nonstationary" not in kw:
        kw["nonstationary"] = NonStationarySwitch(after_episode=2000 if switch_after is None else switch_after)
    return EnvConfig(spec=spec, **kw)


@dataclass
class StepOutcome:
    next_state: PuzzleState
    reward: float
    terminal: bool
    realized_action: object  # ActionTriple or NOOP
    impossible: bool
    reason: str | None = None
    goal: bool = False


def perturb(action: ActionTriple, rng, probs: Perturbation = Perturbation()):
    """Draw the action the environment actually executes."""
    u = rng.random()
    if u < probs.p_intended:
        return action
    if u < probs.p_intended + probs.p_opposite:
        return action.inverse()
    return NOOP


class EpisodeOver(RuntimeError):
    pass


class PuzzleEnv:
    def __init__(self, config: EnvConfig, rng=None):
        if config.perturbation is not None and rng is None:
            raise ValueError("a non-deterministic environment needs a random generator")
        self.config = config
        self.rng = rng
        self.spec = config.spec
        self.switched = False
        self.state = self.spec.initial
        self.steps = 0
        self.done = False

    def reset(self) -> PuzzleState:
        self.state = self.spec.initial
        self.steps = 0
        self.done = False
        return self.state

    def schedule_tick(self, episode: int) -> bool:
        """Apply the scheduled fit switch when `episode` passes it; True on the switching call."""
        ns = self.config.nonstationary
        if ns is None or self.switched or episode <= ns.after_episode:
            return False
        self.spec = self.spec.with_fits(ns.changes)
        self.switched = True
        return True

    def step(self, action: ActionTriple) -> StepOutcome:
        if self.done:
            raise EpisodeOver("step() called on a finished episode; call reset()")
        cfg = self.config
        rewards = cfg.rewards
        realized = action
        if cfg.perturbation is not None:
            realized = perturb(action, self.rng, cfg.perturbation)
        self.steps += 1
        budget_hit = self.steps >= cfg.max_steps
        if realized is NOOP:
            out = StepOutcome(self.state, rewards.noop, budget_hit, NOOP, False)
        else:
            result = apply(self.spec, self.state, realized)
            if type(result) is Impossible:
                out = StepOutcome(self.state, rewards.impossible, budget_hit, realized, True, result.reason)
            else:
                self.state = result.next
                if is_goal(self.spec, self.state):
                    out = StepOutcome(self.state, rewards.goal, True, realized, False, goal=True)
                else:
                    out = StepOutcome(self.state, rewards.step, budget_hit, realized, False)
        self.done = out.terminal
        return out
