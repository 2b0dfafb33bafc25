"""Tabular agents: Q-Learning, HAQL, oASP(MDP) and HoASP(MDP)."""

from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass

from .asp import GlobalProgram, seed_q_rows
from .env import NOOP, PuzzleEnv
from .puzzle import (
    NO_FIT,
    Impossible,
    PuzzleSpec,
    apply,
    canonical_key,
    enumerate_actions,
    is_goal,
    parse_action,
    parse_state,
)


class AlgorithmKind(enum.Enum):
    QLEARNING = "qlearning"
    HAQL = "haql"
    OASP = "oasp"
    HOASP = "hoasp"

    @property
    def uses_program(self) -> bool:
        return self in (AlgorithmKind.OASP, AlgorithmKind.HOASP)

    @property
    def uses_heuristic(self) -> bool:
        return self in (AlgorithmKind.HAQL, AlgorithmKind.HOASP)


@dataclass(frozen=True)
class LearnerConfig:
    alpha: float = 0.2
    gamma: float = 0.9
    epsilon_base: float = 0.1
    epsilon_decay_start: int = 4000
    epsilon_decay_every: int = 250
    epsilon_decay_step: float = 0.01
    epsilon_floor: float = 0.03
    eta: float = 0.25
    xi: float = 1.0
    beta: float = 1.0
    max_steps: int = 500
    episodes: int = 6000
    reinit_ql_on_switch: bool = True

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must be in (0, 1]")
        if not 0 <= self.gamma < 1:
            raise ValueError("gamma must be in [0, 1)")
        if self.epsilon_floor > self.epsilon_base:
            raise ValueError("epsilon_floor must not exceed epsilon_base")


def epsilon_at(config: LearnerConfig, episode: int) -> float:
    if episode < 1:
        raise ValueError("episodes are numbered from 1")
    if episode <= config.epsilon_decay_start:
        return config.epsilon_base
    drops = (episode - config.epsilon_decay_start) // config.epsilon_decay_every
    eps = round(config.epsilon_base - config.epsilon_decay_step * drops, 12)
    return max(config.epsilon_floor, eps)


class QTable:
    """Sparse Q(s, a); states are any hashable canonical form."""

    def __init__(self):
        self.entries: dict = {}  # state -> {action: value}
        self.visited: set = set()
        self._pairs = 0

    def __len__(self) -> int:
        return self._pairs

    def __contains__(self, sa) -> bool:
        s, a = sa
        row = self.entries.get(s)
        return row is not None and a in row

    def get(self, s, a, default: float = 0.0) -> float:
        row = self.entries.get(s)
        if row is None:
            return default
        return row.get(a, default)

    def row(self, s) -> dict:
        return self.entries.get(s, {})

    def ensure(self, s, a) -> int:
        row = self.entries.setdefault(s, {})
        if a in row:
            return 0
        row[a] = 0.0
        self._pairs += 1
        return 1

    def ensure_row(self, s, actions) -> None:
        row = self.entries.setdefault(s, {})
        for a in actions:
            if a not in row:
                row[a] = 0.0
                self._pairs += 1

    def set(self, s, a, value: float) -> None:
        if not math.isfinite(value):
            raise ValueError(f"non-finite Q value {value}")
        row = self.entries.setdefault(s, {})
        if a not in row:
            self._pairs += 1
        row[a] = value

    def max_value(self, s) -> float:
        row = self.entries.get(s)
        if not row:
            return 0.0
        return max(row.values())

    def remove(self, s, a) -> None:
        row = self.entries.get(s)
        if row is not None and a in row:
            del row[a]
            self._pairs -= 1

    def remove_action(self, a) -> None:
        for row in self.entries.values():
            if a in row:
                del row[a]
                self._pairs -= 1

    def clear_values(self) -> None:
        self.entries.clear()
        self._pairs = 0

    def greedy(self, s, actions):
        """Highest-valued action among `actions` (missing entries read as 0); first wins ties."""
        row = self.entries.get(s, {})
        best = None
        best_v = -math.inf
        for a in actions:
            v = row.get(a, 0.0)
            if v > best_v:
                best, best_v = a, v
        return best

    # -- persistence ---------------------------------------------------

    def to_text(self, puzzle: str, variant: str) -> str:
        rows = []
        for s, row in self.entries.items():
            key = s if isinstance(s, str) else canonical_key(s)
            for a, v in row.items():
                rows.append((key, str(a), v))
        rows.sort(key=lambda r: (r[0], r[1]))
        lines = [f"# puzzle={puzzle} variant={variant}\n"]
        lines += [f"{k}\t{a}\t{v!r}\n" for k, a, v in rows]
        return "".join(lines)

    def save(self, path: str, puzzle: str, variant: str) -> None:
        d = os.path.dirname(path)
        if d:
            os.makedirs(d, exist_ok=True)
        with open(path, "w", newline="\n") as fh:
            fh.write(self.to_text(puzzle, variant))

    @classmethod
    def load(cls, path: str, spec: PuzzleSpec | None = None) -> tuple:
        """Read a snapshot; returns (table, header dict)."""
        with open(path) as fh:
            text = fh.read()
        return cls.from_text(text, spec)

    @classmethod
    def from_text(cls, text: str, spec: PuzzleSpec | None = None) -> tuple:
        table = cls()
        header = {}
        cache: dict = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            if line.startswith("#"):
                for tok in line[1:].split():
                    if "=" in tok:
                        k, v = tok.split("=", 1)
                        header[k] = v
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"line {lineno}: expected 3 tab-separated fields")
            key, action, value = parts
            s = cache.get(key)
            if s is None:
                s = cache[key] = parse_state(key, spec)
            table.set(s, parse_action(action), float(value))
            table.visited.add(s)
        return table, header


def q_update(qtable: QTable, s, a, r: float, s2, config: LearnerConfig) -> float:
    q = qtable.get(s, a)
    new = q + config.alpha * (r + config.gamma * qtable.max_value(s2) - q)
    qtable.set(s, a, new)
    return new


# --------------------------------------------------------------------------
# heuristics


class IdentityMapper:
    """Source and target puzzles share their state notation."""

    def reset(self) -> None:
        pass

    def advance(self, action) -> None:
        pass

    def map(self, s):
        return s


class TraceMapper:
    """Maps a target state to the source state reached by replaying the same moves.

    The replay follows the current episode; the first mapping found for a
    target state is kept for the rest of the trial.
    """

    def __init__(self, source_spec: PuzzleSpec):
        self.source_spec = source_spec
        self.current = source_spec.initial
        self.memo: dict = {}

    def reset(self) -> None:
        self.current = self.source_spec.initial

    def advance(self, action) -> None:
        if self.current is None:
            return
        r = apply(self.source_spec, self.current, action)
        self.current = None if type(r) is Impossible else r.next

    def map(self, s):
        if s in self.memo:
            return self.memo[s]
        self.memo[s] = self.current
        return self.current


def map_state(mapper, trace, target=None):
    """Source state reached by `trace` (None if some move is impossible there)."""
    if isinstance(mapper, IdentityMapper):
        return target
    if target is not None and target in mapper.memo:
        return mapper.memo[target]
    s = mapper.source_spec.initial
    for a in trace:
        r = apply(mapper.source_spec, s, a)
        if type(r) is Impossible:
            s = None
            break
        s = r.next
    if target is not None:
        mapper.memo[target] = s
    return s


class HeuristicSource:
    def __init__(self, source_q: QTable, mapper=None):
        self.source_q = source_q
        self.mapper = mapper if mapper is not None else IdentityMapper()

    def suggest(self, s):
        """Best source action for the state `s` maps to, or None."""
        m = self.mapper.map(s)
        if m is None:
            return None
        row = self.source_q.entries.get(m)
        if not row:
            return None
        best = None
        best_v = -math.inf
        for a, v in row.items():
            if v > best_v:
                best, best_v = a, v
        return best


def heuristic_values(qtable: QTable, s, suggested, actions, eta: float) -> dict:
    """H(s, .) over `actions`: only the suggested action gets a non-zero value."""
    if suggested is None:
        return {a: 0.0 for a in actions}
    row = qtable.entries.get(s, {})
    top = max(row.get(a, 0.0) for a in actions)
    return {a: (top - row.get(a, 0.0) + eta if a == suggested else 0.0) for a in actions}


def heuristic_H(qtable: QTable, source: HeuristicSource | None, s, a, actions, eta: float = 0.25) -> float:
    if source is None:
        return 0.0
    return heuristic_values(qtable, s, source.suggest(s), actions, eta)[a]


def select_action(qtable: QTable, s, actions, epsilon: float, rng, config: LearnerConfig, suggested=None):
    """Epsilon-greedy over Q + xi * H^beta; greedy ties broken uniformly at random."""
    if not actions:
        raise RuntimeError("no admissible action in this state")
    if rng.random() < epsilon:
        return actions[int(rng.integers(len(actions)))]
    row = qtable.entries.get(s, {})
    values = [row.get(a, 0.0) for a in actions]
    if suggested is not None and suggested in actions:
        i = actions.index(suggested)
        h = max(values) - values[i] + config.eta
        values[i] += config.xi * h**config.beta
    best = max(values)
    ties = [a for a, v in zip(actions, values) if v == best]
    if len(ties) == 1:
        return ties[0]
    return ties[int(rng.integers(len(ties)))]


# --------------------------------------------------------------------------
# agents


@dataclass
class EpisodeMetrics:
    steps: int
    accumulated_return: float
    visited_states: int
    qtable_pairs: int


class Agent:
    def __init__(
        self,
        kind: AlgorithmKind,
        spec: PuzzleSpec,
        config: LearnerConfig = LearnerConfig(),
        rng=None,
        source: HeuristicSource | None = None,
    ):
        kind = AlgorithmKind(kind)
        if kind.uses_heuristic and source is None:
            raise ValueError(f"{kind.value} needs a heuristic source")
        if rng is None:
            raise ValueError("an agent needs a seeded random generator")
        self.kind = kind
        self.config = config
        self.rng = rng
        self.actions = enumerate_actions(spec)
        self.qtable = QTable()
        self.program = GlobalProgram(self.actions) if kind.uses_program else None
        self.source = source if kind.uses_heuristic else None

    @property
    def visited(self) -> set:
        return self.qtable.visited

    def on_switch(self) -> None:
        """Called when the environment changes under the agent."""
        if self.kind is AlgorithmKind.QLEARNING and self.config.reinit_ql_on_switch:
            self.qtable.clear_values()

    def admissible(self, s) -> list:
        if self.program is None:
            return self.actions
        return self.program.admissible(s)

    def _suggest(self, s):
        return self.source.suggest(s) if self.source is not None else None

    def run_episode(self, env: PuzzleEnv, episode: int) -> EpisodeMetrics:
        if self.program is None:
            return self._run_q(env, episode)
        return self._run_asp(env, episode)

    def _run_q(self, env: PuzzleEnv, episode: int) -> EpisodeMetrics:
        cfg = self.config
        q = self.qtable
        eps = epsilon_at(cfg, episode)
        mapper = self.source.mapper if self.source is not None else None
        if mapper is not None:
            mapper.reset()
        s = env.reset()
        steps = 0
        ret = 0.0
        while True:
            q.visited.add(s)
            q.ensure_row(s, self.actions)
            a = select_action(q, s, self.actions, eps, self.rng, cfg, self._suggest(s))
            out = env.step(a)
            steps += 1
            ret += out.reward
            q_update(q, s, a, out.reward, out.next_state, cfg)
            if mapper is not None and not out.impossible and out.realized_action is not NOOP:
                mapper.advance(out.realized_action)
            s = out.next_state
            if out.terminal:
                break
        return EpisodeMetrics(steps, ret, len(q.visited), len(q))

    def _run_asp(self, env: PuzzleEnv, episode: int) -> EpisodeMetrics:
        cfg = self.config
        q = self.qtable
        prog = self.program
        eps = epsilon_at(cfg, episode)
        mapper = self.source.mapper if self.source is not None else None
        if mapper is not None:
            mapper.reset()
        s = env.reset()
        steps = 0
        ret = 0.0
        while True:
            adm = prog.admissible(s)
            if not adm:
                raise RuntimeError("every action is forbidden in this state")
            first = s not in q.visited
            if first:
                q.visited.add(s)
                prog.registry.state(s)
                a = adm[int(self.rng.integers(len(adm)))]
            else:
                a = select_action(q, s, adm, eps, self.rng, cfg, self._suggest(s))
            out = env.step(a)
            steps += 1
            ret += out.reward
            s2 = out.next_state
            if out.impossible:
                realized = out.realized_action
                if out.reason == NO_FIT:
                    prog.record_forbidden(None, realized)
                    q.remove_action(realized)
                else:
                    prog.record_forbidden(s, realized)
                    q.remove(s, realized)
            if not prog.is_constrained(s, a):
                if prog.record_transition(s, a, s2) or first:
                    seed_q_rows(prog, s, q)
                q_update(q, s, a, out.reward, s2, cfg)
            if mapper is not None and not out.impossible and out.realized_action is not NOOP:
                mapper.advance(out.realized_action)
            s = s2
            if out.terminal:
                break
        return EpisodeMetrics(steps, ret, len(q.visited), len(q))

    def greedy_rollout(self, spec: PuzzleSpec, max_steps: int = 500, rng=None) -> int:
        """Steps the greedy policy needs from the initial state (max_steps if it never arrives).

        Ties among equal values go to a uniformly random action when `rng` is given,
        otherwise to the first in enumeration order.  Nothing is learned.
        """
        s = spec.initial
        for step in range(1, max_steps + 1):
            adm = self.admissible(s)
            row = self.qtable.entries.get(s, {})
            if rng is None:
                a = self.qtable.greedy(s, adm)
            else:
                values = [row.get(x, 0.0) for x in adm]
                best = max(values)
                ties = [x for x, v in zip(adm, values) if v == best]
                a = ties[int(rng.integers(len(ties)))] if len(ties) > 1 else ties[0]
            r = apply(spec, s, a)
            if type(r) is not Impossible:
                s = r.next
                if is_goal(spec, s):
                    return step
        return max_steps


def run_episode(kind, env, qtable, program=None, source=None, episode=1, rng=None, config=LearnerConfig()):
    """Run one episode with explicit state; returns EpisodeMetrics."""
    agent = Agent.__new__(Agent)
    agent.kind = AlgorithmKind(kind)
    if agent.kind.uses_program and program is None:
        raise ValueError(f"{agent.kind.value} needs a GlobalProgram")
    if agent.kind.uses_heuristic and source is None:
        raise ValueError(f"{agent.kind.value} needs a heuristic source")
    agent.config = config
    agent.rng = rng
    agent.actions = enumerate_actions(env.spec)
    agent.qtable = qtable
    agent.program = program if agent.kind.uses_program else None
    agent.source = source if agent.kind.uses_heuristic else None
    return agent.run_episode(env, episode)
