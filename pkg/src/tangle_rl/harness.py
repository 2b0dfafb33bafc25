"""Multi-trial experiments, aggregation, t-tests and CSV files."""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import stats

from .env import PuzzleEnv, make_config
from .learn import (
    AlgorithmKind,
    Agent,
    HeuristicSource,
    IdentityMapper,
    LearnerConfig,
    QTable,
    TraceMapper,
)
from .puzzle import DEFAULT_CHAIN_LENGTH, build_spec

METRICS = ("steps", "return", "visited_states", "qtable_pairs")
RAW_COLUMNS = ("trial", "episode") + METRICS


def default_out() -> str:
    return os.environ.get("TANGLE_RL_OUT", "runs")


@dataclass(frozen=True)
class ExperimentConfig:
    puzzle: str = "fishermans"
    variant: str = "simplified"
    algorithm: str = "oasp"
    trials: int = 30
    episodes: int = 6000
    seed: int = 0
    out: str | None = None
    heuristic_from: str | None = None
    learner: LearnerConfig = field(default_factory=LearnerConfig)
    winding_limit: int = 2
    max_chain_length: int | None = DEFAULT_CHAIN_LENGTH
    string_post_cap: int | None = None
    switch_after: int | None = None
    parallel: int = 1
    probe_last: int = 0  # greedy rollouts after each of the last N episodes
    save_artifacts: bool = True

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.episodes < 1:
            raise ValueError("episodes must be >= 1")
        if self.parallel < 1:
            raise ValueError("parallel must be >= 1")
        kind = AlgorithmKind(self.algorithm)
        if kind.uses_heuristic and not self.heuristic_from:
            raise ValueError(f"{kind.value} needs a heuristic Q-table (heuristic_from)")
        if self.switch_after is not None and self.variant != "nonstationary-disk":
            raise ValueError("switch_after only applies to the nonstationary-disk variant")

    def spec(self, variant: str | None = None, puzzle: str | None = None):
        return build_spec(
            puzzle or self.puzzle,
            variant or self.variant,
            winding_limit=self.winding_limit,
            max_chain_length=self.max_chain_length,
            string_post_cap=self.string_post_cap if variant is None else None,
        )


@dataclass
class TrialResult:
    trial: int
    metrics: np.ndarray  # (episodes, 4)
    probes: np.ndarray  # (probe_last,) greedy rollout lengths, may be empty


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    raw: np.ndarray  # (trials, episodes, 4)
    probes: np.ndarray  # (trials, probe_last)
    aggregate: dict  # metric -> (mean, sd) arrays over episodes


def trial_streams(seed: int, k: int) -> tuple:
    """Agent, environment and probe generators for trial k."""
    ss = np.random.SeedSequence(seed + k)
    return tuple(np.random.default_rng(s) for s in ss.spawn(3))


def load_heuristic(config: ExperimentConfig, spec) -> HeuristicSource:
    path = config.heuristic_from
    if not path or not os.path.isfile(path):
        raise FileNotFoundError(f"heuristic Q-table not found: {path}")
    with open(path) as fh:
        first = fh.readline()
    header = dict(tok.split("=", 1) for tok in first.lstrip("#").split() if "=" in tok)
    puzzle = header.get("puzzle", config.puzzle)
    variant = header.get("variant", config.variant)
    source_spec = config.spec(variant=variant, puzzle=puzzle)
    table, _ = QTable.load(path, source_spec)
    if source_spec.initial == spec.initial:
        return HeuristicSource(table, IdentityMapper())
    return HeuristicSource(table, TraceMapper(source_spec))


def run_trial(config: ExperimentConfig, k: int) -> TrialResult:
    spec = config.spec()
    agent_rng, env_rng, probe_rng = trial_streams(config.seed, k)
    env = PuzzleEnv(make_config(spec, switch_after=config.switch_after), env_rng)
    kind = AlgorithmKind(config.algorithm)
    source = load_heuristic(config, spec) if kind.uses_heuristic else None
    agent = Agent(kind, spec, config.learner, rng=agent_rng, source=source)
    out = np.zeros((config.episodes, len(METRICS)))
    probes = []
    probe_from = config.episodes - config.probe_last
    for ep in range(1, config.episodes + 1):
        if env.schedule_tick(ep):
            agent.on_switch()
        m = agent.run_episode(env, ep)
        out[ep - 1] = (m.steps, m.accumulated_return, m.visited_states, m.qtable_pairs)
        if ep > probe_from:
            probes.append(agent.greedy_rollout(env.spec, config.learner.max_steps, probe_rng))
    if config.save_artifacts and config.out:
        tdir = os.path.join(config.out, f"trial{k}")
        os.makedirs(tdir, exist_ok=True)
        agent.qtable.save(os.path.join(tdir, "qtable.tsv"), spec.name, spec.variant)
        if agent.program is not None:
            agent.program.save(tdir)
    return TrialResult(k, out, np.array(probes, dtype=float))


def _run_trial_args(args):
    return run_trial(*args)


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    if AlgorithmKind(config.algorithm).uses_heuristic:
        if not config.heuristic_from or not os.path.isfile(config.heuristic_from):
            raise FileNotFoundError(f"heuristic Q-table not found: {config.heuristic_from}")
    if config.out:
        try:
            os.makedirs(config.out, exist_ok=True)
        except OSError as exc:
            raise OSError(f"cannot create output directory {config.out}: {exc}") from exc
    jobs = [(config, k) for k in range(config.trials)]
    if config.parallel > 1 and config.trials > 1:
        with ProcessPoolExecutor(max_workers=min(config.parallel, config.trials)) as pool:
            results = list(pool.map(_run_trial_args, jobs))
    else:
        results = [run_trial(*job) for job in jobs]
    results.sort(key=lambda r: r.trial)
    raw = np.stack([r.metrics for r in results])
    probes = np.stack([r.probes for r in results]) if config.probe_last else np.zeros((config.trials, 0))
    agg = aggregate(raw)
    if config.out:
        export_raw(raw, os.path.join(config.out, "raw.csv"))
        export_aggregate(agg, os.path.join(config.out, "aggregate.csv"))
        if config.probe_last:
            export_probes(probes, config.episodes, os.path.join(config.out, "probes.csv"))
    return ExperimentResult(config, raw, probes, agg)


# --------------------------------------------------------------------------
# statistics


def aggregate(raw) -> dict:
    """Per-episode mean and sample sd of each metric across trials.

    `raw` is an array (trials, episodes, metrics) or a sequence of per-trial
    (episodes, metrics) arrays, which must all have the same length.
    """
    if isinstance(raw, np.ndarray):
        arr = raw
    else:
        lengths = {len(t) for t in raw}
        if len(lengths) > 1:
            raise ValueError(f"trials have different episode counts: {sorted(lengths)}")
        arr = np.asarray([np.asarray(t, dtype=float) for t in raw])
    if arr.ndim != 3 or arr.shape[0] < 1:
        raise ValueError("raw metrics must have shape (trials, episodes, metrics)")
    mean = arr.mean(axis=0)
    sd = arr.std(axis=0, ddof=1) if arr.shape[0] > 1 else np.zeros_like(mean)
    return {name: (mean[:, i], sd[:, i]) for i, name in enumerate(METRICS[: arr.shape[2]])}


@dataclass
class TTestResult:
    t: np.ndarray
    df: np.ndarray
    p: np.ndarray


def t_test(a, b, equal_var: bool = False) -> TTestResult:
    """Two-sided two-sample t-test per column; Welch unless `equal_var`.

    `a` and `b` are (trials, episodes) or 1-D per-trial samples.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if b.ndim == 1:
        b = b[:, None]
    na, nb = a.shape[0], b.shape[0]
    if na < 2 or nb < 2:
        raise ValueError("t_test needs at least 2 samples on each side")
    if a.shape[1:] != b.shape[1:]:
        raise ValueError(f"episode counts differ: {a.shape[1:]} vs {b.shape[1:]}")
    ma, mb = a.mean(axis=0), b.mean(axis=0)
    va, vb = a.var(axis=0, ddof=1), b.var(axis=0, ddof=1)
    diff = ma - mb
    if equal_var:
        df = np.full_like(diff, na + nb - 2)
        pooled = ((na - 1) * va + (nb - 1) * vb) / (na + nb - 2)
        se2 = pooled * (1 / na + 1 / nb)
    else:
        qa, qb = va / na, vb / nb
        se2 = qa + qb
        with np.errstate(divide="ignore", invalid="ignore"):
            df = se2**2 / (qa**2 / (na - 1) + qb**2 / (nb - 1))
        df = np.where(se2 > 0, df, na + nb - 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(se2 > 0, diff / np.sqrt(se2), np.where(diff == 0, 0.0, np.sign(diff) * np.inf))
    p = 2 * stats.t.sf(np.abs(t), df)
    p = np.clip(np.where(np.isnan(p), 1.0, p), 0.0, 1.0)
    return TTestResult(t, df, p)


# --------------------------------------------------------------------------
# CSV


def _fmt(v) -> str:
    v = float(v)
    if v.is_integer() and abs(v) < 2**53:
        return str(int(v))
    return format(v, ".17g")


def _open_write(path: str):
    d = os.path.dirname(path)
    try:
        if d:
            os.makedirs(d, exist_ok=True)
        return open(path, "w", newline="")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def export_raw(raw: np.ndarray, path: str) -> None:
    with _open_write(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RAW_COLUMNS)
        for k, trial in enumerate(raw):
            for e, row in enumerate(trial, 1):
                w.writerow([k, e] + [_fmt(v) for v in row])


def export_aggregate(agg: dict, path: str) -> None:
    names = list(agg)
    n = len(agg[names[0]][0])
    with _open_write(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["episode"] + [f"{m}_{s}" for m in names for s in ("mean", "sd")])
        for e in range(n):
            row = [e + 1]
            for m in names:
                mean, sd = agg[m]
                row += [_fmt(mean[e]), _fmt(sd[e])]
            w.writerow(row)


def export_probes(probes: np.ndarray, episodes: int, path: str) -> None:
    first = episodes - probes.shape[1] + 1
    with _open_write(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["trial", "episode", "greedy_steps"])
        for k, row in enumerate(probes):
            for i, v in enumerate(row):
                w.writerow([k, first + i, _fmt(v)])


def export_ttest(result: TTestResult, path: str | None = None) -> str:
    lines = ["episode,t,df,p\n"]
    for e, (t, df, p) in enumerate(zip(result.t, result.df, result.p), 1):
        lines.append(f"{e},{_fmt(t)},{_fmt(df)},{_fmt(p)}\n")
    text = "".join(lines)
    if path is not None:
        with _open_write(path) as fh:
            fh.write(text)
    return text


def read_raw(path: str) -> np.ndarray:
    """Load a raw CSV back into a (trials, episodes, 4) array."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != RAW_COLUMNS:
            raise ValueError(f"{path}: expected header {','.join(RAW_COLUMNS)}")
        rows: dict = {}
        for lineno, rec in enumerate(reader, 2):
            if len(rec) != len(RAW_COLUMNS):
                raise ValueError(f"{path}:{lineno}: expected {len(RAW_COLUMNS)} fields")
            rows.setdefault(int(rec[0]), []).append((int(rec[1]), [float(x) for x in rec[2:]]))
    if not rows:
        raise ValueError(f"{path}: no data rows")
    trials = []
    for k in sorted(rows):
        eps = sorted(rows[k])
        if [e for e, _ in eps] != list(range(1, len(eps) + 1)):
            raise ValueError(f"{path}: trial {k} episodes are not 1..n")
        trials.append([v for _, v in eps])
    lengths = {len(t) for t in trials}
    if len(lengths) > 1:
        raise ValueError(f"{path}: trials have different episode counts")
    return np.asarray(trials, dtype=float)


def read_aggregate(path: str) -> dict:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = np.asarray([[float(x) for x in rec] for rec in reader])
    out = {}
    for i in range(1, len(header), 2):
        name = header[i].rsplit("_", 1)[0]
        out[name] = (data[:, i], data[:, i + 1])
    return out


def column(raw: np.ndarray, name: str) -> np.ndarray:
    """(trials, episodes) slice of one metric."""
    if name not in METRICS:
        raise ValueError(f"unknown column {name!r}; expected one of {METRICS}")
    return raw[:, :, METRICS.index(name)]


def with_overrides(config: ExperimentConfig, **kw) -> ExperimentConfig:
    return replace(config, **kw)


def area_under_curve(values: np.ndarray, upto: int | None = None) -> np.ndarray:
    """Per-trial mean of a (trials, episodes) metric over the first `upto` episodes."""
    v = values if upto is None else values[:, :upto]
    if v.shape[1] == 0:
        return np.full(v.shape[0], math.nan)
    return v.mean(axis=1)
