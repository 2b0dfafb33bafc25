import numpy as np
import pytest

from tangle_rl.env import (
    NOOP,
    EnvConfig,
    EpisodeOver,
    NonStationarySwitch,
    Perturbation,
    PuzzleEnv,
    RewardSchedule,
    make_config,
    perturb,
)
from tangle_rl.puzzle import build_spec, canonical_key, enumerate_actions, parse_action


class FixedDraw:
    """Stands in for a generator whose next uniform draw is known."""

    def __init__(self, u):
        self.u = u

    def random(self):
        return self.u


@pytest.fixture
def ff():
    return build_spec("fishermans", "original")


def test_reset_returns_initial(ff):
    env = PuzzleEnv(make_config(ff))
    assert env.reset() == ff.initial
    env.step(parse_action("pass(Sphere1,Ring,-)"))
    assert canonical_key(env.reset()) == canonical_key(ff.initial)
    assert env.steps == 0
    rl = build_spec("ropeladder", "original")
    assert PuzzleEnv(make_config(rl)).reset() == rl.initial


@pytest.mark.parametrize("u,expected", [(0.42, "same"), (0.85, "opposite"), (0.95, "noop"), (0.0, "same"), (0.8, "opposite"), (0.9, "noop")])
def test_perturb_thresholds(u, expected):
    a = parse_action("pass(Disk1,PostHole1,-)")
    got = perturb(a, FixedDraw(u))
    want = {"same": a, "opposite": a.inverse(), "noop": NOOP}[expected]
    assert got == want


def test_perturb_frequencies():
    rng = np.random.default_rng(12345)
    a = parse_action("pass(Disk1,PostHole1,-)")
    n = 100_000
    draws = [perturb(a, rng) for _ in range(n)]
    same = sum(d == a for d in draws) / n
    opp = sum(d == a.inverse() for d in draws) / n
    noop = sum(d is NOOP for d in draws) / n
    assert abs(same - 0.8) <= 0.01 and abs(opp - 0.1) <= 0.01 and abs(noop - 0.1) <= 0.01


def test_reward_schedule_validation():
    RewardSchedule()
    with pytest.raises(ValueError):
        RewardSchedule(goal=-5)
    with pytest.raises(ValueError):
        Perturbation(0.8, 0.1, 0.2)


def test_step_rewards(ff):
    env = PuzzleEnv(make_config(ff))
    env.reset()
    out = env.step(parse_action("pass(Sphere1,PostHole1,+)"))
    assert out.reward == -100 and out.impossible and not out.terminal
    assert out.next_state == ff.initial
    out = env.step(parse_action("pass(Sphere1,Ring,-)"))
    assert out.reward == -1 and not out.terminal


def test_goal_reward_and_terminal(ff):
    env = PuzzleEnv(make_config(ff))
    env.reset()
    plan = ["pass(Sphere1,Ring,-)", "pass(Disk1,PostHole1,-)", "pass(Post,Ring,-)", "pass(Ring,PostHole1,-)", "pass(Sphere1,Ring,+)"]
    rewards = [env.step(parse_action(a)).reward for a in plan]
    assert rewards == [-1, -1, -1, -1, 1000]
    assert env.done
    with pytest.raises(EpisodeOver):
        env.step(parse_action(plan[0]))


def test_step_budget(ff):
    env = PuzzleEnv(EnvConfig(ff, max_steps=7))
    env.reset()
    a = parse_action("pass(Sphere1,PostHole1,+)")
    outs = [env.step(a) for _ in range(7)]
    assert [o.terminal for o in outs] == [False] * 6 + [True]
    assert all(o.reward == -100 for o in outs)


def test_rewards_partition_and_length_bound(ff):
    rng = np.random.default_rng(3)
    env = PuzzleEnv(make_config(build_spec("fishermans", "nondeterministic")), np.random.default_rng(4))
    acts = enumerate_actions(ff)
    for _ in range(5):
        env.reset()
        n = 0
        while not env.done:
            out = env.step(acts[int(rng.integers(len(acts)))])
            n += 1
            assert out.reward in (-100, -1, 1000)
        assert n <= 500


def test_noop_keeps_state_and_costs_100():
    spec = build_spec("fishermans", "nondeterministic")
    env = PuzzleEnv(make_config(spec), FixedDraw(0.95))
    env.reset()
    out = env.step(parse_action("pass(Sphere1,Ring,-)"))
    assert out.realized_action is NOOP and out.reward == -100 and out.next_state == spec.initial
    assert not out.impossible


def test_opposite_face_realized():
    spec = build_spec("fishermans", "nondeterministic")
    env = PuzzleEnv(make_config(spec), FixedDraw(0.85))
    env.reset()
    a = parse_action("pass(Sphere1,Ring,-)")
    assert env.step(a).realized_action == a.inverse()


def test_nondeterministic_needs_rng():
    with pytest.raises(ValueError):
        PuzzleEnv(make_config(build_spec("fishermans", "nondeterministic")))


def test_seeded_episode_is_reproducible():
    spec = build_spec("fishermans", "nondeterministic")
    acts = enumerate_actions(spec)

    def trace(seed):
        env = PuzzleEnv(make_config(spec), np.random.default_rng(seed))
        pick = np.random.default_rng(seed + 1)
        env.reset()
        out = []
        while not env.done:
            o = env.step(acts[int(pick.integers(len(acts)))])
            out.append((canonical_key(o.next_state), o.reward, str(o.realized_action)))
        return out

    assert trace(9) == trace(9)


def test_schedule_tick_switches_once():
    spec = build_spec("fishermans", "nonstationary-disk")
    env = PuzzleEnv(make_config(spec, switch_after=3))
    disk_ring = parse_action("pass(Disk1,Ring,+)")
    assert [env.schedule_tick(e) for e in (1, 2, 3)] == [False] * 3
    env.reset()
    assert not env.step(disk_ring).impossible
    assert env.schedule_tick(4)
    assert not env.schedule_tick(5)
    env.reset()
    assert env.step(disk_ring).impossible
    env.reset()
    assert not env.step(parse_action("pass(Disk1,PostHole1,-)")).impossible


def test_schedule_tick_without_switch_is_noop(ff):
    env = PuzzleEnv(make_config(ff))
    assert not env.schedule_tick(10_000)
    assert env.spec is ff


def test_default_switch_is_after_2000():
    cfg = make_config(build_spec("fishermans", "nonstationary-disk"))
    assert cfg.nonstationary == NonStationarySwitch()
    assert cfg.nonstationary.after_episode == 2000
