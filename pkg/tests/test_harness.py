import math
import os

import numpy as np
import pytest
from scipy import stats

from tangle_rl.cli import main
from tangle_rl.harness import (
    RAW_COLUMNS,
    ExperimentConfig,
    aggregate,
    area_under_curve,
    column,
    default_out,
    export_aggregate,
    export_raw,
    export_ttest,
    read_aggregate,
    read_raw,
    run_experiment,
    t_test,
)


# -- aggregate ----------------------------------------------------------------


def test_aggregate_two_trials():
    raw = np.array([[[3, 0, 0, 0]], [[5, 0, 0, 0]]], dtype=float)
    mean, sd = aggregate(raw)["steps"]
    assert mean[0] == 4 and sd[0] == pytest.approx(math.sqrt(2), abs=1e-15)


def test_aggregate_degenerate_cases():
    one = np.array([[[7, -3, 2, 9], [1, 1, 1, 1]]], dtype=float)
    agg = aggregate(one)
    assert list(agg["steps"][0]) == [7, 1] and list(agg["steps"][1]) == [0, 0]
    same = np.repeat(one, 4, axis=0)
    assert all(np.all(sd == 0) for _, sd in aggregate(same).values())
    assert len(aggregate(same)["return"][0]) == 2


def test_aggregate_rejects_ragged():
    with pytest.raises(ValueError):
        aggregate([np.zeros((3, 4)), np.zeros((4, 4))])


# -- t-test -------------------------------------------------------------------


def test_ttest_identical_samples():
    a = np.array([1.0, 2.0, 3.0, 4.0])
    r = t_test(a, a.copy())
    assert r.t[0] == 0 and r.p[0] == 1
    flat = t_test([5.0, 5.0, 5.0], [5.0, 5.0])
    assert flat.t[0] == 0 and flat.p[0] == 1


def test_ttest_separated_means():
    jitter = np.random.default_rng(0).normal(0, 1e-6, size=8)
    r = t_test(np.ones(4) + jitter[:4], 2 * np.ones(4) + jitter[4:])
    assert r.p[0] < 0.05 and r.t[0] < 0


def welch_direct(a, b):
    a, b = list(map(float, a)), list(map(float, b))
    na, nb = len(a), len(b)
    ma, mb = sum(a) / na, sum(b) / nb
    va = sum((x - ma) ** 2 for x in a) / (na - 1)
    vb = sum((x - mb) ** 2 for x in b) / (nb - 1)
    se = math.sqrt(va / na + vb / nb)
    t = (ma - mb) / se
    df = (va / na + vb / nb) ** 2 / ((va / na) ** 2 / (na - 1) + (vb / nb) ** 2 / (nb - 1))
    return t, df, 2 * stats.t.sf(abs(t), df)


def test_ttest_welch_example():
    t, df, p = welch_direct([0, 10], [5, 5])
    r = t_test([0.0, 10.0], [5.0, 5.0])
    assert abs(r.t[0]) == pytest.approx(abs(t), abs=1e-12)
    assert r.df[0] == pytest.approx(df) and r.p[0] == pytest.approx(p)


def test_ttest_matches_direct_formula_randomly():
    rng = np.random.default_rng(17)
    for _ in range(200):
        a = rng.normal(rng.uniform(-5, 5), rng.uniform(0.1, 3), size=int(rng.integers(2, 12)))
        b = rng.normal(rng.uniform(-5, 5), rng.uniform(0.1, 3), size=int(rng.integers(2, 12)))
        t, df, p = welch_direct(a, b)
        r = t_test(a, b)
        assert r.t[0] == pytest.approx(t, rel=1e-10)
        assert r.df[0] == pytest.approx(df, rel=1e-10)
        assert r.p[0] == pytest.approx(p, rel=1e-8, abs=1e-300)


def test_ttest_student_flag():
    a, b = [1.0, 2.0, 4.0], [3.0, 5.0, 9.0, 11.0]
    r = t_test(a, b, equal_var=True)
    ref = stats.ttest_ind(a, b, equal_var=True)
    assert r.t[0] == pytest.approx(ref.statistic) and r.p[0] == pytest.approx(ref.pvalue)


def test_ttest_needs_two_samples():
    with pytest.raises(ValueError):
        t_test([1.0], [1.0, 2.0])


def test_ttest_p_in_unit_interval():
    rng = np.random.default_rng(3)
    r = t_test(rng.integers(0, 3, size=(5, 50)), rng.integers(0, 3, size=(6, 50)))
    assert np.all((r.p >= 0) & (r.p <= 1))


# -- CSV ----------------------------------------------------------------------


def test_csv_round_trip(tmp_path):
    rng = np.random.default_rng(1)
    raw = np.stack([np.column_stack([rng.integers(1, 501, 6), rng.normal(0, 500, 6), rng.integers(0, 99, 6), rng.integers(0, 99, 6)]) for _ in range(3)])
    path = tmp_path / "raw.csv"
    export_raw(raw, str(path))
    text = path.read_bytes()
    assert b"\r" not in text
    assert text.decode().splitlines()[0] == ",".join(RAW_COLUMNS)
    np.testing.assert_array_equal(read_raw(str(path)), raw)
    agg = aggregate(raw)
    export_aggregate(agg, str(tmp_path / "agg.csv"))
    back = read_aggregate(str(tmp_path / "agg.csv"))
    for name in agg:
        np.testing.assert_array_equal(back[name][0], agg[name][0])
        np.testing.assert_array_equal(back[name][1], agg[name][1])


def test_one_row_csv(tmp_path):
    export_raw(np.array([[[12, 989, 3, 5]]], dtype=float), str(tmp_path / "r.csv"))
    assert (tmp_path / "r.csv").read_text() == "trial,episode,steps,return,visited_states,qtable_pairs\n0,1,12,989,3,5\n"


def test_write_error_names_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError, match="file"):
        export_raw(np.zeros((1, 1, 4)), str(blocker / "sub" / "raw.csv"))


def test_read_raw_rejects_bad_header(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        read_raw(str(p))


def test_ttest_export_format():
    text = export_ttest(t_test(np.array([[1.0, 2.0], [1.0, 3.0]]), np.array([[1.0, 2.0], [1.0, 3.0]])))
    assert text.splitlines() == ["episode,t,df,p", "1,0,2,1", "2,0,2,1"]


def test_area_under_curve():
    v = np.array([[1, 2, 3, 100], [4, 4, 4, 4]], dtype=float)
    np.testing.assert_array_equal(area_under_curve(v, 3), [2, 4])
    with pytest.raises(ValueError):
        column(np.zeros((1, 1, 4)), "bogus")


# -- experiments --------------------------------------------------------------


@pytest.fixture(scope="module")
def small_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("small")
    cfg = ExperimentConfig(puzzle="fishermans", variant="simplified", algorithm="oasp", trials=2, episodes=50, seed=3, out=str(out))
    return cfg, run_experiment(cfg)


def test_small_run_files(small_run):
    cfg, res = small_run
    lines = open(os.path.join(cfg.out, "raw.csv")).read().splitlines()
    assert len(lines) == 1 + 100
    agg_lines = open(os.path.join(cfg.out, "aggregate.csv")).read().splitlines()
    assert agg_lines[0] == "episode,steps_mean,steps_sd,return_mean,return_sd,visited_states_mean,visited_states_sd,qtable_pairs_mean,qtable_pairs_sd"
    assert len(agg_lines) == 51
    for k in range(2):
        assert os.path.isfile(os.path.join(cfg.out, f"trial{k}", "qtable.tsv"))
        assert os.path.isfile(os.path.join(cfg.out, f"trial{k}", "programs", "global.constraints"))
    assert res.raw.shape == (2, 50, 4)
    assert column(res.raw, "steps").max() <= 500
    assert (res.raw >= 0)[:, :, [0, 2, 3]].all()


def test_aggregates_recomputed_from_raw(small_run):
    cfg, _ = small_run
    raw = read_raw(os.path.join(cfg.out, "raw.csv"))
    emitted = read_aggregate(os.path.join(cfg.out, "aggregate.csv"))
    for name, (mean, sd) in aggregate(raw).items():
        assert np.max(np.abs(mean - emitted[name][0])) <= 1e-9
        assert np.max(np.abs(sd - emitted[name][1])) <= 1e-9


def test_accumulated_return_is_reward_sum(small_run):
    _, res = small_run
    steps, ret = column(res.raw, "steps"), column(res.raw, "return")
    # every step costs at least 1 and a solved episode gains 1000
    assert np.all(ret <= 1000 - steps + 1)


def test_hoasp_without_heuristic_fails():
    with pytest.raises(ValueError):
        ExperimentConfig(puzzle="fishermans", variant="original", algorithm="hoasp")
    cfg = ExperimentConfig(algorithm="hoasp", heuristic_from="/nonexistent/q.tsv", trials=1, episodes=1, out=None)
    with pytest.raises(FileNotFoundError):
        run_experiment(cfg)


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(trials=0)
    with pytest.raises(ValueError):
        ExperimentConfig(episodes=0)
    with pytest.raises(ValueError):
        ExperimentConfig(variant="original", switch_after=10)


def test_heuristic_from_file_runs(small_run, tmp_path):
    cfg, _ = small_run
    src = os.path.join(cfg.out, "trial0", "qtable.tsv")
    hcfg = ExperimentConfig(puzzle="fishermans", variant="original", algorithm="haql", heuristic_from=src, trials=1, episodes=5, out=str(tmp_path))
    assert run_experiment(hcfg).raw.shape == (1, 5, 4)


def test_default_out_env(monkeypatch):
    monkeypatch.setenv("TANGLE_RL_OUT", "/tmp/elsewhere")
    assert default_out() == "/tmp/elsewhere"
    monkeypatch.delenv("TANGLE_RL_OUT")
    assert default_out() == "runs"


# -- command line -------------------------------------------------------------


def test_cli_solve(capsys):
    assert main(["solve", "--puzzle", "fishermans", "--variant", "simplified"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[:5] == ["pass(Sphere1,Ring,-)", "pass(Disk1,PostHole1,-)", "pass(Post,Ring,-)", "pass(Ring,PostHole1,-)", "pass(Sphere1,Ring,+)"]
    assert out[5] == "length 5"


def test_cli_usage_errors(capsys):
    assert main(["run", "--algorithm", "hoasp", "--out", "/tmp/never"]) == 1
    assert "--heuristic-from" in capsys.readouterr().err
    assert main(["run", "--puzzle", "ropeladder", "--variant", "nonstationary-disk"]) == 1
    with pytest.raises(SystemExit) as exc:
        main(["run", "--bogus-flag"])
    assert exc.value.code == 1


def test_cli_runtime_errors(capsys, tmp_path):
    assert main(["show-state", "chain(Post)=[+Bogus]"]) == 2
    assert "line 1, column 15" in capsys.readouterr().err
    assert main(["run", "--algorithm", "haql", "--heuristic-from", str(tmp_path / "none.tsv"), "--out", str(tmp_path)]) == 2


def test_cli_run_and_ttest(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("TANGLE_RL_OUT", str(tmp_path / "a"))
    common = ["run", "--variant", "simplified", "--trials", "2", "--episodes", "20", "--no-artifacts"]
    assert main(common + ["--algorithm", "oasp"]) == 0
    assert main(common + ["--algorithm", "qlearning", "--out", str(tmp_path / "b")]) == 0
    capsys.readouterr()
    assert main(["ttest", str(tmp_path / "a" / "raw.csv"), str(tmp_path / "b" / "raw.csv"), "--column", "steps"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "episode,t,df,p" and len(lines) == 21
    ps = [float(ln.split(",")[3]) for ln in lines[1:]]
    assert all(0 <= p <= 1 for p in ps)
    assert main(["ttest", str(tmp_path / "a" / "raw.csv"), str(tmp_path / "b" / "raw.csv"), "--column", "nope"]) == 1


def test_cli_show_state(capsys):
    assert main(["show-state", "chain(Post)=[+Ring];chain(String)=[+Sphere1,+Post,+Sphere2]"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "chain(Post)=[+Ring];chain(String)=[+Sphere1,+Post,+Sphere2]"
    assert out[-1] == "goal false"
    assert main(["show-state", "--puzzle", "ropeladder", "--variant", "nonstationary-disk", "x"]) == 1
