import json

import numpy as np
import pytest

from gammamrl import cli, io
from gammamrl.distributions import ShapeLabel
from gammamrl.gibbs import Dataset
from gammamrl.simulate import PRESETS, SimSpec, preset, simulate

FAST = ["--L", "6", "--burn-in", "20", "--thin", "1", "--n-save", "40", "--pilot-iters", "20",
        "--ew-pilot-iters", "50", "--grid-points", "32", "--prior-draws", "50"]


def write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_load_dataset_examples(tmp_path):
    groups = io.load_dataset(write(tmp_path, "time,status,group\n5.2,1,A\n3.0,0,B\n4.0,1,A\n"))
    assert list(groups) == ["A", "B"]
    assert groups["A"].times.tolist() == [5.2, 4.0]
    assert groups["A"].censored.tolist() == [False, False]
    assert groups["B"].censored.tolist() == [True]


def test_load_dataset_without_group_column(tmp_path):
    groups = io.load_dataset(write(tmp_path, "status,time\n1,2.5\n0,1.0\n\n"))
    assert list(groups) == ["all"]
    assert groups["all"].times.tolist() == [2.5, 1.0]


@pytest.mark.parametrize("body,line", [
    ("time,status\n1.0,1\n-1,1\n", 3),
    ("time,status\n0,1\n", 2),
    ("time,status\nabc,1\n", 2),
    ("time,status\n1.0,2\n", 2),
    ("time,status\n1.0,1,extra\n", 2),
])
def test_load_dataset_errors_report_line(tmp_path, body, line):
    with pytest.raises(io.DatasetFormatError) as exc:
        io.load_dataset(write(tmp_path, body))
    assert exc.value.line == line
    assert f"line {line}" in str(exc.value)


def test_load_dataset_bad_header_and_empty(tmp_path):
    with pytest.raises(io.DatasetFormatError):
        io.load_dataset(write(tmp_path, "t,s\n1,1\n"))
    with pytest.raises(io.DatasetFormatError):
        io.load_dataset(write(tmp_path, ""))
    with pytest.raises(io.DatasetFormatError):
        io.load_dataset(write(tmp_path, "time,status\n"))


def test_simulate_write_load_round_trip(tmp_path):
    data = simulate(preset("sim2", seed=4, censoring=("exponential", 0.05)))
    path = tmp_path / "sim.csv"
    io.write_dataset(path, data)
    back = io.load_dataset(path)["sim2"]
    assert np.array_equal(back.times, data.times)
    assert np.array_equal(back.censored, data.censored)
    assert data.censored.any()


def test_presets_match_published_mixtures():
    assert PRESETS["sim1"] == ((0.35, 10, 0.5), (0.4, 20, 1), (0.15, 30, 5), (0.1, 40, 8))
    assert PRESETS["sim2"] == ((0.3, 15, 0.2), (0.25, 12, 0.5), (0.35, 8, 2), (0.1, 3, 6))
    assert preset("sim1").n == 200 and preset("sim2").n == 100
    with pytest.raises(ValueError):
        preset("sim3")


def test_single_gamma_sample_mean():
    data = simulate(SimSpec(((1.0, 2.0, 1.0),), 100_000, seed=1))
    se = np.sqrt(2.0 / data.n)
    assert abs(data.times.mean() - 2.0) <= 3 * se


def test_fixed_censoring():
    data = simulate(SimSpec(((1.0, 2.0, 1.0),), 5000, ("fixed", 3.0), seed=2))
    assert np.all(data.times[data.censored] == 3.0)
    assert np.all(data.times[~data.censored] <= 3.0)
    assert abs(data.censored.mean() - 0.199) < 0.03


def test_simspec_validation():
    with pytest.raises(ValueError):
        SimSpec(((0.5, 1, 1),), 10)
    with pytest.raises(ValueError):
        SimSpec(((1.0, -1, 1),), 10)
    with pytest.raises(ValueError):
        SimSpec(((1.0, 1, 1),), 10, ("weird", 1.0))


def test_grid_csv_round_trip_is_exact(tmp_path):
    from gammamrl.analytics import pointwise_bands
    from gammamrl.numerics import Grid
    grid = Grid(np.geomspace(0.1, 7.3, 13))
    values = np.random.default_rng(0).random((20, 13)) / 3
    fg = pointwise_bands(values, grid)
    io.write_grid_csv(tmp_path / "g.csv", fg)
    back = io.read_grid_csv(tmp_path / "g.csv")
    assert np.array_equal(back["t"], grid.points)
    assert np.array_equal(back["median"], fg.median)
    assert np.all(np.diff(back["t"]) > 0)


def test_write_json_handles_numpy(tmp_path):
    io.write_json(tmp_path / "s.json", {"a": np.float64(1.5), "b": np.arange(3), "c": np.inf,
                                        "d": np.bool_(True)})
    assert json.loads((tmp_path / "s.json").read_text()) == {"a": 1.5, "b": [0, 1, 2], "c": "inf",
                                                             "d": True}


def test_catalog_examples():
    grid = np.geomspace(0.01, 10, 50)
    rows, label = cli.catalog("gamma", [1.0, 1.0], grid)
    assert label is ShapeLabel.CONSTANT
    assert np.allclose(rows[:, 4], 1.0, rtol=1e-12)
    assert cli.catalog("exp_weibull", [0.5, 3.0, 1.0], grid)[1] is ShapeLabel.BT
    rows, _ = cli.catalog("linear", [0.5, 2.0], grid)
    assert np.allclose(rows[:, 4], 0.5 * grid + 2.0, rtol=1e-13)
    rows, label = cli.catalog("loglogistic", [0.8, 1.0], grid)
    assert label is ShapeLabel.UNDEFINED and np.all(np.isnan(rows[:, 4]))


def test_cli_catalog_output(tmp_path, capsys):
    assert cli.main(["catalog", "--dist", "gamma", "1", "1", "--n-points", "5"]) == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert out[0] == "t,f,S,h,m" and out[-1] == "# shape: CONSTANT"
    assert len(out) == 7
    assert cli.main(["catalog", "--dist", "cauchy", "1"]) == 2


def test_cli_elicit(capsys):
    assert cli.main(["elicit", "--center", "2.0", "--range", "3.0", "--n", "200"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["prior_var_T"] == pytest.approx(out["target_var_T"], rel=1e-9)
    assert out["a_Sigma"] == 4.0
    assert out["expected_clusters_at_prior_mean_alpha"] == pytest.approx(2 * np.log(101))


def test_cli_simulate(tmp_path, capsys):
    path = tmp_path / "s.csv"
    assert cli.main(["simulate", "--preset", "sim1", "--seed", "3", "--out", str(path)]) == 0
    data = io.load_dataset(path)["sim1"]
    assert data.n == 200 and not data.censored.any()
    assert np.array_equal(data.times, simulate(preset("sim1", seed=3)).times)
    path2 = tmp_path / "c.csv"
    assert cli.main(["simulate", "--component", "1", "2", "1", "--n", "50", "--seed", "1",
                     "--censor-fixed", "2.0", "--out", str(path2)]) == 0
    assert io.load_dataset(path2)["all"].censored.any()
    assert cli.main(["simulate", "--seed", "1", "--out", str(path2)]) == 2


def _two_groups(tmp_path):
    a = simulate(preset("sim1", n=60, seed=1))
    b = simulate(preset("sim2", n=50, seed=2))
    path = tmp_path / "two.csv"
    io.write_dataset(path, {"A": Dataset(a.times / 10, a.censored), "B": Dataset(b.times / 10)})
    return path


def test_fit_is_byte_identical(tmp_path):
    path = _two_groups(tmp_path)
    outs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        assert cli.main(["fit", "--data", str(path), "--out", str(out), "--seed", "7"] + FAST) == 0
        outs.append(out)
    files = sorted(p.name for p in outs[0].iterdir())
    assert files == sorted(p.name for p in outs[1].iterdir())
    for name in files:
        if name != "timing.json":
            assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes(), name
    for expected in ("draws_A_dpmm.csv", "A_dpmm_mrl.csv", "B_dpmm_density.csv",
                     "correlation_A.csv", "mrl_difference.csv", "prob_mrl_greater.csv",
                     "summary.json", "timing.json"):
        assert expected in files
    summary = json.loads((outs[0] / "summary.json").read_text())
    assert summary["status_mapping"].startswith("input status 1 = event observed")
    assert summary["config"]["seed"] == 7 and "out" not in summary["config"]
    assert set(summary["acceptance"]) == {"A/dpmm", "B/dpmm"}


def test_fit_mrl_first_row_near_posterior_mean(tmp_path):
    path = _two_groups(tmp_path)
    out = tmp_path / "run"
    assert cli.main(["fit", "--data", str(path), "--out", str(out), "--seed", "1",
                     "--grid-min", "1e-6"] + FAST) == 0
    grid = io.read_grid_csv(out / "A_dpmm_mrl.csv")
    draws = np.genfromtxt(out / "draws_A_dpmm.csv", delimiter=",", names=True)
    L = 6
    w = np.column_stack([draws[f"p{l + 1}"] for l in range(L)])
    th = np.column_stack([draws[f"theta{l + 1}"] for l in range(L)])
    ph = np.column_stack([draws[f"phi{l + 1}"] for l in range(L)])
    means = np.sum(w * np.exp(th - ph), axis=1)
    assert grid["median"][0] == pytest.approx(np.median(means), rel=1e-4)


def test_compare_emits_dk_table(tmp_path):
    path = _two_groups(tmp_path)
    out = tmp_path / "cmp"
    assert cli.main(["compare", "--data", str(path), "--out", str(out), "--seed", "2"] + FAST) == 0
    summary = json.loads((out / "summary.json").read_text())
    gg = summary["gelfand_ghosh"]
    assert set(gg) == {"A/dpmm", "A/exp_weibull", "B/dpmm", "B/exp_weibull"}
    for entry in gg.values():
        ks = sorted(float(k) for k in entry["D"])
        assert ks == [1.0, 2.0, 5.0, 10.0, 100.0, np.inf]
        assert entry["D"]["inf"] == pytest.approx(entry["G"] + entry["P"])
    lines = (out / "dk_table.csv").read_text().splitlines()
    assert lines[0] == "group,model,k,D,G,P" and len(lines) == 1 + 4 * 6
    assert (out / "draws_A_exp_weibull.csv").exists()


def test_config_file_and_validation(tmp_path, capsys):
    path = _two_groups(tmp_path)
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"model": "exp_weibull", "n_save": 30, "burn_in": 10, "thin": 1,
                               "ew_pilot_iters": 20}))
    out = tmp_path / "ew"
    assert cli.main(["fit", "--data", str(path), "--out", str(out), "--config", str(cfg)]) == 0
    assert (out / "A_exp_weibull_mrl.csv").exists()
    assert cli.main(["fit", "--data", str(tmp_path / "missing.csv"), "--out", str(out)]) == 2
    cfg.write_text(json.dumps({"bogus": 1}))
    assert cli.main(["fit", "--data", str(path), "--out", str(out), "--config", str(cfg)]) == 2
    assert cli.main(["fit", "--data", str(path), "--out", str(out), "--level", "1.5"]) == 2
    assert "error:" in capsys.readouterr().err
