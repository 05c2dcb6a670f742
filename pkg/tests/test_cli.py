import csv
import json

import pytest
from click.testing import CliRunner

from setbf.cli import jeffreys_label, main

PAPER = {
    "model": {"model": "binomial", "n_trials": 20},
    "prior": {
        "p_h0": 0.5,
        "h0_density": {"family": "beta", "alpha": 1, "beta": 1},
        "h1_density": {"family": "beta", "alpha": 15, "beta": 7},
    },
    "data": [14],
}


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def write(tmp_path):
    def _write(name, content):
        p = tmp_path / name
        p.write_text(content if isinstance(content, str) else json.dumps(content))
        return str(p)

    return _write


def _split_config(n_trials):
    return dict(PAPER, model={"model": "binomial", "n_trials": n_trials}, data=[])


class TestCompute:
    def test_paper_example(self, runner, write):
        res = runner.invoke(main, ["compute", "--config", write("c.json", PAPER)])
        assert res.exit_code == 0, res.output
        assert "2.89238" in res.output and "0.256912" in res.output

    def test_json(self, runner, write):
        res = runner.invoke(main, ["--json", "compute", "--config", write("c.json", PAPER)])
        doc = json.loads(res.output)
        assert round(doc["bf"], 2) == 2.89
        assert round(doc["p_h0_post"], 3) == 0.257
        assert round(doc["p_h1_post"], 3) == 0.743

    def test_empty_data(self, runner, write):
        res = runner.invoke(main, ["compute", "--json", "--config", write("c.json", dict(PAPER, data=[]))])
        assert json.loads(res.output)["bf"] == 1.0

    def test_mismatch_exit_2(self, runner, write):
        cfg = dict(PAPER, model={"model": "binomial", "n_trials": 10})
        res = runner.invoke(main, ["compute", "--config", write("c.json", cfg)])
        assert res.exit_code == 2
        assert "data" in res.output

    def test_missing_config(self, runner):
        res = runner.invoke(main, ["compute"])
        assert res.exit_code == 2 and "--config" in res.output

    def test_jeffreys(self, runner, write):
        res = runner.invoke(main, ["compute", "--config", write("c.json", dict(PAPER, output={"jeffreys": True}))])
        assert "barely worth mentioning evidence for H1" in res.output

    def test_precision(self, runner, write):
        res = runner.invoke(main, ["compute", "--config", write("c.json", dict(PAPER, output={"precision": 3}))])
        assert "2.89 " in res.output or "2.89\n" in res.output

    def test_overlap_flag(self, runner, write):
        cfg = {
            "model": {"model": "bernoulli"},
            "prior": {"overall": {"family": "beta", "alpha": 1, "beta": 1}, "h0": [[0, 0.6]], "h1": [[0.4, 1]]},
            "data": [1, 0],
        }
        path = write("c.json", cfg)
        assert runner.invoke(main, ["compute", "--config", path]).exit_code == 2
        res = runner.invoke(main, ["compute", "--config", path, "--allow-overlap"])
        assert res.exit_code == 0
        assert "warning" in res.output

    def test_numerical_failure_exit_3(self, runner, write):
        cfg = {
            "model": {"model": "bernoulli"},
            "prior": {
                "p_h0": 0.5,
                "h0_density": {"family": "point", "at": 0},
                "h1_density": {"family": "point", "at": 0},
            },
            "data": [1],
        }
        res = runner.invoke(main, ["compute", "--config", write("c.json", cfg)])
        assert res.exit_code == 3


class TestUpdate:
    def test_split_equals_merged(self, runner, write, tmp_path):
        split = write("split.json", _split_config(10))
        merged = write("merged.json", _split_config(20))
        x, y, xy = write("x.csv", "7\n"), write("y.csv", "7\n"), write("xy.csv", "14\n")
        s1, s2 = str(tmp_path / "s1.json"), str(tmp_path / "s2.json")
        assert runner.invoke(main, ["update", "--config", split, "--data", x, "--state-out", s1]).exit_code == 0
        res = runner.invoke(main, ["update", "--config", split, "--state-in", s1, "--data", y, "--state-out", s2])
        assert res.exit_code == 0
        final = json.loads(open(s2).read())
        direct = json.loads(runner.invoke(main, ["compute", "--json", "--config", merged, "--data", xy]).output)
        assert final["p_h0"] == pytest.approx(direct["p_h0_post"], rel=1e-12)
        assert final["history"] == ["x", "y"]

    def test_round_trip_identity(self, runner, write, tmp_path):
        cfg = write("c.json", _split_config(10))
        empty = write("e.csv", "# nothing\n")
        s0, s1 = str(tmp_path / "s0.json"), str(tmp_path / "s1.json")
        runner.invoke(main, ["update", "--config", cfg, "--data", empty, "--state-out", s0])
        runner.invoke(main, ["update", "--config", cfg, "--state-in", s0, "--data", empty, "--state-out", s1])
        a, b = json.loads(open(s0).read()), json.loads(open(s1).read())
        assert a.pop("history") == ["e"] and b.pop("history") == ["e", "e"]
        assert a == b

    def test_model_mismatch(self, runner, write, tmp_path):
        s = str(tmp_path / "s.json")
        runner.invoke(main, ["update", "--config", write("a.json", _split_config(10)), "--state-out", s])
        res = runner.invoke(main, ["update", "--config", write("b.json", _split_config(20)), "--state-in", s,
                                   "--state-out", s])
        assert res.exit_code == 2 and "model" in res.output

    def test_stale_version(self, runner, write, tmp_path):
        s = tmp_path / "s.json"
        cfg = write("a.json", _split_config(10))
        runner.invoke(main, ["update", "--config", cfg, "--state-out", str(s)])
        doc = json.loads(s.read_text())
        doc["format_version"] = 0
        s.write_text(json.dumps(doc))
        res = runner.invoke(main, ["update", "--config", cfg, "--state-in", str(s), "--state-out", str(s)])
        assert res.exit_code == 2 and "format_version" in res.output

    def test_requires_state_out(self, runner, write):
        res = runner.invoke(main, ["update", "--config", write("a.json", PAPER)])
        assert res.exit_code == 2


class TestCheckConsistency:
    def test_pass(self, runner, write):
        cfg = write("c.json", _split_config(10))
        res = runner.invoke(main, ["check-consistency", "--config", cfg, "--x", write("x.csv", "7\n3\n"),
                                   "--y", write("y.csv", "9\n")])
        assert res.exit_code == 0 and "PASS" in res.output

    def test_inconsistent_demo(self, runner, write):
        cfg = write("c.json", _split_config(10))
        args = ["--json", "check-consistency", "--config", cfg, "--x", write("x.csv", "7\n"),
                "--y", write("y.csv", "7\n"), "--inconsistent-demo"]
        doc = json.loads(runner.invoke(main, args).output)
        assert doc["passed"]
        assert doc["inconsistent_demo"]["discrepancy"] > 0

    def test_empty_y(self, runner, write):
        cfg = write("c.json", _split_config(10))
        args = ["check-consistency", "--json", "--inconsistent-demo", "--config", cfg,
                "--x", write("x.csv", "7\n"), "--y", write("y.csv", "")]
        res = runner.invoke(main, args)
        doc = json.loads(res.output)
        assert res.exit_code == 0 and doc["inconsistent_demo"]["discrepancy"] == 0.0

    def test_fail_exit_4(self, runner, write, monkeypatch):
        import setbf.cli as cli_mod
        from setbf.engine import check_consistency

        # Kernel grids agree exactly, so only a negative tolerance can fail; this pins the exit code.
        monkeypatch.setattr(cli_mod, "check_consistency",
                            lambda s, x, y: check_consistency(s, x, y, prob_tol=-1.0, density_tol=-1.0))
        cfg = {
            "model": {"model": "bernoulli"},
            "prior": {"overall": {"family": "beta", "alpha": 2, "beta": 3}, "h0": [[0, 0.4, "hi"]], "h1": [[0.4, 1]]},
            "x": [1, 0, 1], "y": [1, 1, 0, 0, 1],
        }
        res = runner.invoke(main, ["check-consistency", "--config", write("c.json", cfg)])
        assert res.exit_code == 4 and "FAIL" in res.output

    def test_missing_batches(self, runner, write):
        res = runner.invoke(main, ["check-consistency", "--config", write("c.json", PAPER)])
        assert res.exit_code == 2 and "x:" in res.output


class TestLimitSim:
    LIMIT = {"theta_star": 0.7, "n_schedule": [20, 80, 320], "replications": 20, "seed": 1}

    def _cfg(self, prior, **limit):
        return {"model": {"model": "bernoulli"}, "prior": prior, "limit": dict(self.LIMIT, **limit)}

    def test_alt_only(self, runner, write, tmp_path):
        prior = {"overall": {"family": "beta", "alpha": 1, "beta": 1}, "h0": [[0, 0.5, "hi"]], "h1": [[0.5, 1]]}
        res = runner.invoke(main, ["limit-sim", "--config", write("c.json", self._cfg(prior)),
                                   "--out-dir", str(tmp_path / "out")])
        assert res.exit_code == 0, res.output
        assert "AltOnly" in res.output
        rows = list(csv.DictReader(open(tmp_path / "out" / "limit_summary.csv")))
        medians = [float(r["median"]) for r in rows]
        assert medians == sorted(medians)

    def test_overlap_reports_c(self, runner, write, tmp_path):
        prior = dict(PAPER["prior"])
        res = runner.invoke(main, ["--json", "limit-sim", "--config", write("c.json", self._cfg(prior)),
                                   "--out-dir", str(tmp_path)])
        doc = json.loads(res.output)
        assert doc["regime"] == "Overlap"
        assert doc["c_estimate"]["c"] > 1

    def test_seed_override(self, runner, write, tmp_path):
        prior = dict(PAPER["prior"])
        path = write("c.json", self._cfg(prior))
        out = []
        for seed in ("5", "5", "6"):
            runner.invoke(main, ["limit-sim", "--config", path, "--seed", seed, "--out-dir", str(tmp_path)])
            out.append((tmp_path / "limit_long.csv").read_text())
        assert out[0] == out[1] != out[2]

    def test_boundary_exit_2(self, runner, write, tmp_path):
        prior = {"overall": {"family": "beta", "alpha": 1, "beta": 1}, "h0": [[0, 0.5, "hi"]], "h1": [[0.5, 1]]}
        res = runner.invoke(main, ["limit-sim", "--config", write("c.json", self._cfg(prior, theta_star=0.5)),
                                   "--out-dir", str(tmp_path)])
        assert res.exit_code == 2 and "boundary" in res.output


class TestExample:
    def test_text(self, runner):
        res = runner.invoke(main, ["example"])
        assert res.exit_code == 0
        assert "2.89238" in res.output and "Beta(29, 13)" in res.output

    def test_json(self, runner):
        doc = json.loads(runner.invoke(main, ["example", "--json"]).output)
        assert doc["posterior_h0"] == [15.0, 7.0]
        assert doc["falsifiers_of_h0"] == [] and doc["falsifiers_of_h1"] == []

    def test_byte_identical(self, runner):
        assert runner.invoke(main, ["example"]).output == runner.invoke(main, ["example"]).output


class TestJeffreys:
    @pytest.mark.parametrize(
        "bf,label",
        [(2.0, "barely worth mentioning evidence for H1"), (5.0, "substantial evidence for H1"),
         (0.05, "strong evidence for H0"), (50.0, "very strong evidence for H1"),
         (float("inf"), "decisive evidence for H1"), (0.0, "decisive evidence for H0")],
    )
    def test_labels(self, bf, label):
        assert jeffreys_label(bf) == label
