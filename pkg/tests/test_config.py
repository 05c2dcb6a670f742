import json
import math

import pytest

from setbf import Beta, BinomialCount, ConfigError, Grid, HypothesisOverlap, ModelMismatch, NormalKnownSigma
from setbf.config import load_config, parse_config, parse_hypothesis, read_observations

PAPER = {
    "model": {"model": "binomial", "n_trials": 20},
    "prior": {
        "p_h0": 0.5,
        "h0_density": {"family": "beta", "alpha": 1, "beta": 1},
        "h1_density": {"family": "beta", "alpha": 15, "beta": 7},
    },
    "data": [14],
}

HALVES = {
    "model": {"model": "bernoulli"},
    "prior": {"overall": {"family": "beta", "alpha": 1, "beta": 1}, "h0": [[0, 0.5, "hi"]], "h1": [[0.5, 1]]},
}


class TestHypothesisSyntax:
    def test_pairs(self):
        s = parse_hypothesis([[0, 0.2], [0.6, 1]], "h", "H")
        assert len(s.intervals) == 2 and s.label == "H"

    def test_open_flags(self):
        a = parse_hypothesis([{"interval": [0, 0.5], "open": "hi"}], "h", "")
        b = parse_hypothesis([[0, 0.5, "hi"]], "h", "")
        assert a == b and not a.contains(0.5)

    def test_point(self):
        assert parse_hypothesis([[0.5, 0.5]], "h", "").is_point

    def test_infinite_strings(self):
        s = parse_hypothesis([["-inf", 0]], "h", "")
        assert s.lower == -math.inf

    def test_bad_flag_names_field(self):
        with pytest.raises(ConfigError, match=r"prior\.h0\[0\]"):
            parse_hypothesis([[0, 1, "left"]], "prior.h0[0]", "")


class TestPriorRoutes:
    def test_mixture_route(self):
        cfg = parse_config(PAPER)
        state = cfg.state()
        assert state.mix.within_h1 == Beta(15, 7)
        assert state.h0 == state.h1
        assert cfg.data.observations == (14.0,)

    def test_overall_route(self):
        state = parse_config(HALVES).state()
        assert state.p_h0 == pytest.approx(0.5)
        assert isinstance(state.mix.within_h0, Grid)

    def test_mixture_density_restricted_to_hypothesis(self):
        doc = {
            "model": {"model": "bernoulli"},
            "prior": {
                "p_h0": 0.4,
                "h0_density": {"family": "beta", "alpha": 2, "beta": 2},
                "h1_density": {"family": "beta", "alpha": 2, "beta": 2},
                "h0": [[0, 0.5, "hi"]],
                "h1": [[0.5, 1]],
            },
        }
        state = parse_config(doc).state()
        assert state.p_h0 == 0.4
        assert state.mix.within_h0.support == state.h0

    def test_both_routes_rejected(self):
        doc = json.loads(json.dumps(HALVES))
        doc["prior"]["p_h0"] = 0.5
        with pytest.raises(ConfigError, match="exactly one"):
            parse_config(doc).state()

    def test_overlap_needs_flag(self):
        doc = json.loads(json.dumps(HALVES))
        doc["prior"]["h0"] = [[0, 0.6]]
        doc["prior"]["h1"] = [[0.4, 1]]
        cfg = parse_config(doc)
        with pytest.raises(HypothesisOverlap, match="allow-overlap"):
            cfg.state()
        state = cfg.state(allow_overlap=True)
        assert state.p_h0 == pytest.approx(0.5)
        assert cfg.warnings

    def test_truncate_to(self):
        doc = json.loads(json.dumps(PAPER))
        doc["prior"]["h1_density"]["truncate_to"] = [[0.5, 1]]
        state = parse_config(doc).state()
        assert state.mix.within_h1.support == parse_hypothesis([[0.5, 1]], "x", "")

    def test_normal_prior_needs_truncation_on_unit_space(self):
        doc = json.loads(json.dumps(PAPER))
        doc["prior"]["h1_density"] = {"family": "normal", "mean": 0.5, "sd": 0.2}
        with pytest.raises(ConfigError, match="truncate_to"):
            parse_config(doc).state()
        doc["prior"]["h1_density"]["truncate_to"] = [[0, 1]]
        assert parse_config(doc).state().mix.within_h1.support.upper == 1.0


class TestValidation:
    def test_unknown_top_level_key(self):
        with pytest.raises(ConfigError, match="'prio'"):
            parse_config({"model": {"model": "bernoulli"}, "prio": {}})

    def test_data_mismatch_names_field(self):
        doc = json.loads(json.dumps(PAPER))
        doc["model"]["n_trials"] = 10
        with pytest.raises(ConfigError, match=r"^data:"):
            parse_config(doc)

    def test_binomial_needs_trials(self):
        with pytest.raises(ConfigError, match="n_trials"):
            parse_config({"model": {"model": "binomial"}})

    def test_normal_model(self):
        cfg = parse_config({"model": {"model": "normal", "sigma": 2}})
        assert cfg.model == NormalKnownSigma(2.0)

    def test_hypothesis_outside_space(self):
        doc = json.loads(json.dumps(HALVES))
        doc["prior"]["h1"] = [[0.5, 1.5]]
        with pytest.raises(ConfigError, match="prior.h1"):
            parse_config(doc).state()

    def test_limit_block(self):
        doc = dict(HALVES, limit={"theta_star": 0.7, "n_schedule": [20, 10], "replications": 5})
        with pytest.raises(ConfigError, match="increasing"):
            parse_config(doc)

    def test_missing_prior(self):
        with pytest.raises(ConfigError, match="prior"):
            parse_config({"model": {"model": "bernoulli"}}).state()


class TestFiles:
    def test_csv_relative_to_config(self, tmp_path):
        (tmp_path / "d.csv").write_text("# header comment\n14\n\n3  # trailing\n")
        doc = dict(PAPER, data={"csv": "d.csv"})
        (tmp_path / "c.json").write_text(json.dumps(doc))
        cfg = load_config(tmp_path / "c.json")
        assert cfg.data.observations == (14.0, 3.0)
        assert cfg.model == BinomialCount(20)

    def test_missing_csv(self, tmp_path):
        doc = dict(PAPER, data="nope.csv")
        (tmp_path / "c.json").write_text(json.dumps(doc))
        with pytest.raises(ConfigError, match="does not exist"):
            load_config(tmp_path / "c.json")

    def test_bad_csv_line(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("1\nabc\n")
        with pytest.raises(ConfigError, match=":2:"):
            read_observations(p)

    def test_missing_config(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.json")

    def test_state_model_check_type(self):
        assert issubclass(ModelMismatch, ConfigError)
