import json
import math

import numpy as np
import pytest

from setbf import (
    AnalysisState,
    Bernoulli,
    Beta,
    BinomialCount,
    DataBatch,
    Grid,
    MixturePrior,
    Normal,
    NormalKnownSigma,
    PointMass,
    StateFormatError,
    dump_state,
    load_state,
    normalize,
    state_from_dict,
    state_to_dict,
    update_state,
)


def _round_trip(state):
    return state_from_dict(json.loads(json.dumps(state_to_dict(state))))


class TestConjugateRoundTrip:
    def test_paper_state(self, paper_state):
        after, _ = update_state(paper_state, DataBatch(paper_state.model, (14,), "s"))
        back = _round_trip(after)
        assert back == after
        assert back.p_h0 == after.p_h0

    def test_normal_and_point(self):
        line = normalize([(-math.inf, math.inf)], "H1")
        zero = normalize([(0.0, 0.0)], "H0")
        mix = MixturePrior(0.3, 0.7, PointMass(0.0), Normal(0.25, 1.5), zero, line)
        state = AnalysisState(mix, NormalKnownSigma(2.0), ("a", "b"))
        assert _round_trip(state) == state

    def test_file(self, tmp_path, paper_state):
        path = tmp_path / "s.json"
        dump_state(paper_state, path)
        assert load_state(path) == paper_state
        assert json.loads(path.read_text())["format_version"] == 1


class TestGridRoundTrip:
    def test_kernel_grid(self, halves):
        state = AnalysisState.from_overall_prior(Beta(2, 5), *halves, Bernoulli())
        back = _round_trip(state)
        g0, b0 = state.mix.within_h0, back.mix.within_h0
        assert b0.kernel == g0.kernel
        for u, v in zip(g0.log_values, b0.log_values):
            np.testing.assert_array_equal(u, v)

    def test_tabulated_grid_with_infinite_values(self, halves):
        h0, h1 = halves
        base = AnalysisState.from_overall_prior(Beta(1, 1), h0, h1, BinomialCount(3))
        g = base.mix.within_h1.drop_kernel()
        vals = [v.copy() for v in g.log_values]
        vals[0][0] = -math.inf
        g2 = Grid(g.support, g.segments, tuple(vals), n_nodes=g.n_nodes)
        state = AnalysisState(MixturePrior(base.p_h0, base.p_h1, base.mix.within_h0, g2, h0, h1), base.model)
        doc = json.dumps(state_to_dict(state))
        assert "Infinity" not in doc and '"-inf"' in doc
        back = state_from_dict(json.loads(doc))
        assert back.mix.within_h1.log_values[0][0] == -math.inf


class TestRejection:
    def test_unknown_version(self, paper_state):
        doc = state_to_dict(paper_state)
        doc["format_version"] = 2
        with pytest.raises(StateFormatError, match="version"):
            state_from_dict(doc)

    def test_missing_field(self, paper_state):
        doc = state_to_dict(paper_state)
        del doc["within_h1"]
        with pytest.raises(StateFormatError, match="within_h1"):
            state_from_dict(doc)

    def test_bad_density_kind(self, paper_state):
        doc = state_to_dict(paper_state)
        doc["within_h0"] = {"kind": "cauchy"}
        with pytest.raises(StateFormatError):
            state_from_dict(doc)

    def test_not_json(self, tmp_path):
        p = tmp_path / "s.json"
        p.write_text("{nope")
        with pytest.raises(StateFormatError):
            load_state(p)

    def test_inconsistent_probabilities(self, paper_state):
        doc = state_to_dict(paper_state)
        doc["p_h1"] = 0.9
        with pytest.raises(StateFormatError):
            state_from_dict(doc)
