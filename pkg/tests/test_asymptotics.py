import csv
import math

import numpy as np
import pytest

import oracles
from setbf import (
    AnalysisState,
    Bernoulli,
    Beta,
    ConfigError,
    Interval,
    MixturePrior,
    PointMass,
    RegimeLabel,
    TrajectorySpec,
    WrongRegime,
    estimate_c,
    normalize,
    restrict,
    run_trajectories,
)


@pytest.fixture
def disjoint_state(halves):
    return AnalysisState.from_overall_prior(Beta(1, 1), *halves, Bernoulli())


@pytest.fixture
def overlap_state(unit):
    return AnalysisState(
        MixturePrior(0.5, 0.5, Beta(1, 1), Beta(15, 7), unit.relabel("H0"), unit.relabel("H1")), Bernoulli()
    )


class TestSpec:
    def test_schedule_increasing(self, disjoint_state):
        with pytest.raises(ConfigError):
            TrajectorySpec(0.7, disjoint_state, (20, 20), 5)

    def test_replications_positive(self, disjoint_state):
        with pytest.raises(ConfigError):
            TrajectorySpec(0.7, disjoint_state, (20,), 0)

    def test_theta_in_space(self, disjoint_state):
        with pytest.raises(ConfigError):
            TrajectorySpec(1.7, disjoint_state, (20,), 3)

    def test_regime(self, disjoint_state):
        assert TrajectorySpec(0.7, disjoint_state, (20,), 1).regime is RegimeLabel.ALT_ONLY


class TestTrajectories:
    def test_boundary_refused(self, disjoint_state):
        with pytest.raises(WrongRegime, match="excluded"):
            run_trajectories(TrajectorySpec(0.5, disjoint_state, (20, 40), 3))

    def test_deterministic(self, disjoint_state):
        spec = TrajectorySpec(0.7, disjoint_state, (10, 40), 6, seed=99)
        a, b = run_trajectories(spec), run_trajectories(spec)
        np.testing.assert_array_equal(a.log_bf, b.log_bf)

    def test_seed_changes_draws(self, disjoint_state):
        a = run_trajectories(TrajectorySpec(0.7, disjoint_state, (40,), 6, seed=1))
        b = run_trajectories(TrajectorySpec(0.7, disjoint_state, (40,), 6, seed=2))
        assert not np.array_equal(a.log_bf, b.log_bf)

    def test_parallel_identical(self, disjoint_state):
        spec = TrajectorySpec(0.7, disjoint_state, (10, 40), 8, seed=3)
        par = TrajectorySpec(0.7, disjoint_state, (10, 40), 8, seed=3, workers=2)
        np.testing.assert_array_equal(run_trajectories(spec).log_bf, run_trajectories(par).log_bf)

    def test_summary_quantiles_monotone(self, disjoint_state):
        res = run_trajectories(TrajectorySpec(0.6, disjoint_state, (20, 80), 30, seed=4))
        for row in res.summary():
            assert row["q05"] <= row["q25"] <= row["median"] <= row["q75"] <= row["q95"]

    def test_csv_output(self, tmp_path, disjoint_state):
        res = run_trajectories(TrajectorySpec(0.3, disjoint_state, (10, 20), 3, seed=0))
        res.write_long_csv(tmp_path / "long.csv")
        res.write_summary_csv(tmp_path / "summary.csv")
        rows = list(csv.DictReader(open(tmp_path / "long.csv")))
        assert len(rows) == 6 and set(rows[0]) == {"replication", "n", "log_bf"}
        assert float(rows[0]["log_bf"]) == res.log_bf[0, 0]
        summary = list(csv.DictReader(open(tmp_path / "summary.csv")))
        assert [int(r["n"]) for r in summary] == [10, 20]

    def test_overlap_stays_bounded_while_disjoint_grows(self, disjoint_state, overlap_state):
        sched = (20, 80, 320)
        alt = run_trajectories(TrajectorySpec(0.7, disjoint_state, sched, 20, seed=11))
        ovl = run_trajectories(TrajectorySpec(0.7, overlap_state, sched, 20, seed=11))
        assert np.max(np.abs(ovl.medians())) < np.abs(alt.medians()[-1])


class TestLimitConstant:
    def test_near_density_ratio(self, overlap_state):
        res = run_trajectories(TrajectorySpec(0.7, overlap_state, (80, 1280), 20, seed=5))
        c = res.c_estimate
        assert c is not None and c.n == 1280
        # The limit is log pi1(theta*) - log pi0(theta*); finite n sits slightly below it.
        assert abs(c.log_c - oracles.OVERLAP_LOG_C_07) < 0.05
        assert c.c == pytest.approx(math.exp(c.log_c))
        assert c.se > 0

    def test_degenerate_point_masses(self, unit):
        state = AnalysisState(MixturePrior(0.5, 0.5, PointMass(0.4), PointMass(0.4), unit, unit), Bernoulli())
        res = run_trajectories(TrajectorySpec(0.7, state, (10, 50), 10, seed=0))
        c, se = estimate_c(res)
        assert (c, se) == (1.0, 0.0)

    def test_wrong_regime(self, disjoint_state):
        res = run_trajectories(TrajectorySpec(0.7, disjoint_state, (10, 20), 10))
        assert res.c_estimate is None
        with pytest.raises(WrongRegime):
            estimate_c(res)

    def test_too_few_replications(self, overlap_state):
        res = run_trajectories(TrajectorySpec(0.7, overlap_state, (10, 20), 5))
        assert res.c_estimate is None
        with pytest.raises(ConfigError):
            estimate_c(res)

    def test_nested_overlap(self):
        h0 = normalize([(0.0, 1.0)])
        h1 = normalize([Interval(0.5, 1.0)])
        d1, _ = restrict(Beta(1, 1), h1)
        state = AnalysisState(MixturePrior(0.5, 0.5, Beta(1, 1), d1, h0, h1), Bernoulli())
        res = run_trajectories(TrajectorySpec(0.7, state, (40, 640), 12, seed=8))
        assert res.regime is RegimeLabel.OVERLAP
        # Uniform on [0.5, 1] versus uniform on [0, 1]: log c = log 2.
        assert abs(res.c_estimate.log_c - math.log(2.0)) < 0.02
