"""Bayes factors and consistent sequential updating of two-hypothesis priors.

The engine works on an :class:`AnalysisState`: hypothesis probabilities
plus within-hypothesis densities, on fixed hypothesis sets.  Absorbing a
batch updates *both* the hypothesis probabilities (posterior odds = Bayes
factor times prior odds) and the within-hypothesis densities (Bayes rule
applied to each), so updating batch by batch agrees with updating once on
the merged data.

:func:`inconsistent_path` deliberately skips the within-hypothesis update to
exhibit what goes wrong when that step is forgotten.  It is a diagnostic,
never the default.

All evidence arithmetic is carried out in log-space.  The Bayes factor is
oriented alternative over null.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import betaln, expit, logsumexp

from .densities import (
    Beta,
    Density,
    Grid,
    MixturePrior,
    Normal,
    PointMass,
    decompose,
    densities_equal,
    probability,
    to_grid,
)
from .errors import ModelMismatch, ZeroMassRestriction
from .models import (
    Bernoulli,
    BinomialCount,
    DataBatch,
    NormalKnownSigma,
    SamplingModel,
    log_likelihood,
    merge,
)
from .space import HypothesisSet, falsifier_class, is_subset_ae, normalize

__all__ = [
    "AnalysisState",
    "EvidenceReport",
    "ConsistencyReport",
    "InconsistencyDiagnostics",
    "ParadoxReport",
    "log_marginal_likelihood",
    "update_density",
    "bayes_factor",
    "set_based_bayes_factor",
    "update_state",
    "sequential_bayes_factor",
    "inconsistent_path",
    "check_consistency",
    "paradox_demo",
]


def _is_binary_model(model: SamplingModel) -> bool:
    return isinstance(model, (Bernoulli, BinomialCount))


def log_marginal_likelihood(within: Density, model: SamplingModel, data: DataBatch) -> float:
    """``log ∫ f(x|t) pi(t) dt`` over the support of ``within``.

    Closed forms are used for beta/binomial and normal/normal pairs and for
    point masses; grids integrate in log-space.
    """
    if data.model != model:
        raise ModelMismatch(f"batch was recorded under {data.model}, not {model}")
    if data.is_empty:
        return 0.0
    if isinstance(within, PointMass):
        return log_likelihood(model, data, within.at)
    inc, const = data.sufficient()
    if isinstance(within, Beta) and _is_binary_model(model):
        s, f = data.counts()
        a, b = within.alpha, within.beta
        return const + float(betaln(a + s, b + f) - betaln(a, b))
    if isinstance(within, Normal) and isinstance(model, NormalKnownSigma):
        n = data.n
        var = model.sigma**2
        xbar = float(data.values.mean())
        ss = float(((data.values - xbar) ** 2).sum())
        pred_var = within.sd**2 + var / n
        return (
            -0.5 * n * math.log(2.0 * math.pi * var)
            - ss / (2.0 * var)
            + 0.5 * math.log(2.0 * math.pi * var / n)
            - 0.5 * math.log(2.0 * math.pi * pred_var)
            - (xbar - within.mean) ** 2 / (2.0 * pred_var)
        )
    g = to_grid(within)
    if g.kernel is not None:
        try:
            post = Grid.from_kernel(g.kernel + inc, g.support, g.n_nodes)
        except ZeroMassRestriction:
            return -math.inf
        return const + post.log_norm - g.log_norm
    parts = [lw + vals + inc(nodes) for nodes, lw, vals in g.quadrature()]
    return const + float(logsumexp(np.concatenate(parts)))


def update_density(within: Density, model: SamplingModel, data: DataBatch) -> Density:
    """Bayes-rule posterior of ``within`` given ``data``; the support never changes.

    Raises:
        ZeroMassRestriction: the likelihood vanishes on the whole support.
    """
    if data.model != model:
        raise ModelMismatch(f"batch was recorded under {data.model}, not {model}")
    if data.is_empty:
        return within
    if isinstance(within, PointMass):
        if log_likelihood(model, data, within.at) == -math.inf:
            raise ZeroMassRestriction(f"data are impossible at the point hypothesis {within.at}")
        return within
    inc, _ = data.sufficient()
    if isinstance(within, Beta) and _is_binary_model(model):
        s, f = data.counts()
        return Beta(within.alpha + s, within.beta + f)
    if isinstance(within, Normal) and isinstance(model, NormalKnownSigma):
        k = within.kernel + inc
        return Normal(k.mean, 1.0 / math.sqrt(k.prec))
    g = to_grid(within)
    if g.kernel is not None:
        return Grid.from_kernel(g.kernel + inc, g.support, g.n_nodes)
    vals = [v + inc(nodes) for nodes, _, v in g.quadrature()]
    return Grid.from_log_values(g.support, g.segments, vals, g.n_nodes)


@dataclass(frozen=True)
class AnalysisState:
    """Snapshot ``{p(H0), p(H1), pi(t|H0), pi(t|H1)}`` on fixed hypothesis sets."""

    mix: MixturePrior
    model: SamplingModel
    history: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "history", tuple(self.history))
        space = self.model.space.as_set()
        for name, hs in (("h0", self.mix.h0), ("h1", self.mix.h1)):
            if not is_subset_ae(hs, space):
                raise ModelMismatch(f"hypothesis {name} {hs!r} leaves the model's parameter space")

    @classmethod
    def from_overall_prior(
        cls, pi: Density, h0: HypothesisSet, h1: HypothesisSet, model: SamplingModel
    ) -> "AnalysisState":
        return cls(decompose(pi, h0, h1), model)

    @property
    def h0(self) -> HypothesisSet:
        return self.mix.h0

    @property
    def h1(self) -> HypothesisSet:
        return self.mix.h1

    @property
    def p_h0(self) -> float:
        return self.mix.p_h0

    @property
    def p_h1(self) -> float:
        return self.mix.p_h1

    @property
    def is_conjugate(self) -> bool:
        return not (isinstance(self.mix.within_h0, Grid) or isinstance(self.mix.within_h1, Grid))

    def falsifiers(self) -> tuple[HypothesisSet, HypothesisSet]:
        """Falsifier classes of H0 and of H1; the within densities play no part."""
        return falsifier_class(self.h0, self.h1), falsifier_class(self.h1, self.h0)


@dataclass(frozen=True)
class EvidenceReport:
    """Bayes factor (alternative over null) and the implied odds update.

    When the data rule out a hypothesis completely, probabilities become
    exactly 0 or 1, odds become ``0`` or ``inf`` and :attr:`decisive` is set.
    """

    log_marginal_h0: float
    log_marginal_h1: float
    log_bf: float
    log_prior_odds: float
    log_posterior_odds: float
    bf: float
    prior_odds: float
    posterior_odds: float
    p_h0_post: float
    p_h1_post: float
    decisive: bool

    @classmethod
    def from_logs(cls, lm0: float, lm1: float, p_h0: float, p_h1: float) -> "EvidenceReport":
        if lm0 == -math.inf and lm1 == -math.inf:
            raise ZeroMassRestriction("the data are impossible under both hypotheses")
        log_bf = lm1 - lm0
        with np.errstate(divide="ignore"):
            log_prior_odds = float(np.log(p_h1) - np.log(p_h0))
        log_post = log_bf + log_prior_odds
        if math.isnan(log_post):
            raise ZeroMassRestriction("the data contradict the only hypothesis with prior mass")
        bf = math.exp(log_bf) if log_bf < 709.0 else math.inf
        prior_odds = math.exp(log_prior_odds) if log_prior_odds < 709.0 else math.inf
        posterior_odds = math.exp(log_post) if log_post < 709.0 else math.inf
        return cls(
            log_marginal_h0=lm0,
            log_marginal_h1=lm1,
            log_bf=log_bf,
            log_prior_odds=log_prior_odds,
            log_posterior_odds=log_post,
            bf=bf,
            prior_odds=prior_odds,
            posterior_odds=posterior_odds,
            p_h0_post=float(expit(-log_post)),
            p_h1_post=float(expit(log_post)),
            decisive=math.isinf(log_post),
        )

    def as_dict(self) -> dict:
        return {
            "bf": self.bf,
            "log_bf": self.log_bf,
            "prior_odds": self.prior_odds,
            "posterior_odds": self.posterior_odds,
            "p_h0_post": self.p_h0_post,
            "p_h1_post": self.p_h1_post,
            "log_marginal_h0": self.log_marginal_h0,
            "log_marginal_h1": self.log_marginal_h1,
            "decisive": self.decisive,
        }


def _check_model(state: AnalysisState, data: DataBatch) -> None:
    if data.model != state.model:
        raise ModelMismatch(f"batch '{data.label}' uses {data.model}, the analysis uses {state.model}")


def bayes_factor(state: AnalysisState, data: DataBatch) -> EvidenceReport:
    """Evidence in ``data`` for H1 over H0 under the state's current densities."""
    _check_model(state, data)
    lm0 = log_marginal_likelihood(state.mix.within_h0, state.model, data)
    lm1 = log_marginal_likelihood(state.mix.within_h1, state.model, data)
    return EvidenceReport.from_logs(lm0, lm1, state.p_h0, state.p_h1)


def set_based_bayes_factor(
    pi: Density,
    h0: HypothesisSet,
    h1: HypothesisSet,
    model: SamplingModel,
    data: DataBatch,
) -> EvidenceReport:
    """Bayes factor as the change in odds of the hypothesis *sets*.

    Updates the overall prior to its posterior, reads off the posterior mass
    of each set, and divides posterior by prior odds.  This route never forms
    within-hypothesis densities.
    """
    if data.model != model:
        raise ModelMismatch(f"batch was recorded under {data.model}, not {model}")
    # Same preconditions as decompose: disjoint sets carrying all the mass.
    decompose(pi, h0, h1)
    post = update_density(pi, model, data)
    with np.errstate(divide="ignore"):
        lp0, lp1 = math.log(probability(pi, h0)), math.log(probability(pi, h1))
        lq0 = float(np.log(probability(post, h0)))
        lq1 = float(np.log(probability(post, h1)))
    log_norm_prior = float(np.logaddexp(lp0, lp1))
    log_norm_post = float(np.logaddexp(lq0, lq1))
    log_evidence = log_marginal_likelihood(pi, model, data)
    # p(x|Hi) = p(x) p(Hi|x) / p(Hi)
    lm0 = log_evidence + (lq0 - log_norm_post) - (lp0 - log_norm_prior)
    lm1 = log_evidence + (lq1 - log_norm_post) - (lp1 - log_norm_prior)
    p0 = math.exp(lp0 - log_norm_prior)
    return EvidenceReport.from_logs(lm0, lm1, p0, 1.0 - p0)


def update_state(state: AnalysisState, data: DataBatch) -> tuple[AnalysisState, EvidenceReport]:
    """Absorb ``data``: update hypothesis probabilities and both within densities."""
    report = bayes_factor(state, data)
    label = data.label or f"batch{len(state.history) + 1}"
    if data.is_empty:
        # Nothing to absorb; avoid re-deriving probabilities through the odds.
        return replace(state, history=state.history + (label,)), report
    mix = state.mix
    new_mix = MixturePrior(
        report.p_h0_post,
        report.p_h1_post,
        update_density(mix.within_h0, state.model, data),
        update_density(mix.within_h1, state.model, data),
        mix.h0,
        mix.h1,
    )
    return AnalysisState(new_mix, state.model, state.history + (label,)), report


def sequential_bayes_factor(state_after_x: AnalysisState, y: DataBatch) -> EvidenceReport:
    """``BF^{y|x}``: evidence in ``y`` given densities already updated by ``x``."""
    return bayes_factor(state_after_x, y)


@dataclass(frozen=True)
class InconsistencyDiagnostics:
    consistent_log_odds: float
    inconsistent_log_odds: float
    discrepancy: float
    odds_difference: float
    p_h0_consistent: float
    p_h0_inconsistent: float
    is_consistent: bool

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def inconsistent_path(
    initial: AnalysisState, x: DataBatch, y: DataBatch
) -> tuple[EvidenceReport, InconsistencyDiagnostics]:
    """Evaluate ``y`` with the *initial* within densities after absorbing ``x``.

    Hypothesis probabilities are carried forward from ``x`` but the within
    densities are not updated: the flawed path.  The diagnostics compare the
    resulting final log posterior odds against the consistent path;
    ``discrepancy`` is the absolute difference of the log odds.
    """
    _check_model(initial, x)
    _check_model(initial, y)
    after_x, report_x = update_state(initial, x)
    stale = replace(
        initial,
        mix=replace(initial.mix, p_h0=report_x.p_h0_post, p_h1=report_x.p_h1_post),
    )
    bad = bayes_factor(stale, y)
    good = bayes_factor(after_x, y)
    if good.log_posterior_odds == bad.log_posterior_odds:
        gap = 0.0
    else:
        gap = abs(good.log_posterior_odds - bad.log_posterior_odds)
    odds_gap = 0.0 if good.posterior_odds == bad.posterior_odds else abs(good.posterior_odds - bad.posterior_odds)
    diag = InconsistencyDiagnostics(
        consistent_log_odds=good.log_posterior_odds,
        inconsistent_log_odds=bad.log_posterior_odds,
        discrepancy=gap,
        odds_difference=odds_gap,
        p_h0_consistent=good.p_h0_post,
        p_h0_inconsistent=bad.p_h0_post,
        is_consistent=gap <= 1e-9,
    )
    return bad, diag


@dataclass(frozen=True)
class ConsistencyReport:
    prob_difference: float
    density_difference: float
    prob_tolerance: float
    density_tolerance: float
    passed: bool
    sequential: AnalysisState = field(repr=False)
    merged: AnalysisState = field(repr=False)
    sequential_reports: tuple[EvidenceReport, EvidenceReport] = field(repr=False)
    merged_report: EvidenceReport = field(repr=False)

    def as_dict(self) -> dict:
        return {
            "prob_difference": self.prob_difference,
            "density_difference": self.density_difference,
            "prob_tolerance": self.prob_tolerance,
            "density_tolerance": self.density_tolerance,
            "passed": self.passed,
            "sequential_p_h0": self.sequential.p_h0,
            "merged_p_h0": self.merged.p_h0,
        }


def _probe(support: HypothesisSet, a: Density, b: Density, n: int = 1001) -> np.ndarray:
    lo = min(a.effective_range()[0], b.effective_range()[0])
    hi = max(a.effective_range()[1], b.effective_range()[1])
    pts = lo + (np.arange(n) + 0.5) / n * (hi - lo)
    return pts[np.array([support.contains(p) for p in pts], dtype=bool)]


def density_sup_difference(a: Density, b: Density, n: int = 1001) -> float:
    """Sup-norm of ``pdf_a - pdf_b`` on an ``n``-point probe grid."""
    if isinstance(a, PointMass) or isinstance(b, PointMass):
        return 0.0 if a == b else math.inf
    if a.support != b.support:
        return math.inf
    pts = _probe(a.support, a, b, n)
    if pts.size == 0:
        return 0.0
    return float(np.max(np.abs(a.pdf(pts) - b.pdf(pts))))


def check_consistency(
    initial: AnalysisState,
    x: DataBatch,
    y: DataBatch,
    prob_tol: float | None = None,
    density_tol: float | None = None,
) -> ConsistencyReport:
    """Compare updating by ``x`` then ``y`` with updating once by ``merge(x, y)``.

    Default tolerances are 1e-9 (probabilities) and 1e-6 (densities) for
    conjugate states, 1e-6 and 1e-5 when a grid density is involved.
    """
    _check_model(initial, x)
    _check_model(initial, y)
    s1, r1 = update_state(initial, x)
    s2, r2 = update_state(s1, y)
    sm, rm = update_state(initial, merge(x, y))
    conj = initial.is_conjugate
    prob_tol = prob_tol if prob_tol is not None else (1e-9 if conj else 1e-6)
    density_tol = density_tol if density_tol is not None else (1e-6 if conj else 1e-5)
    dp = max(abs(s2.p_h0 - sm.p_h0), abs(s2.p_h1 - sm.p_h1))
    dd = max(
        density_sup_difference(s2.mix.within_h0, sm.mix.within_h0),
        density_sup_difference(s2.mix.within_h1, sm.mix.within_h1),
    )
    return ConsistencyReport(
        prob_difference=dp,
        density_difference=dd,
        prob_tolerance=prob_tol,
        density_tolerance=density_tol,
        passed=dp <= prob_tol and dd <= density_tol,
        sequential=s2,
        merged=sm,
        sequential_reports=(r1, r2),
        merged_report=rm,
    )


@dataclass(frozen=True)
class ParadoxReport:
    prior_h0: tuple[float, float]
    prior_h1: tuple[float, float]
    p_h0: float
    p_h1: float
    n_trials: int
    successes: int
    bf: float
    p_h0_post: float
    p_h1_post: float
    posterior_h0: tuple[float, float]
    posterior_h1: tuple[float, float]
    posterior_h0_matches_prior_h1: bool
    support_h0: HypothesisSet
    support_h1: HypothesisSet
    falsifiers_of_h0: HypothesisSet
    falsifiers_of_h1: HypothesisSet
    regime_at_truth: str

    @property
    def informative(self) -> bool:
        return not (self.falsifiers_of_h0.is_empty and self.falsifiers_of_h1.is_empty)

    def as_dict(self) -> dict:
        def set_repr(s: HypothesisSet):
            return [[iv.lo, iv.hi] for iv in s.intervals]

        return {
            "prior_h0": list(self.prior_h0),
            "prior_h1": list(self.prior_h1),
            "p_h0": self.p_h0,
            "p_h1": self.p_h1,
            "n_trials": self.n_trials,
            "successes": self.successes,
            "bf": self.bf,
            "p_h0_post": self.p_h0_post,
            "p_h1_post": self.p_h1_post,
            "posterior_h0": list(self.posterior_h0),
            "posterior_h1": list(self.posterior_h1),
            "posterior_h0_matches_prior_h1": self.posterior_h0_matches_prior_h1,
            "support_h0": set_repr(self.support_h0),
            "support_h1": set_repr(self.support_h1),
            "falsifiers_of_h0": set_repr(self.falsifiers_of_h0),
            "falsifiers_of_h1": set_repr(self.falsifiers_of_h1),
            "informative": self.informative,
        }


def paradox_demo() -> ParadoxReport:
    """Uniform versus Beta(15, 7) on the same support, 14 successes in 20 trials.

    After updating, the null's within density equals the alternative's prior
    density: the same distribution loses credibility as "H0 given data"
    while the alternative gains it.  Because both hypotheses share the
    support ``[0, 1]``, neither has potential falsifiers.
    """
    from .space import classify_regime

    unit = normalize([(0.0, 1.0)])
    h0, h1 = unit.relabel("H0"), unit.relabel("H1")
    prior0, prior1 = Beta(1.0, 1.0), Beta(15.0, 7.0)
    model = BinomialCount(20)
    state = AnalysisState(MixturePrior(0.5, 0.5, prior0, prior1, h0, h1), model)
    data = DataBatch(model, (14,), "s=14")
    after, report = update_state(state, data)
    post0, post1 = after.mix.within_h0, after.mix.within_h1
    return ParadoxReport(
        prior_h0=(prior0.alpha, prior0.beta),
        prior_h1=(prior1.alpha, prior1.beta),
        p_h0=state.p_h0,
        p_h1=state.p_h1,
        n_trials=model.n_trials,
        successes=14,
        bf=report.bf,
        p_h0_post=report.p_h0_post,
        p_h1_post=report.p_h1_post,
        posterior_h0=(post0.alpha, post0.beta),
        posterior_h1=(post1.alpha, post1.beta),
        posterior_h0_matches_prior_h1=densities_equal(post0, prior1),
        support_h0=h0,
        support_h1=h1,
        falsifiers_of_h0=falsifier_class(h0, h1),
        falsifiers_of_h1=falsifier_class(h1, h0),
        regime_at_truth=classify_regime(0.7, h0, h1).value,
    )
