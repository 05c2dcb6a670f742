"""Command-line front end.

Exit codes: 0 success, 2 configuration or input error, 3 numerical
failure, 4 failed consistency check.  Every option may be given before the
subcommand (``setbf --config c.json compute``) or after it.
"""

from __future__ import annotations

import functools
import json
import math
from pathlib import Path

import click

from .asymptotics import TrajectorySpec, run_trajectories
from .config import AnalysisConfig, load_config, read_observations
from .engine import (
    AnalysisState,
    EvidenceReport,
    bayes_factor,
    check_consistency,
    inconsistent_path,
    paradox_demo,
    update_state,
)
from .errors import ConfigError, ModelMismatch, NumericalError
from .models import DataBatch
from .space import HypothesisSet
from .state_io import density_to_dict, dump_state, load_state, model_to_dict

EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_INCONSISTENT = 4

_JEFFREYS = (
    (10**0.5, "barely worth mentioning"),
    (10.0, "substantial"),
    (10**1.5, "strong"),
    (100.0, "very strong"),
    (math.inf, "decisive"),
)


def jeffreys_label(bf: float) -> str:
    """Verbal Jeffreys-scale grade of a Bayes factor (H1 over H0)."""
    if math.isnan(bf):
        return "undefined"
    favored, strength = ("H1", bf) if bf >= 1 else ("H0", math.inf if bf == 0 else 1.0 / bf)
    for limit, label in _JEFFREYS:
        if strength < limit or limit == math.inf:
            return f"{label} evidence for {favored}"
    raise AssertionError("unreachable")


def _fmt(v: float, precision: int) -> str:
    if isinstance(v, bool):
        return "yes" if v else "no"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.{precision}g}"


def _jsonable(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _emit_json(doc: dict) -> None:
    click.echo(json.dumps(_jsonable(doc), indent=2, allow_nan=False))


def _set_json(s: HypothesisSet) -> list:
    return [
        {"lo": iv.lo, "hi": iv.hi, "lo_closed": iv.lo_closed, "hi_closed": iv.hi_closed}
        for iv in s.intervals
    ]


def _table(rows: list[tuple[str, str]]) -> None:
    width = max(len(k) for k, _ in rows)
    for k, v in rows:
        click.echo(f"{k.ljust(width)}  {v}")


_OPTION_NAMES = (
    "config", "json_out", "seed", "state_in", "state_out", "allow_overlap",
    "inconsistent_demo", "x_path", "y_path", "data_path", "out_dir", "workers",
)


def _shared_options(f):
    opts = [
        click.option("--config", "config", type=click.Path(dir_okay=False), default=None, help="JSON config file."),
        click.option("--json", "json_out", is_flag=True, default=None, help="Emit a machine-readable JSON report."),
        click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=None, help="Base seed (unsigned 64-bit)."),
        click.option("--state-in", type=click.Path(dir_okay=False), default=None, help="Analysis state to resume."),
        click.option("--state-out", type=click.Path(dir_okay=False), default=None, help="Where to write the state."),
        click.option("--allow-overlap", is_flag=True, default=None,
                     help="Accept overlapping hypotheses with an overall prior (restricts to each set)."),
        click.option("--inconsistent-demo", is_flag=True, default=None,
                     help="Also run the path that re-uses the initial within-hypothesis priors."),
        click.option("--x", "x_path", type=click.Path(dir_okay=False), default=None, help="CSV of the first batch."),
        click.option("--y", "y_path", type=click.Path(dir_okay=False), default=None, help="CSV of the second batch."),
        click.option("--data", "data_path", type=click.Path(dir_okay=False), default=None,
                     help="CSV batch overriding the config's data."),
        click.option("--out-dir", type=click.Path(file_okay=False), default=None, help="Directory for CSV output."),
        click.option("--workers", type=click.IntRange(1), default=None, help="Processes for limit-sim."),
    ]
    for opt in reversed(opts):
        f = opt(f)
    return f


class _Opts(dict):
    __getattr__ = dict.get


def _resolve(ctx: click.Context, local: dict) -> _Opts:
    merged = dict((ctx.obj or {}))
    for k, v in local.items():
        if v is not None:
            merged[k] = v
    return _Opts({k: merged.get(k) for k in _OPTION_NAMES})


def _command(f):
    """Merge global and local options and map library errors to exit codes."""

    @functools.wraps(f)
    @click.pass_context
    def wrapper(ctx, **local):
        opts = _resolve(ctx, local)
        try:
            code = f(opts)
        except ConfigError as exc:
            click.echo(f"error: {exc}", err=True)
            ctx.exit(EXIT_CONFIG)
        except NumericalError as exc:
            click.echo(f"numerical failure: {exc}", err=True)
            ctx.exit(EXIT_NUMERIC)
        except OSError as exc:
            click.echo(f"error: {exc}", err=True)
            ctx.exit(EXIT_CONFIG)
        ctx.exit(code or 0)

    return _shared_options(wrapper)


def _need_config(opts: _Opts) -> AnalysisConfig:
    if not opts.config:
        raise ConfigError("--config is required for this command")
    return load_config(opts.config)


def _batch(cfg: AnalysisConfig, path: str | None, which: str) -> DataBatch:
    if path is not None:
        return DataBatch(cfg.model, tuple(read_observations(path)), Path(path).stem)
    return cfg.batch(which)


def _warn(cfg: AnalysisConfig) -> None:
    for w in cfg.warnings:
        click.echo(f"warning: {w}", err=True)


def _report_doc(state: AnalysisState, data: DataBatch, report: EvidenceReport, jeffreys: bool) -> dict:
    doc = {
        "model": model_to_dict(state.model),
        "hypotheses": {"h0": _set_json(state.h0), "h1": _set_json(state.h1)},
        "p_h0": state.p_h0,
        "p_h1": state.p_h1,
        "n_observations": data.n,
    }
    doc.update(report.as_dict())
    doc["log_prior_odds"] = report.log_prior_odds
    doc["log_posterior_odds"] = report.log_posterior_odds
    if jeffreys:
        doc["jeffreys"] = jeffreys_label(report.bf)
    return doc


def _report_rows(state: AnalysisState, data: DataBatch, report: EvidenceReport, prec: int, jeffreys: bool):
    f = functools.partial(_fmt, precision=prec)
    rows = [
        ("model", repr(state.model)),
        ("H0", f"{state.h0!r}  (prior probability {f(state.p_h0)})"),
        ("H1", f"{state.h1!r}  (prior probability {f(state.p_h1)})"),
        ("observations", str(data.n)),
        ("log m(x|H0)", f(report.log_marginal_h0)),
        ("log m(x|H1)", f(report.log_marginal_h1)),
        ("BF (H1 over H0)", f(report.bf)),
        ("log BF", f(report.log_bf)),
        ("prior odds", f(report.prior_odds)),
        ("posterior odds", f(report.posterior_odds)),
        ("p(H0|x)", f(report.p_h0_post)),
        ("p(H1|x)", f(report.p_h1_post)),
    ]
    if report.decisive:
        rows.append(("decisive", "yes, one hypothesis is ruled out by the data"))
    if jeffreys:
        rows.append(("Jeffreys scale", jeffreys_label(report.bf)))
    return rows


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@_shared_options
@click.pass_context
def main(ctx, **opts):
    """Bayes factors for set-valued hypotheses."""
    ctx.obj = {k: v for k, v in opts.items() if v is not None}


@main.command()
@_command
def compute(opts):
    """Bayes factor and posterior hypothesis probabilities for one batch."""
    cfg = _need_config(opts)
    state = cfg.state(bool(opts.allow_overlap))
    _warn(cfg)
    data = _batch(cfg, opts.data_path, "data")
    report = bayes_factor(state, data)
    if opts.json_out:
        _emit_json(_report_doc(state, data, report, cfg.output.jeffreys))
    else:
        _table(_report_rows(state, data, report, cfg.output.precision, cfg.output.jeffreys))
    return 0


@main.command()
@_command
def update(opts):
    """Absorb a batch into a persisted analysis state."""
    cfg = _need_config(opts)
    if not opts.state_out:
        raise ConfigError("--state-out is required for update")
    if opts.state_in:
        state = load_state(opts.state_in)
        if state.model != cfg.model:
            raise ModelMismatch(
                f"state file {opts.state_in} uses {state.model} but the config model is {cfg.model}"
            )
    else:
        state = cfg.state(bool(opts.allow_overlap))
        _warn(cfg)
    data = _batch(cfg, opts.data_path, "data")
    new_state, report = update_state(state, data)
    dump_state(new_state, opts.state_out)
    if opts.json_out:
        doc = _report_doc(state, data, report, cfg.output.jeffreys)
        doc["state_out"] = str(opts.state_out)
        doc["history"] = list(new_state.history)
        doc["posterior_within_h0"] = density_to_dict(new_state.mix.within_h0)
        doc["posterior_within_h1"] = density_to_dict(new_state.mix.within_h1)
        if doc["posterior_within_h0"]["kind"] == "grid":
            doc["posterior_within_h0"] = {"kind": "grid"}
        if doc["posterior_within_h1"]["kind"] == "grid":
            doc["posterior_within_h1"] = {"kind": "grid"}
        _emit_json(doc)
    else:
        _table(_report_rows(state, data, report, cfg.output.precision, cfg.output.jeffreys))
        click.echo(f"state written to {opts.state_out} (history: {', '.join(new_state.history)})")
    return 0


@main.command("check-consistency")
@_command
def check_consistency_cmd(opts):
    """Compare updating by x then y with updating once on the merged data."""
    cfg = _need_config(opts)
    state = cfg.state(bool(opts.allow_overlap))
    _warn(cfg)
    if opts.x_path is None and cfg.x is None:
        raise ConfigError("x: give --x PATH or an \"x\" entry in the config")
    if opts.y_path is None and cfg.y is None:
        raise ConfigError("y: give --y PATH or a \"y\" entry in the config")
    x = _batch(cfg, opts.x_path, "x")
    y = _batch(cfg, opts.y_path, "y")
    rep = check_consistency(state, x, y)
    diag = inconsistent_path(state, x, y)[1] if opts.inconsistent_demo else None
    prec = cfg.output.precision
    f = functools.partial(_fmt, precision=prec)
    if opts.json_out:
        doc = {
            "n_x": x.n,
            "n_y": y.n,
            "sequential": {"p_h0": rep.sequential.p_h0, "p_h1": rep.sequential.p_h1},
            "merged": {"p_h0": rep.merged.p_h0, "p_h1": rep.merged.p_h1},
            "bf_x": rep.sequential_reports[0].bf,
            "bf_y_given_x": rep.sequential_reports[1].bf,
            "bf_merged": rep.merged_report.bf,
            "prob_difference": rep.prob_difference,
            "density_difference": rep.density_difference,
            "prob_tolerance": rep.prob_tolerance,
            "density_tolerance": rep.density_tolerance,
            "passed": rep.passed,
        }
        if diag is not None:
            doc["inconsistent_demo"] = diag.as_dict()
        _emit_json(doc)
    else:
        rows = [
            ("batches", f"x: {x.n} observations, y: {y.n} observations"),
            ("sequential (x then y)", f"p(H0) = {f(rep.sequential.p_h0)}, p(H1) = {f(rep.sequential.p_h1)}"),
            ("merged (x and y)", f"p(H0) = {f(rep.merged.p_h0)}, p(H1) = {f(rep.merged.p_h1)}"),
            ("BF^x * BF^(y|x)", f(rep.sequential_reports[0].bf * rep.sequential_reports[1].bf)),
            ("BF^(x+y)", f(rep.merged_report.bf)),
            ("probability difference", f"{f(rep.prob_difference)} (tolerance {f(rep.prob_tolerance)})"),
            ("density difference", f"{f(rep.density_difference)} (tolerance {f(rep.density_tolerance)})"),
            ("result", "PASS" if rep.passed else "FAIL"),
        ]
        if diag is not None:
            rows += [
                ("inconsistent path", f"p(H0) = {f(diag.p_h0_inconsistent)}, "
                                      f"log posterior odds = {f(diag.inconsistent_log_odds)}"),
                ("consistent path", f"p(H0) = {f(diag.p_h0_consistent)}, "
                                    f"log posterior odds = {f(diag.consistent_log_odds)}"),
                ("discrepancy", f"{f(diag.discrepancy)} in log posterior odds, "
                                f"{f(diag.odds_difference)} in posterior odds"),
            ]
        _table(rows)
    return 0 if rep.passed else EXIT_INCONSISTENT


@main.command("limit-sim")
@_command
def limit_sim(opts):
    """Monte Carlo trajectories of log BF over a growing sample size."""
    cfg = _need_config(opts)
    if cfg.limit is None:
        raise ConfigError("limit: missing; give theta_star, n_schedule and replications")
    state = cfg.state(bool(opts.allow_overlap))
    _warn(cfg)
    lim = cfg.limit
    spec = TrajectorySpec(
        theta_star=lim.theta_star,
        state=state,
        n_schedule=lim.n_schedule,
        replications=lim.replications,
        seed=opts.seed if opts.seed is not None else lim.seed,
        workers=opts.workers or lim.workers,
    )
    result = run_trajectories(spec)
    out = Path(opts.out_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    long_path, summary_path = out / "limit_long.csv", out / "limit_summary.csv"
    result.write_long_csv(long_path)
    result.write_summary_csv(summary_path)
    summary = result.summary()
    ce = result.c_estimate
    if opts.json_out:
        doc = {
            "regime": result.regime.value,
            "theta_star": spec.theta_star,
            "seed": spec.seed,
            "replications": spec.replications,
            "summary": summary,
            "long_csv": str(long_path),
            "summary_csv": str(summary_path),
        }
        if ce is not None:
            doc["c_estimate"] = {"c": ce.c, "log_c": ce.log_c, "se_log_c": ce.se, "n": ce.n}
        _emit_json(doc)
    else:
        f = functools.partial(_fmt, precision=cfg.output.precision)
        click.echo(f"regime: {result.regime.value} (theta* = {f(spec.theta_star)})")
        header = ["n", "median", "q05", "q95", "frac_positive"]
        click.echo("  ".join(h.rjust(12) for h in header))
        for row in summary:
            click.echo("  ".join(
                (str(row[h]) if h == "n" else f(row[h])).rjust(12) for h in header
            ))
        if ce is not None:
            click.echo(f"c(theta*) = {f(ce.c)} (log c = {f(ce.log_c)}, jackknife se of log c = {f(ce.se)}, n = {ce.n})")
        click.echo(f"wrote {long_path} and {summary_path}")
    return 0


@main.command()
@_command
def example(opts):
    """The uniform versus Beta(15, 7) example on a shared support."""
    rep = paradox_demo()
    if opts.json_out:
        _emit_json(rep.as_dict())
        return 0
    f = functools.partial(_fmt, precision=6)

    def beta(p):
        return f"Beta({f(p[0])}, {f(p[1])})"

    def falsifiers(s: HypothesisSet):
        return "none (empty set)" if s.is_empty else repr(s.relabel(""))

    _table([
        ("prior within H0", f"{beta(rep.prior_h0)} on {rep.support_h0.relabel('')!r}"),
        ("prior within H1", f"{beta(rep.prior_h1)} on {rep.support_h1.relabel('')!r}"),
        ("p(H0), p(H1)", f"{f(rep.p_h0)}, {f(rep.p_h1)}"),
        ("data", f"{rep.successes} successes in {rep.n_trials} trials"),
        ("BF (H1 over H0)", f(rep.bf)),
        ("p(H0|x), p(H1|x)", f"{f(rep.p_h0_post)}, {f(rep.p_h1_post)}"),
        ("posterior within H0", beta(rep.posterior_h0)),
        ("posterior within H1", beta(rep.posterior_h1)),
        ("posterior H0 = prior H1", "yes" if rep.posterior_h0_matches_prior_h1 else "no"),
        ("falsifiers of H0", falsifiers(rep.falsifiers_of_h0)),
        ("falsifiers of H1", falsifiers(rep.falsifiers_of_h1)),
        ("regime at theta = 0.7", rep.regime_at_truth),
    ])
    click.echo(
        "The same Beta(15, 7) distribution is the alternative before the data and the null after them,\n"
        "and with identical supports no parameter value can falsify either hypothesis."
    )
    return 0


if __name__ == "__main__":  # pragma: no cover
    main()
