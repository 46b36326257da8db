"""Command-line surface: estimate, simulate, experiment, diagnose.

All commands communicate through files. Exit codes: 0 success, 1 internal
error, 2 invalid user input, 3 numerically non-positive-definite covariance.
Every output artifact gets a ``<output>.manifest.json`` sidecar recording
the command, a digest of its configuration, the seed, the tool version and
a timestamp; with a fixed seed the data artifacts themselves are
byte-identical across runs and worker counts.
"""

from __future__ import annotations

import functools
import hashlib
import json
import math
import sys
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path

import click
import numpy as np

from . import __version__
from .errors import CovarianceNotPD, InvalidInput
from .estimator import EstimatorConfig, estimate_change_point, validate_series
from .generators import (
    DEFAULT_TRANSFORMS,
    KIND_GAUSSIAN,
    KIND_IID,
    KIND_LINEAR,
    AcfSpec,
    GeneratorSpec,
    SeedSpec,
    generate,
)
from .montecarlo import (
    DIAG_FUNCTIONS,
    ExperimentConfig,
    decay_diagnostic,
    rate_check,
    run_experiment,
)
from .seminorms import (
    DEFAULT_MOMENT_WEIGHTS,
    DEFAULT_TRUNCATION,
    KIND_KS,
    KIND_LP,
    KIND_MOMENTS,
    SeminormSpec,
)

RESULTS_HEADER = "n,alpha,norm,gamma,reps,mae,ci_lo,ci_hi,n_mae"


@dataclass(frozen=True)
class RunManifest:
    """Provenance sidecar written next to every output artifact."""

    command: str
    config_digest: str
    master_seed: int
    tool_version: str
    timestamp: str


def _fmt(value: float) -> str:
    """Shortest decimal string that round-trips the double exactly."""
    return repr(float(value))


def _config_digest(payload) -> str:
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def _write_manifest(output: Path, command: str, payload, master_seed: int) -> None:
    manifest = RunManifest(
        command=command,
        config_digest=_config_digest(payload),
        master_seed=int(master_seed),
        tool_version=__version__,
        timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
    )
    path = Path(str(output) + ".manifest.json")
    path.write_text(json.dumps(asdict(manifest), indent=2, sort_keys=True) + "\n")


def read_series_csv(path) -> np.ndarray:
    """Parse a series file: one observation per line, optional header,
    optional leading index column (auto-detected), decimal point only."""
    values = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            fields = line.split(",")
            if len(fields) > 2:
                raise InvalidInput(f"line {lineno}: expected 1 or 2 columns, got {len(fields)}")
            try:
                value = float(fields[-1])
            except ValueError:
                if lineno == 1 and not values:
                    continue  # header row
                raise InvalidInput(
                    f"line {lineno}: could not parse {fields[-1]!r} as a number"
                ) from None
            if not math.isfinite(value):
                raise InvalidInput(f"line {lineno}: non-finite value {fields[-1]!r}")
            values.append(value)
    if not values:
        raise InvalidInput(f"no observations found in {path}")
    return np.asarray(values)


def write_series_csv(path, values) -> None:
    lines = ["i,x"]
    lines += [f"{i},{_fmt(v)}" for i, v in enumerate(values, start=1)]
    Path(path).write_text("\n".join(lines) + "\n")


def _guard(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            fn(*args, **kwargs)
        except InvalidInput as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except CovarianceNotPD as exc:
            click.echo(f"error: autocovariance is not positive definite: {exc}", err=True)
            sys.exit(3)
        except (click.ClickException, click.exceptions.Abort, SystemExit):
            raise
        except Exception as exc:
            click.echo(f"internal error: {type(exc).__name__}: {exc}", err=True)
            sys.exit(1)

    return wrapper


def _norm_from_flags(norm: str, p: float, moment_weights: str | None, truncation: float) -> SeminormSpec:
    if norm == KIND_MOMENTS:
        weights = DEFAULT_MOMENT_WEIGHTS
        if moment_weights:
            try:
                weights = tuple(float(w) for w in moment_weights.split(","))
            except ValueError:
                raise InvalidInput(f"could not parse moment weights {moment_weights!r}") from None
        return SeminormSpec(kind=KIND_MOMENTS, moment_weights=weights, truncation=truncation)
    if norm == KIND_LP:
        return SeminormSpec(kind=KIND_LP, p=p)
    return SeminormSpec(kind=KIND_KS)


@click.group()
@click.version_option(version=__version__)
def main():
    """Nonparametric change-point estimation for dependent sequences."""


@main.command()
@click.argument("input_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--norm", type=click.Choice([KIND_KS, KIND_LP, KIND_MOMENTS]), default=KIND_KS,
              show_default=True, help="Seminorm applied to the block difference.")
@click.option("--p", type=float, default=1.0, show_default=True,
              help="Exponent for the lp norm.")
@click.option("--moment-weights", default=None,
              help="Comma-separated positive weights for the moments norm.")
@click.option("--truncation", type=float, default=DEFAULT_TRUNCATION, show_default=True,
              help="Truncation level M for the moments norm.")
@click.option("--gamma", type=float, default=0.5, show_default=True,
              help="Weighting exponent in [0, 1).")
@click.option("--output", type=click.Path(dir_okay=False), default=None,
              help="Result JSON path [default: INPUT.estimate.json].")
@click.option("--emit-profile", type=click.Path(dir_okay=False), default=None,
              help="Also write the full profile as CSV (k,stat).")
@_guard
def estimate(input_path, norm, p, moment_weights, truncation, gamma, output, emit_profile):
    """Estimate the change-point location in a series CSV."""
    spec = _norm_from_flags(norm, p, moment_weights, truncation)
    cfg = EstimatorConfig(gamma=gamma, norm=spec)
    x = validate_series(read_series_csv(input_path))
    est = estimate_change_point(x, cfg)
    if np.all(est.profile == est.profile[0]):
        click.echo("warning: flat profile; estimate is the tie-break default", err=True)

    out = Path(output) if output else Path(str(input_path) + ".estimate.json")
    result = {
        "n": int(x.size),
        "k_hat": est.k_hat,
        "theta_hat": est.theta_hat,
        "norm": spec.label(),
        "gamma": gamma,
    }
    out.write_text(json.dumps(result, indent=2, sort_keys=True) + "\n")
    payload = {"input": str(input_path), "norm": spec.label(), "gamma": gamma}
    _write_manifest(out, "estimate", payload, master_seed=0)
    if emit_profile:
        lines = ["k,stat"] + [f"{k},{_fmt(v)}" for k, v in enumerate(est.profile, start=1)]
        Path(emit_profile).write_text("\n".join(lines) + "\n")
    click.echo(f"theta_hat={est.theta_hat:.6f}")


@main.command()
@click.option("--kind", type=click.Choice([KIND_IID, KIND_GAUSSIAN, KIND_LINEAR]),
              default=KIND_GAUSSIAN, show_default=True)
@click.option("--theta", type=float, default=0.5, show_default=True,
              help="True change location as a fraction of n.")
@click.option("--n", "length", type=int, required=True, help="Series length.")
@click.option("--seed", type=int, required=True, help="Master seed.")
@click.option("--replication", type=int, default=0, show_default=True,
              help="Replication id deriving an independent stream.")
@click.option("--alpha", type=float, default=None,
              help="Dependence exponent (gaussian kind); omit for an iid base.")
@click.option("--transforms", default=",".join(DEFAULT_TRANSFORMS), show_default=True,
              help="Comma-separated pre,post transform names (gaussian kind).")
@click.option("--pre", "pre_law", default="normal:0,1", show_default=True,
              help="Marginal law before the change (iid kind), e.g. normal:0,1.")
@click.option("--post", "post_law", default="normal:0,1", show_default=True,
              help="Marginal law after the change (iid kind).")
@click.option("--beta", type=float, default=1.0, show_default=True,
              help="Coefficient decay exponent (linear kind), must exceed 0.5.")
@click.option("--lag-truncation", type=int, default=20, show_default=True,
              help="Filter half-width L (linear kind).")
@click.option("--flip/--no-flip", "flip", default=True, show_default=True,
              help="Negate off-center coefficients after the change (linear kind).")
@click.option("--output", type=click.Path(dir_okay=False), required=True)
@_guard
def simulate(kind, theta, length, seed, replication, alpha, transforms, pre_law,
             post_law, beta, lag_truncation, flip, output):
    """Generate a synthetic series with a single change-point."""
    names = tuple(transforms.split(","))
    if len(names) != 2:
        raise InvalidInput(f"expected two comma-separated transform names, got {transforms!r}")
    spec = GeneratorSpec(
        kind=kind,
        theta=theta,
        n=length,
        acf=None if alpha is None else AcfSpec(alpha),
        transforms=names,
        beta=beta,
        lag_truncation=lag_truncation,
        flip_post_coefficients=flip,
        pre_law=pre_law,
        post_law=post_law,
    )
    x, change_index = generate(spec, SeedSpec(seed, replication))
    write_series_csv(output, x)
    payload = {
        "kind": kind,
        "theta": theta,
        "n": length,
        "alpha": alpha,
        "transforms": list(names),
        "pre_law": pre_law,
        "post_law": post_law,
        "beta": beta,
        "lag_truncation": lag_truncation,
        "flip_post_coefficients": flip,
        "seed": seed,
        "replication": replication,
        "true_change_index": change_index,
    }
    _write_manifest(Path(output), "simulate", payload, master_seed=seed)
    click.echo(f"wrote {output} (n={length}, change at index {change_index})")


def _experiment_config_from_json(doc) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise InvalidInput("experiment config must be a JSON object")
    try:
        gen_doc = dict(doc.get("generator", {}))
        n_grid = tuple(int(n) for n in doc["n_grid"])
        raw_alphas = doc["alpha_grid"]
        norm_doc = dict(doc["norm"])
        gamma = float(doc["gamma"])
        replications = int(doc["replications"])
        master_seed = int(doc["master_seed"])
    except KeyError as exc:
        raise InvalidInput(f"experiment config missing key {exc.args[0]!r}") from None
    alphas = []
    for a in raw_alphas:
        if a is None or a == "iid":
            alphas.append(None)
        else:
            alphas.append(float(a))

    norm_kind = norm_doc.pop("kind", KIND_KS)
    if "moment_weights" in norm_doc:
        norm_doc["moment_weights"] = tuple(float(w) for w in norm_doc["moment_weights"])
    norm = SeminormSpec(kind=norm_kind, **norm_doc)

    gen_doc.setdefault("kind", KIND_GAUSSIAN)
    gen_doc.setdefault("n", max(n_grid))
    if "transforms" in gen_doc:
        gen_doc["transforms"] = tuple(gen_doc["transforms"])
    template = GeneratorSpec(**gen_doc)
    return ExperimentConfig(
        generator=template,
        n_grid=n_grid,
        alpha_grid=tuple(alphas),
        norm=norm,
        gamma=gamma,
        replications=replications,
        master_seed=master_seed,
    )


@main.command()
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--output", type=click.Path(dir_okay=False), required=True,
              help="Results CSV path; rate report goes to OUTPUT.rate_check.json.")
@click.option("--workers", type=int, default=None,
              help="Worker processes [default: CPD_THREADS or one per CPU, max 4].")
@_guard
def experiment(config_path, output, workers):
    """Run a replicated MAE experiment grid from a JSON config."""
    try:
        doc = json.loads(Path(config_path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"config is not valid JSON: {exc}") from None
    cfg = _experiment_config_from_json(doc)
    rows = run_experiment(cfg, workers=workers)

    lines = [RESULTS_HEADER]
    for row in rows:
        base = f"{row.n},{row.alpha_label},{cfg.norm.label()},{_fmt(cfg.gamma)},{row.replications}"
        if row.error is None:
            lines.append(
                f"{base},{_fmt(row.mae)},{_fmt(row.ci_lo)},{_fmt(row.ci_hi)},{_fmt(row.n_times_mae)}"
            )
        else:
            lines.append(f"{base},,,,,error: {row.error}")
    Path(output).write_text("\n".join(lines) + "\n")

    reports = {}
    for label in dict.fromkeys(row.alpha_label for row in rows):
        family = [row for row in rows if row.alpha_label == label and row.error is None]
        if len(family) >= 2:
            report = rate_check(family)
            reports[label] = {
                "max_min_ratio": report.max_min_ratio,
                "monotone_tail_flag": report.monotone_tail_flag,
            }
    Path(str(output) + ".rate_check.json").write_text(
        json.dumps(reports, indent=2, sort_keys=True) + "\n"
    )
    _write_manifest(Path(output), "experiment", doc, master_seed=cfg.master_seed)

    failed = sum(1 for row in rows if row.error is not None)
    if failed == len(rows):
        click.echo("error: every grid cell failed", err=True)
        sys.exit(1)
    click.echo(f"wrote {output} ({len(rows) - failed}/{len(rows)} cells)")


def _parse_lags(text: str) -> tuple[int, ...]:
    try:
        if ".." in text:
            start, stop = text.split("..")
            lags = tuple(range(int(start), int(stop) + 1))
        else:
            lags = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise InvalidInput(f"could not parse lag list {text!r}") from None
    if not lags:
        raise InvalidInput(f"lag range {text!r} is empty")
    return lags


@main.command()
@click.argument("input_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--function", "func", type=click.Choice(sorted(DIAG_FUNCTIONS)),
              default="identity", show_default=True,
              help="Function applied to the series before correlating.")
@click.option("--lags", default="1..20", show_default=True,
              help="Lags as start..stop or a comma list.")
@click.option("--output", type=click.Path(dir_okay=False), default=None,
              help="Optional CSV output (m,corr).")
@_guard
def diagnose(input_path, func, lags, output):
    """Correlation-decay diagnostic: is the dependence algebraically decaying?"""
    x = validate_series(read_series_csv(input_path))
    diag = decay_diagnostic(x, func=func, lags=_parse_lags(lags))
    click.echo(f"{'m':>6}  {'corr':>12}")
    for m, c in zip(diag.lags, diag.corr_estimates):
        click.echo(f"{m:>6}  {c:>12.6f}")
    rho = "inf (faster than algebraic)" if math.isinf(diag.fitted_rho) else f"{diag.fitted_rho:.6g}"
    click.echo(f"fitted_rho={rho}")
    click.echo(f"fit_quality={diag.fit_quality:.6g}")
    if output:
        lines = ["m,corr"] + [
            f"{m},{_fmt(c)}" for m, c in zip(diag.lags, diag.corr_estimates)
        ]
        Path(output).write_text("\n".join(lines) + "\n")
        payload = {"input": str(input_path), "function": func, "lags": list(diag.lags)}
        _write_manifest(Path(output), "diagnose", payload, master_seed=0)


if __name__ == "__main__":
    main()
