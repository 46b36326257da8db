"""Replicated experiments over (n, alpha) grids: MAE with confidence bands,
the n*MAE plateau check, and the correlation-decay diagnostic.

Replication r of cell j always sees the stream derived from
``(cell_seed_j, r)``, where ``cell_seed_j`` is folded out of the master seed
and the cell position. Aggregation sums per-replication errors with
``math.fsum`` in replication order, so serial and parallel runs produce
bit-identical rows.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidInput
from .estimator import EstimatorConfig, estimate_change_point, validate_series
from .generators import KIND_GAUSSIAN, AcfSpec, GeneratorSpec, SeedSpec, generate
from .seminorms import SeminormSpec

# normal-approximation half-width multiplier for a 95% interval
CI_Z = 1.96

IID_LABEL = "iid"

DIAG_FUNCTIONS = {
    "identity": lambda v: np.asarray(v, dtype=float),
    "square": lambda v: np.square(np.asarray(v, dtype=float)),
    "abs": lambda v: np.abs(np.asarray(v, dtype=float)),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Grid of (n, alpha) cells sharing one generator template and estimator.

    ``alpha_grid`` entries are dependence exponents for the gaussian kind;
    ``None`` marks an independent cell. The template's ``n`` and ``acf`` are
    replaced per cell.
    """

    generator: GeneratorSpec
    n_grid: tuple[int, ...]
    alpha_grid: tuple[float | None, ...]
    norm: SeminormSpec
    gamma: float
    replications: int
    master_seed: int

    def __post_init__(self):
        if self.replications < 1:
            raise InvalidInput(f"need at least 1 replication, got {self.replications}")
        if len(self.n_grid) == 0:
            raise InvalidInput("n grid must be nonempty")
        if any(n < 2 for n in self.n_grid):
            raise InvalidInput("every grid length must be >= 2")
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise InvalidInput("n grid must be strictly increasing")
        if len(self.alpha_grid) == 0:
            raise InvalidInput("alpha grid must be nonempty")
        for alpha in self.alpha_grid:
            if alpha is not None and not alpha > 0.0:
                raise InvalidInput(f"alpha must be > 0 or the iid marker, got {alpha}")
            if alpha is not None and self.generator.kind != KIND_GAUSSIAN:
                raise InvalidInput(
                    f"alpha {alpha} requires the gaussian generator, got kind {self.generator.kind!r}"
                )
        if not (0.0 <= self.gamma < 1.0):
            raise InvalidInput(f"gamma must lie in [0, 1), got {self.gamma}")


@dataclass(frozen=True)
class MaeRow:
    """One grid cell: mean absolute error of theta-hat with a 95% interval."""

    n: int
    alpha_label: str
    mae: float
    ci_lo: float
    ci_hi: float
    n_times_mae: float
    replications: int
    error: str | None = None


@dataclass(frozen=True)
class RateReport:
    """Plateau summary of n*MAE over one (alpha, norm) family."""

    max_min_ratio: float
    monotone_tail_flag: bool


@dataclass(frozen=True)
class DecayDiagnostic:
    """Lagged correlations of f(X) and the fitted algebraic decay exponent."""

    lags: tuple[int, ...]
    corr_estimates: tuple[float, ...]
    fitted_rho: float
    fit_quality: float


def alpha_label(alpha: float | None) -> str:
    return IID_LABEL if alpha is None else f"{alpha:g}"


def mean_ci(errors) -> tuple[float, float, float]:
    """Mean of the errors with a normal-approximation 95% interval.

    Sums run through ``math.fsum`` in index order, so the result does not
    depend on how the errors were produced or scheduled. A single
    replication collapses the interval to the point estimate.
    """
    errs = [float(e) for e in errors]
    count = len(errs)
    if count == 0:
        raise InvalidInput("need at least one error value")
    mean = math.fsum(errs) / count
    if count == 1:
        return mean, mean, mean
    var = math.fsum((e - mean) ** 2 for e in errs) / (count - 1)
    half = CI_Z * math.sqrt(var / count)
    return mean, mean - half, mean + half


def resolve_workers(workers: int | None = None) -> int:
    """Explicit argument, else the CPD_THREADS cap, else one per CPU (max 4)."""
    if workers is not None:
        if workers < 1:
            raise InvalidInput(f"worker count must be >= 1, got {workers}")
        return workers
    env = os.environ.get("CPD_THREADS")
    if env:
        try:
            parsed = int(env)
        except ValueError:
            raise InvalidInput(f"CPD_THREADS must be an integer, got {env!r}") from None
        if parsed < 1:
            raise InvalidInput(f"CPD_THREADS must be >= 1, got {parsed}")
        return parsed
    return min(4, os.cpu_count() or 1)


def _cell_seed(master_seed: int, cell_index: int) -> int:
    """Fold the cell position into the master seed; stable and documented."""
    seq = np.random.SeedSequence(entropy=(int(master_seed), int(cell_index)))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def _cell_spec(cfg: ExperimentConfig, n: int, alpha: float | None) -> GeneratorSpec:
    acf = None if alpha is None else AcfSpec(alpha)
    return replace(cfg.generator, n=int(n), acf=acf)


def _replication_error(args) -> tuple[int, float]:
    """One replication: generate, estimate, return |theta_hat - theta_n|."""
    spec, est_cfg, cell_seed, rep = args
    x, change_index = generate(spec, SeedSpec(cell_seed, rep))
    realized_theta = change_index / spec.n
    est = estimate_change_point(x, est_cfg)
    return rep, abs(est.theta_hat - realized_theta)


def run_experiment(cfg: ExperimentConfig, workers: int | None = None) -> list[MaeRow]:
    """Run every (alpha, n) cell of the grid and return rows in grid order.

    Cells iterate alpha-major so each dependence family is contiguous. A
    failing cell yields a row with its error message instead of aborting the
    grid. Results are independent of the worker count.
    """
    workers = resolve_workers(workers)
    est_cfg = EstimatorConfig(gamma=cfg.gamma, norm=cfg.norm)
    rows: list[MaeRow] = []
    cell_index = 0
    for alpha in cfg.alpha_grid:
        for n in cfg.n_grid:
            seed = _cell_seed(cfg.master_seed, cell_index)
            cell_index += 1
            label = alpha_label(alpha)
            try:
                spec = _cell_spec(cfg, n, alpha)
                tasks = [(spec, est_cfg, seed, r) for r in range(cfg.replications)]
                errs = np.empty(cfg.replications)
                if workers > 1 and cfg.replications > 1:
                    chunk = max(1, cfg.replications // (workers * 8))
                    with ProcessPoolExecutor(max_workers=workers) as pool:
                        for rep, err in pool.map(_replication_error, tasks, chunksize=chunk):
                            errs[rep] = err
                else:
                    for task in tasks:
                        rep, err = _replication_error(task)
                        errs[rep] = err
                mae, lo, hi = mean_ci(errs)
                rows.append(
                    MaeRow(
                        n=int(n),
                        alpha_label=label,
                        mae=mae,
                        ci_lo=lo,
                        ci_hi=hi,
                        n_times_mae=n * mae,
                        replications=cfg.replications,
                    )
                )
            except Exception as exc:  # record the cell failure, keep the grid going
                rows.append(
                    MaeRow(
                        n=int(n),
                        alpha_label=label,
                        mae=math.nan,
                        ci_lo=math.nan,
                        ci_hi=math.nan,
                        n_times_mae=math.nan,
                        replications=cfg.replications,
                        error=f"{type(exc).__name__}: {exc}",
                    )
                )
    return rows


def rate_check(rows: list[MaeRow]) -> RateReport:
    """Plateau diagnostics for one (alpha, norm) family of rows.

    ``max_min_ratio`` compares n*MAE over the largest half of the n grid
    (at least two points); the tail flag reports whether n*MAE is
    non-increasing over the last three grid points.
    """
    clean = [row for row in rows if row.error is None]
    if len(clean) < 2:
        raise InvalidInput("rate check needs at least 2 successful rows")
    if len({row.n for row in clean}) != len(clean):
        raise InvalidInput("rate check needs distinct n per row")
    ordered = sorted(clean, key=lambda row: row.n)
    values = [row.n_times_mae for row in ordered]
    top = values[-max(2, math.ceil(len(values) / 2)):]
    low, high = min(top), max(top)
    if high == 0.0:
        ratio = 1.0
    elif low == 0.0:
        ratio = math.inf
    else:
        ratio = high / low
    tail = values[-min(3, len(values)):]
    flag = all(b <= a for a, b in zip(tail, tail[1:]))
    return RateReport(max_min_ratio=ratio, monotone_tail_flag=flag)


# correlations below this are treated as numerically zero in the decay fit
CORR_FLOOR = 1e-3


def decay_diagnostic(values, func="identity", lags=tuple(range(1, 21))) -> DecayDiagnostic:
    """Lagged sample correlations of f(X) and a log-log decay fit.

    Fits ``log |corr|`` against ``log m`` over lags whose correlation clears
    the numerical floor; ``fitted_rho`` is the negative slope and
    ``fit_quality`` the R^2 of that line. If fewer than two lags clear the
    floor the decay is faster than any algebraic rate resolvable from the
    data and ``fitted_rho`` is reported as ``inf``.
    """
    x = validate_series(values)
    if isinstance(func, str):
        try:
            f = DIAG_FUNCTIONS[func]
        except KeyError:
            raise InvalidInput(f"unknown diagnostic function {func!r}") from None
    else:
        f = func
    lags = tuple(int(m) for m in lags)
    if len(lags) == 0:
        raise InvalidInput("need at least one lag")
    if any(m < 1 for m in lags):
        raise InvalidInput("lags must be >= 1")
    if any(b <= a for a, b in zip(lags, lags[1:])):
        raise InvalidInput("lags must be strictly increasing")
    if max(lags) >= x.size / 4:
        raise InvalidInput(f"max lag {max(lags)} must be below n/4 = {x.size / 4:g}")

    z = f(x)
    corrs = []
    for m in lags:
        a, b = z[:-m], z[m:]
        sa, sb = np.std(a), np.std(b)
        if sa == 0.0 or sb == 0.0:
            corrs.append(0.0)
        else:
            corrs.append(float(np.corrcoef(a, b)[0, 1]))

    usable = [(m, c) for m, c in zip(lags, corrs) if abs(c) > CORR_FLOOR]
    if len(usable) < 2:
        return DecayDiagnostic(lags, tuple(corrs), math.inf, 0.0)
    log_m = np.log([m for m, _ in usable])
    log_c = np.log([abs(c) for _, c in usable])
    slope, intercept = np.polyfit(log_m, log_c, 1)
    fitted = intercept + slope * log_m
    ss_res = float(np.sum((log_c - fitted) ** 2))
    ss_tot = float(np.sum((log_c - log_c.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else max(0.0, 1.0 - ss_res / ss_tot)
    return DecayDiagnostic(lags, tuple(corrs), float(-slope), r2)
