"""Naive reference implementations used to validate the optimized code paths.

Everything here evaluates definitions directly: block means are recomputed
from scratch at every split, and Gaussian sampling goes through an explicit
dense Cholesky factor. Deliberately slow; shares no computation code with
the estimator or the generators beyond configuration types.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CovarianceNotPD, InvalidInput
from .estimator import EstimatorConfig
from .generators import AcfSpec
from .seminorms import KIND_KS, KIND_LP, KIND_MOMENTS

BRUTE_FORCE_LIMIT = 5000
CHOLESKY_LIMIT = 2048


@dataclass(frozen=True)
class EmpiricalSignedMeasure:
    """Weighted difference of the empirical measures of two sample blocks."""

    left_block: np.ndarray
    right_block: np.ndarray
    weight: float

    def __post_init__(self):
        if len(self.left_block) == 0 or len(self.right_block) == 0:
            raise InvalidInput("both blocks must be nonempty")


def indicator_below(threshold: float):
    """The function ``1_{. < t}``."""
    return lambda v: 1.0 if v < threshold else 0.0


def truncated_power(p: int, truncation: float):
    """The function ``x^p 1_{|x| < M}``."""
    return lambda v: v**p if abs(v) < truncation else 0.0


def measure_apply(m: EmpiricalSignedMeasure, f) -> float:
    """Apply the signed measure to a function by direct summation."""
    left = sum(f(v) for v in m.left_block) / len(m.left_block)
    right = sum(f(v) for v in m.right_block) / len(m.right_block)
    return m.weight * (left - right)


def brute_force_profile(values, cfg: EstimatorConfig) -> np.ndarray:
    """Statistic profile evaluated straight from the definitions.

    Ground truth for testing the optimized profile; no incremental counting,
    every split re-reads both blocks in full.
    """
    x = np.asarray(values, dtype=float)
    n = x.size
    if n < 2:
        raise InvalidInput("series needs at least 2 observations")
    if n > BRUTE_FORCE_LIMIT:
        raise InvalidInput(f"brute-force profile limited to n <= {BRUTE_FORCE_LIMIT}")
    if not np.all(np.isfinite(x)):
        raise InvalidInput("series contains non-finite values")

    spec = cfg.norm
    stats = np.empty(n - 1)
    for k in range(1, n):
        weight = ((k / n) * (1.0 - k / n)) ** (1.0 - cfg.gamma)
        m = EmpiricalSignedMeasure(x[:k], x[k:], weight)
        if spec.kind == KIND_MOMENTS:
            diffs = [
                measure_apply(m, truncated_power(p, spec.truncation))
                for p in range(1, len(spec.moment_weights) + 1)
            ]
            stats[k - 1] = sum(
                w * abs(delta) for w, delta in zip(spec.moment_weights, diffs)
            )
        else:
            # measure applied to every indicator 1_{. < x_i} at once
            d = m.weight * (
                np.mean(m.left_block[:, None] < x[None, :], axis=0)
                - np.mean(m.right_block[:, None] < x[None, :], axis=0)
            )
            if spec.kind == KIND_KS:
                stats[k - 1] = np.max(np.abs(d))
            elif spec.kind == KIND_LP:
                stats[k - 1] = np.mean(np.abs(d) ** spec.p) ** (1.0 / spec.p)
            else:
                raise InvalidInput(f"unknown seminorm kind {spec.kind!r}")
    return stats


def cholesky_sample(acf: AcfSpec, n: int, innovations) -> np.ndarray:
    """Gaussian sample with the target autocovariance via a dense Cholesky factor.

    Independent check of the sequential sampler: builds the full n-by-n
    Toeplitz covariance, factorizes it, and applies the lower factor to the
    given innovation vector.
    """
    if n < 1:
        raise InvalidInput(f"need n >= 1, got {n}")
    if n > CHOLESKY_LIMIT:
        raise InvalidInput(f"dense Cholesky limited to n <= {CHOLESKY_LIMIT}")
    eps = np.asarray(innovations, dtype=float)
    if eps.shape != (n,):
        raise InvalidInput(f"expected {n} innovations, got shape {eps.shape}")
    r = acf.values(n)
    cov = r[np.abs(np.subtract.outer(np.arange(n), np.arange(n)))]
    try:
        lower = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise CovarianceNotPD(f"Toeplitz covariance failed to factorize: {exc}") from None
    return lower @ eps
