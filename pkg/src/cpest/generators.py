"""Synthetic sequences with a single change-point and controlled dependence.

Three kinds:

* ``iid``      -- independent draws, different marginal laws before/after,
* ``gaussian`` -- a dependent standard-Gaussian sequence with power-law
                  autocovariance ``r(m) = (1+m^2)^(-alpha/4)``, sampled by
                  the Durbin-Levinson recursion and pushed through a pair of
                  transforms that switch at the change-point,
* ``linear``   -- a two-sided moving average with power-law coefficients,
                  switching to an independent innovation stream (and by
                  default sign-flipped off-center coefficients) at the change.

All randomness derives from a (master seed, replication id) pair through
``numpy.random.SeedSequence(entropy=master_seed, spawn_key=(replication_id,))``
feeding the default PCG64 bit generator, so each replication owns an
independent stream regardless of how many replications run or in what order.
Normal variates come from numpy's ziggurat sampler; bit-level reproducibility
is therefore tied to numpy's Generator.standard_normal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CovarianceNotPD, InvalidInput

KIND_IID = "iid"
KIND_GAUSSIAN = "gaussian"
KIND_LINEAR = "linear"

# innovation variance below this is treated as a non-PD autocovariance
MIN_INNOVATION_VARIANCE = 1e-12

TRANSFORMS = {
    "identity": lambda y: np.asarray(y, dtype=float).copy(),
    "square-minus-one": lambda y: np.square(y) - 1.0,
    "one-minus-square": lambda y: 1.0 - np.square(y),
}

# same mean and variance on both sides, third moments of opposite sign
DEFAULT_TRANSFORMS = ("square-minus-one", "one-minus-square")


def polynomial_acf(alpha: float, m):
    """Autocovariance ``(1 + m^2)^(-alpha/4)`` at lag m (scalar or array)."""
    if not alpha > 0.0:
        raise InvalidInput(f"alpha must be > 0, got {alpha}")
    m = np.asarray(m, dtype=float)
    out = (1.0 + m * m) ** (-alpha / 4.0)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class AcfSpec:
    """Power-law autocovariance family, decaying like ``m^(-alpha/2)``."""

    alpha: float

    def __post_init__(self):
        if not self.alpha > 0.0:
            raise InvalidInput(f"alpha must be > 0, got {self.alpha}")

    def values(self, n: int) -> np.ndarray:
        """Autocovariances at lags 0..n-1."""
        return polynomial_acf(self.alpha, np.arange(n))


@dataclass(frozen=True)
class SeedSpec:
    """Master seed plus replication id; together they determine every draw."""

    master_seed: int
    replication_id: int = 0

    def __post_init__(self):
        if not (0 <= int(self.master_seed) < 2**64):
            raise InvalidInput(f"master seed must fit in 64 bits, got {self.master_seed}")
        if int(self.replication_id) < 0:
            raise InvalidInput(f"replication id must be >= 0, got {self.replication_id}")

    def rng(self) -> np.random.Generator:
        seq = np.random.SeedSequence(
            entropy=int(self.master_seed), spawn_key=(int(self.replication_id),)
        )
        return np.random.default_rng(seq)


@dataclass(frozen=True)
class GeneratorSpec:
    """Recipe for one synthetic series with a change at fraction ``theta``.

    ``acf`` and ``transforms`` apply to the gaussian kind (``acf=None`` means
    an iid standard-Gaussian base); ``beta``, ``lag_truncation`` and
    ``flip_post_coefficients`` to the linear kind; ``pre_law``/``post_law``
    (text like ``normal:0,1`` with mean and standard deviation) to the iid
    kind.
    """

    kind: str = KIND_GAUSSIAN
    theta: float = 0.5
    n: int = 2
    acf: AcfSpec | None = None
    transforms: tuple[str, str] = DEFAULT_TRANSFORMS
    beta: float = 1.0
    lag_truncation: int = 20
    flip_post_coefficients: bool = True
    pre_law: str = "normal:0,1"
    post_law: str = "normal:0,1"

    def __post_init__(self):
        if self.kind not in (KIND_IID, KIND_GAUSSIAN, KIND_LINEAR):
            raise InvalidInput(f"unknown generator kind {self.kind!r}")
        if not (0.0 < self.theta < 1.0):
            raise InvalidInput(f"theta must lie in (0, 1), got {self.theta}")
        if int(self.n) < 2:
            raise InvalidInput(f"series length must be >= 2, got {self.n}")
        if self.kind == KIND_LINEAR:
            if not self.beta > 0.5:
                raise InvalidInput(
                    f"coefficient exponent must exceed 1/2 for square summability, got {self.beta}"
                )
            if int(self.lag_truncation) < 1:
                raise InvalidInput(f"lag truncation must be >= 1, got {self.lag_truncation}")
        for name in self.transforms:
            if name not in TRANSFORMS:
                raise InvalidInput(f"unknown transform {name!r}")

    def change_index(self) -> int:
        """Last index (1-based) of the pre-change block: floor(n * theta)."""
        return int(math.floor(self.n * self.theta))


def durbin_levinson_filter(acf_values, innovations) -> np.ndarray:
    """Turn iid standard-normal innovations into a Gaussian sequence with the
    given autocovariance, via the innovations form of the Durbin-Levinson
    recursion (O(n^2) time, O(n) memory).

    Step t predicts the next value from the previous t and adds fresh noise
    scaled by the innovation standard deviation; the partial autocorrelation
    updates the prediction coefficients in place.
    """
    r = np.asarray(acf_values, dtype=float)
    eps = np.asarray(innovations, dtype=float)
    n = eps.size
    if r.size < n:
        raise InvalidInput(f"need {n} autocovariances, got {r.size}")
    if n == 0:
        return np.empty(0)
    if not r[0] > 0.0:
        raise CovarianceNotPD(f"lag-0 autocovariance must be positive, got {r[0]}")
    y = np.empty(n)
    y[0] = math.sqrt(r[0]) * eps[0]
    if n == 1:
        return y
    phi = np.zeros(n - 1)
    v = r[0]
    for t in range(1, n):
        if t == 1:
            reflect = r[1] / r[0]
        else:
            reflect = (r[t] - phi[: t - 1] @ r[t - 1 : 0 : -1]) / v
            phi[: t - 1] -= reflect * phi[t - 2 :: -1]
        phi[t - 1] = reflect
        v *= 1.0 - reflect * reflect
        if v < MIN_INNOVATION_VARIANCE:
            raise CovarianceNotPD(
                f"innovation variance collapsed to {v:.3e} at step {t}"
            )
        y[t] = phi[:t] @ y[t - 1 :: -1] + math.sqrt(v) * eps[t]
    return y


def durbin_levinson_sample(acf: AcfSpec, n: int, seed: SeedSpec) -> np.ndarray:
    """Zero-mean unit-variance Gaussian sample of length n with ACF ``acf``."""
    if n < 1:
        raise InvalidInput(f"need n >= 1, got {n}")
    return durbin_levinson_filter(acf.values(n), seed.rng().standard_normal(n))


def apply_change(y, theta: float, transforms: tuple[str, str] = DEFAULT_TRANSFORMS) -> np.ndarray:
    """First transform on indices 1..floor(n*theta), second on the rest."""
    if not (0.0 < theta < 1.0):
        raise InvalidInput(f"theta must lie in (0, 1), got {theta}")
    y = np.asarray(y, dtype=float)
    try:
        g_pre, g_post = (TRANSFORMS[name] for name in transforms)
    except KeyError as exc:
        raise InvalidInput(f"unknown transform {exc.args[0]!r}") from None
    cut = int(math.floor(y.size * theta))
    return np.concatenate([g_pre(y[:cut]), g_post(y[cut:])])


def _coefficients(beta: float, lag: int) -> np.ndarray:
    """Two-sided filter weights, index L+q holding the lag-q coefficient."""
    q = np.abs(np.arange(-lag, lag + 1, dtype=float))
    b = np.ones(2 * lag + 1)
    off = q > 0
    b[off] = q[off] ** (-beta)
    return b


def linear_process_sample(spec: GeneratorSpec, seed: SeedSpec) -> np.ndarray:
    """Two-sided moving average switching stream (and coefficients) at the change.

    Each side is a complete linear process ``sum_{|q|<=L} b_q e_{i-q}`` over
    its own innovation stream, padded with L extra innovations at both ends;
    the output splices the pre-change values of the first with the
    post-change values of the second.
    """
    if spec.kind != KIND_LINEAR:
        raise InvalidInput(f"expected a linear-process spec, got kind {spec.kind!r}")
    lag = int(spec.lag_truncation)
    n = int(spec.n)
    b_pre = _coefficients(spec.beta, lag)
    if spec.flip_post_coefficients:
        b_post = -b_pre
        b_post[lag] = b_pre[lag]
    else:
        b_post = b_pre
    rng = seed.rng()
    eps_pre = rng.standard_normal(n + 2 * lag)
    eps_post = rng.standard_normal(n + 2 * lag)
    z_pre = np.convolve(eps_pre, b_pre, mode="valid")
    z_post = np.convolve(eps_post, b_post, mode="valid")
    cut = spec.change_index()
    return np.concatenate([z_pre[:cut], z_post[cut:]])


def _draw_law(law: str, size: int, rng: np.random.Generator) -> np.ndarray:
    """Draw from a named marginal law like ``normal:0,1`` or ``uniform:0,1``."""
    name, _, argtext = law.partition(":")
    try:
        args = [float(a) for a in argtext.split(",")] if argtext else []
    except ValueError:
        raise InvalidInput(f"could not parse law parameters in {law!r}") from None
    if name == "normal":
        mu, sigma = args if len(args) == 2 else (None, None)
        if sigma is None or sigma <= 0:
            raise InvalidInput(f"normal law needs mean and positive stddev, got {law!r}")
        return mu + sigma * rng.standard_normal(size)
    if name == "uniform":
        lo, hi = args if len(args) == 2 else (None, None)
        if hi is None or not hi > lo:
            raise InvalidInput(f"uniform law needs low < high, got {law!r}")
        return rng.uniform(lo, hi, size)
    if name == "exponential":
        (scale,) = args if len(args) == 1 else (None,)
        if scale is None or scale <= 0:
            raise InvalidInput(f"exponential law needs a positive scale, got {law!r}")
        return rng.exponential(scale, size)
    raise InvalidInput(f"unknown marginal law {name!r}")


def generate(spec: GeneratorSpec, seed: SeedSpec) -> tuple[np.ndarray, int]:
    """Produce one series and the true change index floor(n * theta)."""
    cut = spec.change_index()
    if spec.kind == KIND_IID:
        rng = seed.rng()
        x = np.concatenate(
            [_draw_law(spec.pre_law, cut, rng), _draw_law(spec.post_law, spec.n - cut, rng)]
        )
        return x, cut
    if spec.kind == KIND_GAUSSIAN:
        if spec.acf is None:
            y = seed.rng().standard_normal(spec.n)
        else:
            y = durbin_levinson_sample(spec.acf, spec.n, seed)
        return apply_change(y, spec.theta, spec.transforms), cut
    return linear_process_sample(spec, seed), cut
