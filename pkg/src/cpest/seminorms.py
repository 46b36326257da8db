"""Seminorms on signed measures, evaluated through their action on a function family.

Three families are supported:

* ``ks``      -- sup over the indicator family ``1_{. < x_i}`` (Kolmogorov-Smirnov),
* ``lp``      -- L^p average over the same indicator family,
* ``moments`` -- weighted sum of truncated-moment differences.

For the indicator kinds the measure is represented by the vector of its
values on each indicator (one entry per sample threshold); for the moment
kind by the vector of its values on the truncated powers ``x^p 1_{|x|<M}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput

KIND_KS = "ks"
KIND_LP = "lp"
KIND_MOMENTS = "moments"

# Geometrically decaying weights keep the weighted-moment sum summable for
# any truncation level.
DEFAULT_MOMENT_WEIGHTS = (0.5, 0.25, 0.125, 0.0625)
DEFAULT_TRUNCATION = 10.0


@dataclass(frozen=True)
class SeminormSpec:
    """Which seminorm to apply and its parameters.

    ``p`` is used only by the ``lp`` kind; ``moment_weights`` (positive) and
    ``truncation`` (M > 0) only by the ``moments`` kind.
    """

    kind: str = KIND_KS
    p: float = 1.0
    moment_weights: tuple[float, ...] = field(default=DEFAULT_MOMENT_WEIGHTS)
    truncation: float = DEFAULT_TRUNCATION

    def __post_init__(self):
        if self.kind not in (KIND_KS, KIND_LP, KIND_MOMENTS):
            raise InvalidInput(f"unknown seminorm kind {self.kind!r}")
        if self.kind == KIND_LP and not self.p >= 1.0:
            raise InvalidInput(f"lp seminorm requires p >= 1, got {self.p}")
        if self.kind == KIND_MOMENTS:
            if len(self.moment_weights) == 0:
                raise InvalidInput("moments seminorm requires at least one weight")
            if any(not w > 0.0 for w in self.moment_weights):
                raise InvalidInput("moment weights must all be strictly positive")
            if not self.truncation > 0.0:
                raise InvalidInput(f"truncation must be > 0, got {self.truncation}")

    def label(self) -> str:
        """Compact text form used in CSV output and CLI summaries."""
        if self.kind == KIND_LP:
            return f"lp:{self.p:g}"
        return self.kind


def evaluate_indicator_norm(spec: SeminormSpec, d) -> float:
    """Evaluate a KS or L^p seminorm on indicator values ``d``.

    ``d[i]`` is the measure applied to the i-th indicator ``1_{. < x_i}``.
    KS returns ``max_i |d_i|``; L^p returns ``((1/n) sum |d_i|^p)^(1/p)``.
    """
    if spec.kind not in (KIND_KS, KIND_LP):
        raise InvalidInput(f"indicator norm undefined for kind {spec.kind!r}")
    d = np.asarray(d, dtype=float)
    if d.size == 0:
        raise InvalidInput("indicator evaluations must be nonempty")
    absd = np.abs(d)
    if spec.kind == KIND_KS:
        return float(np.max(absd))
    return float((np.sum(absd ** spec.p) / d.size) ** (1.0 / spec.p))


def evaluate_moment_norm(spec: SeminormSpec, moment_diffs) -> float:
    """Evaluate the weighted-moment seminorm ``sum_p w_p |delta_p|``.

    ``moment_diffs[j]`` is the measure applied to the truncated power
    ``x^(j+1) 1_{|x| < M}``; its length must match the weight list.
    """
    if spec.kind != KIND_MOMENTS:
        raise InvalidInput(f"moment norm undefined for kind {spec.kind!r}")
    diffs = np.asarray(moment_diffs, dtype=float)
    if diffs.shape != (len(spec.moment_weights),):
        raise InvalidInput(
            f"expected {len(spec.moment_weights)} moment differences, got {diffs.size}"
        )
    return float(np.dot(np.asarray(spec.moment_weights), np.abs(diffs)))
