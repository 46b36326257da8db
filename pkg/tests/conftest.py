import numpy as np
import pytest

from cpest import EstimatorConfig, SeminormSpec

ALL_NORMS = (
    SeminormSpec(kind="ks"),
    SeminormSpec(kind="lp", p=1.0),
    SeminormSpec(kind="lp", p=2.0),
    SeminormSpec(kind="moments"),
)


def random_series(rng: np.random.Generator, n: int) -> np.ndarray:
    """Mixed test data: continuous draws or small integers with heavy ties."""
    if rng.random() < 0.5:
        return rng.standard_normal(n)
    return rng.integers(0, 4, n).astype(float)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


@pytest.fixture
def ks_config():
    return EstimatorConfig(gamma=0.5, norm=SeminormSpec(kind="ks"))
