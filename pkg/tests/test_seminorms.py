import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cpest import InvalidInput, SeminormSpec, evaluate_indicator_norm, evaluate_moment_norm

d_vectors = st.lists(
    st.floats(min_value=-1.0, max_value=1.0, allow_nan=False), min_size=1, max_size=60
).map(np.asarray)


class TestSpecValidation:
    def test_lp_requires_p_at_least_one(self):
        with pytest.raises(InvalidInput):
            SeminormSpec(kind="lp", p=0.5)

    def test_moment_weights_must_be_positive_and_nonempty(self):
        with pytest.raises(InvalidInput):
            SeminormSpec(kind="moments", moment_weights=())
        with pytest.raises(InvalidInput):
            SeminormSpec(kind="moments", moment_weights=(1.0, 0.0))

    def test_truncation_must_be_positive(self):
        with pytest.raises(InvalidInput):
            SeminormSpec(kind="moments", truncation=0.0)

    def test_unknown_kind(self):
        with pytest.raises(InvalidInput):
            SeminormSpec(kind="l-infinity")

    def test_labels(self):
        assert SeminormSpec(kind="ks").label() == "ks"
        assert SeminormSpec(kind="lp", p=2.0).label() == "lp:2"
        assert SeminormSpec(kind="moments").label() == "moments"


class TestIndicatorNorm:
    def test_ks_zero_measure(self):
        assert evaluate_indicator_norm(SeminormSpec(kind="ks"), np.zeros(6)) == 0.0

    def test_ks_max_abs(self):
        d = np.array([0.0, 0, 0, 1, 1, 1])
        assert evaluate_indicator_norm(SeminormSpec(kind="ks"), d) == 1.0

    def test_l1_average(self):
        # (1/6) * 3 = 0.5; agrees with a from-scratch evaluation of the definition
        d = np.array([0.0, 0, 0, 1, 1, 1])
        spec = SeminormSpec(kind="lp", p=1.0)
        assert evaluate_indicator_norm(spec, d) == pytest.approx(0.5, abs=1e-15)
        assert evaluate_indicator_norm(spec, d) == pytest.approx(
            sum(abs(v) for v in d) / len(d), abs=1e-15
        )

    def test_empty_rejected(self):
        with pytest.raises(InvalidInput):
            evaluate_indicator_norm(SeminormSpec(kind="ks"), np.array([]))

    def test_moments_kind_rejected(self):
        with pytest.raises(InvalidInput):
            evaluate_indicator_norm(SeminormSpec(kind="moments"), np.ones(3))

    @given(d=d_vectors)
    def test_zero_iff_all_zero(self, d):
        spec = SeminormSpec(kind="lp", p=2.0)
        value = evaluate_indicator_norm(spec, d)
        assert value >= 0.0
        assert (value == 0.0) == bool(np.all(d == 0.0))


class TestMomentNorm:
    def test_zero_measure(self):
        spec = SeminormSpec(kind="moments", moment_weights=(1.0, 0.5))
        assert evaluate_moment_norm(spec, [0.0, 0.0]) == 0.0

    def test_weighted_sum(self):
        spec = SeminormSpec(kind="moments", moment_weights=(1.0, 0.5))
        assert evaluate_moment_norm(spec, [0.2, -0.4]) == pytest.approx(0.4, abs=1e-15)

    def test_geometric_weights(self):
        spec = SeminormSpec(kind="moments", moment_weights=(0.5, 0.25, 0.125))
        assert evaluate_moment_norm(spec, [1.0, 1.0, 1.0]) == pytest.approx(0.875, abs=1e-15)

    def test_length_mismatch(self):
        spec = SeminormSpec(kind="moments", moment_weights=(1.0, 0.5))
        with pytest.raises(InvalidInput):
            evaluate_moment_norm(spec, [0.1])


def _norm_value(spec, vec):
    if spec.kind == "moments":
        return evaluate_moment_norm(spec, vec)
    return evaluate_indicator_norm(spec, vec)


def _specs_for(vec_len):
    return [
        SeminormSpec(kind="ks"),
        SeminormSpec(kind="lp", p=1.0),
        SeminormSpec(kind="lp", p=3.0),
        SeminormSpec(kind="moments", moment_weights=tuple(2.0 ** -q for q in range(1, vec_len + 1))),
    ]


class TestSeminormAxioms:
    @given(d=d_vectors)
    def test_negation_invariance(self, d):
        for spec in _specs_for(d.size):
            assert _norm_value(spec, d) == _norm_value(spec, -d)

    @given(d=d_vectors, c=st.floats(min_value=-100.0, max_value=100.0, allow_nan=False))
    def test_homogeneity(self, d, c):
        for spec in _specs_for(d.size):
            scaled = _norm_value(spec, c * d)
            expected = abs(c) * _norm_value(spec, d)
            assert scaled == pytest.approx(expected, rel=1e-12, abs=1e-300)

    @given(
        pair=st.integers(min_value=1, max_value=40).flatmap(
            lambda n: st.tuples(
                st.lists(st.floats(-1, 1, allow_nan=False), min_size=n, max_size=n),
                st.lists(st.floats(-1, 1, allow_nan=False), min_size=n, max_size=n),
            )
        )
    )
    def test_triangle_inequality(self, pair):
        d1, d2 = (np.asarray(v) for v in pair)
        for spec in _specs_for(d1.size):
            lhs = _norm_value(spec, d1 + d2)
            rhs = _norm_value(spec, d1) + _norm_value(spec, d2)
            assert lhs <= rhs + 1e-12

    @settings(max_examples=60)
    @given(d=d_vectors)
    def test_lp_monotone_in_p_and_approaches_ks(self, d):
        ks = evaluate_indicator_norm(SeminormSpec(kind="ks"), d)
        values = [
            evaluate_indicator_norm(SeminormSpec(kind="lp", p=p), d)
            for p in (1.0, 2.0, 8.0, 64.0)
        ]
        for lower, higher in zip(values, values[1:]):
            assert lower <= higher + 1e-12
        assert values[-1] <= ks + 1e-12
        # ((1/n) max^p)^(1/p) lower-bounds the L^p mean power
        assert values[-1] >= ks * d.size ** (-1.0 / 64.0) - 1e-12
