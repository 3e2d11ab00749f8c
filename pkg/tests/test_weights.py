import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mlscert.weights import FAMILIES, WeightSpec


def test_exp_at_zero():
    assert WeightSpec("exp", 1.0).w(0.0) == 1.0


def test_shepard_at_zero():
    assert WeightSpec("shepard", 1.0).w(0.0) == 0.0


def test_levin_value():
    # expm1 form at alpha=1, r=1
    assert WeightSpec("levin", 1.0).w(1.0) == pytest.approx(math.e - 1.0, rel=1e-15)


def test_mclain_value():
    spec = WeightSpec("mclain", 1.0)
    assert spec.w(1.0) == pytest.approx(math.exp(-1.0), rel=1e-15)
    assert spec.w(0.0) == 0.0


def test_exp_formula_vectorized():
    spec = WeightSpec("exp", 2.0)
    r = np.array([0.0, 0.5, 1.0])
    np.testing.assert_allclose(spec.w(r), np.exp(2.0 * r**2), rtol=1e-15)


def test_negative_distance_rejected():
    with pytest.raises(ValueError):
        WeightSpec("exp", 1.0).w(-0.1)


def test_unknown_family_rejected():
    with pytest.raises(ValueError):
        WeightSpec("gauss", 1.0)


def test_nonpositive_alpha_rejected():
    with pytest.raises(ValueError):
        WeightSpec("exp", 0.0)
    with pytest.raises(ValueError):
        WeightSpec("exp", -1.0)


def test_interpolating_flags():
    """w(0)=0 for every family but exp, which has w(0)=1."""
    assert not WeightSpec("exp", 1.0).interpolating
    for fam in ("shepard", "mclain", "levin"):
        spec = WeightSpec(fam, 1.3)
        assert spec.interpolating
        assert spec.w(0.0) == 0.0


def test_smoothness_flags():
    assert WeightSpec("exp", 1.0).smooth
    assert WeightSpec("mclain", 1.0).smooth
    assert WeightSpec("levin", 1.0).smooth
    assert not WeightSpec("shepard", 1.0).smooth


def test_penalty_is_reciprocal():
    spec = WeightSpec("levin", 0.7)
    r = np.array([0.2, 0.9, 2.0])
    np.testing.assert_allclose(spec.W(r), 1.0 / spec.w(r), rtol=1e-15)


def test_penalty_infinite_at_interpolation_point():
    assert WeightSpec("shepard", 1.0).W(0.0) == math.inf


def test_overflow_maps_to_inf():
    # a node past the representable range has weight exactly zero
    spec = WeightSpec("exp", 400.0)
    assert spec.w(3.0) == math.inf
    assert spec.W(3.0) == 0.0


def test_custom_family():
    spec = WeightSpec(
        "custom",
        custom_w=lambda r: np.asarray(r) ** 2,
        custom_interpolating=True,
        custom_smooth=True,
    )
    assert spec.w(2.0) == 4.0
    assert spec.interpolating and spec.smooth
    with pytest.raises(ValueError):
        spec.to_dict()


def test_dict_round_trip():
    spec = WeightSpec("mclain", 2.5)
    again = WeightSpec.from_dict(spec.to_dict())
    assert again == spec


def test_from_dict_requires_family():
    with pytest.raises(ValueError):
        WeightSpec.from_dict({"alpha": 1.0})


@settings(max_examples=50, deadline=None)
@given(
    fam=st.sampled_from([f for f in FAMILIES if f != "custom"]),
    alpha=st.floats(0.05, 4.0),
    r=st.floats(0.0, 3.0),
)
def test_weights_nonnegative(fam, alpha, r):
    assert WeightSpec(fam, alpha).w(r) >= 0.0


@settings(max_examples=50, deadline=None)
@given(alpha=st.floats(0.05, 4.0), r=st.floats(1e-6, 3.0))
def test_positive_distance_positive_weight(alpha, r):
    for fam in ("exp", "shepard", "mclain", "levin"):
        assert WeightSpec(fam, alpha).w(r) > 0.0
