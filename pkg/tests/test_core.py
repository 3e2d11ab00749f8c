"""Solver-level checks: the coefficient vector, its invariants, and the
failure modes (hypotheses, rank, conditioning)."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mlscert.bases import BasisSpec, monomial_basis
from mlscert.core import (
    ConditioningError,
    HypothesisFailure,
    build_design,
    build_system,
    build_weight_diag,
    check_hypotheses,
    evaluate,
    evaluate_many,
)
from mlscert.points import PointSet
from mlscert.weights import WeightSpec

NODES_012 = PointSet(np.array([0.0, 1.0, 2.0]), values=np.array([0.0, 1.0, 2.0]))
EXP1 = WeightSpec("exp", 1.0)


# Hand-solved reference for nodes {0,1,2}, monomials {1,x}, exp weight
# alpha=1, x=1: solve E^T D^{-1} E b = c, a = D^{-1} E b with
# D = diag(2e, 2, 2e).
COEFFS_REF = np.array([0.21194155761708438, 0.57611688476583122, 0.21194155761708438])


def test_coefficients_match_hand_oracle():
    sysm = build_system(1.0, NODES_012, monomial_basis(2), EXP1)
    np.testing.assert_allclose(sysm.coeffs, COEFFS_REF, atol=1e-14)


def test_weight_diag_example():
    dvec = build_weight_diag(1.0, NODES_012, EXP1)
    np.testing.assert_allclose(dvec, [2.0 * np.e, 2.0, 2.0 * np.e], rtol=1e-15)


def test_fit_value_and_unity():
    sysm = build_system(1.0, NODES_012, monomial_basis(2), EXP1)
    assert float(np.sum(sysm.coeffs)) == pytest.approx(1.0, abs=1e-12)
    # data is linear and the basis contains linears: exact reproduction
    assert float(sysm.coeffs @ NODES_012.values) == pytest.approx(1.0, abs=1e-12)


def test_single_node_constant_basis():
    pts = PointSet(np.array([0.7]), values=np.array([3.0]))
    sysm = build_system(0.2, pts, monomial_basis(1), EXP1)
    np.testing.assert_allclose(sysm.coeffs, [1.0], rtol=0, atol=0)


def test_square_system_reproduces_data():
    """m = l: the local fit interpolates every node value."""
    pts = PointSet(np.array([0.0, 0.5, 1.0]), values=np.array([2.0, -1.0, 0.5]))
    for x in (0.0, 0.5, 1.0):
        assert evaluate(x, pts, monomial_basis(3), EXP1) == pytest.approx(
            float(pts.values[np.argmin(np.abs(pts.nodes - x))]), abs=1e-9
        )


def test_basis_larger_than_nodes_fails():
    with pytest.raises(HypothesisFailure) as err:
        build_system(0.5, NODES_012, monomial_basis(4), EXP1)
    assert "basis_size_le_nodes" in err.value.items


def test_rank_deficient_design_fails():
    dependent = BasisSpec(
        size=2,
        functions=(lambda x: np.ones_like(x[..., 0]), lambda x: 2.0 * np.ones_like(x[..., 0])),
        derivative=None,
        kind="custom",
        dim=1,
    )
    with pytest.raises(HypothesisFailure) as err:
        build_system(0.5, NODES_012, dependent, EXP1)
    assert "design_full_rank" in err.value.items


def test_conditioning_limit_enforced():
    with pytest.raises(ConditioningError):
        build_system(1.0, NODES_012, monomial_basis(2), EXP1, cond_limit=1.0)


def test_interpolating_weight_at_node():
    """Interpolating families return the exact node value at a node."""
    pts = PointSet(np.array([0.0, 1.0, 2.0]), values=np.array([5.0, -2.0, 7.0]))
    wspec = WeightSpec("shepard", 1.0)
    sysm = build_system(1.0, pts, monomial_basis(2), wspec)
    assert sysm.at_node == 1
    np.testing.assert_array_equal(sysm.coeffs, [0.0, 1.0, 0.0])
    assert evaluate(1.0, pts, monomial_basis(2), wspec) == -2.0


def test_evaluate_many():
    xs = np.array([0.3, 0.9, 1.4])
    vals = evaluate_many(xs, NODES_012, monomial_basis(2), EXP1)
    np.testing.assert_allclose(vals, xs, atol=1e-12)  # linear data


def test_check_hypotheses_ok():
    rep = check_hypotheses(NODES_012, monomial_basis(2), EXP1)
    assert rep.ok
    assert rep.constant_in_basis and rep.basis_size_le_nodes and rep.design_full_rank
    assert rep.weight_smooth is True
    assert rep.failed_items == []


def test_check_hypotheses_flags_nonsmooth_weight():
    rep = check_hypotheses(NODES_012, monomial_basis(2), WeightSpec("shepard", 1.0))
    # smoothness is advisory, not gating
    assert rep.ok
    assert rep.weight_smooth is False


def test_check_hypotheses_missing_constant():
    no_const = BasisSpec(
        size=1,
        functions=(lambda x: x[..., 0],),
        derivative=None,
        kind="custom",
        dim=1,
    )
    rep = check_hypotheses(NODES_012, no_const, EXP1)
    assert not rep.constant_in_basis
    assert not rep.ok


def test_design_shape():
    design = build_design(NODES_012, monomial_basis(2))
    assert design.shape == (3, 2)
    np.testing.assert_array_equal(design[:, 0], 1.0)
    np.testing.assert_array_equal(design[:, 1], NODES_012.nodes.ravel())


def test_gram_cached_and_symmetric():
    sysm = build_system(0.3, NODES_012, monomial_basis(2), EXP1)
    gram = sysm.gram
    np.testing.assert_allclose(gram, gram.T, atol=1e-15)
    assert gram.shape == (2, 2)


# --- point-set plumbing ----------------------------------------------------


def test_duplicate_nodes_rejected():
    with pytest.raises(ValueError):
        PointSet(np.array([0.0, 0.0, 1.0]))


def test_nonfinite_nodes_rejected():
    with pytest.raises(ValueError):
        PointSet(np.array([0.0, np.nan]))


def test_value_count_mismatch():
    with pytest.raises(ValueError):
        PointSet(np.array([0.0, 1.0]), values=np.array([1.0]))


def test_csv_round_trip(tmp_path):
    path = tmp_path / "pts.csv"
    pts = PointSet(np.array([0.0, 0.25, 1.5]), values=np.array([1.0, -2.0, 0.125]))
    pts.to_csv(path)
    again = PointSet.from_csv(path)
    np.testing.assert_array_equal(again.nodes, pts.nodes)
    np.testing.assert_array_equal(again.values, pts.values)


def test_csv_without_values(tmp_path):
    path = tmp_path / "nodes.csv"
    PointSet(np.array([0.0, 1.0])).to_csv(path)
    again = PointSet.from_csv(path)
    assert again.values is None


# --- property tests --------------------------------------------------------

node_sets = st.integers(2, 8).flatmap(
    lambda m: st.lists(
        st.floats(0.0, 1.0, allow_nan=False, width=64),
        min_size=m,
        max_size=m,
        unique=True,
    ).filter(lambda xs: np.min(np.diff(np.sort(xs))) > 1e-3)
)


@settings(max_examples=50, deadline=None)
@given(
    nodes=node_sets,
    alpha=st.floats(0.1, 3.0),
    xfrac=st.floats(0.05, 0.95),
)
def test_partition_of_unity_property(nodes, alpha, xfrac):
    nodes = np.sort(np.asarray(nodes))
    pts = PointSet(nodes)
    x = float(nodes[0] + xfrac * (nodes[-1] - nodes[0]))
    if np.min(np.abs(nodes - x)) < 1e-6:
        return
    l = min(2, pts.m)
    try:
        sysm = build_system(x, pts, monomial_basis(l), WeightSpec("exp", alpha))
    except ConditioningError:
        return
    assert abs(float(np.sum(sysm.coeffs)) - 1.0) <= 1e-9


@settings(max_examples=50, deadline=None)
@given(
    nodes=node_sets,
    alpha=st.floats(0.1, 3.0),
    coef0=st.floats(-5.0, 5.0),
    coef1=st.floats(-5.0, 5.0),
)
def test_linear_reproduction_property(nodes, alpha, coef0, coef1):
    """Fits reproduce any function in the basis span."""
    nodes = np.sort(np.asarray(nodes))
    pts = PointSet(nodes, values=coef0 + coef1 * nodes)
    x = float(0.5 * (nodes[0] + nodes[-1]))
    if np.min(np.abs(nodes - x)) < 1e-6:
        return
    try:
        got = evaluate(x, pts, monomial_basis(2), WeightSpec("exp", alpha))
    except ConditioningError:
        return
    target = coef0 + coef1 * x
    assert abs(got - target) <= 1e-9 * max(1.0, abs(target))
