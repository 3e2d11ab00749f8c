"""Deterministic random-instance generators for the certification suites.

Everything downstream (property tests, the selftest CLI, the acceptance
suite) draws its random problems from here, so the sampling rules live in
one place:

* nodes uniform in [0,1] with minimum separation 1e-3;
* evaluation point uniform in [0,1], at least 1e-2 away from every node
  (keeps interpolating weights off their singular limit);
* basis size l in {1..min(m,5)} for m in {2..10};
* weight family drawn with a 55/15/15/15 exp/shepard/mclain/levin mix and
  shape alpha log-uniform in [0.1, 4];
* instances whose weighted-normal-equations condition exceeds 1e8, or whose
  diagonal weight matrix has condition beyond 1e12, are rejected and
  redrawn — certification tolerances are only meaningful below those caps.

Node values are a random smooth function (quadratic plus a sine), so fit
quality checks have something nontrivial to chew on.
"""

from dataclasses import dataclass, field

import numpy as np

from .bases import BasisSpec, monomial_basis
from .core import ConditioningError, HypothesisFailure, build_system
from .points import PointSet
from .weights import WeightSpec

__all__ = [
    "Instance",
    "random_instance",
    "random_suite",
    "random_h2_instance",
    "h2_suite",
    "random_matrix_pair",
    "matrix_pair_suite",
    "FAMILY_MIX",
]

#: (family, probability) sampling mix for the general suite
FAMILY_MIX = (
    ("exp", 0.55),
    ("shepard", 0.15),
    ("mclain", 0.15),
    ("levin", 0.15),
)

GRAM_COND_CAP = 1e8
DIAG_COND_CAP = 1e12
NODE_MIN_SEP = 1e-3
X_NODE_MARGIN = 1e-2


@dataclass(frozen=True)
class Instance:
    """One random fitting problem: nodes+values, basis, weight, eval point."""

    points: PointSet
    basis: BasisSpec
    weight: WeightSpec
    x: float
    meta: dict = field(default_factory=dict)

    def system(self, **kw):
        return build_system(self.x, self.points, self.basis, self.weight, **kw)


def _smooth_values(rng, nodes: np.ndarray) -> np.ndarray:
    c = rng.standard_normal(3)
    return c[0] + c[1] * np.sin(3.0 * nodes) + c[2] * nodes**2


def _sample_nodes(rng, m: int, min_sep: float, max_tries: int = 200) -> np.ndarray:
    for _ in range(max_tries):
        nodes = np.sort(rng.uniform(0.0, 1.0, size=m))
        if m == 1 or np.min(np.diff(nodes)) >= min_sep:
            return nodes
    raise RuntimeError(f"could not place {m} nodes with separation {min_sep}")


def _sample_x(rng, nodes: np.ndarray, margin: float, max_tries: int = 200) -> float:
    for _ in range(max_tries):
        x = float(rng.uniform(0.0, 1.0))
        if np.min(np.abs(nodes - x)) >= margin:
            return x
    raise RuntimeError("could not place evaluation point away from nodes")


def _pick_family(rng) -> str:
    u = float(rng.uniform())
    acc = 0.0
    for fam, p in FAMILY_MIX:
        acc += p
        if u <= acc:
            return fam
    return FAMILY_MIX[-1][0]


def _log_uniform(rng, lo: float, hi: float) -> float:
    return float(np.exp(rng.uniform(np.log(lo), np.log(hi))))


def random_instance(
    rng,
    families=None,
    m_range: tuple = (2, 10),
    l_max: int = 5,
    alpha_range: tuple = (0.1, 4.0),
    cond_cap: float = GRAM_COND_CAP,
    diag_cond_cap: float = DIAG_COND_CAP,
    max_attempts: int = 500,
) -> Instance:
    """Draw one instance, rejecting badly conditioned configurations."""
    for attempt in range(1, max_attempts + 1):
        m = int(rng.integers(m_range[0], m_range[1] + 1))
        l = int(rng.integers(1, min(m, l_max) + 1))
        family = _pick_family(rng) if families is None else str(rng.choice(families))
        alpha = _log_uniform(rng, *alpha_range)
        nodes = _sample_nodes(rng, m, NODE_MIN_SEP)
        x = _sample_x(rng, nodes, X_NODE_MARGIN)
        points = PointSet(nodes, values=_smooth_values(rng, nodes))
        basis = monomial_basis(l)
        weight = WeightSpec(family, alpha)
        try:
            sysm = build_system(x, points, basis, weight)
        except (ConditioningError, HypothesisFailure):
            continue
        cond_d = float(np.max(sysm.dvec) / np.min(sysm.dvec))
        if sysm.cond_gram > cond_cap or cond_d > diag_cond_cap:
            continue
        return Instance(
            points,
            basis,
            weight,
            x,
            meta={
                "m": m,
                "l": l,
                "family": family,
                "alpha": alpha,
                "cond_gram": float(sysm.cond_gram),
                "cond_d": cond_d,
                "attempts": attempt,
            },
        )
    raise RuntimeError(f"no acceptable instance after {max_attempts} attempts")


def random_suite(n: int, seed: int, **kw) -> list:
    """n independent instances from a single seeded generator."""
    rng = np.random.default_rng(seed)
    return [random_instance(rng, **kw) for _ in range(n)]


def random_h2_instance(
    rng,
    m_range: tuple = (3, 9),
    l_max: int = 4,
    alpha_range: tuple = (0.1, 2.0),
    min_sep: float = 1e-2,
    cond_cap: float = GRAM_COND_CAP,
    max_attempts: int = 500,
) -> Instance:
    """Instance satisfying the 1-d growth-bound hypotheses.

    One dimension, strictly increasing nodes, exponential weight family,
    monomial basis (continuously differentiable).  Node separation and the
    evaluation margin are an order of magnitude wider than in the general
    suite so that finite-difference probes of da/dx have room to shrink.
    """
    for attempt in range(1, max_attempts + 1):
        m = int(rng.integers(m_range[0], m_range[1] + 1))
        l = int(rng.integers(1, min(m, l_max) + 1))
        alpha = _log_uniform(rng, *alpha_range)
        nodes = _sample_nodes(rng, m, min_sep)
        x = _sample_x(rng, nodes, X_NODE_MARGIN)
        points = PointSet(nodes, values=_smooth_values(rng, nodes))
        basis = monomial_basis(l)
        weight = WeightSpec("exp", alpha)
        try:
            sysm = build_system(x, points, basis, weight)
        except (ConditioningError, HypothesisFailure):
            continue
        if sysm.cond_gram > cond_cap:
            continue
        return Instance(
            points,
            basis,
            weight,
            x,
            meta={
                "m": m,
                "l": l,
                "family": "exp",
                "alpha": alpha,
                "cond_gram": float(sysm.cond_gram),
                "attempts": attempt,
            },
        )
    raise RuntimeError(f"no acceptable 1-d bound instance after {max_attempts} attempts")


def h2_suite(n: int, seed: int, **kw) -> list:
    rng = np.random.default_rng(seed)
    return [random_h2_instance(rng, **kw) for _ in range(n)]


def _random_symmetric(rng, m: int, eig_lo: float, eig_hi: float, n_zero: int = 0):
    """Symmetric matrix with known spectrum: Q diag(eigs) Q^T."""
    eigs = rng.uniform(eig_lo, eig_hi, size=m)
    if n_zero:
        eigs[:n_zero] = 0.0
    rng.shuffle(eigs)
    q, _ = np.linalg.qr(rng.standard_normal((m, m)))
    return q @ np.diag(eigs) @ q.T


def random_matrix_pair(rng, m_max: int = 6) -> dict:
    """Symmetric pair (U, V) with at least one positive-semidefinite factor.

    Three kinds, mixed 40/30/30: V positive definite with U indefinite,
    V singular positive semidefinite with U indefinite, and both factors
    positive definite (which additionally exercises the two-sided product
    bounds).
    """
    m = int(rng.integers(1, m_max + 1))
    u = float(rng.uniform())
    if u < 0.4:
        kind = "v_pd"
        umat = _random_symmetric(rng, m, -2.0, 3.0)
        vmat = _random_symmetric(rng, m, 0.1, 3.0)
    elif u < 0.7:
        kind = "v_psd_singular"
        umat = _random_symmetric(rng, m, -2.0, 3.0)
        n_zero = 1 if m == 1 else int(rng.integers(1, m))
        vmat = _random_symmetric(rng, m, 0.1, 3.0, n_zero=n_zero)
    else:
        kind = "both_pd"
        umat = _random_symmetric(rng, m, 0.05, 2.0)
        vmat = _random_symmetric(rng, m, 0.1, 3.0)
    return {"umat": umat, "vmat": vmat, "kind": kind, "m": m}


def matrix_pair_suite(n: int, seed: int, **kw) -> list:
    rng = np.random.default_rng(seed)
    return [random_matrix_pair(rng, **kw) for _ in range(n)]
