"""Weighted local least-squares fitting of scattered data.

Given nodes x_1..x_m with samples f_i, a basis p_1..p_l and a weight family,
the fitted value at an evaluation point x is  sum_i a_i(x) f_i  where the
coefficient vector a solves the weighted least-squares problem

    minimize over p in span(p_1..p_l):   sum_i W(||x - x_i||) (p(x_i) - f_i)^2

and a_i collects the linear dependence of p(x) on f_i.  All linear algebra
goes through one thin QR factorization of the row-scaled design matrix, so
the squared conditioning of the normal equations never enters the solve.
"""

from dataclasses import dataclass, field

import numpy as np

from .bases import BasisSpec
from .points import PointSet
from .weights import WeightSpec

#: hard default for the admissible condition number of the normal-equations
#: (Gram) matrix; beyond this the solve refuses rather than return noise
COND_LIMIT = 1e12


class MlsError(Exception):
    """Base class for fitting errors."""


class ConditioningError(MlsError):
    """Gram matrix condition estimate exceeded the admissible limit."""

    def __init__(self, condition: float, limit: float):
        self.condition = float(condition)
        self.limit = float(limit)
        super().__init__(
            f"gram condition estimate {condition:.3e} exceeds limit {limit:.3e}"
        )


class HypothesisFailure(MlsError):
    """A structural requirement of the method does not hold."""

    def __init__(self, items: list[str]):
        self.items = list(items)
        super().__init__("hypothesis failure: " + ", ".join(self.items))


def rank_tolerance(m: int, l: int, smax: float) -> float:
    """Singular-value cutoff used for all numerical rank decisions."""
    return max(m, l) * smax * np.finfo(float).eps * 16


def build_design(points: PointSet, basis: BasisSpec) -> np.ndarray:
    """Design matrix: entry (i, j) is basis function j at node i, shape (m, l)."""
    if basis.dim != points.dim:
        raise ValueError(
            f"basis expects dim {basis.dim}, nodes have dim {points.dim}"
        )
    return basis.eval_design(points.nodes)


def build_weight_diag(x, points: PointSet, weight: WeightSpec) -> np.ndarray:
    """Diagonal of the solver's scaling matrix: entries 2 * w(||x - x_i||).

    The doubled reciprocal weights are what the operator diagnostics are
    phrased in; the factor 2 cancels from the fitted coefficients.
    """
    return 2.0 * np.asarray(weight.w(points.distances(x)), dtype=float)


@dataclass(frozen=True)
class MlsSystem:
    """Assembled local system at one evaluation point.

    Fields
    ------
    x : (d,) ndarray               evaluation point
    design : (m, l) ndarray        basis values at the nodes
    dvec : (m,) ndarray            diagonal of the scaling matrix (2 * w)
    basis_at_x : (l,) ndarray      basis values at x
    coeffs : (m,) ndarray          fitted coefficient vector a(x)
    qmat, rmat : ndarray or None   QR factors of design scaled by dvec^{-1/2}
    cond_gram : float              condition estimate of the Gram matrix
    at_node : int or None          node index when x coincides with a node of
                                   an interpolating weight (coeffs is then the
                                   exact interpolation limit, a unit vector)
    """

    x: np.ndarray
    design: np.ndarray
    dvec: np.ndarray
    basis_at_x: np.ndarray
    coeffs: np.ndarray
    qmat: np.ndarray | None
    rmat: np.ndarray | None
    cond_gram: float
    at_node: int | None = None
    _gram_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        for name in ("x", "design", "dvec", "basis_at_x", "coeffs"):
            arr = getattr(self, name)
            arr.setflags(write=False)

    @property
    def m(self) -> int:
        return self.design.shape[0]

    @property
    def l(self) -> int:
        return self.design.shape[1]

    @property
    def gram(self) -> np.ndarray:
        """Normal-equations matrix design^T diag(dvec)^{-1} design, cached."""
        if "gram" not in self._gram_cache:
            if self.rmat is None:
                raise ValueError("no gram matrix in the interpolation limit")
            self._gram_cache["gram"] = self.rmat.T @ self.rmat
        return self._gram_cache["gram"]


def build_system(
    x,
    points: PointSet,
    basis: BasisSpec,
    weight: WeightSpec,
    *,
    cond_limit: float = COND_LIMIT,
    design: np.ndarray | None = None,
) -> MlsSystem:
    """Assemble and solve the local system at evaluation point x.

    Parameters
    ----------
    x : scalar or (d,) array
        Evaluation point.
    points, basis, weight
        Problem data.  ``basis.size`` must not exceed the node count and the
        design matrix must have full column rank.
    cond_limit : float
        Admissible Gram condition estimate; beyond it ``ConditioningError``
        is raised.
    design : ndarray, optional
        Precomputed design matrix (it does not depend on x), for callers
        evaluating on a grid.

    Raises
    ------
    HypothesisFailure
        If the basis is larger than the node set or the design matrix is
        rank deficient.
    ConditioningError
        If the Gram condition estimate exceeds ``cond_limit``.
    """
    xv = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    E = build_design(points, basis) if design is None else np.asarray(design, float)
    m, l = E.shape
    if l > m:
        raise HypothesisFailure(["basis_size_le_nodes"])
    cvec = basis.eval_at(xv)
    dist = points.distances(xv)
    dvec = 2.0 * np.asarray(weight.w(dist), dtype=float)

    zero = dvec == 0.0
    if np.any(zero):
        hit = int(np.argmax(zero))
        if dist[hit] > 0:
            raise ValueError("weight vanished at positive distance")
        # interpolation limit: the coefficient vector degenerates to the
        # indicator of the coincident node
        coeffs = np.zeros(m)
        coeffs[hit] = 1.0
        return MlsSystem(
            x=xv, design=E, dvec=dvec, basis_at_x=cvec, coeffs=coeffs,
            qmat=None, rmat=None, cond_gram=np.inf, at_node=hit,
        )

    scaled = E / np.sqrt(dvec)[:, None]
    qmat, rmat = np.linalg.qr(scaled, mode="reduced")
    svals = np.linalg.svd(rmat, compute_uv=False)
    if svals[-1] <= rank_tolerance(m, l, svals[0]):
        raise HypothesisFailure(["design_full_rank"])
    cond_gram = float((svals[0] / svals[-1]) ** 2)
    if cond_gram > cond_limit:
        raise ConditioningError(cond_gram, cond_limit)

    coeffs = (qmat @ np.linalg.solve(rmat.T, cvec)) / np.sqrt(dvec)
    return MlsSystem(
        x=xv, design=E, dvec=dvec, basis_at_x=cvec, coeffs=coeffs,
        qmat=qmat, rmat=rmat, cond_gram=cond_gram,
    )


def solve_coefficients(system: MlsSystem) -> np.ndarray:
    """Coefficient vector a(x) of the assembled system (read-only view)."""
    return system.coeffs


def evaluate(
    x,
    points: PointSet,
    basis: BasisSpec,
    weight: WeightSpec,
    *,
    cond_limit: float = COND_LIMIT,
    design: np.ndarray | None = None,
) -> float:
    """Fitted value at x for the samples carried by ``points``."""
    if points.values is None:
        raise ValueError("points carry no values to fit")
    system = build_system(
        x, points, basis, weight, cond_limit=cond_limit, design=design
    )
    if system.at_node is not None:
        return float(points.values[system.at_node])
    return float(system.coeffs @ points.values)


def evaluate_many(xs, points, basis, weight, *, cond_limit=COND_LIMIT) -> np.ndarray:
    """Fitted values on a batch of evaluation points (rows of xs)."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if xs.ndim == 1:
        xs = xs[:, None]
    E = build_design(points, basis)
    return np.array(
        [evaluate(row, points, basis, weight, cond_limit=cond_limit, design=E)
         for row in xs]
    )


@dataclass(frozen=True)
class HypothesisReport:
    """Outcome of the structural checks behind the fitting method.

    ``constant_in_basis``   first basis function is identically 1 at the nodes
    ``basis_size_le_nodes`` basis dimension does not exceed the node count
    ``design_full_rank``    design matrix has full column rank
    ``weight_smooth``       weight family is smooth in x (None if no weight
                            was supplied); reported, but never gates a fit
    """

    constant_in_basis: bool
    basis_size_le_nodes: bool
    design_full_rank: bool
    rank: int
    weight_smooth: bool | None = None

    @property
    def ok(self) -> bool:
        """Gate used by fitting and diagnostics (smoothness is advisory)."""
        return (
            self.constant_in_basis
            and self.basis_size_le_nodes
            and self.design_full_rank
        )

    @property
    def failed_items(self) -> list[str]:
        out = []
        for name in ("constant_in_basis", "basis_size_le_nodes", "design_full_rank"):
            if not getattr(self, name):
                out.append(name)
        return out

    def to_dict(self) -> dict:
        return {
            "constant_in_basis": self.constant_in_basis,
            "basis_size_le_nodes": self.basis_size_le_nodes,
            "design_full_rank": self.design_full_rank,
            "rank": self.rank,
            "weight_smooth": self.weight_smooth,
            "ok": self.ok,
        }


def check_hypotheses(
    points: PointSet, basis: BasisSpec, weight: WeightSpec | None = None
) -> HypothesisReport:
    """Verify the structural requirements on (points, basis[, weight]).

    The weight argument only feeds the advisory smoothness flag; the three
    load-bearing checks are about the basis and the node geometry.
    """
    E = build_design(points, basis)
    m, l = E.shape
    constant_ok = bool(np.max(np.abs(E[:, 0] - 1.0)) <= 1e-12) if m else False
    svals = np.linalg.svd(E, compute_uv=False)
    rank = int(np.sum(svals > rank_tolerance(m, l, svals[0])))
    return HypothesisReport(
        constant_in_basis=constant_ok,
        basis_size_le_nodes=l <= m,
        design_full_rank=rank == l,
        rank=rank,
        weight_smooth=None if weight is None else weight.smooth,
    )
