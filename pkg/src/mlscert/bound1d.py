"""Growth certificate for the coefficient vector in one dimension.

With exponential weights w(r) = exp(alpha r^2) on an increasing 1-D node set,
the coefficient vector a(x) is differentiable and obeys a linear ODE whose
ingredients are all computable: the weight diagonal satisfies D' = H D with
H = diag(2 alpha (x - x_i)), and

    a'(x) = (P - I) H a(x) + A0 c'(x)

where P is the oblique projector of the fit, A0 the coefficient map and c the
basis column.  Bounding the two right-hand-side factors uniformly on
[x_1, x_m] and applying a Gronwall-type comparison yields the certified
envelope

    ||a(x)|| <= (||a(x_k0)|| + M1 |x - x_k0|) * exp(M2 |x - x_k0|)

anchored at the node nearest to x.  This module builds the ingredients,
computes the constants in both conventions, and checks the envelope (plus
the pointwise majorants it rests on) over a grid.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .bases import BasisSpec
from .config import Tolerances
from .core import (
    COND_LIMIT,
    HypothesisFailure,
    MlsSystem,
    build_design,
    build_system,
    check_hypotheses,
)
from .points import PointSet
from .spectral import OperatorBundle, build_operators
from .weights import WeightSpec

__all__ = [
    "BoundConstants",
    "BoundCertificate",
    "dlogw_diag",
    "weight_derivative_residual",
    "ode_rhs",
    "coefficient_derivative",
    "monomial_diff_matrix",
    "check_hypotheses_1d",
    "bound_constants",
    "nearest_node",
    "uniform_grid",
    "certify_bound",
]

#: grid resolution used to estimate sup ||c'|| (inflated by 1% afterwards)
SLOPE_GRID = 10001
SLOPE_INFLATION = 1.01

#: log of the largest finite double; envelopes are clipped here
_MAX_LOG = math.log(np.finfo(float).max)


def _require_1d(points: PointSet) -> np.ndarray:
    if points.dim != 1:
        raise ValueError("this module requires 1-D nodes")
    return points.nodes[:, 0]


def dlogw_diag(x: float, points: PointSet, alpha: float) -> np.ndarray:
    """Diagonal of the logarithmic derivative of the weight matrix.

    Entry i is 2 * alpha * (x - x_i); the weight diagonal satisfies
    D'(x) = diag(out) @ D(x) for the exponential family.
    """
    xs = _require_1d(points)
    return 2.0 * alpha * (float(x) - xs)


def weight_derivative_residual(
    x: float, points: PointSet, alpha: float, h_fd: float = 1e-5
) -> dict:
    """Central-difference check of D' = H D for the exponential family.

    Returns the max relative residual (normalized by the largest analytic
    entry) plus a cancellation warning when halving the step makes the
    residual worse instead of better.
    """
    xs = _require_1d(points)
    if h_fd <= 0:
        raise ValueError("h_fd must be positive")

    def dvec(at):
        return 2.0 * np.exp(alpha * (at - xs) ** 2)

    def residual(h):
        fd = (dvec(x + h) - dvec(x - h)) / (2.0 * h)
        analytic = dlogw_diag(x, points, alpha) * dvec(x)
        scale = float(np.max(np.abs(analytic)))
        if scale == 0.0:  # alpha -> 0 limit: both sides vanish
            return float(np.max(np.abs(fd)))
        return float(np.max(np.abs(fd - analytic)) / scale)

    res = residual(h_fd)
    res_coarse = residual(2.0 * h_fd)
    return {
        "residual": res,
        "residual_2h": res_coarse,
        "step_warning": bool(res > res_coarse),
        "h_fd": float(h_fd),
    }


def ode_rhs(
    system: MlsSystem,
    bundle: OperatorBundle,
    points: PointSet,
    basis: BasisSpec,
    alpha: float,
) -> np.ndarray:
    """Right-hand side of the coefficient ODE at the system's point.

    Returns (P - I) H a + A0 c'; the basis must provide derivatives (monomial
    bases do).
    """
    x = float(system.x[0])
    hdiag = dlogw_diag(x, points, alpha)
    dc = basis.derivative_at(x)
    return bundle.comp @ (hdiag * system.coeffs) + bundle.coef_map @ dc


def coefficient_derivative(
    x: float, points: PointSet, basis: BasisSpec, weight: WeightSpec
) -> np.ndarray:
    """Assemble the system at x and evaluate the coefficient ODE's rhs."""
    if weight.family != "exp":
        raise HypothesisFailure(["exp_weight_family"])
    system = build_system(x, points, basis, weight)
    bundle = build_operators(system)
    return ode_rhs(system, bundle, points, basis, weight.alpha)


def monomial_diff_matrix(l: int) -> np.ndarray:
    """Matrix realizing d/dx on the monomial basis column.

    Subdiagonal entries (i+1, i) = i for i = 1..l-1, so that
    mat @ (1, x, ..., x^{l-1})^T = (0, 1, 2x, ..., (l-1) x^{l-2})^T.
    Its singular values are exactly 0, 1, ..., l-1.
    """
    if l < 1:
        raise ValueError("l must be >= 1")
    mat = np.zeros((l, l))
    for i in range(1, l):
        mat[i, i - 1] = float(i)
    return mat


def check_hypotheses_1d(
    points: PointSet, basis: BasisSpec, weight: WeightSpec
) -> list[str]:
    """Structural requirements of the growth bound; returns failed items."""
    failed = []
    if points.dim != 1:
        failed.append("dimension_one")
    else:
        if not points.is_increasing():
            failed.append("nodes_increasing")
    base = check_hypotheses(points, basis, weight)
    failed.extend(base.failed_items)
    if basis.derivative is None:
        failed.append("basis_derivative_available")
    if weight.family != "exp":
        failed.append("exp_weight_family")
    return failed


@dataclass(frozen=True)
class BoundConstants:
    """Uniform constants of the growth envelope on [x_1, x_m].

    ``growth_rate``    M2: bound on ||(P - I) H||
    ``coef_norm_bound``M11: bound on ||A0||
    ``slope_sup``      raw dense-grid sup of ||c'|| (no inflation)
    ``slope_bound``    M12: slope_sup inflated by 1%
    ``forcing_bound``  M1 = M11 * M12: bound on ||A0 c'||
    """

    span: float
    alpha: float
    sigma_min_design_t: float
    growth_rate: float
    coef_norm_bound: float
    slope_sup: float
    slope_bound: float
    forcing_bound: float
    convention: str
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "span": self.span,
            "alpha": self.alpha,
            "sigma_min_design_t": self.sigma_min_design_t,
            "growth_rate": self.growth_rate,
            "coef_norm_bound": self.coef_norm_bound,
            "slope_sup": self.slope_sup,
            "slope_bound": self.slope_bound,
            "forcing_bound": self.forcing_bound,
            "convention": self.convention,
            "metadata": self.metadata,
        }


def bound_constants(
    points: PointSet,
    basis: BasisSpec,
    alpha: float,
    convention: str = "standard",
) -> BoundConstants:
    """Compute the envelope constants on [x_1, x_m].

    convention="standard" uses the spectral-norm chain
    ||P|| <= smax(D)/smin(D) <= exp(alpha r^2), giving
    M2 = 2 alpha r (1 + exp(alpha r^2)) and M11 = exp(alpha r^2)/smin(E^T);
    convention="paper" uses the square-root variants of the same two bounds.
    The forcing bound multiplies M11 by the inflated dense-grid sup of
    ||c'|| per the 1% rule.
    """
    if convention not in ("standard", "paper"):
        raise ValueError("convention must be 'standard' or 'paper'")
    xs = _require_1d(points)
    if points.m < 2:
        raise ValueError("need at least two nodes for a nondegenerate span")
    if not points.is_increasing():
        raise HypothesisFailure(["nodes_increasing"])
    if basis.derivative is None:
        raise HypothesisFailure(["basis_derivative_available"])
    r = float(xs[-1] - xs[0])
    design = build_design(points, basis)
    smin_design = float(np.linalg.svd(design, compute_uv=False)[-1])

    grid = np.linspace(xs[0], xs[-1], SLOPE_GRID)
    slope_sup = max(
        float(np.linalg.norm(basis.derivative_at(g))) for g in grid
    )
    slope_bound = SLOPE_INFLATION * slope_sup

    growth = math.exp(alpha * r * r)
    if convention == "standard":
        m2 = 2.0 * alpha * r * (1.0 + growth)
        m11 = growth / smin_design
    else:
        m2 = 2.0 * alpha * r * (1.0 + math.sqrt(growth))
        m11 = math.sqrt(growth) / smin_design

    meta = {
        "m2_paper": 2.0 * alpha * r * (1.0 + math.sqrt(growth)),
        "m11_paper": math.sqrt(growth) / smin_design,
        "m2_standard": 2.0 * alpha * r * (1.0 + growth),
        "m11_standard": growth / smin_design,
    }
    if basis.kind == "monomial":
        l = basis.size
        dbar = monomial_diff_matrix(l)
        svals = np.linalg.svd(dbar, compute_uv=False)
        maxp = float(np.max(np.abs(basis.eval_at(xs[-1]))))
        meta.update(
            {
                "diff_matrix_smax": float(svals[0]),
                "diff_matrix_norm_sqrt_claim": math.sqrt(max(l - 1, 0)),
                "slope_closed_form_paper": math.sqrt(max(l - 1, 0)) * maxp,
                "slope_closed_form_applicable": bool(abs(xs[0]) <= abs(xs[-1])),
            }
        )

    return BoundConstants(
        span=r,
        alpha=float(alpha),
        sigma_min_design_t=smin_design,
        growth_rate=float(m2),
        coef_norm_bound=float(m11),
        slope_sup=float(slope_sup),
        slope_bound=float(slope_bound),
        forcing_bound=float(m11 * slope_bound),
        convention=convention,
        metadata=meta,
    )


def nearest_node(x: float, points: PointSet) -> int:
    """Index of the node closest to x; ties go to the smaller index."""
    return int(np.argmin(points.distances(np.atleast_1d(float(x)))))


def uniform_grid(points: PointSet, n: int, weight: WeightSpec | None = None) -> np.ndarray:
    """Uniform 1-D evaluation grid spanning the nodes.

    For interpolating weight families, grid points landing on a node (within
    1e-12) are nudged by +1e-9 * span so the scaled operators stay defined.
    """
    xs = _require_1d(points)
    grid = np.linspace(xs.min(), xs.max(), n)
    if weight is not None and weight.interpolating:
        r = float(xs.max() - xs.min()) or 1.0
        for i, g in enumerate(grid):
            if np.min(np.abs(xs - g)) < 1e-12:
                grid[i] = g + 1e-9 * r
    return grid


@dataclass(frozen=True)
class BoundCertificate:
    """Grid evaluation of the growth envelope.

    ``passed`` means every grid point satisfies lhs <= rhs within the
    absolute slack tolerance AND the pointwise majorants behind the Gronwall
    argument held on the same grid.
    """

    constants: BoundConstants
    xs: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    k0: np.ndarray
    slack: np.ndarray
    majorants: dict
    tolerances: Tolerances
    metadata: dict = field(default_factory=dict)

    @property
    def envelope_ok(self) -> bool:
        return bool(np.min(self.slack) >= -self.tolerances.bound)

    @property
    def passed(self) -> bool:
        return self.envelope_ok and bool(self.majorants["pass"])

    def to_dict(self) -> dict:
        pts = [
            [float(x), float(l), float(r), int(k), float(s)]
            for x, l, r, k, s in zip(self.xs, self.lhs, self.rhs, self.k0, self.slack)
        ]
        return {
            "constants": self.constants.to_dict(),
            "points": pts,
            "min_slack": float(np.min(self.slack)),
            "majorants": self.majorants,
            "pass": self.passed,
            "tolerances": self.tolerances.to_dict(),
            "metadata": self.metadata,
        }

    def rows_csv(self) -> list[tuple]:
        """Plot-ready rows (x, lhs, rhs, slack)."""
        return [
            (float(x), float(l), float(r), float(s))
            for x, l, r, s in zip(self.xs, self.lhs, self.rhs, self.slack)
        ]


def certify_bound(
    points: PointSet,
    basis: BasisSpec,
    weight: WeightSpec,
    grid=None,
    n_grid: int = 200,
    convention: str = "standard",
    tol: Tolerances = Tolerances(),
    cond_limit: float = COND_LIMIT,
) -> BoundCertificate:
    """Evaluate the growth envelope over a grid and check its majorants.

    Raises ``HypothesisFailure`` listing the failed structural items when the
    instance is outside the certified setting (needs d = 1, increasing nodes,
    the exponential weight family, and a differentiable basis).
    """
    failed = check_hypotheses_1d(points, basis, weight)
    if failed:
        raise HypothesisFailure(failed)
    xs_nodes = points.nodes[:, 0]
    alpha = weight.alpha
    consts = bound_constants(points, basis, alpha, convention)
    if grid is None:
        grid = uniform_grid(points, n_grid, weight)
    grid = np.asarray(grid, dtype=float).ravel()
    if grid.size == 0:
        raise ValueError("empty evaluation grid")
    if grid.min() < xs_nodes[0] - 1e-12 or grid.max() > xs_nodes[-1] + 1e-12:
        raise ValueError("grid must lie within [x_1, x_m]")

    design = build_design(points, basis)
    # anchor norms ||a(x_k)|| at every node (exp weights: nodes are regular
    # points of the solve)
    anchor_norm = np.empty(points.m)
    for k in range(points.m):
        sys_k = build_system(
            xs_nodes[k], points, basis, weight,
            cond_limit=cond_limit, design=design,
        )
        anchor_norm[k] = np.linalg.norm(sys_k.coeffs)

    m1 = consts.forcing_bound
    m2 = consts.growth_rate
    lhs = np.empty(grid.size)
    rhs = np.empty(grid.size)
    k0s = np.empty(grid.size, dtype=int)
    max_comp_h = 0.0
    max_forcing = 0.0
    for j, x in enumerate(grid):
        sys_x = build_system(
            x, points, basis, weight, cond_limit=cond_limit, design=design
        )
        bundle = build_operators(sys_x)
        k0 = nearest_node(x, points)
        k0s[j] = k0
        dist = float(abs(x - xs_nodes[k0]))
        lhs[j] = np.linalg.norm(sys_x.coeffs)
        # evaluate the envelope in log space and clip at the largest finite
        # double: clipping only ever lowers the right-hand side, so a pass
        # stays a valid certificate
        base = float(anchor_norm[k0]) + m1 * dist
        if base > 0.0:
            log_env = math.log(base) + m2 * dist
            rhs[j] = math.exp(min(log_env, _MAX_LOG))
        else:
            rhs[j] = 0.0
        hdiag = dlogw_diag(x, points, alpha)
        comp_h = np.linalg.norm(bundle.comp * hdiag[None, :], 2)
        forcing = float(np.linalg.norm(bundle.coef_map @ basis.derivative_at(x)))
        max_comp_h = max(max_comp_h, float(comp_h))
        max_forcing = max(max_forcing, forcing)

    slack = rhs - lhs
    majorants = {
        "max_comp_h": max_comp_h,
        "growth_rate": m2,
        "comp_h_margin": m2 - max_comp_h,
        "max_forcing": max_forcing,
        "forcing_bound": m1,
        "forcing_margin": m1 - max_forcing,
        "pass": bool(max_comp_h <= m2 + tol.bound and max_forcing <= m1 + tol.bound),
    }
    return BoundCertificate(
        constants=consts,
        xs=grid,
        lhs=lhs,
        rhs=rhs,
        k0=k0s,
        slack=slack,
        majorants=majorants,
        tolerances=tol,
        metadata={"convention": convention, "n_grid": int(grid.size)},
    )
