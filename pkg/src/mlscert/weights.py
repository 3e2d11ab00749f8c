"""Distance weights for the local least-squares fit.

The fit at x minimizes  sum_i W(r_i) (p(x_i) - f_i)^2  with r_i = ||x - x_i||.
Internally everything is phrased through the reciprocal weight w = 1/W, which
is what enters the diagonal scaling matrix of the solver: small w means the
node is trusted, and w(0) = 0 (i.e. W blowing up at the node) makes the fit
interpolate there.

Built-in families, each driven by a single shape parameter alpha > 0:

========  ===========================  ====================
family    w(r)                         behaviour at r = 0
========  ===========================  ====================
exp       exp(alpha * r^2)             w(0) = 1   (smoothing)
shepard   r ** (alpha^2)               w(0) = 0   (interpolating)
mclain    r^2 * exp(-alpha^2 * r^2)    w(0) = 0   (interpolating)
levin     exp(alpha^2 * r^2) - 1       w(0) = 0   (interpolating)
========  ===========================  ====================

The exp family is the only one used by the 1-D growth-bound machinery; the
others are offered for fitting and for exercising the interpolation limit.
"""

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

FAMILIES = ("exp", "shepard", "mclain", "levin", "custom")

# families whose w is a smooth function of x everywhere (shepard's fractional
# power is generally not differentiable at the node)
_SMOOTH = {"exp": True, "shepard": False, "mclain": True, "levin": True}


@dataclass(frozen=True)
class WeightSpec:
    """Weight-family selector.

    Parameters
    ----------
    family : str
        One of :data:`FAMILIES`.
    alpha : float
        Shape parameter, must be positive.
    custom_w : callable, optional
        For ``family="custom"``: vectorized map r -> w(r) with w(r) > 0 for
        r > 0.
    custom_interpolating : bool
        For ``family="custom"``: declare that w(0) = 0.
    custom_smooth : bool
        For ``family="custom"``: declare w smooth in x.
    """

    family: str
    alpha: float = 1.0
    custom_w: Callable | None = field(default=None, compare=False)
    custom_interpolating: bool = False
    custom_smooth: bool = False

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown weight family {self.family!r}")
        if not (self.alpha > 0):
            raise ValueError("alpha must be positive")
        if self.family == "custom" and self.custom_w is None:
            raise ValueError("custom family requires custom_w")

    @property
    def interpolating(self) -> bool:
        """True when w(0) = 0, so the fit reproduces node values exactly."""
        if self.family == "custom":
            return self.custom_interpolating
        return self.family != "exp"

    @property
    def smooth(self) -> bool:
        if self.family == "custom":
            return self.custom_smooth
        return _SMOOTH[self.family]

    def w(self, r):
        """Reciprocal weight w(r) = 1/W(r) for distances r >= 0.

        Accepts scalars or arrays; negative distances raise ``ValueError``.
        Overflow to +inf is deliberate: w = inf models a node whose penalty
        weight W = 1/w is exactly zero, i.e. a node with no influence, and
        the solver handles that limit exactly (its coefficient comes out 0).
        """
        arr = np.asarray(r, dtype=float)
        if np.any(arr < 0):
            raise ValueError("distance must be nonnegative")
        a = self.alpha
        with np.errstate(over="ignore"):
            if self.family == "exp":
                out = np.exp(a * arr**2)
            elif self.family == "shepard":
                out = arr ** (a * a)
            elif self.family == "mclain":
                out = arr**2 * np.exp(-(a * a) * arr**2)
            elif self.family == "levin":
                out = np.expm1((a * a) * arr**2)
            else:
                out = np.asarray(self.custom_w(arr), dtype=float)
                if np.any(out < 0):
                    raise ValueError("custom_w returned a negative weight")
        return out if np.ndim(r) else float(out)

    def W(self, r):
        """Penalty weight W(r) = 1/w(r); +inf where w vanishes."""
        wv = np.asarray(self.w(r), dtype=float)
        with np.errstate(divide="ignore"):
            out = np.where(wv > 0, 1.0 / np.where(wv > 0, wv, 1.0), math.inf)
        return out if np.ndim(r) else float(out)

    def to_dict(self) -> dict:
        if self.family == "custom":
            raise ValueError("custom weight families are not serializable")
        return {"family": self.family, "alpha": float(self.alpha)}

    @classmethod
    def from_dict(cls, d: dict) -> "WeightSpec":
        try:
            family = d["family"]
        except KeyError:
            raise ValueError("weight config requires a 'family' key") from None
        if family == "custom":
            raise ValueError("custom weight families cannot be configured from JSON")
        return cls(family=family, alpha=float(d.get("alpha", 1.0)))
