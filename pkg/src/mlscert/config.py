"""Tolerance configuration shared by the certification checks."""

from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    """Numerical slacks used by the certified checks.

    All inequality checks are scale-aware: a check passes when
    ``lhs <= rhs + tol * scale`` with the scale documented per check.
    Setting a tolerance to 0 turns roundoff into reported failures, which is
    occasionally useful to see the raw residual floor.
    """

    lin: float = 1e-9          # linear-algebra identities (reproduction, unity)
    symmetry: float = 1e-10    # relative asymmetry of the scaled operators
    eig_dev: float = 1e-8      # eigenvalue distance from its cluster center
    psd: float = 1e-10         # PSD margin, relative to the scaling-matrix norm
    ineq: float = 1e-12        # single-product inequality slack, scaled
    norm_chain: float = 1e-10  # two-sided norm-chain slack, scaled
    idem: float = 1e-9         # projector idempotence residual
    bound: float = 1e-9        # growth-certificate slack, absolute
    cluster_fail: float = 0.5  # deviation that flags a structural failure

    def with_overrides(self, overrides: dict) -> "Tolerances":
        """Copy with ``key=value`` overrides; unknown keys raise."""
        valid = {f.name for f in fields(self)}
        bad = set(overrides) - valid
        if bad:
            raise ValueError(f"unknown tolerance keys: {sorted(bad)}")
        return replace(self, **{k: float(v) for k, v in overrides.items()})

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}
