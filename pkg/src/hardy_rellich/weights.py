"""Two-exponent radial weight family and derived pointwise quantities.

The weight ``c(s) = s**delta * (1+s)**(delta_prime-delta)`` interpolates
between a power law of exponent ``delta`` near ``s = 0`` and exponent
``delta_prime`` at infinity.  Everything downstream (closed-form constants,
assembled forms, trial functions) is driven by this family, its logarithmic
derivative ratio ``s c'(s)/c(s)`` and the squared-gradient density of the
Hardy function ``eta = sqrt(a1 * c(r)) / r``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["WeightParams", "WeightProfile"]


def _as_positive(s, name: str):
    arr = np.asarray(s, dtype=float)
    if arr.size and (not np.all(np.isfinite(arr)) or np.any(arr <= 0.0)):
        raise ValueError(f"{name} must be positive and finite")
    return arr


@dataclass(frozen=True)
class WeightParams:
    """Dimension and boundary/infinity exponents defining the weight.

    Parameters
    ----------
    dim : int
        Spatial dimension ``d`` (first-factor dimension for product-type
        operators).  Must be >= 1.
    delta : float
        Exponent controlling growth of ``c`` near the boundary; >= 0.
    delta_prime : float
        Exponent controlling growth at infinity; >= 0.
    """

    dim: int
    delta: float
    delta_prime: float

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be an integer >= 1, got {self.dim}")
        for name in ("delta", "delta_prime"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {value}")

    @property
    def delta_min(self) -> float:
        return min(self.delta, self.delta_prime)

    @property
    def delta_max(self) -> float:
        return max(self.delta, self.delta_prime)


@dataclass(frozen=True)
class WeightProfile:
    """Pure evaluation helpers for one parameter set; no caching, no state."""

    params: WeightParams

    def log_c(self, s):
        """log c(s), from exact log-space arithmetic; safe for s near 1e+-300."""
        p = self.params
        s = _as_positive(s, "s")
        if p.delta == p.delta_prime:
            # exact special case c(s) = s**delta; avoids 0 * log(1+s)
            return p.delta * np.log(s)
        return p.delta * np.log(s) + (p.delta_prime - p.delta) * np.log1p(s)

    def c(self, s):
        """Weight value c(s) = s**delta (1+s)**(delta_prime-delta)."""
        p = self.params
        with np.errstate(over="ignore"):  # overflow is reported as an error below
            if p.delta == p.delta_prime:
                out = _as_positive(s, "s") ** p.delta  # exact pure power
            else:
                out = np.exp(self.log_c(s))
        if not np.all(np.isfinite(out)):
            raise OverflowError("weight evaluation overflowed float range")
        return out if np.ndim(s) else float(out)

    def log_derivative_ratio(self, s):
        """s c'(s)/c(s), which equals (delta + delta_prime*s)/(1+s) exactly."""
        p = self.params
        s = _as_positive(s, "s")
        out = (p.delta + p.delta_prime * s) / (1.0 + s)
        return out if np.ndim(s) else float(out)

    def gamma_eta(self, a1: float, r):
        """Squared-gradient density of the Hardy function, c(r)*eta'(r)**2.

        For eta**2 = a1 * c(r) / r**2 this equals
        ``a1 * c(r)**2 * r**-4 * (1 - rho(r)/2)**2`` with
        ``rho = log_derivative_ratio``.  It is bounded by ``(nu/a1) * eta**4``
        because ``rho`` stays between the two exponents.
        """
        if not (a1 > 0):
            raise ValueError(f"a1 must be positive, got {a1}")
        r = _as_positive(r, "r")
        rho = self.log_derivative_ratio(r)
        out = a1 * np.exp(2.0 * (self.log_c(r) - 2.0 * np.log(r))) * (1.0 - rho / 2.0) ** 2
        return out if np.ndim(r) else float(out)

    def eta(self, a1: float, r):
        """Hardy function eta(r) = sqrt(a1 * c(r)) / r."""
        if not (a1 > 0):
            raise ValueError(f"a1 must be positive, got {a1}")
        r = _as_positive(r, "r")
        out = math.sqrt(a1) * np.exp(0.5 * self.log_c(r) - np.log(r))
        return out if np.ndim(r) else float(out)

    def eta_gradient(self, a1: float, r):
        """eta'(r) = -(eta(r)/r) * (1 - rho(r)/2), exact chain rule."""
        r = _as_positive(r, "r")
        rho = self.log_derivative_ratio(r)
        out = -self.eta(a1, r) / r * (1.0 - rho / 2.0)
        return out if np.ndim(r) else float(out)
