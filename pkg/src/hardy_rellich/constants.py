"""Closed-form constant ledger for the weighted Hardy and Rellich inequalities.

All arithmetic is carried out in exact rationals (``fractions.Fraction``);
float inputs are converted through their exact binary expansion, so dyadic
parameters like 0.5 stay exact and formula identities can be asserted with
zero tolerance.

For dimension ``d`` and exponents ``delta, delta_prime`` the ledger holds

* ``a1``: the Hardy constant ``(d + min(delta, delta_prime) - 2)**2 / 4``,
  valid only when the base ``d + min - 2`` is strictly positive,
* ``nu``: the supremum of ``|1 - t/2|**2`` over ``t`` between the two
  exponents; the function is convex so the supremum sits at an endpoint,
* ``gamma = nu / a1``: the smallness parameter whose strict bound
  ``gamma < 1`` upgrades Hardy to Rellich,
* ``a2 = (a1 - nu)**2``: the Rellich constant, which collapses to
  ``d**2 (d + 2 min - 4)**2 / 16`` when ``delta + delta_prime <= 4`` and to
  ``(d - |delta - delta_prime|)**2 (d + delta + delta_prime - 4)**2 / 16``
  when ``delta + delta_prime >= 4``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .weights import WeightParams

__all__ = [
    "Regime",
    "ConstantLedger",
    "hardy_constant",
    "nu_constant",
    "rellich_constant",
    "regime_formula_a2",
    "regime_gap",
    "grushin_constants",
]


class Regime(enum.Enum):
    SUM_AT_MOST_4 = "sum_at_most_4"
    SUM_AT_LEAST_4 = "sum_at_least_4"


def _frac(x) -> Fraction:
    # Fraction(float) is the exact binary value, so dyadic inputs stay exact.
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class ConstantLedger:
    """Exact constants and validity flags for one parameter set."""

    params: WeightParams
    a1: Optional[Fraction]
    nu: Fraction
    gamma: Optional[Fraction]
    a2: Optional[Fraction]
    regime: Regime
    hardy_valid: bool
    rellich_valid: bool
    grushin: bool = False

    @property
    def sigma(self) -> Optional[Fraction]:
        """(1 - gamma)**2, equal to a2 / a1**2 whenever Rellich is valid."""
        if not self.rellich_valid:
            return None
        return (1 - self.gamma) ** 2

    def as_floats(self) -> dict:
        def f(x):
            return None if x is None else float(x)

        return {
            "a1": f(self.a1),
            "nu": f(self.nu),
            "gamma": float("inf") if self.gamma is None else float(self.gamma),
            "a2": f(self.a2),
            "regime": self.regime.value,
            "hardy_valid": self.hardy_valid,
            "rellich_valid": self.rellich_valid,
            "grushin": self.grushin,
        }


def hardy_constant(params: WeightParams) -> Optional[Fraction]:
    """Hardy constant, or None when the strict positivity condition fails."""
    base = params.dim + min(_frac(params.delta), _frac(params.delta_prime)) - 2
    if base <= 0:
        return None
    return base * base / 4


def nu_constant(params: WeightParams) -> Fraction:
    """sup of |1 - t/2|**2 over the closed exponent interval.

    The integrand is convex in t, so only the endpoints matter; no sampling.
    """
    lo, hi = _frac(params.delta), _frac(params.delta_prime)
    return max((1 - lo / 2) ** 2, (1 - hi / 2) ** 2)


def regime_formula_a2(params: WeightParams) -> Fraction:
    """Regime-dependent closed form for the Rellich constant."""
    d = Fraction(params.dim)
    lo, hi = sorted((_frac(params.delta), _frac(params.delta_prime)))
    if lo + hi <= 4:
        return d * d * (d + 2 * lo - 4) ** 2 / 16
    return (d - (hi - lo)) ** 2 * (d + lo + hi - 4) ** 2 / 16


def regime_gap(params: WeightParams) -> Fraction:
    """Difference of the two regime products minus its closed form.

    ``d (d + 2 min - 4) - (d - |delta - delta'|) (d + delta + delta' - 4)``
    equals ``|delta - delta'| (delta + delta' - 4)`` identically; the return
    value is left-minus-right and must be exactly zero.
    """
    d = Fraction(params.dim)
    lo, hi = sorted((_frac(params.delta), _frac(params.delta_prime)))
    left = d * (d + 2 * lo - 4) - (d - (hi - lo)) * (d + lo + hi - 4)
    right = (hi - lo) * (lo + hi - 4)
    return left - right


def rellich_constant(params: WeightParams) -> ConstantLedger:
    """Full ledger: a1, nu, gamma, a2, regime and validity flags.

    Rellich validity requires the Hardy constant to exist and ``nu < a1``
    strictly; the boundary case ``nu == a1`` is reported as invalid.  When
    valid, ``(a1 - nu)**2`` is checked against the regime closed form in
    exact arithmetic.
    """
    a1 = hardy_constant(params)
    nu = nu_constant(params)
    lo, hi = sorted((_frac(params.delta), _frac(params.delta_prime)))
    regime = Regime.SUM_AT_MOST_4 if lo + hi <= 4 else Regime.SUM_AT_LEAST_4

    hardy_valid = a1 is not None
    gamma = None if a1 is None else nu / a1
    rellich_valid = hardy_valid and nu < a1
    a2 = None
    if rellich_valid:
        a2 = (a1 - nu) ** 2
        expected = regime_formula_a2(params)
        if a2 != expected:  # algebraic identity; a mismatch is a bug
            raise AssertionError(
                f"(a1-nu)^2 = {a2} disagrees with regime formula {expected}"
            )
    return ConstantLedger(
        params=params,
        a1=a1,
        nu=nu,
        gamma=gamma,
        a2=a2,
        regime=regime,
        hardy_valid=hardy_valid,
        rellich_valid=rellich_valid,
    )


def grushin_constants(params: WeightParams) -> ConstantLedger:
    """Ledger for the product-type operator; ``params.dim`` is d1.

    The second-factor dimension never enters: the constants coincide with the
    punctured-space ledger at dimension d1.
    """
    base = rellich_constant(params)
    return ConstantLedger(
        params=base.params,
        a1=base.a1,
        nu=base.nu,
        gamma=base.gamma,
        a2=base.a2,
        regime=base.regime,
        hardy_valid=base.hardy_valid,
        rellich_valid=base.rellich_valid,
        grushin=True,
    )
