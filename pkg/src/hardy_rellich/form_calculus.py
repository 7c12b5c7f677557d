"""Quadratic-form calculus checks on discretized energy forms.

The energy form ``E(u, v) = integral of c(r) r**(d-1) u'(r) v'(r)`` is
evaluated at fixed Gauss points per element.  Discrete functions are
piecewise linear in their node values, and products such as ``chi * phi`` or
``chi**2 * phi`` are formed exactly at the quadrature points (value and
derivative tracked together through the product rule), never re-sampled at
the nodes.  The truncation, locality and contraction identities below are
pointwise algebraic identities of the integrands, so evaluating both sides
under one quadrature rule makes equalities hold to float rounding and makes
inequalities inherit from their pointwise versions with positive weights.

Everything is batch-aware: node values of shape ``(batch, n)`` run all checks
for the whole batch in a few vectorized reductions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IdentityViolationError
from .quadrature import gauss_rule
from .radial_spectral import RadialGrid
from .weights import WeightParams, WeightProfile

__all__ = [
    "DiscreteForm",
    "DiscreteFunction",
    "Field",
    "truncated_form",
    "check_key_identity",
    "check_resolvent_bound",
    "check_locality_bounds",
    "check_leibniz_square",
    "normal_contraction_family",
    "condition_two_witness",
    "rellich_chain_witness",
    "random_batch",
    "run_identity_suite",
    "EQUALITY_TOL",
]

EQUALITY_TOL = 1e-10


@dataclass(frozen=True)
class DiscreteForm:
    """Grid, weight and measure densities sampled at per-element Gauss points."""

    profile: WeightProfile
    grid: RadialGrid
    order: int
    t_local: np.ndarray        # (order,) local coordinates in [0, 1]
    xq: np.ndarray             # (E, order) quadrature points
    wq: np.ndarray             # (E, order) quadrature weights
    measure_q: np.ndarray      # r**(d-1) at xq
    weight_q: np.ndarray       # c(r) r**(d-1) at xq

    @classmethod
    def build(cls, profile: WeightProfile, grid: RadialGrid, order: int = 10) -> "DiscreteForm":
        t, w = gauss_rule(order)
        a, b = grid.nodes[:-1], grid.nodes[1:]
        h = grid.spacings
        xq = a[:, None] + h[:, None] * t
        wq = h[:, None] * w
        d = profile.params.dim
        measure_q = np.exp((d - 1) * np.log(xq))
        weight_q = np.exp(profile.log_c(xq) + (d - 1) * np.log(xq))
        return cls(
            profile=profile,
            grid=grid,
            order=order,
            t_local=t,
            xq=xq,
            wq=wq,
            measure_q=measure_q,
            weight_q=weight_q,
        )


@dataclass(frozen=True)
class Field:
    """Values and radial derivatives on the quadrature points.

    Arithmetic tracks derivatives through the product and chain rules, so any
    polynomial (or smooth) expression in discrete functions is represented
    exactly at the quadrature points.
    """

    val: np.ndarray
    dval: np.ndarray

    def __mul__(self, other):
        if isinstance(other, Field):
            return Field(
                self.val * other.val,
                self.dval * other.val + self.val * other.dval,
            )
        return Field(self.val * other, self.dval * other)

    __rmul__ = __mul__

    def __add__(self, other):
        if isinstance(other, Field):
            return Field(self.val + other.val, self.dval + other.dval)
        return Field(self.val + other, self.dval)

    def __sub__(self, other):
        if isinstance(other, Field):
            return Field(self.val - other.val, self.dval - other.dval)
        return Field(self.val - other, self.dval)

    def square(self) -> "Field":
        return Field(self.val**2, 2.0 * self.val * self.dval)

    def apply(self, fn, dfn) -> "Field":
        return Field(fn(self.val), dfn(self.val) * self.dval)


@dataclass(frozen=True)
class DiscreteFunction:
    """Per-node values; piecewise linear between nodes.

    ``values`` has shape ``(n,)`` or ``(batch, n)``.  Functions standing in
    for compactly supported elements must vanish at both Dirichlet ends.
    """

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if not np.all(np.isfinite(self.values)):
            raise ValueError("node values must be finite")

    def field(self, form: DiscreteForm) -> Field:
        v = self.values
        va, vb = v[..., :-1, None], v[..., 1:, None]
        val = va * (1.0 - form.t_local) + vb * form.t_local
        slope = (vb - va) / form.grid.spacings[:, None]
        return Field(val, np.broadcast_to(slope, val.shape))


def _reduce(form: DiscreteForm, density: np.ndarray):
    return (form.wq * density).sum(axis=(-2, -1))


def energy(form: DiscreteForm, f: Field, g: Field = None):
    """E(f, g); the quadratic form when ``g`` is omitted."""
    g = f if g is None else g
    return _reduce(form, form.weight_q * f.dval * g.dval)


def l2_inner(form: DiscreteForm, f: Field, g: Field = None):
    g = f if g is None else g
    return _reduce(form, form.measure_q * f.val * g.val)


def truncated_form(form: DiscreteForm, xi: Field, phi: Field):
    """Localized form through its two equivalent evaluations.

    Returns ``(defining, carre)`` where ``defining = E(phi, xi*phi)
    - E(xi, phi**2)/2`` and ``carre`` integrates ``xi`` against the
    squared-gradient density of ``phi``.  The two agree identically for
    exact products; disagreement beyond 1e-10 of the gross term magnitude
    flags an assembly bug.
    """
    term_a = energy(form, phi, xi * phi)
    term_b = 0.5 * energy(form, xi, phi.square())
    defining = term_a - term_b
    carre = _reduce(form, form.weight_q * xi.val * phi.dval**2)
    # normalize by the magnitudes entering the cancellation, not the result
    gross = np.maximum(np.abs(term_a) + np.abs(term_b) + np.abs(carre), 1e-300)
    mismatch = np.abs(defining - carre) / gross
    if np.any(mismatch > 1e-10):
        raise IdentityViolationError(
            f"truncated-form evaluations disagree (max rel {np.max(mismatch):.3e})"
        )
    return defining, carre


def _rel_residual(lhs, rhs, gross) -> float:
    scale = np.maximum(np.maximum(np.abs(lhs), np.abs(rhs)), gross)
    scale = np.maximum(scale, 1e-300)
    return float(np.max(np.abs(lhs - rhs) / scale))


def check_key_identity(form: DiscreteForm, phi: Field, chi: Field) -> float:
    """Residual of ``E_{phi^2}(chi) = E(chi phi) - E(phi, chi^2 phi)``."""
    lhs, _ = truncated_form(form, phi.square(), chi)
    chi_phi = chi * phi
    term_a = energy(form, chi_phi)
    term_b = energy(form, phi, chi.square() * phi)
    rhs = term_a - term_b
    return _rel_residual(lhs, rhs, np.abs(term_a) + np.abs(term_b))


def _slack(*values, floor: float = 1.0) -> np.ndarray:
    scale = floor
    for v in values:
        scale = np.maximum(scale, np.abs(v))
    return 1e-12 * scale


def check_resolvent_bound(form: DiscreteForm, phi: Field, chi: Field, beta: float) -> bool:
    """``E_{phi^2}(chi (1 + beta chi)^-1) <= E_{(1+beta chi)^-2 phi^2}(chi)``.

    Requires ``chi >= 0``; both sides share the quadrature rule so the
    pointwise damping inequality transfers directly to the sums.
    """
    if beta < 0:
        raise ValueError("beta must be >= 0")
    if np.any(chi.val < 0):
        raise ValueError("chi must be nonnegative")
    damped = chi.apply(
        lambda u: u / (1.0 + beta * u),
        lambda u: (1.0 + beta * u) ** -2,
    )
    lhs, _ = truncated_form(form, phi.square(), damped)
    resolvent_sq = chi.apply(
        lambda u: (1.0 + beta * u) ** -2,
        lambda u: -2.0 * beta * (1.0 + beta * u) ** -3,
    )
    rhs, _ = truncated_form(form, resolvent_sq * phi.square(), chi)
    return bool(np.all(lhs <= rhs + _slack(lhs, rhs)))


def check_locality_bounds(
    form: DiscreteForm, phi: Field, chi: Field, psi: Field, delta: float
) -> bool:
    """Both product-splitting bounds with weight one and weight ``psi**2``."""
    if delta <= 0:
        raise ValueError("delta must be > 0")
    chi_phi = chi * phi
    first_lhs = energy(form, chi_phi)
    t1, _ = truncated_form(form, chi.square(), phi)
    t2, _ = truncated_form(form, phi.square(), chi)
    first_rhs = (1.0 + delta) * t1 + (1.0 + 1.0 / delta) * t2
    psi2 = psi.square()
    second_lhs, _ = truncated_form(form, psi2, chi_phi)
    s1, _ = truncated_form(form, psi2 * chi.square(), phi)
    s2, _ = truncated_form(form, psi2 * phi.square(), chi)
    second_rhs = (1.0 + delta) * s1 + (1.0 + 1.0 / delta) * s2
    ok_first = np.all(first_lhs <= first_rhs + _slack(first_lhs, first_rhs))
    ok_second = np.all(second_lhs <= second_rhs + _slack(second_lhs, second_rhs))
    return bool(ok_first and ok_second)


def check_leibniz_square(form: DiscreteForm, phi: Field, chi: Field) -> float:
    """Residual of ``E_{phi^2}(chi^2) = 4 E_{chi^2 phi^2}(chi)``."""
    lhs, lhs_carre = truncated_form(form, phi.square(), chi.square())
    rhs_tf, rhs_carre = truncated_form(form, chi.square() * phi.square(), chi)
    return _rel_residual(
        lhs, 4.0 * rhs_tf, np.abs(lhs_carre) + 4.0 * np.abs(rhs_carre)
    )


def normal_contraction_family(phi: DiscreteFunction, epsilon: float) -> DiscreteFunction:
    """Bounded approximant ``phi / sqrt(1 + eps * phi**2)``, applied nodewise.

    The map is a normal contraction, so node increments shrink and every
    assembled energy of the result is dominated by the original.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be > 0")
    v = phi.values
    return DiscreteFunction(v / np.sqrt(1.0 + epsilon * v * v))


def hardy_eta_field(form: DiscreteForm, a1: float) -> Field:
    """Hardy function of the form's profile as an exact analytic field."""
    return Field(
        np.asarray(form.profile.eta(a1, form.xq)),
        np.asarray(form.profile.eta_gradient(a1, form.xq)),
    )


def condition_two_witness(form: DiscreteForm, a1: float, nu: float, phi: Field):
    """Both sides of the commutator smallness bound for given ``phi``.

    Returns ``(lhs, rhs)`` with ``lhs = E_{phi^2}(eta)`` and
    ``rhs = (nu / a1) * (eta^2 phi, eta^2 phi)``; the bound ``lhs <= rhs``
    holds pointwise in the integrand because the logarithmic derivative ratio
    stays between the two exponents.
    """
    eta = hardy_eta_field(form, a1)
    lhs, _ = truncated_form(form, phi.square(), eta)
    eta4_phi2 = form.measure_q * eta.val**4 * phi.val**2
    rhs = (nu / a1) * _reduce(form, eta4_phi2)
    return lhs, rhs


def random_batch(rng, n: int, batch: int, clamp_ends: bool = True) -> np.ndarray:
    """Standard-normal node values, zeroed at the Dirichlet ends."""
    values = rng.standard_normal((batch, n))
    if clamp_ends:
        values[:, 0] = 0.0
        values[:, -1] = 0.0
    return values


def run_identity_suite(
    dims=(1, 3, 5),
    deltas=(0.0, 1.0, 2.0, 4.0),
    samples: int = 1000,
    seed: int = 0,
    nodes: int = 17,
    r_min: float = 1e-2,
    r_max: float = 1e2,
    order: int = 8,
) -> dict:
    """All five checks over every form family, with seeded random inputs.

    One family per ``(dim, delta, delta_prime)`` triple; each check runs on
    ``samples`` random discrete functions drawn from a per-family stream.
    The identities are grid-independent, so the suite uses a compact mesh.
    Returns max residuals for the equality checks and pass flags for the
    inequality checks.
    """
    grid = RadialGrid.log_spaced(r_min, r_max, nodes)
    worst = {
        "key_identity": 0.0,
        "leibniz_square": 0.0,
        "resolvent_bound": True,
        "locality_bounds": True,
        "normal_contraction": True,
    }
    families = 0
    epsilons = 10.0 ** -np.arange(0, 9)
    for dim in dims:
        for delta in deltas:
            for delta_prime in deltas:
                families += 1
                profile = WeightProfile(WeightParams(dim, delta, delta_prime))
                form = DiscreteForm.build(profile, grid, order=order)
                rng = np.random.default_rng(
                    [seed, dim, int(delta * 8), int(delta_prime * 8)]
                )
                phi = DiscreteFunction(random_batch(rng, nodes, samples)).field(form)
                chi_fun = DiscreteFunction(random_batch(rng, nodes, samples, clamp_ends=False))
                chi = chi_fun.field(form)
                psi = DiscreteFunction(
                    random_batch(rng, nodes, samples, clamp_ends=False)
                ).field(form)
                chi_pos = DiscreteFunction(np.abs(chi_fun.values)).field(form)

                worst["key_identity"] = max(
                    worst["key_identity"], check_key_identity(form, phi, chi)
                )
                worst["leibniz_square"] = max(
                    worst["leibniz_square"], check_leibniz_square(form, phi, chi)
                )
                for beta in (0.0, 1.0, 1e3):
                    worst["resolvent_bound"] &= check_resolvent_bound(
                        form, phi, chi_pos, beta
                    )
                for delta_split in (0.25, 1.0, 4.0):
                    worst["locality_bounds"] &= check_locality_bounds(
                        form, phi, chi, psi, delta_split
                    )

                # contraction sweep, epsilon stacked into a leading batch axis
                base = DiscreteFunction(random_batch(rng, nodes, samples))
                base_f = base.field(form)
                e_base = energy(form, base_f)
                n_base = l2_inner(form, base_f)
                stacked = DiscreteFunction(
                    base.values / np.sqrt(1.0 + epsilons[:, None, None] * base.values**2)
                )
                cf = stacked.field(form)
                gaps = energy(form, Field(base_f.val - cf.val, base_f.dval - cf.dval))
                ok = bool(np.all(energy(form, cf) <= e_base * (1 + 1e-12) + 1e-300))
                ok &= bool(np.all(l2_inner(form, cf) <= n_base * (1 + 1e-12) + 1e-300))
                ok &= bool(np.all(gaps[1:] <= gaps[:-1] * (1 + 1e-12) + 1e-300))
                ok &= bool(np.all(gaps[-1] <= 1e-6 * e_base))
                worst["normal_contraction"] &= ok
    worst["families"] = families
    worst["samples"] = samples
    return worst


def rellich_chain_witness(forms, a1: float, gamma: float, phi_values: np.ndarray):
    """Discrete version of the pairing chain that squares Hardy into Rellich.

    Uses the flux strong operator and lumped-mass norms from ``forms``.
    Returns ``(lhs, rhs)`` where ``lhs = ||H phi|| * ||eta^2 phi||`` and
    ``rhs = (1 - gamma) * ||eta^2 phi||**2``; the continuum chain gives
    ``lhs >= rhs`` and the discrete one reproduces it up to a mesh-size
    wobble of relative order ``h_log**2``.
    """
    r = forms.interior_nodes
    profile = forms.profile
    eta2 = np.asarray(profile.eta(a1, r)) ** 2
    phi = np.atleast_2d(np.asarray(phi_values, dtype=float))
    d_mass = forms.lumped_mass
    flux = forms.flux_coefficients
    f_diag = flux[:-1] + flux[1:]
    f_off = -flux[1:-1]

    def strong_apply(v):
        out = f_diag * v
        out[..., :-1] += f_off * v[..., 1:]
        out[..., 1:] += f_off * v[..., :-1]
        return out / d_mass

    h_phi = strong_apply(phi)
    norm_h = np.sqrt(((h_phi**2) * d_mass).sum(axis=-1))
    eta2_phi = eta2 * phi
    norm_e = np.sqrt(((eta2_phi**2) * d_mass).sum(axis=-1))
    lhs = norm_h * norm_e
    rhs = (1.0 - gamma) * norm_e**2
    return lhs, rhs
