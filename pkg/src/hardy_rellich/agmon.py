"""Log-ratio metric, completeness probes and cutoff sequences.

On the punctured radial domain the metric with line element ``dl / r`` is
just the log-ratio distance ``|log(r2/r1)|``, and the distance from any point
to an inner shell diverges as the shell shrinks: the domain is complete in
this metric even though it is not in the Euclidean one.  That completeness
is what permits cutoff functions ``rho_n`` that climb from 0 to 1 across a
fixed metric width ``m`` while their gradient obeys the eikonal-type bound
``r**2 |rho_n'|**2 <= m**-2``, so their localized energies against any fixed
square-integrable density decay to zero as the shells exhaust the domain.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .form_calculus import DiscreteForm, DiscreteFunction, Field, energy, l2_inner
from .radial_spectral import RadialGrid

__all__ = [
    "d2_distance",
    "completeness_probe",
    "AgmonMetric",
    "CutoffSequence",
    "build_cutoffs",
    "eikonal_max",
    "energy_decay",
    "graph_norm_gap",
    "tapered_power_values",
]


def d2_distance(r1, r2):
    """Metric distance ``|log(r2 / r1)|``; symmetric, exact triangle law."""
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    if np.any(r1 <= 0) or np.any(r2 <= 0):
        raise ValueError("radii must be positive")
    # canonical ratio order keeps symmetry bitwise exact
    out = np.log(np.maximum(r1, r2) / np.minimum(r1, r2))
    return out if out.ndim else float(out)


def completeness_probe(r: float, shells: Sequence[float]) -> np.ndarray:
    """Distances from ``r`` to a decreasing sequence of boundary shells.

    The returned ``log(r / shell)`` values are strictly increasing and
    unbounded, witnessing that no finite metric ball reaches the boundary.
    """
    shells = np.asarray(shells, dtype=float)
    if np.any(shells <= 0) or np.any(np.diff(shells) >= 0):
        raise ValueError("shells must be positive and strictly decreasing")
    if r <= 0:
        raise ValueError("r must be positive")
    return np.log(r / shells)


@dataclass(frozen=True)
class AgmonMetric:
    """Radial domain with its log-ratio metric and a shell exhaustion rule."""

    grid: RadialGrid

    def distance(self, r1, r2):
        return d2_distance(r1, r2)

    def distance_to_complement(self, r, inner: float, outer: float):
        """Metric distance from ``r`` to the complement of ``[inner, outer]``."""
        r = np.asarray(r, dtype=float)
        dist = np.minimum(np.log(r / inner), np.log(outer / r))
        return np.maximum(dist, 0.0)


@dataclass(frozen=True)
class CutoffSequence:
    """Nested plateau cutoffs over an exhausting family of shells.

    ``values[k]`` holds the node values of the k-th cutoff: 0 outside the
    k-th shell, 1 where the metric distance to the shell complement exceeds
    the plateau scale ``m``, linear in the log-radius across the ramps.
    """

    m: float
    shells: List[Tuple[float, float]]
    grid: RadialGrid
    values: List[np.ndarray]

    def __len__(self) -> int:
        return len(self.values)

    def ramp_spans(self, k: int) -> List[Tuple[float, float]]:
        """Radial intervals carrying the gradient of the k-th cutoff."""
        inner, outer = self.shells[k]
        em = np.exp(self.m)
        spans = []
        if inner * em > self.grid.r_min:
            spans.append((max(inner, self.grid.r_min), min(inner * em, self.grid.r_max)))
        if outer / em < self.grid.r_max:
            spans.append((max(outer / em, self.grid.r_min), min(outer, self.grid.r_max)))
        return spans


def build_cutoffs(
    metric: AgmonMetric,
    m: float,
    depth: int,
    step_decades: float = 1.0,
    center: Optional[float] = None,
) -> CutoffSequence:
    """Cutoff sequence over log-symmetric shells growing by ``step_decades``.

    Shells are centered at the geometric midpoint of the grid by default and
    may extend beyond the truncated grid; once the plateau covers the whole
    grid the cutoff is identically one there.
    """
    if m <= 0:
        raise ValueError("plateau scale m must be positive")
    if depth < 1:
        raise ValueError("need at least one shell")
    grid = metric.grid
    if center is None:
        center = float(np.sqrt(grid.r_min * grid.r_max))
    shells = []
    values = []
    for k in range(1, depth + 1):
        half = 10.0 ** (k * step_decades)
        inner, outer = center / half, center * half
        shells.append((inner, outer))
        dist = metric.distance_to_complement(grid.nodes, inner, outer)
        values.append(np.minimum(dist / m, 1.0))
    return CutoffSequence(m=m, shells=shells, grid=grid, values=values)


def eikonal_max(grid: RadialGrid, values: np.ndarray) -> float:
    """Max over elements of ``d**2 (delta rho / delta r)**2``.

    The boundary-distance factor is taken at the element's log-midpoint
    (the geometric mean of its endpoints), where the difference quotient of
    any function that is 1/m-Lipschitz in the log variable satisfies the
    ``m**-2`` bound exactly.
    """
    quotients = np.diff(values) / grid.spacings
    d_elem = np.sqrt(grid.nodes[:-1] * grid.nodes[1:])
    return float(np.max((d_elem * quotients) ** 2))


def _ramp_field(form: DiscreteForm, cutoffs: CutoffSequence, k: int) -> Field:
    """Analytic field of the k-th cutoff: linear in log r across the ramps."""
    inner, outer = cutoffs.shells[k]
    m = cutoffs.m
    x = form.xq
    dist = np.minimum(np.log(x / inner), np.log(outer / x))
    val = np.clip(dist / m, 0.0, 1.0)
    rising = (x > inner) & (x < np.sqrt(inner * outer)) & (dist > 0) & (dist < m)
    falling = (x >= np.sqrt(inner * outer)) & (x < outer) & (dist > 0) & (dist < m)
    dval = np.zeros_like(x)
    dval[rising] = 1.0 / (m * x[rising])
    dval[falling] = -1.0 / (m * x[falling])
    return Field(val, dval)


def energy_decay(
    form: DiscreteForm, cutoffs: CutoffSequence, phi: DiscreteFunction
):
    """Localized energies ``h_{phi^2}(rho_k)`` along the cutoff sequence.

    Returns ``(values, bounds)`` where ``bounds[k]`` is
    ``m**-2 * integral of c r**-2 phi**2`` over the k-th ramp region; the
    pointwise gradient bound makes ``values[k] <= bounds[k]`` under the
    shared quadrature rule.
    """
    phi_f = phi.field(form)
    phi_sq = phi_f.val**2
    d = form.profile.params.dim
    psi_sq_density = np.exp(form.profile.log_c(form.xq) + (d - 3) * np.log(form.xq)) * phi_sq
    values, bounds = [], []
    for k in range(len(cutoffs)):
        rho = _ramp_field(form, cutoffs, k)
        val = float((form.wq * form.weight_q * rho.dval**2 * phi_sq).sum())
        support = rho.dval != 0.0
        bound = float(
            (form.wq * psi_sq_density * support).sum() / cutoffs.m**2
        )
        values.append(val)
        bounds.append(bound)
    return values, bounds


def graph_norm_gap(
    form: DiscreteForm, cutoffs: CutoffSequence, phi: DiscreteFunction
) -> list:
    """``||(rho_k - 1) phi||^2 + E((rho_k - 1) phi)`` along the sequence."""
    phi_f = phi.field(form)
    out = []
    for k in range(len(cutoffs)):
        rho = _ramp_field(form, cutoffs, k)
        defect = (rho - 1.0) * phi_f
        out.append(float(l2_inner(form, defect) + energy(form, defect)))
    return out


def tapered_power_values(
    grid: RadialGrid,
    alpha: float,
    support: Tuple[float, float],
    ramp_decades: float = 1.0,
) -> np.ndarray:
    """Node values of ``r**-alpha`` tapered to zero at both support ends.

    The tapers are cosine-squared ramps over ``ramp_decades`` in the log
    variable just inside ``support``, so the result lies in the compactly
    supported core of the truncated grid whenever the support is interior.
    """
    lo, hi = support
    if not (grid.r_min <= lo < hi <= grid.r_max):
        raise ValueError("support must sit inside the grid")
    r = grid.nodes
    u = np.log(r)
    width = ramp_decades * np.log(10.0)
    up = np.clip((u - np.log(lo)) / width, 0.0, 1.0)
    down = np.clip((np.log(hi) - u) / width, 0.0, 1.0)
    taper = np.sin(np.pi / 2 * up) ** 2 * np.sin(np.pi / 2 * down) ** 2
    values = np.exp(-alpha * u) * taper
    values[(r < lo) | (r > hi)] = 0.0
    return values
