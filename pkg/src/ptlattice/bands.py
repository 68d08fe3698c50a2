"""Bloch band structure and the equal-energy-point criterion.

For an open chain with a boundary perturbation, complex eigenvalues of the
continuous spectrum can only appear at energies where the unperturbed band
E(k) is attained by more than one pair of +-k points: two standing waves at
the same energy are needed to form the pair of states that coalesces at an
exceptional point.  This module evaluates E(k), counts equal-energy
solutions, extracts the permitted energy window, and checks a full model
against it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .analysis import continuous_complex_indices
from .eigen import eig, frobenius_norm
from .lattice import Boundary, HoppingSet, ModelSpec, build_hamiltonian

__all__ = [
    "PTWindow",
    "CriterionReport",
    "band_energy",
    "equal_energy_points",
    "pt_breaking_window",
    "criterion_check",
]

_GRID = 10_000
_DEDUP_TOL = 1e-10


@dataclass(frozen=True)
class PTWindow:
    """Energy intervals where E(k) = eps has at least two pairs of
    solutions; PT breaking of the continuous spectrum is confined to them."""

    intervals: tuple[tuple[float, float], ...]
    multiplicity: tuple[int, ...]


@dataclass(frozen=True)
class CriterionReport:
    window: PTWindow
    complex_energies_inside: bool
    violations: tuple[tuple[int, float, float], ...]  # (index, Re E, Im E)

    def to_json(self) -> str:
        return json.dumps(
            {
                "window": [[lo, hi] for lo, hi in self.window.intervals],
                "violations": [
                    {"index": i, "reE": re, "imE": im}
                    for i, re, im in self.violations
                ],
            }
        )


def band_energy(h: HoppingSet, k: float) -> float:
    """E(k) = sum_n (t_n e^{ikn} + conj(t_n) e^{-ikn}); real by construction."""
    return float(
        sum((t * np.exp(1j * k * n)).real * 2.0 for n, t in h.items())
    )


def _grid_roots(f, grid: np.ndarray) -> list[float]:
    """Sign-change bracketing on a fixed grid, refined by bisection."""
    vals = np.array([f(x) for x in grid])
    roots = [float(grid[i]) for i in np.flatnonzero(vals == 0)]
    for i in range(len(grid) - 1):
        if vals[i] * vals[i + 1] < 0:
            roots.append(float(brentq(f, grid[i], grid[i + 1], xtol=1e-12)))
    roots.sort()
    dedup: list[float] = []
    for r in roots:
        if not dedup or r - dedup[-1] > _DEDUP_TOL:
            dedup.append(r)
    return dedup


def equal_energy_points(h: HoppingSet, epsilon: float) -> list[float]:
    """All k in [0, 2pi) with E(k) = epsilon."""
    grid = np.linspace(0.0, 2.0 * math.pi, _GRID, endpoint=False)
    grid = np.append(grid, 2.0 * math.pi)
    roots = _grid_roots(lambda k: band_energy(h, k) - epsilon, grid)
    return [r for r in roots if r < 2.0 * math.pi - _DEDUP_TOL]


def pt_breaking_window(h: HoppingSet) -> PTWindow:
    """Energy intervals between band critical values where E(k) = eps has
    multiplicity >= 4, probed at interval midpoints."""
    grid = np.linspace(0.0, 2.0 * math.pi, _GRID, endpoint=False)
    grid = np.append(grid, 2.0 * math.pi)

    def slope(k: float) -> float:
        return float(
            sum((1j * n * t * np.exp(1j * k * n)).real * 2.0 for n, t in h.items())
        )

    critical_k = _grid_roots(slope, grid)
    critical_vals = sorted({round(band_energy(h, k), 12) for k in critical_k})
    intervals: list[tuple[float, float]] = []
    mults: list[int] = []
    for lo, hi in zip(critical_vals, critical_vals[1:]):
        mid = 0.5 * (lo + hi)
        count = len(equal_energy_points(h, mid))
        if count >= 4:
            intervals.append((float(lo), float(hi)))
            mults.append(count)
    return PTWindow(intervals=tuple(intervals), multiplicity=tuple(mults))


def criterion_check(spec: ModelSpec) -> CriterionReport:
    """Check that every continuous-spectrum complex eigenvalue of the open
    chain has Re E inside the permitted window (widened by 5*bandwidth/L
    for finite-size shifts).  Bound states are excluded."""
    if spec.boundary is not Boundary.OPEN:
        raise ValueError("criterion applies to open chains")
    window = pt_breaking_window(spec.hoppings)

    ks = np.linspace(0.0, 2.0 * math.pi, 2001)
    band = [band_energy(spec.hoppings, k) for k in ks]
    tol = 5.0 * (max(band) - min(band)) / spec.L

    H = build_hamiltonian(spec)
    spectrum = eig(H)
    continuum = continuous_complex_indices(
        spec, spectrum, frobenius_norm(H), scaling_check=True
    )

    violations = []
    for i in continuum:
        e = spectrum.eigenvalues[i]
        inside = any(
            lo - tol <= e.real <= hi + tol for lo, hi in window.intervals
        )
        if not inside:
            violations.append((i, float(e.real), float(e.imag)))
    return CriterionReport(
        window=window,
        complex_energies_inside=not violations,
        violations=tuple(violations),
    )
