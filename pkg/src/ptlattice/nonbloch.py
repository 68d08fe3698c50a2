"""Generalized-Bloch treatment of finite chains.

Eigenstates of a finite chain with boundary-localized perturbations are
superpositions of the 2M roots beta of the bulk characteristic equation
at fixed energy; the admissible energies are the zeros of a 2M x 2M
boundary determinant.  This module solves the characteristic equation,
builds the boundary matrices for open and flux-threaded periodic chains
in an overflow-safe scaled form, and implements two solvers for the
PT-breaking structure on the ring: an exact unitary (|beta| = 1) ansatz
scan and an asymptotic large-L solver for the broken branch
beta = exp(i*gamma + delta/L).
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .eigen import eig
from .lattice import Boundary, HoppingSet, ModelSpec

__all__ = [
    "BetaRootSet",
    "BoundaryDeterminant",
    "UnitaryScanResult",
    "characteristic_roots",
    "boundary_determinant",
    "unitary_scan",
    "asymptotic_broken_solver",
    "asymptotic_energy",
]

_RESIDUAL_TOL = 1e-9
_EP_ROOT_TOL = 1e-10
_POLE_TOL = 1e-14


@dataclass(frozen=True)
class BetaRootSet:
    """All 2M roots of the bulk dispersion at a fixed energy.

    Roots are sorted ascending by |beta|, ties broken by ascending phase
    in [0, 2pi).
    """

    energy: complex
    roots: tuple[complex, ...]
    hoppings: HoppingSet

    def dispersion_residual(self) -> float:
        """Max |E(beta) - E| over the stored roots."""
        worst = 0.0
        for b in self.roots:
            val = sum(
                t * b**n + np.conj(t) * b ** (-n) for n, t in self.hoppings.items()
            )
            worst = max(worst, abs(val - self.energy))
        return worst

    def pairing_defect(self) -> float:
        """Distance of the root multiset from closure under b -> 1/conj(b).

        Vanishes (up to roundoff) for real energies.
        """
        roots = np.array(self.roots)
        mapped = 1.0 / np.conj(roots)
        return float(max(np.min(np.abs(roots - m)) for m in mapped))


@dataclass(frozen=True)
class BoundaryDeterminant:
    """Scaled boundary determinant; true det = value * exp(log_scale).

    Columns of the boundary matrix are pre-scaled by |beta|^(-L/2) so the
    evaluation stays finite for |beta| far from 1 at large L; ``value`` is
    zero iff the true determinant is zero.
    """

    value: complex
    log_scale: float
    column_norms: tuple[float, ...]
    ill_conditioned: bool

    @property
    def normalized_magnitude(self) -> float:
        """|value| divided by the product of scaled column norms."""
        prod = math.prod(self.column_norms)
        if prod == 0:
            return math.inf
        return abs(self.value) / prod


@dataclass(frozen=True)
class UnitaryScanResult:
    """Outcome of the |beta| = 1 ansatz scan over gamma.

    ``g_plus``/``g_minus`` hold the two branches of g/t as functions of
    gamma (NaN where the discriminant is negative or at removable poles);
    ``broken_g_intervals`` are the g/t ranges attained by neither branch,
    i.e. where every eigenstate must leave the unit circle.
    """

    gamma_grid: np.ndarray
    g_plus: np.ndarray
    g_minus: np.ndarray
    discriminant_negative: np.ndarray
    broken_g_intervals: tuple[tuple[float, float], ...]

    def csv_rows(self) -> list[tuple[float, float, float, int]]:
        return [
            (float(g), float(p), float(m), int(d))
            for g, p, m, d in zip(
                self.gamma_grid, self.g_plus, self.g_minus, self.discriminant_negative
            )
        ]


def characteristic_roots(h: HoppingSet, E: complex) -> BetaRootSet:
    """All 2M roots beta of sum_n t_n b^(M+n) + conj(t_n) b^(M-n) = E b^M.

    Roots come from the companion matrix of the monic polynomial and are
    polished by a few Newton steps.
    """
    E = complex(E)
    if not (math.isfinite(E.real) and math.isfinite(E.imag)):
        raise ValueError("energy must be finite")
    M = h.max_range
    # coeffs[d] multiplies beta^d, d = 0..2M
    coeffs = np.zeros(2 * M + 1, dtype=complex)
    for n, t in h.items():
        coeffs[M + n] += t
        coeffs[M - n] += np.conj(t)
    coeffs[M] -= E
    monic = coeffs / coeffs[2 * M]

    companion = np.zeros((2 * M, 2 * M), dtype=complex)
    if 2 * M > 1:
        companion[1:, :-1] = np.eye(2 * M - 1)
    companion[:, -1] = -monic[: 2 * M]
    roots = eig(companion).eigenvalues

    # Newton polish against the original (unreduced) polynomial.
    poly = coeffs[::-1]  # highest degree first, for polyval
    dpoly = np.polyder(poly)
    for _ in range(3):
        p = np.polyval(poly, roots)
        dp = np.polyval(dpoly, roots)
        step = np.where(dp != 0, p / np.where(dp != 0, dp, 1.0), 0.0)
        roots = roots - step

    scale = 1.0 + abs(E)
    result = BetaRootSet(
        energy=E,
        roots=tuple(
            sorted(
                (complex(b) for b in roots),
                key=lambda b: (abs(b), cmath.phase(b) % (2 * math.pi)),
            )
        ),
        hoppings=h,
    )
    if result.dispersion_residual() > _RESIDUAL_TOL * scale:
        raise RuntimeError(
            f"root residual {result.dispersion_residual():.3e} exceeds "
            f"{_RESIDUAL_TOL * scale:.3e} at E={E}"
        )
    return result


def _scaled_power(beta: complex, p: int, L: int) -> complex:
    """beta^p * |beta|^(-L/2), computed in log form."""
    return cmath.exp(p * cmath.log(beta) - 0.5 * L * math.log(abs(beta)))


def boundary_determinant(spec: ModelSpec, beta_set: BetaRootSet) -> BoundaryDeterminant:
    """Scaled determinant of the boundary-condition matrix at beta_set.energy.

    The eigenvector ansatz psi_j = sum_s c_s beta_s^j satisfies the bulk
    equation everywhere; the rows of the boundary matrix are the residual
    equations at the M leftmost and M rightmost sites, including any
    boundary-localized perturbation entries and, on a ring, the wrap-around
    hops carrying the total flux phase exp(+-i*theta*L).  The determinant
    vanishes exactly when the energy is an eigenvalue of the full model.
    """
    M = spec.hoppings.max_range
    L = spec.L
    roots = beta_set.roots
    if len(roots) != 2 * M:
        raise ValueError("root set does not match the hopping range")
    if any(b == 0 for b in roots):
        raise ValueError("zero beta root")
    ill = False
    for a in range(len(roots)):
        for b in range(a + 1, len(roots)):
            if abs(roots[a] - roots[b]) < _EP_ROOT_TOL:
                ill = True
    if ill:
        warnings.warn(
            "coincident beta roots: boundary matrix is ill-conditioned "
            "(exceptional-point vicinity)",
            RuntimeWarning,
            stacklevel=2,
        )

    periodic = spec.boundary is Boundary.PERIODIC
    theta_L = spec.flux_theta * L
    wrap = cmath.exp(1j * theta_L)
    left_rows = set(range(1, M + 1))
    right_rows = set(range(L - M + 1, L + 1))
    boundary_rows = sorted(left_rows | right_rows)

    # Gauge frame with bare bulk hoppings: perturbations pick up the phase
    # exp(i*theta*(i - j)).
    pert_by_row: dict[int, list[tuple[int, complex]]] = {}
    for p in spec.perturbations:
        if p.site_i not in left_rows and p.site_i not in right_rows:
            raise ValueError(
                f"perturbation row {p.site_i} lies outside the boundary "
                f"sites 1..{M} and {L - M + 1}..{L}"
            )
        amp = p.amplitude * cmath.exp(1j * spec.flux_theta * (p.site_i - p.site_j))
        pert_by_row.setdefault(p.site_i, []).append((p.site_j, amp))

    F = np.zeros((2 * M, 2 * M), dtype=complex)
    for r, j in enumerate(boundary_rows):
        for s, beta in enumerate(roots):
            val = 0.0 + 0.0j
            if j in left_rows:
                for n, t in spec.hoppings.items():
                    if n >= j:
                        val -= np.conj(t) * _scaled_power(beta, j - n, L)
                        if periodic:
                            val += np.conj(t) * np.conj(wrap) * _scaled_power(
                                beta, j - n + L, L
                            )
            else:
                for n, t in spec.hoppings.items():
                    if n >= L + 1 - j:
                        val -= t * _scaled_power(beta, j + n, L)
                        if periodic:
                            val += t * wrap * _scaled_power(beta, j + n - L, L)
            for m, amp in pert_by_row.get(j, ()):
                val += amp * _scaled_power(beta, m, L)
            F[r, s] = val

    log_scale = 0.5 * L * sum(math.log(abs(b)) for b in roots)
    return BoundaryDeterminant(
        value=complex(np.linalg.det(F)),
        log_scale=log_scale,
        column_norms=tuple(float(n) for n in np.linalg.norm(F, axis=0)),
        ill_conditioned=ill,
    )


def unitary_scan(params: dict, gamma_resolution: int) -> UnitaryScanResult:
    """Scan the unit-circle ansatz beta = e^(i*gamma) over gamma in [0, 2pi].

    On the circle the boundary determinant reduces to a quadratic in g/t,

        (g/t)^2 sin(gamma (L-1)) - 2 (g/t) cos(phi) sin(gamma L)
            + 2 (cos(gamma L) - cos(theta L)) sin(gamma) = 0,

    whose solution branches G(gamma) are reported on the grid.  A value of
    g/t supports a fully real spectrum only when the line g/t = G(gamma)
    has L crossings for gamma in (0, pi) — one unimodular eigenstate each.
    ``broken_g_intervals`` collects the g/t ranges where the crossing count
    drops below L, i.e. where some eigenstate has left the unit circle.
    """
    if gamma_resolution < 1000:
        raise ValueError("gamma_resolution must be at least 1000")
    t = float(params["t"])
    g_lo, g_hi = (float(x) for x in params["g_range"])
    theta = float(params["theta"])
    phi = float(params["phi"])
    L = int(params["L"])
    if t == 0:
        raise ValueError("t must be nonzero")

    gamma = np.linspace(0.0, 2.0 * math.pi, gamma_resolution)
    s_pole = np.sin(gamma * (L - 1))
    pole = np.abs(s_pole) < _POLE_TOL
    a = np.cos(phi) * np.sin(gamma * L)
    disc = a**2 - 2.0 * s_pole * np.sin(gamma) * (
        np.cos(gamma * L) - math.cos(theta * L)
    )
    neg = disc < 0

    with np.errstate(divide="ignore", invalid="ignore"):
        sq = np.sqrt(np.where(neg, np.nan, disc))
        g_plus = np.where(pole, np.nan, (a + sq) / s_pole)
        g_minus = np.where(pole, np.nan, (a - sq) / s_pole)

    intervals = _broken_intervals(
        t, theta, phi, L, g_lo / t, g_hi / t, max(gamma_resolution, 50 * L)
    )
    return UnitaryScanResult(
        gamma_grid=gamma,
        g_plus=g_plus,
        g_minus=g_minus,
        discriminant_negative=neg,
        broken_g_intervals=intervals,
    )


def _unimodular_count(
    g: float, t: float, theta: float, phi: float, L: int, n_gamma: int
) -> int:
    """Number of unimodular eigenstates: sign changes over gamma in (0, pi)
    of the on-circle boundary determinant (a real function there)."""
    gamma = np.linspace(1e-9, math.pi - 1e-9, n_gamma)
    q = (
        g**2 * np.sin(gamma * (L - 1))
        - 2.0 * g * t * math.cos(phi) * np.sin(gamma * L)
        + 2.0 * t**2 * (np.cos(gamma * L) - math.cos(theta * L)) * np.sin(gamma)
    )
    return int(np.sum(q[:-1] * q[1:] < 0))


def _real_axis_count(
    g: float, t: float, theta: float, phi: float, L: int, n_kappa: int = 2000
) -> int:
    """Real-eigenvalue bound states: roots of the boundary determinant at
    real beta = +-e^kappa, kappa > 0.

    The determinant is real there; it is evaluated times |beta|^-L so large
    kappa stays finite.  These states are real-spectrum but non-unimodular,
    so they must be counted alongside the circle solutions when testing
    whether the whole spectrum is real.
    """
    kappa_max = math.log(3.0 * (1.0 + abs(g) / t))
    kappa = np.linspace(1e-6, kappa_max, n_kappa)
    count = 0
    for sign in (1.0, -1.0):
        b = sign * np.exp(kappa)
        binv = 1.0 / b
        # det F * beta^-L, with beta^L factored out of the growing terms
        d = (
            g**2 * (binv - binv ** (2 * L) * b)
            - 2.0 * g * t * math.cos(phi) * (1.0 - binv ** (2 * L))
            + t**2
            * (1.0 + binv ** (2 * L) - 2.0 * math.cos(theta * L) * binv**L)
            * (b - binv)
        )
        count += int(np.sum(d[:-1] * d[1:] < 0))
    return count


def _broken_intervals(
    t: float,
    theta: float,
    phi: float,
    L: int,
    lo: float,
    hi: float,
    n_gamma: int,
    n_g: int = 501,
) -> tuple[tuple[float, float], ...]:
    gs = np.linspace(lo, hi, n_g)
    broken = np.array(
        [
            _unimodular_count(g * t, t, theta, phi, L, n_gamma)
            + _real_axis_count(g * t, t, theta, phi, L)
            < L
            for g in gs
        ]
    )
    intervals: list[tuple[float, float]] = []
    i = 0
    while i < n_g:
        if broken[i]:
            j = i
            while j + 1 < n_g and broken[j + 1]:
                j += 1
            intervals.append((float(gs[i]), float(gs[j])))
            i = j + 1
        else:
            i += 1
    return tuple(intervals)


def asymptotic_broken_solver(params: dict) -> list[tuple[float, float]]:
    """Large-L solutions beta = exp(i*gamma + delta/L) of the ring
    boundary equation, to leading order in 1/L.

    The real part of the boundary equation factorizes as
    2 sinh(delta) * B(gamma) with

        B = 2 t^2 sin(gamma L) sin(gamma) - g^2 cos(gamma (L-1))
            + 2 g t cos(phi) cos(gamma L),

    so off-circle solutions (sinh(delta) != 0) require B(gamma) = 0; the
    imaginary part then fixes delta through a cosh(delta) equation, solved
    by bracketed root finding.  Returns (gamma, delta) pairs; delta values
    come in +- pairs.  Empty when the model is PT-unbroken.
    """
    t = float(params["t"])
    g = float(params["g"])
    theta = float(params["theta"])
    phi = float(params["phi"])
    L = int(params["L"])
    cos_tl = math.cos(theta * L)
    cos_phi = math.cos(phi)

    def bracket(gm: float) -> float:
        return (
            2 * t**2 * math.sin(gm * L) * math.sin(gm)
            - g**2 * math.cos(gm * (L - 1))
            + 2 * g * t * cos_phi * math.cos(gm * L)
        )

    def cosh_rhs(gm: float) -> float:
        denom = 2 * (
            -(g**2) * math.sin(gm * (L - 1))
            + 2 * g * t * cos_phi * math.sin(gm * L)
            - 2 * t**2 * math.cos(gm * L) * math.sin(gm)
        )
        if denom == 0:
            return math.nan
        return -4 * t**2 * cos_tl * math.sin(gm) / denom

    grid = np.linspace(1e-9, math.pi - 1e-9, 10 * L)
    vals = np.array([bracket(gm) for gm in grid])
    out: list[tuple[float, float]] = []
    for i in range(len(grid) - 1):
        if vals[i] == 0 or vals[i] * vals[i + 1] >= 0:
            continue
        gm = brentq(bracket, grid[i], grid[i + 1], xtol=1e-14)
        rhs = cosh_rhs(gm)
        if not math.isfinite(rhs) or rhs <= 1.0 + 1e-12:
            continue
        # f_I(delta) = cosh(delta) - rhs, bracketed on [0, acosh(rhs)+1]
        hi = math.acosh(rhs) + 1.0
        delta = brentq(lambda d: math.cosh(d) - rhs, 0.0, hi, xtol=1e-14)
        out.append((float(gm), float(delta)))
        out.append((float(gm), float(-delta)))
    return out


def asymptotic_energy(t: float, gamma: float, delta: float, L: int) -> complex:
    """Energy of the asymptotic solution beta = exp(i*gamma + delta/L)."""
    beta = cmath.exp(1j * gamma + delta / L)
    return t * (beta + 1.0 / beta)
