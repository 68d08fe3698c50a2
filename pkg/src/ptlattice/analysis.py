"""Per-state diagnostics derived from a spectrum.

Covers the complex-eigenvalue fraction P_com, eigenvalue-resolved position
measures, exponential decay-constant fits for scale-free localization, and
the separation of isolated bound states from the continuous spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass, replace as dc_replace
from typing import Callable, Sequence

import numpy as np

from .eigen import Spectrum, eig, frobenius_norm
from .lattice import Boundary, ModelSpec, PerturbationTerm, build_hamiltonian

__all__ = [
    "SpectrumClassification",
    "ScaleFreeFit",
    "classify_spectrum",
    "mean_position",
    "half_asymmetry",
    "default_fit_window",
    "fit_decay_constant",
    "localization_constant",
    "detect_bound_states",
    "bound_states_by_scaling",
    "continuous_complex_indices",
    "fit_scale_free",
    "mean_position_curve",
    "self_similarity_deviation",
    "state_metrics_rows",
    "IMAG_CUT_FACTOR",
    "C_BOUND_CUT",
]

IMAG_CUT_FACTOR = 1e-8
C_BOUND_CUT = 10.0

# Floor for log-amplitude fits; bound states underflow mid-chain.
_AMP_FLOOR = 1e-300


@dataclass(frozen=True)
class SpectrumClassification:
    """Real/complex split of a spectrum at the cut |Im E| > tol_imag."""

    p_com: float
    n_com: int
    complex_indices: tuple[int, ...]
    tol_imag: float
    conjugate_partners: tuple[int, ...]  # one entry per complex index


@dataclass(frozen=True)
class ScaleFreeFit:
    """Decay-constant and Im-E scaling fits across a family of sizes."""

    sizes: tuple[int, ...]
    c_estimates: tuple[float, ...]
    c_mean: float
    c_relative_spread: float
    im_scaling_exponent: float
    status: str = "ok"


def classify_spectrum(
    spectrum: Spectrum, scale: float, tol_imag: float | None = None
) -> SpectrumClassification:
    """Split eigenvalues into real and complex at tol_imag = 1e-8 * scale.

    For every complex eigenvalue the index of its nearest conjugate partner
    is reported alongside.
    """
    if scale <= 0:
        raise ValueError("scale must be positive (pass the Frobenius norm)")
    tol = IMAG_CUT_FACTOR * scale if tol_imag is None else float(tol_imag)
    values = spectrum.eigenvalues
    complex_idx = tuple(int(i) for i in np.flatnonzero(np.abs(values.imag) > tol))
    partners = tuple(
        int(np.argmin(np.abs(values - np.conj(values[i])))) for i in complex_idx
    )
    n_com = len(complex_idx)
    return SpectrumClassification(
        p_com=n_com / len(values),
        n_com=n_com,
        complex_indices=complex_idx,
        tol_imag=tol,
        conjugate_partners=partners,
    )


def _weights(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v)
    w = np.abs(v) ** 2
    total = w.sum()
    if total == 0:
        raise ValueError("zero vector")
    return w / total


def mean_position(v: np.ndarray) -> float:
    """Probability-weighted mean site index, in [1, L]."""
    w = _weights(v)
    return float(np.sum(w * np.arange(1, len(w) + 1)))


def half_asymmetry(v: np.ndarray) -> float:
    """Mean distance from the chain midpoint L/2; detects inversion-symmetric
    localization that mean_position cannot see."""
    w = _weights(v)
    j = np.arange(1, len(w) + 1)
    return float(np.sum(w * np.abs(j - len(w) / 2)))


def default_fit_window(L: int, max_range: int) -> tuple[int, int]:
    """Middle 60% of sites, at least max(M, 5) away from either edge."""
    margin = max(max_range, 5)
    lo = max(int(0.2 * L) + 1, margin + 1)
    hi = min(int(0.8 * L), L - margin)
    return lo, hi


def fit_decay_constant(
    v: np.ndarray, window: tuple[int, int], edge_margin: int = 1
) -> float:
    """Least-squares slope of log|v_j| vs j over a 1-based window, scaled by L.

    The returned c satisfies |v_j| ~ exp(c*j/L) on the window.  Windows that
    touch the outermost ``edge_margin`` sites are rejected (boundary layers
    carry the sub-dominant beta branch).
    """
    v = np.asarray(v)
    L = len(v)
    lo, hi = window
    if not (1 <= lo < hi <= L):
        raise ValueError(f"window {window} not within [1, {L}]")
    if hi - lo + 1 < 10:
        raise ValueError("window must contain at least 10 sites")
    if lo <= edge_margin or hi > L - edge_margin:
        raise ValueError(
            f"window {window} touches the outermost {edge_margin} sites"
        )
    amps = np.abs(v[lo - 1 : hi])
    if np.any(amps == 0):
        raise ValueError("window contains zero amplitudes")
    j = np.arange(lo, hi + 1, dtype=float)
    slope = np.polyfit(j, np.log(amps), 1)[0]
    return float(slope * L)


def localization_constant(v: np.ndarray, max_range: int = 1) -> float:
    """Max |c| over the two half-chain windows.

    Bound states pinned to one edge, or decaying symmetrically from both
    edges, both show a large half-window |c|; scale-free profiles give
    |c| ~ O(1) on either half.
    """
    v = np.asarray(v)
    L = len(v)
    margin = max(max_range, 5)
    half = L // 2
    best = 0.0
    for lo, hi in ((margin + 1, half - margin), (half + margin, L - margin)):
        if hi - lo + 1 < 10:
            raise ValueError(f"chain of length {L} too short for half-window fits")
        amps = np.maximum(np.abs(v[lo - 1 : hi]), _AMP_FLOOR)
        j = np.arange(lo, hi + 1, dtype=float)
        slope = np.polyfit(j, np.log(amps), 1)[0]
        best = max(best, abs(slope * L))
    return best


def detect_bound_states(
    spectrum: Spectrum,
    max_range: int = 1,
    c_bound_cut: float = C_BOUND_CUT,
) -> list[int]:
    """Indices of states localized with a size-independent decay length.

    A state is flagged when its half-window |c| exceeds ``c_bound_cut``
    (decay length <= L/c_bound_cut); such states are excluded from
    continuous-spectrum statistics.
    """
    out = []
    for k in range(spectrum.dimension):
        if localization_constant(spectrum.vector(k), max_range) > c_bound_cut:
            out.append(k)
    return out


def _enlarged_spec(spec: ModelSpec, factor: int) -> ModelSpec:
    """Same model on a factor*L chain, keeping perturbations pinned to the
    boundary they were attached to."""
    L2 = factor * spec.L
    shift = L2 - spec.L
    half = spec.L // 2

    def remap(s: int) -> int:
        return s if s <= half else s + shift

    perts = tuple(
        PerturbationTerm(remap(p.site_i), remap(p.site_j), p.amplitude)
        for p in spec.perturbations
    )
    theta2 = spec.flux_theta * spec.L / L2 if spec.boundary is Boundary.PERIODIC else 0.0
    return dc_replace(spec, L=L2, flux_theta=theta2, perturbations=perts)


def bound_states_by_scaling(
    spec: ModelSpec,
    spectrum: Spectrum,
    candidates: Sequence[int],
    factor: int = 2,
    im_ratio: float = 2.0 ** -0.5,
) -> list[int]:
    """Subset of candidate complex states whose Im E is size-independent.

    The model is rebuilt on a ``factor`` times longer chain (total flux kept
    fixed for periodic chains).  A candidate is a bound state when a complex
    eigenvalue with the same Im-E sign persists at the larger size with at
    least ``im_ratio`` of its imaginary part; continuous-spectrum imaginary
    parts shrink like 1/L and fail that test.  The default cut is the
    geometric midpoint 1/sqrt(2) between the bound ratio (1) and the
    scale-free ratio (1/2), so a marginal mode at the bound-state formation
    point lands on the bound side.  This refines the fixed
    |c| > c_bound_cut cut near bound-state onset, where the emerging bound
    mode is still spatially extended at the original size.
    """
    if not candidates:
        return []
    H_big = build_hamiltonian(_enlarged_spec(spec, factor))
    big = eig(H_big)
    tol_big = IMAG_CUT_FACTOR * frobenius_norm(H_big)
    big_complex = big.eigenvalues[np.abs(big.eigenvalues.imag) > tol_big]
    out = []
    for k in candidates:
        e = spectrum.eigenvalues[k]
        same_sign = big_complex[np.sign(big_complex.imag) == np.sign(e.imag)]
        if len(same_sign) == 0:
            continue
        nearest = same_sign[np.argmin(np.abs(same_sign - e))]
        if abs(nearest.imag) >= im_ratio * abs(e.imag):
            out.append(int(k))
    return out


def continuous_complex_indices(
    spec: ModelSpec,
    spectrum: Spectrum,
    scale: float,
    tol_imag: float | None = None,
    scaling_check: bool = False,
) -> list[int]:
    """Complex-eigenvalue indices with bound states removed.

    With ``scaling_check`` the fixed-|c| cut is refined by the size-doubling
    test of :func:`bound_states_by_scaling`.
    """
    cls = classify_spectrum(spectrum, scale, tol_imag)
    bound = set(detect_bound_states(spectrum, spec.max_range))
    remaining = [i for i in cls.complex_indices if i not in bound]
    if scaling_check and remaining:
        bound_extra = set(bound_states_by_scaling(spec, spectrum, remaining))
        remaining = [i for i in remaining if i not in bound_extra]
    return remaining


def _select_fit_state(
    spectrum: Spectrum, scale: float, max_range: int
) -> int | None:
    """State used for the scale-free decay fit: the one at the median
    imaginary part of the full spectrum, provided it is complex and not a
    bound state.

    The maximal-Im-E state sits closest to bound-state formation and keeps
    size-dependent corrections; the median state is representative of the
    continuum bulk.
    """
    cls = classify_spectrum(spectrum, scale)
    bound = set(detect_bound_states(spectrum, max_range))
    allowed = set(cls.complex_indices) - bound
    if not allowed:
        return None
    by_im = sorted(
        range(spectrum.dimension), key=lambda i: (spectrum.eigenvalues[i].imag, i)
    )
    half = len(by_im) // 2
    # walk outward from the median until an eligible state is found
    for off in range(len(by_im)):
        for k in (half + off, half - off):
            if 0 <= k < len(by_im) and by_im[k] in allowed:
                return by_im[k]
    return None


def fit_scale_free(
    model_family: Callable[[int], ModelSpec], sizes: Sequence[int]
) -> ScaleFreeFit:
    """Fit the scale-free decay constant c and the max-|Im E| size scaling.

    For each size the model is diagonalized, a representative complex
    eigenstate is selected and its decay constant fitted on the default
    middle window; |psi_j| ~ exp(c*j/L) with c independent of L signals
    scale-free localization, and the representative state's |Im E| ~ 1/L
    fixes the exponent.  (The extreme-Im state is not used for the exponent:
    near bound-state formation it carries strong finite-size corrections.)
    """
    sizes = tuple(int(s) for s in sizes)
    if len(sizes) < 3 or any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("need at least 3 strictly increasing sizes")
    cs, max_ims = [], []
    for L in sizes:
        spec = model_family(L)
        H = build_hamiltonian(spec)
        spectrum = eig(H)
        scale = frobenius_norm(H)
        pick = _select_fit_state(spectrum, scale, spec.max_range)
        if pick is None:
            return ScaleFreeFit(
                sizes=sizes,
                c_estimates=(),
                c_mean=0.0,
                c_relative_spread=0.0,
                im_scaling_exponent=0.0,
                status="no complex states",
            )
        window = default_fit_window(L, spec.max_range)
        cs.append(fit_decay_constant(spectrum.vector(pick), window, spec.max_range))
        max_ims.append(abs(float(spectrum.eigenvalues[pick].imag)))
    cs_arr = np.array(cs)
    c_mean = float(cs_arr.mean())
    spread = float((cs_arr.max() - cs_arr.min()) / abs(c_mean)) if c_mean else float("inf")
    exponent = float(np.polyfit(np.log(sizes), np.log(max_ims), 1)[0])
    return ScaleFreeFit(
        sizes=sizes,
        c_estimates=tuple(float(c) for c in cs),
        c_mean=c_mean,
        c_relative_spread=spread,
        im_scaling_exponent=exponent,
    )


def mean_position_curve(spectrum: Spectrum) -> np.ndarray:
    """Normalized mean positions <x>_n / L with states sorted by ascending
    Im E (ties by Re E)."""
    values = spectrum.eigenvalues
    order = np.lexsort((values.real, values.imag))
    L = spectrum.dimension
    return np.array(
        [mean_position(spectrum.vector(int(i))) for i in order]
    ) / L


def self_similarity_deviation(curves: dict[int, np.ndarray]) -> float:
    """Max pointwise distance between rescaled mean-position curves.

    Every curve is compared against the largest-size curve on its own
    fractional index grid (linear interpolation).
    """
    if len(curves) < 2:
        raise ValueError("need at least two sizes")
    L_ref = max(curves)
    ref = curves[L_ref]
    f_ref = (np.arange(L_ref) + 0.5) / L_ref
    worst = 0.0
    for L, curve in curves.items():
        if L == L_ref:
            continue
        f = (np.arange(L) + 0.5) / L
        worst = max(worst, float(np.max(np.abs(curve - np.interp(f, f_ref, ref)))))
    return worst


def state_metrics_rows(spec: ModelSpec, spectrum: Spectrum) -> list[dict]:
    """Per-state metric rows for CSV export: index, Re E, Im E,
    mean_position, half_asymmetry, c_fit, is_bound."""
    window = default_fit_window(spec.L, spec.max_range)
    bound = set(detect_bound_states(spectrum, spec.max_range))
    rows = []
    for k in range(spectrum.dimension):
        v = spectrum.vector(k)
        try:
            c_fit = fit_decay_constant(v, window, spec.max_range)
        except ValueError:
            c_fit = float("nan")
        e = spectrum.eigenvalues[k]
        rows.append(
            {
                "index": k,
                "re_e": e.real,
                "im_e": e.imag,
                "mean_position": mean_position(v),
                "half_asymmetry": half_asymmetry(v),
                "c_fit": c_fit,
                "is_bound": int(k in bound),
            }
        )
    return rows
