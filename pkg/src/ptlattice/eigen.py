"""Dense complex non-symmetric eigendecomposition.

Thin contract layer over LAPACK's zgeev (via numpy), which performs the
standard balance -> Hessenberg -> shifted QR pipeline.  The wrapper pins the
package-wide conventions: unit-norm right eigenvectors, deterministic
ordering by (Re E, Im E), and a per-pair residual guarantee
||H v - E v||_2 <= 1e-8 * ||H||_F.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Spectrum", "EigensolverError", "eig", "frobenius_norm", "RESIDUAL_FACTOR"]

RESIDUAL_FACTOR = 1e-8


class EigensolverError(RuntimeError):
    """Raised when the QR iteration fails or the residual contract is violated."""


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues with unit-norm right eigenvectors and per-pair residuals.

    ``eigenvectors[:, k]`` is the right eigenvector of ``eigenvalues[k]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residuals: np.ndarray

    @property
    def dimension(self) -> int:
        return len(self.eigenvalues)

    def vector(self, k: int) -> np.ndarray:
        return self.eigenvectors[:, k]


def frobenius_norm(H: np.ndarray) -> float:
    """Frobenius norm, used as the scale for residual and classification cuts."""
    return float(np.linalg.norm(np.asarray(H)))


def eig(H: np.ndarray) -> Spectrum:
    """Full eigendecomposition with sorted output and residual check.

    Eigenvalues are sorted by ascending real part, ties by ascending
    imaginary part.  Repeated calls on identical input are bit-identical.
    """
    H = np.ascontiguousarray(H, dtype=np.complex128)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {H.shape}")
    if H.shape[0] < 1:
        raise ValueError("empty matrix")
    if not np.all(np.isfinite(H)):
        raise ValueError("matrix contains non-finite entries")
    try:
        values, vectors = np.linalg.eig(H)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"QR iteration did not converge: {exc}") from exc
    order = np.lexsort((values.imag, values.real))
    values = values[order]
    vectors = vectors[:, order]
    vectors = vectors / np.linalg.norm(vectors, axis=0, keepdims=True)
    residuals = np.linalg.norm(H @ vectors - vectors * values, axis=0)
    scale = frobenius_norm(H)
    tol = RESIDUAL_FACTOR * scale
    if scale > 0 and np.max(residuals) > tol:
        worst = int(np.argmax(residuals))
        raise EigensolverError(
            f"residual contract violated: ||Hv-Ev|| = {residuals[worst]:.3e} "
            f"> {tol:.3e} at eigenvalue index {worst}"
        )
    return Spectrum(eigenvalues=values, eigenvectors=vectors, residuals=residuals)
