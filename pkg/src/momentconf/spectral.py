"""Eigendecomposition of symmetric matrices and the spectral measures built on it.

A spectral measure here is discrete: it sits on the eigenvalues of a symmetric
matrix. The vector-induced measure of ``phi`` puts mass ``<phi, u_i>**2`` on
eigenvalue ``lambda_i``; the tracial measure puts mass ``1/n`` on each one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DecompositionFailure, DimensionError, InvalidMatrix

PSD_RTOL = 1e-8


def as_symmetric(m) -> np.ndarray:
    """Validate a square finite matrix and return ``(m + m.T) / 2``."""
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidMatrix(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] == 0:
        raise InvalidMatrix("matrix must have at least one row")
    if not np.all(np.isfinite(a)):
        raise InvalidMatrix("matrix has non-finite entries")
    return 0.5 * (a + a.T)


def _as_vector(phi, n: int) -> np.ndarray:
    v = np.asarray(phi, dtype=float)
    if v.ndim != 1 or v.shape[0] != n:
        raise DimensionError(f"expected a vector of length {n}, got shape {v.shape}")
    return v


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues sorted descending with matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def psd_tol(self) -> float:
        return PSD_RTOL * float(np.max(np.abs(self.eigenvalues)))

    def is_psd(self) -> bool:
        return bool(np.all(self.eigenvalues >= -self.psd_tol))

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.T


@dataclass(frozen=True)
class SpectralMeasure:
    support: np.ndarray
    weights: np.ndarray

    @property
    def mass(self) -> float:
        return float(np.sum(self.weights))


def eigendecompose(m) -> EigenDecomposition:
    """Symmetric eigendecomposition with a deterministic layout.

    Eigenvalues come back in descending order. Each eigenvector column is
    flipped so its first non-negligible entry is positive. Eigenvalues that
    are negative only by rounding (within ``1e-8 * max|lambda|``) are set to 0.

    Raises:
        InvalidMatrix: non-square input or non-finite entries.
        DecompositionFailure: the LAPACK solver did not converge.
    """
    a = as_symmetric(m)
    try:
        lam, u = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise DecompositionFailure(str(exc)) from exc
    lam = lam[::-1].copy()
    u = u[:, ::-1].copy()

    tol = PSD_RTOL * float(np.max(np.abs(lam))) if lam.size else 0.0
    lam[(lam < 0) & (lam >= -tol)] = 0.0

    # sign convention: first entry above rounding level is positive
    thresh = 1e-12 * np.max(np.abs(u), axis=0, keepdims=True)
    lead = np.argmax(np.abs(u) > thresh, axis=0)
    signs = np.sign(u[lead, np.arange(u.shape[1])])
    signs[signs == 0] = 1.0
    u *= signs
    return EigenDecomposition(lam, u)


def spectral_weights(phi, eig: EigenDecomposition) -> np.ndarray:
    """Squared coordinates of ``phi`` in the eigenbasis, ``(U^T phi) o (U^T phi)``."""
    v = _as_vector(phi, eig.n)
    coords = eig.eigenvectors.T @ v
    return coords * coords


def induced_measure(phi, eig: EigenDecomposition) -> SpectralMeasure:
    return SpectralMeasure(eig.eigenvalues, spectral_weights(phi, eig))


def tracial_measure(eig: EigenDecomposition) -> SpectralMeasure:
    n = eig.n
    return SpectralMeasure(eig.eigenvalues, np.full(n, 1.0 / n))


def first_moment(mu: SpectralMeasure) -> float:
    return float(mu.support @ mu.weights)


def quadratic_moment(phi, m) -> float:
    """First moment of the measure induced by ``phi``, computed as ``phi^T m phi``."""
    a = as_symmetric(m)
    v = _as_vector(phi, a.shape[0])
    return float(v @ a @ v)


def renormalized_trace(m) -> float:
    """``trace(m) / n``; the first moment of the tracial measure."""
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise InvalidMatrix(f"expected a square matrix, got shape {a.shape}")
    return float(np.trace(a)) / a.shape[0]
