"""Spectral pattern-matching baseline.

The normalized spectral weights of the regression vector are reconstructed
as ``(1 - beta) * uniform + beta * confounding_pattern(nu)`` by grid search;
``beta* > 0.5`` reports a confounder.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .detector import Decision, empirical_covariances, regression_vector
from .errors import InvalidGrid, SingularMatrix
from .models import Dataset
from .spectral import eigendecompose, spectral_weights

BETA_THRESHOLD = 0.5
METRICS = ("euclidean", "kernel")


@dataclass(frozen=True)
class PatternFit:
    beta_star: float
    nu_star: float
    reconstruction_error: float
    decision: Decision
    metric: str = "euclidean"

    def to_dict(self) -> dict:
        return {
            "beta_star": self.beta_star,
            "nu_star": self.nu_star,
            "reconstruction_error": self.reconstruction_error,
            "decision": self.decision.value,
            "metric": self.metric,
        }


def causal_pattern(n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be >= 1")
    return np.full(n, 1.0 / n)


def confounding_pattern(eigenvalues, nu: float) -> np.ndarray:
    """Weights of ``H^{-1} 1`` in the eigenbasis of ``H = diag(eigenvalues) + (nu/n) 1 1^T``,
    divided by ``||H^{-1} 1||^2`` and ordered by descending eigenvalue of ``H``."""
    lam = np.asarray(eigenvalues, dtype=float)
    n = lam.shape[0]
    if nu < 0:
        raise ValueError("nu must be non-negative")
    h = np.diag(lam) + (nu / n) * np.ones((n, n))
    try:
        v = np.linalg.solve(h, np.ones(n))
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix(str(exc)) from exc
    if not np.all(np.isfinite(v)):
        raise SingularMatrix("H is numerically singular")
    w = spectral_weights(v, eigendecompose(h))
    return w / np.sum(w)


def kernel_smoother(eigenvalues) -> np.ndarray:
    """Row-normalized Gaussian kernel over the eigenvalue axis.

    Bandwidth is the median gap between consecutive distinct eigenvalues.
    """
    lam = np.asarray(eigenvalues, dtype=float)
    gaps = np.abs(np.diff(np.sort(lam)))
    gaps = gaps[gaps > 0]
    if gaps.size == 0:
        return np.eye(lam.shape[0])
    h = float(np.median(gaps))
    k = np.exp(-0.5 * ((lam[:, None] - lam[None, :]) / h) ** 2)
    return k / k.sum(axis=1, keepdims=True)


def default_beta_grid() -> np.ndarray:
    return np.linspace(0.0, 1.0, 101)


def default_nu_grid(eigenvalues, points: int = 25) -> np.ndarray:
    total = float(np.sum(eigenvalues))
    if not total > 0:
        raise InvalidGrid("eigenvalues must have positive sum")
    return np.logspace(np.log10(1e-3 * total), np.log10(1e3 * total), points)


def fit(
    omega_hat,
    eigenvalues,
    beta_grid=None,
    nu_grid=None,
    metric: str = "euclidean",
) -> PatternFit:
    """Grid search for the mixing weight and pattern parameter.

    Among equal errors the smallest ``beta`` wins, then the first ``nu``.
    """
    w = np.asarray(omega_hat, dtype=float)
    lam = np.asarray(eigenvalues, dtype=float)
    if w.shape != lam.shape:
        raise ValueError("weights and eigenvalues differ in length")
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-8:
        raise ValueError("omega_hat must be a probability vector")
    betas = default_beta_grid() if beta_grid is None else np.sort(np.asarray(beta_grid, dtype=float))
    nus = default_nu_grid(lam) if nu_grid is None else np.asarray(nu_grid, dtype=float)
    if betas.size == 0 or nus.size == 0:
        raise InvalidGrid("beta and nu grids must be non-empty")
    if np.any((betas < 0) | (betas > 1)):
        raise InvalidGrid("beta grid must lie in [0, 1]")
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}")

    n = lam.shape[0]
    u = causal_pattern(n)
    patterns = np.stack([confounding_pattern(lam, nu) for nu in nus])
    k = kernel_smoother(lam) if metric == "kernel" else np.eye(n)
    r0 = k @ (w - u)
    dp = (patterns - u) @ k.T
    resid = r0[None, None, :] - betas[:, None, None] * dp[None, :, :]
    errors = np.linalg.norm(resid, axis=2)

    best = errors.min()
    hit = errors <= best + 1e-14
    i, j = np.unravel_index(int(np.argmax(hit.ravel())), errors.shape)
    beta = float(betas[i])
    return PatternFit(
        beta_star=beta,
        nu_star=float(nus[j]),
        reconstruction_error=float(errors[i, j]),
        decision=Decision.CONFOUNDER if beta > BETA_THRESHOLD else Decision.NO_CONFOUNDER,
        metric=metric,
    )


def normalized_weights(a_hat, sigma_x) -> tuple[np.ndarray, np.ndarray]:
    eig = eigendecompose(sigma_x)
    w = spectral_weights(a_hat, eig)
    return w / np.sum(w), eig.eigenvalues


def js_detect(data: Dataset, metric: str = "euclidean", beta_grid=None, nu_grid=None) -> PatternFit:
    sigma_x, sigma_xy = empirical_covariances(data)
    a_hat = regression_vector(sigma_x, sigma_xy)
    w, lam = normalized_weights(a_hat, sigma_x)
    return fit(w, lam, beta_grid, nu_grid, metric)
