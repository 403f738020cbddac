"""Plug-in confounder detector.

Estimate ``Sigma_X`` and ``Sigma_XY`` from data, regress, compute the
first-moment deviation of the regression vector and compare it with a
threshold ``gamma``.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass

import numpy as np

from .deviation import deviation
from .errors import DegenerateColumn, IllConditioned, InsufficientData
from .models import Dataset
from .spectral import as_symmetric, eigendecompose

DEFAULT_GAMMA = 0.5
RIDGE_RTOL = 1e-10
ILL_CONDITIONED = 1e12


class Decision(str, enum.Enum):
    NO_CONFOUNDER = "no_confounder"
    CONFOUNDER = "confounder"


def decide(d_hat: float, gamma: float) -> Decision:
    """``d_hat <= gamma`` means no confounder."""
    return Decision.CONFOUNDER if d_hat > gamma else Decision.NO_CONFOUNDER


@dataclass(frozen=True)
class DeviationReport:
    d_hat: float
    regression_vector: np.ndarray
    gamma: float
    decision: Decision
    n: int
    L: int
    condition_number: float
    normalized: bool = False

    @property
    def ill_conditioned(self) -> bool:
        return not self.condition_number <= ILL_CONDITIONED

    def to_dict(self) -> dict:
        return {
            "d_hat": self.d_hat,
            "gamma": self.gamma,
            "decision": self.decision.value,
            "n": self.n,
            "L": self.L,
            "condition_number": self.condition_number,
            "normalized": self.normalized,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def empirical_covariances(data: Dataset) -> tuple[np.ndarray, np.ndarray]:
    """Sample covariance of X and cross-covariance with y (denominator L-1)."""
    if data.L < 2:
        raise InsufficientData(f"need at least 2 observations, got {data.L}")
    xc = data.X - data.X.mean(axis=0)
    yc = data.y - data.y.mean()
    denom = data.L - 1
    return as_symmetric(xc.T @ xc / denom), xc.T @ yc / denom


def _solve_clamped(sigma_x: np.ndarray, sigma_xy: np.ndarray) -> tuple[np.ndarray, float]:
    eig = eigendecompose(sigma_x)
    lam = eig.eigenvalues
    top = lam[0]
    if not top > 0:
        raise IllConditioned("covariance has no positive eigenvalue")
    floor = RIDGE_RTOL * top
    cond = top / lam[-1] if lam[-1] > 0 else float("inf")
    u = eig.eigenvectors
    coef = (u.T @ sigma_xy) / np.maximum(lam, floor)
    return u @ coef, cond


def regression_vector(sigma_x, sigma_xy) -> np.ndarray:
    """Solve ``Sigma_X a = Sigma_XY``.

    Eigenvalues below ``1e-10 * lambda_max`` are lifted to that floor, so
    collinear or short data (L <= n) still yields a finite vector.
    """
    return _solve_clamped(as_symmetric(sigma_x), np.asarray(sigma_xy, dtype=float))[0]


def deviation_from_covariances(sigma_x, sigma_xy) -> tuple[float, np.ndarray, float]:
    sx = as_symmetric(sigma_x)
    a_hat, cond = _solve_clamped(sx, np.asarray(sigma_xy, dtype=float))
    return deviation(a_hat, sx).value, a_hat, cond


def empirical_deviation(data: Dataset) -> float:
    sigma_x, sigma_xy = empirical_covariances(data)
    return deviation_from_covariances(sigma_x, sigma_xy)[0]


def detect(data: Dataset, gamma: float = DEFAULT_GAMMA) -> DeviationReport:
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    sigma_x, sigma_xy = empirical_covariances(data)
    d_hat, a_hat, cond = deviation_from_covariances(sigma_x, sigma_xy)
    return DeviationReport(
        d_hat=d_hat,
        regression_vector=a_hat,
        gamma=gamma,
        decision=decide(d_hat, gamma),
        n=data.n,
        L=data.L,
        condition_number=cond,
        normalized=data.normalized,
    )


def normalize_unit_variance(data: Dataset) -> Dataset:
    """Rescale every X column and y to unit sample variance (no centering).

    Raises:
        DegenerateColumn: a column (or y) is constant.
    """
    names = data.columns
    sx = data.X.std(axis=0, ddof=1)
    for j, s in enumerate(sx):
        if not s > 0:
            raise DegenerateColumn(names[j] if names else j)
    sy = data.y.std(ddof=1)
    if not sy > 0:
        raise DegenerateColumn(data.target or "y")
    return Dataset(data.X / sx, data.y / sy, normalized=True, columns=names, target=data.target)
