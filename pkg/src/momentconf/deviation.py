"""First-moment deviation statistic and its large-n behaviour.

``deviation(phi, S) = |phi^T S phi - ||phi||^2 * tr(S)/n|``. It vanishes for
a generically oriented ``phi`` and stays positive when ``phi`` carries a
confounding component ``c * S^{-1} b``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from .errors import DimensionError, InvalidSpectrum, SingularMatrix, UnboundedMoments
from .spectral import as_symmetric, quadratic_moment, renormalized_trace


@dataclass(frozen=True)
class DeviationValue:
    value: float
    moment_induced: float
    moment_tracial_scaled: float
    norm_sq_phi: float


def deviation(phi, m) -> DeviationValue:
    a = as_symmetric(m)
    v = np.asarray(phi, dtype=float)
    if v.ndim != 1 or v.shape[0] != a.shape[0]:
        raise DimensionError(f"phi has shape {v.shape}, matrix is {a.shape}")
    induced = quadratic_moment(v, a)
    norm_sq = float(v @ v)
    tau = renormalized_trace(a)
    # centred form avoids cancelling two large moments
    value = abs(float(v @ (a @ v - tau * v)))
    return DeviationValue(value, induced, norm_sq * tau, norm_sq)


@dataclass(frozen=True)
class AsymptoticMoments:
    """Limiting first moments of the tracial measures of the noise covariance.

    ``m1``, ``m_neg1`` and ``m_neg2`` belong to ``S_E``, ``S_E^-1`` and
    ``S_E^-2``. ``tau_rb2`` is the vanishing rank-one trace term ``r_b^2 / n``
    and ``tau_unit`` the matching ``1 / n``; both are 0 in the limit and set
    to their finite-n values by :meth:`from_spectrum`.
    """

    m1: float
    m_neg1: float
    m_neg2: float
    tau_rb2: float = 0.0
    tau_unit: float = 0.0

    @classmethod
    def from_spectrum(cls, spectrum, r_b: float | None = None) -> AsymptoticMoments:
        s = _positive_spectrum(spectrum)
        n = s.shape[0]
        inv = 1.0 / s
        tau_rb2 = 0.0 if r_b is None else r_b**2 / n
        return cls(
            float(np.mean(s)),
            float(np.mean(inv)),
            float(np.mean(inv * inv)),
            tau_rb2,
            1.0 / n,
        )

    def is_finite(self) -> bool:
        return all(math.isfinite(x) for x in (self.m1, self.m_neg1, self.m_neg2, self.tau_rb2))


def _positive_spectrum(spectrum) -> np.ndarray:
    s = np.asarray(spectrum, dtype=float)
    if s.ndim != 1 or s.size == 0:
        raise InvalidSpectrum("spectrum must be a non-empty vector")
    if not np.all(np.isfinite(s)) or np.any(s <= 0):
        raise InvalidSpectrum("all eigenvalues must be finite and > 0")
    return s


def asymptotic_deviation(c: float, r_b: float, mom: AsymptoticMoments) -> float:
    """Large-n deviation of the regression vector under a scalar confounder.

    Raises:
        UnboundedMoments: a moment is infinite; use :func:`finite_n_theta_terms`.
    """
    if not mom.is_finite():
        raise UnboundedMoments("moments diverge; evaluate with finite_n_theta_terms instead")
    rb2 = r_b * r_b
    denom = 1.0 + rb2 * mom.m_neg1
    if denom <= 0:
        raise ValueError("1 + r_b^2 * m_neg1 must be positive")
    inner = mom.m_neg1 - mom.m_neg2 * mom.m1 + rb2 * mom.m_neg1**2 - mom.tau_rb2 * mom.m_neg2
    return c * c * rb2 / denom**2 * abs(inner)


def _scaled_moments(spectrum, log_scale: bool) -> tuple[int, float, float, float, float]:
    """Return ``(n, s_min, p, q, m1)`` with ``tau(S^-k) = mean(w^k) / s_min^k``,
    ``w = s_min / s`` in (0, 1], so inverse traces never overflow. With
    ``log_scale`` the input holds log-eigenvalues and ``s_min`` may underflow to 0."""
    if log_scale:
        logs = np.asarray(spectrum, dtype=float)
        if logs.ndim != 1 or logs.size == 0 or not np.all(np.isfinite(logs)):
            raise InvalidSpectrum("log-spectrum must be a non-empty finite vector")
    else:
        logs = np.log(_positive_spectrum(spectrum))
    log_min = float(np.min(logs))
    w = np.exp(log_min - logs)
    return logs.shape[0], math.exp(log_min), float(np.mean(w)), float(np.mean(w * w)), float(np.mean(np.exp(logs)))


def finite_n_theta_terms(spectrum, r_b: float, log_scale: bool = False) -> tuple[float, float, float]:
    """The three ratios whose limits give the deviation for decaying spectra.

    theta1 = tau(S^-1) / (1 + r_b^2 tau(S^-1))
    theta2 = tau(S^-2) tau(S) / (1 + r_b^2 tau(S^-1))^2
    theta3 = r_b^2 tau(S^-2) / (n (1 + r_b^2 tau(S^-1))^2)

    The deviation is then ``c^2 r_b^2 |theta1 - theta2 - theta3|``. Pass
    log-eigenvalues with ``log_scale=True`` for spectra below float range.
    """
    n, s_min, p, q, m1 = _scaled_moments(spectrum, log_scale)
    rb2 = r_b * r_b
    g = s_min + rb2 * p  # (1 + r_b^2 tau(S^-1)) * s_min
    theta1 = p / g
    theta2 = q * m1 / (g * g)
    theta3 = rb2 * q / (n * g * g)
    return theta1, theta2, theta3


def theta_deviation(spectrum, c: float, r_b: float, log_scale: bool = False) -> float:
    t1, t2, t3 = finite_n_theta_terms(spectrum, r_b, log_scale)
    return c * c * r_b * r_b * abs(t1 - t2 - t3)


SpectrumKind = Literal["constant", "polynomial", "exponential"]


def closed_form(kind: SpectrumKind, c: float, r_b: float, sigma1: float) -> float:
    """Limiting deviation for the three reference spectra.

    ``polynomial`` is ``sigma_i = sigma1 / i``; ``exponential`` is
    ``sigma_i = sigma1 * e^-(i-1)``.
    """
    if sigma1 <= 0 or r_b <= 0:
        raise ValueError("sigma1 and r_b must be positive")
    rb2 = r_b * r_b
    if kind == "constant":
        return c * c * rb2 * rb2 / (sigma1 * sigma1 + 2 * sigma1 * rb2 + rb2 * rb2)
    if kind == "polynomial":
        return c * c
    if kind == "exponential":
        e = math.e
        return c * c * abs(2.0 / (e + 1.0) - e * sigma1 / ((e + 1.0) * rb2))
    raise ValueError(f"unknown spectrum kind {kind!r}")


def nonidentifiable_radius_sq(mom: AsymptoticMoments) -> float | None:
    """Squared confounder radius at which the limiting deviation is zero.

    ``(m_neg2 * m1 - m_neg1) / (m_neg1^2 - tau_unit * m_neg2)``. Returns None
    when moments diverge or the value is not positive, since no model with
    ``r_b > 0`` is then blind to the confounder.
    """
    if not mom.is_finite() or not math.isfinite(mom.tau_unit):
        return None
    num = mom.m_neg2 * mom.m1 - mom.m_neg1
    den = mom.m_neg1**2 - mom.tau_unit * mom.m_neg2
    if den <= 0:
        return None
    if num <= 1e-12 * mom.m_neg2 * mom.m1:
        return None
    return num / den


def finite_n_nonidentifiable_radius_sq(spectrum, log_scale: bool = False) -> float | None:
    """:func:`nonidentifiable_radius_sq` on the finite-n moments of ``spectrum``
    (``tau_unit = 1/n``), evaluated in rescaled form."""
    n, s_min, p, q, m1 = _scaled_moments(spectrum, log_scale)
    num = q * m1 - p * s_min
    den = p * p - q / n
    if den <= 0 or num <= 1e-12 * q * m1:
        return None
    return num / den


def sherman_morrison_solve(sigma_e, b) -> np.ndarray:
    """``(S_E + b b^T)^{-1} b`` computed as ``S_E^{-1} b / (1 + b^T S_E^{-1} b)``.

    Args:
        sigma_e: the matrix ``S_E`` itself, or a callable applying ``S_E^{-1}``
            to a vector.
        b: rank-one direction.

    Raises:
        SingularMatrix: ``S_E`` (or the rank-one update) is not invertible.
    """
    bv = np.asarray(b, dtype=float)
    if callable(sigma_e):
        solve: Callable[[np.ndarray], np.ndarray] = sigma_e
        x = np.asarray(solve(bv), dtype=float)
    else:
        a = as_symmetric(sigma_e)
        if a.shape[0] != bv.shape[0]:
            raise DimensionError(f"b has length {bv.shape[0]}, matrix is {a.shape}")
        try:
            x = np.linalg.solve(a, bv)
        except np.linalg.LinAlgError as exc:
            raise SingularMatrix(str(exc)) from exc
        if np.linalg.cond(a) > 1.0 / np.finfo(float).eps:
            raise SingularMatrix("noise covariance is numerically singular")
    if not np.all(np.isfinite(x)):
        raise SingularMatrix("inverse action produced non-finite values")
    denom = 1.0 + float(bv @ x)
    if abs(denom) < np.finfo(float).eps:
        raise SingularMatrix("rank-one update is singular")
    return x / denom
