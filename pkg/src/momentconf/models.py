"""Synthetic generators for the confounded linear model

    X = b Z + E,    Y = a^T X + c Z + F,    Var(Z) = 1.

Coefficient vectors are drawn with generic orientation (uniform on spheres),
noise covariances are built from a random orthonormal basis and a chosen
eigenvalue spectrum.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .deviation import deviation, sherman_morrison_solve
from .errors import InvalidMatrix, InvalidSpectrum, SingularMatrix
from .spectral import as_symmetric

STUDENT_DF = 10


class NoiseFamily(str, enum.Enum):
    GAUSSIAN = "gaussian"
    STUDENT = "student"
    LOGNORMAL = "lognormal"
    MIXTURE = "mixture"


class CoeffFamily(str, enum.Enum):
    NORMAL = "normal"
    UNIFORM = "uniform"


@dataclass(frozen=True)
class SpectrumSpec:
    """Eigenvalue profile of the noise covariance.

    kind is one of ``constant`` (all ``sigma1``), ``poly`` (``sigma1 / i``),
    ``exp`` (``sigma1 * rate**(i-1)``) or ``random`` (uniform on ``(lo, hi)``).
    """

    kind: str = "constant"
    sigma1: float = 1.0
    rate: float = math.exp(-1.0)
    lo: float = 0.5
    hi: float = 1.0

    def __post_init__(self):
        if self.kind not in ("constant", "poly", "exp", "random"):
            raise InvalidSpectrum(f"unknown spectrum kind {self.kind!r}")
        if self.sigma1 <= 0:
            raise InvalidSpectrum("sigma1 must be positive")
        if self.kind == "exp" and not 0 < self.rate <= 1:
            raise InvalidSpectrum("decay rate must lie in (0, 1]")
        if self.kind == "random" and not 0 <= self.lo < self.hi:
            raise InvalidSpectrum("random spectrum needs 0 <= lo < hi")

    @classmethod
    def parse(cls, text: str, sigma1: float = 1.0) -> SpectrumSpec:
        """Parse ``constant|poly|exp[:rate]|random:lo,hi``."""
        kind, _, arg = text.strip().partition(":")
        kind = kind.lower()
        if kind == "polynomial":
            kind = "poly"
        if kind in ("exponential",):
            kind = "exp"
        if kind == "exp":
            return cls("exp", sigma1, rate=float(arg) if arg else math.exp(-1.0))
        if kind == "random":
            lo, hi = (float(x) for x in arg.split(","))
            return cls("random", sigma1, lo=lo, hi=hi)
        if arg:
            raise InvalidSpectrum(f"spectrum {kind!r} takes no argument")
        return cls(kind, sigma1)

    def label(self) -> str:
        if self.kind == "exp":
            return f"exp:{self.rate:g}"
        if self.kind == "random":
            return f"random:{self.lo:g},{self.hi:g}"
        return self.kind


def uniform_sphere(n: int, r: float, rng: np.random.Generator) -> np.ndarray:
    """Uniform draw from the sphere of radius ``r`` in R^n."""
    while True:
        g = rng.standard_normal(n)
        norm = np.linalg.norm(g)
        if norm > 0:
            return g * (r / norm)


def random_coefficients(n: int, r: float, family, rng: np.random.Generator) -> np.ndarray:
    family = CoeffFamily(family)
    if family is CoeffFamily.NORMAL:
        return uniform_sphere(n, r, rng)
    while True:
        v = rng.uniform(-0.5, 0.5, size=n)
        norm = np.linalg.norm(v)
        if norm > 0:
            return v * (r / norm)


def random_basis(n: int, rng: np.random.Generator) -> np.ndarray:
    """Orthonormal basis from the eigenvectors of a symmetrized uniform matrix."""
    a = rng.uniform(-0.5, 0.5, size=(n, n))
    _, v = np.linalg.eigh(0.5 * (a + a.T))
    return v


def random_covariance(n: int, diag_lo: float, diag_hi: float, rng: np.random.Generator) -> np.ndarray:
    if not 0 <= diag_lo < diag_hi:
        raise ValueError("need 0 <= diag_lo < diag_hi")
    v = random_basis(n, rng)
    gamma = rng.uniform(diag_lo, diag_hi, size=n)
    return as_symmetric((v * gamma) @ v.T)


def spectrum(spec: SpectrumSpec, n: int, rng: np.random.Generator | None = None) -> np.ndarray:
    i = np.arange(1, n + 1, dtype=float)
    if spec.kind == "constant":
        return np.full(n, spec.sigma1)
    if spec.kind == "poly":
        return spec.sigma1 / i
    if spec.kind == "exp":
        return spec.sigma1 * spec.rate ** (i - 1)
    if rng is None:
        raise ValueError("random spectrum needs an rng")
    return np.sort(rng.uniform(spec.lo, spec.hi, size=n))[::-1]


def covariance_from_spectrum(sigmas, rng: np.random.Generator) -> np.ndarray:
    s = np.asarray(sigmas, dtype=float)
    v = random_basis(s.shape[0], rng)
    return as_symmetric((v * s) @ v.T)


@dataclass
class ConfoundedModel:
    n: int
    a: np.ndarray
    b: np.ndarray
    c: float
    sigma_e: np.ndarray
    noise_family: NoiseFamily = NoiseFamily.GAUSSIAN
    f_std: float = 1.0

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        self.sigma_e = as_symmetric(self.sigma_e)
        self.noise_family = NoiseFamily(self.noise_family)
        if self.a.shape != (self.n,) or self.b.shape != (self.n,) or self.sigma_e.shape != (self.n, self.n):
            raise ValueError("model parameters do not match dimension n")
        if not np.linalg.eigvalsh(self.sigma_e)[0] > 0:
            raise InvalidMatrix("noise covariance must be positive definite")
        if self.f_std < 0:
            raise ValueError("f_std must be non-negative")

    @property
    def confounded(self) -> bool:
        return self.c != 0 and bool(np.any(self.b != 0))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "a": self.a.tolist(),
            "b": self.b.tolist(),
            "c": self.c,
            "sigma_e": self.sigma_e.tolist(),
            "noise_family": self.noise_family.value,
            "f_std": self.f_std,
        }

    @classmethod
    def from_dict(cls, d: dict) -> ConfoundedModel:
        return cls(
            n=int(d["n"]),
            a=np.array(d["a"], dtype=float),
            b=np.array(d["b"], dtype=float),
            c=float(d["c"]),
            sigma_e=np.array(d["sigma_e"], dtype=float),
            noise_family=NoiseFamily(d.get("noise_family", "gaussian")),
            f_std=float(d.get("f_std", 1.0)),
        )


def build_model(
    n: int,
    r_a: float = 1.0,
    r_b: float = 1.0,
    c: float = 0.0,
    spec: SpectrumSpec | None = None,
    noise_family=NoiseFamily.GAUSSIAN,
    rng: np.random.Generator | None = None,
    coeff_family=CoeffFamily.NORMAL,
    f_std: float = 1.0,
) -> ConfoundedModel:
    """Draw a model: ``a`` and ``b`` on spheres, noise covariance from ``spec``.

    ``c = 0`` gives the purely causal model.
    """
    if r_a <= 0 or r_b <= 0:
        raise ValueError("radii must be positive")
    rng = np.random.default_rng() if rng is None else rng
    spec = SpectrumSpec() if spec is None else spec
    a = random_coefficients(n, r_a, coeff_family, rng)
    b = random_coefficients(n, r_b, coeff_family, rng)
    if spec.kind == "random":
        sigma_e = random_covariance(n, spec.lo, spec.hi, rng)
    else:
        sigma_e = covariance_from_spectrum(spectrum(spec, n), rng)
    return ConfoundedModel(n, a, b, float(c), sigma_e, NoiseFamily(noise_family), f_std)


def population_quantities(model: ConfoundedModel) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(Sigma_X, Sigma_XY, regression vector)`` of the model.

    Raises:
        SingularMatrix: ``Sigma_X`` is not invertible.
    """
    sigma_x = model.sigma_e + np.outer(model.b, model.b)
    sigma_xy = sigma_x @ model.a + model.c * model.b
    try:
        # equals Sigma_X^{-1} Sigma_XY; skips the round-off of forming Sigma_X a
        a_tilde = model.a + model.c * np.linalg.solve(sigma_x, model.b)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix(str(exc)) from exc
    return sigma_x, sigma_xy, a_tilde


def confounding_vector(model: ConfoundedModel) -> np.ndarray:
    """``c * Sigma_X^{-1} b``, the part of the regression vector due to Z."""
    return model.c * sherman_morrison_solve(model.sigma_e, model.b)


def population_deviation(model: ConfoundedModel) -> float:
    sigma_x, _, a_tilde = population_quantities(model)
    return deviation(a_tilde, sigma_x).value


@dataclass
class Dataset:
    X: np.ndarray
    y: np.ndarray
    normalized: bool = False
    columns: list[str] | None = field(default=None, compare=False)
    target: str | None = field(default=None, compare=False)

    def __post_init__(self):
        self.X = np.atleast_2d(np.asarray(self.X, dtype=float))
        self.y = np.asarray(self.y, dtype=float).reshape(-1)
        if self.X.shape[0] != self.y.shape[0]:
            raise ValueError(f"X has {self.X.shape[0]} rows, y has {self.y.shape[0]}")

    @property
    def L(self) -> int:
        return self.X.shape[0]

    @property
    def n(self) -> int:
        return self.X.shape[1]


def _sqrtm_psd(m: np.ndarray) -> np.ndarray:
    lam, u = np.linalg.eigh(m)
    return (u * np.sqrt(np.clip(lam, 0.0, None))) @ u.T


def standardized_noise(family, size: tuple[int, int], rng: np.random.Generator) -> np.ndarray:
    """Zero-mean, unit-variance draws; rows are independent.

    Student-t rows share one chi-square mixing variable (multivariate t).
    Mixture components have unit variance and means drawn from U[-0.5, 0.5]
    per column.
    """
    family = NoiseFamily(family)
    rows, cols = size
    if family is NoiseFamily.GAUSSIAN:
        return rng.standard_normal(size)
    if family is NoiseFamily.STUDENT:
        df = STUDENT_DF
        g = rng.standard_normal(size)
        w = rng.chisquare(df, size=(rows, 1))
        return g / np.sqrt(w / df) * math.sqrt((df - 2) / df)
    if family is NoiseFamily.LOGNORMAL:
        x = np.exp(rng.standard_normal(size))
        mean = math.exp(0.5)
        var = (math.e - 1.0) * math.e
        return (x - mean) / math.sqrt(var)
    means = rng.uniform(-0.5, 0.5, size=(2, cols))
    pick = rng.integers(0, 2, size=size)
    x = rng.standard_normal(size) + np.where(pick == 0, means[0], means[1])
    centre = means.mean(axis=0)
    half_gap = 0.5 * (means[0] - means[1])
    return (x - centre) / np.sqrt(1.0 + half_gap**2)


def sample(model: ConfoundedModel, L: int, rng: np.random.Generator) -> Dataset:
    if L < 2:
        raise ValueError("need at least 2 samples")
    n = model.n
    z = rng.standard_normal(L)
    e = standardized_noise(model.noise_family, (L, n), rng) @ _sqrtm_psd(model.sigma_e)
    f = model.f_std * standardized_noise(model.noise_family, (L, 1), rng)[:, 0]
    X = np.outer(z, model.b) + e
    y = X @ model.a + model.c * z + f
    return Dataset(X, y)
