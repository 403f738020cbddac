"""Hidden-confounder detection for linear regression via a spectral moment deviation."""

__version__ = "0.1.0"

from .baseline import PatternFit, js_detect
from .detector import Decision, DeviationReport, detect, empirical_deviation, normalize_unit_variance
from .deviation import (
    AsymptoticMoments,
    DeviationValue,
    asymptotic_deviation,
    closed_form,
    deviation,
    finite_n_theta_terms,
    nonidentifiable_radius_sq,
    sherman_morrison_solve,
)
from .harness import ExperimentConfig, analyze_csv, exceedance_curve, run_benchmark, run_distribution, threshold_sweep
from .models import ConfoundedModel, Dataset, SpectrumSpec, build_model, population_quantities, sample
from .spectral import (
    EigenDecomposition,
    SpectralMeasure,
    eigendecompose,
    first_moment,
    induced_measure,
    quadratic_moment,
    renormalized_trace,
    tracial_measure,
)
