"""Synthesis and wavelet eigenvalue regression for operator fractional Brownian motion."""

__version__ = "0.1.0"

from .errors import AdmissibilityError, NumericalError, OctaveError, OfbmError, ValidationError
from .estimator import (
    HurstEstimates,
    RegressionWeights,
    estimate,
    estimate_multivariate,
    estimate_path,
    estimate_univariate,
    interleave_split,
    make_weights,
    median_estimate,
)
from .model import (
    OfbmSpec,
    SamplePath,
    check_admissibility,
    exact_path_covariance,
    mfbm_covariance,
)
from .montecarlo import McConfig, McSummary, bootstrap_ci, cross_covariances, run
from .spectrum import WaveletSpectrum, analyze_path, eigh_sorted, logscale_diagram, wavelet_variance
from .synthesis import SynthesisPlan, build_plan, cholesky_oracle, derive_seed, synthesize
from .wavelet import OctaveCoefficients, WaveletBank, deepest_octave, make_bank, pyramid
