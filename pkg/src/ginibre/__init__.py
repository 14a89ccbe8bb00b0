"""Generalized Ginibre ensemble: eigenvalues of products of complex Gaussian matrices.

Meijer G evaluation, exact radial laws, samplers, hole and overcrowding
probabilities, and Monte Carlo cross-checks.
"""
__version__ = "0.1.0"

from .core import (  # noqa: E402
    INF,
    AccuracyError,
    DomainError,
    EigenSolverError,
    EnsembleParams,
    GinibreError,
    LogProb,
    NonConvergenceError,
)
from .special_fn import (  # noqa: E402
    MeijerGConfig,
    cdf_lower_log,
    g_core,
    g_core_mb,
    g_core_series,
    survival_asympt_log,
    survival_log,
)
from .ensemble import kernel, log_radial_density, moduli_joint_density, radial_density, weight_w_n  # noqa: E402
from .sampler import sample_eigen_moduli, sample_product_matrix, sample_radii  # noqa: E402
from .hole import hole_asympt_log, hole_bounds_infinite, hole_exact_log, hole_infinite_log, hole_mc  # noqa: E402
from .overcrowd import overcrowd_lower_log, overcrowd_mc, overcrowd_upper_log  # noqa: E402
from .validation import gof_ks, validate_theorem1  # noqa: E402
