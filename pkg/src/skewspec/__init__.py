"""Random anti-commuting Hermitian pairs and their skew spectra.

Library layout:

- :mod:`skewspec.matrixcore` — complex-matrix substrate (Hermitian checks,
  eigendecomposition, Haar unitaries);
- :mod:`skewspec.ensemble` — building, conjugating, and spectrally
  decomposing anti-commuting pairs;
- :mod:`skewspec.density` — the skew-spectrum density, tau, gradients, and
  reference densities for the commuting case;
- :mod:`skewspec.jacobian` — numerical verification of the parametrization
  Jacobian against its closed form;
- :mod:`skewspec.fekete` — maximal-likelihood configurations by projected
  gradient descent;
- :mod:`skewspec.sampler` — Metropolis sampling with quadrature validation;
- :mod:`skewspec.cli` — the ``skewspec`` command-line frontend.
"""

__version__ = "0.1.0"

from .density import (
    LogDensityValue,
    WeightSpec,
    equilibrium_density,
    equilibrium_radius,
    grad_tau,
    log_kappa_commuting,
    log_rho,
    pair_factor_f,
    tau,
)
from .ensemble import (
    HermitianPair,
    NonGenericInput,
    SkewSpectrum,
    build_block_diag,
    build_commuting_diag,
    conjugate,
    extract_skew_spectrum,
    random_generic_spectrum,
    sample_generic_pair,
)
from .fekete import (
    FeketeResult,
    OptimizerConfig,
    fekete_set,
    grid_initialization,
    minimize_commuting,
    minimize_tau,
    solve_K_bound,
    spacing_stats,
)
from .jacobian import (
    DegenerateJacobian,
    closed_form_gram,
    enumerate_tangent_basis,
    gram_determinant,
    verify_density_shape,
)
from .matrixcore import anticommutator, frobenius_norm, haar_unitary, hermitian_eig
from .sampler import ChainReport, ChainState, ks_compare, metropolis_step, p1_quadrature_cdf, run_chain

__all__ = [
    "ChainReport",
    "ChainState",
    "DegenerateJacobian",
    "FeketeResult",
    "HermitianPair",
    "LogDensityValue",
    "NonGenericInput",
    "OptimizerConfig",
    "SkewSpectrum",
    "WeightSpec",
    "anticommutator",
    "build_block_diag",
    "build_commuting_diag",
    "closed_form_gram",
    "conjugate",
    "enumerate_tangent_basis",
    "equilibrium_density",
    "equilibrium_radius",
    "extract_skew_spectrum",
    "fekete_set",
    "frobenius_norm",
    "grad_tau",
    "gram_determinant",
    "grid_initialization",
    "haar_unitary",
    "hermitian_eig",
    "ks_compare",
    "log_kappa_commuting",
    "log_rho",
    "metropolis_step",
    "minimize_commuting",
    "minimize_tau",
    "p1_quadrature_cdf",
    "pair_factor_f",
    "random_generic_spectrum",
    "run_chain",
    "sample_generic_pair",
    "solve_K_bound",
    "spacing_stats",
    "tau",
    "verify_density_shape",
]
