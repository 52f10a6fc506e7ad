"""Maximal strong and weak central moments of matrices over their state space."""

__version__ = "0.1.0"

from .discrete import (  # noqa: E402
    bruteforce_simplex_oracle,
    fixed_mean_moment,
    strong_moment_discrete,
    weak_moment_discrete,
    weak_moment_hermitian,
)
from .distance import min_scalar_distance, smallest_enclosing_disc, spectral_diameter  # noqa: E402
from .linalg import (  # noqa: E402
    MatrixClass,
    Spectrum,
    central_power,
    classify,
    direct_sum_conjugate,
    eig_hermitian,
    eig_normal,
)
from .matrix_opt import dual_fixed_mean_value, strong_moment_matrix, weak_moment_matrix  # noqa: E402
from .polynomials import Kind, MomentPolynomial, build, moment_constant, sup_norm  # noqa: E402
from .states import (  # noqa: E402
    Certificate,
    DensityState,
    DiscreteState,
    Mode,
    MomentResult,
    strong_moment_fixed_state,
    weak_moment_fixed_state,
)
