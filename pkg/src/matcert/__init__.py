"""Matrix functions by interpolation polynomials, with a-priori error
certificates.

The library evaluates analytic functions of square complex matrices
through Newton-form interpolation polynomials and computes certified
upper bounds on ``||f(A) - p(A)||``: a general grid-maximized bound and
cheaper exponential specializations, plus a randomized validity
experiment and a small CLI.
"""

from .bounds import (
    BoundReport,
    SpectralAbscissae,
    exp_bound_cor3,
    exp_bound_cor4,
    exp_bound_cor5,
    exp_bound_cor6,
    spectral_abscissae,
    taylor_bound,
    theorem_bound,
    true_error,
)
from .errors import (
    ConditioningError,
    ConditioningWarning,
    ConvergenceError,
    DerivativeOrderError,
    DimensionMismatchError,
    ExperimentError,
    MatcertError,
    NonFiniteMatrixError,
    NormalityError,
    NormConvergenceError,
    SchurConvergenceError,
    SingularMatrixError,
)
from .experiment import (
    ExperimentConfig,
    ExperimentStats,
    TrialRecord,
    compute_stats,
    norms_curve,
    paper_nodes,
    random_trial_matrix,
    run_experiment,
    run_trial,
    sharp_exp,
)
from .hull import HullPolygon, boundary_samples, contains, convex_hull
from .interp import (
    EXP,
    AnalyticFunction,
    NewtonPolynomial,
    NodeSet,
    chebyshev_nodes,
    dd_integral_oracle,
    divided_differences,
    newton_eval_matrix,
    newton_eval_scalar,
    omega_at_matrix,
    omega_at_scalar,
    polynomial_function,
    read_node_file,
    taylor_nodes,
    write_node_file,
)
from .linalg import (
    DEFAULT_TOLERANCES,
    FROBENIUS,
    NORMS,
    ONE_NORM,
    SPECTRAL,
    ExpmInfo,
    MatrixNorm,
    SchurForm,
    ToleranceConfig,
    as_matrix,
    condition_number_2,
    eigenvalues,
    frobenius_norm,
    hessenberg,
    identity,
    inverse,
    mat_add,
    mat_mul,
    mat_sub,
    matrix_exp,
    one_norm,
    scalar_mul,
    schur,
    shift,
    solve,
    spectral_norm,
    split_schur,
)
from .mmio import read_matrix, write_matrix

__version__ = "0.1.0"
