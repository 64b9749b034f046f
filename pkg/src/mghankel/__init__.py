"""Block moment matrices with multigraded Hankel symmetry, their Gaussian
factorization, the induced biorthogonal polynomial/form families, and
machine-checked Christoffel-Darboux identities in exact or float
arithmetic."""

__version__ = "0.1.0"

from .numerics import (
    EXACT,
    FLOAT,
    CheckOutcome,
    DEFAULT_TOLERANCE,
    SingularLeadingMinorError,
    SingularLocusError,
    Tolerance,
    approx_zero,
    matrix_residual_norm,
)
from .weights import (
    BaseMeasure,
    SeedWeight,
    SupportError,
    WeightFamily,
    hankel_family,
    validate_family,
)
from .blockops import (
    BlockMatrix,
    BlockPartition,
    build_moment_matrix,
    check_multigraded_symmetry,
    partition,
    shift_power,
)
from .factorize import GaussFactors, invert_block_triangular, lu_factorize
from .families import (
    LinearForm,
    MatrixPolynomial,
    associated_minus,
    associated_plus,
    dual_associated_minus,
    dual_associated_plus,
    dual_family,
    eval_form,
    eval_poly,
    primary_family,
)
from .cdkernel import IdentityResidual, KernelEvaluator, classical_cd
from .harness import (
    CheckReport,
    ConfigError,
    RunConfig,
    builtin_config,
    load_config,
    run,
    write_report,
)

__all__ = [
    "__version__",
    "EXACT",
    "FLOAT",
    "CheckOutcome",
    "DEFAULT_TOLERANCE",
    "SingularLeadingMinorError",
    "SingularLocusError",
    "Tolerance",
    "approx_zero",
    "matrix_residual_norm",
    "BaseMeasure",
    "SeedWeight",
    "SupportError",
    "WeightFamily",
    "hankel_family",
    "validate_family",
    "BlockMatrix",
    "BlockPartition",
    "build_moment_matrix",
    "check_multigraded_symmetry",
    "partition",
    "shift_power",
    "GaussFactors",
    "invert_block_triangular",
    "lu_factorize",
    "LinearForm",
    "MatrixPolynomial",
    "associated_minus",
    "associated_plus",
    "dual_associated_minus",
    "dual_associated_plus",
    "dual_family",
    "eval_form",
    "eval_poly",
    "primary_family",
    "IdentityResidual",
    "KernelEvaluator",
    "classical_cd",
    "CheckReport",
    "ConfigError",
    "RunConfig",
    "builtin_config",
    "load_config",
    "run",
    "write_report",
]
