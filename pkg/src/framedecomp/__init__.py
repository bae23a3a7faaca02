"""Constructive two-part decompositions of unit-norm Bessel families."""

from .decomp import (
    BlockSchedule,
    DecompositionResult,
    LedgerEntry,
    PerturbationCertificate,
    decompose,
    gk_inequality_check,
    greedy_decompose,
    impossibility_certificate,
    ordered_decompose,
    riesz_scaled_decompose,
    verify_ledger,
)
from .errors import FrameDecompError, InputError, PreconditionError
from .frames import (
    CoefficientVector,
    SpectralReport,
    is_linearly_independent,
    omega_independence_margin,
    perturbation_distance,
    spectral_report,
    verify_orthogonal_decomposition,
)
from .linops import (
    Projector,
    Tolerances,
    VectorFamily,
    gram,
    orthonormal_range,
    project_energy,
    symmetric_spectrum,
)
from .zoo import (
    alternating_coefficients,
    dyadic_reorder_permutation,
    gen_dyadic_reorder,
    gen_random_bessel,
    gen_shift_pair,
    gen_union_onb,
)

__version__ = "0.1.0"
