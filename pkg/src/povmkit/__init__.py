"""povmkit: numerical toolkit for positive operator valued measures.

Data model and statistics for finite POVMs, minimal Naimark dilations and
coherent-vector diagonalizations, extremality tests with explicit convex
splittings, truncated-Fock-space phase-space observables, and covariant
POVMs over cyclic groups.
"""

from ._kernels import backend_name
from .abelian import (
    CovariantPovm,
    CyclicRep,
    build_covariant,
    canonical_position,
    covariance_check,
    covariant_coherent_family,
    covariant_extremality,
)
from .core import (
    DEFAULT_TOL,
    DensityState,
    DiscretePovm,
    ToleranceConfig,
    ValidationReport,
    born_probabilities,
    is_hermitian,
    is_isometry,
    is_psd,
    mix,
    sample_outcomes,
    validate_povm,
)
from .dilation import (
    CoherentFamily,
    NaimarkDilation,
    coherent_family,
    constant_rank,
    is_spectral_measure,
    minimal_dilation,
    multiplicity,
)
from .errors import (
    CutoffError,
    DecompositionError,
    DimensionMismatchError,
    FormatError,
    GridError,
    PovmkitError,
    ValidationError,
)
from .extremality import (
    ConvexDecomposition,
    ExtremalityVerdict,
    convex_decompose,
    extremality_test,
    informational_completeness,
    quick_reject,
)
from .fock import FockVector, coherent_state, number_state, squeezed_state
from .phase import (
    PhaseGrid,
    ScanVerdict,
    char_function,
    discretize_covariant_povm,
    extremality_scan,
    guard_radius,
    ic_indicator,
    laguerre,
    q_fourier,
    q_fourier_number_analytic,
    q_function,
    verify_h1_decomposition,
)
from .phase import displacement_matrix

__version__ = "0.1.0"
