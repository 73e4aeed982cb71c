"""toeplab: an exact-arithmetic laboratory for Toeplitz determinants of
structured symbols, the lattice recursions their ratios satisfy, and the
combinatorics those determinants count."""

from .errors import (
    ConfinementFailure,
    ConsistencyFailure,
    ContractViolation,
    DomainError,
    IdentityFailure,
    InsufficientState,
    IntegrationDiverged,
    NotInvertible,
    PrecisionExceeded,
    RefusedSize,
    SingularTau,
    SingularVariable,
    ToeplabError,
    UnclassifiableWeight,
    UnsolvableStep,
    UnsupportedExactWeight,
)
from .rings import (
    GradedPoly,
    GradedRing,
    LaurentSeries,
    Series,
    as_q,
    exp_series_coefficients,
    laurent_inv,
    schur_p,
    series_exp,
    series_inv,
    series_log,
    series_mul,
)
from .weights import (
    CaseTag,
    WeightSpec,
    classify_case,
    dual_weight,
    fourier_moment,
    locus_times,
    moment_fn,
    weight_from_json,
    weight_to_json,
)
from .toeplitz import (
    ToeplitzState,
    biorthogonal_poly,
    build_state,
    inner_product,
    prefix_toeplitz_dets,
    reconstruct_In,
    toeplitz_det,
)

__version__ = "0.1.0"
