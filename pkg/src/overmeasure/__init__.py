"""Finite-dimensional discrete observables and their overmeasurement.

Observables are kept in unique spectral form; coarsenings, refinements,
compatibility, maximal common refinements and a calibrated unitary
premeasurement are built on top of a small dense linear algebra layer.
"""

from .compatibility import (
    CommonRefinement,
    are_compatible,
    claim1_witness,
    commutes,
    is_common_refinement,
    maximal_common_refinement,
    multi_common_refinement,
    verify_refinement_characterization,
)
from .errors import OvermeasureError
from .linalg import DEFAULT_TOL, Tolerance, approx_eq, hermitian_eigendecomposition, is_projector, kron
from .observables import (
    IndexSurjection,
    Partition,
    SpectralForm,
    coarsen_by_function,
    coarsen_by_map,
    complete_refinement,
    enumerate_coarsenings,
    from_matrix,
    is_refinement,
    same_projectors,
)
from .premeasurement import (
    CompositeState,
    MeasurementOutcome,
    PremeasurementSetup,
    SimultaneousMeasurement,
    build_premeasurement,
    check_calibration,
    check_coarse_calibration,
    check_coarse_result_consistency,
    coarse_pointer,
    collapse,
    evolve,
    simultaneous_measure,
)
from .rng import SplitMix64

__version__ = "0.1.0"
