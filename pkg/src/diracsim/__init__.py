"""Direct measurement of the discrete Dirac quasi-probability distribution
via simulated weak measurements, with exact-expectation and Monte Carlo
readout protocols, reconstruction, and a tomography baseline."""

from .dirac import (
    DiracDistribution,
    alternative_ordering,
    density_from_dirac,
    dirac_from_density,
    dirac_purity,
    expectation,
    marginals,
)
from .hilbert import (
    BasisSet,
    DensityOperator,
    DistanceReport,
    Observable,
    PureState,
    distance_report,
    fourier_basis,
    purity,
    random_density,
    random_pure_state,
    standard_basis,
    trace_distance,
    validate_density,
)
from .pointer import PointerState, gaussian_pointer
from .weak import (
    JointState,
    PointerCalibration,
    Readout,
    WeakValueEstimate,
    calibrate_pointer_response,
    evolve_pointer,
    joint_weak_product,
    joint_weak_scan,
    measure_weak_value,
    pointer_readout,
    reconstruct_pure_state,
    row_sum_check,
    scan_protocol,
    weak_value,
    weak_value_decomposed,
)

__version__ = "0.1.0"

__all__ = [
    "BasisSet",
    "DensityOperator",
    "DiracDistribution",
    "DistanceReport",
    "JointState",
    "Observable",
    "PointerCalibration",
    "PointerState",
    "PureState",
    "Readout",
    "WeakValueEstimate",
    "alternative_ordering",
    "calibrate_pointer_response",
    "density_from_dirac",
    "dirac_from_density",
    "dirac_purity",
    "distance_report",
    "evolve_pointer",
    "expectation",
    "fourier_basis",
    "gaussian_pointer",
    "joint_weak_product",
    "joint_weak_scan",
    "marginals",
    "measure_weak_value",
    "pointer_readout",
    "purity",
    "random_density",
    "random_pure_state",
    "reconstruct_pure_state",
    "row_sum_check",
    "scan_protocol",
    "standard_basis",
    "trace_distance",
    "validate_density",
    "weak_value",
    "weak_value_decomposed",
    "__version__",
]
