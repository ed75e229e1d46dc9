"""floquet-qc: spectra, localization, and topology of five driven
quasiperiodic lattice models.

The package builds dense Hamiltonians for five non-Hermitian quasiperiodic
chains (complex-phase, complex-cosine, nonreciprocal-hopping, complex
Maryland, and screened-pole potentials), dresses their hoppings with the
zeroth Bessel factor J0(K/omega) of a periodic drive, and measures
localization (IPRs, Lyapunov exponents), spectral reality, mobility edges,
and determinant winding numbers over boundary-twist loops.  A time-stepping
validator propagates the rotating-frame Hamiltonian over one period and
compares quasienergies against the static dressed spectrum; a parallel scan
engine and a CLI produce deterministic phase-diagram artifacts (CSV, JSON,
SVG).
"""

from ._version import __version__
from .core import (
    PRODUCTION_ALPHA,
    PRODUCTION_L,
    STATIC_DRIVE,
    TEST_ALPHA,
    TEST_L,
    Boundary,
    BoundaryKind,
    DriveConfig,
    LatticeConfig,
    Model,
    ModelSpec,
    effective_hopping,
    onsite_potential,
    onsite_potential_array,
    quasiperiodic_angles,
)
from .errors import (
    BaseOnSpectrum,
    BranchCut,
    ConfigError,
    FloquetQCError,
    HoppingZero,
    InvalidEta,
    MissingOmega,
    NoConvergence,
    NonIntegerWinding,
    NumericalError,
    SingularMatrix,
    SingularPotential,
    StepTooLarge,
    UnsupportedModel,
    ZeroVector,
)
from .hamiltonian import (
    HamiltonianBuild,
    Representation,
    build_momentum_space,
    build_real_space,
    build_rotating_frame,
)
from .kernels import BACKEND, tm_log_growth
from .numerics import (
    EigenDecomposition,
    bessel_j0,
    det_phase_and_log_abs,
    eig_dense,
    expm_multiply_step,
    matrix_inf_norm,
)
from .observables import (
    IPR_THRESHOLD_FACTOR,
    ClassifiedPhase,
    M4Boundaries,
    M4Branch,
    Phase,
    SpectrumReport,
    classify_phase,
    ipr,
    lyapunov_analytic,
    lyapunov_transfer_matrix,
    m4_boundaries,
    m4_quasienergy_curves,
    mobility_edge_m5,
    reality_faithful_shift,
    spectrum_report,
)
from .scan import AxisSpec, CellResult, PhaseGrid, ScanConfig, run_scan
from .validate import (
    PropagatorReport,
    compare_quasienergies,
    one_period_propagator,
    validate_high_frequency,
)
from .winding import (
    WindingResult,
    compute_winding,
    winding_m5,
    winding_number,
    winding_pair_m4,
)

__all__ = [
    "__version__",
    "BACKEND",
    "IPR_THRESHOLD_FACTOR",
    "PRODUCTION_ALPHA",
    "PRODUCTION_L",
    "STATIC_DRIVE",
    "TEST_ALPHA",
    "TEST_L",
    "AxisSpec",
    "BaseOnSpectrum",
    "Boundary",
    "BoundaryKind",
    "BranchCut",
    "CellResult",
    "ClassifiedPhase",
    "ConfigError",
    "DriveConfig",
    "EigenDecomposition",
    "FloquetQCError",
    "HamiltonianBuild",
    "HoppingZero",
    "InvalidEta",
    "LatticeConfig",
    "M4Boundaries",
    "M4Branch",
    "MissingOmega",
    "Model",
    "ModelSpec",
    "NoConvergence",
    "NonIntegerWinding",
    "NumericalError",
    "Phase",
    "PhaseGrid",
    "PropagatorReport",
    "Representation",
    "ScanConfig",
    "SingularMatrix",
    "SingularPotential",
    "SpectrumReport",
    "StepTooLarge",
    "UnsupportedModel",
    "WindingResult",
    "ZeroVector",
    "bessel_j0",
    "build_momentum_space",
    "build_real_space",
    "build_rotating_frame",
    "classify_phase",
    "compare_quasienergies",
    "compute_winding",
    "det_phase_and_log_abs",
    "effective_hopping",
    "eig_dense",
    "expm_multiply_step",
    "ipr",
    "lyapunov_analytic",
    "lyapunov_transfer_matrix",
    "m4_boundaries",
    "m4_quasienergy_curves",
    "matrix_inf_norm",
    "mobility_edge_m5",
    "one_period_propagator",
    "onsite_potential",
    "onsite_potential_array",
    "quasiperiodic_angles",
    "reality_faithful_shift",
    "run_scan",
    "spectrum_report",
    "tm_log_growth",
    "validate_high_frequency",
    "winding_m5",
    "winding_number",
    "winding_pair_m4",
]
