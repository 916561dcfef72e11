"""Adiabatic evolution and Berry-like phases for 2x2 PT-symmetric Hamiltonians."""
from .adiabatic_evolution import (
    EvolutionConfig,
    PhaseReport,
    Trajectory,
    adiabaticity_diagnostics,
    evolve_loop,
    extract_phases,
    integrate,
    unitarity_drift,
)
from .errors import (
    ConsistencyError,
    GaugeSingularError,
    InvalidParameterError,
    NonAdiabaticError,
    NotPositiveDefiniteError,
    PathError,
    PTBerryError,
    ResolutionError,
)
from .geometric_phase import (
    b_eff_sample,
    circulation,
    connection_analytic,
    connection_numeric,
    flux_formula,
    gauge_invariance_check,
    line_integral,
    solid_angle,
)
from .hermitian_map import build_eta, build_h, build_v, evolve_hermitian_picture
from .metric_dynamics import (
    MField,
    TangentVector,
    build_k,
    build_lambda,
    build_m,
    solve_metric_equation,
)
from .paths import LoopPath
from .pt_model import (
    DEFAULT_TOLERANCES,
    EigSystem,
    ParamPoint,
    Tolerances,
    build_hamiltonian,
    build_metric,
    build_parity,
    eigensystem,
    inner_w,
    verify_pseudo_hermiticity,
)

__version__ = "0.1.0"

__all__ = [
    "adiabaticity_diagnostics",
    "b_eff_sample",
    "build_eta",
    "build_h",
    "build_hamiltonian",
    "build_k",
    "build_lambda",
    "build_m",
    "build_metric",
    "build_parity",
    "build_v",
    "circulation",
    "connection_analytic",
    "connection_numeric",
    "ConsistencyError",
    "DEFAULT_TOLERANCES",
    "eigensystem",
    "EigSystem",
    "EvolutionConfig",
    "evolve_hermitian_picture",
    "evolve_loop",
    "extract_phases",
    "flux_formula",
    "gauge_invariance_check",
    "GaugeSingularError",
    "inner_w",
    "integrate",
    "InvalidParameterError",
    "line_integral",
    "LoopPath",
    "MField",
    "NonAdiabaticError",
    "NotPositiveDefiniteError",
    "ParamPoint",
    "PathError",
    "PhaseReport",
    "PTBerryError",
    "ResolutionError",
    "solid_angle",
    "solve_metric_equation",
    "TangentVector",
    "Tolerances",
    "Trajectory",
    "unitarity_drift",
    "verify_pseudo_hermiticity",
]
