"""Projected ensembles of symmetric quantum states.

Exact-statevector tools for building projected ensembles from random
symmetric states and chaotic Ising dynamics, and for measuring how close
their moments come to uniformly random states.
"""

__version__ = "0.1.0"

from .bases import (
    MeasurementBasis,
    build_basis,
    computational_basis,
    global_haar_basis,
    local_product_basis,
    mixed_last_site_basis,
    sigma_x_basis,
    translation_eigenbasis,
)
from .dynamics import (
    BaselineResult,
    EvolutionPlan,
    IsingHamiltonian,
    IsingSpec,
    PowerLawFit,
    ScanResult,
    build_ising,
    deep_thermalization_scan,
    evolve,
    evolve_trajectory,
    fit_power_law,
    relaxation_time_grid,
    rmt_baseline,
)
from .ensembles import (
    ProjectedEnsemble,
    ViolationResult,
    condition_check,
    delta_prime_t,
    delta_t,
    ensemble_moment,
    projected_ensemble,
    violation,
)
from .errors import (
    ConfigError,
    ContractError,
    EmptyProjectionError,
    NumericalError,
    ResourceBudgetError,
)
from .geometry import SystemGeometry
from .linalg import (
    partial_trace_b,
    partial_project,
    rng_stream,
    sample_haar_state,
    sample_haar_unitary,
    schmidt_spectrum,
    trace_distance,
    trace_norm,
)
from .moments import (
    haar_moment,
    perm_sym_projector,
    symmetric_ensemble_moment,
    z2_sigmax_projected_moment,
)
from .symmetries import (
    ChargeSector,
    CompositeSector,
    ParityFlipSector,
    ReflectionSector,
    SectorProjector,
    TranslationSector,
    TranslationPowerTrace,
    build_projector,
    partial_trace_translation_power,
    project_state,
    reflect,
    sample_symmetric_state,
    sample_t_invariant_unitary,
    sector_rank,
    sector_trace,
    spin_flip,
    translate,
    translation_operator,
    translation_reflection_sector,
)

__all__ = [
    "__version__",
    # geometry
    "SystemGeometry",
    # errors
    "ConfigError", "ContractError", "EmptyProjectionError", "NumericalError",
    "ResourceBudgetError",
    # linear algebra
    "partial_trace_b", "partial_project", "rng_stream", "sample_haar_state",
    "sample_haar_unitary", "schmidt_spectrum", "trace_distance", "trace_norm",
    # symmetries
    "ChargeSector", "CompositeSector", "ParityFlipSector", "ReflectionSector",
    "SectorProjector", "TranslationSector", "TranslationPowerTrace",
    "build_projector", "partial_trace_translation_power", "project_state",
    "reflect", "sample_symmetric_state", "sample_t_invariant_unitary",
    "sector_rank", "sector_trace", "spin_flip", "translate",
    "translation_operator", "translation_reflection_sector",
    # moments
    "haar_moment", "perm_sym_projector", "symmetric_ensemble_moment",
    "z2_sigmax_projected_moment",
    # bases
    "MeasurementBasis", "build_basis", "computational_basis", "global_haar_basis",
    "local_product_basis", "mixed_last_site_basis", "sigma_x_basis",
    "translation_eigenbasis",
    # ensembles
    "ProjectedEnsemble", "ViolationResult", "condition_check", "delta_prime_t",
    "delta_t", "ensemble_moment", "projected_ensemble", "violation",
    # dynamics
    "BaselineResult", "EvolutionPlan", "IsingHamiltonian", "IsingSpec",
    "PowerLawFit", "ScanResult", "build_ising", "deep_thermalization_scan",
    "evolve", "evolve_trajectory", "fit_power_law", "relaxation_time_grid",
    "rmt_baseline",
]
