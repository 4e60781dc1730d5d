"""Engineered Fock-ladder interactions and dissipators for a single cavity mode.

Builds full and engineered (upper-bounded, sliced, selective) atom-field
Hamiltonians on truncated Fock spaces, propagates closed and open
dynamics, constructs engineered atomic-reservoir Liouvillians, and
reproduces the validation curves and steady-Fock-state figures through
the bundled scenario presets.
"""

from .hilbert import (
    ATOM,
    FIELD,
    ComplexOperator,
    DensityOperator,
    HilbertLayout,
    LayoutError,
    StateValidityError,
    StateVector,
    annihilation,
    atom_field_layout,
    atom_state,
    atomic_sigma,
    coherent_state,
    embed,
    expectation,
    field_layout,
    field_superposition,
    fock_projector,
    fock_state,
    identity,
    number_operator,
    partial_trace,
    product_state,
    tensor,
    thermal_state,
)
from .raman import (
    DerivedCouplings,
    LadderSpec,
    RamanBranch,
    RamanLadderParams,
    RegimeEntry,
    RegimeReport,
    ResonanceError,
    SelectiveRamanParams,
    TimeDependentHamiltonian,
    analytic_probabilities,
    build_engineered_hamiltonian,
    build_full_hamiltonian,
    check_regime,
    derive_couplings,
    derive_selective,
    ladder_from_conditions,
    ladder_operator,
    raman_params,
    selective_ladder,
    solve_resonance,
)
from .lindblad import (
    DegenerateSteadyStateError,
    IntegrationError,
    IntegratorConfig,
    LeakageError,
    LindbladTerm,
    LiouvillianMatrix,
    TimeGrid,
    Trajectory,
    evolve_density,
    evolve_state,
    liouvillian_matrix,
    steady_state,
)
from .reservoir import (
    AtomInjectionParams,
    EngineeredDissipator,
    ThermalBathParams,
    collision_model_evolve,
    gamma_from_injection,
    selective_dissipators,
    thermal_terms,
    ub_dissipator,
)
from .scenarios import (
    RunResult,
    ScenarioConfig,
    ScenarioValidationError,
    collision_document,
    evaluate_check,
    list_presets,
    load_scenario,
    parse_config,
    preset_document,
    run_scenario,
    series_to_csv,
    summary_to_json,
    sweep,
)
from .observables import (
    ObservableSeries,
    VacuumDominatedError,
    detect_steady,
    fidelity_fock,
    fock_probabilities,
    mandel_q,
    mean_photon,
    purity,
    trace_distance,
)

__version__ = "0.1.0"
