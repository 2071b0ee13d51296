"""splitdrift: what unitary splitting schemes do to energy conservation.

Finite-order composition schemes (Trotter, Strang, triple-jump) conserve
the state norm exactly but propagate a shadow Hamiltonian H̃ ≠ H, so for
systems whose split parts fail to commute the energy expectation ⟨H⟩
drifts; the non-unitary short-time-kernel stepper conserves neither.
The library builds the models, runs the schemes, extracts the shadow
corrections, tests observables against the commutant of H, and measures
the drifts, alongside the classical leapfrog counterpart where bounded
energy error is recovered symplectically.
"""

from ._version import __version__
from .analysis import (
    CommutantResult,
    DriftReport,
    GrowthFit,
    OrderEstimate,
    ShadowHamiltonian,
    bch_oracle_residuals,
    bch_truncated,
    commutant_test,
    correction_growth_fit,
    correction_noise_floor,
    default_ladder_dt,
    drift_experiment,
    effective_hamiltonian,
    growth_fit,
    min_timestep_bound,
    observed_order,
    shadow_hamiltonian,
)
from .classical import (
    BENIGN_STATE,
    STIFF_STATE,
    ClassicalState,
    classical_drift_experiment,
    classical_energy,
    leapfrog_jacobian,
    leapfrog_step,
)
from .config import ExperimentConfig, load_config, parse_config
from .errors import (
    BranchCutError,
    ConfigError,
    DimensionMismatchError,
    EigendecompositionError,
    HermiticityError,
    InsufficientDataError,
    NumericalError,
    SplitDriftError,
    UnitarityError,
    UnsupportedOrderError,
)
from .models import (
    GridModel,
    SplitHamiltonian,
    build_grid_hamiltonian,
    gaussian_packet,
    kinetic_matrix,
    momentum_values,
    random_hermitian,
    toy_model,
)
from .operators import (
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    HermitianOperator,
    StateVector,
    UnitaryOperator,
    commutator,
    energy_expectation,
    expm,
    hermitian_commutator,
    logm_unitary,
)
from .schemes import (
    CompositionScheme,
    EulerPathIntegral,
    ExactEvolution,
    ExactScheme,
    Scheme,
    StepOperator,
    apply_scheme,
    build_scheme,
    euler_path_integral_step,
    exact_propagator,
    higher_order_scheme,
    scheme_registry,
    stage_matrices,
    step_operator,
    strang_scheme,
    trotter_scheme,
)

__all__ = [name for name in dir() if not name.startswith("_")]
