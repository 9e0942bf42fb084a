"""Shot-based simulator of a photonic variational eigensolver for the
two-qubit lattice Schwinger model."""

__version__ = "0.1.0"

from .config import ConfigError, ExperimentConfig
from .experiments import (
    PcaResult,
    StatsResult,
    convergence_run,
    initial_point_stats,
    mass_sweep,
    noise_sweep,
    pca_experiment,
    pca_project,
    wrap_to_period,
)
from .gates import (
    BELL_STATES,
    ansatz_state,
    basis_rotation,
    bell_invariant_transform,
    compile_basis_change,
    controlled_x,
    hwp,
    initial_state,
    qwp,
    waveplate_unitary,
)
from .linalg import dagger, expectation, hermitian_eigen, kron
from .measurement import (
    EnergyEvaluator,
    MeasurementSetting,
    NoiseConfig,
    apply_channel,
    dephasing_channel,
    drift_injector,
    energy_estimate,
    measurement_settings_for,
    order_parameter_estimate,
    outcome_probabilities,
    sample_shots,
)
from .schwinger import (
    PauliTermSum,
    SchwingerConfig,
    accuracy_delta,
    analytic_spectrum,
    build_h2,
    build_schwinger,
    exact_ground_order_parameter,
    order_parameter_observable,
)
from .spsa import (
    SpsaMeta,
    TrialResult,
    mass_adjust,
    random_initial_point,
    run_vqe,
    schedule,
    spsa_step,
)

__all__ = [
    "__version__",
    "BELL_STATES",
    "ConfigError",
    "EnergyEvaluator",
    "ExperimentConfig",
    "MeasurementSetting",
    "NoiseConfig",
    "PauliTermSum",
    "PcaResult",
    "SchwingerConfig",
    "SpsaMeta",
    "StatsResult",
    "TrialResult",
    "accuracy_delta",
    "convergence_run",
    "initial_point_stats",
    "mass_sweep",
    "noise_sweep",
    "pca_experiment",
    "pca_project",
    "wrap_to_period",
    "analytic_spectrum",
    "ansatz_state",
    "apply_channel",
    "basis_rotation",
    "bell_invariant_transform",
    "build_h2",
    "build_schwinger",
    "compile_basis_change",
    "controlled_x",
    "dagger",
    "dephasing_channel",
    "drift_injector",
    "energy_estimate",
    "exact_ground_order_parameter",
    "expectation",
    "hermitian_eigen",
    "hwp",
    "initial_state",
    "kron",
    "mass_adjust",
    "measurement_settings_for",
    "order_parameter_estimate",
    "outcome_probabilities",
    "qwp",
    "random_initial_point",
    "run_vqe",
    "sample_shots",
    "schedule",
    "spsa_step",
    "waveplate_unitary",
]
