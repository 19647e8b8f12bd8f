"""waveclock: closed-form coupled-waveguide velocimetry behind a step
potential, plus a wave-packet simulator for complex (gain/loss) barriers."""

from .constants import HBAR, MEV
from .model import (
    Branch,
    Classification,
    ModelParams,
    Wavenumbers,
    WavefunctionSample,
    ModalEnergies,
    VelocityReport,
    BoundaryMatch,
    SingularModelError,
    WavefunctionDomainError,
    wavenumbers,
    wavenumbers_natural,
    wavefunctions,
    boundary_match,
    relative_population,
    modal_energies,
    velocity_J,
    velocity_S,
    velocity_p,
    velocity_report,
    eq12_speed_ratio,
    schrodinger_residual,
    buttiker_landauer_time,
)
from .oracles import (
    BarrierSpec,
    transfer_matrix_transmission,
    free_gaussian_reference,
)
from .tdse import (
    SimConfig,
    WavePacketState,
    Trajectory,
    SweepResult,
    ConfigError,
    BoundaryContactError,
    StepUnderflowError,
    BarrierNotClearedError,
    default_sim_config,
    init_gaussian,
    potential_profile,
    propagate,
    extract_velocity,
    run_sweep,
    free_reference,
)

__version__ = "0.1.0"
