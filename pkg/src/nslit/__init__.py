"""Matter-wave interference behind an N-slit grating: near-field Talbot
carpets, analytic far-field diffraction, and pilot-wave trajectories."""

from .bohm import (
    IntegratorConfig,
    Trajectory,
    guidance_velocity,
    integrate_batch,
    integrate_trajectory,
    seed_trajectories,
)
from .errors import ConfigError, DomainError, NodeError
from .farfield import (
    FarFieldParams,
    d_of_z,
    dirichlet_ratio,
    envelope_i0,
    farfield_intensity,
    zeta,
)
from .fieldgrid import (
    CrossSection,
    DensityField,
    GridSpec,
    RevivalMetrics,
    cross_section,
    revival_metrics,
    sample_density,
)
from .io import (
    RenderOptions,
    RunConfig,
    export_csv,
    load_config,
    render_carpet,
    write_image,
)
from .wavefunction import (
    BeamParams,
    ComplexAmplitude,
    EvalContext,
    GratingConfig,
    beam_from_wavelength,
    density,
    dispersed_packet,
    packet_psi,
    packet_spectrum,
    psi_and_dpsi,
    sigma_t,
    superposed_psi,
    talbot_length,
)

__version__ = "0.1.0"
