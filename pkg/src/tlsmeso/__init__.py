"""Tunneling-defect relaxation, noise, and dissipation in confined geometries."""

from .materials import (
    DefectEnsemble,
    ElasticDerived,
    Material,
    SingleDefect,
    averaged_deformation_potentials,
    derived_constants,
    oriented_deformation_potential,
    silica,
    silica_ensemble,
    spectral_diffusion_length,
    zeta_for_coupling_ratio,
)

__version__ = "0.1.0"

from .config import ConfigError, RunConfig, config_hash, load_config  # noqa: E402
from .dissipation import (  # noqa: E402
    INFINITE_JC,
    DriveSpec,
    critical_intensity,
    q_rel,
    q_res,
    q_res_low_intensity,
    q_total,
)
from .dynamics import (  # noqa: E402
    T1Model,
    T2Model,
    purcell_factor,
    t1_bulk,
    t1_cavity,
    t1_dissipative_bulk,
    t1_photon,
    t1_reduced,
    t1_waveguide,
    t2_total,
)
from .noise import (  # noqa: E402
    cavity_relaxation_noise,
    ensemble_relaxation_noise,
    ensemble_resonant_noise,
    freq_noise_scaling,
    single_defect_spectrum,
)
from .spectra import (  # noqa: E402
    ModeSpectrum,
    ResonatorSpectrum,
    bulk_dos,
    resonator_spectrum,
    solutions_at_frequency,
    solve_cylinder_branches,
    solve_plate_branches,
    waveguide_dos,
)
