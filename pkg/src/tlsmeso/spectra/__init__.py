"""Phonon mode catalogs: guided branches, bulk DOS, discrete resonators."""

from .branches import (
    CrossSectionSolution,
    DispersionBranch,
    ModeSpectrum,
    branch_eval,
    find_van_hove,
    solutions_at_frequency,
    waveguide_dos,
)
from .bulk import bulk_branch_velocities, bulk_dos
from .cylinder import solve_cylinder_branches, torsional_cutoff_roots
from .plate import solve_plate_branches
from .resonator import ResonatorSpectrum, resonator_spectrum

__all__ = [
    "CrossSectionSolution",
    "DispersionBranch",
    "ModeSpectrum",
    "ResonatorSpectrum",
    "branch_eval",
    "bulk_branch_velocities",
    "bulk_dos",
    "find_van_hove",
    "resonator_spectrum",
    "solutions_at_frequency",
    "solve_cylinder_branches",
    "solve_plate_branches",
    "torsional_cutoff_roots",
    "waveguide_dos",
]
