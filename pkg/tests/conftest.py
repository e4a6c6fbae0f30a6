"""Shared fixtures; expensive mode catalogs are session-scoped."""

import math

import pytest

from tlsmeso.materials import (Material, silica, silica_ensemble,
                               zeta_for_coupling_ratio)
from tlsmeso.spectra import (resonator_spectrum, solve_cylinder_branches,
                             solve_plate_branches)


@pytest.fixture(scope="session")
def mat():
    return silica()


@pytest.fixture(scope="session")
def ens():
    return silica_ensemble()


@pytest.fixture(scope="session")
def mat_equal_coupling(mat):
    """Silica variant with (gamma_l/v_l)^2 = (gamma_t/v_t)^2."""
    zeta = zeta_for_coupling_ratio(mat.v_t / mat.v_l)[0]
    return Material(rho=mat.rho, v_l=mat.v_l, v_t=mat.v_t,
                    gamma_tilde=mat.gamma_tilde, zeta=zeta,
                    dipole=mat.dipole, eps_rel=mat.eps_rel)


@pytest.fixture(scope="session")
def cyl_small(mat_equal_coupling):
    """R = 100 nm cylinder catalog up to 2 GHz (fundamentals only)."""
    return solve_cylinder_branches(100e-9, mat_equal_coupling,
                                   2 * math.pi * 2e9)


@pytest.fixture(scope="session")
def cyl_silica(mat):
    """R = 100 nm plain-silica cylinder catalog up to 2 GHz."""
    return solve_cylinder_branches(100e-9, mat, 2 * math.pi * 2e9)


@pytest.fixture(scope="session")
def cyl_large(mat):
    """R = 100 nm cylinder catalog up to 50 GHz (>= 30 branches)."""
    return solve_cylinder_branches(100e-9, mat, 2 * math.pi * 5e10)


@pytest.fixture(scope="session")
def plate_small(mat):
    """L = 100 nm plate catalog up to 2 GHz."""
    return solve_plate_branches(100e-9, mat, 2 * math.pi * 2e9)


@pytest.fixture(scope="session")
def cube_2um(mat):
    """2 um periodic cube, Q = 1882, modes up to 30 GHz."""
    return resonator_spectrum(2e-6, mat, 1882.0, 2 * math.pi * 3e10)
