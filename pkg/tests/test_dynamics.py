"""Defect relaxation (T1) across geometries and dephasing (T2)."""

import dataclasses
import math
import warnings

import numpy as np
import pytest

from tlsmeso.constants import HBAR, KB
from tlsmeso.dynamics import (T1Model, T2Model, purcell_factor, t1_bulk,
                              t1_cavity, t1_dissipative_bulk, t1_photon,
                              t1_reduced, t1_waveguide, t2_total)
from tlsmeso.materials import silica, silica_ensemble
from tlsmeso.spectra import ModeSpectrum


def _nondispersive_only(spectrum):
    """Catalog restricted to the torsional + compressional fundamentals."""
    keep = [b for b in spectrum.branches
            if b.family in ("torsional", "compressional")
            and b.Omega_co == 0.0]
    return dataclasses.replace(spectrum, branches=keep, van_hove=[])


def test_bulk_3d_anchor():
    """1 GHz, Delta0 = E, T -> 0: ~6.4e3 1/s."""
    rate = t1_bulk(HBAR * 2 * math.pi * 1e9, 1e-4, None, silica())
    assert rate == pytest.approx(6360.0, rel=0.01)


def test_bulk_frequency_scaling():
    mat = silica()
    for D, expo in ((1, 1.0), (2, 2.0), (3, 3.0)):
        r1 = t1_bulk(HBAR * 2 * math.pi * 1e9, 1e-4, None, mat, D=D)
        r2 = t1_bulk(HBAR * 2 * math.pi * 2e9, 1e-4, None, mat, D=D)
        # Delta0 = E default: rate ~ E^(D-2) * E^2 = E^D
        assert r2 / r1 == pytest.approx(2.0**expo, rel=1e-6)


def test_bulk_delta0_dependence():
    mat = silica()
    E = HBAR * 2 * math.pi * 1e9
    full = t1_bulk(E, 0.01, None, mat)
    half = t1_bulk(E, 0.01, 0.5 * E, mat)
    assert half == pytest.approx(0.25 * full, rel=1e-12)


def test_bulk_thermal_stimulation():
    mat = silica()
    E = HBAR * 2 * math.pi * 1e9
    cold = t1_bulk(E, 1e-4, None, mat)
    hot = t1_bulk(E, 1.0, None, mat)
    x = E / (2 * KB * 1.0)
    assert hot / cold == pytest.approx(1 / math.tanh(x), rel=1e-4)


def test_guided_fundamentals_match_idealized_1d(cyl_small,
                                                mat_equal_coupling):
    """Criterion: non-dispersive guided sum = idealized 1D bulk to 1%."""
    spec = _nondispersive_only(cyl_small)
    R = cyl_small.geometry["R"]
    L1 = math.sqrt(math.pi * R**2)
    T = 0.010
    for f in (5e6, 5e7, 2e8):
        E = HBAR * 2 * math.pi * f
        got = t1_waveguide(E, T, None, spec)
        want = t1_bulk(E, T, None, mat_equal_coupling, D=1, L_compact=L1)
        assert got == pytest.approx(want, rel=0.01)


def test_gamma_over_v_equal_approximation(cyl_small):
    """For the coupling-matched material both approximations coincide."""
    E = HBAR * 2 * math.pi * 2e8
    full = t1_waveguide(E, 0.01, None, cyl_small)
    approx = t1_waveguide(E, 0.01, None, cyl_small, "gamma_over_v_equal")
    assert approx == pytest.approx(full, rel=1e-9)


def test_reduced_vs_full_cylinder(cyl_small, mat_equal_coupling):
    """Closed form tracks the full sum to 20% below Omega_co / 10.

    The closed form carries a single gamma_l^2/v_l^2 coupling, so the
    criterion range uses the coupling-matched material (as in the
    low-frequency comparison figure)."""
    R = cyl_small.geometry["R"]
    mat = mat_equal_coupling
    first_cutoff = 2.029 * mat.v_t / R
    T = 0.010
    for Om in np.geomspace(first_cutoff / 100, first_cutoff / 10, 5):
        E = HBAR * Om
        full = t1_waveguide(E, T, None, cyl_small)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            red = t1_reduced(E, T, None, {"kind": "cylinder", "R": R}, mat)
        assert red == pytest.approx(full, rel=0.20)


def test_reduced_vs_full_cylinder_plain_silica(cyl_silica, mat):
    """Plain silica at the module's check point Omega_co / 20."""
    R = cyl_silica.geometry["R"]
    Om = 2.029 * mat.v_t / R / 20
    E = HBAR * Om
    full = t1_waveguide(E, 0.010, None, cyl_silica)
    red = t1_reduced(E, 0.010, None, {"kind": "cylinder", "R": R}, mat)
    assert red == pytest.approx(full, rel=0.20)


def test_reduced_warns_near_cutoff(mat):
    R = 100e-9
    E = HBAR * 2.029 * mat.v_t / R * 0.9
    with pytest.warns(UserWarning):
        t1_reduced(E, 0.01, None, {"kind": "cylinder", "R": R}, mat)


def test_cavity_on_resonance_is_purcell_times_bulk(cube_2um, mat):
    """Criterion: on-resonance cavity rate = Purcell x per-branch bulk, 5%."""
    Om1 = float(cube_2um.Omega[0])
    T = 0.010
    E = HBAR * Om1
    got = t1_cavity(Om1, T, None, cube_2um)
    # per-branch bulk rate of one transverse branch at Delta0 = E
    bulk_t = (mat.gamma_t**2 / mat.v_t**5 * E**3
              / (2 * math.pi * HBAR**4 * mat.rho)
              / math.tanh(E / (2 * KB * T)))
    # every degenerate mode at Omega1 contributes one Purcell unit
    n_degenerate = float(np.sum(cube_2um.multiplicity[
        np.abs(cube_2um.Omega - Om1) < 1e-6 * Om1]))
    want = n_degenerate * purcell_factor(cube_2um, 0) * bulk_t
    assert got == pytest.approx(want, rel=0.05)


def test_cavity_off_resonance_suppressed(cube_2um):
    Om1 = float(cube_2um.Omega[0])
    T = 0.010
    on = t1_cavity(Om1, T, None, cube_2um)
    off = t1_cavity(0.96 * Om1, T, None, cube_2um)
    assert on / off > 1e3


def test_cavity_zero_subtraction_static_limit(cube_2um):
    """Without subtraction a static tail survives; with it the low-omega
    response is far smaller."""
    T = 0.010
    omega = float(cube_2um.Omega[0]) * 1e-3
    raw = t1_cavity(omega, T, None, cube_2um, subtract_zero=False)
    sub = t1_cavity(omega, T, None, cube_2um, subtract_zero=True)
    assert abs(sub) < 1e-3 * raw


def test_photon_3d_textbook_form():
    from tlsmeso.constants import C_LIGHT, EPS0
    mat = silica()
    E = HBAR * 2 * math.pi * 5e9
    T = 1e-4
    got = t1_photon(E, T, None, mat)
    omega = E / HBAR
    want = (mat.dipole**2 * omega**3 * math.sqrt(mat.eps_rel)
            / (3 * math.pi * EPS0 * HBAR * C_LIGHT**3))
    assert got == pytest.approx(want, rel=1e-10)


def test_photon_much_slower_than_phonon():
    mat = silica()
    E = HBAR * 2 * math.pi * 1e9
    assert t1_photon(E, 0.01, None, mat) < 1e-4 * t1_bulk(E, 0.01, None, mat)


def test_dissipative_bulk_limits():
    mat = silica()
    E = HBAR * 2 * math.pi * 1e9
    Lambda_c = mat.v_l / 1e-10
    clean, cut0 = t1_dissipative_bulk(E, 0.01, 0.0, Lambda_c, mat)
    assert cut0 == 0.0
    assert clean == pytest.approx(t1_bulk(E, 0.01, None, mat), rel=1e-6)
    total, cut = t1_dissipative_bulk(E, 0.01, 2 * math.pi * 1.0, Lambda_c, mat)
    assert 1e-7 < cut / (total - cut) < 1e-3


def test_t2_anchor_and_total():
    ens = silica_ensemble()
    model = T2Model(silica(), D=3)
    rate = model.spectral_diffusion_rate(0.020, ens)
    assert 1.0 / rate == pytest.approx(14e-6, rel=1e-6)
    # T2 never exceeds 2 T1
    E = HBAR * 2 * math.pi * 1e9
    t1r = t1_bulk(E, 0.020, None, silica())
    t2 = t2_total(E, 0.020, t1r, model, ens)
    assert t2 <= 2.0 / t1r + 1e-12


def test_t2_temperature_scaling_3d():
    ens = silica_ensemble()
    model = T2Model(silica(), D=3)
    r1 = model.spectral_diffusion_rate(0.010, ens)
    r2 = model.spectral_diffusion_rate(0.020, ens)
    assert r2 / r1 == pytest.approx(2.0, rel=1e-6)


def test_t1model_dispatch(cyl_silica, cube_2um, mat):
    E = HBAR * 2 * math.pi * 5e8
    assert T1Model(geometry=cyl_silica).rate(E, 0.01) == pytest.approx(
        t1_waveguide(E, 0.01, None, cyl_silica), rel=1e-12)
    assert T1Model(geometry=cube_2um).rate(E, 0.01) == pytest.approx(
        t1_cavity(E / HBAR, 0.01, None, cube_2um), rel=1e-12)
    g = {"kind": "bulk", "D": 3, "material": mat}
    assert T1Model(geometry=g).rate(E, 0.01) == pytest.approx(
        t1_bulk(E, 0.01, None, mat), rel=1e-12)


def test_two_level_validation():
    mat = silica()
    with pytest.raises(ValueError):
        t1_bulk(-1.0, 0.01, None, mat)
    with pytest.raises(ValueError):
        t1_bulk(1e-25, 0.01, 2e-25, mat)  # Delta0 > E
    with pytest.raises(ValueError):
        t1_bulk(1e-25, -0.01, None, mat)
