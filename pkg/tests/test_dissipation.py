"""Resonant/relaxation absorption, critical intensities, Q budgets."""

import math

import numpy as np
import pytest
from scipy.stats import linregress

from tlsmeso.constants import EPS0, HBAR, KB
from tlsmeso.dissipation import (INFINITE_JC, DriveSpec, critical_intensity,
                                 q_rel, q_res, q_res_low_intensity, q_total)
from tlsmeso.dynamics import T2Model, t1_bulk, t2_total
from tlsmeso.materials import silica, silica_ensemble


def _t1_t2(Omega, T, mat, ens):
    t1_min = 1.0 / t1_bulk(HBAR * Omega, T, None, mat)
    t2 = t2_total(HBAR * Omega, T, 1.0 / t1_min, T2Model(mat, D=3), ens)
    return t1_min, t2


def test_resonant_low_intensity_anchor():
    """pi P0 gamma_l^2 / (rho v_l^2) with tanh -> 1 at low temperature."""
    mat, ens = silica(), silica_ensemble()
    got = q_res_low_intensity(2 * math.pi * 1e9, 1e-4, mat, ens)
    assert got == pytest.approx(5.649268e-4, rel=1e-6)
    want = (math.pi * ens.P0 * mat.gamma_l**2 / (mat.rho * mat.v_l**2))
    assert got == pytest.approx(want, rel=1e-9)


def test_resonant_tanh_temperature_dependence():
    mat, ens = silica(), silica_ensemble()
    Om = 2 * math.pi * 1e9
    cold = q_res_low_intensity(Om, 1e-4, mat, ens)
    warm = q_res_low_intensity(Om, 0.10, mat, ens)
    x = HBAR * Om / (2 * KB * 0.10)
    assert warm / cold == pytest.approx(math.tanh(x), rel=1e-4)


def test_q_res_reduces_to_linear_response_at_zero_drive():
    """Orientation-averaged saturable form at J = 0, both channels."""
    mat, ens = silica(), silica_ensemble()
    Om, T = 2 * math.pi * 1e9, 0.010
    t1_min, t2 = _t1_t2(Om, T, mat, ens)
    for channel in ("acoustic", "em"):
        d = DriveSpec(channel=channel)
        assert q_res(Om, T, mat, ens, t1_min, t2, drive=d) == pytest.approx(
            q_res_low_intensity(Om, T, mat, ens, drive=d), rel=1e-6)


def test_critical_intensity_anchor():
    """Longitudinal acoustic J_c at 1 GHz / 10 mK is ~2.5e-8 W/m^2."""
    mat, ens = silica(), silica_ensemble()
    Om, T = 2 * math.pi * 1e9, 0.010
    t1_min, t2 = _t1_t2(Om, T, mat, ens)
    jc = critical_intensity(Om, t1_min, t2, mat, ens)
    assert jc == pytest.approx(2.527e-8, rel=1e-3)
    want = (mat.rho * mat.v_l**3 * HBAR**2
            / (2 * t1_min * t2 * mat.gamma_l**2))
    assert jc == pytest.approx(want, rel=1e-12)


def test_critical_intensity_em_channel():
    from tlsmeso.constants import C_LIGHT
    mat, ens = silica(), silica_ensemble()
    Om, T = 2 * math.pi * 1e9, 0.010
    t1_min, t2 = _t1_t2(Om, T, mat, ens)
    jc = critical_intensity(Om, t1_min, t2, mat, ens, channel="em")
    want = (3 * EPS0 * math.sqrt(mat.eps_rel) * C_LIGHT * HBAR**2
            / (2 * t1_min * t2 * mat.dipole**2))
    assert jc == pytest.approx(want, rel=1e-12)


def test_critical_intensity_guided_and_sentinel():
    mat, ens = silica(), silica_ensemble()
    Om, T = 2 * math.pi * 1e9, 0.010
    t1_min, t2 = _t1_t2(Om, T, mat, ens)
    cs = mat.gamma_l**2 / mat.v_l**2
    jc = critical_intensity(Om, t1_min, t2, mat, ens, D=1, v_group=5746.0,
                            coupling_sum=cs)
    rho_1 = mat.rho * ens.L_compact**2
    assert jc == pytest.approx(
        rho_1 * 5746.0 * HBAR**2 / (2 * t1_min * t2 * cs), rel=1e-12)
    assert critical_intensity(Om, t1_min, t2, mat, ens, v_group=5746.0,
                              coupling_sum=0.0) is INFINITE_JC


def test_q_res_saturation_monotone():
    mat, ens = silica(), silica_ensemble()
    Om, T = 2 * math.pi * 1e9, 0.010
    t1_min, t2 = _t1_t2(Om, T, mat, ens)
    jc = critical_intensity(Om, t1_min, t2, mat, ens)
    vals = [q_res(Om, T, mat, ens, t1_min, t2, drive=DriveSpec(J=J))
            for J in (0.0, 0.1 * jc, jc, 10 * jc, 1e3 * jc)]
    assert all(a > b > 0 for a, b in zip(vals, vals[1:]))


def test_q_res_classic_saturation_closed_form():
    """Uniform-J_c variant collapses to tanh / sqrt(1 + J/J_c)."""
    mat, ens = silica(), silica_ensemble()
    Om, T = 2 * math.pi * 1e9, 0.010
    t1_min, t2 = _t1_t2(Om, T, mat, ens)
    jc = critical_intensity(Om, t1_min, t2, mat, ens)
    for J in (0.3 * jc, 3 * jc, 30 * jc):
        got = q_res(Om, T, mat, ens, t1_min, t2,
                    drive=DriveSpec(J=J, tsm_classic=True))
        want = q_res_low_intensity(Om, T, mat, ens) / math.sqrt(1 + J / jc)
        assert got == pytest.approx(want, rel=1e-9)


def test_relaxation_universal_low_frequency_value():
    """Criterion: flat low-frequency floor pi P0 c(mu) [.] 2^(mu-1)."""
    mat, ens = silica(), silica_ensemble()
    got = q_rel(2 * math.pi * 1e9, 0.010, mat, ens, mode="universal_lf")
    assert got == pytest.approx(2.824634e-4, rel=1e-3)
    assert got == pytest.approx(
        0.5 * math.pi * ens.P0 * mat.gamma_l**2 / (mat.rho * mat.v_l**2),
        rel=1e-9)


def test_relaxation_universal_independent_of_dimension():
    """Criterion: the low-frequency floor is the same for D = 1, 2, 3."""
    mat, ens = silica(), silica_ensemble()
    Om, T = 2 * math.pi * 0.005, 0.010
    u = q_rel(Om, T, mat, ens, D=3, mode="universal_lf")
    for D in (1, 2, 3):
        assert q_rel(Om, T, mat, ens, D=D,
                     mode="universal_lf") == pytest.approx(u, rel=1e-12)
        assert q_rel(Om, T, mat, ens, D=D,
                     mode="quadrature") == pytest.approx(u, rel=0.05)


def test_relaxation_hf_matches_quadrature():
    mat, ens = silica(), silica_ensemble()
    Om, T = 2 * math.pi * 1e9, 0.010
    hf = q_rel(Om, T, mat, ens, mode="bulk_hf")
    qu = q_rel(Om, T, mat, ens, mode="quadrature")
    assert qu == pytest.approx(hf, rel=0.005)


def test_relaxation_floor_temperature_slopes():
    """Criterion: T^(1/2+mu), T^(1+mu), T^(D+mu) floors, slopes to 0.05."""
    mat = silica()
    ens = silica_ensemble(mu=0.3)
    Om = 2 * math.pi * 1e9
    Ts = np.geomspace(1e-3, 1e-2, 7)
    cases = (("flex_1d", {"R": 100e-9}, 0.5 + 0.3),
             ("flex_2d", {"L": 50e-9}, 1.0 + 0.3),
             ("bulk_hf", {}, 3.0 + 0.3))
    for mode, kw, expo in cases:
        q = [q_rel(Om, T, mat, ens, mode=mode, **kw) for T in Ts]
        slope = linregress(np.log(Ts), np.log(q)).slope
        assert slope == pytest.approx(expo, abs=0.05)


def test_relaxation_cavity_freezeout(cube_2um):
    mat, ens = silica(), silica_ensemble()
    Om = 2 * math.pi * 1e9
    q5 = q_rel(Om, 0.005, mat, ens, mode="cavity", resonator=cube_2um)
    q15 = q_rel(Om, 0.015, mat, ens, mode="cavity", resonator=cube_2um)
    assert 0 < q5 < 1e-3 * q15


def test_q_total_breakdown_and_finesse():
    mat, ens = silica(), silica_ensemble()
    Om, T = 2 * math.pi * 1e9, 0.010
    t1_min, t2 = _t1_t2(Om, T, mat, ens)
    jc = critical_intensity(Om, t1_min, t2, mat, ens)
    plain = q_total(Om, T, mat, ens, t1_min, t2,
                    drive=DriveSpec(J=10 * jc), rel_mode="bulk_hf")
    assert plain.q_total_inv == pytest.approx(
        plain.q_res_inv + plain.q_rel_inv, rel=1e-12)
    assert plain.jc_summary == pytest.approx(jc, rel=1e-12)
    fin = q_total(Om, T, mat, ens, t1_min, t2,
                  drive=DriveSpec(J=10 * jc, finesse_enhancement=True),
                  rel_mode="bulk_hf")
    # circulating intensity J Q / (2 pi) >> J: deeper saturation
    assert fin.q_res_inv < plain.q_res_inv
    assert fin.regime == "finesse"


def test_dissipation_input_validation():
    mat, ens = silica(), silica_ensemble()
    with pytest.raises(ValueError):
        DriveSpec(J=-1.0)
    with pytest.raises(ValueError):
        DriveSpec(channel="thermal")
    with pytest.raises(ValueError):
        q_rel(2 * math.pi * 1e9, 0.01, mat, ens, mode="nope")
    with pytest.raises(ValueError):
        q_rel(2 * math.pi * 1e9, 0.01, mat, ens, mode="flex_1d")
    with pytest.raises(ValueError):
        q_res_low_intensity(-1.0, 0.01, mat, ens)
