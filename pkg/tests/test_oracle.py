"""Time-domain validation engines and the self-check registry."""

import math
from dataclasses import replace

import numpy as np
import pytest

from tlsmeso.constants import HBAR, KB
from tlsmeso.materials import silica_ensemble
from tlsmeso.oracle import (ORACLE_REGISTRY, BlochParams, drive_for_saturation,
                            gamma_res_ode, gamma_res_profile, integrate_bloch,
                            mc_average, qrt_fft_check, rabi_assessment,
                            relaxation_gamma_rel, relaxation_kernel,
                            relaxation_kernel_ode, run_registry,
                            steady_state_gamma_res, thermal_defect_count)


def _params(gamma_over_gq=0.01):
    E = HBAR * 2 * math.pi * 1e9
    T = 0.025
    Gq = 2 * math.pi * 1e6
    T1 = T2 = 2e-6
    tanh = math.tanh(E / (2 * KB * T))
    g0 = math.sqrt(gamma_over_gq * Gq / (2 * T2 * tanh)) * HBAR
    return BlochParams(E=E, g0=g0, Omega_q=2 * math.pi * 1e9, Gamma_q=Gq,
                       T1=T1, T2=T2, T=T)


def test_registry_all_green():
    results = run_registry()
    assert len(results) == len(ORACLE_REGISTRY)
    failed = [r.name for r in results if not r.passed]
    assert not failed, f"failing self-checks: {failed}"


def test_undriven_relaxation_rate():
    p = _params()
    res = integrate_bloch(p, state0=(0.0, 0.0, 0.0),
                          t_span=(0.0, 5 * p.T1), n_out=200)
    rate = -np.polyfit(res.t, np.log(np.abs(res.S_z - p.w0)), 1)[0]
    assert rate * p.T1 == pytest.approx(1.0, rel=1e-2)


def test_driven_steady_state_matches_power_broadened_profile():
    """Criterion: ODE absorption at moderate saturation within 1%."""
    p = _params()
    pd = replace(p, f_drive=drive_for_saturation(p, 1.0),
                 omega_drive=p.E / HBAR)
    out = gamma_res_ode(pd)
    closed = gamma_res_profile(p, out["saturation"])
    assert out["gamma_res"] == pytest.approx(closed, rel=1e-2)
    assert out["saturation"] == pytest.approx(1.0, rel=0.05)
    # quanta-flux audit: drive input balances mode loss + defect absorption
    assert out["power_residual"] < 1e-6


def test_detuned_profile():
    p = _params()
    delta = 3.0 / p.T2
    pd = replace(p, f_drive=1e-3 * p.Gamma_q,
                 omega_drive=p.E / HBAR - delta)
    out = gamma_res_ode(pd)
    assert out["gamma_res"] == pytest.approx(
        gamma_res_profile(p, out["saturation"], delta), rel=1e-2)


def test_saturated_rate_closed_form():
    p = _params()
    g0 = steady_state_gamma_res(p, 0.0)
    assert g0 == pytest.approx(gamma_res_profile(p, 0.0), rel=1e-12)
    assert steady_state_gamma_res(p, 3.0) == pytest.approx(g0 / 2.0,
                                                           rel=1e-12)


def test_relaxation_kernel_ode_points():
    """Criterion: modulation-ODE kernel matches u/(1+u^2) at u = .1, 1, 10."""
    T1 = 1e-6
    for u in (0.1, 1.0, 10.0):
        got = relaxation_kernel_ode(u / T1, T1)
        assert got == pytest.approx(relaxation_kernel(u), rel=1e-2)


def test_relaxation_kernel_ode_thermal_form():
    """With a finite splitting the sech^2 slope divides out."""
    T1, u = 1e-6, 1.0
    E = 3 * KB * 0.025
    got = relaxation_kernel_ode(u / T1, T1, E=E, T=0.025)
    assert got == pytest.approx(relaxation_kernel(u), rel=1e-2)


def test_relaxation_gamma_rel_peaks_at_unit_kernel():
    E, T = 2 * KB * 0.02, 0.02
    g = 1e-26
    rates = [relaxation_gamma_rel(g, E, T, u / 1e-6, 1e-6)[0]
             for u in (0.3, 1.0, 3.0)]
    assert rates[1] > rates[0] and rates[1] > rates[2]
    assert all(r > 0 for r in rates)


def test_qrt_fft_within_one_percent():
    """Criterion: numeric correlator transform agrees to < 1%."""
    w = 2 * math.pi * 1e8
    # resonant-dominated and mixed symmetric/antisymmetric cases
    assert qrt_fft_check(0.0, HBAR * w, 2e-7, 4e-7, 0.010) < 1e-2
    E = HBAR * w
    assert qrt_fft_check(0.6 * E, 0.8 * E, 2e-7, 2e-7, 0.010) < 1e-2


def test_thermal_defect_count_anchor():
    """Criterion: ~75 thermally active defects per um^3 at 10 mK."""
    n = thermal_defect_count(silica_ensemble(), 0.010, 1e-18)
    assert n == pytest.approx(75.0, rel=0.02)


def test_rabi_assessment_regimes():
    bath = rabi_assessment(2 * math.pi * 2e6, 1e-18)
    assert bath["regime"] == "bath" and bath["N_res"] == pytest.approx(2.0)
    rabi = rabi_assessment(2 * math.pi * 0.2e6, 1e-18)
    assert rabi["regime"] == "rabi"
    # detuning-only oscillation frequency
    E = HBAR * 2 * math.pi * 1.0e9
    out = rabi_assessment(2 * math.pi * 0.2e6, 1e-18,
                          Omega_q=2 * math.pi * 1.1e9, E=E, Delta0=E,
                          coupling=0.0, N=0.0)
    assert out["Omega_Rabi"] == pytest.approx(2 * math.pi * 0.1e9, rel=1e-9)


def test_mc_average_reproducible_and_converges():
    f = lambda th, ph: np.cos(th) ** 2
    m1, s1 = mc_average(f, 20000, seed=7)
    m2, s2 = mc_average(f, 20000, seed=7)
    assert m1 == m2 and s1 == s2
    assert m1 == pytest.approx(1.0 / 3.0, abs=4 * s1)
    m3, _ = mc_average(f, 20000, seed=8)
    assert m3 != m1
    # position sampling stays inside the box
    g = lambda th, ph, xyz: (xyz >= 0).all(axis=1) & (xyz <= [1, 2, 3]).all(axis=1)
    frac, _ = mc_average(g, 2000, seed=0, positions=True, box=(1.0, 2.0, 3.0))
    assert frac == 1.0


def test_oracle_input_validation():
    p = _params()
    with pytest.raises(ValueError):
        gamma_res_ode(p)  # no drive
    with pytest.raises(ValueError):
        BlochParams(E=1e-25, g0=0.0, Omega_q=1e9, Gamma_q=1e8,
                    T1=1e-6, T2=1e-6, T=0.01)  # scale separation
    with pytest.raises(ValueError):
        BlochParams(E=1e-25, g0=0.0, Omega_q=1e9, Gamma_q=0.0,
                    T1=1e-6, T2=3e-6, T=0.01)  # T2 > 2 T1
    with pytest.raises(ValueError):
        mc_average(lambda th, ph: th, 10)
