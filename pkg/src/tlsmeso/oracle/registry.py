"""Enumerable validation registry backing the `verify` subcommand.

Each check compares a closed-form rate or spectrum against an
independent evaluation (time-domain ODE, numeric Fourier transform,
Monte-Carlo average, or quadrature) and reports a relative deviation
against its tolerance.  All checks are deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ..constants import HBAR, KB
from ..dissipation import DriveSpec, q_res, q_res_low_intensity, q_rel
from ..dynamics import T2Model, t1_bulk
from ..materials import (angular_avg_coupling, averaged_deformation_potentials,
                         oriented_deformation_potential, silica,
                         silica_ensemble)
from ..noise import ensemble_relaxation_noise, ensemble_resonant_noise
from .bloch import (BlochParams, drive_for_saturation, gamma_res_ode,
                    gamma_res_profile, integrate_bloch, mc_average,
                    qrt_fft_check, relaxation_kernel, relaxation_kernel_ode,
                    thermal_defect_count)

__all__ = ["CheckResult", "ORACLE_REGISTRY", "run_registry"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    deviation: float
    tol: float
    detail: str = ""


def _result(name, deviation, tol, detail=""):
    return CheckResult(name, deviation <= tol, float(deviation), tol, detail)


def _reference_params(gamma_over_gq: float = 0.01) -> BlochParams:
    """A well-separated-scale driven mode + defect for the ODE checks."""
    E = HBAR * 2 * math.pi * 1e9
    T = 0.025
    Gq = 2 * math.pi * 1e6
    T1 = T2 = 2e-6
    tanh = math.tanh(E / (2 * KB * T))
    g0 = math.sqrt(gamma_over_gq * Gq / (2 * T2 * tanh)) * HBAR
    return BlochParams(E=E, g0=g0, Omega_q=2 * math.pi * 1e9, Gamma_q=Gq,
                       T1=T1, T2=T2, T=T)


# --- Bloch-equation checks -------------------------------------------------


def check_undriven_relaxation() -> CheckResult:
    p = _reference_params()
    res = integrate_bloch(p, state0=(0.0, 0.0, 0.0), t_span=(0.0, 5 * p.T1),
                          n_out=200)
    rate = -np.polyfit(res.t, np.log(np.abs(res.S_z - p.w0)), 1)[0]
    dev = abs(rate * p.T1 - 1.0)
    return _result("bloch_undriven_relaxation", dev, 1e-2,
                   f"fitted rate x T1 = {rate * p.T1:.6f}")


def check_gamma_res_closed_form() -> CheckResult:
    p = _reference_params()
    pd = replace(p, f_drive=1e-3 * p.Gamma_q, omega_drive=p.E / HBAR)
    out = gamma_res_ode(pd)
    closed = gamma_res_profile(p, out["saturation"])
    dev = abs(out["gamma_res"] / closed - 1.0)
    return _result("bloch_gamma_res_closed_form", dev, 1e-2,
                   f"ode {out['gamma_res']:.6g} vs closed {closed:.6g} 1/s")


def check_gamma_res_saturation_points() -> CheckResult:
    p = _reference_params()
    devs = []
    for x in (0.1, 1.0, 10.0):
        pd = replace(p, f_drive=drive_for_saturation(p, x),
                     omega_drive=p.E / HBAR)
        out = gamma_res_ode(pd)
        closed = gamma_res_profile(p, out["saturation"])
        devs.append(abs(out["gamma_res"] / closed - 1.0))
    return _result("bloch_gamma_res_saturation_points", max(devs), 1e-2,
                   "on-resonance power broadening at J/J_c = 0.1, 1, 10")


def check_gamma_res_saturation_integral() -> CheckResult:
    """Detuning-integrated absorption vs the closed profile (same grid).

    The integral carries the 1/sqrt(1 + J/J_c) saturation of the
    ensemble resonant-loss channel.
    """
    p = _reference_params()
    deltas = np.linspace(-40 / p.T2, 40 / p.T2, 25)

    def sweep(x):
        f = drive_for_saturation(p, x)
        g_ode, g_cl = [], []
        for d in deltas:
            pd = replace(p, f_drive=f, omega_drive=p.E / HBAR - d)
            out = gamma_res_ode(pd)
            g_ode.append(out["gamma_res"])
            g_cl.append(gamma_res_profile(p, out["saturation"], delta=d))
        return (float(np.trapezoid(g_ode, deltas)),
                float(np.trapezoid(g_cl, deltas)))

    o0, c0 = sweep(1e-6)
    devs = []
    for x in (0.1, 1.0, 10.0):
        o1, c1 = sweep(x)
        devs.append(abs((o1 / o0) / (c1 / c0) - 1.0))
    return _result("bloch_gamma_res_saturation_integral", max(devs), 1e-2,
                   "suppression factor ODE vs closed at J/J_c = 0.1, 1, 10")


def check_gamma_res_detuned() -> CheckResult:
    p = _reference_params()
    delta = 10 / p.T2
    pd = replace(p, f_drive=1e-3 * p.Gamma_q, omega_drive=p.E / HBAR - delta)
    out = gamma_res_ode(pd)
    factor = out["gamma_res"] / gamma_res_profile(p, 0.0)
    dev = abs(factor * (1 + (delta * p.T2) ** 2) - 1.0)
    return _result("bloch_gamma_res_detuned", dev, 5e-2,
                   f"Lorentzian suppression {factor:.4g} at delta T2 = 10")


def check_relaxation_kernel() -> CheckResult:
    devs = []
    for u in (0.1, 1.0, 10.0):
        k = relaxation_kernel_ode(Omega=1e6, T1=u / 1e6)
        devs.append(abs(k / relaxation_kernel(u) - 1.0))
    return _result("bloch_relaxation_kernel", max(devs), 1e-2,
                   "Omega T1 = 0.1, 1, 10 vs u/(1+u^2)")


def check_relaxation_thermal_suppression() -> CheckResult:
    """Nonlinear w0(E) forcing at E = 8 k_B T vs the sech^2 closed form."""
    T = 0.02
    E = 8 * KB * T
    k = relaxation_kernel_ode(Omega=1e6, T1=1e-6, E=E, T=T, mod_depth=1e-3)
    dev = abs(k / relaxation_kernel(1.0) - 1.0)
    return _result("bloch_relaxation_thermal_suppression", dev, 5e-2,
                   "sech^2-scaled forcing reproduces the kernel")


def check_qrt_fft() -> CheckResult:
    T2 = 1e-6
    E = HBAR * 30 / T2
    dev = qrt_fft_check(Delta=E / math.sqrt(2), Delta0=E / math.sqrt(2),
                        T1=1e-6, T2=T2, T=E / (1.5 * KB))
    return _result("qrt_fft", dev, 1e-2,
                   "correlator transform vs three-Lorentzian form")


# --- Monte-Carlo checks ----------------------------------------------------


def check_mc_orientation_average() -> CheckResult:
    mat = silica()
    gl, _ = averaged_deformation_potentials(mat.gamma_tilde, mat.zeta)

    def f(th, ph):
        return oriented_deformation_potential(mat.gamma_tilde, mat.zeta,
                                              "l", th, ph) ** 2

    mean, stderr = mc_average(f, 1_000_000, seed=7)
    dev = abs(mean - gl**2) / (3 * stderr)
    return _result("mc_orientation_average", dev, 1.0,
                   f"|mean - closed| = {abs(mean - gl**2) / stderr:.2f} stderr")


def check_mc_strain_identity() -> CheckResult:
    """<|gamma(n):xi|^2> for a fixed random symmetric strain."""
    mat = silica()
    rng = np.random.Generator(np.random.Philox(3))
    xi = rng.normal(size=(3, 3))
    xi = (xi + xi.T) / 2
    closed = angular_avg_coupling(xi, mat.gamma_tilde, mat.zeta)
    z = mat.zeta

    def f(th, ph):
        n = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph),
                      np.cos(th)], axis=-1)
        # gamma_ij(n) = gamma_tilde [2 zeta n_i n_j + (1 - 2 zeta) delta_ij]
        nxn = np.einsum("si,ij,sj->s", n, xi, n)
        contr = mat.gamma_tilde * (2 * z * nxn + (1 - 2 * z) * np.trace(xi))
        return contr**2

    mean, _ = mc_average(f, 1_000_000, seed=11)
    dev = abs(mean / closed - 1.0)
    return _result("mc_strain_identity", dev, 5e-3,
                   f"MC {mean:.6g} vs closed {closed:.6g}")


# --- anchors and dual-path physics checks ----------------------------------


def check_rabi_boundary() -> CheckResult:
    n = thermal_defect_count(silica_ensemble(), 0.010, 1e-18)
    dev = abs(n / 75.0 - 1.0)
    return _result("rabi_thermal_defect_count", dev, 2e-2,
                   f"P kT V = {n:.2f} at 10 mK, 1 um^3")


def check_t1_bulk_anchor() -> CheckResult:
    mat = silica()
    E = HBAR * 2 * math.pi * 1e9
    rate = t1_bulk(E, 1e-4, None, mat)
    dev = abs(rate / 6360.0 - 1.0)
    return _result("t1_bulk_anchor", dev, 1e-2,
                   f"1 GHz, T -> 0: {rate:.0f} 1/s vs 6360")


def check_t2_echo_anchor() -> CheckResult:
    ens = silica_ensemble()
    model = T2Model(silica(), D=3)
    t2p = 1.0 / model.spectral_diffusion_rate(ens.t2_anchor[1], ens)
    dev = abs(t2p / ens.t2_anchor[0] - 1.0)
    return _result("t2_echo_anchor", dev, 1e-6,
                   f"T2' = {t2p * 1e6:.3f} us at 20 mK")


def check_noise_resonant_dual_path() -> CheckResult:
    ens = silica_ensemble()
    omega, T, t2 = 2 * math.pi * 5e9, 0.010, 1e-6
    closed = ensemble_resonant_noise(omega, T, ens, 1e-18, t2)
    quad = ensemble_resonant_noise(omega, T, ens, 1e-18, t2,
                                   method="quadrature")
    dev = abs(quad / closed - 1.0)
    return _result("noise_resonant_dual_path", dev, 2e-2,
                   f"quadrature/closed = {quad / closed:.4f}")


def check_noise_relaxation_hf_dual_path() -> CheckResult:
    mat, ens = silica(), silica_ensemble()
    T = 0.010
    omega = 2 * math.pi * 1e9  # omega T1_min(kT) >> 10

    def t1_min(E):
        return 1.0 / t1_bulk(E, T, None, mat)

    quad = ensemble_relaxation_noise(omega, T, ens, t1_min, mat)
    asym = ensemble_relaxation_noise(omega, T, ens, t1_min, mat,
                                     mode="hf_asymptote")
    dev = abs(quad / asym - 1.0)
    return _result("noise_relaxation_hf_dual_path", dev, 2e-2,
                   f"quadrature/asymptote = {quad / asym:.4f}")


def check_q_res_low_intensity_dual_path() -> CheckResult:
    mat, ens = silica(), silica_ensemble()
    Omega, T = 2 * math.pi * 1e9, 0.010
    low = q_res_low_intensity(Omega, T, mat, ens)
    full = q_res(Omega, T, mat, ens, t1_min=1e-4, t2=1e-5,
                 drive=DriveSpec(J=0.0))
    dev = abs(full / low - 1.0)
    return _result("q_res_low_intensity_dual_path", dev, 1e-8,
                   f"orientation quadrature at J=0 vs pi P [.] tanh")


def check_q_rel_universal_dual_path() -> CheckResult:
    mat, ens = silica(), silica_ensemble()
    val = q_rel(2 * math.pi * 1e9, 0.010, mat, ens, mode="universal_lf")
    ref = (math.pi * ens.P0 * mat.gamma_l**2
           / (2 * mat.rho * mat.v_l**2))
    dev = abs(val / ref - 1.0)
    return _result("q_rel_universal_dual_path", dev, 1e-3,
                   f"{val:.6e} vs pi P0 gamma_l^2 / (2 rho v_l^2) = {ref:.6e}")


ORACLE_REGISTRY = [
    check_undriven_relaxation,
    check_gamma_res_closed_form,
    check_gamma_res_saturation_points,
    check_gamma_res_saturation_integral,
    check_gamma_res_detuned,
    check_relaxation_kernel,
    check_relaxation_thermal_suppression,
    check_qrt_fft,
    check_mc_orientation_average,
    check_mc_strain_identity,
    check_rabi_boundary,
    check_t1_bulk_anchor,
    check_t2_echo_anchor,
    check_noise_resonant_dual_path,
    check_noise_relaxation_hf_dual_path,
    check_q_res_low_intensity_dual_path,
    check_q_rel_universal_dual_path,
]


def run_registry(names: list[str] | None = None) -> list[CheckResult]:
    """Run all (or the named) registered checks and return their results."""
    results = []
    for check in ORACLE_REGISTRY:
        if names and check.__name__ not in names:
            continue
        try:
            results.append(check())
        except Exception as exc:  # surfaced, not swallowed: a crash is a fail
            results.append(CheckResult(check.__name__, False, math.inf,
                                       0.0, f"error: {exc}"))
    return results
