"""Defect-induced RF dipole-fluctuation power spectra.

Single-defect spectra follow the quantum-regression three-Lorentzian
form; ensemble spectra integrate it over a defect density of states in
(E, phi) polar coordinates.  Asymptotic closed forms cover the resonant
channel, the high-frequency 1/omega^2 relaxation channel, the universal
low-frequency 1/f channel, and the exponentially suppressed resonator
channel.  All spectra are one-sided in omega and per-axis (the dipole
orientation average |d|^2/3 is included).
"""

from __future__ import annotations

import math
import warnings
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .constants import HBAR, KB
from .materials import DefectEnsemble, Material
from .spectra.bulk import SPHERE_SURFACE, bulk_branch_velocities
from .spectra.resonator import ResonatorSpectrum

__all__ = [
    "special_integral_I",
    "special_integral_c",
    "thermal_occupations",
    "single_defect_spectrum",
    "ensemble_resonant_noise",
    "ensemble_relaxation_noise",
    "cavity_relaxation_noise",
    "freq_noise_scaling",
]


# --- special integrals -----------------------------------------------------


@lru_cache(maxsize=None)
def special_integral_I(m: float) -> float:
    """I_m = integral of y^m sech^2(y) coth(y) over y in (0, inf); m > 0."""
    if m <= 0:
        raise ValueError("I_m diverges for m <= 0")
    val, _ = quad(lambda y: y**m / (math.tanh(y) * math.cosh(y) ** 2),
                  0.0, 40.0, limit=200, epsabs=0, epsrel=1e-12)
    return val


@lru_cache(maxsize=None)
def special_integral_c(mu: float) -> float:
    """c_mu = integral of y^mu sech^2(y) over y in (0, inf); c_0 = 1."""
    if mu < 0:
        raise ValueError("mu must be nonnegative")
    val, _ = quad(lambda y: y**mu / math.cosh(y) ** 2,
                  0.0, 40.0, limit=200, epsabs=0, epsrel=1e-12)
    return val


# --- single defect ---------------------------------------------------------


def thermal_occupations(E: float, T: float) -> tuple[float, float]:
    """(p_g, p_e) equilibrium occupations of a two-level defect."""
    x = E / (KB * T)
    p_g = 1.0 / (1.0 + math.exp(-x))
    return p_g, 1.0 - p_g


def single_defect_spectrum(Delta: float, Delta0: float, T1: float, T2: float,
                           T: float, omega, dipole: float) -> np.ndarray:
    """Per-axis dipole power spectrum of one defect (C^2 m^2 s).

    Resonant doublet (weights Delta0^2/E^2 times p_e, p_g) plus the
    zero-centered relaxation Lorentzian of width 1/T1 and weight
    (Delta/E)^2 sech^2(E/2 k_B T).
    """
    if T1 <= 0 or T2 <= 0:
        raise ValueError("T1 and T2 must be positive")
    if T2 > 2 * T1 * (1 + 1e-12):
        raise ValueError("T2 cannot exceed 2 T1")
    E = math.hypot(Delta, Delta0)
    if E <= 0:
        raise ValueError("defect energy must be positive")
    omega = np.asarray(omega, dtype=float)
    p_g, p_e = thermal_occupations(E, T)
    w0 = E / HBAR
    res = (Delta0 / E) ** 2 * (
        p_e * 2 * T2 / (1 + T2**2 * (w0 + omega) ** 2)
        + p_g * 2 * T2 / (1 + T2**2 * (w0 - omega) ** 2))
    rel = (Delta / E) ** 2 / math.cosh(E / (2 * KB * T)) ** 2 \
        * 2 * T1 / (1 + T1**2 * omega**2)
    out = dipole**2 / 3 * (res + rel)
    return out if out.ndim else float(out)


# --- ensembles in idealized bulks ------------------------------------------


def ensemble_resonant_noise(omega: float, T: float, ensemble: DefectEnsemble,
                            V_D: float, t2: float, D: int = 3,
                            method: str = "closed_form") -> float:
    """Resonant-channel ensemble noise (per-axis spectral density).

    closed_form: (pi hbar |d|^2/3) V_D P_D(hbar omega) p_g(hbar omega),
    valid for omega T2 >> 1.  quadrature: energy integral of the
    ground-state Lorentzian against the defect density.
    """
    if omega <= 0:
        raise ValueError("omega must be positive")
    d2 = ensemble_dipole_sq(ensemble)
    E0 = HBAR * omega
    if method == "closed_form":
        p_g, _ = thermal_occupations(E0, T)
        return math.pi * HBAR * d2 / 3 * V_D * ensemble.density(E0, D) * p_g

    def f(E):
        p_g, _ = thermal_occupations(E, T)
        return ensemble.density(E, D) * p_g * t2 / (1 + (omega - E / HBAR) ** 2 * t2**2)

    width = HBAR / t2
    lo = max(E0 - 60 * width, 1e-3 * E0)
    hi = E0 + 60 * width
    val, _ = quad(f, lo, hi, points=[E0], limit=400, epsabs=0, epsrel=1e-10)
    return d2 / 3 * V_D * val


def ensemble_dipole_sq(ensemble: DefectEnsemble) -> float:
    """|d|^2 of the ensemble's defects."""
    if ensemble.dipole <= 0:
        raise ValueError("ensemble dipole magnitude must be positive")
    return ensemble.dipole**2


def relaxation_phi_kernel(a, n: int = 4000):
    """Phi(a) = integral of sqrt(1-s^2) s / (s^4 + a^2) ds over s in (0,1).

    The analytic phi-integral of the relaxation channel with
    T1 = T1_min E^2/Delta0^2; a = omega T1_min.  Phi -> pi/(4a) as a -> 0
    and -> 1/(3 a^2) as a -> inf.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    # substitute u = s^2: 0.5 * int_0^1 sqrt(1-u) du / (u^2 + a^2);
    # resolve the u ~ a peak on a dedicated log grid
    out = np.empty_like(a)
    for i, ai in enumerate(a):
        lo = min(ai * 1e-3, 1e-8)
        u = np.geomspace(max(lo, 1e-300), 1.0, n)
        f = 0.5 * np.sqrt(1 - u) / (u**2 + ai**2)
        out[i] = np.trapezoid(f, u) + 0.5 * u[0] / max(ai**2, 1e-300)
    return out if out.size > 1 else float(out[0])


def ensemble_relaxation_noise(omega: float, T: float, ensemble: DefectEnsemble,
                              t1_min, material: Material, D: int = 3,
                              V_D: float = 1.0,
                              mode: str = "quadrature") -> float:
    """Relaxation-channel ensemble noise (per-axis spectral density).

    t1_min: callable E -> T1_min(E) seconds (fastest defect at energy E).
    Modes: quadrature (full (E, phi) integral), hf_asymptote
    ((k_BT)^(D+1)/omega^2 law), lf_asymptote (universal 1/f law).
    """
    if omega <= 0:
        raise ValueError("omega must be positive")
    d2 = ensemble_dipole_sq(ensemble)
    kT = KB * T
    if mode == "quadrature":
        def f(E):
            t1m = t1_min(E)
            return (ensemble.density(E, D) / math.cosh(E / (2 * kT)) ** 2
                    * t1m * relaxation_phi_kernel(omega * t1m))

        # integrand mass is thermal: sech^2 confines E to a few kT
        val, _ = quad(lambda E: f(E), kT / 200, 60 * kT, limit=400,
                      epsabs=0, epsrel=1e-9)
        return 2 * d2 / 3 * V_D * val
    a_th = omega * t1_min(kT)
    if mode == "hf_asymptote":
        if a_th < 10:
            warnings.warn("hf_asymptote outside validity: omega T1_min(kT) "
                          f"= {a_th:.3g} < 10", stacklevel=2)
        vels = bulk_branch_velocities(D, material)
        w = {"l": (material.gamma_l / material.v_l) ** 2,
             "t": (material.gamma_t / material.v_t) ** 2}
        branch = sum(w[eta] * count / v**D for eta, (v, count) in vels.items())
        rho_D = material.rho * ensemble.L_compact ** (3 - D)
        pref = math.pi * SPHERE_SURFACE[D] / (2 * math.pi) ** D
        return (2 * d2 * V_D * ensemble.density(kT, D) / (9 * omega**2)
                * branch * pref * 2**ensemble.mu
                * (2 * kT) ** (D + 1) / (HBAR ** (D + 1) * rho_D)
                * special_integral_I(D + ensemble.mu))
    if mode == "lf_asymptote":
        if a_th > 0.1:
            warnings.warn("lf_asymptote outside validity: omega T1_min(kT) "
                          f"= {a_th:.3g} > 0.1", stacklevel=2)
        return (math.pi * d2 * V_D / (3 * omega) * ensemble.density(kT, D)
                * kT * 2**ensemble.mu * special_integral_c(ensemble.mu))
    raise ValueError(f"unknown mode {mode!r}")


def cavity_relaxation_noise(omega: float, T: float,
                            resonator: ResonatorSpectrum,
                            ensemble: DefectEnsemble,
                            V_D: float = 1.0) -> float:
    """Relaxation noise of an ensemble inside a discrete resonator.

    Mode sum with 1/sinh(hbar Omega_q / k_B T) thermal weights; freezes
    out exponentially for k_B T below the fundamental mode.
    """
    if resonator.Omega.size == 0:
        raise ValueError("empty resonator spectrum")
    d2 = ensemble_dipole_sq(ensemble)
    mat = resonator.material
    kT = KB * T
    Om = resonator.Omega
    g2 = np.where(resonator.pol == 0, mat.gamma_l**2, mat.gamma_t**2)
    v2 = np.where(resonator.pol == 0, mat.v_l**2, mat.v_t**2)
    dens = np.array([ensemble.density(HBAR * w, 3) for w in Om])
    with np.errstate(over="ignore"):
        terms = (resonator.multiplicity * g2 * Om * dens
                 / (mat.rho * resonator.volume * v2 * np.sinh(HBAR * Om / kT)))
    return float(4 * math.pi * d2 * V_D / (9 * omega**2) * np.sum(terms))


# --- frequency-noise scaling exponents -------------------------------------


def freq_noise_scaling(D: int, mu: float, regime: str) -> dict:
    """Temperature/frequency/power exponents of strongly-interacting-defect
    frequency noise S_nu; exponents only, no magnitudes.
    """
    if D not in (1, 2, 3):
        raise ValueError("D must be 1, 2 or 3")
    if regime == "low_power":
        t_exp = {3: -(1 + mu), 2: -2 * (1 + mu) / 3, 1: "T1_slope"}[D]
        return {"dlnS_dlnT": t_exp, "dlnS_dlnomega": -1.0, "dlnS_dlnP": 0.0}
    if regime == "high_power":
        t_exp = {3: -(1 + mu) / 2, 2: -(1 + mu) / 3, 1: 0.0}[D]
        return {"dlnS_dlnT": t_exp, "dlnS_dlnomega": -1.0, "dlnS_dlnP": -0.5}
    raise ValueError(f"unknown regime {regime!r}")
