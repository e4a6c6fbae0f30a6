"""Defect-induced dissipation: resonant and relaxation absorption.

Resonant absorption is saturable (critical intensity J_c set by T1, T2);
relaxation absorption is not, and sets the dissipation floor.  Both are
evaluated for acoustic and electromagnetic drives in idealized D-bulks,
waveguides, and discrete resonators.  Orientation averages use a product
Gauss-Legendre (theta) x trapezoid (phi) rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad

from .constants import C_LIGHT, EPS0, HBAR, KB
from .materials import (DefectEnsemble, Material, derived_constants,
                        oriented_deformation_potential)
from .noise import special_integral_I, special_integral_c
from .spectra.bulk import SPHERE_SURFACE, bulk_branch_velocities
from .spectra.resonator import ResonatorSpectrum

__all__ = [
    "DriveSpec",
    "QBreakdown",
    "q_res_low_intensity",
    "critical_intensity",
    "q_res",
    "q_rel",
    "q_total",
]


@dataclass(frozen=True)
class DriveSpec:
    """One driven mode: channel, polarization, intensity, geometry knobs."""

    channel: str = "acoustic"  # or "em"
    polarization: str = "l"
    J: float = 0.0  # W/m^2 (or J/m^3 via energy-density convention)
    v_group: Optional[float] = None  # guided modes
    e_l: float = 1.0  # driven-mode elastic energy fractions
    e_t: float = 0.0
    finesse_enhancement: bool = False
    tsm_classic: bool = False

    def __post_init__(self) -> None:
        if self.J < 0:
            raise ValueError("drive intensity must be nonnegative")
        if self.channel not in ("acoustic", "em"):
            raise ValueError(f"unknown channel {self.channel!r}")


@dataclass(frozen=True)
class QBreakdown:
    q_res_inv: float
    q_rel_inv: float
    jc_summary: float
    regime: str = ""

    @property
    def q_total_inv(self) -> float:
        return self.q_res_inv + self.q_rel_inv


# --- orientation grid ------------------------------------------------------


@lru_cache(maxsize=8)
def _orientation_grid(n_theta: int = 64, n_phi: int = 64):
    """(theta, phi, weight) nodes covering the sphere; weights sum to 4 pi."""
    x, wx = np.polynomial.legendre.leggauss(n_theta)
    theta = np.arccos(x)
    phi = (np.arange(n_phi) + 0.5) * (2 * math.pi / n_phi)
    th, ph = np.meshgrid(theta, phi, indexing="ij")
    w = np.repeat(wx[:, None], n_phi, axis=1) * (2 * math.pi / n_phi)
    return th.ravel(), ph.ravel(), w.ravel()


def _oriented_couplings(material: Material, th, ph) -> dict[str, np.ndarray]:
    """gamma_eta(n)^2 on the orientation grid; 't' sums both shear axes."""
    gl = oriented_deformation_potential(material.gamma_tilde, material.zeta,
                                        "l", th, ph)
    gt1 = oriented_deformation_potential(material.gamma_tilde, material.zeta,
                                         "t1", th, ph)
    gt2 = oriented_deformation_potential(material.gamma_tilde, material.zeta,
                                         "t2", th, ph)
    return {"l": gl**2, "t": gt1**2 + gt2**2}


def _coupling_em(material: Material, th) -> np.ndarray:
    """d_eta(n')^2 = 3 |d|^2 cos^2(theta') for a field along z."""
    return 3 * material.dipole**2 * np.cos(th) ** 2


# --- resonant absorption ---------------------------------------------------


def _drive_coupling_constant(material: Material, drive: DriveSpec,
                             rho_D: float, eps_eff: float) -> float:
    """Averaged coupling factor of the driven mode (the {.} bracket)."""
    if drive.channel == "acoustic":
        return (material.gamma_l**2 * drive.e_l / (rho_D * material.v_l**2)
                + material.gamma_t**2 * drive.e_t / (rho_D * material.v_t**2))
    return material.dipole**2 / (3 * EPS0 * eps_eff)


def q_res_low_intensity(Omega: float, T: float, material: Material,
                        ensemble: DefectEnsemble, D: int = 3,
                        drive: DriveSpec = DriveSpec(),
                        eps_eff: Optional[float] = None) -> float:
    """Linear-response resonant loss tangent pi P_D [.] tanh(hbar Omega/2kT)."""
    if Omega <= 0 or T <= 0:
        raise ValueError("Omega and T must be positive")
    rho_D = material.rho * ensemble.L_compact ** (3 - D)
    if eps_eff is None:
        eps_eff = material.eps_rel
    bracket = _drive_coupling_constant(material, drive, rho_D, eps_eff)
    return (math.pi * ensemble.density(HBAR * Omega, D) * bracket
            * math.tanh(HBAR * Omega / (2 * KB * T)))


INFINITE_JC = math.inf  # sentinel for zero-coupling orientations


def critical_intensity(Omega: float, t1_min: float, t2: float,
                       material: Material, ensemble: DefectEnsemble,
                       D: int = 3, channel: str = "acoustic",
                       polarization: str = "l",
                       orientation: Optional[tuple[float, float]] = None,
                       v_group: Optional[float] = None,
                       coupling_sum: Optional[float] = None) -> float:
    """Critical intensity J_c (W/m^2).

    Bulk plane waves: (rho_D v^3/gamma^2 | 3 eps0 sqrt(eps) c/d^2)
    x hbar^2/(2 T1_min T2); orientation=(theta, phi) resolves the
    coupling on one defect axis, otherwise the averaged value is used.
    Guided modes: pass v_group and coupling_sum = sum_eta gamma_eta^2
    e_eta / v_eta^2 for J_c = rho v_g hbar^2 / (2 T1 T2 coupling_sum).
    """
    if t1_min <= 0 or t2 <= 0:
        raise ValueError("T1_min and T2 must be positive")
    rho_D = material.rho * ensemble.L_compact ** (3 - D)
    tscale = HBAR**2 / (2 * t1_min * t2)
    if v_group is not None:
        if coupling_sum is None:
            coupling_sum = (material.gamma_l**2 / material.v_l**2
                            if channel == "acoustic" else None)
        if coupling_sum == 0:
            return INFINITE_JC
        return rho_D * v_group * tscale / coupling_sum
    if channel == "acoustic":
        v = material.v_l if polarization == "l" else material.v_t
        if orientation is None:
            g2 = (material.gamma_l**2 if polarization == "l"
                  else material.gamma_t**2)
        else:
            th, ph = orientation
            if polarization == "l":
                g2 = oriented_deformation_potential(
                    material.gamma_tilde, material.zeta, "l", th, ph) ** 2
            else:
                g2 = (oriented_deformation_potential(
                    material.gamma_tilde, material.zeta, "t1", th, ph) ** 2
                    + oriented_deformation_potential(
                    material.gamma_tilde, material.zeta, "t2", th, ph) ** 2)
        if g2 == 0:
            return INFINITE_JC
        return rho_D * v**3 * tscale / g2
    # EM channel
    d2 = (material.dipole**2 if orientation is None
          else 3 * material.dipole**2 * math.cos(orientation[0]) ** 2)
    if d2 == 0:
        return INFINITE_JC
    return 3 * EPS0 * math.sqrt(material.eps_rel) * C_LIGHT * tscale / d2


def q_res(Omega: float, T: float, material: Material,
          ensemble: DefectEnsemble, t1_min: float, t2: float, D: int = 3,
          drive: DriveSpec = DriveSpec(),
          eps_eff: Optional[float] = None) -> float:
    """Saturable resonant absorption: orientation-averaged
    tanh / sqrt(1 + J/J_c(n)) with the oriented coupling weights.
    Reduces to q_res_low_intensity at J = 0.
    """
    if Omega <= 0 or T <= 0:
        raise ValueError("Omega and T must be positive")
    rho_D = material.rho * ensemble.L_compact ** (3 - D)
    if eps_eff is None:
        eps_eff = material.eps_rel
    P = ensemble.density(HBAR * Omega, D)
    th, ph, w = _orientation_grid()
    tanh = math.tanh(HBAR * Omega / (2 * KB * T))
    tscale = HBAR**2 / (2 * t1_min * t2)
    if drive.channel == "acoustic":
        g2s = _oriented_couplings(material, th, ph)
        total = 0.0
        for pol, e in (("l", drive.e_l), ("t", drive.e_t)):
            if e == 0.0:
                continue
            g2 = g2s[pol]
            v = material.v_l if pol == "l" else material.v_t
            if drive.tsm_classic:
                g2_for_jc = np.full_like(
                    g2, material.gamma_l**2 if pol == "l" else material.gamma_t**2)
            else:
                g2_for_jc = g2
            # J/J_c(n) = J g^2(n) / (rho_D v^3 tscale); g2 -> 0 gives
            # J_c -> inf and the integrand tends to the bare tanh
            sat = np.sqrt(1.0 + drive.J * g2_for_jc / (rho_D * v**3 * tscale))
            total += e * float(np.sum(w * g2 / sat)) / (rho_D * v**2)
        return P / 4 * total * tanh
    d2 = _coupling_em(material, th)
    d2_for_jc = (np.full_like(d2, material.dipole**2) if drive.tsm_classic
                 else d2)
    jc_scale = 3 * EPS0 * math.sqrt(material.eps_rel) * C_LIGHT * tscale
    sat = np.sqrt(1.0 + drive.J * d2_for_jc / jc_scale)
    return (P / 4 * float(np.sum(w * d2 / sat)) / (3 * EPS0 * eps_eff) * tanh)


# --- relaxation absorption -------------------------------------------------


def _oriented_bath_weight(material: Material, D: int, g2l, g2t):
    """Orientation-resolved branch sum sum_eta' gamma'^2(n)/(v'^2 v'_D^D).

    g2t combines both shear axes; in 3D it covers the two transverse
    branches directly, in reduced dimensions the single idealized shear
    branch carries half of it (the per-branch average).
    """
    vels = bulk_branch_velocities(D, material)
    if D == 3:
        return (g2l / material.v_l**5 + g2t / material.v_t**5)
    return (g2l / (material.v_l**2 * vels["l"][0] ** D)
            + 0.5 * g2t / (material.v_t**2 * material.v_t**D))


def _t1max_rate_oriented(material: Material, ensemble: DefectEnsemble, D: int,
                         E, T: float, g2l, g2t):
    """Orientation-resolved bulk decay rate at Delta0 = E (arrays over n)."""
    pref = math.pi * SPHERE_SURFACE[D] / (2 * math.pi) ** D
    rho_D = material.rho * ensemble.L_compact ** (3 - D)
    w = _oriented_bath_weight(material, D, g2l, g2t)
    E = np.asarray(E, dtype=float)
    coth = 1.0 / np.tanh(E / (2 * KB * T))
    return w * pref * E**D * coth / (HBAR ** (D + 1) * rho_D)


def q_rel(Omega: float, T: float, material: Material,
          ensemble: DefectEnsemble, D: int = 3,
          drive: DriveSpec = DriveSpec(), mode: str = "quadrature",
          eps_eff: Optional[float] = None,
          resonator: Optional[ResonatorSpectrum] = None,
          R: Optional[float] = None, L: Optional[float] = None) -> float:
    """Relaxation-absorption inverse quality factor.

    Modes: quadrature (orientation-resolved (E, phi) integral for the
    idealized D-bulk), bulk_hf, universal_lf, flex_1d, flex_2d (closed
    forms), cavity (discrete mode sum with sinh freeze-out).
    """
    if Omega <= 0 or T <= 0:
        raise ValueError("Omega and T must be positive")
    if eps_eff is None:
        eps_eff = material.eps_rel
    rho_D = material.rho * ensemble.L_compact ** (3 - D)
    kT = KB * T
    mu = ensemble.mu
    der = derived_constants(material)
    if drive.channel == "acoustic":
        bracket_lf = (material.gamma_l**2 * drive.e_l
                      / (rho_D * material.v_l**2)
                      + material.gamma_t**2 * drive.e_t
                      / (rho_D * material.v_t**2))
        bracket_flex = material.gamma_l**2 / (material.rho * material.v_l**2)
    else:
        bracket_lf = material.dipole**2 / (3 * EPS0 * eps_eff)
        bracket_flex = bracket_lf

    if mode == "universal_lf":
        return (math.pi * ensemble.density(kT, D) * 2 ** (mu - 1)
                * special_integral_c(mu) * bracket_lf)

    if mode == "bulk_hf":
        # analytic high-frequency Taylor limit of the quadrature mode:
        # the [gamma^4]_{eta eta'} angular correlations enter through the
        # product of the driven-mode coupling and the oriented bath weight
        th, ph, w = _orientation_grid()
        g2s = _oriented_couplings(material, th, ph)
        bath = _oriented_bath_weight(material, D, g2s["l"], g2s["t"])
        if drive.channel == "acoustic":
            cpl = (g2s["l"] * drive.e_l / (rho_D * material.v_l**2)
                   + g2s["t"] * drive.e_t / (rho_D * material.v_t**2))
        else:
            cpl = np.full_like(bath, material.dipole**2 / (3 * EPS0 * eps_eff))
        avg = float(np.sum(w * cpl * bath)) / (4 * math.pi)
        pref = (math.pi * SPHERE_SURFACE[D] / (2 * math.pi) ** D
                * ensemble.density(kT, D) * 2 ** (D + 1 + mu)
                * special_integral_I(D + mu) * kT ** (D + 1))
        return pref * avg / (3 * Omega * kT * HBAR ** (D + 1) * rho_D)

    if mode == "flex_1d":
        if R is None:
            raise ValueError("flex_1d requires the cylinder radius R")
        A = math.pi * R**2
        return (2 ** (1 + mu) / (3 * Omega * material.rho * A)
                * (material.gamma_l**2 / material.v_l**2)
                * ensemble.density(kT, 3) / math.sqrt(der.v_B * R)
                * bracket_flex * kT**0.5 / HBAR**1.5
                * special_integral_I(0.5 + mu))

    if mode == "flex_2d":
        if L is None:
            raise ValueError("flex_2d requires the plate thickness L")
        return (2 ** (1 + mu) / (math.sqrt(3) * Omega * material.rho * L)
                * (material.gamma_l**2 / material.v_l**2)
                * ensemble.density(kT, 3) / (der.v_pl * L)
                * bracket_flex * kT / HBAR**2
                * special_integral_I(1 + mu))

    if mode == "cavity":
        if resonator is None or resonator.Omega.size == 0:
            raise ValueError("cavity mode requires a nonempty resonator")
        Omq = resonator.Omega
        g2q = np.where(resonator.pol == 0, material.gamma_l**2,
                       material.gamma_t**2)
        v2q = np.where(resonator.pol == 0, material.v_l**2, material.v_t**2)
        dens = np.array([ensemble.density(HBAR * wq, 3) for wq in Omq])
        with np.errstate(over="ignore"):
            s = np.sum(resonator.multiplicity * dens * Omq * g2q
                       / (v2q * np.sinh(HBAR * Omq / kT)))
        return (2 * math.pi / (3 * Omega * resonator.volume * kT)
                * bracket_lf * float(s) / material.rho)

    if mode == "quadrature":
        th, ph, w = _orientation_grid(32, 32)
        g2s = _oriented_couplings(material, th, ph)
        g2l, g2t = g2s["l"], g2s["t"]
        if drive.channel == "acoustic":
            cpl = (g2l * drive.e_l / (rho_D * material.v_l**2)
                   + g2t * drive.e_t / (rho_D * material.v_t**2))
        else:
            # dipole axis uncorrelated with the elastic axis: average
            # d^2(n')/3 independently -> |d|^2/3
            cpl = np.full_like(g2l, material.dipole**2 / (3 * EPS0 * eps_eff))

        # phi-grid for the (Delta, Delta0) polar integral; log-spaced to
        # resolve the s ~ sqrt(omega T1_min) shoulder at low frequency
        s = np.geomspace(1e-6, 1.0, 800)
        jac = np.sqrt(np.clip(1 - s**2, 0.0, None)) * s

        def inner(E):
            rate_max = _t1max_rate_oriented(material, ensemble, D, E, T,
                                            g2l, g2t)  # per orientation
            a = Omega / rate_max  # Omega * T1_max-rate^-1 = Omega T1_min(n)
            # Phi integral per orientation: s-grid x orientation broadcast
            val = np.trapezoid(jac[None, :] /
                               (s[None, :] ** 4 + (a[:, None]) ** 2),
                               s, axis=1)
            phi_int = val / rate_max  # T1_min(n) * Phi(a)
            return float(np.sum(w * cpl * phi_int)) / (4 * math.pi)

        dens = ensemble.density
        integrand = lambda E: (dens(E, D) / math.cosh(E / (2 * kT)) ** 2
                               * inner(E))
        val, _ = quad(integrand, kT / 200, 60 * kT, limit=200,
                      epsabs=0, epsrel=1e-8)
        return Omega / kT * val

    raise ValueError(f"unknown mode {mode!r}")


# --- total -----------------------------------------------------------------


def q_total(Omega: float, T: float, material: Material,
            ensemble: DefectEnsemble, t1_min: float, t2: float, D: int = 3,
            drive: DriveSpec = DriveSpec(), rel_mode: str = "quadrature",
            eps_eff: Optional[float] = None,
            resonator: Optional[ResonatorSpectrum] = None,
            R: Optional[float] = None, L: Optional[float] = None,
            max_iter: int = 50, rtol: float = 1e-6) -> QBreakdown:
    """Total inverse quality factor; optional finesse-enhanced intensity.

    With finesse_enhancement the circulating intensity J Q/(2 pi) is
    solved self-consistently (fixed point on Q).
    """
    rel = q_rel(Omega, T, material, ensemble, D, drive, rel_mode,
                eps_eff, resonator, R, L)
    jc = critical_intensity(Omega, t1_min, t2, material, ensemble, D,
                            drive.channel, drive.polarization)

    def res_at(J):
        d = DriveSpec(channel=drive.channel, polarization=drive.polarization,
                      J=J, e_l=drive.e_l, e_t=drive.e_t,
                      tsm_classic=drive.tsm_classic)
        return q_res(Omega, T, material, ensemble, t1_min, t2, D, d, eps_eff)

    if not drive.finesse_enhancement:
        return QBreakdown(res_at(drive.J), rel, jc)
    # fixed point: J_circ = J * Q/(2 pi), Q = 1/(q_res(J_circ) + q_rel)
    q_inv = res_at(drive.J) + rel
    for _ in range(max_iter):
        J_circ = drive.J / (2 * math.pi * q_inv)
        q_new = res_at(J_circ) + rel
        if abs(q_new - q_inv) <= rtol * q_inv:
            return QBreakdown(q_new - rel, rel, jc, regime="finesse")
        q_inv = q_new
    raise RuntimeError("finesse fixed point did not converge")
