"""Defect relaxation (T1) and dephasing (T2) in confined geometries.

T1 variants cover idealized D-dimensional bulks, guided 1D/2D waveguide
sums, the small-radius closed forms, discrete resonators (with the
acoustic Purcell factor), the photon emission channel, and a lossy-bulk
diagnostic.  T2 combines the resonant phonon contribution with spectral
diffusion, whose strength is calibrated once against the phonon-echo
measurement (14 us at 20 mK in silica) and rescaled across dimensions.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .constants import C_LIGHT, EPS0, HBAR, KB
from .materials import DefectEnsemble, Material, derived_constants, \
    spectral_diffusion_length
from .spectra.branches import ModeSpectrum, solutions_at_frequency
from .spectra.bulk import SPHERE_SURFACE, bulk_branch_velocities
from .spectra.resonator import ResonatorSpectrum


def _coth(x):
    return 1.0 / np.tanh(x)


def _check_two_level(E: float, T: float, Delta0: Optional[float]) -> float:
    if E <= 0:
        raise ValueError("E must be positive")
    if T <= 0:
        raise ValueError("T must be positive")
    if Delta0 is None:
        Delta0 = E  # fastest-relaxing defect
    if Delta0 > E * (1 + 1e-12):
        raise ValueError("Delta0 cannot exceed E")
    return Delta0


# --- bulk and guided decay -------------------------------------------------


def t1_bulk(E: float, T: float, Delta0: Optional[float], material: Material,
            D: int = 3, L_compact: float = 50e-9) -> float:
    """Phonon emission rate in an idealized D-dimensional bulk.

    Per-branch weights are (gamma_eta / v_eta)^2 with the idealized
    reduced-dimension branches traveling at the bar (1D) or plate (2D)
    velocity for the compression-like branch and v_t for shear.
    """
    Delta0 = _check_two_level(E, T, Delta0)
    if D not in (1, 2, 3):
        raise ValueError("D must be 1, 2 or 3")
    vels = bulk_branch_velocities(D, material)
    gl, gt = material.gamma_l, material.gamma_t
    w = {"l": (gl / material.v_l) ** 2, "t": (gt / material.v_t) ** 2}
    branch_sum = sum(w[eta] * count / v**D for eta, (v, count) in vels.items())
    rho_D = material.rho * L_compact ** (3 - D)
    pref = math.pi * SPHERE_SURFACE[D] / (2 * math.pi) ** D
    return (branch_sum * pref * E ** (D - 2) * Delta0**2
            * _coth(E / (2 * KB * T)) / (HBAR ** (D + 1) * rho_D))


def t1_waveguide(E: float, T: float, Delta0: Optional[float],
                 spectrum: ModeSpectrum,
                 approximation: str = "full_fractions") -> float:
    """Decay rate from the guided-mode sum of a cylinder (1D) or plate (2D)."""
    Delta0 = _check_two_level(E, T, Delta0)
    if approximation not in ("full_fractions", "gamma_over_v_equal"):
        raise ValueError(f"unknown approximation {approximation!r}")
    Omega = E / HBAR
    if Omega > spectrum.Omega_max:
        raise ValueError(
            f"E/hbar = {Omega:.3e} rad/s exceeds the catalog Omega_max = "
            f"{spectrum.Omega_max:.3e}; rebuild the spectrum with a larger cap")
    mat = spectrum.geometry["material"]
    gl2 = mat.gamma_l**2
    gt2 = mat.gamma_t**2
    glv2 = gl2 / mat.v_l**2
    coth = _coth(E / (2 * KB * T))
    total = 0.0
    for sol in solutions_at_frequency(spectrum, Omega):
        if approximation == "gamma_over_v_equal":
            coupling = glv2  # e_l + e_t = 1
        else:
            coupling = gl2 * sol.e_l / mat.v_l**2 + gt2 * sol.e_t / mat.v_t**2
        if spectrum.dimension == 1:
            total += coupling / abs(sol.v_g)
        else:
            total += coupling * Omega / (2 * sol.v_p * abs(sol.v_g))
    # common factors; 1D: 1/(hbar^2 rho A E) per solution, 2D: 1/(hbar^2 rho L E)
    if spectrum.dimension == 1:
        area = math.pi * spectrum.geometry["R"] ** 2
        return total * Delta0**2 * coth / (HBAR**2 * mat.rho * area * E)
    L = spectrum.geometry["L"]
    return total * Delta0**2 * coth / (HBAR**2 * mat.rho * L * E)


def t1_reduced(E: float, T: float, Delta0: Optional[float],
               geometry: dict, material: Material) -> float:
    """Small cross-section closed forms (fundamental branches only).

    geometry: {'kind': 'cylinder', 'R': ...} or {'kind': 'plate', 'L': ...}.
    Valid well below the first cutoff; warns otherwise.
    """
    Delta0 = _check_two_level(E, T, Delta0)
    der = derived_constants(material)
    Omega = E / HBAR
    base = (Omega * material.gamma_l**2 / (HBAR * material.rho * material.v_l**2)
            * _coth(E / (2 * KB * T)) * (Delta0 / E) ** 2)
    kind = geometry["kind"]
    if kind == "cylinder":
        R = geometry["R"]
        first_cutoff = 2.029 * material.v_t / R  # lowest flexural cutoff scale
        if Omega > 0.5 * first_cutoff:
            warnings.warn("t1_reduced: E approaches the first cutoff; "
                          "closed form loses validity", stacklevel=2)
        area = math.pi * R**2
        geom = (1.0 / der.v_B + 1.0 / material.v_t
                + math.sqrt(2.0 / (der.v_B * Omega * R))) / area
        return base * geom
    if kind == "plate":
        L = geometry["L"]
        if Omega > 0.5 * math.pi * material.v_t / L:
            warnings.warn("t1_reduced: E approaches the first cutoff; "
                          "closed form loses validity", stacklevel=2)
        geom = (Omega / (2 * L)) * (1.0 / der.v_pl**2 + 1.0 / material.v_t**2
                                    + math.sqrt(3.0) / (Omega * der.v_pl * L))
        return base * geom
    raise ValueError(f"unknown geometry kind {kind!r}")


# --- resonator decay -------------------------------------------------------


def t1_cavity(omega: float, T: float, Delta0: Optional[float],
              resonator: ResonatorSpectrum, subtract_zero: bool = True) -> float:
    """Lorentzian-weighted decay rate in a discrete resonator spectrum.

    With subtract_zero the static (omega = 0) kernel value of every mode
    is removed, isolating the dynamical response.
    """
    if omega == 0.0:
        return 0.0
    E = HBAR * omega
    Delta0 = _check_two_level(E, T, Delta0)
    mat = resonator.material
    g2 = np.where(resonator.pol == 0, mat.gamma_l**2, mat.gamma_t**2)
    v2 = np.where(resonator.pol == 0, mat.v_l**2, mat.v_t**2)
    Om, Ga = resonator.Omega, resonator.Gamma
    # broadened-delta kernel: on resonance the single-mode rate equals
    # purcell_factor times the bulk rate, and the dense-spectrum limit
    # recovers the bulk rate
    kern = Ga / ((omega**2 - Om**2) ** 2 + (omega * Ga) ** 2)
    if subtract_zero:
        kern = kern - Ga / Om**4
    pref = (2 * Om**2 * Delta0**2 * g2 * _coth(E / (2 * KB * T))
            / (HBAR**3 * mat.rho * omega * v2 * resonator.volume))
    return float(np.sum(resonator.multiplicity * pref * kern))


def purcell_factor(resonator: ResonatorSpectrum, mode_index: int) -> float:
    """Acoustic Purcell factor of one resonator mode: (lambda^3/2 pi^2 V) Q e."""
    Om = float(resonator.Omega[mode_index])
    Ga = float(resonator.Gamma[mode_index])
    if Ga == 0.0:
        raise ValueError("mode has no linewidth; Q undefined")
    Q = Om / Ga
    mat = resonator.material
    v = mat.v_l if resonator.pol[mode_index] == 0 else mat.v_t
    lam = 2 * math.pi * v / Om
    return lam**3 * Q / (2 * math.pi**2 * resonator.volume)


# --- photon channel --------------------------------------------------------


def effective_permittivity(eps_rel: float, V_em: float, V_defect: float) -> float:
    """Host permittivity diluted by the mode-volume mismatch, ~ eps V_em/V."""
    if V_em <= 0 or V_defect <= 0:
        raise ValueError("volumes must be positive")
    return eps_rel * V_em / V_defect


def t1_photon(E: float, T: float, Delta0: Optional[float], material: Material,
              D: int = 3, L_compact: float = 50e-9,
              eps_eff: Optional[float] = None) -> float:
    """Photon emission rate via the dipole coupling.

    Obtained from the phonon mode-sum by the coupling replacement
    |gamma : xi|^2 -> Omega^2 |d|^2 / (3 V eps0 eps_eff); in 3D with
    eps_eff = eps this is the textbook spontaneous-emission formula
    d^2 omega^3 sqrt(eps) / (3 pi eps0 hbar c^3) times the thermal and
    Delta0 factors.
    """
    Delta0 = _check_two_level(E, T, Delta0)
    if material.eps_rel <= 0:
        raise ValueError("material permittivity missing or nonpositive")
    if eps_eff is None:
        eps_eff = material.eps_rel
    omega = E / HBAR
    c_m = C_LIGHT / math.sqrt(material.eps_rel)
    n_pol = 2
    # photon states per unit energy per unit 3-volume at E = hbar omega
    dos = SPHERE_SURFACE[D] / (2 * math.pi) ** D * omega ** (D - 1) \
        / (HBAR * c_m**D * L_compact ** (3 - D))
    rate = (n_pol * (2 * math.pi / HBAR) * (Delta0 / E) ** 2
            * (material.dipole**2 / 3) * (HBAR * omega / (2 * EPS0 * eps_eff))
            * dos * _coth(E / (2 * KB * T)))
    return rate


# --- lossy-bulk diagnostic -------------------------------------------------


def t1_dissipative_bulk(E: float, T: float, Gamma_phonon: float,
                        Lambda_c: float, material: Material) -> tuple[float, float]:
    """Decay rate in a 3D bulk with phonon linewidth Gamma_phonon.

    Returns (rate_total, rate_cutoff_part) where the cutoff part is the
    piece linear in the Debye-like frequency cutoff Lambda_c (rad/s);
    Delta0 = E defects.
    """
    if E <= 0 or T <= 0:
        raise ValueError("E and T must be positive")
    if Gamma_phonon < 0:
        raise ValueError("Gamma_phonon must be nonnegative")
    omega0 = E / HBAR
    if not (Lambda_c > 10 * omega0 and Lambda_c > 10 * max(Gamma_phonon, 1.0)):
        raise ValueError("Lambda_c must greatly exceed both E/hbar and Gamma")
    gl, gt = material.gamma_l, material.gamma_t
    branch_sum = gl**2 / material.v_l**5 + 2 * gt**2 / material.v_t**5
    pref = (branch_sum * omega0 * _coth(E / (2 * KB * T))
            / (math.pi**2 * HBAR * material.rho))
    cutoff_part = pref * Lambda_c * Gamma_phonon
    if Gamma_phonon == 0.0:
        main_part = pref * 0.5 * math.pi * omega0**2
    else:
        wt = np.sqrt(complex(omega0**2, Gamma_phonon * omega0))
        main_part = pref * (math.pi * Gamma_phonon / 4) * (wt**3).real / (wt.imag * wt.real)
    return main_part + cutoff_part, cutoff_part


# --- dephasing -------------------------------------------------------------


@dataclass(frozen=True)
class T2Model:
    """Spectral-diffusion model: dimension, confinement scale, 1D decay constant.

    The rms defect-defect coupling constant is gamma_l^2/v_l^2 times a
    single dimensionless factor calibrated from the ensemble's phonon-echo
    anchor (T2', T) in 3D and reused for every dimension.
    """

    material: Material
    D: int = 3
    scale: float = 50e-9  # R (1D) or L (2D); unused in 3D
    x: float = 1.0

    def __post_init__(self) -> None:
        if self.D not in (1, 2, 3):
            raise ValueError("D must be 1, 2 or 3")
        if self.scale <= 0:
            raise ValueError("scale must be positive")

    def calibration_constant(self, ensemble: DefectEnsemble) -> float:
        """Dimensionless C_rms prefactor from the 3D anchor."""
        t2_star, T_star = ensemble.t2_anchor
        kT = KB * T_star
        mat = self.material
        base = (mat.gamma_l**2 / mat.v_l**2) * ensemble.density(kT, D=3) * kT \
            / (HBAR * mat.rho)
        return 1.0 / (t2_star * base)

    def spectral_diffusion_rate(self, T: float, ensemble: DefectEnsemble) -> float:
        """T2'^-1 from thermally active neighbor flips."""
        if T <= 0:
            raise ValueError("T must be positive")
        mat = self.material
        c = self.calibration_constant(ensemble)
        kT = KB * T
        crms = c * mat.gamma_l**2 / mat.v_l**2
        n3 = ensemble.density(kT, D=3) * kT  # 1/m^3
        if self.D == 3:
            return crms * n3 / (HBAR * mat.rho)
        if self.D == 2:
            rho2 = mat.rho * self.scale
            return crms * n3 ** (2.0 / 3.0) / (HBAR * rho2)
        rho1 = mat.rho * self.scale**2
        Lam = spectral_diffusion_length(ensemble, T)
        return (self.x * crms / (HBAR * rho1 * self.scale)
                * math.exp(-self.x * Lam / self.scale))


def t2_total(E: float, T: float, t1_rate: float, t2model: T2Model,
             ensemble: DefectEnsemble) -> float:
    """Total dephasing time: 1/T2 = (1/2) T1^-1 + T2'^-1."""
    if t1_rate < 0:
        raise ValueError("t1_rate must be nonnegative")
    t2p_inv = t2model.spectral_diffusion_rate(T, ensemble)
    return 1.0 / (0.5 * t1_rate + t2p_inv)


# --- dispatcher ------------------------------------------------------------


@dataclass(frozen=True)
class T1Model:
    """Binds one geometry to a T1 evaluation; pure in (E, T, Delta0)."""

    geometry: Union[ModeSpectrum, ResonatorSpectrum, dict]
    material: Optional[Material] = None
    approximation: str = "full_fractions"
    subtract_zero: bool = True
    Lambda_c: Optional[float] = None

    def rate(self, E: float, T: float, Delta0: Optional[float] = None) -> float:
        g = self.geometry
        if isinstance(g, ResonatorSpectrum):
            return t1_cavity(E / HBAR, T, Delta0, g, self.subtract_zero)
        if isinstance(g, ModeSpectrum):
            return t1_waveguide(E, T, Delta0, g, self.approximation)
        if isinstance(g, dict) and g.get("kind") == "bulk":
            mat = self.material or g["material"]
            return t1_bulk(E, T, Delta0, mat, g.get("D", 3),
                           g.get("L_compact", 50e-9))
        if isinstance(g, dict):
            mat = self.material or g["material"]
            return t1_reduced(E, T, Delta0, g, mat)
        raise TypeError(f"unsupported geometry {type(g).__name__}")
