"""Host-material constants, defect ensembles, and coupling formulas.

All quantities are strict SI. The elastic host is isotropic; tunneling
defects couple to strain through a uniaxial-plus-trace deformation
potential parameterized by (gamma_tilde, zeta) and to electric fields
through a scalar dipole magnitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .constants import DEBYE, EV, KB


@dataclass(frozen=True)
class Material:
    """Isotropic elastic + dielectric host with TLS coupling strengths.

    Parameters
    ----------
    rho : float
        Mass density (kg/m^3).
    v_l, v_t : float
        Longitudinal / transverse sound speeds (m/s).
    gamma_tilde : float
        Bare deformation potential (J).
    zeta : float
        Dimensionless shape parameter of the elastic dipole.
    dipole : float
        Electric dipole magnitude |d| (C m).
    eps_rel : float
        Relative permittivity.
    """

    rho: float
    v_l: float
    v_t: float
    gamma_tilde: float
    zeta: float
    dipole: float
    eps_rel: float

    def __post_init__(self) -> None:
        if self.rho <= 0:
            raise ValueError("rho must be positive")
        if not (0 < self.v_t < self.v_l):
            raise ValueError("require 0 < v_t < v_l (isotropic stability)")
        if self.gamma_tilde < 0:
            raise ValueError("gamma_tilde must be nonnegative")
        if not (0 <= self.zeta <= 2):
            raise ValueError("zeta outside sanity bound [0, 2]")

    @property
    def gamma_l(self) -> float:
        return averaged_deformation_potentials(self.gamma_tilde, self.zeta)[0]

    @property
    def gamma_t(self) -> float:
        return averaged_deformation_potentials(self.gamma_tilde, self.zeta)[1]


@dataclass(frozen=True)
class ElasticDerived:
    """Derived isotropic-elasticity constants."""

    Y: float  # Young's modulus (Pa)
    nu: float  # Poisson ratio
    v_B: float  # bar (extensional) velocity (m/s)
    v_pl: float  # plate velocity (m/s)
    lame_lambda: float  # Pa
    lame_mu: float  # Pa


@dataclass(frozen=True)
class DefectEnsemble:
    """Defect density of states P_D(E) = P0 L^(3-D) (E/E_ref)^mu.

    P0 carries units J^-1 m^-3 (3D base); L_compact is the compact
    dimension used both in P_D and in the reduced mass density
    rho_D = rho L^(3-D).
    """

    P0: float
    mu: float = 0.0
    E_ref: float = KB * 1.0  # k_B x 1 K
    L_compact: float = 50e-9
    t2_anchor: tuple[float, float] = (14e-6, 20e-3)  # (T2 seconds, T kelvin)
    dipole: float = 1.3 * DEBYE  # |d| (C m), used by the noise channel

    def __post_init__(self) -> None:
        if self.P0 <= 0:
            raise ValueError("P0 must be positive")
        if self.mu < 0:
            raise ValueError("mu must be nonnegative")
        if self.E_ref <= 0 or self.L_compact <= 0:
            raise ValueError("E_ref and L_compact must be positive")

    def density(self, E: float, D: int = 3) -> float:
        """P_D(E), defects per energy per D-volume."""
        if D not in (1, 2, 3):
            raise ValueError("D must be 1, 2 or 3")
        scale = self.L_compact ** (3 - D)
        if self.mu == 0.0:
            return self.P0 * scale
        return self.P0 * scale * (E / self.E_ref) ** self.mu


@dataclass(frozen=True)
class SingleDefect:
    """One tunneling defect: asymmetry, tunneling strength, orientation."""

    Delta: float  # J
    Delta0: float  # J
    theta: float = 0.0
    phi: float = 0.0
    position: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self) -> None:
        if self.Delta0 <= 0:
            raise ValueError("Delta0 must be positive")

    @property
    def E(self) -> float:
        return math.hypot(self.Delta, self.Delta0)


def derived_constants(material: Material) -> ElasticDerived:
    """Isotropic elasticity identities from (rho, v_l, v_t)."""
    vl2, vt2 = material.v_l**2, material.v_t**2
    if vt2 >= vl2:
        raise ValueError("v_t >= v_l: Poisson ratio undefined")
    nu = (vl2 - 2 * vt2) / (2 * (vl2 - vt2))
    Y = material.rho * vt2 * (3 * vl2 - 4 * vt2) / (vl2 - vt2)
    v_B = math.sqrt(Y / material.rho)
    v_pl = v_B / math.sqrt(1 - nu**2)
    lame_mu = material.rho * vt2
    lame_lambda = material.rho * (vl2 - 2 * vt2)
    return ElasticDerived(Y=Y, nu=nu, v_B=v_B, v_pl=v_pl,
                          lame_lambda=lame_lambda, lame_mu=lame_mu)


def averaged_deformation_potentials(gamma_tilde: float, zeta: float) -> tuple[float, float]:
    """Orientation-averaged coupling magnitudes (gamma_l, gamma_t)."""
    gl2 = gamma_tilde**2 * (15 - 40 * zeta + 32 * zeta**2) / 15
    gt2 = 4 * gamma_tilde**2 * zeta**2 / 15
    return math.sqrt(gl2), math.sqrt(gt2)


def oriented_deformation_potential(gamma_tilde, zeta, polarization, theta, phi):
    """Orientation-resolved coupling for polarization in {'l', 't1', 't2'}.

    Accepts scalars or numpy arrays for (theta, phi).
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if polarization == "l":
        out = gamma_tilde * (1 - 2 * zeta * np.sin(theta) ** 2)
    elif polarization == "t1":
        out = gamma_tilde * 2 * zeta * np.sin(theta) * np.cos(theta) * np.cos(phi)
    elif polarization == "t2":
        out = gamma_tilde * 2 * zeta * np.sin(theta) * np.cos(theta) * np.sin(phi)
    else:
        raise ValueError(f"unknown polarization {polarization!r}")
    return out if out.ndim else float(out)


def angular_avg_coupling(xi: np.ndarray, gamma_tilde: float, zeta: float) -> float:
    """Orientation average of |gamma(n) : xi|^2 for a symmetric strain xi.

    Equals gamma_l^2 |tr xi|^2 + 2 gamma_t^2 (xi:xi* - |tr xi|^2).
    """
    xi = np.asarray(xi)
    if xi.shape != (3, 3):
        raise ValueError("xi must be a 3x3 tensor")
    if not np.allclose(xi, xi.T, rtol=1e-10, atol=1e-12 * max(1.0, float(np.abs(xi).max()))):
        raise ValueError("xi must be symmetric")
    gl, gt = averaged_deformation_potentials(gamma_tilde, zeta)
    tr2 = abs(np.trace(xi)) ** 2
    dd = float(np.sum(np.abs(xi) ** 2))
    return gl**2 * tr2 + 2 * gt**2 * (dd - tr2)


def zeta_for_coupling_ratio(ratio: float) -> tuple[float, float]:
    """Solve gamma_t/gamma_l = ratio for zeta (two roots).

    For ratio = 1/sqrt(2) the roots are ~0.570 and ~1.097.
    """
    # 4 z^2 / 15 = r^2 (15 - 40 z + 32 z^2)/15  ->  quadratic in z
    r2 = ratio**2
    a = 4 - 32 * r2
    b = 40 * r2
    c = -15 * r2
    disc = math.sqrt(b * b - 4 * a * c)
    z1 = (-b + disc) / (2 * a)
    z2 = (-b - disc) / (2 * a)
    return tuple(sorted((z1, z2)))


def spectral_diffusion_length(ensemble: DefectEnsemble, T: float) -> float:
    """Lambda = [P(k_B T) k_B T]^(-1/3) from the 3D defect density."""
    if T <= 0:
        raise ValueError("T must be positive")
    kT = KB * T
    return (ensemble.density(kT, D=3) * kT) ** (-1.0 / 3.0)


# --- Silica defaults -------------------------------------------------------

_GAMMA_L_FRACTION = math.sqrt((15 - 40 * 0.57 + 32 * 0.57**2) / 15)  # ~0.4161


def silica() -> Material:
    """Fused-silica defaults used throughout."""
    return Material(
        rho=2202.0,
        v_l=5944.0,
        v_t=3764.0,
        gamma_tilde=1.0 * EV / _GAMMA_L_FRACTION,  # so gamma_l = 1 eV at zeta=0.57
        zeta=0.57,
        dipole=1.3 * DEBYE,
        eps_rel=2.08,
    )


def silica_ensemble(mu: float = 0.0, L_compact: float = 50e-9) -> DefectEnsemble:
    return DefectEnsemble(P0=5.45e44, mu=mu, L_compact=L_compact)
