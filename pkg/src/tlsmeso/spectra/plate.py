"""Guided elastic modes of an isotropic free-surface plate.

Plane-strain Lamb waves split into symmetric and antisymmetric families
whose Rayleigh-Lamb characteristic functions are written in terms of
cos(z y) and sin(z y)/z -- both entire and real in z^2 -- so the root
finder never touches a branch cut.  Shear-horizontal (SH) branches are
fully analytic.  Thickness coordinate y runs over [-h, h] with h = L/2.
"""

from __future__ import annotations

import math

import numpy as np

from ..materials import Material, derived_constants
from .branches import DispersionBranch, ModeSpectrum, find_van_hove
from .solver import trace_branches, refine_curves

# same rationale as the cylinder determinant: normalized characteristic
# values below this are cancellation noise, not roots
DET_NOISE_FLOOR = 1e-12


def _cos_e(z2, h):
    """cos(z h) as a function of z^2 (entire, real)."""
    z2 = np.asarray(z2, dtype=float)
    z = np.sqrt(np.abs(z2))
    return np.where(z2 >= 0.0, np.cos(z * h), np.cosh(z * h))


def _sinc_e(z2, h):
    """sin(z h)/z as a function of z^2 (entire, real)."""
    z2 = np.asarray(z2, dtype=float)
    z = np.sqrt(np.abs(z2))
    zh = z * h
    small = zh < 1e-6
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(z2 >= 0.0,
                       np.where(small, h, np.sin(zh) / np.where(z == 0, 1.0, z)),
                       np.sinh(zh) / np.where(z == 0, 1.0, z))
    return np.where(small, h * (1.0 - z2 * h * h / 6.0), out)


def _alpha2_beta2(mat: Material, k, Om):
    a2 = (np.asarray(Om, dtype=float) / mat.v_l) ** 2 - k**2
    b2 = (np.asarray(Om, dtype=float) / mat.v_t) ** 2 - k**2
    return a2, b2


def chareq_lamb(mat: Material, symmetric: bool, k, Om, L: float):
    """Normalized Rayleigh-Lamb characteristic function (sign-definite scale).

    Symmetric:      (b2-k2)^2 C(a2) S(b2) + 4 k^2 a2 S(a2) C(b2)
    Antisymmetric:  (b2-k2)^2 S(a2) C(b2) + 4 k^2 b2 C(a2) S(b2)
    with C(z2)=cos(z h), S(z2)=sin(z h)/z, h = L/2.
    """
    h = 0.5 * L
    a2, b2 = _alpha2_beta2(mat, k, Om)
    Ca, Cb = _cos_e(a2, h), _cos_e(b2, h)
    Sa, Sb = _sinc_e(a2, h), _sinc_e(b2, h)
    r = (b2 - k**2) ** 2
    if symmetric:
        t1 = r * Ca * Sb
        t2 = 4.0 * k**2 * a2 * Sa * Cb
    else:
        t1 = r * Sa * Cb
        t2 = 4.0 * k**2 * b2 * Ca * Sb
    scale = np.abs(t1) + np.abs(t2)
    scale = np.where(scale > 0.0, scale, 1.0)
    return (t1 + t2) / scale


def lamb_mode_profile(mat: Material, symmetric: bool, k: float, Om: float,
                      L: float, y: np.ndarray):
    """Displacements and strains of a Lamb mode across the thickness.

    Returns dict with complex arrays u_x, u_y and strain components
    xx, yy, xy (zz = xz = yz vanish in plane strain), for a unit-scale
    potential-amplitude pair from the boundary-condition null vector.
    """
    h = 0.5 * L
    a2, b2 = _alpha2_beta2(mat, k, Om)
    al = np.sqrt(complex(a2))
    be = np.sqrt(complex(b2))

    if symmetric:
        phi = lambda yy: np.cos(al * yy)
        dphi = lambda yy: -al * np.sin(al * yy)
        psi = lambda yy: np.sin(be * yy)
        dpsi = lambda yy: be * np.cos(be * yy)
    else:
        phi = lambda yy: np.sin(al * yy)
        dphi = lambda yy: al * np.cos(al * yy)
        psi = lambda yy: np.cos(be * yy)
        dpsi = lambda yy: -be * np.sin(be * yy)

    # traction rows at y = h for amplitude vector (A, B):
    #   sigma_yy/mu = -(b2 - k^2) phi - 2 i k dpsi
    #   sigma_xy/mu = 2 i k dphi - (b2 - k^2) psi
    M = np.array([
        [-(b2 - k**2) * phi(h), -2j * k * dpsi(h)],
        [2j * k * dphi(h), -(b2 - k**2) * psi(h)],
    ], dtype=complex)
    _, _, vh = np.linalg.svd(M)
    A, B = vh[-1].conj()

    u_x = 1j * k * A * phi(y) + B * dpsi(y)
    u_y = A * dphi(y) - 1j * k * B * psi(y)
    xx = 1j * k * u_x
    yy = -a2 * A * phi(y) - 1j * k * B * dpsi(y)
    xy = 0.5 * ((1j * k * A * dphi(y) - b2 * B * psi(y)) + 1j * k * u_y)
    return {"u_x": u_x, "u_y": u_y, "xx": xx, "yy": yy, "xy": xy}


def energy_fractions_profile(mat: Material, prof: dict, Om: float,
                             y: np.ndarray, w: np.ndarray) -> tuple[float, float]:
    tr = prof["xx"] + prof["yy"]
    dd = (np.abs(prof["xx"]) ** 2 + np.abs(prof["yy"]) ** 2 +
          2 * np.abs(prof["xy"]) ** 2)
    u2 = np.abs(prof["u_x"]) ** 2 + np.abs(prof["u_y"]) ** 2
    I_tr = float(np.sum(w * np.abs(tr) ** 2))
    I_dd = float(np.sum(w * dd))
    I_u = float(np.sum(w * u2))
    if I_u <= 0.0:
        raise ValueError("mode normalization failure: zero displacement norm")
    e_l = mat.v_l**2 * I_tr / (Om**2 * I_u)
    e_t = 2 * mat.v_t**2 * (I_dd - I_tr) / (Om**2 * I_u)
    return e_l, e_t


def _gauss_thickness(L: float, n: int = 64):
    x, w = np.polynomial.legendre.leggauss(n)
    h = 0.5 * L
    return h * x, h * w


def energy_fractions(mat: Material, family: str, k: float, Om: float,
                     L: float) -> tuple[float, float]:
    if family == "shear_horizontal":
        return 0.0, 1.0
    y, w = _gauss_thickness(L)
    prof = lamb_mode_profile(mat, family == "compressional", k, Om, L, y)
    return energy_fractions_profile(mat, prof, Om, y, w)


def solve_plate_branches(L: float, material: Material, Omega_max: float,
                         n_branches: int | None = None, *,
                         q_points: int = 360, omega_points: int = 1100,
                         frac_every: int = 24) -> ModeSpectrum:
    """Full branch catalog of a thickness-L plate up to Omega_max."""
    if L <= 0:
        raise ValueError("L must be positive")
    der = derived_constants(material)
    vt = material.v_t
    cap = Omega_max * 1.02
    k_lo = 1e-5 / L
    # A0 is slower than v_t through its quadratic-to-linear transition;
    # size the window from both inverse asymptotes so it reaches Omega_max
    k_hi = 1.25 * (Omega_max / vt
                   + math.sqrt(2 * math.sqrt(3) * Omega_max / (der.v_pl * L)))
    k_grid = np.geomspace(k_lo, k_hi, q_points)

    branches: list[DispersionBranch] = []

    # shear-horizontal family: analytic
    branches.append(DispersionBranch(
        family="shear_horizontal", branch_index=0, q=np.array([k_lo, k_hi]),
        Omega=np.array([vt * k_lo, vt * k_hi]), Omega_co=0.0, Omega_min=0.0,
        multiplicity=1, analytic=("linear", vt), fixed_e_l=0.0))
    m = 1
    while True:
        kappa = m * math.pi / L
        if vt * kappa > Omega_max:
            break
        branches.append(DispersionBranch(
            family="shear_horizontal", branch_index=m, q=np.array([0.0, k_hi]),
            Omega=np.array([vt * kappa, vt * math.hypot(k_hi, kappa)]),
            Omega_co=vt * kappa, Omega_min=vt * kappa,
            multiplicity=1, analytic=("cutoff", vt, kappa), fixed_e_l=0.0))
        m += 1

    # symmetric Lamb family (S0, S1, ...)
    def ch_s(k, Om):
        return chareq_lamb(material, True, k, Om, L)

    curves = trace_branches(ch_s, k_grid, cap, omega_points=omega_points,
                            label="lamb symmetric", noise_floor=DET_NOISE_FLOOR)
    for _ in range(14):
        curves, n_new = refine_curves(ch_s, curves, noise_floor=DET_NOISE_FLOOR,
                                      insert_tol=1e-7)
        if n_new == 0:
            break
    branches += _package_curves(material, L, curves, "compressional",
                                Omega_max, frac_every)

    # antisymmetric Lamb family (A0, A1, ...); A0 goes as ~k^2, so start
    # its grid where the quadratic law is inside the scan window
    k_lo_flex = 0.015 / (0.5 * L)
    k_grid_a = np.geomspace(k_lo_flex, k_hi, q_points)
    omega_lo_a = min(cap * 1e-8,
                     0.3 * der.v_pl * L * k_lo_flex**2 / (2 * math.sqrt(3)))

    def ch_a(k, Om):
        return chareq_lamb(material, False, k, Om, L)

    curves = trace_branches(ch_a, k_grid_a, cap, omega_points=omega_points,
                            omega_lo=omega_lo_a, label="lamb antisymmetric",
                            noise_floor=DET_NOISE_FLOOR)
    for _ in range(14):
        curves, n_new = refine_curves(ch_a, curves, noise_floor=DET_NOISE_FLOOR,
                                      insert_tol=1e-7)
        if n_new == 0:
            break
    branches += _package_curves(material, L, curves, "flexural",
                                Omega_max, frac_every)

    branches = [_splice_a0_asymptote(b, L, der.v_pl) for b in branches]

    if n_branches is not None:
        branches = sorted(branches, key=lambda b: b.Omega_min)[:n_branches]
    vh = find_van_hove(branches)
    return ModeSpectrum(geometry={"kind": "plate", "L": L, "material": material},
                        branches=branches, van_hove=vh, Omega_max=Omega_max)


def _package_curves(material, L, curves, family, Omega_max, frac_every):
    out = []
    for idx, c in enumerate(curves):
        k, Om = c["q"], c["Omega"]
        keep = Om <= Omega_max * 1.02
        if keep.sum() < 4:
            continue
        k, Om = k[keep], Om[keep]
        Omega_min = float(np.min(Om))
        Omega_co = 0.0 if Om[0] / k[0] < 2.0 * material.v_l else float(Om[0])
        fk = k[::frac_every]
        fOm = Om[::frac_every]
        e_l = np.empty_like(fk)
        for i, (kk, oo) in enumerate(zip(fk, fOm)):
            el, et = energy_fractions(material, family, kk, oo, L)
            s = el + et
            e_l[i] = el / s if s > 0 else 0.0
        out.append(DispersionBranch(
            family=family, branch_index=idx, q=k, Omega=Om,
            Omega_co=Omega_co,
            Omega_min=min(Omega_min, Omega_co) if Omega_co else Omega_min,
            multiplicity=1, frac_q=fk, frac_e_l=e_l))
    return out


def _splice_a0_asymptote(br: DispersionBranch, L: float, v_pl: float):
    """Replace ill-conditioned small-k antisymmetric samples with the
    quadratic law Omega = v_pl L k^2 / (2 sqrt(3))."""
    if br.family != "flexural" or br.Omega_co != 0.0 or br.analytic is not None:
        return br
    coeff = v_pl * L / (2 * math.sqrt(3))
    kL = br.q * (0.5 * L)
    asym = coeff * br.q**2
    t = np.clip((kL - 0.02) / 0.04, 0.0, 1.0)
    w = t * t * (3 - 2 * t)
    Om = (1 - w) * asym + w * br.Omega
    k_ext = np.geomspace(2e-7 / L, br.q[0] * 0.999, 40)
    q_new = np.concatenate([k_ext, br.q])
    Om_new = np.concatenate([coeff * k_ext**2, Om])
    return DispersionBranch(
        family=br.family, branch_index=br.branch_index, q=q_new, Omega=Om_new,
        Omega_co=0.0, Omega_min=0.0, multiplicity=br.multiplicity,
        frac_q=br.frac_q, frac_e_l=br.frac_e_l)
