"""Guided elastic modes of an isotropic free-surface cylinder.

Displacement fields are built from three Helmholtz potentials with
azimuthal order p; the traction-free boundary condition at r = R gives
the characteristic determinant (Pochhammer-Chree theory).  The same
field construction supplies mode shapes, so energy fractions and strain
profiles are exactly consistent with the dispersion solve.

Families:
  - torsional (p = 0, parity-swapped): fully analytic.
  - compressional (p = 0): 2x2 determinant over the {A, B} potentials.
  - flexural (p >= 1): 3x3 determinant; doubly degenerate (cos/sin).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import jvp, jv

from ..materials import Material, derived_constants
from .branches import DispersionBranch, ModeSpectrum, find_van_hove
from .solver import trace_branches, refine_curves, _scan_roots

# Column-normalized determinant values below this magnitude are rounding
# noise (near-degenerate columns deep in the evanescent regime), not
# roots.  Genuine small-q flexural roots still carry amplitudes >~ 1e-11,
# while cancellation noise sits at ~1e-17.
DET_NOISE_FLOOR = 1e-12


def _radial_wavenumbers(mat: Material, Om, q):
    """alpha, beta (complex) with alpha^2 = Om^2/v_l^2 - q^2 etc."""
    Om = np.asarray(Om, dtype=complex)
    a2 = (Om / mat.v_l) ** 2 - q**2
    b2 = (Om / mat.v_t) ** 2 - q**2
    return np.sqrt(a2), np.sqrt(b2)


def _G(p, z, r, n, R):
    """n-th radial derivative of the scaled radial function J_p(z r)/z^p.

    Entire (and real) in z^2, which keeps the boundary determinant real
    and free of branch-cut artifacts; a power series takes over when
    |z R| is small enough that the z^p division would lose precision.
    """
    z2 = z * z
    small = np.abs(z2) * R * R < 0.04
    if np.all(small):
        return _G_series(p, z2, r, n)
    if n == 0:
        main = jv(p, z * r) * z ** (-p)
    else:
        main = jvp(p, z * r, n) * z ** (n - p)
    if np.any(small):
        ser = _G_series(p, z2, r, n)
        main = np.where(small, ser, main)
    return main


def _G_series(p, z2, r, n, terms: int = 9):
    out = 0.0
    r = np.asarray(r, dtype=float)
    fact_k = 1.0
    fact_kp = math.factorial(p)
    for k in range(terms):
        coeff = (-0.25) ** k / (fact_k * fact_kp * 2.0**p)
        rp = 2 * k + p
        if n == 0:
            term = coeff * z2**k * r**rp
        elif n == 1:
            term = coeff * z2**k * rp * (r ** (rp - 1) if rp >= 1 else 0.0 * r)
        else:
            term = coeff * z2**k * rp * (rp - 1) * (r ** (rp - 2) if rp >= 2 else 0.0 * r)
        out = out + term
        fact_k *= k + 1
        fact_kp *= k + 1 + p
    return out + 0j


def _column_fields(mat: Material, p: int, Om, q, r, column: str, R=None):
    """Amplitude functions (u_r, U, u_z, u_r', U', u_z') for one potential.

    U is the u_theta amplitude (sin p-theta parity); u_r, u_z carry cos
    p-theta parity.  All arguments broadcast.  Radial profiles use the
    scaled functions J_p(z r)/z^p (column scaling is immaterial for the
    determinant and null vector).
    """
    alpha, beta = _radial_wavenumbers(mat, Om, q)
    if R is None:
        R = float(np.max(r))
    iq = 1j * q
    r = np.asarray(r, dtype=float)
    if column == "A":
        f0, f1, f2 = _G(p, alpha, r, 0, R), _G(p, alpha, r, 1, R), _G(p, alpha, r, 2, R)
        u_r = f1
        U = -(p / r) * f0
        u_z = iq * f0
        du_r = f2
        dU = -p * (f1 / r - f0 / r**2)
        du_z = iq * f1
    elif column == "B":
        g0, g1, g2 = _G(p + 1, beta, r, 0, R), _G(p + 1, beta, r, 1, R), _G(p + 1, beta, r, 2, R)
        u_r = iq * g0
        U = iq * g0
        u_z = -g1 - (p + 1) * g0 / r
        du_r = iq * g1
        dU = iq * g1
        du_z = -g2 - (p + 1) * (g1 / r - g0 / r**2)
    elif column == "C":
        h0, h1, h2 = _G(p, beta, r, 0, R), _G(p, beta, r, 1, R), _G(p, beta, r, 2, R)
        u_r = (p / r) * h0
        U = -h1
        u_z = np.zeros(np.broadcast(h0, r).shape, dtype=complex)
        du_r = p * (h1 / r - h0 / r**2)
        dU = -h2
        du_z = np.zeros_like(u_z)
    else:
        raise ValueError(column)
    return u_r, U, u_z, du_r, dU, du_z


def _column_strains(mat: Material, p: int, Om, q, r, column: str):
    """Strain amplitude functions for one potential column.

    Returns dict with keys rr, tt, zz, rt, rz, tz (theta parities:
    rr/tt/zz/rz share cos, rt/tz share sin) plus displacement (u_r, U, u_z).
    """
    u_r, U, u_z, du_r, dU, du_z = _column_fields(mat, p, Om, q, r, column)
    iq = 1j * q
    return {
        "rr": du_r,
        "tt": (p * U + u_r) / r,
        "zz": iq * u_z,
        "rt": 0.5 * (-(p / r) * u_r + dU - U / r),
        "rz": 0.5 * (iq * u_r + du_z),
        "tz": 0.5 * (iq * U - (p / r) * u_z),
        "u": (u_r, U, u_z),
    }


def _tractions(mat: Material, s: dict):
    lam = mat.rho * (mat.v_l**2 - 2 * mat.v_t**2)
    mu = mat.rho * mat.v_t**2
    tr = s["rr"] + s["tt"] + s["zz"]
    return (lam * tr + 2 * mu * s["rr"], 2 * mu * s["rt"], 2 * mu * s["rz"])


_COLS_P0 = ("A", "B")
_COLS = ("A", "B", "C")


def _traction_matrix(mat: Material, p: int, Om, q, R):
    """Boundary matrix; shape (nrow, ncol) + Om.shape, complex."""
    cols = _COLS_P0 if p == 0 else _COLS
    rows = []
    for c in cols:
        s = _column_strains(mat, p, Om, q, np.asarray(R), c)
        t_rr, t_rt, t_rz = _tractions(mat, s)
        if p == 0:
            rows.append((t_rr, t_rz))
        else:
            rows.append((t_rr, t_rt, t_rz))
    # rows currently indexed [col][row]; transpose
    n = len(cols)
    M = np.empty((n, n) + np.asarray(Om, dtype=complex).shape, dtype=complex)
    for j, colvals in enumerate(rows):
        for i, v in enumerate(colvals):
            M[i, j] = v
    return M


def _det(M):
    if M.shape[0] == 2:
        return M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    return (M[0, 0] * (M[1, 1] * M[2, 2] - M[1, 2] * M[2, 1])
            - M[0, 1] * (M[1, 0] * M[2, 2] - M[1, 2] * M[2, 0])
            + M[0, 2] * (M[1, 0] * M[2, 1] - M[1, 1] * M[2, 0]))


def chareq_cylinder(mat: Material, p: int, q: float, Omega, R: float):
    """Real characteristic function (column-normalized determinant)."""
    Om = np.asarray(Omega, dtype=float)
    M = _traction_matrix(mat, p, Om + 0j, q, R)
    # normalize columns so the determinant is well-scaled at all Omega
    norm = np.sqrt(np.sum(np.abs(M) ** 2, axis=0))
    norm = np.where(norm == 0, 1.0, norm)
    M = M / norm[None, :, ...]
    d = _det(M)
    # with the scaled radial functions the determinant is exactly real
    # (imaginary residue is rounding noise)
    return d.real


def torsional_cutoff_roots(n_roots: int) -> np.ndarray:
    """Roots x_m of x J0(x) = 2 J1(x) (overtone cutoffs x_m v_t / R)."""
    f = lambda x: x * jv(0, x) - 2 * jv(1, x)
    roots = []
    x = 1.0
    while len(roots) < n_roots:
        a, b = x, x + 0.5
        if np.sign(f(a)) != np.sign(f(b)):
            r = brentq(f, a, b, rtol=1e-14)
            if r > 1e-6:
                roots.append(r)
        x += 0.5
    return np.array(roots)


def _null_vector(M: np.ndarray) -> np.ndarray:
    _, _, vh = np.linalg.svd(M)
    return vh[-1].conj()


def cylinder_mode_profile(mat: Material, p: int, q: float, Omega: float, R: float,
                          r: np.ndarray, torsional_overtone: int | None = None):
    """Strain and displacement amplitude profiles of one mode at radius r.

    Returns a dict of radial amplitude arrays (complex) with the same keys
    as _column_strains; components combine the potential columns with the
    boundary-condition null vector.  For the torsional family pass
    `torsional_overtone` (0 = fundamental).
    """
    if torsional_overtone is not None:
        # u_theta only: fundamental u_t ~ r; overtone m: u_t ~ J1(beta_m r)
        if torsional_overtone == 0:
            u_t = r.astype(complex)
            du_t = np.ones_like(r, dtype=complex)
        else:
            x = torsional_cutoff_roots(torsional_overtone)[-1]
            beta = x / R
            u_t = jv(1, beta * r).astype(complex)
            du_t = beta * jvp(1, beta * r, 1)
        zero = np.zeros_like(u_t)
        return {
            "rr": zero, "tt": zero, "zz": zero,
            "rt": 0.5 * (du_t - u_t / r),
            "rz": zero,
            "tz": 0.5 * (1j * q) * u_t,
            "u": (zero, u_t, zero),
        }
    M = _traction_matrix(mat, p, np.asarray(Omega, dtype=complex), q, R)
    v = _null_vector(M.reshape(M.shape[0], M.shape[1]))
    cols = _COLS_P0 if p == 0 else _COLS
    out = None
    for coeff, c in zip(v, cols):
        s = _column_strains(mat, p, Omega + 0j, q, r, c)
        if out is None:
            out = {k: coeff * val for k, val in s.items() if k != "u"}
            out["u"] = tuple(coeff * u for u in s["u"])
        else:
            for k in ("rr", "tt", "zz", "rt", "rz", "tz"):
                out[k] = out[k] + coeff * s[k]
            out["u"] = tuple(a + coeff * b for a, b in zip(out["u"], s["u"]))
    if p == 0:
        # sin(p theta) parity components vanish identically at p = 0
        zero = np.zeros_like(out["rr"])
        out["rt"] = zero
        out["tz"] = zero
        out["u"] = (out["u"][0], zero, out["u"][2])
    return out


def _gauss_radial(R: float, n: int = 64):
    x, w = np.polynomial.legendre.leggauss(n)
    r = 0.5 * R * (x + 1.0)
    return r, 0.5 * R * w


def energy_fractions_profile(mat: Material, profile: dict, Omega: float,
                             r: np.ndarray, w: np.ndarray) -> tuple[float, float]:
    """(e_l, e_t) from strain/displacement amplitude profiles.

    Angular quadrature factors cancel between numerator and denominator
    (cos^2 and sin^2 parities integrate identically for p >= 1 and the
    p = 0 families have no mixed-parity content).
    """
    tr = profile["rr"] + profile["tt"] + profile["zz"]
    xi2 = (np.abs(profile["rr"]) ** 2 + np.abs(profile["tt"]) ** 2
           + np.abs(profile["zz"]) ** 2
           + 2 * (np.abs(profile["rt"]) ** 2 + np.abs(profile["rz"]) ** 2
                  + np.abs(profile["tz"]) ** 2))
    u_r, U, u_z = profile["u"]
    u2 = np.abs(u_r) ** 2 + np.abs(U) ** 2 + np.abs(u_z) ** 2
    I_u = float(np.sum(w * r * u2))
    I_tr = float(np.sum(w * r * np.abs(tr) ** 2))
    I_xi = float(np.sum(w * r * xi2))
    if I_u <= 0:
        raise ValueError("mode normalization failed (zero displacement norm)")
    e_l = mat.v_l**2 * I_tr / (Omega**2 * I_u)
    e_t = 2 * mat.v_t**2 * (I_xi - I_tr) / (Omega**2 * I_u)
    return e_l, e_t


def energy_fractions(mat: Material, family: str, p: int, q: float, Omega: float,
                     R: float, torsional_overtone: int | None = None) -> tuple[float, float]:
    r, w = _gauss_radial(R)
    if family == "torsional":
        return 0.0, 1.0
    prof = cylinder_mode_profile(mat, p, q, Omega, R, r,
                                 torsional_overtone=torsional_overtone)
    return energy_fractions_profile(mat, prof, Omega, r, w)


def solve_cylinder_branches(R: float, material: Material, Omega_max: float,
                            n_branches: int | None = None, *,
                            q_points: int = 360, omega_points: int = 1100,
                            frac_every: int = 24) -> ModeSpectrum:
    """Full branch catalog of a radius-R cylinder up to Omega_max."""
    if R <= 0:
        raise ValueError("R must be positive")
    der = derived_constants(material)
    vt = material.v_t
    cap = Omega_max * 1.02
    q_lo = 1e-5 / R
    # the flexural fundamental is slower than v_t through its
    # quadratic-to-linear transition; size the window from both inverse
    # asymptotes so it reaches Omega_max
    q_hi = 1.25 * (Omega_max / vt + math.sqrt(2 * Omega_max / (der.v_B * R)))
    q_grid = np.geomspace(q_lo, q_hi, q_points)

    branches: list[DispersionBranch] = []

    # torsional family: analytic
    branches.append(DispersionBranch(
        family="torsional", branch_index=0, q=np.array([q_lo, q_hi]),
        Omega=np.array([vt * q_lo, vt * q_hi]), Omega_co=0.0, Omega_min=0.0,
        multiplicity=1, azimuthal=0, analytic=("linear", vt), fixed_e_l=0.0))
    for m, x in enumerate(torsional_cutoff_roots(60), start=1):
        kappa = x / R
        if vt * kappa > Omega_max:
            break
        branches.append(DispersionBranch(
            family="torsional", branch_index=m, q=np.array([0.0, q_hi]),
            Omega=np.array([vt * kappa, vt * math.hypot(q_hi, kappa)]),
            Omega_co=vt * kappa, Omega_min=vt * kappa,
            multiplicity=1, azimuthal=0, analytic=("cutoff", vt, kappa),
            fixed_e_l=0.0))

    # compressional family (p = 0, 2x2)
    def ch0(q, Om):
        return chareq_cylinder(material, 0, q, Om, R)

    curves = trace_branches(ch0, q_grid, cap, omega_points=omega_points,
                            label="compressional", noise_floor=DET_NOISE_FLOOR)
    for _ in range(14):
        curves, n_new = refine_curves(ch0, curves, noise_floor=DET_NOISE_FLOOR,
                                      insert_tol=1e-7)
        if n_new == 0:
            break
    branches += _package_curves(material, R, curves, "compressional", 0,
                                Omega_max, frac_every, der)

    # flexural families p = 1 .. p_max (3x3, doubly degenerate).  Only the
    # p = 1 fundamental reaches Omega -> 0 (as ~q^2); start its grid where
    # the quadratic law sits safely inside the scan window -- everything
    # below q R = 0.02 is replaced by the asymptote anyway.
    q_lo_flex = 0.015 / R
    q_grid_flex = np.geomspace(q_lo_flex, q_hi, q_points)
    omega_lo_flex = min(cap * 1e-8, 0.3 * 0.5 * der.v_B * R * q_lo_flex**2)
    p = 1
    while True:
        def chp(q, Om, p=p):
            return chareq_cylinder(material, p, q, Om, R)
        # does family p have any branch below Omega_max?  The determinant
        # amplitude of the p = 1 fundamental at small q can sit below the
        # noise floor, so probe several q values before giving up.
        probe: list[float] = []
        for qp in (q_grid_flex[0], q_grid_flex[len(q_grid_flex) // 2],
                   q_grid_flex[-1]):
            probe = _scan_roots(lambda Om: chp(qp, Om),
                                np.geomspace(cap * 1e-8, cap, omega_points),
                                noise_floor=DET_NOISE_FLOOR)
            if probe:
                break
        if not probe:
            break
        curves = trace_branches(chp, q_grid_flex, cap, omega_points=omega_points,
                                omega_lo=omega_lo_flex, label=f"flexural p={p}",
                                noise_floor=DET_NOISE_FLOOR)
        for _ in range(14):
            curves, n_new = refine_curves(chp, curves, noise_floor=DET_NOISE_FLOOR,
                                          insert_tol=1e-7)
            if n_new == 0:
                break
        branches += _package_curves(material, R, curves, "flexural", p,
                                    Omega_max, frac_every, der)
        p += 1
        if p > 64:
            break

    # flexural fundamental: splice in the quadratic small-q asymptote
    branches = [_splice_flexural_asymptote(b, R, der.v_B) for b in branches]

    if n_branches is not None:
        branches = sorted(branches, key=lambda b: b.Omega_min)[:n_branches]
    vh = find_van_hove(branches)
    return ModeSpectrum(geometry={"kind": "cylinder", "R": R, "material": material},
                        branches=branches, van_hove=vh, Omega_max=Omega_max)


def _package_curves(material, R, curves, family, p, Omega_max, frac_every, der):
    out = []
    for idx, c in enumerate(curves):
        q, Om = c["q"], c["Omega"]
        keep = Om <= Omega_max * 1.02
        if keep.sum() < 4:
            continue
        q, Om = q[keep], Om[keep]
        Omega_min = float(np.min(Om))
        # fundamentals have finite phase velocity as q -> 0; overtones
        # diverge there, and Omega(q_lo) is the cutoff to O((q_lo R)^2)
        Omega_co = 0.0 if Om[0] / q[0] < 2.0 * material.v_l else float(Om[0])
        fq = q[::frac_every]
        fOm = Om[::frac_every]
        e_l = np.empty_like(fq)
        for i, (qq, oo) in enumerate(zip(fq, fOm)):
            el, et = energy_fractions(material, family, p, qq, oo, R)
            s = el + et
            e_l[i] = el / s if s > 0 else 0.0
        br = DispersionBranch(
            family=family, branch_index=idx, q=q, Omega=Om,
            Omega_co=Omega_co, Omega_min=min(Omega_min, Omega_co) if Omega_co else Omega_min,
            multiplicity=2 if p >= 1 else 1, azimuthal=p,
            frac_q=fq, frac_e_l=e_l)
        out.append(br)
    return out


def _splice_flexural_asymptote(br: DispersionBranch, R: float, v_B: float):
    """Replace ill-conditioned small-q flexural samples with the quadratic law."""
    if br.family != "flexural" or br.azimuthal != 1 or br.Omega_co != 0.0:
        return br
    if br.analytic is not None:
        return br
    qR = br.q * R
    asym = 0.5 * v_B * R * br.q**2
    # smoothstep blend over qR in [0.02, 0.06]
    t = np.clip((qR - 0.02) / 0.04, 0.0, 1.0)
    w = t * t * (3 - 2 * t)
    Om = (1 - w) * asym + w * br.Omega
    # extend below the first solver sample with pure asymptote
    q_ext = np.geomspace(1e-7 / R, br.q[0] * 0.999, 40)
    q_new = np.concatenate([q_ext, br.q])
    Om_new = np.concatenate([0.5 * v_B * R * q_ext**2, Om])
    return DispersionBranch(
        family=br.family, branch_index=br.branch_index, q=q_new, Omega=Om_new,
        Omega_co=0.0, Omega_min=0.0, multiplicity=br.multiplicity,
        azimuthal=br.azimuthal, frac_q=br.frac_q, frac_e_l=br.frac_e_l)
