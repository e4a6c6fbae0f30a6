"""Canned sweep definitions reproducing the reference plots.

Each builder returns (meta, columns): `meta` documents fixed parameters
and spectrum truncation for the provenance block, `columns` is an
ordered list of (name, array).  Parameters follow the corresponding
figure captions; anything a caption leaves open is fixed here and
documented in the meta block.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .constants import HBAR, KB
from .dissipation import (DriveSpec, critical_intensity, q_rel, q_res,
                          q_res_low_intensity)
from .dynamics import (T2Model, t1_bulk, t1_cavity, t1_reduced, t1_waveguide,
                       t2_total)
from .materials import (Material, silica, silica_ensemble,
                        zeta_for_coupling_ratio)
from .noise import (cavity_relaxation_noise, ensemble_relaxation_noise,
                    ensemble_resonant_noise, single_defect_spectrum)
from .spectra import (ModeSpectrum, resonator_spectrum,
                      solutions_at_frequency, solve_cylinder_branches)

__all__ = ["FIGURES", "build_figure", "plot_script"]

_SPECTRUM_CACHE: dict = {}


def _cylinder(R: float, material: Material, Omega_max: float) -> ModeSpectrum:
    key = ("cyl", R, material.zeta, round(Omega_max))
    if key not in _SPECTRUM_CACHE:
        _SPECTRUM_CACHE[key] = solve_cylinder_branches(R, material, Omega_max)
    return _SPECTRUM_CACHE[key]


def _equal_coupling_silica() -> Material:
    """Silica with zeta set so (gamma_l/v_l)^2 = (gamma_t/v_t)^2."""
    base = silica()
    zeta = zeta_for_coupling_ratio(base.v_t / base.v_l)[0]
    return Material(rho=base.rho, v_l=base.v_l, v_t=base.v_t,
                    gamma_tilde=base.gamma_tilde, zeta=zeta,
                    dipole=base.dipole, eps_rel=base.eps_rel)


def _map(worker, values, threads: int):
    if threads <= 1:
        return [worker(v) for v in values]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(worker, values))


# --- figure builders --------------------------------------------------------


def figure_5(threads: int = 1):
    """Defect decay in a 100 nm silica cylinder: idealized 1D, reduced, full."""
    mat = _equal_coupling_silica()
    R, T = 100e-9, 0.010
    f = np.geomspace(1e6, 1e11, 120)
    Omega_max = 2 * math.pi * 1.05e11
    spectrum = _cylinder(R, mat, Omega_max)
    L1 = math.sqrt(math.pi * R**2)

    def one(fi):
        E = HBAR * 2 * math.pi * fi
        ideal = t1_bulk(E, T, None, mat, D=1, L_compact=L1)
        import warnings as _w
        with _w.catch_warnings():
            _w.simplefilter("ignore")
            reduced = t1_reduced(E, T, None, {"kind": "cylinder", "R": R}, mat)
        full = t1_waveguide(E, T, None, spectrum)
        return ideal, reduced, full

    rows = _map(one, f, threads)
    out = np.array(rows)
    meta = {"R": R, "T": T, "zeta": mat.zeta,
            "spectrum": f"cylinder R=100nm, Omega_max={Omega_max:.6e}, "
                        f"branches={len(spectrum.branches)}"}
    return meta, [("f_hz", f), ("t1_inv_ideal_1d", out[:, 0]),
                  ("t1_inv_reduced_cyl", out[:, 1]),
                  ("t1_inv_full_cyl", out[:, 2])]


def figure_6(threads: int = 1):
    """Defect decay in a 3D bulk vs a 4 um periodic cube at 5 mK."""
    mat = silica()
    T, L_box, Q = 0.005, 4e-6, 1882.0
    f = np.geomspace(1e8, 4e9, 300)
    res = resonator_spectrum(L_box, mat, Q, Omega_max=2 * math.pi * 1.6e10)

    def one(fi):
        omega = 2 * math.pi * fi
        return (t1_bulk(HBAR * omega, T, None, mat),
                t1_cavity(omega, T, None, res, subtract_zero=True))

    rows = np.array(_map(one, f, threads))
    meta = {"T": T, "L_box": L_box, "Q": Q,
            "spectrum": f"periodic cube, modes={res.mode_count()}"}
    return meta, [("f_hz", f), ("t1_inv_bulk_3d", rows[:, 0]),
                  ("t1_inv_resonator", rows[:, 1])]


def figure_7(threads: int = 1):
    """Ensemble dipole noise in 1, 2, 3 dimensions; fixed total volume."""
    mat = silica()
    T, L, V = 0.010, 50e-9, (10e-6) ** 3
    f = np.geomspace(1e1, 1e9, 90)
    t2_by_d = {}
    for D in (1, 2, 3):
        model = T2Model(mat, D=D, scale=L)
        t2_by_d[D] = 1.0 / model.spectral_diffusion_rate(T, silica_ensemble(
            L_compact=L))
    ens = silica_ensemble(L_compact=L)

    def one(fi):
        omega = 2 * math.pi * fi
        vals = []
        for D in (1, 2, 3):
            V_D = V / L ** (3 - D)
            t1m = lambda E, D=D: 1.0 / t1_bulk(E, T, None, mat, D=D,
                                               L_compact=L)
            rel = ensemble_relaxation_noise(omega, T, ens, t1m, mat, D=D,
                                            V_D=V_D)
            resn = ensemble_resonant_noise(omega, T, ens, V_D, t2_by_d[D],
                                           D=D)
            vals.append(rel + resn)
        return vals

    rows = np.array(_map(one, f, threads))
    meta = {"T": T, "L_compact": L, "V": V, "spectrum": "idealized bulks"}
    return meta, [("f_hz", f), ("s_1d", rows[:, 0]), ("s_2d", rows[:, 1]),
                  ("s_3d", rows[:, 2])]


def figure_8(threads: int = 1):
    """Single-defect noise: on- and -4%-detuned from a 2 um cube mode."""
    mat = silica()
    T, L_box, Q = 0.010, 2e-6, 1882.0
    res = resonator_spectrum(L_box, mat, Q, Omega_max=2 * math.pi * 3e10)
    Omega1 = float(res.Omega[0])
    f = np.geomspace(1e3, 1e10, 200)
    d = mat.dipole

    def defect_curves(omega0):
        E = HBAR * omega0
        t1_cav = 1.0 / t1_cavity(omega0, T, None, res)
        t1_blk = 1.0 / t1_bulk(E, T, None, mat)
        return E, (t1_cav, 2 * t1_cav), (t1_blk, 2 * t1_blk)

    E_on, cav_on, blk_on = defect_curves(Omega1)
    E_de, cav_de, blk_de = defect_curves(0.96 * Omega1)

    def one(fi):
        omega = 2 * math.pi * fi
        return [single_defect_spectrum(0.0, E_on, *cav_on, T, omega, d),
                single_defect_spectrum(0.0, E_de, *cav_de, T, omega, d),
                single_defect_spectrum(0.0, E_on, *blk_on, T, omega, d),
                single_defect_spectrum(0.0, E_de, *blk_de, T, omega, d)]

    rows = np.array(_map(one, f, threads))
    meta = {"T": T, "L_box": L_box, "Q": Q,
            "Omega1": Omega1, "spectrum": f"modes={res.mode_count()}"}
    return meta, [("f_hz", f), ("s_cavity_onres", rows[:, 0]),
                  ("s_cavity_detuned", rows[:, 1]),
                  ("s_bulk_onres", rows[:, 2]),
                  ("s_bulk_detuned", rows[:, 3])]


def figure_9(threads: int = 1):
    """Ensemble relaxation noise per volume: 3D bulk vs a 1 um cube."""
    mat = silica()
    T, L_box, Q = 0.010, 1e-6, 1882.0
    ens = silica_ensemble()
    res = resonator_spectrum(L_box, mat, Q, Omega_max=2 * math.pi * 4e10)
    f = np.geomspace(1e3, 1e10, 100)

    def one(fi):
        omega = 2 * math.pi * fi
        t1m = lambda E: 1.0 / t1_bulk(E, T, None, mat)
        bulk = ensemble_relaxation_noise(omega, T, ens, t1m, mat, V_D=1.0)
        cav = cavity_relaxation_noise(omega, T, res, ens, V_D=1.0)
        return bulk, cav

    rows = np.array(_map(one, f, threads))
    meta = {"T": T, "L_box": L_box, "Q": Q,
            "spectrum": f"modes={res.mode_count()}"}
    return meta, [("f_hz", f), ("s_bulk_per_volume", rows[:, 0]),
                  ("s_resonator_per_volume", rows[:, 1])]


def figure_10(threads: int = 1):
    """Critical intensity vs frequency: wire, periodic cube, 3D bulk."""
    mat = silica()
    T, R, L_box, Q = 0.010, 100e-9, 2e-6, 1882.0
    ens = silica_ensemble()
    f = np.geomspace(1e7, 1.5e10, 90)
    spectrum = _cylinder(R, mat, 2 * math.pi * 1.6e10)
    res = resonator_spectrum(L_box, mat, Q, Omega_max=2 * math.pi * 3e10)
    t2_3d = T2Model(mat, D=3)
    t2_1d = T2Model(mat, D=1, scale=R)

    def one(fi):
        omega = 2 * math.pi * fi
        E = HBAR * omega
        # bulk: longitudinal plane wave
        r_blk = t1_bulk(E, T, None, mat)
        jc_blk = critical_intensity(omega, 1.0 / r_blk,
                                    t2_total(E, T, r_blk, t2_3d, ens),
                                    mat, ens)
        # wire: driven fundamental compressional mode
        sols = [s for s in solutions_at_frequency(spectrum, omega)
                if s.branch.family == "compressional"
                and s.branch.Omega_co == 0.0]
        if sols:
            s = sols[0]
            cpl = (mat.gamma_l**2 * s.e_l / mat.v_l**2
                   + mat.gamma_t**2 * s.e_t / mat.v_t**2)
            r_wg = t1_waveguide(E, T, None, spectrum)
            jc_wg = critical_intensity(
                omega, 1.0 / r_wg, t2_total(E, T, r_wg, t2_1d, ens),
                mat, ens, v_group=abs(s.v_g), coupling_sum=cpl)
        else:
            jc_wg = math.nan
        # resonator: cavity-decay T1 in the plane-wave intensity form
        r_cav = t1_cavity(omega, T, None, res)
        if r_cav > 0:
            jc_cav = critical_intensity(
                omega, 1.0 / r_cav, t2_total(E, T, r_cav, t2_3d, ens),
                mat, ens, polarization="t")
        else:
            jc_cav = math.inf
        return jc_blk, jc_wg, jc_cav

    rows = np.array(_map(one, f, threads))
    meta = {"T": T, "R": R, "L_box": L_box, "Q": Q,
            "spectrum": f"cylinder branches={len(spectrum.branches)}, "
                        f"cube modes={res.mode_count()}"}
    return meta, [("f_hz", f), ("jc_bulk_3d", rows[:, 0]),
                  ("jc_cylinder", rows[:, 1]), ("jc_resonator", rows[:, 2])]


def figure_11(threads: int = 1):
    """Q of the fundamental compressional wire mode at 100 W/m^2, 10 mK."""
    mat = silica()
    T, R, J = 0.010, 100e-9, 100.0
    ens = silica_ensemble(L_compact=R)
    f = np.geomspace(1e7, 3e10, 160)
    spectrum = _cylinder(R, mat, 2 * math.pi * 3.2e10)
    t2m = T2Model(mat, D=1, scale=R)

    def one(fi):
        omega = 2 * math.pi * fi
        E = HBAR * omega
        low = q_res_low_intensity(omega, T, mat, ens, D=3)
        rel_flex = q_rel(omega, T, mat, ens, mode="flex_1d", R=R)
        rel_3d = q_rel(omega, T, mat, ens, D=3, mode="bulk_hf")

        def q_sat(rate):
            t2 = t2_total(E, T, rate, t2m, ens)
            sols = [s for s in solutions_at_frequency(spectrum, omega)
                    if s.branch.family == "compressional"
                    and s.branch.Omega_co == 0.0]
            if not sols:
                return math.nan
            s = sols[0]
            cpl = (mat.gamma_l**2 * s.e_l / mat.v_l**2
                   + mat.gamma_t**2 * s.e_t / mat.v_t**2)
            jc = critical_intensity(omega, 1.0 / rate, t2, mat, ens,
                                    v_group=abs(s.v_g), coupling_sum=cpl)
            return low / math.sqrt(1 + J / jc)

        r_full = t1_waveguide(E, T, None, spectrum)
        import warnings as _w
        with _w.catch_warnings():
            _w.simplefilter("ignore")
            r_red = t1_reduced(E, T, None, {"kind": "cylinder", "R": R}, mat)
        q_wire = q_sat(r_full) + rel_flex
        q_quasi = q_sat(r_red) + rel_flex
        # bulk: longitudinal plane wave, plane-wave critical intensity
        r_blk = t1_bulk(E, T, None, mat)
        t2_blk = t2_total(E, T, r_blk, T2Model(mat, D=3), ens)
        q_blk = (q_res(omega, T, mat, ens, 1.0 / r_blk, t2_blk,
                       drive=DriveSpec(J=J)) + rel_3d)
        return q_wire, q_quasi, q_blk, low, rel_flex

    rows = np.array(_map(one, f, threads))
    meta = {"T": T, "R": R, "J": J,
            "spectrum": f"cylinder branches={len(spectrum.branches)}, "
                        f"van_hove={len(spectrum.van_hove)}"}
    return meta, [("f_hz", f), ("q_inv_wire", rows[:, 0]),
                  ("q_inv_quasi_1d", rows[:, 1]),
                  ("q_inv_bulk_3d", rows[:, 2]),
                  ("q_inv_low_intensity", rows[:, 3]),
                  ("q_inv_relaxation_floor", rows[:, 4])]


def figure_12(threads: int = 1):
    """Q of the fundamental shear mode of a periodic cube vs frequency."""
    mat = silica()
    T, J, Q = 0.010, 1.0, 1882.0
    ens = silica_ensemble()
    f = np.geomspace(2e8, 1e10, 60)
    t2m = T2Model(mat, D=3)

    def one(fi):
        Omega1 = 2 * math.pi * fi
        L_box = 2 * math.pi * mat.v_t / Omega1
        res = resonator_spectrum(L_box, mat, Q,
                                 Omega_max=max(6 * Omega1,
                                               60 * KB * T / HBAR))
        E = HBAR * Omega1
        r_cav = t1_cavity(Omega1, T, None, res)
        t2 = t2_total(E, T, r_cav, t2m, ens)
        drive = DriveSpec(polarization="t", e_l=0.0, e_t=1.0, J=J)
        args = (Omega1, T, mat, ens, 1.0 / r_cav, t2)
        q_fixed = q_res(*args, drive=drive)
        rel_cav = q_rel(Omega1, T, mat, ens, drive=drive, mode="cavity",
                        resonator=res)
        # finesse enhancement: circulating J Q_total/(2 pi), fixed point
        q_inv = q_fixed + rel_cav
        for _ in range(60):
            d = DriveSpec(polarization="t", e_l=0.0, e_t=1.0,
                          J=J / (2 * math.pi * q_inv))
            q_new = q_res(*args, drive=d) + rel_cav
            if abs(q_new - q_inv) < 1e-9 * q_inv:
                break
            q_inv = q_new
        # 3D bulk, same drive intensity
        r_blk = t1_bulk(E, T, None, mat)
        t2_blk = t2_total(E, T, r_blk, t2m, ens)
        q_blk = (q_res(Omega1, T, mat, ens, 1.0 / r_blk, t2_blk, drive=drive)
                 + q_rel(Omega1, T, mat, ens, drive=drive, mode="bulk_hf"))
        return q_fixed + rel_cav, q_inv, rel_cav, q_blk

    rows = np.array(_map(one, f, threads))
    meta = {"T": T, "J": J, "Q": Q,
            "spectrum": "periodic cube scaled so the fundamental shear "
                        "mode tracks the sweep frequency"}
    return meta, [("f_hz", f), ("q_inv_resonator_fixed_j", rows[:, 0]),
                  ("q_inv_resonator_finesse", rows[:, 1]),
                  ("q_inv_relaxation_ceiling", rows[:, 2]),
                  ("q_inv_bulk_3d", rows[:, 3])]


def figure_13(threads: int = 1):
    """Saturated dissipation floors and low-intensity limits vs T; mu=0.3."""
    mat = silica()
    mu, R, L = 0.3, 100e-9, 50e-9
    Omega = 2 * math.pi * 1e9
    ens = silica_ensemble(mu=mu)
    Ts = np.geomspace(1e-3, 1.0, 80)

    def one(T):
        return (q_rel(Omega, T, mat, ens, mode="flex_1d", R=R),
                q_rel(Omega, T, mat, ens, mode="flex_2d", L=L),
                q_rel(Omega, T, mat, ens, D=3, mode="bulk_hf"),
                q_res_low_intensity(Omega, T, mat, ens, D=3),
                q_rel(Omega, T, mat, ens, D=3, mode="universal_lf"))

    rows = np.array(_map(one, Ts, threads))
    meta = {"mu": mu, "R": R, "L": L, "Omega": Omega,
            "spectrum": "closed-form asymptotes"}
    return meta, [("T_k", Ts), ("q_inv_floor_1d", rows[:, 0]),
                  ("q_inv_floor_2d", rows[:, 1]),
                  ("q_inv_floor_3d", rows[:, 2]),
                  ("q_inv_low_intensity", rows[:, 3]),
                  ("q_inv_universal_lf", rows[:, 4])]


FIGURES = {5: figure_5, 6: figure_6, 7: figure_7, 8: figure_8, 9: figure_9,
           10: figure_10, 11: figure_11, 12: figure_12, 13: figure_13}


def build_figure(number: int, threads: int = 1):
    if number not in FIGURES:
        raise ValueError(f"unknown figure {number}; choose 5..13")
    return FIGURES[number](threads)


_SLOPE_NOTE = {
    13: """
# annotate fitted low-temperature slopes of the saturated floors
mask = x <= 30e-3
for col, label in [(1, "1D"), (2, "2D"), (3, "3D")]:
    s = np.polyfit(np.log(x[mask]), np.log(data[mask, col]), 1)[0]
    ax.text(0.02, 0.95 - 0.07 * col, f"{label} slope = {s:.2f}",
            transform=ax.transAxes)
"""}


def plot_script(number: int, csv_name: str) -> str:
    """Self-contained plot script for one figure CSV (log-log axes)."""
    extra = _SLOPE_NOTE.get(number, "")
    return f'''"""Plot for {csv_name} (log-log axes)."""
import os
import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

csv = os.path.join(os.path.dirname(__file__), "{csv_name}")
if not os.path.exists(csv):
    raise SystemExit(f"missing CSV: {{csv}}")
n_skip = 0
with open(csv) as fh:
    for line in fh:
        n_skip += 1
        if not line.startswith("#"):
            names = line.strip().split(",")
            break
data = np.loadtxt(csv, delimiter=",", skiprows=n_skip, ndmin=2)
x = data[:, 0]
fig, ax = plt.subplots(figsize=(6, 4.2))
for i, name in enumerate(names[1:], start=1):
    y = data[:, i]
    ok = np.isfinite(y) & (y > 0)
    ax.loglog(x[ok], y[ok], label=name)
ax.set_xlabel(names[0])
ax.set_ylabel("value")
ax.legend(fontsize=7)
{extra}
fig.tight_layout()
fig.savefig(csv.replace(".csv", ".png"), dpi=160)
print("wrote", csv.replace(".csv", ".png"))
'''
