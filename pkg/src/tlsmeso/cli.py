"""Command-line interface: sweeps, canned figure datasets, verification.

Every data command reads an optional TOML config, runs a deterministic
sweep (thread pool with order-preserving map), and writes CSV with a
'#'-prefixed provenance block.  Exit status is 0 only when every
requested value evaluated to a finite, converged number.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, config_hash, load_config
from .constants import HBAR
from .dissipation import (DriveSpec, critical_intensity, q_rel, q_res,
                          q_res_low_intensity)
from .dynamics import T1Model, T2Model, t1_bulk, t2_total
from .figures import FIGURES, build_figure, plot_script
from .materials import derived_constants
from .noise import (cavity_relaxation_noise, ensemble_relaxation_noise,
                    ensemble_resonant_noise)
from .oracle import run_registry
from .spectra import (bulk_dos, resonator_spectrum, solve_cylinder_branches,
                      solve_plate_branches, waveguide_dos)

__all__ = ["main"]


class CommandError(RuntimeError):
    """Fatal command failure; payload is a machine-readable report."""

    def __init__(self, kind: str, message: str, **extra):
        super().__init__(message)
        self.report = {"error": kind, "message": message, **extra}


# --- output ----------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return "%.12e" % value
    return str(value)


def write_csv(path: str, command: str, config: RunConfig, meta: dict,
              columns: list) -> None:
    n = len(columns[0][1])
    if any(len(col) != n for _, col in columns):
        raise CommandError("internal", "ragged column lengths")
    lines = [f"# tlsmeso {__version__}",
             f"# command: {command}",
             f"# config_hash: {config_hash(config)}"]
    for key in sorted(meta):
        lines.append(f"# {key} = {meta[key]}")
    lines.append(",".join(name for name, _ in columns))
    for i in range(n):
        lines.append(",".join(_fmt(col[i]) for _, col in columns))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _check_finite(columns) -> None:
    for name, col in columns:
        arr = np.asarray(col)
        if arr.dtype.kind == "f" and not np.all(np.isfinite(arr) | np.isinf(arr)):
            raise CommandError("not_converged",
                               f"column '{name}' contains non-finite values",
                               column=name)


def _map(worker, values, threads: int):
    if threads <= 1:
        return [worker(v) for v in values]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(worker, values))


# --- geometry helpers ------------------------------------------------------


def _spectrum_for(config: RunConfig):
    g = config.geometry
    Omega_max = 2 * math.pi * g["f_max"]
    if g["kind"] == "cylinder":
        return solve_cylinder_branches(g["R"], config.material, Omega_max)
    if g["kind"] == "plate":
        return solve_plate_branches(g["L"], config.material, Omega_max)
    if g["kind"] == "resonator":
        return resonator_spectrum(g["L_box"], config.material, g["Q"],
                                  Omega_max)
    return None  # bulk


def _t1_model(config: RunConfig):
    g = config.geometry
    spec = _spectrum_for(config)
    if spec is None:
        return T1Model(geometry={"kind": "bulk", "D": g["D"],
                                 "L_compact": config.ensemble.L_compact},
                       material=config.material)
    return T1Model(geometry=spec, material=config.material)


def _t2_model(config: RunConfig) -> T2Model:
    g = config.geometry
    scale = g["R"] if g["kind"] == "cylinder" else g["L"]
    D = {"cylinder": 1, "plate": 2}.get(g["kind"], g["D"])
    if D == 3:
        return T2Model(config.material, D=3)
    return T2Model(config.material, D=D, scale=scale)


def _sweep_column(config: RunConfig) -> str:
    return {"frequency": "f_hz", "temperature": "T_k",
            "intensity": "j_w_m2"}[config.sweep["axis"]]


def _conditions_at(config: RunConfig, x: float):
    """(frequency, T, J) with the sweep axis substituted."""
    c = config.conditions
    axis = config.sweep["axis"]
    return (x if axis == "frequency" else c["frequency"],
            x if axis == "temperature" else c["T"],
            x if axis == "intensity" else c["J"])


# --- subcommands -----------------------------------------------------------


def cmd_material(config: RunConfig, threads: int):
    import dataclasses

    mat = config.material
    d = {"rho": mat.rho, "v_l": mat.v_l, "v_t": mat.v_t,
         "gamma_tilde_j": mat.gamma_tilde, "gamma_l_j": mat.gamma_l,
         "gamma_t_j": mat.gamma_t, "zeta": mat.zeta,
         "dipole_cm": mat.dipole, "eps_rel": mat.eps_rel}
    d.update(dataclasses.asdict(derived_constants(mat)))
    keys = sorted(d)
    meta = {"spectrum": "none"}
    return meta, [(k, np.array([d[k]], dtype=float)) for k in keys]


def cmd_dispersion(config: RunConfig, threads: int):
    g = config.geometry
    if g["kind"] == "resonator":
        res = _spectrum_for(config)
        meta = {"spectrum": f"periodic cube L={g['L_box']}, Q={g['Q']}, "
                            f"modes={res.mode_count()}"}
        return meta, [
            ("f_hz", res.Omega / (2 * math.pi)),
            ("polarization", np.where(res.pol == 0, "l", "t")),
            ("multiplicity", res.multiplicity.astype(float)),
            ("gamma_s", res.Gamma),
        ]
    if g["kind"] == "bulk":
        raise CommandError("config", "dispersion needs a confined geometry")
    spec = _spectrum_for(config)
    rows_b, rows_q, rows_f, rows_fam, rows_m = [], [], [], [], []
    for b in spec.branches:
        rows_b.extend([float(b.branch_index)] * len(b.q))
        rows_fam.extend([b.family] * len(b.q))
        rows_m.extend([float(b.multiplicity)] * len(b.q))
        rows_q.extend(b.q.tolist())
        rows_f.extend((b.Omega / (2 * math.pi)).tolist())
    meta = {"spectrum": f"{g['kind']}, Omega_max={spec.Omega_max:.6e}, "
                        f"branches={len(spec.branches)}, "
                        f"van_hove={len(spec.van_hove)}"}
    return meta, [("branch", np.array(rows_b)), ("family", rows_fam),
                  ("multiplicity", np.array(rows_m)),
                  ("q_inv_m", np.array(rows_q)), ("f_hz", np.array(rows_f))]


def cmd_dos(config: RunConfig, threads: int):
    g = config.geometry
    if config.sweep["axis"] != "frequency":
        raise CommandError("config", "dos supports only frequency sweeps")
    f = config.sweep_values()
    if g["kind"] == "bulk":
        dos = bulk_dos(g["D"], config.material, config.ensemble.L_compact,
                       "total", 2 * math.pi * f) * 2 * math.pi
        meta = {"spectrum": f"idealized bulk D={g['D']}"}
        return meta, [("f_hz", f), ("dos_per_hz", dos)]
    if g["kind"] == "resonator":
        raise CommandError("config", "dos needs a bulk or waveguide geometry")
    spec = _spectrum_for(config)
    vals = _map(lambda fi: waveguide_dos(spec, 2 * math.pi * fi) * 2 * math.pi,
                f, threads)
    meta = {"spectrum": f"{g['kind']}, branches={len(spec.branches)}"}
    return meta, [("f_hz", f), ("dos_per_hz", np.array(vals))]


def cmd_t1(config: RunConfig, threads: int):
    model = _t1_model(config)
    f_or_t = config.sweep_values()

    def one(x):
        f, T, _ = _conditions_at(config, x)
        return model.rate(HBAR * 2 * math.pi * f, T)

    vals = np.array(_map(one, f_or_t, threads))
    meta = {"spectrum": config.geometry["kind"]}
    return meta, [(_sweep_column(config), f_or_t), ("t1_inv_s", vals)]


def cmd_t2(config: RunConfig, threads: int):
    t1m, t2m = _t1_model(config), _t2_model(config)
    xs = config.sweep_values()

    def one(x):
        f, T, _ = _conditions_at(config, x)
        E = HBAR * 2 * math.pi * f
        rate = t1m.rate(E, T)
        prime = t2m.spectral_diffusion_rate(T, config.ensemble)
        return t2_total(E, T, rate, t2m, config.ensemble), rate, prime

    rows = np.array(_map(one, xs, threads))
    meta = {"spectrum": config.geometry["kind"]}
    return meta, [(_sweep_column(config), xs), ("t2_s", rows[:, 0]),
                  ("t1_inv_s", rows[:, 1]), ("t2_prime_inv_s", rows[:, 2])]


def cmd_noise(config: RunConfig, threads: int):
    g = config.geometry
    if config.sweep["axis"] != "frequency":
        raise CommandError("config", "noise supports only frequency sweeps")
    f = config.sweep_values()
    ens, mat = config.ensemble, config.material
    T = config.conditions["T"]
    if g["kind"] == "resonator":
        res = _spectrum_for(config)

        def one(fi):
            return cavity_relaxation_noise(2 * math.pi * fi, T, res, ens,
                                           V_D=1.0), 0.0
        meta = {"spectrum": f"periodic cube, modes={res.mode_count()}"}
    elif g["kind"] == "bulk":
        D = g["D"]
        t2m = _t2_model(config)
        t2p = 1.0 / t2m.spectral_diffusion_rate(T, ens)
        t1m = lambda E: 1.0 / t1_bulk(E, T, None, mat, D=D,
                                      L_compact=ens.L_compact)

        def one(fi):
            omega = 2 * math.pi * fi
            rel = ensemble_relaxation_noise(omega, T, ens, t1m, mat, D=D,
                                            V_D=1.0)
            resn = ensemble_resonant_noise(omega, T, ens, 1.0, t2p, D=D)
            return rel, resn
        meta = {"spectrum": f"idealized bulk D={D}"}
    else:
        raise CommandError("config", "noise needs a bulk or resonator "
                           "geometry")
    rows = np.array(_map(one, f, threads))
    return meta, [("f_hz", f), ("s_relaxation", rows[:, 0]),
                  ("s_resonant", rows[:, 1]),
                  ("s_total", rows[:, 0] + rows[:, 1])]


def cmd_jc(config: RunConfig, threads: int):
    g = config.geometry
    ens, mat = config.ensemble, config.material
    t1m, t2m = _t1_model(config), _t2_model(config)
    xs = config.sweep_values()
    D = {"cylinder": 1, "plate": 2}.get(g["kind"], g["D"])

    def one(x):
        f, T, _ = _conditions_at(config, x)
        omega = 2 * math.pi * f
        E = HBAR * omega
        rate = t1m.rate(E, T)
        t2 = t2_total(E, T, rate, t2m, ens)
        return critical_intensity(
            omega, 1.0 / rate, t2, mat, ens, D=D,
            channel=config.conditions["channel"],
            polarization=config.conditions["polarization"])

    vals = np.array(_map(one, xs, threads))
    meta = {"spectrum": config.geometry["kind"]}
    return meta, [(_sweep_column(config), xs), ("jc_w_m2", vals)]


def cmd_q(config: RunConfig, threads: int):
    g = config.geometry
    ens, mat = config.ensemble, config.material
    t1m, t2m = _t1_model(config), _t2_model(config)
    res = _spectrum_for(config) if g["kind"] == "resonator" else None
    xs = config.sweep_values()
    D = {"cylinder": 1, "plate": 2}.get(g["kind"], g["D"])
    rel_mode = config.conditions["rel_mode"]
    rel_kw = {}
    if rel_mode == "flex_1d":
        rel_kw["R"] = g["R"]
    elif rel_mode == "flex_2d":
        rel_kw["L"] = g["L"]
    elif rel_mode == "cavity":
        rel_kw["resonator"] = res

    def one(x):
        f, T, J = _conditions_at(config, x)
        omega = 2 * math.pi * f
        E = HBAR * omega
        rate = t1m.rate(E, T)
        t2 = t2_total(E, T, rate, t2m, ens)
        drive = DriveSpec(channel=config.conditions["channel"],
                          polarization=config.conditions["polarization"],
                          J=J, tsm_classic=config.conditions["tsm_classic"])
        resv = q_res(omega, T, mat, ens, 1.0 / rate, t2, D=D, drive=drive)
        relv = q_rel(omega, T, mat, ens, D=D, drive=drive, mode=rel_mode,
                     **rel_kw)
        return resv, relv

    rows = np.array(_map(one, xs, threads))
    meta = {"spectrum": config.geometry["kind"], "rel_mode": rel_mode}
    return meta, [(_sweep_column(config), xs), ("q_res_inv", rows[:, 0]),
                  ("q_rel_inv", rows[:, 1]),
                  ("q_total_inv", rows[:, 0] + rows[:, 1])]


COMMANDS = {"material": cmd_material, "dispersion": cmd_dispersion,
            "dos": cmd_dos, "t1": cmd_t1, "t2": cmd_t2, "noise": cmd_noise,
            "jc": cmd_jc, "q": cmd_q}


# --- driver ----------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="tlsmeso",
        description="Tunneling-defect relaxation, noise and dissipation in "
                    "confined geometries.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", default=None, help="TOML config file")
        sp.add_argument("--out", default=None, help="output CSV path")
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--format", default="csv", choices=["csv"])
        sp.add_argument("--tsm-classic", action="store_true",
                        help="use the averaged coupling inside the "
                             "saturation factor")

    for name in COMMANDS:
        common(sub.add_parser(name))
    fig = sub.add_parser("figure")
    fig.add_argument("number", type=int, choices=sorted(FIGURES))
    common(fig)
    fig.add_argument("--emit-plots", action="store_true",
                     help="also write a self-contained plot script")
    ver = sub.add_parser("verify")
    ver.add_argument("--only", default=None,
                     help="comma-separated check names")
    return p


def _run_figure(args) -> int:
    number = args.number
    meta, columns = build_figure(number, threads=args.threads)
    _check_finite(columns)
    config = load_config(args.config)
    out = args.out or f"fig{number}.csv"
    write_csv(out, f"figure {number}", config, meta, columns)
    print(f"wrote {out}")
    if args.emit_plots:
        script = out.rsplit(".csv", 1)[0] + "_plot.py"
        with open(script, "w") as fh:
            fh.write(plot_script(number, out.rsplit("/", 1)[-1]))
        print(f"wrote {script}")
    return 0


def _run_verify(args) -> int:
    names = args.only.split(",") if args.only else None
    results = run_registry(names)
    ok = True
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        ok &= r.passed
        print(f"{status} {r.name}: deviation {r.deviation:.3e} "
              f"(tol {r.tol:.1e}) {r.detail}")
    print(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
    return 0 if ok else 1


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return _run_verify(args)
        if args.command == "figure":
            return _run_figure(args)
        overrides = {}
        if args.tsm_classic:
            overrides = {"conditions": {"tsm_classic": True}}
        config = load_config(args.config, overrides)
        meta, columns = COMMANDS[args.command](config, args.threads)
        _check_finite(columns)
        out = args.out or f"{args.command}.csv"
        write_csv(out, args.command, config, meta, columns)
        print(f"wrote {out}")
        return 0
    except ConfigError as exc:
        print(json.dumps({"error": "config", "message": str(exc)}),
              file=sys.stderr)
        return 2
    except CommandError as exc:
        print(json.dumps(exc.report), file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
