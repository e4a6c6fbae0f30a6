"""Run configuration: TOML ingestion, validation, and canonical hashing.

Configs are strict: unknown sections or keys raise with their field
path, sweeps need at least two points, and every physical value is
validated by the module-level constructors at load time.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Any, Optional

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover - version-dependent import
    import tomli as tomllib

from .constants import DEBYE, EV
from .materials import DefectEnsemble, Material, silica

__all__ = ["ConfigError", "RunConfig", "load_config", "config_hash"]


class ConfigError(ValueError):
    """Invalid configuration; message carries the offending field path."""


_KNOWN = {
    "material": {"rho", "v_l", "v_t", "gamma_l_eV", "zeta", "dipole_debye",
                 "eps_rel"},
    "ensemble": {"P0", "mu", "L_compact", "dipole_debye"},
    "geometry": {"kind", "D", "R", "L", "L_box", "Q", "f_max"},
    "sweep": {"axis", "start", "stop", "points", "spacing"},
    "conditions": {"T", "frequency", "J", "channel", "polarization",
                   "rel_mode", "tsm_classic"},
    "output": {"directory", "formats"},
}

_SWEEP_AXES = ("frequency", "temperature", "intensity")
_GEOMETRY_KINDS = ("bulk", "cylinder", "plate", "resonator")


@dataclass(frozen=True)
class RunConfig:
    """Validated run description; `raw` is the canonical merged mapping."""

    material: Material
    ensemble: DefectEnsemble
    geometry: dict
    sweep: dict
    conditions: dict
    output: dict
    raw: dict = field(repr=False, default_factory=dict)

    def sweep_values(self):
        import numpy as np

        s = self.sweep
        if s["spacing"] == "log":
            return np.geomspace(s["start"], s["stop"], s["points"])
        return np.linspace(s["start"], s["stop"], s["points"])


def _check_keys(data: dict) -> None:
    for section, keys in data.items():
        if section not in _KNOWN:
            raise ConfigError(f"unknown config section [{section}]")
        if not isinstance(keys, dict):
            raise ConfigError(f"section [{section}] must be a table")
        for key in keys:
            if key not in _KNOWN[section]:
                raise ConfigError(f"unknown config key {section}.{key}")


def _build_material(sec: dict) -> Material:
    base = silica()
    gamma_l_ev = sec.get("gamma_l_eV")
    zeta = sec.get("zeta", base.zeta)
    if gamma_l_ev is not None:
        frac = math.sqrt((15 - 40 * zeta + 32 * zeta**2) / 15)
        gamma_tilde = gamma_l_ev * EV / frac
    else:
        gamma_tilde = base.gamma_tilde
    return Material(
        rho=sec.get("rho", base.rho),
        v_l=sec.get("v_l", base.v_l),
        v_t=sec.get("v_t", base.v_t),
        gamma_tilde=gamma_tilde,
        zeta=zeta,
        dipole=sec.get("dipole_debye", base.dipole / DEBYE) * DEBYE,
        eps_rel=sec.get("eps_rel", base.eps_rel),
    )


def _build_ensemble(sec: dict) -> DefectEnsemble:
    return DefectEnsemble(
        P0=sec.get("P0", 5.45e44),
        mu=sec.get("mu", 0.0),
        L_compact=sec.get("L_compact", 50e-9),
        dipole=sec.get("dipole_debye", 1.3) * DEBYE,
    )


def _validate_geometry(sec: dict) -> dict:
    kind = sec.get("kind", "bulk")
    if kind not in _GEOMETRY_KINDS:
        raise ConfigError(f"geometry.kind must be one of {_GEOMETRY_KINDS}")
    out = {"kind": kind, "D": int(sec.get("D", 3))}
    if out["D"] not in (1, 2, 3):
        raise ConfigError("geometry.D must be 1, 2 or 3")
    for key, default in (("R", 100e-9), ("L", 50e-9), ("L_box", 2e-6),
                         ("Q", 1882.0), ("f_max", 20e9)):
        val = float(sec.get(key, default))
        if val <= 0:
            raise ConfigError(f"geometry.{key} must be positive")
        out[key] = val
    return out


def _validate_sweep(sec: dict) -> dict:
    axis = sec.get("axis", "frequency")
    if axis not in _SWEEP_AXES:
        raise ConfigError(f"sweep.axis must be one of {_SWEEP_AXES}")
    start = float(sec.get("start", 1e6))
    stop = float(sec.get("stop", 1e10))
    points = int(sec.get("points", 60))
    spacing = sec.get("spacing", "log")
    if start <= 0 or stop <= 0:
        raise ConfigError("sweep.start and sweep.stop must be positive")
    if stop <= start:
        raise ConfigError("sweep.stop must exceed sweep.start")
    if points < 2:
        raise ConfigError("sweep.points must be at least 2")
    if spacing not in ("log", "linear"):
        raise ConfigError("sweep.spacing must be 'log' or 'linear'")
    return {"axis": axis, "start": start, "stop": stop, "points": points,
            "spacing": spacing}


def _validate_conditions(sec: dict) -> dict:
    out = {
        "T": float(sec.get("T", 0.010)),
        "frequency": float(sec.get("frequency", 1e9)),
        "J": float(sec.get("J", 0.0)),
        "channel": sec.get("channel", "acoustic"),
        "polarization": sec.get("polarization", "l"),
        "rel_mode": sec.get("rel_mode", "quadrature"),
        "tsm_classic": bool(sec.get("tsm_classic", False)),
    }
    if out["T"] <= 0:
        raise ConfigError("conditions.T must be positive")
    if out["frequency"] <= 0:
        raise ConfigError("conditions.frequency must be positive")
    if out["J"] < 0:
        raise ConfigError("conditions.J must be nonnegative")
    if out["channel"] not in ("acoustic", "em"):
        raise ConfigError("conditions.channel must be 'acoustic' or 'em'")
    return out


def _validate_output(sec: dict) -> dict:
    formats = sec.get("formats", ["csv"])
    if not isinstance(formats, list) or any(f != "csv" for f in formats):
        raise ConfigError("output.formats supports only ['csv']")
    return {"directory": sec.get("directory", "out"), "formats": formats}


def build_config(data: dict) -> RunConfig:
    """Validate a merged mapping and construct the run config."""
    _check_keys(data)
    material = _build_material(data.get("material", {}))
    ensemble = _build_ensemble(data.get("ensemble", {}))
    geometry = _validate_geometry(data.get("geometry", {}))
    sweep = _validate_sweep(data.get("sweep", {}))
    conditions = _validate_conditions(data.get("conditions", {}))
    output = _validate_output(data.get("output", {}))
    return RunConfig(material=material, ensemble=ensemble, geometry=geometry,
                     sweep=sweep, conditions=conditions, output=output,
                     raw=data)


def load_config(path: Optional[str], overrides: Optional[dict] = None) -> RunConfig:
    """Load a TOML config file, apply per-section overrides, validate."""
    data: dict[str, Any] = {}
    if path is not None:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    if overrides:
        for section, keys in overrides.items():
            data.setdefault(section, {}).update(keys)
    return build_config(data)


def config_hash(config: RunConfig) -> str:
    """Stable short hash of the canonical config mapping."""
    blob = json.dumps(config.raw, sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]
