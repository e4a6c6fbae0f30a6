"""Idealized D-dimensional bulk phonon density of states.

The reduced-dimension bulks keep a compact cross-section of size
L_compact per squeezed direction; their effective "longitudinal" branch
travels at the bar velocity (1D) or plate velocity (2D), the transverse
branch at v_t.  The 3D bulk counts one longitudinal and two transverse
polarizations.
"""

from __future__ import annotations

import math

import numpy as np

from ..materials import Material, derived_constants

# surface of the unit (D-1)-sphere: S_0 = 2, S_1 = 2 pi, S_2 = 4 pi
SPHERE_SURFACE = {1: 2.0, 2: 2 * math.pi, 3: 4 * math.pi}


def bulk_branch_velocities(D: int, material: Material) -> dict[str, tuple[float, int]]:
    """{polarization: (velocity, branch count)} for the idealized D-bulk."""
    if D == 3:
        return {"l": (material.v_l, 1), "t": (material.v_t, 2)}
    der = derived_constants(material)
    if D == 2:
        return {"l": (der.v_pl, 1), "t": (material.v_t, 1)}
    if D == 1:
        return {"l": (der.v_B, 1), "t": (material.v_t, 1)}
    raise ValueError("D must be 1, 2 or 3")


def bulk_dos(D: int, material: Material, L_compact: float, polarization: str,
             Omega, volume: float = 1.0):
    """Phonon mode density g(Omega) of the idealized D-dimensional bulk.

    g_eta = volume * S_{D-1}/(2 pi)^D * Omega^(D-1)/v_eta^D per branch;
    `volume` is a D-volume (default 1 m^D).  polarization is 'l', 't' or
    'total'.  L_compact is carried for callers converting a 3D sample
    volume to V_D = V / L_compact^(3-D); it does not enter the density.
    """
    if D not in (1, 2, 3):
        raise ValueError("D must be 1, 2 or 3")
    if L_compact <= 0:
        raise ValueError("L_compact must be positive")
    Omega = np.asarray(Omega, dtype=float)
    if np.any(Omega < 0):
        raise ValueError("Omega must be nonnegative")
    vels = bulk_branch_velocities(D, material)
    if polarization == "total":
        items = vels.values()
    elif polarization in vels:
        items = [vels[polarization]]
    else:
        raise ValueError(f"unknown polarization {polarization!r}")
    pref = volume * SPHERE_SURFACE[D] / (2 * math.pi) ** D
    g = sum(count / v**D for v, count in items) * pref * Omega ** (D - 1)
    return g if np.ndim(g) else float(g)
