"""Discrete acoustic spectrum of a periodic-boundary cubic resonator.

Plane-wave modes k = (2 pi / L_box) n over the nonzero integer lattice,
one longitudinal and two transverse polarizations per wavevector, with
linewidths assigned by a quality-factor policy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from ..materials import Material

QPolicy = Union[float, Callable[[np.ndarray], np.ndarray]]


@dataclass
class ResonatorSpectrum:
    """Mode table of one periodic cube, sorted by frequency.

    `pol` is 0 for longitudinal (e_l = 1) and 1 for transverse
    (e_t = 1); transverse entries appear once with multiplicity 2.
    """

    L_box: float
    material: Material
    Omega: np.ndarray          # rad/s, ascending
    Gamma: np.ndarray          # rad/s
    pol: np.ndarray            # 0 = longitudinal, 1 = transverse
    multiplicity: np.ndarray   # polarization degeneracy per entry
    k: np.ndarray              # (N, 3) wavevectors, rad/m
    Q_policy: QPolicy = field(repr=False, default=1000.0)

    @property
    def e_l(self) -> np.ndarray:
        return (self.pol == 0).astype(float)

    @property
    def e_t(self) -> np.ndarray:
        return (self.pol == 1).astype(float)

    @property
    def volume(self) -> float:
        return self.L_box**3

    def mode_count(self) -> int:
        return int(np.sum(self.multiplicity))


def resonator_spectrum(L_box: float, material: Material, Q_policy: QPolicy,
                       Omega_max: float) -> ResonatorSpectrum:
    """All plane-wave modes of the periodic cube with Omega <= Omega_max."""
    if L_box <= 0:
        raise ValueError("L_box must be positive")
    dk = 2 * math.pi / L_box
    if Omega_max < dk * material.v_t:
        raise ValueError(
            f"Omega_max={Omega_max:.3e} below the fundamental mode "
            f"{dk * material.v_t:.3e}; no modes in range")
    n_max = int(math.floor(Omega_max / (dk * material.v_t))) + 1
    rng = np.arange(-n_max, n_max + 1)
    n = np.stack(np.meshgrid(rng, rng, rng, indexing="ij"), axis=-1).reshape(-1, 3)
    n = n[np.any(n != 0, axis=1)]
    k = dk * n.astype(float)
    kmag = np.linalg.norm(k, axis=1)

    parts = []
    for pol, v, mult in ((0, material.v_l, 1), (1, material.v_t, 2)):
        Om = v * kmag
        keep = Om <= Omega_max
        parts.append((Om[keep], np.full(keep.sum(), pol, dtype=np.int8),
                      np.full(keep.sum(), mult, dtype=np.int16), k[keep]))
    Omega = np.concatenate([p[0] for p in parts])
    pol = np.concatenate([p[1] for p in parts])
    mult = np.concatenate([p[2] for p in parts])
    kvec = np.concatenate([p[3] for p in parts])
    order = np.argsort(Omega, kind="stable")
    Omega, pol, mult, kvec = Omega[order], pol[order], mult[order], kvec[order]

    if callable(Q_policy):
        Q = np.asarray(Q_policy(Omega), dtype=float)
    else:
        Q = np.full_like(Omega, float(Q_policy))
    if np.any(Q <= 0):
        raise ValueError("Q policy produced nonpositive quality factor")
    Gamma = Omega / Q
    return ResonatorSpectrum(L_box=L_box, material=material, Omega=Omega,
                             Gamma=Gamma, pol=pol, multiplicity=mult, k=kvec,
                             Q_policy=Q_policy)
