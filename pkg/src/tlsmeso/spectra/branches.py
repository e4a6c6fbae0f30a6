"""Dispersion-branch containers, interpolation, DOS, and frequency solves.

Branches are either analytic (torsional family, shear-horizontal plates)
or numerically sampled curves interpolated with monotone cubics.  All
integral consumers work in q-space; the group-velocity floor only
sanitizes pointwise DOS queries near van-Hove points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from ..constants import VG_FLOOR_FRACTION


@dataclass
class DispersionBranch:
    """One guided-wave branch Omega_m(q).

    `analytic` may hold ('linear', v) for Omega = v q or
    ('cutoff', v, kappa) for Omega = v*sqrt(q^2 + kappa^2); numeric
    branches carry dense (q, Omega) samples instead.
    """

    family: str
    branch_index: int
    q: np.ndarray
    Omega: np.ndarray
    Omega_co: float
    Omega_min: float
    multiplicity: int = 1
    azimuthal: Optional[int] = None
    analytic: Optional[tuple] = None
    # energy fractions sampled on a coarse q subgrid (numeric families)
    frac_q: Optional[np.ndarray] = None
    frac_e_l: Optional[np.ndarray] = None
    # fixed fractions for analytic pure-shear families
    fixed_e_l: Optional[float] = None

    def __post_init__(self) -> None:
        self.q = np.asarray(self.q, dtype=float)
        self.Omega = np.asarray(self.Omega, dtype=float)
        if self.q.size >= 2 and not np.all(np.diff(self.q) > 0):
            raise ValueError(f"branch {self.family}/{self.branch_index}: q samples not increasing")
        if np.any(self.Omega < 0):
            raise ValueError("negative Omega sample")
        self._interp = None
        self._dinterp = None
        self._frac_interp = None

    # -- evaluation ---------------------------------------------------------

    def _ensure_interp(self):
        if self._interp is None:
            self._interp = PchipInterpolator(self.q, self.Omega, extrapolate=False)
            self._dinterp = self._interp.derivative()
        return self._interp

    def omega(self, q):
        if self.analytic is not None:
            kind = self.analytic[0]
            if kind == "linear":
                return self.analytic[1] * np.asarray(q, dtype=float)
            v, kappa = self.analytic[1], self.analytic[2]
            return v * np.sqrt(np.asarray(q, dtype=float) ** 2 + kappa**2)
        out = self._ensure_interp()(q)
        if np.any(np.isnan(out)):
            raise ValueError(
                f"q outside sampled range [{self.q[0]:.3e}, {self.q[-1]:.3e}] "
                f"for branch {self.family}/{self.branch_index}")
        return out

    def v_group(self, q):
        if self.analytic is not None:
            kind = self.analytic[0]
            if kind == "linear":
                return np.full_like(np.asarray(q, dtype=float), self.analytic[1])
            v, kappa = self.analytic[1], self.analytic[2]
            q = np.asarray(q, dtype=float)
            return v * q / np.sqrt(q**2 + kappa**2)
        self._ensure_interp()
        return self._dinterp(q)

    def v_phase(self, q):
        q = np.asarray(q, dtype=float)
        return self.omega(q) / q

    def e_fractions(self, q) -> tuple[float, float]:
        """(e_l, e_t) elastic energy fractions at wavevector q."""
        if self.fixed_e_l is not None:
            return self.fixed_e_l, 1.0 - self.fixed_e_l
        if self.frac_q is None:
            raise ValueError("no energy-fraction data on this branch")
        if self._frac_interp is None:
            if self.frac_q.size == 1:
                self._frac_interp = lambda x: np.full_like(np.asarray(x, float), self.frac_e_l[0])
            else:
                self._frac_interp = PchipInterpolator(self.frac_q, self.frac_e_l,
                                                      extrapolate=True)
        # note e_l > 1 (e_t < 0) is legitimate for dilatation-dominated
        # modes; the pair always sums to 1
        e_l = float(self._frac_interp(q))
        return e_l, 1.0 - e_l

    @property
    def q_max(self) -> float:
        return float(self.q[-1]) if self.q.size else math.inf

    def omega_range(self) -> tuple[float, float]:
        if self.analytic is not None:
            lo = self.Omega_min
            hi = self.omega(self.q_max) if np.isfinite(self.q_max) else math.inf
            return lo, float(hi)
        return self.Omega_min, float(np.max(self.Omega))


@dataclass
class CrossSectionSolution:
    """One solution q_mj of Omega_m(q) = Omega on a branch."""

    branch: DispersionBranch
    q: float
    v_g: float
    v_p: float
    e_l: float
    e_t: float


@dataclass
class ModeSpectrum:
    """Mode catalog for one waveguide geometry."""

    geometry: dict  # {'kind': 'cylinder'|'plate', 'R' or 'L': ..., 'material': Material}
    branches: list[DispersionBranch]
    van_hove: list[tuple] = field(default_factory=list)  # (branch, q*, Omega*)
    Omega_max: float = math.inf

    @property
    def dimension(self) -> int:
        return 1 if self.geometry["kind"] == "cylinder" else 2

    def fundamentals(self) -> list[DispersionBranch]:
        return [b for b in self.branches if b.Omega_co == 0.0]


def branch_eval(branch: DispersionBranch, q: float) -> tuple[float, float, float]:
    """(Omega, v_g, v_p) on one branch at wavevector q."""
    if q <= 0:
        raise ValueError("q must be positive")
    Om = float(branch.omega(q))
    return Om, float(branch.v_group(q)), Om / q


def solutions_at_frequency(spectrum: ModeSpectrum, Omega: float) -> list[CrossSectionSolution]:
    """All (branch, q) with Omega_m(q) = Omega, including back-bending pairs.

    Degenerate branches (multiplicity > 1) contribute one entry per copy.
    """
    if Omega <= 0:
        raise ValueError("Omega must be positive")
    out: list[CrossSectionSolution] = []
    for br in spectrum.branches:
        for q in _branch_solutions(br, Omega):
            vg = float(br.v_group(q))
            vp = float(br.v_phase(q))
            e_l, e_t = br.e_fractions(q)
            out.extend([CrossSectionSolution(br, q, vg, vp, e_l, e_t)] * br.multiplicity)
    return out


def _branch_solutions(br: DispersionBranch, Omega: float) -> list[float]:
    if br.analytic is not None:
        kind = br.analytic[0]
        if kind == "linear":
            v = br.analytic[1]
            return [Omega / v]
        v, kappa = br.analytic[1], br.analytic[2]
        if Omega <= v * kappa:
            return []
        return [math.sqrt((Omega / v) ** 2 - kappa**2)]
    lo, hi = br.omega_range()
    if Omega < lo or Omega > float(np.max(br.Omega)):
        return []
    f = br.Omega - Omega
    roots = []
    sign = np.signbit(f)
    idx = np.nonzero(sign[:-1] != sign[1:])[0]
    interp = br._ensure_interp()
    for i in idx:
        a, b = br.q[i], br.q[i + 1]
        try:
            roots.append(brentq(lambda x: float(interp(x)) - Omega, a, b,
                                xtol=1e-14 * max(b, 1.0), rtol=1e-14))
        except ValueError:
            pass
    for i in np.nonzero(f == 0.0)[0]:
        roots.append(float(br.q[i]))
    roots = sorted(set(roots))
    # merge duplicates within tolerance
    merged = []
    for r in roots:
        if not merged or abs(r - merged[-1]) > 1e-9 * max(abs(r), 1.0):
            merged.append(r)
    return merged


def waveguide_dos(spectrum: ModeSpectrum, Omega: float,
                  vg_floor: Optional[float] = None) -> float:
    """Pointwise mode density per unit length (1D) or area (2D).

    1D: sum over solutions of (1/pi) / |v_g|; 2D: sum of
    Omega / (2 pi v_p |v_g|).  |v_g| is floored at vg_floor for these
    pointwise queries only.
    """
    mat = spectrum.geometry["material"]
    if vg_floor is None:
        vg_floor = VG_FLOOR_FRACTION * mat.v_l
    total = 0.0
    # multiplicity is already expanded in the solution list
    for sol in solutions_at_frequency(spectrum, Omega):
        vg = max(abs(sol.v_g), vg_floor)
        if spectrum.dimension == 1:
            total += 1.0 / (math.pi * vg)
        else:
            total += Omega / (2 * math.pi * sol.v_p * vg)
    return total


def find_van_hove(branches: list[DispersionBranch]) -> list[tuple]:
    """Interior zero crossings of v_g, plus refined (q*, Omega*) values."""
    points = []
    for br in branches:
        if br.analytic is not None or br.q.size < 4:
            continue
        interp = br._ensure_interp()
        d = br._dinterp(br.q)
        sign = np.signbit(d)
        for i in np.nonzero(sign[:-1] != sign[1:])[0]:
            a, b = br.q[i], br.q[i + 1]
            try:
                qs = brentq(lambda x: float(br._dinterp(x)), a, b, rtol=1e-13)
            except ValueError:
                continue
            points.append((br, float(qs), float(interp(qs))))
    return points
