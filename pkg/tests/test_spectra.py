"""Guided branch catalogs, DOS, and the discrete resonator spectrum."""

import math

import numpy as np
import pytest

from tlsmeso.constants import HBAR
from tlsmeso.materials import derived_constants, silica
from tlsmeso.spectra import (branch_eval, bulk_dos, resonator_spectrum,
                             solutions_at_frequency, solve_cylinder_branches,
                             torsional_cutoff_roots, waveguide_dos)


def _fundamental(spectrum, family):
    out = [b for b in spectrum.branches
           if b.family == family and b.Omega_co == 0.0]
    assert out, f"missing fundamental {family} branch"
    return out[0]


def test_torsional_fundamental_exact(cyl_silica, mat):
    b = _fundamental(cyl_silica, "torsional")
    for q in np.geomspace(1e3, 3e6, 9):
        Om, vg, vp = branch_eval(b, q)
        assert Om == pytest.approx(mat.v_t * q, rel=1e-14)
        assert vg == pytest.approx(mat.v_t, rel=1e-14)


def test_torsional_cutoff_sequence(mat):
    """Overtone cutoffs solve the torsional boundary condition."""
    from scipy.special import jv
    roots = torsional_cutoff_roots(5)
    for x in roots:
        # boundary condition: x J1'(x) - ... reduces to x J2 ... check
        # the defining equation x J0(x) = 2 J1(x)
        assert abs(x * jv(0, x) - 2 * jv(1, x)) < 1e-10
    assert np.all(np.diff(roots) > 0)


def test_flexural_cylinder_small_q_asymptote(cyl_silica, mat):
    b = _fundamental(cyl_silica, "flexural")
    der = derived_constants(mat)
    R = cyl_silica.geometry["R"]
    for qR in (0.002, 0.005, 0.01, 0.02):
        q = qR / R
        Om, _, _ = branch_eval(b, q)
        assert Om == pytest.approx(0.5 * der.v_B * R * q**2, rel=0.01)


def test_flexural_blend_continuous(cyl_silica, mat):
    """The asymptote-to-solver blend leaves no jump near qR ~ 0.02-0.06."""
    b = _fundamental(cyl_silica, "flexural")
    R = cyl_silica.geometry["R"]
    q = np.geomspace(0.01 / R, 0.2 / R, 200)
    Om = np.array([branch_eval(b, qi)[0] for qi in q])
    ratio = np.diff(np.log(Om)) / np.diff(np.log(q))
    # local log-slope stays in (1, 2.1) and decreases smoothly
    assert np.all(ratio > 0.9) and np.all(ratio < 2.1)


def test_flexural_plate_small_k_asymptote(plate_small, mat):
    b = _fundamental(plate_small, "flexural")
    der = derived_constants(mat)
    L = plate_small.geometry["L"]
    for kL in (0.002, 0.01, 0.02):
        k = kL / L
        Om, _, _ = branch_eval(b, k)
        assert Om == pytest.approx(der.v_pl * L * k**2 / (2 * math.sqrt(3)),
                                   rel=0.01)


def test_compressional_small_q_phase_velocity(cyl_silica, plate_small, mat):
    der = derived_constants(mat)
    for spec, v in ((cyl_silica, der.v_B), (plate_small, der.v_pl)):
        b = _fundamental(spec, "compressional")
        scale = spec.geometry.get("R") or spec.geometry.get("L")
        q = 0.005 / scale
        Om, _, vp = branch_eval(b, q)
        assert vp == pytest.approx(v, rel=0.01)


def test_exactly_four_solutions_below_first_cutoff(cyl_silica):
    """Torsional + compressional + doubly degenerate flexural."""
    sols = solutions_at_frequency(cyl_silica, 2 * math.pi * 5e8)
    assert len(sols) == 4
    fams = sorted(s.branch.family for s in sols)
    assert fams == ["compressional", "flexural", "flexural", "torsional"]


def test_mode_count_sum_rule_1d(cyl_silica):
    """integral of g over a band equals the q-count difference over pi."""
    Om_lo, Om_hi = 2 * math.pi * 2e8, 2 * math.pi * 1e9
    grid = np.linspace(Om_lo, Om_hi, 4001)
    g = np.array([waveguide_dos(cyl_silica, Om) for Om in grid])
    integral = np.trapezoid(g, grid)

    def count(Om):
        return sum(s.q for s in solutions_at_frequency(cyl_silica, Om))

    assert integral == pytest.approx((count(Om_hi) - count(Om_lo)) / math.pi,
                                     rel=2e-3)


def test_energy_fractions_sum_to_one(cyl_silica):
    for Om in (2 * math.pi * 3e8, 2 * math.pi * 1.5e9):
        for s in solutions_at_frequency(cyl_silica, Om):
            assert s.e_l + s.e_t == pytest.approx(1.0, abs=1e-9)
            assert 0.0 <= s.e_l <= 1.0


def test_cylinder_dos_converges_to_3d_bulk(cyl_large, mat):
    """Per-volume guided DOS matches the 3D bulk count at high frequency."""
    assert len(cyl_large.branches) >= 30
    R = cyl_large.geometry["R"]
    A = math.pi * R**2
    Om1, Om2 = 2 * math.pi * 3.8e10, 2 * math.pi * 4.8e10

    def count_per_volume(Om):
        return sum(s.q for s in solutions_at_frequency(cyl_large, Om)) / (
            math.pi * A)

    got = count_per_volume(Om2) - count_per_volume(Om1)
    # integral of the isotropic 3D DOS over the same band
    want = (Om2**3 - Om1**3) / (6 * math.pi**2) * (1 / mat.v_l**3
                                                   + 2 / mat.v_t**3)
    assert got / want == pytest.approx(1.0, abs=0.10)


def test_van_hove_points_have_flat_dispersion(cyl_large):
    assert cyl_large.van_hove
    for branch, q_star, Om_star in cyl_large.van_hove[:5]:
        _, vg, _ = branch_eval(branch, q_star)
        v_ref = branch.Omega[-1] / branch.q[-1]
        assert abs(vg) < 0.05 * v_ref


def test_bulk_dos_closed_forms(mat):
    Om = 2 * math.pi * 1e9
    # 3D: Omega^2/(2 pi^2) (1/v_l^3 + 2/v_t^3)
    want = Om**2 / (2 * math.pi**2) * (1 / mat.v_l**3 + 2 / mat.v_t**3)
    assert bulk_dos(3, mat, 50e-9, "total", Om) == pytest.approx(want,
                                                                 rel=1e-12)
    lng = bulk_dos(3, mat, 50e-9, "l", Om)
    assert lng == pytest.approx(Om**2 / (2 * math.pi**2) / mat.v_l**3,
                                rel=1e-12)


def test_resonator_fundamental_and_structure(cube_2um, mat):
    assert cube_2um.Omega[0] / (2 * math.pi) == pytest.approx(
        mat.v_t / 2e-6, rel=1e-12)
    assert cube_2um.pol[0] == 1 and cube_2um.multiplicity[0] == 2
    # Q policy: every linewidth is Omega/Q
    assert np.allclose(cube_2um.Gamma, cube_2um.Omega / 1882.0, rtol=1e-12)
    # longitudinal fundamental at v_l/L
    i_l = np.nonzero(cube_2um.pol == 0)[0][0]
    assert cube_2um.Omega[i_l] / (2 * math.pi) == pytest.approx(
        mat.v_l / 2e-6, rel=1e-12)


def test_resonator_mode_count_matches_kspace(cube_2um, mat):
    """Multiplicity-weighted count equals the direct lattice count."""
    Om_max = 2 * math.pi * 1e10
    dk = 2 * math.pi / 2e-6
    n = int(np.ceil(Om_max / (dk * mat.v_t))) + 1
    r = np.arange(-n, n + 1)
    KX, KY, KZ = np.meshgrid(r, r, r, indexing="ij")
    k = dk * np.sqrt(KX**2 + KY**2 + KZ**2).ravel()
    k = k[k > 0]
    want = np.sum(k * mat.v_l <= Om_max) + 2 * np.sum(k * mat.v_t <= Om_max)
    mask = cube_2um.Omega <= Om_max
    got = int(np.sum(cube_2um.multiplicity[mask]))
    assert got == want


def test_solver_rejects_bad_inputs(mat):
    with pytest.raises(ValueError):
        solve_cylinder_branches(-1.0, mat, 1e9)
    with pytest.raises(ValueError):
        resonator_spectrum(2e-6, mat, 1882.0, 1.0)  # below fundamental
