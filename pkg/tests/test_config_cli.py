"""Config validation, CLI round trips, provenance, determinism."""

import json
import math

import numpy as np
import pytest

from tlsmeso.cli import main
from tlsmeso.config import ConfigError, config_hash, load_config
from tlsmeso.constants import EV, HBAR
from tlsmeso.dynamics import t1_bulk
from tlsmeso.materials import silica


def _read_csv(path):
    """(comment lines, column dict) from a provenance-stamped CSV."""
    lines = path.read_text().splitlines()
    n_comment = 0
    while lines[n_comment].startswith("#"):
        n_comment += 1
    names = lines[n_comment].split(",")
    data = np.loadtxt(path, skiprows=n_comment + 1, delimiter=",",
                      ndmin=2, dtype=str)
    return lines[:n_comment], {n: data[:, i] for i, n in enumerate(names)}


def _write_toml(tmp_path, text, name="run.toml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


# --- config ----------------------------------------------------------------


def test_defaults_load_without_file():
    cfg = load_config(None)
    assert cfg.material.rho == silica().rho
    assert cfg.geometry["kind"] == "bulk" and cfg.geometry["D"] == 3
    assert cfg.sweep["points"] == 60
    assert len(cfg.sweep_values()) == 60


def test_unknown_section_and_key_report_field_path(tmp_path):
    with pytest.raises(ConfigError, match=r"\[turbo\]"):
        load_config(_write_toml(tmp_path, "[turbo]\nx = 1\n"))
    with pytest.raises(ConfigError, match="sweep.speed"):
        load_config(_write_toml(tmp_path, "[sweep]\nspeed = 3\n"))


def test_sweep_validation(tmp_path):
    bad = ("[sweep]\npoints = 1\n", "[sweep]\nstart = 2e9\nstop = 1e9\n",
           "[sweep]\naxis = 'voltage'\n", "[sweep]\nspacing = 'cubic'\n")
    for text in bad:
        with pytest.raises(ConfigError):
            load_config(_write_toml(tmp_path, text))


def test_material_overrides(tmp_path):
    cfg = load_config(_write_toml(
        tmp_path, "[material]\ngamma_l_eV = 0.5\nzeta = 0.57\n"))
    assert cfg.material.gamma_l == pytest.approx(0.5 * EV, rel=1e-12)
    assert cfg.material.zeta == 0.57


def test_config_hash_tracks_content(tmp_path):
    a = load_config(_write_toml(tmp_path, "[conditions]\nT = 0.01\n"))
    b = load_config(_write_toml(tmp_path, "[conditions]\nT = 0.01\n", "b.toml"))
    c = load_config(_write_toml(tmp_path, "[conditions]\nT = 0.02\n", "c.toml"))
    assert config_hash(a) == config_hash(b) != config_hash(c)


# --- CLI -------------------------------------------------------------------


def test_cli_t1_bulk_roundtrip(tmp_path):
    cfg = _write_toml(tmp_path, (
        "[sweep]\nstart = 1e8\nstop = 1e9\npoints = 5\n"
        "[conditions]\nT = 0.010\n"))
    out = tmp_path / "t1.csv"
    assert main(["t1", "--config", cfg, "--out", str(out)]) == 0
    comments, cols = _read_csv(out)
    assert any("tlsmeso" in c for c in comments)
    assert any("config_hash" in c for c in comments)
    f = cols["f_hz"].astype(float)
    rate = cols["t1_inv_s"].astype(float)
    mat = silica()
    for fi, ri in zip(f, rate):
        assert ri == pytest.approx(
            t1_bulk(HBAR * 2 * math.pi * fi, 0.010, None, mat), rel=1e-9)


def test_cli_material_and_t2_and_q(tmp_path):
    cfg = _write_toml(tmp_path, "[sweep]\npoints = 3\n")
    for name in ("material", "t2", "jc"):
        out = tmp_path / f"{name}.csv"
        assert main([name, "--config", cfg, "--out", str(out)]) == 0
        assert out.exists()
    out = tmp_path / "q.csv"
    cfgq = _write_toml(tmp_path, (
        "[sweep]\npoints = 3\n[conditions]\nrel_mode = 'bulk_hf'\n"),
        "q.toml")
    assert main(["q", "--config", cfgq, "--out", str(out)]) == 0
    _, cols = _read_csv(out)
    tot = cols["q_total_inv"].astype(float)
    assert np.allclose(tot, cols["q_res_inv"].astype(float)
                       + cols["q_rel_inv"].astype(float), rtol=1e-12)


def test_cli_noise_bulk(tmp_path):
    cfg = _write_toml(tmp_path, "[sweep]\nstart = 1e3\nstop = 1e6\npoints = 3\n")
    out = tmp_path / "noise.csv"
    assert main(["noise", "--config", cfg, "--out", str(out)]) == 0
    _, cols = _read_csv(out)
    assert np.all(cols["s_total"].astype(float) > 0)


def test_cli_dos_resonator_dispersion(tmp_path):
    cfg = _write_toml(tmp_path, (
        "[geometry]\nkind = 'resonator'\nL_box = 2e-6\nf_max = 5e9\n"))
    out = tmp_path / "disp.csv"
    assert main(["dispersion", "--config", cfg, "--out", str(out)]) == 0
    _, cols = _read_csv(out)
    assert cols["polarization"][0] == "t"
    assert float(cols["f_hz"][0]) == pytest.approx(silica().v_t / 2e-6,
                                                   rel=1e-9)


def test_cli_exit_codes(tmp_path, capsys):
    bad = _write_toml(tmp_path, "[oops]\nx = 1\n")
    assert main(["t1", "--config", bad,
                 "--out", str(tmp_path / "x.csv")]) == 2
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == "config"
    # dispersion on a bulk geometry is a command error -> exit 1
    assert main(["dispersion", "--out", str(tmp_path / "y.csv")]) == 1
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == "config"


def test_cli_thread_determinism(tmp_path):
    cfg = _write_toml(tmp_path, "[sweep]\nstart = 1e8\nstop = 1e9\npoints = 16\n")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["t1", "--config", cfg, "--out", str(a), "--threads", "1"]) == 0
    assert main(["t1", "--config", cfg, "--out", str(b), "--threads", "4"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_cli_verify_passes(capsys):
    assert main(["verify"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" not in out
