import math
import os
import subprocess
from pathlib import Path

import numpy as np
import pytest

import opbde

SMALL = """
[experiment]
kind = coarsening
seed = 7
[grid]
Nx = 20
Ny = 20
[time]
t_final = 0.0002
diagnostics_every = 5
snapshot_every = 0
"""


def small(**overrides):
    cfg = opbde.parse_config_text(SMALL)
    return cfg.replace(overrides) if overrides else cfg


def test_preset_defaults():
    cfg = opbde.preset("coarsening")
    assert cfg.dt == pytest.approx(1e-5)
    assert cfg.shape == (160, 160)


def test_gamma_inf_and_bad_key():
    cfg = opbde.parse_config_text("[experiment]\nkind = droplet_flat\n[physics]\ngamma = inf\n")
    assert cfg.gamma_inv == 0.0
    with pytest.raises(opbde.ConfigError, match="physics.K"):
        opbde.parse_config_text("[physics]\nK = -1\n")
    with pytest.raises(opbde.ConfigError, match=":2: unknown key"):
        opbde.parse_config_text("[grid]\nbogus = 1\n")


def test_replace_round_trip():
    cfg = small(**{"physics.eps": 0.02})
    assert cfg.eps == pytest.approx(0.02)
    again = opbde.parse_config_text(cfg.to_text())
    assert again.digest() == cfg.digest()


def test_seeded_uniform_is_deterministic():
    a = [opbde.seeded_uniform(3, i, j) for i in range(5) for j in range(5)]
    b = [opbde.seeded_uniform(3, i, j) for i in range(5) for j in range(5)]
    assert a == b
    assert all(-1.0 <= v < 1.0 for v in a)
    assert len(set(a)) == len(a)


def test_initial_field_is_zero_outside():
    cfg = small()
    phi0 = opbde.initial_field(cfg)
    psi = opbde.psi(cfg)
    assert phi0.shape == psi.shape == (20, 20)
    assert np.all(phi0[psi < 0.5 * 1e-6] == 0.0)
    assert np.abs(phi0).max() <= 1e-3


def test_short_run_structure():
    seen = []
    out = opbde.run(small(), on_step=seen.append)
    assert out["steps"] == 20
    assert len(seen) == 21
    energies = [r["energy"] for r in seen]
    assert all(b <= a for a, b in zip(energies, energies[1:]))
    assert out["max_abs_volume_drift"] < 1e-10
    assert out["max_relative_energy_law_residual"] < 1e-7
    assert [r["step"] for r in out["records"]] == [0, 5, 10, 15, 20]
    assert out["phi"].shape == (20, 20)


def test_compare_with_itself_is_zero():
    cfg = small()
    rep = opbde.compare(cfg, cfg, [0.0001, 0.0002])
    assert rep["l2_errors"] == [0.0, 0.0]


def test_contact_angle_of_semicircle():
    n = 128
    x = -0.5 + (np.arange(n) + 0.5) / n
    y = -0.1 + (np.arange(77) + 0.5) * 0.6 / 77
    X, Y = np.meshgrid(x, y)
    phi = np.tanh((0.2 - np.hypot(X, Y)) / 0.01)
    a = opbde.contact_angle(phi, (-0.5, 0.5), (-0.1, 0.5), 0.004, 0.1)
    assert a["degrees"] == pytest.approx(90.0, abs=2.0)
    assert a["radius"] == pytest.approx(0.2, abs=0.01)


def cli(*args, env=None):
    exe = os.environ.get("OPBDE_CLI")
    if not exe:
        pytest.skip("OPBDE_CLI not set")
    return subprocess.run([exe, *args], capture_output=True, text=True, env=env)


def test_cli_run_and_exit_codes(tmp_path):
    conf = tmp_path / "small.ini"
    conf.write_text(SMALL)
    env = dict(os.environ, OPBDE_OUTPUT_ROOT=str(tmp_path))
    done = cli("run", str(conf), env=env)
    assert done.returncode == 0, done.stderr
    out = tmp_path / "out" / "coarsening"
    assert (out / "diagnostics.csv").exists()
    assert (out / "resolved_config.ini").exists()
    header = (out / "diagnostics.csv").read_text().splitlines()[0]
    assert header.startswith("step,t,energy,volume,volume_drift")
    snaps = sorted(out.glob("snapshot_*.txt"))
    phi, t = opbde.read_snapshot(str(snaps[-1]))
    assert t == pytest.approx(0.0002)
    assert phi.shape == (20, 20)

    bad = tmp_path / "bad.ini"
    bad.write_text("[physics]\nK = -1\n")
    assert cli("run", str(bad), env=env).returncode == 1
    assert cli("run", str(tmp_path / "missing.ini"), env=env).returncode == 1
    assert cli("sweep", str(conf), "--key", "eps", env=env).returncode != 0
