import pathlib

import numpy as np
import pytest

import kvh

SCENARIOS = pathlib.Path(__file__).resolve().parents[2] / "scenarios"

SMALL = """
[scenario]
name = py_small
command = evolve

[axis q]
role = q
min = -6
extent = 12
points = 32

[axis p]
role = p
min = -6
extent = 12
points = 32

[dynamics]
formalism = kvn
masses = 1
potential = harmonic
kappa = 1
dt = 0.05
t_final = 0.5

[initial]
center = 0.5, 0
width = 1.2, 1.2

[checks]
norm_drift = <= 1e-10
im_max = <= 1e-10
"""


def test_version():
    assert kvh.__version__ == kvh.version() == "0.1.0"


def test_check_algebra_kvn_all_ok():
    rows = kvh.check_algebra("kvn")
    assert len(rows) == 63
    assert all(r["ok"] for r in rows)


def test_hybrid_momentum_relation_fails():
    failing = [r for r in kvh.check_algebra("hybrid") if not r["ok"]]
    assert [r["label"] for r in failing] == [f"[p_{i}+k_{i}, L_h]" for i in (1, 2, 3)]
    assert "kappa*lp1_1" in failing[0]["residual"]


def test_bad_selection():
    with pytest.raises(Exception):
        kvh.check_algebra("quantum")


def test_execute_and_read_dump(tmp_path):
    sc = kvh.parse_scenario(SMALL, "small.cfg")
    assert sc.command == "evolve"
    assert [a["role"] for a in sc.axes] == ["q", "p"]
    result = kvh.execute(sc, str(tmp_path))
    assert result["exit_code"] == 0
    assert all(c["pass"] for c in result["checks"])
    assert "PASS 2/2 checks" in result["report"]
    psi, axes = kvh.read_dump(str(tmp_path / "final.kvhw"))
    assert psi.shape == (32, 32)
    assert psi.dtype == np.complex128
    assert np.max(np.abs(psi.imag)) < 1e-10
    cell = 12 / 32 * 12 / 32
    assert abs(np.sum(np.abs(psi) ** 2) * cell - 1) < 1e-10
    assert axes[0]["name"] == "q"


def test_config_error_carries_position():
    with pytest.raises(kvh.ConfigError, match=r"small.cfg:\d+:1: unknown key 'dtt'"):
        kvh.parse_scenario(SMALL.replace("dt = 0.05", "dtt = 0.05"), "small.cfg")


def test_bundled_free_kvh(tmp_path):
    result = kvh.run(SCENARIOS / "free_kvh.cfg", tmp_path)
    assert result["exit_code"] == 0
    assert result["metrics"]["closed_form_linf"] < 1e-6
    assert (tmp_path / "manifest.cfg").exists()
