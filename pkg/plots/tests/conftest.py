"""Shared inputs for the rendering tests.

Wigner grids come from the simulator CLI run on a light test molecule, so
the tests exercise the real file interface. Sweep CSVs and fit manifests are
small enough to synthesize directly in the producer's documented schema.
"""

import json
import shutil
import subprocess

import numpy as np
import pytest

LIGHT_INI = """\
[molecule]
D = 0.05
beta = 2.0
r0 = 2.0
mu = 300.0

[state]
eta = 0.1

[bath]
delta = {delta} au
temperature = 2 hw01

[time]
snapshots = {snapshots}

[grid]
x_min = -0.6
x_max = 1.2
n_x = 64
p_min = -15
p_max = 15
n_p = 64
"""


@pytest.fixture(scope="session")
def cli_outputs(tmp_path_factory):
    """Simulator CLI artifacts (density + Wigner CSVs); skip if unavailable."""
    exe = shutil.which("morsedeco")
    if exe is None:
        pytest.skip("simulator CLI not installed")
    root = tmp_path_factory.mktemp("cli_inputs")
    out = root / "out"
    runs = {
        "initial.ini": {"delta": 0, "snapshots": "0.01"},
        "open.ini": {"delta": 50, "snapshots": "0.125 0.25"},
    }
    for name, fields in runs.items():
        ini = root / name
        ini.write_text(LIGHT_INI.format(**fields))
        proc = subprocess.run([exe, "evolve", "--config", str(ini),
                               "--out", str(out)],
                              capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
    return out


@pytest.fixture(scope="session")
def delta_sweep_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("sweeps") / "sweep_delta.csv"
    delta = np.linspace(0.0, 2.2e3, 12)
    with open(path, "w") as fh:
        fh.write("delta,left,right,central\n")
        for d in delta:
            fh.write(f"{d:.9g},{0.08 * np.exp(-0.43 * d / 1e3):.9e},"
                     f"{0.12 * np.exp(-0.52 * d / 1e3):.9e},"
                     f"{-0.20 * np.exp(-0.70 * d / 1e3):.9e}\n")
    return path


@pytest.fixture(scope="session")
def exp_manifest(tmp_path_factory):
    path = tmp_path_factory.mktemp("fits") / "fit_exp.json"
    path.write_text(json.dumps({"model": "exponential",
                                "params": {"A": 0.20, "c": 0.70},
                                "rms_residual": 1e-5, "accepted": True}))
    return path


@pytest.fixture(scope="session")
def temperature_sweep_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("sweeps") / "sweep_temperature.csv"
    T = np.geomspace(0.07, 13.4, 13)
    y = -0.19 * np.exp(-0.034 / np.expm1(0.91 / T))
    with open(path, "w") as fh:
        fh.write("T,central\n")
        for t, v in zip(T, y):
            fh.write(f"{t:.9g},{v:.9e}\n")
    return path


@pytest.fixture(scope="session")
def bose_manifest(tmp_path_factory):
    path = tmp_path_factory.mktemp("fits") / "fit_bose.json"
    path.write_text(json.dumps({"model": "bose",
                                "params": {"a": 0.19, "b": 0.034, "T_c": 0.91},
                                "rms_residual": 1e-5, "accepted": True}))
    return path
