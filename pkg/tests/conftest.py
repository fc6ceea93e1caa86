"""Shared fixtures: the HI bound basis and a light synthetic molecule.

The light molecule has few bound states and a short revival time, so
trajectory and CLI tests stay fast while exercising the same code paths.
"""

import numpy as np
import pytest

from morsedeco import HI_PRESET, MorseParams, build_basis
from morsedeco.basis import position_matrix


@pytest.fixture(scope="session")
def hi_basis():
    return build_basis(HI_PRESET)


@pytest.fixture(scope="session")
def hi_xmatrix(hi_basis):
    return position_matrix(hi_basis)


#: small synthetic diatomic: lambda ~ 5.5, 5 bound states, T_rev ~ 3.8e3 a.u.
LIGHT_PRESET = MorseParams(D=0.05, beta=2.0, r0=2.0, mu=300.0)


@pytest.fixture(scope="session")
def light_basis():
    return build_basis(LIGHT_PRESET, n_nodes=2000)


@pytest.fixture(scope="session")
def light_xmatrix(light_basis):
    return position_matrix(light_basis)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260826)
