import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gbsaxes import corpus
from gbsaxes.axis import Axis, AxisConfig
from gbsaxes.lamination import leaf_library


@pytest.fixture(scope="session")
def bs24():
    return corpus.bs24()


@pytest.fixture(scope="session")
def rose3():
    return corpus.rose3(2)


@pytest.fixture(scope="session")
def ttex():
    return corpus.traintrack(2)


@pytest.fixture(scope="session")
def axis(ttex):
    return Axis(ttex.tt_plus, ttex.tt_minus, ttex.phi, ttex.phi_inv)


@pytest.fixture(scope="session")
def axis_cfg(axis):
    cfg = AxisConfig(seed=7, n_samples=25)
    cfg.epsilon0 = axis.estimate_epsilon0(cfg)[0]
    return cfg


@pytest.fixture(scope="session")
def lib_plus(ttex):
    return leaf_library(ttex.tt_plus, 6)


@pytest.fixture(scope="session")
def lib_minus(ttex):
    return leaf_library(ttex.tt_minus, 6)
