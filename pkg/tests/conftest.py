import math
import sys

import pytest

from sgnoise import dephasing
from sgnoise.physics import derive_quantities, table1_params
from sgnoise.spectra import Flicker


@pytest.fixture(scope="session")
def params():
    return table1_params()


@pytest.fixture(scope="session")
def dq(params):
    return derive_quantities(params)


@pytest.fixture(scope="session")
def gamma155(dq):
    """Rate giving coherence 0.1 after one loop."""
    return math.log(10) / dq.T_exp


@pytest.fixture(scope="session")
def bounds(params, dq, gamma155):
    A = dephasing.bound_white(gamma155, dq)
    K = dephasing.bound_flicker(gamma155, dq, Flicker.from_params(1.0, params))
    return A, K


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        terminalreporter.write_line(results[k])
