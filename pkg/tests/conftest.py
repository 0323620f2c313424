import math

import numpy as np
import pytest
from hypothesis import strategies as st

from oamwalk.walk import CoinVector

S2 = 1 / math.sqrt(2)


def _coin_from(re_up, im_up, re_dn, im_dn):
    v = np.array([re_up + 1j * im_up, re_dn + 1j * im_dn])
    return CoinVector.from_array(v / np.linalg.norm(v))


finite = st.floats(-1, 1, allow_nan=False, allow_infinity=False)
unit_coins = st.tuples(finite, finite, finite, finite).filter(
    lambda t: sum(x * x for x in t) > 1e-3
).map(lambda t: _coin_from(*t))


@pytest.fixture
def rng():
    return np.random.default_rng(20131)


def random_coin(rng):
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return CoinVector.from_array(v / np.linalg.norm(v))


_acceptance = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and (report.when == "call" or report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        prev = _acceptance.get(name, "PASS")
        _acceptance[name] = "FAIL" if report.outcome == "failed" or prev == "FAIL" else "PASS"


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, status in _acceptance.items():
        terminalreporter.write_line(f"{status}  {name}")
