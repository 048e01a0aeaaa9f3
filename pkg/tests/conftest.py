import re
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from cscmat.build import from_dense

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures():
    return FIXTURES


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@st.composite
def sparse_dense_pairs(draw, max_rows=8, max_cols=8, complex_values=False, min_dim=0):
    """A random dense array with many zeros, and its sparse conversion."""
    m = draw(st.integers(min_dim, max_rows))
    n = draw(st.integers(min_dim, max_cols))
    seed = draw(st.integers(0, 2**32 - 1))
    density = draw(st.sampled_from([0.0, 0.1, 0.3, 0.6, 1.0]))
    r = np.random.default_rng(seed)
    vals = r.standard_normal((m, n))
    if complex_values:
        vals = vals + 1j * r.standard_normal((m, n))
    dense = np.where(r.random((m, n)) < density, vals, 0)
    return from_dense(dense), dense


# -- acceptance summary -------------------------------------------------------

_ACCEPTANCE: dict[int, list[str]] = {}
_NAMES: dict[int, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    m = re.search(r"test_criterion_(\d+)_(\w+)", report.nodeid)
    if not m:
        return
    k = int(m.group(1))
    _NAMES[k] = m.group(2).replace("_", " ")
    if report.when == "call" or report.outcome != "passed":
        _ACCEPTANCE.setdefault(k, []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        ok = all(o == "passed" for o in _ACCEPTANCE[k])
        terminalreporter.write_line(f"criterion {k:2d} {_NAMES[k]}: {'PASS' if ok else 'FAIL'}")
