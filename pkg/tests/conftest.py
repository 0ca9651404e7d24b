import math

import numpy as np
import pytest
from hypothesis import settings, strategies as st

from pathspin.elements import BeamSplitterParams
from pathspin.experiments import prepare_pan_home
from pathspin.qcore import PathSpinState, SpinState

settings.register_profile("default", max_examples=100, deadline=None)
settings.load_profile("default")

SQRT_HALF = 1 / math.sqrt(2)

finite = st.floats(-1.0, 1.0, allow_nan=False, allow_infinity=False)
angles = st.floats(-2 * math.pi, 2 * math.pi, allow_nan=False)
gammas = st.floats(0.0, 1.0)


@st.composite
def complex_vectors(draw, size):
    re = draw(st.lists(finite, min_size=size, max_size=size))
    im = draw(st.lists(finite, min_size=size, max_size=size))
    v = np.array(re) + 1j * np.array(im)
    if np.linalg.norm(v) < 1e-3:
        v = np.eye(size, dtype=complex)[0]
    return v / np.linalg.norm(v)


@st.composite
def path_spin_states(draw):
    return PathSpinState(draw(complex_vectors(4)))


@st.composite
def spin_states(draw):
    return SpinState(draw(complex_vectors(2)))


@st.composite
def complex_matrices(draw):
    re = draw(st.lists(finite, min_size=4, max_size=4))
    im = draw(st.lists(finite, min_size=4, max_size=4))
    return (np.array(re) + 1j * np.array(im)).reshape(2, 2)


@st.composite
def bs_params(draw):
    alpha = draw(st.floats(-math.pi, math.pi))
    return BeamSplitterParams(math.cos(alpha), math.sin(alpha))


@pytest.fixture
def pan_home():
    return prepare_pan_home()


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)


ACCEPTANCE_LOG: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line: call with (label, detail) after the checks; failure is logged too."""
    entry = {"label": request.node.name, "detail": ""}

    def record(label: str, detail: str = ""):
        entry.update(label=label, detail=detail)

    yield record
    rep = getattr(request.node, "rep_call", None)
    ok = rep is not None and rep.passed
    ACCEPTANCE_LOG.append((entry["label"], ok, entry["detail"]))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LOG:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in ACCEPTANCE_LOG:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {label}  {detail}")
