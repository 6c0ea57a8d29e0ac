import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from wigzero.phase_space import HermiteState

settings.register_profile("wigzero", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("wigzero")

FIXTURES = Path(__file__).parent / "fixtures"


def random_state(seed: int, N: int, hbar: float = 1.0, **kw) -> HermiteState:
    rng = np.random.default_rng(seed)
    c = rng.normal(size=N + 1) + 1j * rng.normal(size=N + 1)
    c[-1] = c[-1] if abs(c[-1]) > 0.1 else 1.0
    return HermiteState(c, hbar=hbar, renormalize=True, **kw)


def load_fixture(name: str) -> HermiteState:
    return HermiteState.from_dict(json.loads((FIXTURES / name).read_text()))


@pytest.fixture
def f1():
    return load_fixture("f1.json")


@pytest.fixture
def f2_corrected():
    return load_fixture("f2_corrected.json")


@pytest.fixture
def f2_thirds():
    return load_fixture("f2_thirds.json")


def ring(radius: float, count: int = 128) -> np.ndarray:
    th = 2.0 * math.pi * np.arange(count) / count
    return radius * np.stack([np.cos(th), np.sin(th)], axis=-1)


# acceptance criteria report: one line per criterion at the end of the run
_CRITERIA: dict[int, tuple[str, list[str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when != "call" and report.passed:
        return
    number, title = mark.args
    _, results = _CRITERIA.setdefault(number, (title, []))
    if report.when == "call" or report.failed:
        results.append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, results = _CRITERIA[number]
        verdict = "PASS" if results and all(r == "passed" for r in results) else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {verdict}  {title}")
