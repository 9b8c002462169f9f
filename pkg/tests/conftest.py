import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# per-criterion PASS/FAIL lines for the acceptance suite
_CRITERIA: dict = {}
_START = [None]


def pytest_configure(config):
    import time

    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")
    _START[0] = time.perf_counter()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _CRITERIA.setdefault(marker.args[0], []).append(rep.passed)


def pytest_terminal_summary(terminalreporter):
    import time

    if not _CRITERIA:
        return
    elapsed = time.perf_counter() - _START[0]
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        ok = all(_CRITERIA[n])
        extra = ""
        if n == 10:
            ok = ok and elapsed < 900
            extra = f" (session {elapsed:.0f} s, limit 900 s)"
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}{extra}")
