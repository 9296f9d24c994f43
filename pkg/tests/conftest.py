import contextlib
import os
import time

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", deadline=None, max_examples=400)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_criteria: dict[int, str] = {}


@pytest.fixture
def criterion():
    """Context manager timing one acceptance criterion and recording its verdict.

    A criterion that passes but overruns its time limit is reported as a failure.
    """

    @contextlib.contextmanager
    def run(number: int, limit: float | None = None):
        t0 = time.perf_counter()
        ok = False
        try:
            yield
            ok = True
        finally:
            dt = time.perf_counter() - t0
            late = ok and limit is not None and dt >= limit
            verdict = "PASS" if ok and not late else "FAIL"
            note = f", limit {limit:g}s" if limit is not None else ""
            _criteria[number] = f"criterion {number:>2}: {verdict}  ({dt:.2f}s{note})"
            print(_criteria[number])
        if late:
            pytest.fail(f"criterion {number} took {dt:.2f}s, over its {limit:g}s limit")

    return run


def pytest_terminal_summary(terminalreporter):
    if _criteria:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_criteria):
            terminalreporter.write_line(_criteria[n])
