import contextlib
import time

import pytest

from omnibell.qcore import build_ghz, ghz_noise_mixture
from omnibell.tensorlab import correlation_tensor

_ACCEPTANCE = []


@pytest.fixture(scope="session")
def mixture_tensor():
    cache = {}

    def get(f):
        if f not in cache:
            cache[f] = correlation_tensor(ghz_noise_mixture(f))
        return cache[f]

    return get


@pytest.fixture(scope="session")
def ghz2_tensor():
    return correlation_tensor(build_ghz(2))


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion for the terminal summary."""

    @contextlib.contextmanager
    def record(number, title, limit_s=None):
        start = time.perf_counter()
        notes = []
        try:
            yield notes
        except BaseException as exc:
            _ACCEPTANCE.append((number, "FAIL", title, time.perf_counter() - start,
                                notes + [str(exc).splitlines()[0] if str(exc) else
                                         type(exc).__name__]))
            raise
        elapsed = time.perf_counter() - start
        if limit_s is not None and elapsed >= limit_s:
            _ACCEPTANCE.append((number, "FAIL", title, elapsed,
                                notes + [f"runtime {elapsed:.1f} s >= {limit_s} s"]))
            pytest.fail(f"criterion {number} exceeded its runtime budget")
        _ACCEPTANCE.append((number, "PASS", title, elapsed, notes))

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, verdict, title, elapsed, notes in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"[{verdict}] {number}. {title} ({elapsed:.2f} s)")
        for note in notes:
            terminalreporter.write_line(f"        {note}")
