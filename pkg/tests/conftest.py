import numpy as np
import pytest

from crabdetect import _kernels

# lines appended by test_acceptance.py, echoed after the run
ACCEPTANCE_LINES = []


@pytest.fixture(params=sorted(_kernels.BACKENDS))
def backend(request, monkeypatch):
    """Run a test once per available kernel backend."""
    impl = _kernels.BACKENDS[request.param]
    monkeypatch.setattr(_kernels, "label_components", impl.label_components)
    monkeypatch.setattr(_kernels, "trace_boundary", impl.trace_boundary)
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def disk_mask(radius, pad=2):
    r = int(np.ceil(radius)) + pad
    y, x = np.mgrid[-r:r + 1, -r:r + 1]
    return (x**2 + y**2 <= radius**2).astype(np.uint8)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
