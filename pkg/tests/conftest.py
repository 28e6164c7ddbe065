import sys

import numpy as np
import pytest

from qubotomo import gaussian_blur, quantize


def smooth_phantom(rng, size, levels=(1.0,), blur=1.2):
    """Random blob phantom: noise -> blur -> quantize onto the levels."""
    return quantize(gaussian_blur(rng.random((size, size)), blur), levels)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    """Repeat the acceptance one-liners after the run, despite capture."""
    for name in ("test_acceptance", "tests.test_acceptance"):
        module = sys.modules.get(name)
        lines = getattr(module, "RESULTS", None) if module else None
        if lines:
            terminalreporter.section("acceptance criteria")
            for line in lines:
                terminalreporter.write_line(line)
            return
