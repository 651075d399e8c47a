import numpy as np
import pytest

from projconst import FunctionalFamily
from projconst.verify import build_corollary_space


@pytest.fixture(scope="session")
def cor4():
    return build_corollary_space(4)


@pytest.fixture(scope="session")
def cor5():
    return build_corollary_space(5)


def random_family(rng, n, m, p):
    """A spanning family with ``m`` random rows on ``R^n``."""
    while True:
        F = rng.standard_normal((m, n))
        if np.linalg.matrix_rank(F) == n:
            return FunctionalFamily(F, p)


# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
