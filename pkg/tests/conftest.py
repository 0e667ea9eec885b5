import numpy as np
import pytest
from hypothesis import settings

from hyperlasso.basis import chebyshev_product_basis
from hyperlasso.quadrature import cube_rule, verify_exactness

settings.register_profile("repo", deadline=None, max_examples=60, derandomize=True)
settings.load_profile("repo")


@pytest.fixture(scope="session")
def cube50_gram():
    """Gram check for the L=50 cube lattice (about 20 s, shared across modules)."""
    return verify_exactness(cube_rule(50), chebyshev_product_basis(50))


@pytest.fixture
def rng():
    return np.random.default_rng(20240531)


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_line():
    """Record (and echo) the one-line verdict of an acceptance criterion."""
    def emit(number, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return emit


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
