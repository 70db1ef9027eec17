import numpy as np
import pytest

from pathrkhs import decompose, gauss_legendre, make_brownian_bridge, make_matern, make_wiener


@pytest.fixture(scope="session")
def wiener_1024():
    return decompose(make_wiener(), gauss_legendre(1024))


@pytest.fixture(scope="session")
def bridge_1024():
    return decompose(make_brownian_bridge(), gauss_legendre(1024))


@pytest.fixture(scope="session")
def matern32_1024():
    return decompose(make_matern(1.5), gauss_legendre(1024))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE = {}


@pytest.fixture
def criterion():
    """Record ``(number, passed, detail)`` for the acceptance summary; parts of one criterion AND together."""
    def record(number, passed, detail):
        prev = ACCEPTANCE.get(number)
        if prev is None:
            ACCEPTANCE[number] = (bool(passed), [detail])
        else:
            ACCEPTANCE[number] = (prev[0] and bool(passed), prev[1] + [detail])
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, details = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  "
                                    + "; ".join(details))
