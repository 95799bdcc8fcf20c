import numpy as np
import pytest

from neumann_ahlfors.geometry import CurveSpec, discretize

SQRT10 = np.sqrt(10.0)


def annulus(n=128, r=0.1):
    return discretize([CurveSpec.circle(0, r), CurveSpec.circle(0, 1.0)], n)


def disk(n=64):
    return discretize([CurveSpec.circle(0, 1.0)], n)


def mobius(z, a):
    return (z - a) / (1 - np.conj(a) * z)


def annulus_interior_points(count=20, seed=0):
    rng = np.random.default_rng(seed)
    r = rng.uniform(0.2, 0.9, count)
    t = rng.uniform(0, 2 * np.pi, count)
    return r * np.exp(1j * t)


def disk_points(count=100, radius=0.9, seed=0):
    rng = np.random.default_rng(seed)
    r = radius * np.sqrt(rng.uniform(0, 1, count))
    t = rng.uniform(0, 2 * np.pi, count)
    return r * np.exp(1j * t)


@pytest.fixture(scope="session")
def annulus128():
    return annulus(128)


@pytest.fixture(scope="session")
def two_holes():
    specs = [CurveSpec.circle(-0.5 + 0.1j, 0.2),
             CurveSpec.ellipse(0.6 - 0.1j, (0.25, 0.15), 0.4),
             CurveSpec.ellipse(0, (1.5, 1.0))]
    return discretize(specs, 64)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
