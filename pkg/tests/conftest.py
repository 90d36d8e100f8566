import time

import pytest

from rotspec import (
    OperatorKind,
    RotationParams,
    ShootingProblem,
    assemble_spectrum,
    solve_periodic,
)

# Wall-clock seconds each expensive fixture took to build, keyed by fixture
# name; the acceptance tests check these against their runtime budgets.
FIXTURE_SECONDS: dict[str, float] = {}


def _timed(name, builder):
    start = time.perf_counter()
    value = builder()
    FIXTURE_SECONDS[name] = time.perf_counter() - start
    return value


@pytest.fixture(scope="session")
def params_ex1() -> RotationParams:
    return RotationParams(k=3, l=1, n=5)


@pytest.fixture(scope="session")
def params_ex2() -> RotationParams:
    return RotationParams(k=2, l=2, n=5)


@pytest.fixture(scope="session")
def profile_ex1(params_ex1):
    return _timed("profile_ex1", lambda: solve_periodic(
        ShootingProblem(params=params_ex1, bracket=(0.10, 0.20))))


@pytest.fixture(scope="session")
def profile_ex2(params_ex2):
    return _timed("profile_ex2", lambda: solve_periodic(
        ShootingProblem(params=params_ex2)))


@pytest.fixture(scope="session")
def laplace_ex1(profile_ex1):
    return _timed("laplace_ex1", lambda: assemble_spectrum(
        profile_ex1, OperatorKind.LAPLACE, (0.0, 12.0)))


@pytest.fixture(scope="session")
def jacobi_ex1(profile_ex1):
    return _timed("jacobi_ex1", lambda: assemble_spectrum(
        profile_ex1, OperatorKind.JACOBI, (-60.0, 1.0)))


@pytest.fixture(scope="session")
def jacobi_ex2(profile_ex2):
    return _timed("jacobi_ex2", lambda: assemble_spectrum(
        profile_ex2, OperatorKind.JACOBI, (-60.0, 1.0)))
