"""Test configuration."""

import numpy as np
import pytest

from orlicz_spectra.mesh import build_mesh
from orlicz_spectra.operator import assemble_problem
from orlicz_spectra.solver import SolverConfig
from orlicz_spectra.young import GrowthFunction, GrowthKind, YoungFunction


def make_problem(k: int, s: float = 0.5, young: YoungFunction | None = None, growth: GrowthFunction | None = None):
    """Assemble a problem on (-1, 1) with M(t) = t^2/2 and g = m unless given."""
    young = young or YoungFunction.power(2.0)
    growth = growth or GrowthFunction(GrowthKind.YOUNG, young=young)
    _, basis = build_mesh(-1.0, 1.0, k, s)
    return assemble_problem(basis, young, growth)


@pytest.fixture(scope="session")
def problem_k1():
    """Single hat function, linear case."""
    return make_problem(1)


@pytest.fixture(scope="session")
def problem_k3():
    """Three hat functions, linear case."""
    return make_problem(3)


@pytest.fixture(scope="session")
def problem_k7():
    """Seven hat functions, linear case."""
    return make_problem(7)


@pytest.fixture(scope="session")
def problem_p3():
    """Seven hat functions with M(t) = |t|^3/3."""
    return make_problem(7, young=YoungFunction.power(3.0))


@pytest.fixture(scope="session")
def problem_exp():
    """Seven hat functions with the non-doubling M(t) = e^t - 1 - t."""
    return make_problem(7, young=YoungFunction.exp())


@pytest.fixture(scope="session")
def problem_q25():
    """Seven hat functions with M(t) = |t|^3/3 and the power growth g(t) = |t|^0.5 t."""
    return make_problem(7, young=YoungFunction.power(3.0), growth=GrowthFunction(GrowthKind.POWER, q=2.5))


@pytest.fixture
def solver_config():
    """Solver settings small enough for unit tests."""
    return SolverConfig(restarts=3, sphere_samples=32)


@pytest.fixture
def rng():
    """Seeded generator."""
    return np.random.default_rng(12345)


@pytest.fixture
def config_file(tmp_path):
    """Write a small JSON run configuration."""

    def write(text: str, name: str = "run.json"):
        path = tmp_path / name
        path.write_text(text)
        return path

    return write


@pytest.fixture(scope="session")
def problem_factory():
    """Assemble problems with custom k, s, Young or growth functions."""
    return make_problem
