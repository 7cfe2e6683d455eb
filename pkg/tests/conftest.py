"""Shared fixtures"""

import logging
from pathlib import Path

import numpy as np
import pytest

from amc_sim.core.model import CrossbarModel
from amc_sim.utils.config_loader import load_config
from amc_sim.workload import MatrixSpec, gen_matrix

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def sample_matrix() -> np.ndarray:
    return np.loadtxt(FIXTURES / "sample_matrix.csv", delimiter=",")


@pytest.fixture
def dd_matrix():
    """Factory: relaxed diagonally dominant symmetric matrix of size n"""

    def make(n: int, seed: int = 0) -> np.ndarray:
        spec = MatrixSpec(n=n, seed=seed, floor_policy="relax")
        return gen_matrix(spec)

    return make


@pytest.fixture
def make_model(dd_matrix):
    """Factory: CrossbarModel with equal row/column wire resistance"""

    def make(n: int, r: float = 1.0, seed: int = 0) -> CrossbarModel:
        return CrossbarModel.from_resistance(dd_matrix(n, seed), r)

    return make


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def default_config():
    return load_config(None)


@pytest.fixture
def test_logger():
    return logging.getLogger("amc_sim.tests")
