import os
from fractions import Fraction

import numpy as np
import pytest

from config import Config
from exact_linalg import Matrix
from hom_nambu import HomAlgebra
from problem_loader import load_problem
from representations import GeneralizedRep

# FIX-C instantiations: valid iff a3 == a1 and r1 == 0
FIX_C_VALID = {"a1": 1, "a2": 2, "a3": 1, "s": 1, "r1": 0, "r2": 0}
FIX_C_INVALID = {"a1": 1, "a2": 2, "a3": 2, "s": 1, "r1": 0, "r2": 0}


def fixture_file(name: str) -> str:
    return os.path.join(Config.FIXTURES_DIR, name)


def random_fraction(rng, low: int = -3, high: int = 4) -> Fraction:
    return Fraction(int(rng.integers(low, high)))


@pytest.fixture(scope="session")
def fixtures_dir():
    return Config.FIXTURES_DIR


@pytest.fixture
def rng():
    return np.random.default_rng(Config.RANDOM_SEED)


@pytest.fixture(scope="session")
def fix_c_valid():
    return load_problem(fixture_file("fix_c.genrep"), FIX_C_VALID)


@pytest.fixture(scope="session")
def fix_c_invalid():
    return load_problem(fixture_file("fix_c.genrep"), FIX_C_INVALID)


@pytest.fixture(scope="session")
def abelian():
    return load_problem(fixture_file("fix_abelian.genrep"))


def untwisted_fix_a(bindings=None):
    """FIX-A bracket and (rho, nu) before the twist, alpha = id and A = id."""
    loaded = load_problem(fixture_file("fix_a.genrep"), bindings, construct=False)
    g = loaded.representation
    base = HomAlgebra.untwisted(loaded.algebra.bracket)
    return base, GeneralizedRep(g.algebra_dim, g.carrier_dim, dict(g.rho), Matrix.identity(g.carrier_dim), dict(g.nu))


@pytest.fixture(scope="session")
def fix_a_untwisted():
    return untwisted_fix_a()
