import numpy as np
import pytest
from numpy.random import PCG64, Generator

from normcheck import options
from normcheck.data_model import Spectrum
from normcheck.linalg_helpers import random_matrix, random_normal_matrix, random_unitary
from normcheck.normality_validators import commutator_defect

SUITE_SIZE = 100
MAX_DIMENSION = 8


def make_rng(seed=42):
    # Explicitly define the bit generator to ensure the algorithm/seed don't change
    return Generator(PCG64(seed=seed))


def random_spectrum(rng, n):
    """Complex Gaussian eigenvalues, all simple."""
    values = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return Spectrum(values=values, multiplicities=np.ones(n, dtype=np.int64))


@pytest.fixture(autouse=True)
def restore_options():
    yield
    options.reset()


@pytest.fixture(scope="session")
def jordan():
    """The 2x2 nilpotent Jordan block N."""
    return np.array([[0, 1], [0, 0]], dtype=np.complex128)


@pytest.fixture(scope="session")
def normal_suite():
    """
    Seeded random normal matrices of size 1..8 with simple eigenvalues.

    Returns:
        list of (matrix, Spectrum) tuples.
    """
    rng = make_rng(42)
    suite = []
    for i in range(SUITE_SIZE):
        n = int(rng.integers(1, MAX_DIMENSION + 1))
        spectrum = random_spectrum(rng, n)
        suite.append((random_normal_matrix(spectrum, seed=1000 + i), spectrum))
    return suite


@pytest.fixture(scope="session")
def nonnormal_suite():
    """
    Seeded complex Gaussian matrices of size 2..8.

    Generic Gaussian matrices are far from normal; the fixture keeps only
    those with a commutator defect of at least 1e-3 (in practice all of them).
    """
    rng = make_rng(43)
    suite = []
    seed = 2000
    while len(suite) < SUITE_SIZE:
        n = int(rng.integers(2, MAX_DIMENSION + 1))
        matrix = random_matrix(n, seed=seed)
        seed += 1
        if commutator_defect(matrix) >= 1e-3:
            suite.append(matrix)
    return suite


@pytest.fixture(scope="session")
def schur_factors():
    """Fifty random lower-triangular matrices of size 2..6."""
    rng = make_rng(44)
    factors = []
    for _ in range(50):
        n = int(rng.integers(2, 7))
        lower = np.tril(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        factors.append(lower)
    return factors


@pytest.fixture(scope="session")
def separated_matrices():
    """
    Fifty matrices of size 1..6 whose eigenvalues are at least 0.1 apart.

    Built as ``Q (D + E) Q*`` with D diagonal on the disk of radius 2, E
    strictly lower triangular and Q unitary.
    """
    rng = make_rng(45)
    matrices = []
    while len(matrices) < 50:
        n = int(rng.integers(1, 7))
        values = 2.0 * np.sqrt(rng.uniform(0, 1, n)) * np.exp(2j * np.pi * rng.uniform(0, 1, n))
        if n > 1:
            gaps = np.abs(values[:, None] - values[None, :]) + np.eye(n) * 10
            if gaps.min() < 0.1:
                continue
        strict = np.tril(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)), k=-1)
        q = random_unitary(n, seed=int(rng.integers(0, 2**31)))
        matrices.append(q @ (np.diag(values) + 0.5 * strict) @ q.conj().T)
    return matrices
