import numpy as np
import pytest

from normcheck.data_model import Spectrum
from normcheck.exceptions import (
    DimensionMismatchError,
    NonSquareError,
    SingularBlockError,
)
from normcheck.linalg_helpers import (
    block_lower_inverse,
    cluster_eigenvalues,
    conjugate_transpose,
    eigenvalues,
    jordan_block,
    matrix_scale,
    random_matrix,
    random_normal_matrix,
    random_unitary,
    schur,
    singular_values,
    smallest_singular_value,
    spectral_norm,
    svd,
    unitary_defect,
)
from tests.conftest import make_rng

GOLDEN = (1 + np.sqrt(5)) / 2


def test_conjugate_transpose():
    assert np.array_equal(conjugate_transpose(np.eye(2)), np.eye(2))
    assert np.array_equal(conjugate_transpose([[0, 1], [0, 0]]), [[0, 0], [1, 0]])
    assert conjugate_transpose([[1j]])[0, 0] == -1j
    assert conjugate_transpose(np.ones((2, 3))).shape == (3, 2)


def test_spectral_norm_examples():
    assert spectral_norm(np.eye(3)) == pytest.approx(1.0, rel=1e-12)
    assert spectral_norm([[0, 1], [0, 0]]) == pytest.approx(1.0, rel=1e-12)
    assert spectral_norm([[1, 1], [0, 1]]) == pytest.approx(GOLDEN, rel=1e-12)
    assert smallest_singular_value([[1, 1], [0, 1]]) == pytest.approx(GOLDEN - 1, rel=1e-12)
    assert matrix_scale(np.zeros((2, 2))) == 1.0
    assert matrix_scale(3 * np.eye(2)) == pytest.approx(3.0)


def test_svd_examples():
    _, s, _ = svd(np.diag([3.0, 1.0]))
    assert np.allclose(s, [3, 1])
    _, s, _ = svd([[0, 1], [0, 0]])
    assert np.allclose(s, [1, 0])
    _, s, _ = svd([[1, 1], [0, 1]])
    assert np.allclose(s, [GOLDEN, GOLDEN - 1], rtol=1e-12)
    assert np.prod(s) == pytest.approx(1.0)
    _, s, _ = svd(np.zeros((2, 2)))
    assert np.all(s == 0)


def test_svd_residuals():
    """Reconstruction and orthogonality for 100 seeded random matrices."""
    rng = make_rng(10)
    for _ in range(100):
        m, n = rng.integers(1, 9, size=2)
        matrix = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
        u, s, v = svd(matrix)
        k = min(m, n)
        assert np.all(np.diff(s) <= 0)
        assert spectral_norm(u.conj().T @ u - np.eye(k)) <= 1e-12
        assert spectral_norm(v.conj().T @ v - np.eye(k)) <= 1e-12
        residual = spectral_norm(matrix - (u * s) @ v.conj().T)
        assert residual <= 1e-10 * max(spectral_norm(matrix), 1.0)
        # same path as the spectral norm
        assert abs(spectral_norm(matrix) - s[0]) <= 1e-13 * max(s[0], 1.0)
        assert np.array_equal(singular_values(matrix), np.linalg.svd(matrix, compute_uv=False))


def test_unitary_invariance_of_spectral_norm():
    rng = make_rng(11)
    for seed in range(20):
        n = int(rng.integers(1, 9))
        t = random_matrix(n, seed=seed)
        u = random_unitary(n, seed=seed + 100)
        v = random_unitary(n, seed=seed + 200)
        assert abs(spectral_norm(v @ t @ u) - spectral_norm(t)) <= 1e-10 * spectral_norm(t)


def test_schur_lower_triangular_input():
    """An already lower-triangular matrix keeps its factor up to diagonal phases."""
    lower = np.array([[3, 0, 0], [1, 2, 0], [0.5, 1j, 1]], dtype=np.complex128)
    decomposition = schur(lower)
    assert np.allclose(np.abs(decomposition.unitary_factor), np.eye(3), atol=1e-12)
    assert np.allclose(np.abs(decomposition.lower_factor), np.abs(lower), atol=1e-12)
    assert np.allclose(decomposition.diagonal, [3, 2, 1])


def test_schur_hermitian_input():
    decomposition = schur([[0, 1], [1, 0]])
    lower = decomposition.lower_factor
    assert abs(lower[1, 0]) <= 1e-12
    assert sorted(decomposition.diagonal.real) == pytest.approx([-1, 1])


def test_schur_invariants_random():
    """Residuals, exact zeros above the diagonal and descending moduli."""
    for seed in range(30):
        n = 1 + seed % 12
        t = random_matrix(n, seed=seed)
        decomposition = schur(t)
        lower = decomposition.lower_factor
        assert np.all(np.triu(lower, k=1) == 0)
        assert decomposition.residual_reconstruction <= 1e-10
        assert decomposition.residual_unitarity <= 1e-12
        moduli = np.abs(decomposition.diagonal)
        assert np.all(np.diff(moduli) <= 1e-12 * max(moduli.max(), 1.0))
        # the diagonal carries the eigenvalues
        expected = np.sort_complex(np.linalg.eigvals(t))
        found = np.sort_complex(decomposition.diagonal)
        assert np.allclose(found, expected, atol=1e-8 * matrix_scale(t))


def test_schur_non_square():
    with pytest.raises(NonSquareError):
        schur(np.ones((2, 3)))


def test_eigenvalue_examples():
    spectrum = eigenvalues(np.diag([1, 2, 2]), cluster_tol=1e-8)
    assert np.allclose(spectrum.values, [1, 2])
    assert list(spectrum.multiplicities) == [1, 2]

    spectrum = eigenvalues([[0, 1], [0, 0]])
    assert spectrum.distinct_count == 1
    assert spectrum.multiplicities[0] == 2
    assert abs(spectrum.values[0]) <= 1e-12

    spectrum = eigenvalues(np.diag([1, 1 + 1e-12]), cluster_tol=1e-8)
    assert spectrum.distinct_count == 1
    assert spectrum.values[0] == pytest.approx(1.0)
    assert spectrum.cluster_tol == pytest.approx(1e-8 * (1 + 1e-12))


def test_cluster_eigenvalues_weighted_mean():
    spectrum = cluster_eigenvalues([1.0, 1.0 + 3e-9, 1.0 + 3e-9, 5.0], tol=1e-8)
    assert list(spectrum.multiplicities) == [3, 1]
    assert spectrum.values[0] == pytest.approx(1.0 + 2e-9, abs=1e-15)
    # representatives stay more than tol apart
    spectrum = cluster_eigenvalues([0.0, 0.6, 1.2], tol=0.5)
    assert spectrum.distinct_count == 3
    with pytest.raises(ValueError):
        cluster_eigenvalues([], tol=1.0)


def test_block_lower_inverse_examples():
    result = block_lower_inverse([[2]], [[3]], [[4]])
    assert np.allclose(result, [[0.5, 0], [-3 / 8, 0.25]])

    a = np.array([[1, 2], [0, 1]], dtype=complex)
    c = np.array([[3]], dtype=complex)
    result = block_lower_inverse(a, np.zeros((1, 2)), c)
    assert np.allclose(result[:2, :2], np.linalg.inv(a))
    assert np.allclose(result[2:, 2:], [[1 / 3]])
    assert np.all(result[2:, :2] == 0)


def test_block_lower_inverse_random():
    """Agreement with dense inversion on 100 seeded block triples."""
    rng = make_rng(12)
    for _ in range(100):
        k, m = rng.integers(1, 5, size=2)
        a = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k)) + 3 * np.eye(k)
        b = rng.standard_normal((m, k)) + 1j * rng.standard_normal((m, k))
        c = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m)) + 3 * np.eye(m)
        full = np.block([[a, np.zeros((k, m))], [b, c]])
        expected = np.linalg.inv(full)
        result = block_lower_inverse(a, b, c)
        assert spectral_norm(result - expected) <= 1e-11 * spectral_norm(expected)


def test_block_lower_inverse_errors():
    with pytest.raises(SingularBlockError) as excinfo:
        block_lower_inverse([[0]], [[1]], [[1]])
    assert "block A is singular" in str(excinfo.value)
    with pytest.raises(SingularBlockError):
        block_lower_inverse([[1]], [[1], [1]], [[1, 1], [1, 1]])
    with pytest.raises(DimensionMismatchError):
        block_lower_inverse([[1]], [[1, 2]], [[1]])


def test_random_unitary():
    u = random_unitary(1, seed=3)
    assert abs(abs(u[0, 0]) - 1) <= 1e-12
    assert np.array_equal(random_unitary(4, seed=5), random_unitary(4, seed=5))
    assert unitary_defect(random_unitary(5, seed=6)) <= 1e-12
    assert unitary_defect(random_unitary(4, seed=7)) <= 1e-12
    with pytest.raises(ValueError):
        random_unitary(0, seed=1)


def test_unitary_defect_examples():
    assert unitary_defect(np.eye(3)) == 0
    assert unitary_defect(2 * np.eye(2)) == pytest.approx(3.0)


def test_random_normal_matrix():
    n = 4
    zero = random_normal_matrix(Spectrum(values=[0], multiplicities=[n]), seed=1)
    assert np.allclose(zero, 0)
    identity = random_normal_matrix(Spectrum(values=[1], multiplicities=[n]), seed=1)
    assert np.allclose(identity, np.eye(n), atol=1e-12)

    spectrum = Spectrum(values=[1, -1, 1j], multiplicities=[1, 1, 1])
    matrix = random_normal_matrix(spectrum, seed=2)
    recovered = eigenvalues(matrix)
    assert np.allclose(recovered.values, spectrum.values, atol=1e-10)
    commutator = matrix.conj().T @ matrix - matrix @ matrix.conj().T
    assert spectral_norm(commutator) <= 1e-12 * matrix_scale(matrix) ** 2


def test_jordan_block():
    assert np.array_equal(jordan_block(2), [[0, 1], [0, 0]])
    assert np.array_equal(jordan_block(3, 2.0), [[2, 1, 0], [0, 2, 1], [0, 0, 2]])


if __name__ == "__main__":
    # Run pytest for debugging the testing
    pytest.main(["-v"])
