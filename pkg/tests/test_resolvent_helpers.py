import numpy as np
import pytest

from normcheck.data_model import INFINITE, Region, Spectrum
from normcheck.exceptions import NonSquareError, OnSpectrumError
from normcheck.linalg_helpers import (
    matrix_scale,
    random_matrix,
    random_unitary,
    spectral_norm,
)
from normcheck.resolvent_helpers import (
    auto_region,
    dist_to_spectrum,
    epsilon_level_mask,
    grid_to_frame,
    pseudospectrum_grid,
    resolve_region,
    resolvent_matrix,
    resolvent_norm,
)
from tests.conftest import make_rng

GOLDEN = (1 + np.sqrt(5)) / 2


def _simple_spectrum(matrix):
    values = np.linalg.eigvals(matrix)
    return Spectrum(values=values, multiplicities=np.ones(values.size, dtype=np.int64))


def test_resolvent_matrix_examples(jordan):
    assert np.allclose(resolvent_matrix(jordan, 1), [[1, 1], [0, 1]], atol=1e-14)
    assert np.allclose(resolvent_matrix(np.diag([1, 2j]), 3), np.diag([1 / 2, 1 / (3 - 2j)]))
    assert np.allclose(resolvent_matrix(np.zeros((3, 3)), 2), 0.5 * np.eye(3))


def test_resolvent_matrix_on_spectrum(jordan):
    with pytest.raises(OnSpectrumError) as excinfo:
        resolvent_matrix(jordan, 0)
    assert excinfo.value.z == 0
    assert "lies on the spectrum" in str(excinfo.value)


def test_resolvent_norm_examples(jordan):
    assert resolvent_norm(jordan, 1) == pytest.approx(GOLDEN, abs=1e-10)
    assert resolvent_norm(np.diag([1, -1]), 3j) == pytest.approx(1 / np.sqrt(10), rel=1e-12)
    assert resolvent_norm(jordan, 0) == INFINITE
    with pytest.raises(NonSquareError):
        resolvent_norm(np.ones((2, 3)), 1)


def test_dist_to_spectrum_examples():
    assert dist_to_spectrum(3j, Spectrum(values=[1, -1], multiplicities=[1, 1])) == pytest.approx(
        np.sqrt(10)
    )
    assert dist_to_spectrum(2, Spectrum(values=[2, 5], multiplicities=[1, 1])) == 0
    spectrum = Spectrum(values=[1, 2, -3], multiplicities=[1, 1, 1])
    assert dist_to_spectrum(0, spectrum) == 1
    assert np.allclose(dist_to_spectrum(np.array([0, 4, -4j]), spectrum), [1, 2, 5])


def test_resolvent_lower_bound():
    """``dist(z, spectrum) >= 1 / ||(zI - T)^-1||`` for random T."""
    rng = make_rng(20)
    for seed in range(100):
        n = int(rng.integers(1, 11))
        t = random_matrix(n, seed=seed)
        spectrum = _simple_spectrum(t)
        scale = matrix_scale(t)
        for z in 3 * (rng.standard_normal(50) + 1j * rng.standard_normal(50)):
            norm = resolvent_norm(t, z)
            assert dist_to_spectrum(z, spectrum) >= 1 / norm - 1e-9 * scale


def test_normal_resolvent_equals_inverse_distance(normal_suite):
    rng = make_rng(21)
    for matrix, spectrum in normal_suite[:30]:
        for z in 2 * (rng.standard_normal(20) + 1j * rng.standard_normal(20)):
            norm = resolvent_norm(matrix, z)
            assert abs(norm * dist_to_spectrum(z, spectrum) - 1) <= 1e-8


def test_singular_value_path_matches_inverse():
    rng = make_rng(22)
    for seed in range(30):
        n = int(rng.integers(1, 9))
        t = random_matrix(n, seed=seed)
        scale = matrix_scale(t)
        z = complex(*(2 * rng.standard_normal(2)))
        a = z * np.eye(n) - t
        if np.linalg.svd(a, compute_uv=False)[-1] <= 1e-8 * scale:
            continue
        explicit = spectral_norm(resolvent_matrix(t, z))
        assert resolvent_norm(t, z) == pytest.approx(explicit, rel=1e-9)


def test_resolvent_norm_unitary_invariance():
    rng = make_rng(23)
    for seed in range(30):
        n = int(rng.integers(1, 9))
        t = random_matrix(n, seed=seed)
        u = random_unitary(n, seed=seed + 500)
        similar = u @ t @ u.conj().T
        z = complex(*(2 * rng.standard_normal(2)))
        norm = resolvent_norm(t, z)
        if norm > 1e4:
            continue
        assert resolvent_norm(similar, z) == pytest.approx(norm, rel=1e-10)


def test_auto_region():
    assert auto_region(Spectrum(values=[1, -1], multiplicities=[1, 1])) == Region(-2, 2, -1, 1)
    assert auto_region(Spectrum(values=[0], multiplicities=[2])) == Region(-0.5, 0.5, -0.5, 0.5)
    assert auto_region(Spectrum(values=[0], multiplicities=[1]), padding=1.0) == Region(-1, 1, -1, 1)


def test_resolve_region(jordan):
    assert resolve_region(jordan, "-1,1,-2,2") == Region(-1, 1, -2, 2)
    assert resolve_region(jordan, (-1, 1, -2, 2)) == Region(-1, 1, -2, 2)
    region = Region(0, 1, 0, 1)
    assert resolve_region(jordan, region) is region
    auto = resolve_region(jordan, "AUTO")
    assert auto.x_min == pytest.approx(-0.5, abs=1e-8)
    assert auto == resolve_region(jordan, None)


def test_scalar_grid():
    """1x1 zero matrix on [-1, 1]^2: norms 1/|z| and INFINITE at the center."""
    grid = pseudospectrum_grid([[0]], region="-1,1,-1,1", nx=3, ny=3)
    assert grid.values.shape == (3, 3)
    assert grid.values[1, 1] == INFINITE
    nodes = grid.nodes()
    finite = np.isfinite(grid.values)
    assert finite.sum() == 8
    assert np.allclose(grid.values[finite], 1 / np.abs(nodes[finite]), rtol=1e-14)


def test_jordan_grid_node(jordan):
    grid = pseudospectrum_grid(jordan, region=Region(0, 2, -1, 1), nx=3, ny=3)
    assert grid.nodes()[1, 1] == 1
    assert grid.values[1, 1] == pytest.approx(1.618034, abs=1e-6)


def test_normal_grid_matches_inverse_distance(normal_suite):
    for matrix, spectrum in normal_suite[:5]:
        grid = pseudospectrum_grid(matrix, nx=21, ny=21)
        finite = np.isfinite(grid.values)
        expected = 1 / dist_to_spectrum(grid.nodes()[finite], spectrum)
        assert np.allclose(grid.values[finite], expected, rtol=1e-8, atol=0)


def test_grid_argument_errors(jordan):
    with pytest.raises(ValueError):
        pseudospectrum_grid(jordan, nx=1, ny=5)
    with pytest.raises(ValueError):
        pseudospectrum_grid(jordan, region="0,1,1")


def test_grid_multiprocessing_matches_serial(jordan):
    serial = pseudospectrum_grid(jordan, region="-2,2,-2,2", nx=9, ny=7)
    parallel = pseudospectrum_grid(jordan, region="-2,2,-2,2", nx=9, ny=7, multi=True)
    assert np.array_equal(serial.values, parallel.values)


def test_epsilon_level_mask_on_normal_matrices(normal_suite):
    """On a 101x101 auto grid the eps-mask equals the eps-neighbourhood of the spectrum."""
    for matrix, spectrum in normal_suite[:4]:
        grid = pseudospectrum_grid(matrix)
        distances = dist_to_spectrum(grid.nodes(), spectrum)
        for eps in (1, 0.5, 0.1, 0.01):
            mask = epsilon_level_mask(grid, eps)
            assert mask.shape == (101, 101)
            assert np.array_equal(mask, distances < eps)


def test_epsilon_level_mask_jordan_strictly_larger(jordan):
    grid = pseudospectrum_grid(jordan, region="-2,2,-2,2", nx=41, ny=41)
    mask = epsilon_level_mask(grid, 0.9)
    disk = np.abs(grid.nodes()) < 0.9
    assert np.all(mask[disk])
    assert mask.sum() > disk.sum()


def test_epsilon_level_mask_limits(jordan):
    grid = pseudospectrum_grid(jordan, region="-2,2,-2,2", nx=11, ny=11)
    assert np.all(epsilon_level_mask(grid, 1e12))
    with pytest.raises(ValueError):
        epsilon_level_mask(grid, 0)


def test_grid_to_frame():
    grid = pseudospectrum_grid([[0]], region="-1,1,-1,1", nx=3, ny=2)
    frame = grid_to_frame(grid)
    assert list(frame.columns) == ["re", "im", "resnorm"]
    assert len(frame) == 6
    assert frame["re"].tolist() == [-1, -1, 0, 0, 1, 1]
    assert frame["im"].tolist() == [-1, 1, -1, 1, -1, 1]
    assert np.allclose(frame["resnorm"], 1 / np.sqrt(frame["re"] ** 2 + frame["im"] ** 2))


if __name__ == "__main__":
    # Run pytest for debugging the testing
    pytest.main(["-v"])
