import logging
from typing import Optional

import numpy as np
import scipy.linalg
from numpy.random import PCG64, Generator
from scipy.linalg import lapack

from normcheck._config import options
from normcheck.data_model import (
    SchurDecomposition,
    Spectrum,
    as_cmatrix,
    require_square,
)
from normcheck.exceptions import (
    DimensionMismatchError,
    SchurConvergenceError,
    SingularBlockError,
)

"""
Dense complex linear-algebra kernels.

Everything here is a pure function of its inputs. Singular values come from
LAPACK's bidiagonalisation-based SVD (through numpy); the Schur form comes
from LAPACK's Hessenberg reduction plus shifted QR (through scipy), reordered
so that the diagonal has descending modulus and converted to the
lower-triangular convention ``T = U L U*``.
"""


def conjugate_transpose(matrix) -> np.ndarray:
    """
    Return the conjugate transpose ``M*``.

    Parameters
    ----------
    matrix : array_like
        A CMatrix of any shape.

    Returns
    -------
    numpy.ndarray
        ``result[i, j] == conj(matrix[j, i])``.
    """
    return np.ascontiguousarray(as_cmatrix(matrix).conj().T)


def singular_values(matrix) -> np.ndarray:
    """Singular values in descending order."""
    return np.linalg.svd(as_cmatrix(matrix), compute_uv=False)


def spectral_norm(matrix) -> float:
    """
    Spectral norm, the largest singular value.

    Parameters
    ----------
    matrix : array_like
        A CMatrix.

    Returns
    -------
    float
        ``sup ||M v||_2`` over unit vectors ``v``.
    """
    return float(singular_values(matrix)[0])


def smallest_singular_value(matrix) -> float:
    return float(singular_values(matrix)[-1])


def matrix_scale(matrix) -> float:
    """``max(||T||, 1)``, the scale every tolerance in normcheck is relative to."""
    return max(spectral_norm(matrix), 1.0)


def svd(matrix) -> tuple:
    """
    Thin singular value decomposition ``M = U diag(s) V*``.

    Parameters
    ----------
    matrix : array_like
        A CMatrix of shape (m, n).

    Returns
    -------
    tuple of (numpy.ndarray, numpy.ndarray, numpy.ndarray)
        ``U`` (m, k), ``s`` (k,) sorted descending and ``V`` (n, k) with
        ``k = min(m, n)``.
    """
    u, s, vh = np.linalg.svd(as_cmatrix(matrix), full_matrices=False)
    return u, s, np.ascontiguousarray(vh.conj().T)


def unitary_defect(matrix) -> float:
    """Return ``||U*U - I||``."""
    u = require_square(matrix)
    return spectral_norm(u.conj().T @ u - np.eye(u.shape[0]))


def _order_by_descending_modulus(upper: np.ndarray, q: np.ndarray) -> tuple:
    n = upper.shape[0]
    for k in range(n - 1):
        diagonal = np.abs(np.diag(upper))
        j = k + int(np.argmax(diagonal[k:]))
        if diagonal[j] <= diagonal[k]:
            continue
        # LAPACK indices are 1-based
        upper, q, info = lapack.ztrexc(upper, q, j + 1, k + 1)
        if info != 0:
            raise SchurConvergenceError(
                f"reordering the Schur form failed (ztrexc info={info})"
            )
    return upper, q


def schur(matrix) -> SchurDecomposition:
    """
    Lower-triangular Schur decomposition ``T = U L U*``.

    The upper-triangular complex Schur form ``T* = Q R Q*`` is computed and
    conjugate-transposed, so ``U = Q`` and ``L = R*``. The diagonal of L holds
    the eigenvalues of T with descending modulus.

    Parameters
    ----------
    matrix : array_like
        Square CMatrix T.

    Returns
    -------
    SchurDecomposition
        Unitary factor, lower factor (strict upper part exactly zero) and the
        reconstruction and unitarity residuals.

    Raises
    ------
    NonSquareError
        If T is not square.
    SchurConvergenceError
        If the QR iteration does not converge.
    """
    t = require_square(matrix)
    n = t.shape[0]
    try:
        upper, q = scipy.linalg.schur(t.conj().T, output="complex")
    except (np.linalg.LinAlgError, ValueError) as e:
        logging.error(f"Schur decomposition of a {n}x{n} matrix failed: {e}")
        raise SchurConvergenceError(f"Schur form not found: {e!s}") from e

    upper = np.asarray(upper, dtype=np.complex128, order="F")
    q = np.asarray(q, dtype=np.complex128, order="F")
    if n > 1:
        upper, q = _order_by_descending_modulus(upper, q)

    lower = np.tril(np.ascontiguousarray(upper.conj().T))
    q = np.ascontiguousarray(q)
    scale = max(spectral_norm(t), 1.0)
    reconstruction = spectral_norm(t - q @ lower @ q.conj().T) / scale
    unitarity = spectral_norm(q.conj().T @ q - np.eye(n))
    return SchurDecomposition(
        unitary_factor=q,
        lower_factor=lower,
        residual_reconstruction=reconstruction,
        residual_unitarity=unitarity,
    )


def cluster_eigenvalues(values, tol: float) -> Spectrum:
    """
    Merge eigenvalues that lie within `tol` of each other.

    Clusters are merged closest pair first; a merged cluster is represented by
    the multiplicity-weighted mean of its members, and merging continues until
    all representatives are more than `tol` apart.

    Parameters
    ----------
    values : array_like
        Eigenvalues counted with multiplicity.
    tol : float
        Absolute merge distance.

    Returns
    -------
    Spectrum
    """
    values = np.atleast_1d(np.asarray(values, dtype=np.complex128))
    if values.size == 0:
        raise ValueError("cannot cluster an empty list of eigenvalues")
    representatives = list(values)
    counts = [1] * len(representatives)
    while len(representatives) > 1:
        reps = np.array(representatives)
        distances = np.abs(reps[:, None] - reps[None, :])
        np.fill_diagonal(distances, np.inf)
        i, j = np.unravel_index(np.argmin(distances), distances.shape)
        if distances[i, j] > tol:
            break
        i, j = min(i, j), max(i, j)
        total = counts[i] + counts[j]
        representatives[i] = (counts[i] * representatives[i] + counts[j] * representatives[j]) / total
        counts[i] = total
        del representatives[j]
        del counts[j]
    return Spectrum(
        values=np.array(representatives, dtype=np.complex128),
        multiplicities=np.array(counts, dtype=np.int64),
        cluster_tol=tol,
    )


def eigenvalues(
    matrix,
    cluster_tol: Optional[float] = None,
    decomposition: Optional[SchurDecomposition] = None,
) -> Spectrum:
    """
    Spectrum of T read off the Schur diagonal.

    Parameters
    ----------
    matrix : array_like
        Square CMatrix T.
    cluster_tol : float, optional
        Relative merge tolerance; eigenvalues closer than
        ``cluster_tol * max(||T||, 1)`` become one representative. Defaults to
        ``options.cluster_tol``.
    decomposition : SchurDecomposition, optional
        A Schur form of T that was already computed.

    Returns
    -------
    Spectrum
        The stored ``cluster_tol`` is the absolute distance that was used.
    """
    t = require_square(matrix)
    if cluster_tol is None:
        cluster_tol = options.cluster_tol
    if cluster_tol < 0:
        raise ValueError("cluster_tol must be nonnegative")
    if decomposition is None:
        decomposition = schur(t)
    return cluster_eigenvalues(decomposition.diagonal, cluster_tol * matrix_scale(t))


def _require_invertible_block(block: np.ndarray, name: str) -> None:
    s = singular_values(block)
    if s[-1] <= options.singular_block_rtol * s[0]:
        raise SingularBlockError(
            f"block {name} is singular (smallest singular value {s[-1]:.3e}, norm {s[0]:.3e})"
        )


def block_lower_inverse(a, b, c) -> np.ndarray:
    """
    Inverse of the block lower-triangular matrix ``[[A, 0], [B, C]]``.

    Parameters
    ----------
    a : array_like
        Invertible k-by-k block A.
    b : array_like
        m-by-k block B.
    c : array_like
        Invertible m-by-m block C.

    Returns
    -------
    numpy.ndarray
        ``[[A^-1, 0], [-C^-1 B A^-1, C^-1]]``.

    Raises
    ------
    SingularBlockError
        If A or C is numerically singular.
    DimensionMismatchError
        If the block shapes do not fit together.
    """
    a = require_square(a, name="A")
    c = require_square(c, name="C")
    b = as_cmatrix(b, name="B")
    k, m = a.shape[0], c.shape[0]
    if b.shape != (m, k):
        raise DimensionMismatchError(f"B must be {m}x{k}, got {b.shape[0]}x{b.shape[1]}")
    _require_invertible_block(a, "A")
    _require_invertible_block(c, "C")
    a_inv = np.linalg.inv(a)
    c_inv = np.linalg.inv(c)
    return np.block([
        [a_inv, np.zeros((k, m), dtype=np.complex128)],
        [-c_inv @ b @ a_inv, c_inv],
    ])


def rng_from_seed(seed: int) -> Generator:
    # Explicitly define the bit generator to ensure the algorithm/seed don't change
    return Generator(PCG64(seed=seed))


def random_unitary(n: int, seed: int) -> np.ndarray:
    """
    Haar-distributed unitary matrix.

    QR factorisation of a seeded complex Gaussian matrix, with the columns of
    Q rescaled by the phases of the diagonal of R.
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    rng = rng_from_seed(seed)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    phases = np.where(np.abs(d) > 0, d / np.where(np.abs(d) > 0, np.abs(d), 1.0), 1.0)
    return q * phases[None, :]


def random_matrix(n: int, seed: int) -> np.ndarray:
    """Seeded n-by-n complex Gaussian matrix (entries of unit variance)."""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    rng = rng_from_seed(seed)
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)


def random_normal_matrix(spectrum: Spectrum, seed: int) -> np.ndarray:
    """
    Normal matrix ``U diag(lambda) U*`` with a prescribed spectrum.

    Parameters
    ----------
    spectrum : Spectrum
        Eigenvalues and multiplicities; the dimension is their sum.
    seed : int
        Seed of `random_unitary`.
    """
    eigs = spectrum.expanded()
    u = random_unitary(eigs.size, seed)
    return (u * eigs[None, :]) @ u.conj().T


def jordan_block(n: int, eigenvalue: complex = 0.0) -> np.ndarray:
    """Single n-by-n Jordan block; ``jordan_block(2)`` is ``[[0, 1], [0, 0]]``."""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    return eigenvalue * np.eye(n, dtype=np.complex128) + np.eye(n, k=1, dtype=np.complex128)
