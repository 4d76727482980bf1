import logging
from typing import Optional

import numpy as np
import scipy.linalg
from numpy.polynomial import polynomial as npp
from numpy.random import Generator

from normcheck._config import options
from normcheck.data_model import Polynomial, Spectrum, require_square
from normcheck.exceptions import ContourError, IllPosedInterpolationError
from normcheck.linalg_helpers import (
    eigenvalues,
    schur,
    smallest_singular_value,
    spectral_norm,
)
from normcheck.resolvent_helpers import on_spectrum_cutoff, shifted

"""
Polynomials of matrices and the matrix functions built from them.

`hermite_resolvent_interpolant` gives a polynomial ``q_z`` with
``q_z(T) = (zI - T)^-1``, `cauchy_contour_poly` recovers ``p(T)`` from the
resolvent on a circle, and `putzer_exp` writes ``exp(tT)`` as a polynomial
in T whose coefficients depend on t.
"""


def poly_eval(p: Polynomial, matrix) -> np.ndarray:
    """
    Evaluate ``p(T) = c_0 I + c_1 T + ... + c_m T^m`` with Horner's scheme.

    Parameters
    ----------
    p : Polynomial
    matrix : array_like
        Square CMatrix T.

    Returns
    -------
    numpy.ndarray
    """
    t = require_square(matrix)
    identity = np.eye(t.shape[0], dtype=np.complex128)
    coefficients = p.coefficients
    result = coefficients[-1] * identity
    for c in coefficients[-2::-1]:
        result = result @ t + c * identity
    return result


def random_polynomial(degree: int, rng: Generator) -> Polynomial:
    """
    Polynomial of the given degree with coefficients uniform on the unit disk.

    Parameters
    ----------
    degree : int
        Nonnegative degree.
    rng : numpy.random.Generator
        Source of randomness; the caller owns the seed.
    """
    if degree < 0:
        raise ValueError(f"degree must be nonnegative, got {degree}")
    radius = np.sqrt(rng.uniform(0.0, 1.0, degree + 1))
    angle = rng.uniform(0.0, 2.0 * np.pi, degree + 1)
    return Polynomial(radius * np.exp(1j * angle))


def _confluent_divided_differences(nodes: np.ndarray, z: complex) -> np.ndarray:
    # equal nodes must be adjacent; derivative entries use f^(u)(x)/u! = (z - x)^-(u+1)
    n = nodes.size
    coefficients = 1.0 / (z - nodes)
    for order in range(1, n):
        for i in range(n - 1, order - 1, -1):
            if nodes[i] == nodes[i - order]:
                coefficients[i] = 1.0 / (z - nodes[i]) ** (order + 1)
            else:
                coefficients[i] = (coefficients[i] - coefficients[i - 1]) / (
                    nodes[i] - nodes[i - order]
                )
    return coefficients


def hermite_resolvent_interpolant(z: complex, spectrum: Spectrum) -> Polynomial:
    """
    Hermite interpolant of ``f(t) = 1 / (z - t)`` on a spectrum.

    The interpolant matches f and its first ``m - 1`` derivatives at every
    eigenvalue of multiplicity m, so that ``q_z(T) = (zI - T)^-1`` for every T
    with this spectrum.

    Parameters
    ----------
    z : complex
        Point at which the resolvent is wanted.
    spectrum : Spectrum
        Eigenvalues with algebraic multiplicities.

    Returns
    -------
    Polynomial
        Degree at most ``spectrum.dimension - 1``.

    Raises
    ------
    IllPosedInterpolationError
        If z is within the on-spectrum cutoff of an eigenvalue.
    """
    z = complex(z)
    nodes = spectrum.expanded()
    size = float(np.max(np.abs(nodes)))
    distance = float(np.min(np.abs(z - nodes)))
    if distance < on_spectrum_cutoff(size, z):
        raise IllPosedInterpolationError(
            f"z = {z} is within {distance:.3e} of the spectrum; the resolvent "
            "interpolant does not exist there"
        )
    newton = _confluent_divided_differences(nodes, z)

    # Newton form -> ascending monomial coefficients
    coefficients = np.zeros(1, dtype=np.complex128)
    basis = np.ones(1, dtype=np.complex128)
    for k, c in enumerate(newton):
        coefficients = npp.polyadd(coefficients, c * basis)
        basis = npp.polymul(basis, np.array([-nodes[k], 1.0], dtype=np.complex128))
    return Polynomial(coefficients)


def _contour_nodes(center: complex, radius: float, nodes: int) -> np.ndarray:
    angles = 2.0 * np.pi * np.arange(nodes) / nodes
    return center + radius * np.exp(1j * angles)


def _check_contour(t: np.ndarray, center: complex, radius: float, nodes: int) -> None:
    if not radius > 0:
        raise ContourError(f"radius must be positive, got {radius}")
    if nodes < 8:
        raise ContourError(f"a quadrature contour needs at least 8 nodes, got {nodes}")
    spectrum = eigenvalues(t)
    reach = float(np.max(np.abs(spectrum.values - center)))
    if reach > radius * (1.0 - options.enclosure_margin):
        raise ContourError(
            f"the circle |z - {center}| = {radius} does not enclose the spectrum "
            f"(an eigenvalue lies at distance {reach:.6g} from the center)"
        )


def cauchy_contour_poly(
    matrix,
    p: Polynomial,
    center: complex = 0.0,
    radius: Optional[float] = None,
    nodes: int = 256,
) -> np.ndarray:
    """
    Evaluate ``p(T)`` through the Cauchy integral of the resolvent.

    The integral ``(1 / 2 pi i) * contour(p(z) (zI - T)^-1 dz)`` over the
    circle with the given center and radius is approximated by the
    trapezoidal rule, which converges geometrically for this integrand.

    Parameters
    ----------
    matrix : array_like
        Square CMatrix T.
    p : Polynomial
    center : complex, optional
        Circle center. Default is 0.
    radius : float, optional
        Circle radius. Defaults to ``||T|| + |center| + 1``, which encloses
        the spectrum.
    nodes : int, optional
        Number of quadrature nodes, at least 8. Default is 256.

    Returns
    -------
    numpy.ndarray

    Raises
    ------
    ContourError
        If the circle does not enclose the spectrum with a margin of
        ``options.enclosure_margin * radius`` or has too few nodes.
    """
    t = require_square(matrix)
    center = complex(center)
    if radius is None:
        radius = spectral_norm(t) + abs(center) + 1.0
    _check_contour(t, center, radius, nodes)

    n = t.shape[0]
    zs = _contour_nodes(center, radius, nodes)
    identity = np.eye(n, dtype=np.complex128)
    stack = zs[:, None, None] * identity[None, :, :] - t[None, :, :]
    resolvents = np.linalg.solve(stack, np.broadcast_to(identity, stack.shape))
    weights = p(zs) * (zs - center) / nodes
    result = np.sum(weights[:, None, None] * resolvents, axis=0)

    expected = poly_eval(p, t)
    residual = spectral_norm(result - expected) / max(spectral_norm(expected), 1.0)
    if residual > options.quadrature_check_tol:
        logging.warning(
            f"Contour quadrature with {nodes} nodes is off by {residual:.3e} "
            f"(relative); increase the number of nodes"
        )
    return result


def cauchy_norm_bound(
    matrix,
    p: Polynomial,
    center: complex = 0.0,
    radius: Optional[float] = None,
    nodes: int = 256,
) -> float:
    """
    Resolvent upper bound for ``||p(T)||`` taken from the Cauchy integral.

    Approximates ``(1 / 2 pi) * contour(||(zI - T)^-1|| |p(z)| |dz|)``; the
    bound holds for every enclosing circle but is not necessarily sharp.
    """
    t = require_square(matrix)
    center = complex(center)
    if radius is None:
        radius = spectral_norm(t) + abs(center) + 1.0
    _check_contour(t, center, radius, nodes)

    zs = _contour_nodes(center, radius, nodes)
    norms = np.array([1.0 / smallest_singular_value(shifted(t, z)) for z in zs])
    return float(radius * np.sum(norms * np.abs(p(zs))) / nodes)


def putzer_exp(matrix, t: float) -> np.ndarray:
    """
    Matrix exponential ``exp(tT)`` by Putzer's method.

    With eigenvalues ``lambda_1, ..., lambda_n`` in Schur order the result is
    ``sum_j r_{j+1}(t) P_j`` where ``P_0 = I`` and
    ``P_j = P_{j-1} (T - lambda_j I)``. The coefficients solve
    ``r_1' = lambda_1 r_1`` and ``r_j' = lambda_j r_j + r_{j-1}`` with
    ``r(0) = e_1``, which makes them the first row of ``exp(tZ)`` for the
    upper bidiagonal Z with the eigenvalues on the diagonal and ones above.

    Parameters
    ----------
    matrix : array_like
        Square CMatrix T.
    t : float
        Time.

    Returns
    -------
    numpy.ndarray
    """
    a = require_square(matrix)
    n = a.shape[0]
    lambdas = schur(a).diagonal
    z = np.diag(lambdas) + np.eye(n, k=1, dtype=np.complex128)
    r = scipy.linalg.expm(float(t) * z)[0]

    identity = np.eye(n, dtype=np.complex128)
    result = r[0] * identity
    product = identity
    for j in range(1, n):
        product = product @ (a - lambdas[j - 1] * identity)
        result = result + r[j] * product
    return result

