import logging
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd

from normcheck._config import options
from normcheck.data_model import (
    INFINITE,
    ComparisonMode,
    ComparisonReport,
    Polynomial,
    Region,
    Verdict,
    require_square,
)
from normcheck.exceptions import DimensionMismatchError, HypothesisViolationError
from normcheck.linalg_helpers import (
    cluster_eigenvalues,
    eigenvalues,
    matrix_scale,
    rng_from_seed,
    schur,
    spectral_norm,
    unitary_defect,
)
from normcheck.matfunc_helpers import poly_eval, random_polynomial
from normcheck.normality_validators import certify
from normcheck.resolvent_helpers import auto_region, pseudospectrum_grid

"""
Pairwise comparisons of matrices.

Pseudospectra and norm behaviour are compared on samples (grid nodes and
polynomials), so a positive decision is numerical evidence at the recorded
tolerance, not a proof. Matrices of different sizes can be compared in both
of these modes; `unitary_similarity` needs equal sizes and a normal A.
"""

WITNESS_UNITARITY_TOL = 1e-10
WITNESS_RECONSTRUCTION_TOL = 1e-8


def char_poly(matrix) -> Polynomial:
    """
    Characteristic polynomial ``det(zI - T)``.

    Parameters
    ----------
    matrix : array_like
        Square CMatrix T.

    Returns
    -------
    Polynomial
        Monic, with the Schur diagonal of T (eigenvalues counted with
        multiplicity) as roots.
    """
    return Polynomial.from_roots(schur(matrix).diagonal)


def _relative_node_deviation(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # matching infinities agree; a finite value against an infinite one never does
    deviation = np.zeros(a.shape, dtype=float)
    a_inf = np.isinf(a)
    b_inf = np.isinf(b)
    deviation[a_inf != b_inf] = INFINITE
    finite = ~a_inf & ~b_inf
    denominator = np.maximum(a[finite], b[finite])
    deviation[finite] = np.abs(a[finite] - b[finite]) / np.where(denominator > 0, denominator, 1.0)
    return deviation


def pseudospectra_equal(
    a,
    b,
    region: Union[Region, str, None] = "auto",
    nx: Optional[int] = None,
    ny: Optional[int] = None,
    tol: Optional[float] = None,
    multi: bool = False,
    max_workers: int = 2,
) -> ComparisonReport:
    """
    Compare resolvent norms of A and B on a common grid.

    Parameters
    ----------
    a, b : array_like
        Square CMatrices; their sizes may differ.
    region : Region, str or None, optional
        ``"auto"`` (default) takes the union of the AUTO regions of both
        spectra.
    nx, ny : int, optional
        Grid size. Defaults to ``options.compare_grid_shape``.
    tol : float, optional
        Largest accepted relative difference. Defaults to ``options.normal_tol``.
    multi : bool, optional
        Evaluate the grids in a process pool. Default is False.
    max_workers : int, optional
        The maximum number of workers to use for multiprocessing. Default is 2.

    Returns
    -------
    ComparisonReport
        `details` holds one row per node: ``re``, ``im``, ``resnorm_a``,
        ``resnorm_b`` and ``deviation``.
    """
    a = require_square(a, name="A")
    b = require_square(b, name="B")
    tol = options.normal_tol if tol is None else tol
    default_nx, default_ny = options.compare_grid_shape
    nx = default_nx if nx is None else nx
    ny = default_ny if ny is None else ny
    if region is None or (isinstance(region, str) and region.strip().lower() == "auto"):
        region = auto_region(eigenvalues(a)).union(auto_region(eigenvalues(b)))

    grid_a = pseudospectrum_grid(a, region=region, nx=nx, ny=ny, multi=multi, max_workers=max_workers)
    grid_b = pseudospectrum_grid(b, region=region, nx=nx, ny=ny, multi=multi, max_workers=max_workers)
    deviation = _relative_node_deviation(grid_a.values, grid_b.values)

    nodes = grid_a.nodes().reshape(-1)
    details = pd.DataFrame(
        {
            "re": nodes.real,
            "im": nodes.imag,
            "resnorm_a": grid_a.values.reshape(-1),
            "resnorm_b": grid_b.values.reshape(-1),
            "deviation": deviation.reshape(-1),
        }
    )
    max_deviation = float(deviation.max())
    return ComparisonReport(
        mode=ComparisonMode.PSEUDOSPECTRA,
        max_deviation=max_deviation,
        decision=bool(max_deviation <= tol),
        tol=tol,
        details=details,
    )


def norm_behavior_equal(
    a,
    b,
    degree: Optional[int] = None,
    trials: Optional[int] = None,
    seed: Optional[int] = None,
    tol: Optional[float] = None,
    polynomials: Optional[Sequence[Polynomial]] = None,
) -> ComparisonReport:
    """
    Compare ``||p(A)||`` and ``||p(B)||`` over sampled polynomials.

    The monomials ``z, z^2, ..., z^degree`` are always tested first, followed
    by `trials` seeded random polynomials of degree `degree`.

    Parameters
    ----------
    a, b : array_like
        Square CMatrices; their sizes may differ.
    degree : int, optional
        Polynomial degree, at least 1. Defaults to ``max(n_A, n_B) - 1``
        (and at least 1).
    trials : int, optional
        Number of random polynomials. Defaults to ``options.polynomial_trials``.
    seed : int, optional
        Defaults to ``options.default_seed``.
    tol : float, optional
        Largest accepted relative difference. Defaults to ``options.normal_tol``.
    polynomials : sequence of Polynomial, optional
        Additional polynomials tested after the monomials.

    Returns
    -------
    ComparisonReport
        `details` holds one row per polynomial.
    """
    a = require_square(a, name="A")
    b = require_square(b, name="B")
    if degree is None:
        degree = max(max(a.shape[0], b.shape[0]) - 1, 1)
    if degree < 1:
        raise ValueError(f"degree must be at least 1, got {degree}")
    trials = options.polynomial_trials if trials is None else trials
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials}")
    seed = options.default_seed if seed is None else seed
    tol = options.normal_tol if tol is None else tol

    candidates = [("monomial", Polynomial.monomial(k)) for k in range(1, degree + 1)]
    if polynomials is not None:
        candidates += [("given", p) for p in polynomials]
    rng = rng_from_seed(seed)
    candidates += [("random", random_polynomial(degree, rng)) for _ in range(trials)]

    rows = []
    for trial, (kind, p) in enumerate(candidates):
        norm_a = spectral_norm(poly_eval(p, a))
        norm_b = spectral_norm(poly_eval(p, b))
        deviation = abs(norm_a - norm_b) / max(norm_a, norm_b, 1e-12)
        rows.append(
            {
                "trial": trial,
                "kind": kind,
                "degree": p.degree,
                "norm_a": norm_a,
                "norm_b": norm_b,
                "deviation": deviation,
            }
        )
    details = pd.DataFrame(rows)
    max_deviation = float(details["deviation"].max())
    return ComparisonReport(
        mode=ComparisonMode.NORM_BEHAVIOR,
        max_deviation=max_deviation,
        decision=bool(max_deviation <= tol),
        tol=tol,
        details=details,
    )


def _char_poly_deviation(a: np.ndarray, b: np.ndarray) -> float:
    ca = char_poly(a).coefficients
    cb = char_poly(b).coefficients
    size = max(ca.size, cb.size)
    ca = np.pad(ca, (0, size - ca.size))
    cb = np.pad(cb, (0, size - cb.size))
    reference = max(1.0, float(np.max(np.abs(ca))), float(np.max(np.abs(cb))))
    return float(np.max(np.abs(ca - cb)) / reference)


def _sorted_eigenbasis(matrix: np.ndarray, representatives: np.ndarray) -> tuple:
    # columns of the Schur factor ordered by their eigenvalue's cluster, real part first
    decomposition = schur(matrix)
    diagonal = decomposition.diagonal
    labels = np.argmin(np.abs(diagonal[:, None] - representatives[None, :]), axis=1)
    keys = representatives[labels]
    order = np.lexsort((keys.imag, keys.real))
    return decomposition.unitary_factor[:, order], labels[order]


def unitary_similarity(a, b, tol: Optional[float] = None, seed: Optional[int] = None) -> ComparisonReport:
    """
    Decide whether B is unitarily similar to a normal A.

    Equal characteristic polynomials and identical pseudospectra are checked
    first. If both hold, B must be normal as well, and a witness
    ``W = U_A U_B*`` is built from eigenbases whose eigenvalues are sorted by
    cluster (real part, then imaginary part) so that ``A = W B W*``.

    Parameters
    ----------
    a, b : array_like
        Square CMatrices of the same size.
    tol : float, optional
        Tolerance of both checks. Defaults to ``options.normal_tol``.
    seed : int, optional
        Seed passed on to `certify`.

    Returns
    -------
    ComparisonReport
        A witness that fails verification is not returned; the report then
        has ``decision=False``, ``inconclusive=True`` and a `reason`.

    Raises
    ------
    DimensionMismatchError
        If A and B differ in size.
    HypothesisViolationError
        If A is not certified NORMAL.
    """
    a = require_square(a, name="A")
    b = require_square(b, name="B")
    if a.shape != b.shape:
        raise DimensionMismatchError(
            f"unitary similarity needs matrices of equal size, got {a.shape[0]} and {b.shape[0]}"
        )
    tol = options.normal_tol if tol is None else tol
    verdict_a = certify(a, seed=seed).verdict
    if verdict_a is not Verdict.NORMAL:
        logging.error(f"Unitary similarity needs a normal A, certify returned {verdict_a.value}")
        raise HypothesisViolationError(f"hypothesis violated: A not normal ({verdict_a.value})")

    mode = ComparisonMode.UNITARY_SIMILARITY
    poly_deviation = _char_poly_deviation(a, b)
    if poly_deviation > tol:
        return ComparisonReport(
            mode=mode,
            max_deviation=poly_deviation,
            decision=False,
            tol=tol,
            reason="characteristic polynomials differ",
        )

    spectra = pseudospectra_equal(a, b, tol=tol)
    max_deviation = max(poly_deviation, spectra.max_deviation)
    if not spectra.decision:
        return ComparisonReport(
            mode=mode,
            max_deviation=max_deviation,
            decision=False,
            tol=tol,
            details=spectra.details,
            reason="pseudospectra differ",
        )

    verdict_b = certify(b, seed=seed).verdict
    if verdict_b is not Verdict.NORMAL:
        logging.warning(
            f"Pseudospectra agree on the grid but certify(B) returned {verdict_b.value}"
        )
        return ComparisonReport(
            mode=mode,
            max_deviation=max_deviation,
            decision=False,
            tol=tol,
            details=spectra.details,
            reason=f"B is not certified normal ({verdict_b.value})",
            inconclusive=verdict_b is Verdict.INCONCLUSIVE,
        )

    scale = max(matrix_scale(a), matrix_scale(b))
    joint = np.concatenate([schur(a).diagonal, schur(b).diagonal])
    representatives = cluster_eigenvalues(joint, options.cluster_tol * scale).values
    basis_a, labels_a = _sorted_eigenbasis(a, representatives)
    basis_b, labels_b = _sorted_eigenbasis(b, representatives)
    witness = basis_a @ basis_b.conj().T

    defect = unitary_defect(witness)
    reconstruction = spectral_norm(a - witness @ b @ witness.conj().T) / scale
    residuals = {"unitary_defect": defect, "reconstruction": reconstruction}
    if (
        not np.array_equal(labels_a, labels_b)
        or defect > WITNESS_UNITARITY_TOL
        or reconstruction > WITNESS_RECONSTRUCTION_TOL
    ):
        reason = (
            f"witness failed verification (unitary defect {defect:.3e}, "
            f"reconstruction {reconstruction:.3e}); eigenvalue clusters may be mismatched"
        )
        logging.warning(reason)
        return ComparisonReport(
            mode=mode,
            max_deviation=max_deviation,
            decision=False,
            tol=tol,
            details=spectra.details,
            reason=reason,
            inconclusive=True,
            residuals=residuals,
        )

    return ComparisonReport(
        mode=mode,
        max_deviation=max_deviation,
        decision=True,
        tol=tol,
        details=spectra.details,
        witness=witness,
        residuals=residuals,
    )
