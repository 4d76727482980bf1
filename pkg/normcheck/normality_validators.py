import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from normcheck._config import options
from normcheck.data_model import (
    INFINITE,
    NormalityReport,
    PointRecord,
    Polynomial,
    SchurDecomposition,
    Spectrum,
    Thresholds,
    Verdict,
    require_square,
    subdiagonal_block,
    trailing_block,
)
from normcheck.exceptions import (
    DimensionMismatchError,
    NormcheckError,
    OnSpectrumError,
    RejectedSampleError,
)
from normcheck.linalg_helpers import (
    block_lower_inverse,
    eigenvalues,
    matrix_scale,
    rng_from_seed,
    schur,
    spectral_norm,
)
from normcheck.matfunc_helpers import poly_eval, random_polynomial
from normcheck.resolvent_helpers import (
    auto_region,
    dist_to_spectrum,
    on_spectrum_cutoff,
    resolvent_matrix,
    resolvent_norm,
)

"""
Normality criteria and the `certify` aggregate.

Every criterion is measured as a nonnegative deviation that vanishes (up to
roundoff) exactly for normal matrices:

- commutator: ``||T*T - TT*|| / max(||T||^2, 1)``
- departure: Frobenius norm of the strictly lower Schur part, relative to
  ``max(||T||, 1)``
- distance: ``max |(resolvent norm) * dist(z, spectrum) - 1|`` over samples
- point: the same gap at one probe point per distinct eigenvalue
- polynomial: ``max | ||p(T)|| / max|p(lambda)| - 1 |`` over random polynomials

`normality_flag_conditions` maps these names to the callables used by
`certify`.
"""


def commutator_defect(matrix) -> float:
    """
    Scaled commutator ``||T*T - TT*|| / max(||T||^2, 1)``.

    Parameters
    ----------
    matrix : array_like
        Square CMatrix T.

    Returns
    -------
    float
        Zero exactly for normal matrices.
    """
    t = require_square(matrix)
    t_star = t.conj().T
    return spectral_norm(t_star @ t - t @ t_star) / max(spectral_norm(t) ** 2, 1.0)


def distance_formula_gaps(matrix, samples: Sequence[complex], spectrum: Optional[Spectrum] = None) -> np.ndarray:
    """
    Signed gaps ``||(zI - T)^-1|| * dist(z, spectrum) - 1`` at sample points.

    The resolvent norm is at least ``1 / dist``, so the gaps are nonnegative up
    to roundoff, and all of them vanish for normal T. A sample that is clearly
    off the computed spectrum but where ``zI - T`` is numerically singular
    gets an `INFINITE` gap.

    Parameters
    ----------
    matrix : array_like
        Square CMatrix T.
    samples : sequence of complex
        Points off the spectrum.
    spectrum : Spectrum, optional
        Spectrum of T when it was already computed.

    Returns
    -------
    numpy.ndarray
        One real gap per sample.

    Raises
    ------
    RejectedSampleError
        If a sample lies on the spectrum within the on-spectrum cutoff.
    """
    t = require_square(matrix)
    if spectrum is None:
        spectrum = eigenvalues(t)
    norm_t = spectral_norm(t)
    gaps = []
    for z in samples:
        z = complex(z)
        value = resolvent_norm(t, z, norm_t=norm_t)
        distance = dist_to_spectrum(z, spectrum)
        if distance <= on_spectrum_cutoff(norm_t, z):
            raise RejectedSampleError(f"sample z = {z} lies on the spectrum", z=z)
        gaps.append(INFINITE if value == INFINITE else value * distance - 1.0)
    return np.array(gaps, dtype=float)


def distance_formula_deviation(matrix, samples: Sequence[complex], spectrum: Optional[Spectrum] = None) -> float:
    """Largest absolute distance-formula gap; 0 for an empty list of samples."""
    gaps = distance_formula_gaps(matrix, samples, spectrum=spectrum)
    if gaps.size == 0:
        return 0.0
    return float(np.max(np.abs(gaps)))


def default_probe_points(spectrum: Spectrum) -> list:
    """
    One probe point per distinct eigenvalue, strictly closest to it.

    For eigenvalue ``lambda_k`` the probe is ``lambda_k + delta_k * u_k``.
    ``u_k`` points from the centroid of the other eigenvalues towards
    ``lambda_k`` (1 when that is undefined). ``delta_k`` is
    ``min(g_k / 4, 1 + max|lambda|)`` with ``g_k`` the gap to the nearest
    other eigenvalue. A single eigenvalue uses ``g = 1 + |lambda|``, except that
    ``delta = 1`` when ``|lambda| < 1``.

    Parameters
    ----------
    spectrum : Spectrum

    Returns
    -------
    list of complex
        Aligned with ``spectrum.values``.
    """
    values = spectrum.values
    if values.size == 1:
        size = abs(values[0])
        delta = 1.0 if size < 1.0 else (1.0 + size) / 4.0
        return [complex(values[0] + delta)]

    reach = 1.0 + float(np.max(np.abs(values)))
    probes = []
    for k, value in enumerate(values):
        others = np.delete(values, k)
        gap = float(np.min(np.abs(others - value)))
        delta = min(gap / 4.0, reach)
        direction = value - others.mean()
        if abs(direction) > 0:
            direction = direction / abs(direction)
        else:
            direction = 1.0
        probes.append(complex(value + delta * direction))
    return probes


def point_criterion(
    matrix,
    tol_point: Optional[float] = None,
    skip_simple: bool = False,
    spectrum: Optional[Spectrum] = None,
) -> tuple:
    """
    Finite-point criterion: ``||(z_k I - T)^-1|| = |z_k - lambda_k|^-1``.

    Parameters
    ----------
    matrix : array_like
        Square CMatrix T.
    tol_point : float, optional
        Allowed relative gap. Defaults to ``options.point_tol``.
    skip_simple : bool, optional
        If True, leave out the first simple eigenvalue, which suffices for
        normality when one eigenvalue is simple. Default is False.
    spectrum : Spectrum, optional
        Spectrum of T when it was already computed.

    Returns
    -------
    tuple of (list of PointRecord, bool)
        The records and whether all of them passed.
    """
    t = require_square(matrix)
    if tol_point is None:
        tol_point = options.point_tol
    if spectrum is None:
        spectrum = eigenvalues(t)
    norm_t = spectral_norm(t)

    indices = list(range(spectrum.distinct_count))
    if skip_simple and len(indices) > 1:
        simple = np.flatnonzero(spectrum.multiplicities == 1)
        if simple.size:
            indices.remove(int(simple[0]))

    probes = default_probe_points(spectrum)
    records = []
    for k in indices:
        eigenvalue = complex(spectrum.values[k])
        probe = probes[k]
        value = resolvent_norm(t, probe, norm_t=norm_t)
        target = 1.0 / abs(probe - eigenvalue)
        gap = abs(value / target - 1.0)
        records.append(
            PointRecord(
                eigenvalue=eigenvalue,
                probe=probe,
                resolvent_norm=value,
                target=target,
                relative_gap=float(gap),
                passed=bool(gap <= tol_point),
            )
        )
    return records, all(record.passed for record in records)


def two_by_two_criterion(matrix, z: complex, tol_point: Optional[float] = None) -> bool:
    """
    One-point normality test for 2x2 matrices.

    For a 2x2 matrix the distance formula at a single point off the spectrum
    already forces normality.

    Raises
    ------
    DimensionMismatchError
        If T is not 2x2.
    OnSpectrumError
        If z lies on the spectrum.
    """
    t = require_square(matrix)
    if t.shape != (2, 2):
        raise DimensionMismatchError(f"a 2x2 matrix is required, got {t.shape[0]}x{t.shape[1]}")
    if tol_point is None:
        tol_point = options.point_tol
    z = complex(z)
    value = resolvent_norm(t, z)
    distance = dist_to_spectrum(z, eigenvalues(t))
    if value == INFINITE or distance == 0.0:
        raise OnSpectrumError(f"z = {z} lies on the spectrum", z=z)
    return bool(abs(value * distance - 1.0) <= tol_point)


def schur_departure_profile(matrix, decomposition: Optional[SchurDecomposition] = None) -> list:
    """
    Norms ``[||b_1||, ..., ||b_{n-1}||]`` of the subdiagonal Schur columns.

    Parameters
    ----------
    matrix : array_like
        Square CMatrix T.
    decomposition : SchurDecomposition, optional
        A Schur form of T that was already computed.

    Returns
    -------
    list of float
        Empty for 1x1 input. All entries vanish exactly when T is normal, and
        their squares add up to ``||T||_F^2 - sum |lambda_i|^2``.
    """
    t = require_square(matrix)
    if decomposition is None:
        decomposition = schur(t)
    n = decomposition.dimension
    return [
        float(np.linalg.norm(decomposition.subdiagonal_block(k))) for k in range(1, n)
    ]


def departure_from_normality(matrix, decomposition: Optional[SchurDecomposition] = None) -> float:
    """Frobenius departure from normality, ``sqrt(sum ||b_k||^2)``."""
    profile = schur_departure_profile(matrix, decomposition=decomposition)
    return float(np.sqrt(np.sum(np.square(profile)))) if profile else 0.0


def nested_resolvent_norms(lower, z: complex) -> list:
    """
    Resolvent norms of the trailing principal submatrices ``L_1, ..., L_n``.

    For a lower-triangular Schur factor the sequence is nondecreasing.
    """
    lower = require_square(lower, name="L")
    n = lower.shape[0]
    return [resolvent_norm(trailing_block(lower, k), z) for k in range(1, n + 1)]


def block_resolvent(lower, k: int, z: complex) -> np.ndarray:
    """
    Resolvent of ``L_{k+1}`` assembled from blocks.

    ``zI - L_{k+1} = [[z - lambda_{k+1}, 0], [-b_k, zI - L_k]]`` is inverted
    with `linalg_helpers.block_lower_inverse`.

    Parameters
    ----------
    lower : array_like
        Lower-triangular n-by-n matrix L.
    k : int
        Block index, ``1 <= k <= n - 1``.
    z : complex
        Point off the spectrum of ``L_{k+1}``.

    Returns
    -------
    numpy.ndarray
        ``(zI - L_{k+1})^-1`` of size k + 1.
    """
    lower = require_square(lower, name="L")
    z = complex(z)
    b = subdiagonal_block(lower, k)
    head = trailing_block(lower, k + 1)[0, 0]
    tail = trailing_block(lower, k)
    return block_lower_inverse(
        np.array([[z - head]]),
        -b[:, None],
        z * np.eye(k, dtype=np.complex128) - tail,
    )


def column_norm_estimate(lower, k: int, z: complex) -> float:
    """
    Lower bound for ``||(zI - L_{k+1})^-1||`` from its first column.

    Returns ``sqrt(|z - lambda_{k+1}|^-2 + ||(zI - L_k)^-1 b_k / (z - lambda_{k+1})||^2)``.
    """
    lower = require_square(lower, name="L")
    z = complex(z)
    b = subdiagonal_block(lower, k)
    head = trailing_block(lower, k + 1)[0, 0]
    column = resolvent_matrix(trailing_block(lower, k), z) @ b / (z - head)
    return float(np.sqrt(abs(z - head) ** -2 + np.linalg.norm(column) ** 2))


def polynomial_norm_deviation(
    matrix,
    trials: Optional[int] = None,
    seed: Optional[int] = None,
    polynomials: Optional[Sequence[Polynomial]] = None,
    spectrum: Optional[Spectrum] = None,
) -> float:
    """
    Polynomial norm condition ``||p(T)|| = max |p(lambda)|``.

    Parameters
    ----------
    matrix : array_like
        Square CMatrix T.
    trials : int, optional
        Number of random polynomials of degree n - 1 with coefficients on the
        unit disk. Defaults to ``options.polynomial_trials``.
    seed : int, optional
        Defaults to ``options.default_seed``.
    polynomials : sequence of Polynomial, optional
        Test these instead of random ones.
    spectrum : Spectrum, optional
        Spectrum of T when it was already computed.

    Returns
    -------
    float
        ``max | ||p(T)|| / max|p(lambda)| - 1 |``. Polynomials that vanish on the
        spectrum are skipped when ``p(T)`` vanishes too, and give `INFINITE`
        otherwise.
    """
    t = require_square(matrix)
    if spectrum is None:
        spectrum = eigenvalues(t)
    if polynomials is None:
        trials = options.polynomial_trials if trials is None else trials
        if trials < 1:
            raise ValueError(f"trials must be at least 1, got {trials}")
        rng = rng_from_seed(options.default_seed if seed is None else seed)
        degree = t.shape[0] - 1
        polynomials = [random_polynomial(degree, rng) for _ in range(trials)]

    scale = matrix_scale(t)
    deviation = 0.0
    for p in polynomials:
        size = float(np.sum(np.abs(p.coefficients) * scale ** np.arange(p.coefficients.size)))
        on_spectrum = float(np.max(np.abs(p(spectrum.values))))
        value = spectral_norm(poly_eval(p, t))
        if on_spectrum < 1e-12 * size:
            if value <= 1e-10 * size:
                continue
            logging.info(f"p(T) has norm {value:.3e} although p vanishes on the spectrum")
            return INFINITE
        deviation = max(deviation, abs(value / on_spectrum - 1.0))
    return float(deviation)


def certify_samples(spectrum: Spectrum, scale: float, count: int, seed: int) -> list:
    """
    Probe points plus `count` seeded uniform samples from the AUTO region.

    Points closer than ``1e-6 * scale`` to the spectrum are left out; random
    samples are drawn again.
    """
    min_distance = 1e-6 * scale
    samples = [
        z for z in default_probe_points(spectrum) if dist_to_spectrum(z, spectrum) >= min_distance
    ]
    target = len(samples) + count
    region = auto_region(spectrum)
    rng = rng_from_seed(seed)
    while len(samples) < target:
        z = complex(
            rng.uniform(region.x_min, region.x_max),
            rng.uniform(region.y_min, region.y_max),
        )
        if dist_to_spectrum(z, spectrum) >= min_distance:
            samples.append(z)
    return samples


@dataclass
class CertifyState:
    """Inputs shared by the normality flag conditions of one `certify` run."""

    matrix: np.ndarray
    decomposition: SchurDecomposition
    spectrum: Spectrum
    scale: float
    seed: int
    trials: int
    samples: list
    thresholds: Thresholds
    skip_simple: bool = False
    point_records: list = field(default_factory=list)
    profile: list = field(default_factory=list)


def validate_commutator(state: CertifyState) -> float:
    return commutator_defect(state.matrix)


def validate_departure(state: CertifyState) -> float:
    state.profile = schur_departure_profile(state.matrix, decomposition=state.decomposition)
    departure = float(np.sqrt(np.sum(np.square(state.profile)))) if state.profile else 0.0
    return departure / state.scale


def validate_distance_formula(state: CertifyState) -> float:
    return distance_formula_deviation(state.matrix, state.samples, spectrum=state.spectrum)


def validate_point_criterion(state: CertifyState) -> float:
    state.point_records, _ = point_criterion(
        state.matrix,
        tol_point=state.thresholds.point_tol,
        skip_simple=state.skip_simple,
        spectrum=state.spectrum,
    )
    return max((record.relative_gap for record in state.point_records), default=0.0)


def validate_polynomial_norms(state: CertifyState) -> float:
    return polynomial_norm_deviation(
        state.matrix, trials=state.trials, seed=state.seed, spectrum=state.spectrum
    )


normality_flag_conditions = {
    "commutator": validate_commutator,
    "departure": validate_departure,
    "distance": validate_distance_formula,
    "point": validate_point_criterion,
    "polynomial": validate_polynomial_norms,
}


def decide_verdict(criteria: dict, thresholds: Thresholds) -> Verdict:
    """
    Three-way verdict from criterion values.

    NOT_NORMAL as soon as one value exceeds its tolerance times
    ``not_normal_factor``; NORMAL when every value was measured and lies within
    its tolerance; INCONCLUSIVE otherwise. ``None`` marks a criterion that
    could not be evaluated.
    """
    limits = {
        name: thresholds.point_tol if name == "point" else thresholds.normal_tol
        for name in criteria
    }
    if any(
        value is not None and value > limits[name] * thresholds.not_normal_factor
        for name, value in criteria.items()
    ):
        return Verdict.NOT_NORMAL
    if all(value is not None and value <= limits[name] for name, value in criteria.items()):
        return Verdict.NORMAL
    return Verdict.INCONCLUSIVE


def certify(
    matrix,
    thresholds: Optional[Thresholds] = None,
    seed: Optional[int] = None,
    trials: Optional[int] = None,
    samples: Optional[Sequence[complex]] = None,
    skip_simple: bool = False,
) -> NormalityReport:
    """
    Measure every normality criterion and decide a verdict.

    Parameters
    ----------
    matrix : array_like
        Square CMatrix T.
    thresholds : Thresholds, optional
        Defaults to `Thresholds.from_options`.
    seed : int, optional
        Seed of the random polynomials and distance samples. Defaults to
        ``options.default_seed``.
    trials : int, optional
        Number of random polynomials. Defaults to ``options.polynomial_trials``.
    samples : sequence of complex, optional
        Points for the distance formula. Defaults to the probe points plus
        ``options.distance_samples`` seeded points of the AUTO region.
    skip_simple : bool, optional
        Passed on to `point_criterion`.

    Returns
    -------
    NormalityReport
        A failed Schur decomposition gives an INCONCLUSIVE report with the
        error message as `reason`.
    """
    t = require_square(matrix)
    n = t.shape[0]
    thresholds = Thresholds.from_options() if thresholds is None else thresholds
    seed = options.default_seed if seed is None else seed
    trials = options.polynomial_trials if trials is None else trials
    scale = matrix_scale(t)

    try:
        decomposition = schur(t)
        spectrum = eigenvalues(t, decomposition=decomposition)
    except NormcheckError as e:
        logging.error(f"Certifying a {n}x{n} matrix failed: {e}", exc_info=True)
        return NormalityReport(
            dimension=n,
            commutator_defect=commutator_defect(t),
            distance_formula_deviation=INFINITE,
            point_criterion_results=[],
            polynomial_deviation=INFINITE,
            schur_subdiagonal_norms=[],
            departure=INFINITE,
            verdict=Verdict.INCONCLUSIVE,
            thresholds=thresholds,
            seed=seed,
            reason=str(e),
        )

    if samples is None:
        samples = certify_samples(spectrum, scale, options.distance_samples, seed)
    state = CertifyState(
        matrix=t,
        decomposition=decomposition,
        spectrum=spectrum,
        scale=scale,
        seed=seed,
        trials=trials,
        samples=list(samples),
        thresholds=thresholds,
        skip_simple=skip_simple,
    )

    criteria = {}
    reasons = []
    for flag, condition in normality_flag_conditions.items():
        try:
            criteria[flag] = float(condition(state))
        except Exception as e:
            logging.error(f"Error evaluating the {flag} criterion: {e}", exc_info=True)
            criteria[flag] = None
            reasons.append(f"{flag}: {e}")

    verdict = decide_verdict(criteria, thresholds)
    logging.info(f"Certified a {n}x{n} matrix as {verdict.value}: {criteria}")

    def measured(name):
        return INFINITE if criteria[name] is None else criteria[name]

    return NormalityReport(
        dimension=n,
        commutator_defect=measured("commutator"),
        distance_formula_deviation=measured("distance"),
        point_criterion_results=state.point_records,
        polynomial_deviation=measured("polynomial"),
        schur_subdiagonal_norms=state.profile,
        departure=measured("departure"),
        verdict=verdict,
        thresholds=thresholds,
        seed=seed,
        spectrum=spectrum,
        criteria=criteria,
        reason="; ".join(reasons) or None,
    )
