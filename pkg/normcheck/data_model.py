import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
from numpy.polynomial import polynomial as npp

from normcheck._config import options
from normcheck.exceptions import NonSquareError

"""
Data types shared by all normcheck modules.

A CMatrix is a two-dimensional ``numpy.ndarray`` of dtype complex128 with at
least one row and one column and only finite entries; `as_cmatrix` is the
single entry point that enforces this. An extended norm is a plain float where
``math.inf`` (exported as `INFINITE`) marks an evaluation point on the
spectrum.
"""

INFINITE = math.inf


def as_cmatrix(matrix, name: str = "matrix") -> np.ndarray:
    """
    Convert input to a CMatrix and check its invariants.

    Parameters
    ----------
    matrix : array_like
        Anything ``numpy.asarray`` understands; scalars and vectors are rejected.
    name : str, optional
        Name used in error messages.

    Returns
    -------
    numpy.ndarray
        A complex128 array with ``ndim == 2``.

    Raises
    ------
    ValueError
        If the input is not two-dimensional, is empty or has non-finite entries.
    """
    array = np.array(matrix, dtype=np.complex128)
    if array.ndim != 2:
        raise ValueError(f"{name} must be two-dimensional, got {array.ndim} dimension(s)")
    if array.shape[0] < 1 or array.shape[1] < 1:
        raise ValueError(f"{name} must have at least one row and one column")
    if not np.all(np.isfinite(array)):
        raise ValueError(f"{name} has non-finite entries")
    return array


def require_square(matrix, name: str = "matrix") -> np.ndarray:
    """Return `matrix` as a CMatrix, raising `NonSquareError` unless it is square."""
    array = as_cmatrix(matrix, name=name)
    if array.shape[0] != array.shape[1]:
        raise NonSquareError(f"{name} must be square, got {array.shape[0]}x{array.shape[1]}")
    return array


def matrix_to_document(matrix) -> dict:
    """
    Convert a CMatrix to the MatrixFile JSON layout.

    Returns
    -------
    dict
        ``{"rows": n, "cols": m, "data": [[re, im], ...]}`` in row-major order.
    """
    array = as_cmatrix(matrix)
    rows, cols = array.shape
    data = [[float(v.real), float(v.imag)] for v in array.reshape(-1)]
    return {"rows": rows, "cols": cols, "data": data}


def matrix_from_document(document: dict) -> np.ndarray:
    """Inverse of `matrix_to_document`; raises ``ValueError`` on malformed input."""
    try:
        rows = int(document["rows"])
        cols = int(document["cols"])
        data = document["data"]
    except (KeyError, TypeError) as e:
        raise ValueError(f"matrix document needs 'rows', 'cols' and 'data': {e!s}") from e
    if len(data) != rows * cols:
        raise ValueError(
            f"matrix document has {len(data)} entries, expected rows*cols = {rows * cols}"
        )
    entries = []
    for item in data:
        if isinstance(item, (list, tuple)) and len(item) == 2:
            entries.append(complex(float(item[0]), float(item[1])))
        elif isinstance(item, (int, float)):
            entries.append(complex(float(item), 0.0))
        else:
            raise ValueError(f"matrix entry {item!r} is not [re, im]")
    if rows < 1 or cols < 1:
        raise ValueError("matrix document must have at least one row and one column")
    return as_cmatrix(np.array(entries, dtype=np.complex128).reshape(rows, cols))


def complex_to_pair(value: complex) -> list:
    value = complex(value)
    return [value.real, value.imag]


@dataclass(frozen=True, eq=False)
class Spectrum:
    """
    Distinct eigenvalues with algebraic multiplicities.

    Attributes
    ----------
    values : numpy.ndarray
        Distinct representatives, sorted by real part and then imaginary part.
    multiplicities : numpy.ndarray
        Positive integers, aligned with `values`.
    cluster_tol : float
        Tolerance that was used to merge numerically coincident eigenvalues.
    """

    values: np.ndarray
    multiplicities: np.ndarray
    cluster_tol: float = 0.0

    def __post_init__(self):
        values = np.atleast_1d(np.asarray(self.values, dtype=np.complex128))
        multiplicities = np.atleast_1d(np.asarray(self.multiplicities, dtype=np.int64))
        if values.size == 0:
            raise ValueError("a spectrum needs at least one eigenvalue")
        if values.shape != multiplicities.shape:
            raise ValueError("values and multiplicities must have the same length")
        if np.any(multiplicities < 1):
            raise ValueError("multiplicities must be positive integers")
        if self.cluster_tol < 0:
            raise ValueError("cluster_tol must be nonnegative")
        order = np.lexsort((values.imag, values.real))
        object.__setattr__(self, "values", values[order])
        object.__setattr__(self, "multiplicities", multiplicities[order])

    @classmethod
    def from_mapping(cls, mapping: dict, cluster_tol: float = 0.0) -> "Spectrum":
        """Build a spectrum from ``{eigenvalue: multiplicity}``."""
        values = list(mapping.keys())
        return cls(
            values=np.array(values, dtype=np.complex128),
            multiplicities=np.array([mapping[v] for v in values], dtype=np.int64),
            cluster_tol=cluster_tol,
        )

    @property
    def dimension(self) -> int:
        return int(self.multiplicities.sum())

    @property
    def distinct_count(self) -> int:
        return int(self.values.size)

    def expanded(self) -> np.ndarray:
        """Eigenvalues repeated according to multiplicity."""
        return np.repeat(self.values, self.multiplicities)

    def diameter(self) -> float:
        if self.values.size < 2:
            return 0.0
        return float(np.max(np.abs(self.values[:, None] - self.values[None, :])))

    def to_dict(self) -> list:
        return [
            {"eigenvalue": complex_to_pair(v), "multiplicity": int(m)}
            for v, m in zip(self.values, self.multiplicities)
        ]


@dataclass(frozen=True, eq=False)
class SchurDecomposition:
    """
    Lower-triangular Schur form ``T = U L U*``.

    The diagonal of L is labelled lambda_n, ..., lambda_1 from top to bottom;
    ``L_k`` is the trailing k-by-k principal submatrix and ``b_k`` the part of
    the column of lambda_{k+1} that lies below the diagonal.
    """

    unitary_factor: np.ndarray
    lower_factor: np.ndarray
    residual_reconstruction: float
    residual_unitarity: float

    @property
    def dimension(self) -> int:
        return int(self.lower_factor.shape[0])

    @property
    def diagonal(self) -> np.ndarray:
        return np.diag(self.lower_factor).copy()

    def trailing_block(self, k: int) -> np.ndarray:
        """Return L_k."""
        return trailing_block(self.lower_factor, k)

    def subdiagonal_block(self, k: int) -> np.ndarray:
        """Return b_k, so that ``L_{k+1} = [[lambda_{k+1}, 0], [b_k, L_k]]``."""
        return subdiagonal_block(self.lower_factor, k)


def trailing_block(lower: np.ndarray, k: int) -> np.ndarray:
    n = lower.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"block index k must be within 1..{n}, got {k}")
    return lower[n - k:, n - k:]


def subdiagonal_block(lower: np.ndarray, k: int) -> np.ndarray:
    n = lower.shape[0]
    if not 1 <= k <= n - 1:
        raise ValueError(f"block index k must be within 1..{n - 1}, got {k}")
    column = n - k - 1
    return lower[column + 1:, column]


@dataclass(frozen=True, eq=False)
class Polynomial:
    """
    Polynomial with complex coefficients ``c_0 + c_1 z + ... + c_m z^m``.

    Trailing zero coefficients are dropped on construction; the zero
    polynomial is stored as ``[0]``.
    """

    coefficients: np.ndarray

    def __post_init__(self):
        coefficients = np.atleast_1d(np.asarray(self.coefficients, dtype=np.complex128))
        if coefficients.ndim != 1 or coefficients.size == 0:
            raise ValueError("coefficients must be a non-empty sequence")
        if not np.all(np.isfinite(coefficients)):
            raise ValueError("coefficients must be finite")
        nonzero = np.flatnonzero(coefficients)
        if nonzero.size == 0:
            coefficients = np.zeros(1, dtype=np.complex128)
        else:
            coefficients = coefficients[: nonzero[-1] + 1]
        object.__setattr__(self, "coefficients", coefficients)

    @classmethod
    def constant(cls, value: complex) -> "Polynomial":
        return cls(np.array([value], dtype=np.complex128))

    @classmethod
    def monomial(cls, degree: int, coefficient: complex = 1.0) -> "Polynomial":
        coefficients = np.zeros(degree + 1, dtype=np.complex128)
        coefficients[degree] = coefficient
        return cls(coefficients)

    @classmethod
    def from_roots(cls, roots) -> "Polynomial":
        """Monic polynomial with the given roots (repeated roots allowed)."""
        roots = np.asarray(roots, dtype=np.complex128)
        if roots.size == 0:
            return cls.constant(1.0)
        return cls(npp.polyfromroots(roots))

    @property
    def degree(self) -> int:
        return int(self.coefficients.size - 1)

    def is_zero(self) -> bool:
        return self.coefficients.size == 1 and self.coefficients[0] == 0

    def __call__(self, x):
        return npp.polyval(np.asarray(x, dtype=np.complex128), self.coefficients)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(npp.polymul(self.coefficients, other.coefficients))

    def __add__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(npp.polyadd(self.coefficients, other.coefficients))

    def to_dict(self) -> list:
        return [complex_to_pair(c) for c in self.coefficients]


@dataclass(frozen=True)
class Region:
    """Closed rectangle ``[x_min, x_max] x [y_min, y_max]`` of the complex plane."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        bounds = (self.x_min, self.x_max, self.y_min, self.y_max)
        if not all(math.isfinite(b) for b in bounds):
            raise ValueError("region bounds must be finite")
        if not self.x_min < self.x_max:
            raise ValueError(f"x_min ({self.x_min}) must be smaller than x_max ({self.x_max})")
        if not self.y_min < self.y_max:
            raise ValueError(f"y_min ({self.y_min}) must be smaller than y_max ({self.y_max})")

    @classmethod
    def parse(cls, text: str) -> "Region":
        """Parse ``"x0,x1,y0,y1"``."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError(f"region must look like 'x0,x1,y0,y1', got {text!r}")
        try:
            x0, x1, y0, y1 = (float(p) for p in parts)
        except ValueError as e:
            raise ValueError(f"region must look like 'x0,x1,y0,y1', got {text!r}") from e
        return cls(x0, x1, y0, y1)

    def union(self, other: "Region") -> "Region":
        return Region(
            min(self.x_min, other.x_min),
            max(self.x_max, other.x_max),
            min(self.y_min, other.y_min),
            max(self.y_max, other.y_max),
        )

    def to_dict(self) -> dict:
        return {"x_min": self.x_min, "x_max": self.x_max, "y_min": self.y_min, "y_max": self.y_max}


@dataclass(frozen=True, eq=False)
class PseudospectrumGrid:
    """
    Resolvent norms on the closed uniform lattice of a region.

    ``values[i, j]`` belongs to the node ``xs[i] + 1j * ys[j]``; on-spectrum
    nodes hold `INFINITE`.
    """

    region: Region
    nx: int
    ny: int
    values: np.ndarray

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise ValueError("grids need at least two nodes per direction")
        if self.values.shape != (self.nx, self.ny):
            raise ValueError(
                f"values have shape {self.values.shape}, expected {(self.nx, self.ny)}"
            )
        if np.any(np.isnan(self.values)):
            raise ValueError("grid values must be fully populated")

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.region.x_min, self.region.x_max, self.nx)

    @property
    def ys(self) -> np.ndarray:
        return np.linspace(self.region.y_min, self.region.y_max, self.ny)

    def nodes(self) -> np.ndarray:
        return self.xs[:, None] + 1j * self.ys[None, :]


class Verdict(str, Enum):
    NORMAL = "NORMAL"
    NOT_NORMAL = "NOT_NORMAL"
    INCONCLUSIVE = "INCONCLUSIVE"

    @property
    def exit_code(self) -> int:
        return {"NORMAL": 0, "NOT_NORMAL": 1, "INCONCLUSIVE": 2}[self.value]


@dataclass(frozen=True)
class Thresholds:
    """Tolerance band used by `normality_validators.certify`."""

    normal_tol: float = 1e-8
    not_normal_factor: float = 10.0
    point_tol: float = 1e-8

    def __post_init__(self):
        if self.normal_tol <= 0 or self.point_tol <= 0:
            raise ValueError("thresholds must be positive")
        if self.not_normal_factor < 1:
            raise ValueError("not_normal_factor must be at least 1")

    @classmethod
    def from_options(cls, normal_tol: Optional[float] = None) -> "Thresholds":
        return cls(
            normal_tol=options.normal_tol if normal_tol is None else normal_tol,
            not_normal_factor=options.not_normal_factor,
            point_tol=options.point_tol,
        )

    @property
    def not_normal_tol(self) -> float:
        return self.normal_tol * self.not_normal_factor

    def to_dict(self) -> dict:
        return {
            "normal_tol": self.normal_tol,
            "not_normal_tol": self.not_normal_tol,
            "not_normal_factor": self.not_normal_factor,
            "point_tol": self.point_tol,
        }


@dataclass(frozen=True)
class PointRecord:
    """One probe of the finite-point criterion."""

    eigenvalue: complex
    probe: complex
    resolvent_norm: float
    target: float
    relative_gap: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "eigenvalue": complex_to_pair(self.eigenvalue),
            "probe": complex_to_pair(self.probe),
            "resolvent_norm": self.resolvent_norm,
            "target": self.target,
            "relative_gap": self.relative_gap,
            "passed": self.passed,
        }


@dataclass
class NormalityReport:
    """Measurements of every normality criterion together with the verdict."""

    dimension: int
    commutator_defect: float
    distance_formula_deviation: float
    point_criterion_results: list
    polynomial_deviation: float
    schur_subdiagonal_norms: list
    departure: float
    verdict: Verdict
    thresholds: Thresholds
    seed: int
    spectrum: Optional[Spectrum] = None
    criteria: dict = field(default_factory=dict)
    reason: Optional[str] = None

    @property
    def point_criterion_passed(self) -> bool:
        return all(record.passed for record in self.point_criterion_results)

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "commutator_defect": self.commutator_defect,
            "distance_formula_deviation": self.distance_formula_deviation,
            "point_criterion_results": [r.to_dict() for r in self.point_criterion_results],
            "point_criterion_passed": self.point_criterion_passed,
            "polynomial_deviation": self.polynomial_deviation,
            "schur_subdiagonal_norms": list(self.schur_subdiagonal_norms),
            "departure": self.departure,
            "criteria": dict(self.criteria),
            "verdict": self.verdict.value,
            "thresholds": self.thresholds.to_dict(),
            "seed": self.seed,
            "spectrum": None if self.spectrum is None else self.spectrum.to_dict(),
            "reason": self.reason,
        }


class ComparisonMode(str, Enum):
    PSEUDOSPECTRA = "PSEUDOSPECTRA"
    NORM_BEHAVIOR = "NORM_BEHAVIOR"
    UNITARY_SIMILARITY = "UNITARY_SIMILARITY"


@dataclass
class ComparisonReport:
    """
    Outcome of a pairwise comparison.

    `details` is a pandas DataFrame with one row per sample (grid node or
    polynomial trial). A `witness` is only present for a verified unitary
    similarity.
    """

    mode: ComparisonMode
    max_deviation: float
    decision: bool
    tol: float
    details: object = None
    witness: Optional[np.ndarray] = None
    reason: Optional[str] = None
    inconclusive: bool = False
    residuals: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.witness is not None and (
            self.mode is not ComparisonMode.UNITARY_SIMILARITY or not self.decision
        ):
            raise ValueError("a witness requires a positive unitary-similarity decision")

    def to_dict(self) -> dict:
        details = []
        if self.details is not None:
            details = self.details.to_dict(orient="records")
        return {
            "mode": self.mode.value,
            "max_deviation": self.max_deviation,
            "decision": self.decision,
            "tol": self.tol,
            "inconclusive": self.inconclusive,
            "reason": self.reason,
            "residuals": dict(self.residuals),
            "witness": None if self.witness is None else matrix_to_document(self.witness),
            "details": details,
        }
