import json
import logging
import math
import os
import sys
from enum import Enum

import numpy as np
import scipy.io

from normcheck.data_model import (
    PseudospectrumGrid,
    as_cmatrix,
    matrix_from_document,
    matrix_to_document,
)
from normcheck.exceptions import MatrixFileError
from normcheck.resolvent_helpers import grid_to_frame

"""
Reading and writing matrices, grids and reports.

Matrices are stored as JSON documents ``{"rows", "cols", "data"}`` or as
Matrix Market ``array complex general`` files. Grids are written as CSV
(``re,im,resnorm``, 17 significant digits, ``inf`` on the spectrum) or, for
a ``.parquet`` suffix, as parquet through pyarrow. Every writer produces
byte-identical output for identical input.
"""

MATRIX_MARKET_HEADER = "%%MatrixMarket"
MATRIX_MARKET_SUFFIXES = (".mtx", ".mm")


def _is_matrix_market(path: str) -> bool:
    if path.lower().endswith(MATRIX_MARKET_SUFFIXES):
        return True
    if path.lower().endswith(".json"):
        return False
    with open(path, encoding="utf-8") as f:
        return f.readline().startswith(MATRIX_MARKET_HEADER)


def read_matrix(path: str) -> np.ndarray:
    """
    Read a CMatrix from a JSON or Matrix Market file.

    Parameters
    ----------
    path : str
        File path. The format follows the suffix (``.json``, ``.mtx``/``.mm``)
        or, for other suffixes, the ``%%MatrixMarket`` header line.

    Returns
    -------
    numpy.ndarray

    Raises
    ------
    MatrixFileError
        If the file is missing or does not hold a valid matrix.
    """
    if not os.path.exists(path):
        raise MatrixFileError(f"matrix file {path} does not exist")
    try:
        if _is_matrix_market(path):
            matrix = scipy.io.mmread(path)
            if hasattr(matrix, "toarray"):
                matrix = matrix.toarray()
            return as_cmatrix(matrix)
        with open(path, encoding="utf-8") as f:
            document = json.load(f)
        return matrix_from_document(document)
    except (ValueError, TypeError, OSError) as e:
        logging.error(f"Reading matrix file {path} failed: {e}")
        raise MatrixFileError(f"cannot parse matrix file {path}: {e}") from e


def write_matrix(matrix, path: str) -> None:
    """
    Write a CMatrix; Matrix Market for ``.mtx``/``.mm`` paths, JSON otherwise.
    """
    array = as_cmatrix(matrix)
    if path.lower().endswith(MATRIX_MARKET_SUFFIXES):
        scipy.io.mmwrite(path, array, field="complex", symmetry="general", precision=17)
        return
    write_json(matrix_to_document(array), path)


def save_grid(grid: PseudospectrumGrid, path: str) -> None:
    """
    Save a pseudospectrum grid, one row per node.

    Parameters
    ----------
    grid : PseudospectrumGrid
    path : str
        CSV file, or parquet when the path ends in ``.parquet``; ``"-"``
        writes CSV to stdout.
    """
    df = grid_to_frame(grid)
    if path == "-":
        df.to_csv(sys.stdout, index=False, float_format="%.17g", lineterminator="\n")
        return
    if path.lower().endswith(".parquet"):
        df.to_parquet(path, engine="pyarrow", index=False)
        return
    df.to_csv(path, index=False, float_format="%.17g", lineterminator="\n", encoding="utf-8")


def to_jsonable(value):
    """
    Recursively convert reports to plain JSON values.

    Non-finite floats become the strings ``"inf"``, ``"-inf"`` and ``"nan"``,
    numpy scalars and arrays become Python numbers and lists, complex numbers
    become ``[re, im]`` pairs and enums their value.
    """
    if hasattr(value, "to_dict") and not isinstance(value, dict):
        return to_jsonable(value.to_dict())
    if isinstance(value, Enum):
        return to_jsonable(value.value)
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [to_jsonable(value.real), to_jsonable(value.imag)]
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return value


def write_json(obj, path: str = "-") -> None:
    """
    Write `obj` as JSON with sorted keys and two-space indentation.

    Parameters
    ----------
    obj : object
        A dict, list or anything with a ``to_dict`` method.
    path : str, optional
        Output file; ``"-"`` (default) writes to stdout.
    """
    text = json.dumps(to_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
