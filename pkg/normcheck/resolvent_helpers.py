import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Optional, Union

import numpy as np
import pandas as pd

from normcheck._config import options
from normcheck.data_model import (
    INFINITE,
    PseudospectrumGrid,
    Region,
    Spectrum,
    require_square,
)
from normcheck.exceptions import OnSpectrumError
from normcheck.linalg_helpers import eigenvalues, singular_values, spectral_norm

"""
Resolvent ``(zI - T)^-1`` and its norm.

Norms are computed as ``1 / sigma_min(zI - T)``. A point counts as on the
spectrum when ``sigma_min`` falls below ``options.on_spectrum_rtol`` times
``max(||T||, |z|, 1)``; its norm is then `INFINITE`.
"""


def on_spectrum_cutoff(norm_t: float, z: complex) -> float:
    return options.on_spectrum_rtol * max(norm_t, abs(z), 1.0)


def shifted(matrix: np.ndarray, z: complex) -> np.ndarray:
    """Return ``zI - T``."""
    return z * np.eye(matrix.shape[0], dtype=np.complex128) - matrix


def resolvent_matrix(matrix, z: complex) -> np.ndarray:
    """
    Resolvent ``(zI - T)^-1``.

    Parameters
    ----------
    matrix : array_like
        Square CMatrix T.
    z : complex
        Evaluation point, off the spectrum.

    Returns
    -------
    numpy.ndarray

    Raises
    ------
    OnSpectrumError
        If ``sigma_min(zI - T)`` is below the on-spectrum cutoff.
    """
    t = require_square(matrix)
    z = complex(z)
    a = shifted(t, z)
    s = singular_values(a)
    norm_t = spectral_norm(t)
    if s[-1] < on_spectrum_cutoff(norm_t, z):
        raise OnSpectrumError(f"z = {z} lies on the spectrum (sigma_min = {s[-1]:.3e})", z=z)
    return np.linalg.solve(a, np.eye(t.shape[0], dtype=np.complex128))


def _resolvent_norm(t: np.ndarray, z: complex, norm_t: float) -> float:
    s_min = singular_values(shifted(t, z))[-1]
    if s_min < on_spectrum_cutoff(norm_t, z):
        return INFINITE
    return float(1.0 / s_min)


def resolvent_norm(matrix, z: complex, norm_t: Optional[float] = None) -> float:
    """
    Spectral norm of the resolvent.

    Parameters
    ----------
    matrix : array_like
        Square CMatrix T.
    z : complex
        Evaluation point.
    norm_t : float, optional
        ``||T||`` when the caller already knows it.

    Returns
    -------
    float
        ``1 / sigma_min(zI - T)``, or `INFINITE` on the spectrum.
    """
    t = require_square(matrix)
    if norm_t is None:
        norm_t = spectral_norm(t)
    return _resolvent_norm(t, complex(z), norm_t)


def dist_to_spectrum(z, spectrum: Spectrum):
    """
    Distance from z to the nearest eigenvalue.

    Works element-wise when `z` is an array.
    """
    z = np.asarray(z, dtype=np.complex128)
    distances = np.abs(z[..., None] - spectrum.values)
    result = distances.min(axis=-1)
    return float(result) if result.ndim == 0 else result


def auto_region(spectrum: Spectrum, padding: Optional[float] = None) -> Region:
    """
    Bounding box of the spectrum padded by ``padding * max(diameter, 1)``.

    Parameters
    ----------
    spectrum : Spectrum
    padding : float, optional
        Defaults to ``options.auto_padding``.
    """
    if padding is None:
        padding = options.auto_padding
    pad = padding * max(spectrum.diameter(), 1.0)
    values = spectrum.values
    return Region(
        float(values.real.min() - pad),
        float(values.real.max() + pad),
        float(values.imag.min() - pad),
        float(values.imag.max() + pad),
    )


def resolve_region(matrix, region: Union[Region, str, None]) -> Region:
    """Turn ``"auto"``/None, a ``"x0,x1,y0,y1"`` string or a Region into a Region."""
    if region is None or (isinstance(region, str) and region.strip().lower() == "auto"):
        return auto_region(eigenvalues(matrix))
    if isinstance(region, str):
        return Region.parse(region)
    if isinstance(region, Region):
        return region
    return Region(*region)


def _grid_column(args) -> np.ndarray:
    t, x, ys, norm_t = args
    return np.array([_resolvent_norm(t, complex(x, y), norm_t) for y in ys])


def pseudospectrum_grid(
    matrix,
    region: Union[Region, str, None] = "auto",
    nx: Optional[int] = None,
    ny: Optional[int] = None,
    multi: bool = False,
    max_workers: int = 2,
) -> PseudospectrumGrid:
    """
    Sample the resolvent norm on a closed uniform lattice.

    Parameters
    ----------
    matrix : array_like
        Square CMatrix T.
    region : Region, str or None, optional
        ``"auto"`` (default) pads the bounding box of the spectrum, see
        `auto_region`; a string is parsed as ``"x0,x1,y0,y1"``.
    nx, ny : int, optional
        Number of nodes per direction (endpoints included). Default to
        ``options.grid_shape``.
    multi : bool, optional
        If True, evaluate grid columns in a process pool. Default is False.
    max_workers : int, optional
        The maximum number of workers to use for multiprocessing. Default is 2.

    Returns
    -------
    PseudospectrumGrid
        ``values[i, j]`` is the resolvent norm at ``xs[i] + 1j * ys[j]``, in the
        same order whether or not a pool was used.
    """
    t = require_square(matrix)
    default_nx, default_ny = options.grid_shape
    nx = default_nx if nx is None else int(nx)
    ny = default_ny if ny is None else int(ny)
    if nx < 2 or ny < 2:
        raise ValueError(f"grids need at least 2x2 nodes, got {nx}x{ny}")
    region = resolve_region(t, region)
    xs = np.linspace(region.x_min, region.x_max, nx)
    ys = np.linspace(region.y_min, region.y_max, ny)
    norm_t = spectral_norm(t)

    logging.info(f"Evaluating a {nx}x{ny} pseudospectrum grid of a {t.shape[0]}x{t.shape[0]} matrix")
    args_list = [(t, x, ys, norm_t) for x in xs]
    if multi:
        with ProcessPoolExecutor(max_workers=max_workers) as executor:
            columns = list(executor.map(_grid_column, args_list))
    else:
        columns = [_grid_column(args) for args in args_list]

    return PseudospectrumGrid(region=region, nx=nx, ny=ny, values=np.vstack(columns))


def epsilon_level_mask(grid: PseudospectrumGrid, eps: float) -> np.ndarray:
    """
    Nodes inside the eps-pseudospectrum, ``||(zI - T)^-1|| > 1 / eps``.

    `INFINITE` nodes are always inside.
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    return grid.values > 1.0 / eps


def grid_to_frame(grid: PseudospectrumGrid) -> pd.DataFrame:
    """
    Flatten a grid to one row per node.

    Parameters
    ----------
    grid : PseudospectrumGrid

    Returns
    -------
    pd.DataFrame
        Columns ``re``, ``im`` and ``resnorm``; rows run over ``xs`` in the outer
        loop and ``ys`` in the inner loop, ``nx * ny`` rows in total.
    """
    nodes = grid.nodes().reshape(-1)
    return pd.DataFrame(
        {
            "re": nodes.real,
            "im": nodes.imag,
            "resnorm": grid.values.reshape(-1),
        }
    )
