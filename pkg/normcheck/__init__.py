__version__ = "0.1.0"

from normcheck._config import options
from normcheck.data_model import (
    INFINITE,
    Polynomial,
    PseudospectrumGrid,
    Region,
    Spectrum,
    Thresholds,
    Verdict,
)
from normcheck.equivalence_validators import (
    char_poly,
    norm_behavior_equal,
    pseudospectra_equal,
    unitary_similarity,
)
from normcheck.linalg_helpers import eigenvalues, schur, spectral_norm, svd
from normcheck.normality_validators import certify
from normcheck.resolvent_helpers import pseudospectrum_grid, resolvent_norm

from . import (
    _config,
    data_model,
    equivalence_validators,
    exceptions,
    io_helpers,
    linalg_helpers,
    matfunc_helpers,
    normality_validators,
    resolvent_helpers,
)

# Explicitly export modules and functions
__all__ = [
    # Modules
    "_config",
    "data_model",
    "equivalence_validators",
    "exceptions",
    "io_helpers",
    "linalg_helpers",
    "matfunc_helpers",
    "normality_validators",
    "resolvent_helpers",
    # Specific imports from normcheck
    "INFINITE",
    "Polynomial",
    "PseudospectrumGrid",
    "Region",
    "Spectrum",
    "Thresholds",
    "Verdict",
    "certify",
    "char_poly",
    "eigenvalues",
    "norm_behavior_equal",
    "options",
    "pseudospectra_equal",
    "pseudospectrum_grid",
    "resolvent_norm",
    "schur",
    "spectral_norm",
    "svd",
    "unitary_similarity",
]
