import os
from collections import namedtuple

Option = namedtuple("Option", "key default_value doc validator callback")


class Options:
    """Provide attribute-style access to configuration dict."""

    def __init__(self, options):
        super().__setattr__("_options", options)
        # populate with default values
        config = {}
        for key, option in options.items():
            config[key] = option.default_value

        super().__setattr__("_config", config)

    def __setattr__(self, key, value):
        # you can't set new keys
        if key not in self._config:
            msg = f"You can only set the value of existing options, \
                {key} is not an option"
            raise AttributeError(msg)

        option = self._options[key]
        if option.validator is not None and not option.validator(value):
            raise ValueError(f"Invalid value for option {key}: {value!r}")
        self._config[key] = value
        if option.callback is not None:
            option.callback(value)

    def __getattr__(self, key):
        # You get a clearer error message when you try
        # to get a non-existing option.
        try:
            return self._config[key]
        except KeyError:
            raise AttributeError(f"No such option: {key}") from KeyError

    def __dir__(self):
        # see list of all available options
        return list(self._config.keys())

    def describe(self, key):
        """Return the documentation string of an option."""
        try:
            return self._options[key].doc
        except KeyError:
            raise AttributeError(f"No such option: {key}") from KeyError

    def reset(self):
        """Restore every option to its default value."""
        for key, option in self._options.items():
            self._config[key] = option.default_value


def _positive(value):
    return isinstance(value, (int, float)) and value > 0


def _nonnegative(value):
    return isinstance(value, (int, float)) and value >= 0


def _positive_int(value):
    return isinstance(value, int) and value >= 1


def _grid_shape(value):
    return (
        isinstance(value, tuple)
        and len(value) == 2
        and all(isinstance(v, int) and v >= 2 for v in value)
    )


def _seed_from_environment(default=42):
    raw = os.environ.get("NORMCHECK_SEED")
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        return default


# Define allowed Options
_option_list = [
    Option(
        key="cluster_tol",
        default_value=1e-8,
        doc=(
            "Relative tolerance (scaled by max(||T||, 1)) below which "
            "computed eigenvalues are merged into one representative."
        ),
        validator=_nonnegative,
        callback=None,
    ),
    Option(
        key="on_spectrum_rtol",
        default_value=1e-14,
        doc=(
            "A point z counts as on the spectrum when the smallest singular "
            "value of zI - T drops below this times max(||T||, |z|, 1)."
        ),
        validator=_positive,
        callback=None,
    ),
    Option(
        key="singular_block_rtol",
        default_value=1e-14,
        doc="Relative smallest-singular-value cutoff for diagonal blocks in block inversion.",
        validator=_positive,
        callback=None,
    ),
    Option(
        key="normal_tol",
        default_value=1e-8,
        doc="Every criterion at or below this value is needed for a NORMAL verdict.",
        validator=_positive,
        callback=None,
    ),
    Option(
        key="not_normal_factor",
        default_value=10.0,
        doc="A criterion above normal_tol times this factor yields NOT_NORMAL.",
        validator=lambda v: _positive(v) and v >= 1,
        callback=None,
    ),
    Option(
        key="point_tol",
        default_value=1e-8,
        doc="Tolerance on the relative gap of the finite-point and 2x2 criteria.",
        validator=_positive,
        callback=None,
    ),
    Option(
        key="polynomial_trials",
        default_value=32,
        doc="Number of seeded random polynomials in polynomial-norm tests.",
        validator=_positive_int,
        callback=None,
    ),
    Option(
        key="distance_samples",
        default_value=64,
        doc="Number of seeded sample points used by certify for the distance formula.",
        validator=_positive_int,
        callback=None,
    ),
    Option(
        key="default_seed",
        default_value=_seed_from_environment(),
        doc=(
            "Seed used when none is given. Taken from the NORMCHECK_SEED "
            "environment variable at import when set, 42 otherwise."
        ),
        validator=lambda v: isinstance(v, int),
        callback=None,
    ),
    Option(
        key="auto_padding",
        default_value=0.5,
        doc="AUTO regions pad the spectrum bounding box by this times max(diameter, 1).",
        validator=_positive,
        callback=None,
    ),
    Option(
        key="grid_shape",
        default_value=(101, 101),
        doc="Default (nx, ny) of pseudospectrum grids.",
        validator=_grid_shape,
        callback=None,
    ),
    Option(
        key="compare_grid_shape",
        default_value=(41, 41),
        doc="Default (nx, ny) of the grids used to compare pseudospectra.",
        validator=_grid_shape,
        callback=None,
    ),
    Option(
        key="enclosure_margin",
        default_value=1e-6,
        doc="Eigenvalues must lie inside a quadrature contour by this fraction of its radius.",
        validator=_positive,
        callback=None,
    ),
    Option(
        key="quadrature_check_tol",
        default_value=1e-6,
        doc="Contour quadrature residuals above this (relative) are flagged.",
        validator=_positive,
        callback=None,
    ),
]

# Set the option with default values
options = Options({option.key: option for option in _option_list})
