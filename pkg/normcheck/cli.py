import argparse
import logging
import sys
from typing import Optional, Sequence

import numpy as np

from normcheck import __version__
from normcheck._config import options
from normcheck.data_model import Thresholds, require_square
from normcheck.equivalence_validators import (
    norm_behavior_equal,
    pseudospectra_equal,
    unitary_similarity,
)
from normcheck.exceptions import (
    DimensionMismatchError,
    HypothesisViolationError,
    MatrixFileError,
    NonSquareError,
    NormcheckError,
)
from normcheck.io_helpers import read_matrix, save_grid, write_json, write_matrix
from normcheck.linalg_helpers import (
    cluster_eigenvalues,
    jordan_block,
    random_matrix,
    random_normal_matrix,
    random_unitary,
    rng_from_seed,
)
from normcheck.normality_validators import certify
from normcheck.resolvent_helpers import pseudospectrum_grid

"""
Command-line interface: ``normcheck analyze|pseudospec|compare|gen``.

Exit codes: ``analyze`` returns 0/1/2 for NORMAL/NOT_NORMAL/INCONCLUSIVE and
``compare`` returns 0 when the matrices are equivalent, 1 when they are not
and 2 when the answer is inconclusive. Usage errors, unreadable or
non-square matrices exit with 64; a non-normal A in unitary mode exits
with 65. A file that cannot be written exits with 74 and any other failure
of a computation with 70.
"""

EXIT_USAGE = 64
EXIT_HYPOTHESIS = 65
EXIT_FAILURE = 70
EXIT_IO = 74


class UsageError(Exception):
    """Invalid command-line arguments."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad arguments, which is taken by INCONCLUSIVE
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def parse_grid(text: str) -> tuple:
    """Parse ``"NXxNY"`` into ``(nx, ny)``."""
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise UsageError(f"grid must look like '101x101', got {text!r}")
    try:
        nx, ny = int(parts[0]), int(parts[1])
    except ValueError as e:
        raise UsageError(f"grid must look like '101x101', got {text!r}") from e
    if nx < 2 or ny < 2:
        raise UsageError(f"grid needs at least 2 nodes per direction, got {text!r}")
    return nx, ny


def parse_spectrum(text: str, n: int) -> list:
    """
    Parse ``"l1,l2,..."`` into n eigenvalues.

    Entries use Python complex syntax, with ``i`` accepted for ``j``. A short
    list is padded by repeating its last value.
    """
    try:
        values = [complex(item.strip().replace("i", "j")) for item in text.split(",") if item.strip()]
    except ValueError as e:
        raise UsageError(f"cannot parse spectrum {text!r}: {e}") from e
    if not values:
        raise UsageError("spectrum must not be empty")
    if not np.all(np.isfinite(values)):
        raise UsageError(f"spectrum must be finite, got {text!r}")
    if len(values) > n:
        raise UsageError(f"spectrum has {len(values)} values but n is {n}")
    return values + [values[-1]] * (n - len(values))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="normcheck", description="Resolvent norms, pseudospectra and normality checks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    analyze = subparsers.add_parser("analyze", help="certify normality of a matrix")
    analyze.add_argument("--in", dest="in_path", required=True, help="matrix file (JSON or Matrix Market)")
    analyze.add_argument("--tol", type=float, default=1e-8, help="tolerance of the NORMAL verdict, used for every criterion including the point criterion")
    analyze.add_argument("--seed", type=int, default=None, help="seed of the sampled criteria")
    analyze.add_argument("--out", default="-", help="report path, '-' for stdout")

    pseudospec = subparsers.add_parser("pseudospec", help="emit a resolvent-norm grid")
    pseudospec.add_argument("--in", dest="in_path", required=True, help="matrix file")
    pseudospec.add_argument("--region", default="auto", help="'auto' or 'x0,x1,y0,y1'")
    pseudospec.add_argument("--grid", default="101x101", help="grid size NXxNY")
    pseudospec.add_argument("--out", default="-", help="CSV or .parquet path, '-' for stdout")

    compare = subparsers.add_parser("compare", help="compare two matrices")
    compare.add_argument("--a", dest="a_path", required=True, help="matrix file A")
    compare.add_argument("--b", dest="b_path", required=True, help="matrix file B")
    compare.add_argument(
        "--mode", required=True, choices=["pseudospectra", "normbehavior", "unitary"]
    )
    compare.add_argument("--degree", type=int, default=None, help="polynomial degree (normbehavior)")
    compare.add_argument("--trials", type=int, default=32, help="random polynomials (normbehavior)")
    compare.add_argument("--seed", type=int, default=None)
    compare.add_argument("--tol", type=float, default=1e-8)
    compare.add_argument("--out", default="-", help="report path, '-' for stdout")

    gen = subparsers.add_parser("gen", help="generate a test matrix")
    gen.add_argument("--kind", required=True, choices=["normal", "jordan", "random", "unitary"])
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--spectrum", default=None, help="eigenvalues 'l1,l2,...'")
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("--out", default="-", help="matrix path (.json or .mtx), '-' for stdout")
    return parser


def _seed(args) -> int:
    return options.default_seed if args.seed is None else args.seed


def cmd_analyze(args) -> int:
    matrix = require_square(read_matrix(args.in_path))
    seed = _seed(args)
    if not args.tol > 0:
        raise UsageError(f"--tol must be positive, got {args.tol}")
    thresholds = Thresholds(
        normal_tol=args.tol,
        not_normal_factor=options.not_normal_factor,
        point_tol=args.tol,
    )
    report = certify(matrix, thresholds=thresholds, seed=seed)
    document = report.to_dict()
    document["version"] = __version__
    write_json(document, args.out)
    return report.verdict.exit_code


def cmd_pseudospec(args) -> int:
    matrix = require_square(read_matrix(args.in_path))
    nx, ny = parse_grid(args.grid)
    try:
        grid = pseudospectrum_grid(matrix, region=args.region, nx=nx, ny=ny)
    except ValueError as e:
        if isinstance(e, NonSquareError):
            raise
        raise UsageError(f"invalid region {args.region!r}: {e}") from e
    save_grid(grid, args.out)
    return 0


def cmd_compare(args) -> int:
    a = require_square(read_matrix(args.a_path), name="matrix A")
    b = require_square(read_matrix(args.b_path), name="matrix B")
    seed = _seed(args)
    if args.mode == "pseudospectra":
        report = pseudospectra_equal(a, b, tol=args.tol)
    elif args.mode == "normbehavior":
        if args.degree is not None and args.degree < 1:
            raise UsageError(f"--degree must be at least 1, got {args.degree}")
        if args.trials < 1:
            raise UsageError(f"--trials must be at least 1, got {args.trials}")
        report = norm_behavior_equal(
            a, b, degree=args.degree, trials=args.trials, seed=seed, tol=args.tol
        )
    else:
        report = unitary_similarity(a, b, tol=args.tol, seed=seed)
    document = report.to_dict()
    document["version"] = __version__
    write_json(document, args.out)
    if report.inconclusive:
        return 2
    return 0 if report.decision else 1


def cmd_gen(args) -> int:
    n = args.n
    if n < 1:
        raise UsageError(f"--n must be at least 1, got {n}")
    seed = _seed(args)
    values = parse_spectrum(args.spectrum, n) if args.spectrum else None
    if args.kind == "jordan":
        matrix = jordan_block(n, values[0] if values else 0.0)
    elif args.kind == "random":
        matrix = random_matrix(n, seed)
    elif args.kind == "unitary":
        matrix = random_unitary(n, seed)
    else:
        if values is None:
            rng = rng_from_seed(seed)
            values = list(rng.standard_normal(n) + 1j * rng.standard_normal(n))
        spectrum = cluster_eigenvalues(np.array(values, dtype=np.complex128), 0.0)
        matrix = random_normal_matrix(spectrum, seed)
    write_matrix(matrix, args.out)
    return 0


COMMANDS = {
    "analyze": cmd_analyze,
    "pseudospec": cmd_pseudospec,
    "compare": cmd_compare,
    "gen": cmd_gen,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run the command line and return its exit code.

    Parameters
    ----------
    argv : sequence of str, optional
        Arguments without the program name; defaults to ``sys.argv[1:]``.
    """
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return EXIT_USAGE
    except (MatrixFileError, NonSquareError) as e:
        print(f"normcheck: {e}", file=sys.stderr)
        return EXIT_USAGE
    except HypothesisViolationError:
        print("normcheck: hypothesis violated: A not normal", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except DimensionMismatchError as e:
        print(f"normcheck: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"normcheck: {e}", file=sys.stderr)
        return EXIT_IO
    except (NormcheckError, ValueError, ArithmeticError) as e:
        logging.error(f"normcheck failed: {e}", exc_info=True)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
