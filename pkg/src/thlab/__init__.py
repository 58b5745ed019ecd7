"""Spectral laboratory for symmetric Toeplitz and Hankel random matrices.

The entries of the matrices are a moving average of an i.i.d. driving
sequence.  The package provides the ensemble itself, the combinatorial
objects behind the limiting moment formulas, Monte Carlo / grid / exact
evaluators for the limiting moments, spectral tooling (eigenvalues,
empirical distributions, fast matrix-vector products), exact trace
identities used as cross-checks, and an experiment layer exposed both as
a command line tool and as an HTTP service.
"""

__version__ = "0.1.0"

from .ensemble import (
    BaseDistribution,
    EntrySequence,
    MatrixKind,
    MovingAverageProcess,
    PatternedMatrix,
    build_hankel,
    build_toeplitz,
    moving_average,
    sample_patterned_matrix,
    sample_raw,
)
from .errors import (
    InvalidArgumentError,
    MissingSupportError,
    NumericInputError,
    ResourceLimitError,
    ThlabError,
    UnsupportedTheoryError,
)

__all__ = [
    "__version__",
    "BaseDistribution",
    "EntrySequence",
    "MatrixKind",
    "MovingAverageProcess",
    "PatternedMatrix",
    "build_hankel",
    "build_toeplitz",
    "moving_average",
    "sample_patterned_matrix",
    "sample_raw",
    "ThlabError",
    "InvalidArgumentError",
    "MissingSupportError",
    "NumericInputError",
    "ResourceLimitError",
    "UnsupportedTheoryError",
]
