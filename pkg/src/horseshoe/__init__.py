"""Numerical detection of (semi-)topological horseshoes.

The toolkit finds block-crossing structure of Poincare maps of
continuous-time systems and converts the assembled 0/1 crossing matrix
into a topological-entropy lower bound via subshift spectral radii.
"""

__version__ = "0.1.0"

from . import errors
from .symbolic import (
    CountSequence,
    Matrix01,
    SubshiftVerdict,
    classify,
    count_crossing_blocks,
    count_sequence,
    enumerate_words,
    is_irreducible,
    is_minimal,
    proposition_bound,
    recurrence_entropy_limit,
    spectral_radius,
)

__all__ = [
    "errors",
    "Matrix01",
    "SubshiftVerdict",
    "CountSequence",
    "is_irreducible",
    "is_minimal",
    "spectral_radius",
    "classify",
    "count_crossing_blocks",
    "count_sequence",
    "enumerate_words",
    "proposition_bound",
    "recurrence_entropy_limit",
    "__version__",
]
