"""Exponentiality characterizations from samples of size three.

Density identities that single out the exponential law, exact rational
series solvers, a rank-sum goodness-of-fit test built on a six-way sample
split, and Monte Carlo size/power estimation.
"""

__version__ = "0.1.0"

from .distributions import DistributionSpec, Family, Sample, sample  # noqa: E402
from .errors import (  # noqa: E402
    DataError,
    DegenerateError,
    DomainError,
    ExpcharError,
    NumericError,
    ParameterError,
    ShapeError,
)
from .kernels import BACKEND  # noqa: E402

__all__ = [
    "BACKEND",
    "DataError",
    "DegenerateError",
    "DistributionSpec",
    "DomainError",
    "ExpcharError",
    "Family",
    "NumericError",
    "ParameterError",
    "Sample",
    "ShapeError",
    "sample",
]
