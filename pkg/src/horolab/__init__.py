"""Desk-scale laboratory for primes along horocycle orbits on the modular surface."""

from horolab.errors import (
    CapacityError,
    DegeneratePeriodic,
    DomainError,
    NumericError,
    PreconditionError,
)

__all__ = [
    "CapacityError",
    "DegeneratePeriodic",
    "DomainError",
    "NumericError",
    "PreconditionError",
]

__version__ = "0.1.0"
