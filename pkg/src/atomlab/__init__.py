"""Weighted special atoms on the polytorus and their analytic extensions."""

__version__ = "0.1.0"

from .errors import (
    DomainError,
    NoConvergence,
    NonIntegrable,
    NonIntegrableWeight,
    NonZeroMean,
    PatternUnsupported,
    PreconditionFailed,
    ToleranceNotMet,
)
from .geometry import Cube, SignPattern, axis_pattern, checkerboard_pattern, parity_pattern, split_cube
from .weights import ProductWeight, Weight1D, weight_measure
from .atoms import AtomicFunction, SpecialAtom, Type2Atom, haar_atom, haar_decompose

__all__ = [
    "AtomicFunction",
    "Cube",
    "DomainError",
    "NoConvergence",
    "NonIntegrable",
    "NonIntegrableWeight",
    "NonZeroMean",
    "PatternUnsupported",
    "PreconditionFailed",
    "ProductWeight",
    "SignPattern",
    "SpecialAtom",
    "ToleranceNotMet",
    "Type2Atom",
    "Weight1D",
    "axis_pattern",
    "checkerboard_pattern",
    "haar_atom",
    "haar_decompose",
    "parity_pattern",
    "split_cube",
    "weight_measure",
]
