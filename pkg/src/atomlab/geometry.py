"""Cubes on the torus [0, 2pi)^d, their dyadic subcubes, and sign patterns.

Subcube ``k`` of a cube takes, in coordinate ``j``, the lower half
``[a_j - h_j, a_j)`` when bit ``j`` of ``k`` is 0 and the upper half
``[a_j, a_j + h_j)`` when it is 1. All intervals are lower-closed, so the
subcubes are disjoint and a cube is the half-open box ``[a - h, a + h)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

TWO_PI = 2.0 * np.pi
_SLACK = 1e-12


@dataclass(frozen=True)
class Cube:
    center: tuple[float, ...]
    halfwidth: tuple[float, ...]

    def __post_init__(self):
        c = tuple(float(x) for x in np.atleast_1d(self.center))
        h = tuple(float(x) for x in np.atleast_1d(self.halfwidth))
        if len(c) != len(h) or not c:
            raise ValueError("center and halfwidth must have the same nonzero length")
        for cj, hj in zip(c, h):
            if not hj > 0:
                raise ValueError(f"halfwidth must be positive, got {hj}")
            if cj - hj < -_SLACK or cj + hj > TWO_PI + _SLACK:
                raise ValueError(f"cube [{cj - hj}, {cj + hj}] does not fit in [0, 2pi]")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "halfwidth", h)

    @classmethod
    def from_bounds(cls, lo, hi) -> Cube:
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        return cls(tuple((lo + hi) / 2), tuple((hi - lo) / 2))

    @property
    def d(self) -> int:
        return len(self.center)

    @property
    def lower(self) -> np.ndarray:
        return np.subtract(self.center, self.halfwidth)

    @property
    def upper(self) -> np.ndarray:
        return np.add(self.center, self.halfwidth)

    @property
    def volume(self) -> float:
        return float(np.prod(2 * np.asarray(self.halfwidth)))

    def contains(self, points) -> np.ndarray:
        """Half-open membership test for an array of points, shape (..., d)."""
        x = np.asarray(points, dtype=float)
        return np.all((x >= self.lower) & (x < self.upper), axis=-1)

    def locate(self, points) -> np.ndarray:
        """Subcube index of each point, or -1 outside the cube."""
        x = np.asarray(points, dtype=float)
        upper_half = x >= np.asarray(self.center)
        idx = np.sum(upper_half * (1 << np.arange(self.d)), axis=-1)
        return np.where(self.contains(x), idx, -1)

    def to_json(self) -> dict:
        return {"center": list(self.center), "halfwidth": list(self.halfwidth)}

    @classmethod
    def from_json(cls, obj: dict) -> Cube:
        return cls(tuple(obj["center"]), tuple(obj["halfwidth"]))


@dataclass(frozen=True)
class SignPattern:
    """The subcubes on which an atom is positive; the rest are negative."""

    d: int
    positive: frozenset[int]

    def __post_init__(self):
        pos = frozenset(int(k) for k in self.positive)
        if self.d < 1:
            raise ValueError("dimension must be >= 1")
        if any(k < 0 or k >= 2**self.d for k in pos):
            raise ValueError("subcube index out of range")
        if len(pos) != 2 ** (self.d - 1):
            raise ValueError(f"need exactly {2 ** (self.d - 1)} positive subcubes, got {len(pos)}")
        object.__setattr__(self, "positive", pos)

    def signs(self) -> np.ndarray:
        """+1/-1 for every subcube index 0..2^d-1."""
        s = -np.ones(2**self.d)
        s[sorted(self.positive)] = 1.0
        return s

    def parity_mask(self) -> int | None:
        """Bit mask S with positive = {k : popcount(k & S) odd}, if one exists."""
        for mask in range(1, 2**self.d):
            if self.positive == _parity_set(self.d, mask):
                return mask
        return None

    def to_json(self) -> dict:
        return {"d": self.d, "positive": sorted(self.positive)}

    @classmethod
    def from_json(cls, obj: dict) -> SignPattern:
        return cls(int(obj["d"]), frozenset(obj["positive"]))


def _parity_set(d: int, mask: int) -> frozenset[int]:
    return frozenset(k for k in range(2**d) if bin(k & mask).count("1") % 2 == 1)


def split_cube(cube: Cube) -> list[Cube]:
    """The 2^d subcubes of ``cube`` in binary index order."""
    c = np.asarray(cube.center)
    h = np.asarray(cube.halfwidth)
    out = []
    for k in range(2**cube.d):
        bits = (k >> np.arange(cube.d)) & 1
        out.append(Cube(tuple(c + (bits - 0.5) * h), tuple(h / 2)))
    return out


def parity_pattern(d: int, mask: int) -> SignPattern:
    if not 0 < mask < 2**d:
        raise ValueError("mask must select a nonempty subset of coordinates")
    return SignPattern(d, _parity_set(d, mask))


def checkerboard_pattern(d: int) -> SignPattern:
    """Positive on subcubes with an odd number of upper halves.

    For d = 2 this is R = L2 u R1 (indices 1 and 2), the classical picture.
    """
    return parity_pattern(d, 2**d - 1)


def axis_pattern(d: int, j: int) -> SignPattern:
    """Positive on the upper half in coordinate ``j``."""
    if not 0 <= j < d:
        raise ValueError(f"coordinate {j} out of range for d={d}")
    return parity_pattern(d, 1 << j)


def all_parity_masks(d: int):
    """Masks of every nonempty coordinate subset, ordered by size then value."""
    for size in range(1, d + 1):
        for combo in combinations(range(d), size):
            yield sum(1 << j for j in combo)
