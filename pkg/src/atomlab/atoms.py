"""Weighted special atoms, finite atomic sums, and a tensor-Haar bridge."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NonZeroMean, PreconditionFailed
from .geometry import Cube, SignPattern, checkerboard_pattern, parity_pattern, _parity_set
from .weights import ProductWeight, constant

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class SpecialAtom:
    """b_w = (chi_R - chi_L) / w(J) on the cube J, zero outside J."""

    cube: Cube
    pattern: SignPattern
    weight: ProductWeight
    wJ: float = field(init=False)

    def __post_init__(self):
        if self.pattern.d != self.cube.d or self.weight.d != self.cube.d:
            raise ValueError("cube, pattern and weight dimensions differ")
        wJ = self.weight.measure(self.cube)
        if not (np.isfinite(wJ) and wJ > 0):
            raise PreconditionFailed(f"w(J) must be positive and finite, got {wJ}")
        object.__setattr__(self, "wJ", float(wJ))

    @property
    def d(self) -> int:
        return self.cube.d

    def __call__(self, points) -> np.ndarray:
        return atom_eval(self, points)

    def to_json(self) -> dict:
        return {"cube": self.cube.to_json(), "pattern": self.pattern.to_json(), "weight": self.weight.to_json()}

    @classmethod
    def from_json(cls, obj: dict) -> SpecialAtom:
        return cls(Cube.from_json(obj["cube"]), SignPattern.from_json(obj["pattern"]),
                   ProductWeight.from_json(obj["weight"]))


def atom_eval(atom: SpecialAtom, points) -> np.ndarray:
    """+1/w(J) on R, -1/w(J) on L, 0 off J; ``points`` has shape (..., d)."""
    x = np.asarray(points, dtype=float)
    if atom.d == 1 and (x.ndim == 0 or x.shape[-1] != 1):
        x = x[..., None]
    idx = atom.cube.locate(x)
    inv = 1.0 / atom.wJ
    vals = np.concatenate([atom.pattern.signs() * inv, [0.0]])
    return vals[idx]  # index -1 picks the trailing 0


@dataclass(frozen=True)
class Type2Atom:
    """c = chi_J / |J|^{1/p}."""

    cube: Cube
    p: float = 1.0

    def __post_init__(self):
        if not self.p >= 1:
            raise ValueError("p must be >= 1")

    def __call__(self, points) -> np.ndarray:
        return type2_eval(self, points)


def type2_eval(atom: Type2Atom, points) -> np.ndarray:
    x = np.asarray(points, dtype=float)
    if atom.cube.d == 1 and (x.ndim == 0 or x.shape[-1] != 1):
        x = x[..., None]
    return np.where(atom.cube.contains(x), atom.cube.volume ** (-1.0 / atom.p), 0.0)


@dataclass(frozen=True)
class AtomicFunction:
    """f = sum_n alpha_n b_n for a finite list of (alpha_n, b_n)."""

    terms: tuple[tuple[float, SpecialAtom], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((float(c), a) for c, a in self.terms))
        if len({a.d for _, a in self.terms}) > 1:
            raise ValueError("all atoms must share one dimension")

    @classmethod
    def single(cls, atom: SpecialAtom, coef: float = 1.0) -> AtomicFunction:
        return cls(((coef, atom),))

    @property
    def d(self) -> int | None:
        return self.terms[0][1].d if self.terms else None

    def __call__(self, points) -> np.ndarray:
        return atomic_eval(self, points)

    def __add__(self, other: AtomicFunction) -> AtomicFunction:
        return AtomicFunction(self.terms + other.terms)

    def scaled(self, c: float) -> AtomicFunction:
        return AtomicFunction(tuple((c * a, b) for a, b in self.terms))

    def to_json(self) -> dict:
        return {"terms": [{"coef": c, "atom": a.to_json()} for c, a in self.terms]}

    @classmethod
    def from_json(cls, obj: dict) -> AtomicFunction:
        return cls(tuple((t["coef"], SpecialAtom.from_json(t["atom"])) for t in obj["terms"]))


def atomic_eval(f: AtomicFunction, points) -> np.ndarray:
    x = np.asarray(points, dtype=float)
    if not f.terms:
        return np.zeros(x.shape[:-1] if x.ndim else ())
    return sum(c * atom_eval(a, x) for c, a in f.terms)


def bw_norm_upper(f: AtomicFunction) -> float:
    """sum |alpha_n| of this representation (an upper bound on the B_w norm)."""
    return float(np.sum([abs(c) for c, _ in f.terms]))


def haar_atom(n: int, k: int, scale: float = 1.0) -> SpecialAtom:
    """The L2-normalized Haar function h_{n,k} on [0, scale) as a special atom."""
    if n < 0 or not 0 <= k < 2**n:
        raise ValueError("need n >= 0 and 0 <= k < 2^n")
    width = scale * 0.5**n
    cube = Cube((width * (k + 0.5),), (width / 2,))
    w = constant(2 ** (n / 2) / np.sqrt(scale))
    return SpecialAtom(cube, checkerboard_pattern(1), ProductWeight((w,)))


def _child_blocks(a: np.ndarray) -> np.ndarray:
    """Shape (2n,)*d -> (n,)*d + (2,)*d, children last with bit j on axis d + j."""
    d = a.ndim
    n = a.shape[0] // 2
    b = a.reshape(sum(((n, 2) for _ in range(d)), ()))
    return b.transpose(tuple(range(0, 2 * d, 2)) + tuple(range(1, 2 * d, 2)))


def haar_decompose(samples, weight: ProductWeight, cube: Cube | None = None,
                   drop: float = 1e-15) -> AtomicFunction:
    """Write a zero-mean dyadic step function as a sum of special atoms.

    ``samples`` has shape (2^m,)*d with axis j indexing coordinate j; cell values
    are taken on ``cube`` (default [0, 2pi)^d). Every cube of every level gets
    one atom per nonempty coordinate mask S, using the parity pattern of S
    (checkerboard for the full mask, axis patterns for single coordinates).
    """
    f = np.asarray(samples, dtype=float)
    d = f.ndim
    if weight.d != d:
        raise ValueError("weight dimension does not match samples")
    size = f.shape[0]
    m = int(round(np.log2(size))) if size > 0 else -1
    if size < 2 or 2**m != size or any(s != size for s in f.shape):
        raise ValueError("samples must have shape (2^m,)*d with m >= 1")
    scale = np.max(np.abs(f))
    if abs(f.mean()) > 1e-12 * scale:
        raise NonZeroMean(f"mean {f.mean():.3e} is not zero")
    if cube is None:
        cube = Cube((np.pi,) * d, (np.pi,) * d)
    lo = cube.lower
    side = 2 * np.asarray(cube.halfwidth)

    masks = list(range(1, 2**d))
    patterns = {S: parity_pattern(d, S) for S in masks}
    child_bits = np.array([[(k >> j) & 1 for j in range(d)] for k in range(2**d)])
    psi = {S: np.array([1.0 if k in _parity_set(d, S) else -1.0 for k in range(2**d)]) for S in masks}

    terms = []
    avg = f
    for level in range(m - 1, -1, -1):
        blocks = _child_blocks(avg)
        n = blocks.shape[0]
        flat = blocks.reshape((n,) * d + (-1,))
        # flat[..., q] with q the C-order index over (b0, ..., b_{d-1}); map to k = sum b_j 2^j
        order = [int(np.ravel_multi_index(tuple(child_bits[k]), (2,) * d)) for k in range(2**d)]
        children = flat[..., order]
        width = side / n
        for cell in np.ndindex(*(n,) * d):
            c = children[cell]
            center = lo + (np.asarray(cell) + 0.5) * width
            sub = Cube(tuple(center), tuple(width / 2))
            for S in masks:
                beta = float(np.mean(c * psi[S]))
                if abs(beta) <= drop * scale:
                    continue
                atom = SpecialAtom(sub, patterns[S], weight)
                terms.append((beta * atom.wJ, atom))
        avg = children.mean(axis=-1)
    return AtomicFunction(tuple(terms))


def sample_on_grid(f, m: int, d: int, cube: Cube | None = None) -> np.ndarray:
    """Values of ``f`` at the midpoints of the 2^m-per-axis grid on ``cube``."""
    if cube is None:
        cube = Cube((np.pi,) * d, (np.pi,) * d)
    n = 2**m
    axes = [cube.lower[j] + (np.arange(n) + 0.5) * (2 * cube.halfwidth[j] / n) for j in range(d)]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    return np.asarray(f(pts))
