"""Poisson-type kernels on the polydisc and the closed-form gradient factors.

Logarithms of e^{i theta} - z are always taken as i theta + Log(1 - z e^{-i theta});
since Re(1 - z e^{-i theta}) > 0 on the open disc the principal branch never
jumps. Differences of such logs are formed as one ``log1p`` of a ratio, which
keeps K2 and the coordinate primitive accurate when the three angles are close.

All functions broadcast over leading array dimensions.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PatternUnsupported

TWO_PI = 2.0 * np.pi


def _check_disc(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if np.any(~(np.abs(z) < 1)):
        raise DomainError("|z| must be < 1")
    return z


@dataclass(frozen=True)
class PolydiscPoint:
    """z = r e^{i theta} componentwise; arrays of shape (..., d) are allowed."""

    radius: np.ndarray
    angle: np.ndarray

    def __post_init__(self):
        r = np.atleast_1d(np.asarray(self.radius, dtype=float))
        t = np.atleast_1d(np.asarray(self.angle, dtype=float))
        r, t = np.broadcast_arrays(r, t)
        if np.any((r < 0) | ~(r < 1)):
            raise DomainError("radii must lie in [0, 1)")
        object.__setattr__(self, "radius", r)
        object.__setattr__(self, "angle", t)

    @classmethod
    def from_complex(cls, z) -> PolydiscPoint:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return cls(np.abs(z), np.angle(z) % TWO_PI)

    @property
    def d(self) -> int:
        return self.radius.shape[-1]

    @property
    def z(self) -> np.ndarray:
        return self.radius * np.exp(1j * self.angle)


def _as_z(z) -> np.ndarray:
    return z.z if isinstance(z, PolydiscPoint) else _check_disc(z)


def poisson_factor(z, xi):
    """P(z, xi) = (e^{i xi} + z) / (e^{i xi} - z)."""
    z = _check_disc(z)
    e = np.exp(1j * np.asarray(xi, dtype=float))
    return (e + z) / (e - z)


def poisson_factor_dz(z, xi):
    """dP/dz = 2 e^{i xi} / (e^{i xi} - z)^2."""
    z = _check_disc(z)
    e = np.exp(1j * np.asarray(xi, dtype=float))
    return 2 * e / (e - z) ** 2


def product_kernel(z, xi):
    """prod_j P(z_j, xi_j) over the last axis."""
    return np.prod(poisson_factor(_as_z(z), xi), axis=-1)


def log_shifted(theta, z):
    """Branch-safe ln(e^{i theta} - z) = i theta + Log(1 - z e^{-i theta})."""
    z = _check_disc(z)
    theta = np.asarray(theta, dtype=float)
    return 1j * theta + np.log1p(-z * np.exp(-1j * theta))


def _ell_diff(t0, t1, z):
    """Log(1 - z e^{-i t1}) - Log(1 - z e^{-i t0}) without cancellation."""
    t0 = np.asarray(t0, dtype=float)
    delta = np.asarray(t1, dtype=float) - t0
    q = z * np.exp(-1j * t0)
    one_minus = 2j * np.sin(delta / 2) * np.exp(-0.5j * delta)  # 1 - e^{-i delta}
    return np.log1p(q * one_minus / (1 - q))


def k1(a, h, z):
    """K1 = i[1/(e^{i(a-h)}-z) + 1/(e^{i(a+h)}-z) - 2/(e^{ia}-z)].

    Evaluated in the combined form
    -2i E c (E + z) / (((E - z)^2 + 2 E z c)(E - z)),  E = e^{ia}, c = 1 - cos h,
    which has no cancellation for small h.
    """
    z = _check_disc(z)
    h = np.asarray(h, dtype=float)
    E = np.exp(1j * np.asarray(a, dtype=float))
    c = 2 * np.sin(h / 2) ** 2
    u = E - z
    return -2j * E * c * (E + z) / ((u * u + 2 * E * z * c) * u)


def k1_direct(a, h, z):
    """K1 from its three-term definition (reference form)."""
    z = _check_disc(z)
    a = np.asarray(a, dtype=float)
    return 1j * (1 / (np.exp(1j * (a - h)) - z) + 1 / (np.exp(1j * (a + h)) - z) - 2 / (np.exp(1j * a) - z))


def k2(a, h, z):
    """K2 = (2/i)[ln(e^{i(a-h)}-z) + ln(e^{i(a+h)}-z) - 2 ln(e^{ia}-z)]."""
    z = _check_disc(z)
    a = np.asarray(a, dtype=float)
    return -2j * (_ell_diff(a, a - h, z) + _ell_diff(a, a + h, z))


def coordinate_primitive(lo, hi, z):
    """Integral of P(z, xi) over [lo, hi].

    With Pi(xi) = xi - 2i Log(1 - z e^{-i xi}) one has Pi' = P, so the result is
    (hi - lo) - 2i [Log(1 - z e^{-i hi}) - Log(1 - z e^{-i lo})].
    """
    z = _check_disc(z)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    return (hi - lo) - 2j * _ell_diff(lo, hi, z)


def coordinate_primitive_dz(lo, hi, z):
    """d/dz of ``coordinate_primitive``: 2i[1/(e^{i hi}-z) - 1/(e^{i lo}-z)]."""
    z = _check_disc(z)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    e0, e1 = np.exp(1j * lo), np.exp(1j * hi)
    # combined over a common denominator: (e0 - e1) / ((e1 - z)(e0 - z))
    diff = -2j * np.sin((hi - lo) / 2) * np.exp(0.5j * (hi + lo))
    return 2j * diff / ((e1 - z) * (e0 - z))


def kappa(d: int) -> float:
    """Constant in f_j = kappa_d / ((2pi)^d w(J)) K1 prod K2 for checkerboard atoms."""
    return 2.0 * (-1) ** (d + 1)


KAPPA = {d: kappa(d) for d in (1, 2, 3)}


def _require_checkerboard(atom):
    if atom.pattern.parity_mask() != 2**atom.cube.d - 1:
        raise PatternUnsupported("closed-form gradient factors need the checkerboard pattern")


def grad_components(atom, z) -> np.ndarray:
    """All f_j for a checkerboard atom at z, shape (..., d)."""
    _require_checkerboard(atom)
    z = _as_z(z)
    a = np.asarray(atom.cube.center)
    h = np.asarray(atom.cube.halfwidth)
    d = atom.cube.d
    K1 = k1(a, h, z)
    K2 = k2(a, h, z)
    C = kappa(d) / (TWO_PI**d * atom.wJ)
    out = np.empty(np.broadcast(z, a).shape, dtype=complex)
    for j in range(d):
        others = np.prod(np.delete(K2, j, axis=-1), axis=-1) if d > 1 else 1.0
        out[..., j] = C * K1[..., j] * others
    return out


def grad_component(atom, j: int, z) -> complex:
    """f_j(z) = C(J) K1(a_j, h_j, z_j) prod_{l != j} K2(a_l, h_l, z_l)."""
    if not 0 <= j < atom.cube.d:
        raise ValueError(f"coordinate {j} out of range")
    return grad_components(atom, z)[..., j]


def grad_norm(components) -> np.ndarray:
    """Euclidean norm over the last axis."""
    c = np.asarray(components)
    return np.sqrt(np.sum(np.abs(c) ** 2, axis=-1))


def calibrate_kappa(d: int, points: int = 20, seed: int = 0, step: float = 1e-5) -> np.ndarray:
    """Ratios f_j(FD) / (K1 prod K2 / ((2pi)^d w(J))) at random interior points.

    The finite differences are taken of the subcube-sum extension, so this is
    an independent check of ``kappa``.
    """
    from .atoms import SpecialAtom
    from .extension import extend_atom_closed
    from .geometry import Cube, checkerboard_pattern
    from .weights import ProductWeight

    rng = np.random.default_rng(seed)
    atom = SpecialAtom(Cube(tuple(rng.uniform(2.0, 4.0, d)), tuple(rng.uniform(0.3, 0.9, d))),
                       checkerboard_pattern(d), ProductWeight.lebesgue(d))
    a = np.asarray(atom.cube.center)
    hw = np.asarray(atom.cube.halfwidth)
    ratios = []
    for _ in range(points):
        z = rng.uniform(0.1, 0.8, d) * np.exp(1j * rng.uniform(0, TWO_PI, d))
        for j in range(d):
            e = np.zeros(d)
            e[j] = step
            fd = (extend_atom_closed(atom, z + e) - extend_atom_closed(atom, z - e)) / (2 * step)
            K2 = k2(a, hw, z)
            base = k1(a[j], hw[j], z[j]) * np.prod(np.delete(K2, j)) / (TWO_PI**d * atom.wJ)
            ratios.append(fd / base)
    return np.asarray(ratios)
