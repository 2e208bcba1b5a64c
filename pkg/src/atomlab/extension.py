"""Analytic extension to the polydisc, radial limits, and the A_w^p norm.

The extension of a special atom is a signed sum over its 2^d subcubes of
products of one-dimensional primitives of the kernel factor. For parity sign
patterns the sum factorizes, which is what makes the 2d-dimensional norm
integral tractable: the gradient modulus is

    |F'| = |c| sqrt(sum_j A_j^2 prod_{l != j} B_l^2),  A_j = |V_j'|, B_j = |V_j|,

and, because the integrand is homogeneous in (A, B), the integral over one
disc at a time reduces to a function of a single angle (see ``_separable_norm``).

Disc integrals use (u, xi) with u = 1 - r on dyadic panels [2^-k-1, 2^-k],
k < levels, so radial nodes stay exact near the boundary; the layer
u < 2^-levels is dropped.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .atoms import AtomicFunction, SpecialAtom
from .errors import NoConvergence, NonIntegrable, NonIntegrableWeight, ToleranceNotMet
from .kernels import (
    PolydiscPoint,
    _as_z,
    coordinate_primitive,
    coordinate_primitive_dz,
    k1,
    k2,
    poisson_factor,
)
from .quadrature import angle_breaks, cheb_interpolant, cheb_nodes, integrate_from_zero, panel_rule
from .weights import ProductWeight

TWO_PI = 2.0 * np.pi
MAX_LEVELS = 50


@dataclass(frozen=True)
class QuadratureSpec:
    """Resolution of the extension and norm quadratures.

    ``nodes_per_axis`` uniform angular panels, ``levels`` dyadic radial panels
    (and geometric angular grading depth), Gauss order ``order`` per panel,
    ``cheb`` angle nodes for the separable norm recursion.
    """

    nodes_per_axis: int = 16
    levels: int = 32
    order: int = 8
    tol: float = 1e-8
    norm_tol: float = 0.01
    cheb: int = 17

    def __post_init__(self):
        if min(self.nodes_per_axis, self.levels, self.order, self.cheb) < 1:
            raise ValueError("all counts must be >= 1")
        if not (self.tol > 0 and self.norm_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.levels > MAX_LEVELS:
            raise ValueError(f"levels must be <= {MAX_LEVELS}")

    def refined(self) -> QuadratureSpec:
        """One grid doubling: twice the panels per axis and twice the grading depth."""
        return replace(self, nodes_per_axis=2 * self.nodes_per_axis,
                       levels=min(2 * self.levels, MAX_LEVELS), cheb=2 * self.cheb - 1)

    def to_json(self) -> dict:
        return {"nodes_per_axis": self.nodes_per_axis, "levels": self.levels, "order": self.order,
                "tol": self.tol, "norm_tol": self.norm_tol, "cheb": self.cheb}


# --- closed form -----------------------------------------------------------

def _subcube_primitives(atom: SpecialAtom, z, dz: bool = False):
    a = np.asarray(atom.cube.center)
    h = np.asarray(atom.cube.halfwidth)
    prim = coordinate_primitive_dz if dz else coordinate_primitive
    return prim(a - h, a, z), prim(a, a + h, z)


def extend_atom_closed(atom: SpecialAtom, z) -> np.ndarray:
    """F(z) = (2pi)^-d sum_k s_k prod_j M(I_kj, z_j) / w(J); z has shape (..., d)."""
    z = _as_z(z)
    lower, upper = _subcube_primitives(atom, z)
    signs = atom.pattern.signs()
    total = 0
    for k in range(2**atom.d):
        bits = (k >> np.arange(atom.d)) & 1
        total = total + signs[k] * np.prod(np.where(bits == 1, upper, lower), axis=-1)
    return total / (TWO_PI**atom.d * atom.wJ)


def atom_gradient(atom: SpecialAtom, z) -> np.ndarray:
    """(dF/dz_1, ..., dF/dz_d) of an atom's extension, any sign pattern."""
    z = _as_z(z)
    lower, upper = _subcube_primitives(atom, z)
    dlower, dupper = _subcube_primitives(atom, z, dz=True)
    signs = atom.pattern.signs()
    d = atom.d
    out = np.zeros(np.broadcast_shapes(z.shape, (d,)), dtype=complex)
    for k in range(2**d):
        bits = (k >> np.arange(d)) & 1
        M = np.where(bits == 1, upper, lower)
        dM = np.where(bits == 1, dupper, dlower)
        for j in range(d):
            rest = np.prod(np.delete(M, j, axis=-1), axis=-1) if d > 1 else 1.0
            out[..., j] += signs[k] * dM[..., j] * rest
    return out / (TWO_PI**d * atom.wJ)


def extend_closed(f: AtomicFunction, z) -> np.ndarray:
    z = _as_z(z)
    return sum((c * extend_atom_closed(a, z) for c, a in f.terms), np.zeros(z.shape[:-1], dtype=complex))


def gradient_closed(f: AtomicFunction, z) -> np.ndarray:
    z = _as_z(z)
    return sum((c * atom_gradient(a, z) for c, a in f.terms), np.zeros(z.shape, dtype=complex))


# --- quadrature ------------------------------------------------------------

def _axis_breaks(theta: float, radius: float, uniform: int, extra) -> np.ndarray:
    """Uniform panels plus geometric grading around the kernel peak at theta."""
    s = max(1.0 - radius, 1e-15)
    pts = list(np.linspace(0.0, TWO_PI, uniform + 1)) + [x for x in extra if 0 < x < TWO_PI]
    n = int(math.ceil(math.log2(np.pi / s))) + 3 if s < np.pi else 0
    steps = s * 2.0 ** np.arange(-2, n - 2)
    for x in [theta, *(theta + steps), *(theta - steps)]:
        pts.append(x % TWO_PI)
    b = np.unique(np.asarray(pts))
    return b[np.concatenate([[True], np.diff(b) > 1e-14])]


def _tensor_extension(f, z: np.ndarray, breaks, order: int) -> complex:
    axes = [panel_rule(b, order) for b in breaks]
    grids = np.meshgrid(*[x for x, _ in axes], indexing="ij")
    pts = np.stack(grids, axis=-1)
    kern = 1.0
    for j, (x, w) in enumerate(axes):
        shape = [1] * len(axes)
        shape[j] = -1
        kern = kern * (poisson_factor(z[j], x) * w).reshape(shape)
    vals = np.asarray(f(pts), dtype=float)
    return complex(np.sum(kern * vals)) / TWO_PI ** len(axes)


def _split(b: np.ndarray) -> np.ndarray:
    mid = (b[:-1] + b[1:]) / 2
    return np.sort(np.concatenate([b, mid]))


def extend_general(f: Callable, z, q: QuadratureSpec = QuadratureSpec(), breaks=None,
                   return_error: bool = False):
    """F(z) = (2pi)^-d int P(z, xi) f(xi) dxi by tensor Gauss-Legendre.

    ``breaks`` lists, per axis, known jump locations of ``f``. The estimate on
    panels split in half is returned; its distance to the unsplit estimate is
    the error indicator.
    """
    z = np.atleast_1d(_as_z(z))
    if z.ndim != 1:
        raise ValueError("extend_general takes a single point")
    d = z.size
    breaks = breaks if breaks is not None else [()] * d
    axes = [_axis_breaks(float(np.angle(z[j]) % TWO_PI), float(abs(z[j])), q.nodes_per_axis, breaks[j])
            for j in range(d)]
    coarse = _tensor_extension(f, z, axes, q.order)
    fine = _tensor_extension(f, z, [_split(b) for b in axes], q.order)
    err = abs(fine - coarse)
    if err > q.tol * max(1.0, abs(fine)):
        raise ToleranceNotMet(f"extension refinement disagreement {err:.3e} exceeds {q.tol:.1e}")
    return (fine, err) if return_error else fine


@dataclass(frozen=True)
class ExtensionProvider:
    """Either an atomic function (closed form) or a boundary function plus a quadrature spec."""

    d: int
    atoms: AtomicFunction | None = None
    func: Callable | None = None
    spec: QuadratureSpec = QuadratureSpec()
    breaks: tuple = ()
    step: float = 1e-6

    @classmethod
    def closed(cls, f) -> ExtensionProvider:
        if isinstance(f, SpecialAtom):
            f = AtomicFunction.single(f)
        if not f.terms:
            raise ValueError("empty atomic function")
        return cls(f.d, atoms=f)

    @classmethod
    def quadrature(cls, func: Callable, d: int, spec: QuadratureSpec = QuadratureSpec(),
                   breaks=None) -> ExtensionProvider:
        return cls(d, func=func, spec=spec, breaks=tuple(tuple(b) for b in (breaks or [()] * d)))

    @property
    def is_closed(self) -> bool:
        return self.atoms is not None

    def value(self, z) -> np.ndarray:
        z = _as_z(z)
        if self.is_closed:
            return extend_closed(self.atoms, z)
        flat = z.reshape(-1, self.d)
        out = [extend_general(self.func, p, self.spec, self.breaks) for p in flat]
        return np.asarray(out).reshape(z.shape[:-1])

    def gradient(self, z) -> np.ndarray:
        z = _as_z(z)
        if self.is_closed:
            return gradient_closed(self.atoms, z)
        out = np.empty(z.shape, dtype=complex)
        for j in range(self.d):
            e = np.zeros(self.d)
            e[j] = self.step
            out[..., j] = (self.value(z + e) - self.value(z - e)) / (2 * self.step)
        return out


@dataclass
class RadialLimit:
    value: float
    ratio: float
    last: float
    values: list
    radii: list

    def to_json(self) -> dict:
        return {"value": self.value, "ratio": self.ratio, "last": self.last,
                "values": self.values, "radii": self.radii}


def radial_limit(provider: ExtensionProvider, xi, k0: int = 4, k1: int = 14,
                 contraction: float = 0.9) -> RadialLimit:
    """lim Re F(r e^{i xi}) along r = 1 - 2^-k, k = k0..k1, all coordinates sharing r.

    The limit is the Richardson value 2 v_k1 - v_{k1-1}, which removes an
    error term proportional to 1 - r; ``ratio`` is the last quotient of
    successive differences (close to 1/2 at continuity points).
    """
    if k1 - k0 < 2:
        raise ValueError("need at least three radii")
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    ks = np.arange(k0, k1 + 1)
    radii = 1 - 0.5**ks
    z = radii[:, None] * np.exp(1j * xi)[None, :]
    v = np.real(provider.value(z))
    d1, d0 = v[-1] - v[-2], v[-2] - v[-3]
    floor = 1e-13 * max(1.0, float(np.max(np.abs(v))))
    if abs(d0) <= floor:
        ratio = 0.0 if abs(d1) <= floor else math.inf
    else:
        ratio = float(d1 / d0)
    if not abs(ratio) < contraction:
        raise NoConvergence(f"radial values do not contract (ratio {ratio:.3g})")
    return RadialLimit(float(2 * v[-1] - v[-2]), ratio, float(v[-1]), [float(x) for x in v],
                       [float(r) for r in radii])


# --- norms -----------------------------------------------------------------

ANGULAR = "angular"
RADIAL = "radial"


@dataclass
class NormResult:
    value: float
    coarse: float
    error_indicator: float
    cells: int
    path: str

    @property
    def rel_change(self) -> float:
        return self.error_indicator / abs(self.value) if self.value else (0.0 if not self.error_indicator else math.inf)

    def to_json(self) -> dict:
        return {"value": self.value, "coarse": self.coarse, "error_indicator": self.error_indicator,
                "cells": self.cells, "path": self.path}


def _disc_nodes(singular, levels: int, order: int, uniform: int):
    """Nodes (u, xi) and weights for [0,1) x [0,2pi) with u = 1 - r graded toward 0."""
    ub = np.concatenate([[0.5**levels], 0.5 ** np.arange(levels - 1, -1, -1)])
    u, wu = panel_rule(ub, order)
    xi, wxi = panel_rule(angle_breaks(singular, levels, uniform), order)
    return u, wu, xi, wxi


def _mode_weight(w1d, mode: str, u: np.ndarray, xi: np.ndarray) -> np.ndarray:
    if mode == ANGULAR:
        return w1d(xi)[None, :]
    return (w1d(u) / u)[:, None]


def check_radial_weight(weight: ProductWeight):
    """Raise NonIntegrableWeight unless int_0^1 w_j(u)/u du < inf for every factor."""
    for f in weight.factors:
        try:
            integrate_from_zero(lambda u, f=f: f(u) / u, 1.0)
        except NonIntegrable as exc:
            raise NonIntegrableWeight(f"int_0^1 w(u)/u du diverges for {f.name}: {exc}") from None


def _factor_data(atom: SpecialAtom, j: int, mask: int, z: np.ndarray):
    a, h = atom.cube.center[j], atom.cube.halfwidth[j]
    if mask >> j & 1:
        return k2(a, h, z), 2 * k1(a, h, z)
    return coordinate_primitive(a - h, a + h, z), coordinate_primitive_dz(a - h, a + h, z)


def _separable_norm(coef: float, atom: SpecialAtom, mask: int, weight: ProductWeight, mode: str,
                    p: float, q: QuadratureSpec) -> tuple[float, int]:
    d = atom.d
    discs = []
    cells = 0
    for j in range(d):
        a, h = atom.cube.center[j], atom.cube.halfwidth[j]
        sing = [a - h, a + h] + ([a] if mask >> j & 1 else []) + ([0.0] if mode == ANGULAR else [])
        u, wu, xi, wxi = _disc_nodes(sing, q.levels, q.order, q.nodes_per_axis)
        z = (1 - u)[:, None] * np.exp(1j * xi)[None, :]
        V, dV = _factor_data(atom, j, mask, z)
        W = wu[:, None] * wxi[None, :] * _mode_weight(weight.factors[j], mode, u, xi)
        discs.append((np.abs(dV), np.abs(V), W))
        cells += u.size * xi.size

    def step(disc, phi, inner):
        A, B, W = disc
        X = np.sqrt((np.cos(phi) * B) ** 2 + (np.sin(phi) * A) ** 2)
        Y = np.sin(phi) * B
        if inner is None:
            return float(np.sum(X**p * W))
        rho = np.hypot(X, Y)
        return float(np.sum(rho**p * inner(np.arctan2(Y, X)) * W))

    inner = None
    for j in range(d - 1, 0, -1):
        phis = cheb_nodes(q.cheb, 0.0, np.pi / 2)
        vals = np.array([step(discs[j], phi, inner) for phi in phis])
        inner = cheb_interpolant(vals, 0.0, np.pi / 2)
    total = step(discs[0], np.pi / 2, inner)
    c = abs(coef) / (TWO_PI**d * atom.wJ)
    return c**p * total / TWO_PI**d, cells


def _direct_norm(provider: ExtensionProvider, weight: ProductWeight, mode: str, p: float,
                 q: QuadratureSpec, max_nodes: int = 10**8) -> tuple[float, int]:
    d = provider.d
    if d > 2:
        raise ValueError("direct norm quadrature is limited to d <= 2; use single atoms")
    sing = [[] for _ in range(d)]
    if provider.is_closed:
        for _, atom in provider.atoms.terms:
            for j in range(d):
                a, h = atom.cube.center[j], atom.cube.halfwidth[j]
                sing[j] += [a - h, a, a + h]
    else:
        for j, b in enumerate(provider.breaks or [()] * d):
            sing[j] += list(b)
    rules = []
    for j in range(d):
        u, wu, xi, wxi = _disc_nodes(sing[j] + ([0.0] if mode == ANGULAR else []), q.levels, q.order,
                                     q.nodes_per_axis)
        W = wu[:, None] * wxi[None, :] * _mode_weight(weight.factors[j], mode, u, xi)
        z = (1 - u)[:, None] * np.exp(1j * xi)[None, :]
        rules.append((z.ravel(), W.ravel()))
    n = math.prod(r[0].size for r in rules)
    if n > max_nodes:
        raise ValueError(f"direct rule needs {n} nodes (> {max_nodes}); reduce levels/order")
    if d == 1:
        g = provider.gradient(rules[0][0][:, None])
        total = math.fsum((np.abs(g[:, 0]) ** p * rules[0][1]))
    else:
        (z1, w1), (z2, w2) = rules
        parts = []
        chunk = max(1, 2**20 // z2.size)
        for s in range(0, z1.size, chunk):
            zz = np.stack(np.broadcast_arrays(z1[s:s + chunk, None], z2[None, :]), axis=-1)
            g = provider.gradient(zz)
            mag = np.sqrt(np.sum(np.abs(g) ** 2, axis=-1)) ** p
            parts.append(math.fsum((mag * w1[s:s + chunk, None] * w2[None, :]).ravel()))
        total = math.fsum(parts)
    return total / TWO_PI**d, n


def _norm_once(provider, weight, mode, p, q) -> tuple[float, int, str]:
    if provider.is_closed and len(provider.atoms.terms) == 1:
        coef, atom = provider.atoms.terms[0]
        mask = atom.pattern.parity_mask()
        if mask is not None:
            v, n = _separable_norm(coef, atom, mask, weight, mode, p, q)
            return v, n, "separable"
    v, n = _direct_norm(provider, weight, mode, p, q)
    return v, n, "direct"


def aw_norm(provider: ExtensionProvider, weight: ProductWeight, mode: str = RADIAL, p: float = 1.0,
            q: QuadratureSpec = QuadratureSpec(), check_weight: bool = True, strict: bool = True) -> NormResult:
    """|F(0)| + (2pi)^-d int |F'(r e^{i xi})|^p w dxi dr over [0,1)^d x [0,2pi)^d.

    ``mode`` is "angular" (w(xi)) or "radial" (w(1-r)/(1-r)). The integral is
    computed at ``q`` and at ``q.refined()``; the refined value is returned and
    the difference is the error indicator. With ``strict`` a relative change
    above ``q.norm_tol`` raises ToleranceNotMet.
    """
    if mode not in (ANGULAR, RADIAL):
        raise ValueError(f"mode must be {ANGULAR!r} or {RADIAL!r}")
    if not p >= 1:
        raise ValueError("p must be >= 1")
    if weight.d != provider.d:
        raise ValueError("weight dimension does not match")
    if mode == RADIAL and check_weight:
        check_radial_weight(weight)
    f0 = abs(complex(provider.value(np.zeros(provider.d))))
    v0, _, path = _norm_once(provider, weight, mode, p, q)
    v1, cells, _ = _norm_once(provider, weight, mode, p, q.refined())
    res = NormResult(f0 + v1, f0 + v0, abs(v1 - v0), cells, path)
    if strict and not (np.isfinite(res.value) and res.rel_change <= q.norm_tol):
        raise ToleranceNotMet(f"norm changed by {res.rel_change:.3g} under refinement (tol {q.norm_tol})")
    return res
