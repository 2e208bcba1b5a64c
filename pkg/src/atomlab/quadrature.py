"""Composite Gauss-Legendre rules on geometrically graded panels.

Everything here returns plain node/weight arrays; reductions are done by the
callers with ``math.fsum`` or ``np.sum`` on arrays of fixed shape, so results
are reproducible run to run.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NonIntegrable

TWO_PI = 2.0 * np.pi


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    return (x + 1) / 2, w / 2


def panel_rule(breaks, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite rule on consecutive panels [breaks[i], breaks[i+1]]."""
    b = np.asarray(breaks, dtype=float)
    t, wt = gauss_legendre(order)
    width = np.diff(b)
    x = b[:-1, None] + width[:, None] * t
    w = width[:, None] * wt
    return x.ravel(), w.ravel()


def graded_breaks(lo: float, hi: float, levels: int, grade_lo=True, grade_hi=True, extra=()) -> np.ndarray:
    """Breakpoints on [lo, hi] refined geometrically toward the chosen ends."""
    length = hi - lo
    steps = length * 0.5 ** np.arange(1, levels + 1)
    pts = [lo, hi, lo + length / 2]
    if grade_lo:
        pts.extend(lo + steps)
    if grade_hi:
        pts.extend(hi - steps)
    pts.extend(e for e in extra if lo < e < hi)
    return _unique_sorted(pts, lo, hi)


def _unique_sorted(pts, lo, hi) -> np.ndarray:
    b = np.unique(np.clip(np.asarray(pts, dtype=float), lo, hi))
    keep = np.concatenate([[True], np.diff(b) > 1e-15 * max(1.0, abs(hi))])
    b = b[keep]
    b[0], b[-1] = lo, hi
    return b


def graded_integral(g, lo: float, hi: float, levels: int = 40, order: int = 10,
                    grade_lo=True, grade_hi=True, breaks=()) -> float:
    """Integral of a vectorized ``g`` over [lo, hi] (``lo`` may carry an integrable singularity)."""
    if not hi > lo:
        return 0.0
    x, w = panel_rule(graded_breaks(lo, hi, levels, grade_lo, grade_hi, breaks), order)
    return math.fsum(w * g(x))


def integrate_from_zero(g, u: float, levels: int = 64, order: int = 10, contraction: float = 0.999) -> float:
    """Integral of ``g`` over (0, u] by dyadic shells toward 0.

    The shells [u 2^-(k+1), u 2^-k] are summed and the remainder below the
    deepest shell is extrapolated geometrically. When successive shells stop
    contracting the integral is declared divergent.
    """
    if u <= 0:
        return 0.0
    t, wt = gauss_legendre(order)
    left = u * 0.5 ** np.arange(1, levels + 1)
    x = left[:, None] * (1 + t)
    shells = (left[:, None] * wt * g(x)).sum(axis=1)
    if not np.all(np.isfinite(shells)):
        raise NonIntegrable("integrand is not finite near 0")
    last, prev = abs(shells[-1]), abs(shells[-2])
    tail = 0.0
    if last > 0:
        q = last / prev if prev > 0 else np.inf
        if q >= contraction:
            raise NonIntegrable(f"shell integrals do not contract near 0 (ratio {q:.6g})")
        tail = shells[-1] * q / (1 - q)
    return math.fsum(shells) + tail


@dataclass(frozen=True)
class DiscRule:
    """Tensor rule for integrals over [0, 1) x [0, 2pi) in (r, xi) with measure dxi dr."""

    r: np.ndarray
    wr: np.ndarray
    xi: np.ndarray
    wxi: np.ndarray
    levels: int

    @property
    def size(self) -> int:
        return self.r.size * self.xi.size


def radial_breaks(levels: int) -> np.ndarray:
    """Mesh 0, 1/2, 3/4, ..., 1 - 2^-levels."""
    return np.concatenate([[0.0], 1 - 0.5 ** np.arange(1, levels + 1)])


def angle_breaks(singular, levels: int, uniform: int = 16, spread: float = np.pi / 4) -> np.ndarray:
    """Breakpoints on [0, 2pi] refined geometrically on both sides of each singular angle."""
    pts = list(np.linspace(0, TWO_PI, uniform + 1))
    steps = spread * 0.5 ** np.arange(levels + 1)
    for s in singular:
        s = float(s) % TWO_PI
        pts.append(s)
        pts.extend((s + steps) % TWO_PI)
        pts.extend((s - steps) % TWO_PI)
    return _unique_sorted(pts, 0.0, TWO_PI)


def disc_rule(singular_angles, levels: int = 40, order: int = 8, uniform: int = 16) -> DiscRule:
    """Rule graded toward r = 1 and toward the boundary points e^{i theta_s}."""
    r, wr = panel_rule(radial_breaks(levels), order)
    xi, wxi = panel_rule(angle_breaks(singular_angles, levels, uniform), order)
    return DiscRule(r, wr, xi, wxi, levels)


def local_polar_rule(a: float, rho_lo: float, rho_hi: float, levels: int = 30, order: int = 8,
                     singular_phi=()) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Rule for {z in D : rho_lo < |e^{ia} - z| < rho_hi} with measure dxi dr.

    Points are written z = e^{ia} (1 - rho e^{i phi}) with |phi| < pi/2, which
    covers the disc for 0 < rho < 2 cos(phi); then dxi dr = (rho / r) drho dphi.
    Returns flattened (r, xi, weight) arrays.
    """
    half = np.pi / 2
    phi_end = half if rho_lo <= 0 else math.acos(min(rho_lo / 2, 1.0))
    marks = [0.0, phi_end, -phi_end]
    if rho_hi < 2:
        cut = math.acos(rho_hi / 2)
        if cut < phi_end:
            marks += [cut, -cut]
    marks += [p for p in singular_phi if abs(p) < phi_end]
    pts = list(np.linspace(-phi_end, phi_end, 9))
    for m in marks:
        steps = (phi_end / 4) * 0.5 ** np.arange(levels + 1)
        pts.append(m)
        pts.extend(m + steps)
        pts.extend(m - steps)
    pts = [p for p in pts if -phi_end <= p <= phi_end]
    phi, wphi = panel_rule(_unique_sorted(pts, -phi_end, phi_end), order)

    s, ws = panel_rule(graded_breaks(0.0, 1.0, levels), order)
    rho_up = np.minimum(rho_hi, 2 * np.cos(phi))
    span = np.clip(rho_up - rho_lo, 0.0, None)
    rho = rho_lo + span[:, None] * s
    w = (wphi * span)[:, None] * ws
    zeta = 1 - rho * np.exp(1j * phi[:, None])
    r = np.abs(zeta)
    xi = a + np.angle(zeta)
    w = w * rho / r
    keep = (w > 0) & (r < 1)
    return r[keep], xi[keep] % TWO_PI, w[keep]


def cheb_nodes(n: int, lo: float, hi: float) -> np.ndarray:
    """Chebyshev points of the first kind mapped to [lo, hi]."""
    k = np.arange(n)
    x = np.cos(np.pi * (k + 0.5) / n)
    return lo + (hi - lo) * (x + 1) / 2


def cheb_interpolant(values: np.ndarray, lo: float, hi: float):
    """Polynomial through ``values`` sampled at ``cheb_nodes(len(values), lo, hi)``."""
    n = len(values)
    x = np.cos(np.pi * (np.arange(n) + 0.5) / n)
    coef = np.polynomial.chebyshev.chebfit(x, values, n - 1)

    def f(t):
        return np.polynomial.chebyshev.chebval(2 * (np.asarray(t) - lo) / (hi - lo) - 1, coef)

    return f


def _interval_breaks(lo: float, hi: float, levels: int, uniform: int, singular=()) -> np.ndarray:
    length = hi - lo
    steps = length * 0.5 ** np.arange(1, levels + 1)
    pts = list(np.linspace(lo, hi, uniform + 1)) + list(lo + steps) + list(hi - steps)
    spread = length / 8
    for s in singular:
        if lo < s < hi:
            pts.append(s)
            pts.extend(s + spread * 0.5 ** np.arange(levels))
            pts.extend(s - spread * 0.5 ** np.arange(levels))
    return _unique_sorted([p for p in pts if lo <= p <= hi], lo, hi)


def boundary_region_rule(a: float, radius: float, inside: bool, levels: int = 24, order: int = 8,
                         uniform: int = 8, singular=()) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Rule for {z in D : |e^{ia} - z| > radius} (or <= radius when ``inside``).

    Works in (u, xi) with u = 1 - r and measure dxi dr. For fixed u the region
    is an arc |xi - a| >= t*(u) (resp. <=), where
    1 - cos t* = (radius^2 - u^2) / (2 (1 - u)); each u node gets its own
    angular rule graded toward the arc ends and toward ``singular`` angles.
    The layer u < 2^-levels is dropped. Returns flattened (u, xi, weight).
    """
    ub = [0.5**levels] + list(0.5 ** np.arange(levels - 1, -1, -1))
    if 0.5**levels < radius < 1:
        ub.append(radius)
    u, wu = panel_rule(_unique_sorted(ub, 0.5**levels, 1.0), order)
    sing = [((s - a + np.pi) % TWO_PI) - np.pi for s in singular]
    out_u, out_x, out_w = [], [], []
    for ui, wi in zip(u, wu):
        c = (radius * radius - ui * ui) / (2 * (1 - ui))
        if c <= 0:
            lo, hi = (None, None) if inside else (-np.pi, np.pi)
        elif c >= 2:
            lo, hi = (-np.pi, np.pi) if inside else (None, None)
        else:
            t = math.acos(1 - c)
            lo, hi = (-t, t) if inside else (t, TWO_PI - t)
        if lo is None:
            continue
        local = [s if s >= lo else s + TWO_PI for s in sing]
        x, w = panel_rule(_interval_breaks(lo, hi, levels, uniform, local), order)
        out_u.append(np.full(x.size, ui))
        out_x.append((a + x) % TWO_PI)
        out_w.append(w * wi)
    return np.concatenate(out_u), np.concatenate(out_x), np.concatenate(out_w)
