"""One-dimensional and product weights, and numerical weight-class tests.

Class tests return finite-resolution verdicts. Each samples a supremum on a
base grid and on a refined grid (twice as deep and twice as dense; weights
that carry their own approximation parameter, such as a truncation level,
are refined as well). A class passes when the refined constant is finite and
differs from the base constant by less than ``STABILITY`` (relative).
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import NonIntegrable
from .quadrature import graded_integral, integrate_from_zero

TWO_PI = 2.0 * np.pi
STABILITY = 0.05


@dataclass(frozen=True, eq=False)
class Weight1D:
    """A nonnegative weight on (0, domain].

    ``antiderivative`` (if given) is any primitive valid on (0, domain];
    ``integrable_at_zero`` tells ``weight_measure`` whether an interval may
    start at 0. ``refine`` returns the next member of an approximating family.
    """

    func: Callable[[np.ndarray], np.ndarray]
    name: str
    domain: float = TWO_PI
    antiderivative: Callable[[np.ndarray], np.ndarray] | None = None
    integrable_at_zero: bool = True
    breaks: tuple[float, ...] = ()
    spec: object = None
    refine: Callable[[], "Weight1D"] | None = field(default=None, repr=False)
    probe: bool = field(default=True, repr=False)

    def __post_init__(self):
        if not self.domain > 0:
            raise ValueError("domain must be positive")
        if self.probe and self.antiderivative is None:
            # rejects non-integrable singularities at 0 early
            _measure_from_zero(self, self.domain)

    def __call__(self, t):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return self.func(np.asarray(t, dtype=float))

    def refined(self) -> Weight1D:
        return self.refine() if self.refine is not None else self

    def power_of(self, q: float) -> Weight1D:
        """The weight t -> w(t)**q (used for the dual weight in A_p)."""
        if isinstance(self.spec, str) and self.spec.startswith("power:"):
            alpha, scale = _power_params(self)
            return power(alpha * q, scale=scale**q, domain=self.domain, _strict=False)
        base = self.func
        return Weight1D(lambda t: base(t) ** q, f"({self.name})^{q:g}", self.domain,
                        breaks=self.breaks, probe=False)

    def to_json(self):
        if self.spec is None:
            raise ValueError(f"weight {self.name!r} has no serializable spec")
        return self.spec


def _power_params(w: Weight1D) -> tuple[float, float]:
    return w._alpha, w._scale  # type: ignore[attr-defined]


def power(alpha: float, scale: float = 1.0, domain: float = TWO_PI, _strict: bool = True) -> Weight1D:
    """w(t) = scale * t**alpha."""
    alpha = float(alpha)
    if _strict and alpha <= -1:
        raise NonIntegrable(f"t^{alpha:g} is not integrable at 0")
    beta = alpha + 1

    if beta == 0:
        def anti(t):
            return scale * np.log(t)
    else:
        def anti(t):
            return scale * np.power(t, beta) / beta

    spec = f"power:{alpha:g}" if scale == 1.0 else f"power:{alpha:g}:{scale!r}"
    if domain != TWO_PI:
        spec += f"@{domain!r}"
    w = Weight1D(lambda t: scale * np.power(t, alpha), f"t^{alpha:g}" if scale == 1 else f"{scale:g}*t^{alpha:g}",
                 domain, anti, integrable_at_zero=beta > 0, spec=spec)
    object.__setattr__(w, "_alpha", alpha)
    object.__setattr__(w, "_scale", float(scale))
    return w


def constant(c: float = 1.0, domain: float = TWO_PI) -> Weight1D:
    return power(0.0, scale=c, domain=domain)


def indicator(lo: float, hi: float, domain: float = 1.0) -> Weight1D:
    """Characteristic function of [lo, hi]."""

    def anti(t):
        return np.clip(t, lo, hi) - lo

    spec = f"indicator:{lo!r}:{hi!r}@{domain!r}"
    return Weight1D(lambda t: ((t >= lo) & (t <= hi)).astype(float), f"1[{lo:g},{hi:g}]", domain, anti,
                    breaks=(lo, hi), spec=spec)


def exp_inverse(cutoff: float = 0.05, domain: float = 1.0) -> Weight1D:
    """exp(1/t) truncated below ``cutoff``; refining halves the cutoff."""
    spec = f"expinv:{cutoff!r}@{domain!r}"
    return Weight1D(lambda t: np.exp(1.0 / np.maximum(t, cutoff)), f"exp(1/max(t,{cutoff:g}))", domain,
                    breaks=(cutoff,), spec=spec, refine=lambda: exp_inverse(cutoff / 2, domain))


def exp_decay(domain: float = 1.0) -> Weight1D:
    """exp(-1/t): flat to infinite order at 0."""
    return Weight1D(lambda t: np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0), "exp(-1/t)",
                    domain, spec=f"expdecay@{domain!r}")


def table(ts, ws, name: str = "table") -> Weight1D:
    """Piecewise-linear weight through the points (ts[i], ws[i]), ts[0] = 0."""
    t = np.asarray(ts, dtype=float)
    v = np.asarray(ws, dtype=float)
    if t.ndim != 1 or t.shape != v.shape or t.size < 2:
        raise ValueError("table needs matching 1-D arrays with at least two points")
    if t[0] != 0 or np.any(np.diff(t) <= 0):
        raise ValueError("table abscissae must start at 0 and increase")
    if np.any(v < 0):
        raise ValueError("weights must be nonnegative")
    cum = np.concatenate([[0.0], np.cumsum(np.diff(t) * (v[1:] + v[:-1]) / 2)])
    slope = np.diff(v) / np.diff(t)

    def anti(x):
        x = np.clip(x, t[0], t[-1])
        i = np.clip(np.searchsorted(t, x, side="right") - 1, 0, t.size - 2)
        dx = x - t[i]
        return cum[i] + v[i] * dx + 0.5 * slope[i] * dx * dx

    spec = {"table": [[float(a), float(b)] for a, b in zip(t, v)]}
    return Weight1D(lambda x: np.interp(x, t, v), name, float(t[-1]), anti, breaks=tuple(t[1:-1]), spec=spec)


def table_from_csv(path) -> Weight1D:
    """Load a (t, w) table; a header row is allowed."""
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            try:
                rows.append((float(row[0]), float(row[1])))
            except ValueError:
                if rows:
                    raise
    if not rows:
        raise ValueError(f"no numeric rows in {path}")
    ts, ws = zip(*rows)
    return table(ts, ws, name=str(path))


def parse_weight(spec) -> Weight1D:
    """Build a weight from its serialized form.

    Strings: ``power:ALPHA[:SCALE]``, ``const:C``, ``indicator:LO:HI``,
    ``expinv:CUTOFF``, ``expdecay``, ``table:PATH``; any of them may end in
    ``@DOMAIN``. Dicts of the form ``{"table": [[t, w], ...]}`` are tables.
    """
    if isinstance(spec, dict):
        if set(spec) != {"table"}:
            raise ValueError(f"unknown weight object keys {sorted(spec)}")
        ts, ws = zip(*spec["table"])
        return table(ts, ws)
    if not isinstance(spec, str):
        raise ValueError(f"cannot parse weight {spec!r}")
    body, _, dom = spec.partition("@")
    kind, *args = body.split(":")
    kw = {"domain": float(dom)} if dom else {}
    try:
        if kind == "power" and len(args) in (1, 2):
            return power(float(args[0]), *(float(a) for a in args[1:]), **kw)
        if kind == "const" and len(args) == 1:
            return constant(float(args[0]), **kw)
        if kind == "indicator" and len(args) == 2:
            return indicator(float(args[0]), float(args[1]), **kw)
        if kind == "expinv" and len(args) <= 1:
            return exp_inverse(*(float(a) for a in args), **kw)
        if kind == "expdecay" and not args:
            return exp_decay(**kw)
        if kind == "table" and len(args) >= 1 and not dom:
            return table_from_csv(":".join(args))
    except (TypeError, ValueError, OSError) as exc:
        raise ValueError(f"bad weight spec {spec!r}: {exc}") from None
    raise ValueError(f"bad weight spec {spec!r}")


def _measure_from_zero(w: Weight1D, hi: float) -> float:
    inner = [b for b in w.breaks if 0 < b < hi]
    first = min(inner) if inner else hi
    total = integrate_from_zero(w, first)
    if first < hi:
        total += graded_integral(w, first, hi, breaks=w.breaks)
    return total


def weight_measure(w: Weight1D, interval) -> float:
    """w([lo, hi]) = integral of w over the interval."""
    lo, hi = (float(x) for x in interval)
    if not 0 <= lo < hi or hi > w.domain * (1 + 1e-12):
        raise ValueError(f"interval [{lo}, {hi}] not inside (0, {w.domain}]")
    if w.antiderivative is not None:
        if lo == 0 and not w.integrable_at_zero:
            raise NonIntegrable(f"{w.name} is not integrable at 0")
        a = w.antiderivative(np.array([lo, hi]))
        if lo == 0 and w.integrable_at_zero:
            with np.errstate(divide="ignore", invalid="ignore"):
                a0 = w.antiderivative(np.array([0.0]))[0]
            a[0] = a0 if np.isfinite(a0) else 0.0
        return float(a[1] - a[0])
    if lo == 0:
        return _measure_from_zero(w, hi)
    return graded_integral(w, lo, hi, breaks=w.breaks)


@dataclass(frozen=True)
class ProductWeight:
    """w(xi) = prod_j w_j(xi_j)."""

    factors: tuple[Weight1D, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise ValueError("need at least one factor")

    @classmethod
    def power(cls, alpha: float, d: int, domain: float = TWO_PI) -> ProductWeight:
        return cls(tuple(power(alpha, domain=domain) for _ in range(d)))

    @classmethod
    def lebesgue(cls, d: int) -> ProductWeight:
        return cls.power(0.0, d)

    @property
    def d(self) -> int:
        return len(self.factors)

    def __call__(self, points) -> np.ndarray:
        x = np.asarray(points, dtype=float)
        out = np.ones(x.shape[:-1])
        for j, f in enumerate(self.factors):
            out = out * f(x[..., j])
        return out

    def measure(self, cube) -> float:
        lo, hi = cube.lower, cube.upper
        return math.prod(weight_measure(f, (max(lo[j], 0.0), hi[j])) for j, f in enumerate(self.factors))

    def to_json(self) -> list:
        return [f.to_json() for f in self.factors]

    @classmethod
    def from_json(cls, obj) -> ProductWeight:
        return cls(tuple(parse_weight(s) for s in obj))


# --- class tests -----------------------------------------------------------

@dataclass
class ClassReport:
    name: str
    passed: bool
    constant: float
    witness: dict
    resolution: dict
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"class": self.name, "passed": self.passed, "constant": self.constant,
                "witness": self.witness, "resolution": self.resolution, "detail": self.detail}


def _stable(coarse: float, fine: float) -> bool:
    if not (np.isfinite(coarse) and np.isfinite(fine)):
        return False
    return abs(fine - coarse) <= STABILITY * abs(fine)


def _log_grid(octaves: int, per_octave: int) -> np.ndarray:
    return 2.0 ** -np.linspace(0, octaves, octaves * per_octave + 1)


def _sup(values, points) -> tuple[float, float]:
    v = np.asarray(values, dtype=float)
    v = np.where(np.isnan(v), np.inf, v)
    i = int(np.argmax(v))
    return float(v[i]), points[i]


def is_dini(w: Weight1D, m: int = 1, octaves: int = 20, per_octave: int = 2) -> ClassReport:
    """Dini class of order m: int_0^u w(t)/t^m dt <= C w(u) on (0, 1)."""
    results = []
    for k, wk in ((1, w), (2, w.refined())):
        u = _log_grid(octaves * k, per_octave * k)

        def g(t, wk=wk):
            return wk(t) / t**m

        num = np.array([integrate_from_zero(g, ui) for ui in u])
        with np.errstate(divide="ignore", invalid="ignore"):
            results.append((_sup(num / wk(u), list(u)), u.size))
    (c0, _), _ = results[0]
    (c1, u_star), n1 = results[1]
    return ClassReport(f"dini:{m}", _stable(c0, c1), c1, {"u": u_star},
                       {"u_min": 2.0 ** (-2 * octaves), "points": n1}, {"constant_coarse": c0})


def is_Bn(w: Weight1D, n: int = 2, octaves: int = 20, per_octave: int = 2) -> ClassReport:
    """Class B_n: increasing, w(0) = 0, and u^n int_u^1 w/t^{n+1} <= C w(u)."""
    grid = np.union1d(_log_grid(2 * octaves, 2 * per_octave), np.linspace(0, 1, 257)[1:])
    vals = w(grid)
    monotone = bool(np.all(np.diff(vals) >= -1e-12 * np.max(np.abs(vals))))
    w0 = float(w(np.array([0.0]))[0])
    vanishes = bool(np.isfinite(w0) and abs(w0) <= 1e-12 * np.max(np.abs(vals)))

    results = []
    for k, wk in ((1, w), (2, w.refined())):
        u = _log_grid(octaves * k, per_octave * k)[1:]

        def g(t, wk=wk):
            return wk(t) / t ** (n + 1)

        tail = np.array([graded_integral(g, ui, 1.0, grade_hi=False) for ui in u])
        with np.errstate(divide="ignore", invalid="ignore"):
            results.append(_sup(u**n * tail / wk(u), list(u)))
    (c0, _), (c1, u_star) = results
    growth = _stable(c0, c1)
    return ClassReport(f"bn:{n}", monotone and vanishes and growth, c1, {"u": u_star},
                       {"u_min": 2.0 ** (-2 * octaves), "points": 2 * octaves * per_octave * 2},
                       {"monotone": monotone, "vanishes_at_0": vanishes, "w0": w0,
                        "growth_bounded": growth, "constant_coarse": c0})


def _intervals(T: float, levels: int, centers: int):
    for lev in range(1, levels + 1):
        length = T * 0.5**lev
        for c in np.linspace(length / 2, T - length / 2, centers):
            yield float(c), length / 2


def _zero_to(g, u: float, breaks=()) -> float:
    """int_0^u g for g singular at 0 and sharply varying near u."""
    if u <= 0:
        return 0.0
    inner = [b for b in breaks if 0 < b < u / 2]
    first = min(inner) if inner else u / 2
    total = integrate_from_zero(g, first)
    return total + graded_integral(g, first, u, grade_lo=False, grade_hi=True, breaks=breaks)


def calBp_ratio(w: Weight1D, c: float, h: float, p: float) -> float:
    """(|J|^p / w(J)) int_{J^c} w(t)/|t - c|^p dt for J = [c-h, c+h] inside (0, domain]."""
    T = w.domain
    lo, hi = max(c - h, 0.0), min(c + h, T)
    wJ = weight_measure(w, (lo, hi))
    if wJ <= 0:
        return np.inf

    def left(t):
        return w(t) / (c - t) ** p

    def right(t):
        return w(t) / (t - c) ** p

    try:
        outside = _zero_to(left, lo, w.breaks)
    except NonIntegrable:
        return np.inf
    if hi < T:
        outside += graded_integral(right, hi, T, grade_lo=True, grade_hi=False, breaks=w.breaks)
    return (2 * h) ** p / wJ * outside


def is_calBp(w: Weight1D, p: float = 2.0, levels: int = 10, centers: int = 64) -> ClassReport:
    """Class B_p sampled on dyadic intervals of the weight's domain."""
    results = []
    for k, wk in ((1, w), (2, w.refined())):
        pts = list(_intervals(wk.domain, levels * k, centers * k))
        vals = [calBp_ratio(wk, c, h, p) for c, h in pts]
        results.append((_sup(vals, pts), len(pts)))
    (c0, _), _ = results[0]
    (c1, (cs, hs)), n1 = results[1]
    return ClassReport(f"calbp:{p:g}", _stable(c0, c1), c1, {"center": cs, "halfwidth": hs},
                       {"min_length": w.domain * 0.5 ** (2 * levels), "intervals": n1},
                       {"constant_coarse": c0})


def is_doubling(w: Weight1D, levels: int = 10, centers: int = 64) -> ClassReport:
    """sup w(Q_2h(x)) / w(Q_h(x)) with Q_h(x) = [x-h, x+h] clipped to the domain."""
    results = []
    for k, wk in ((1, w), (2, w.refined())):
        T = wk.domain
        pts, vals = [], []
        for x in np.linspace(0, T, centers * k):
            for lev in range(1, levels * k + 1):
                h = T * 0.5**lev
                small = weight_measure(wk, (max(x - h, 0.0), min(x + h, T)))
                big = weight_measure(wk, (max(x - 2 * h, 0.0), min(x + 2 * h, T)))
                if small > 0:
                    vals.append(big / small)
                elif big > 0:
                    vals.append(np.inf)
                else:
                    continue
                pts.append((float(x), h))
        results.append((_sup(vals, pts), len(pts)))
    (c0, _), _ = results[0]
    (c1, (xs, hs)), n1 = results[1]
    return ClassReport("doubling", _stable(c0, c1), c1, {"x": xs, "h": hs},
                       {"min_h": w.domain * 0.5 ** (2 * levels), "samples": n1}, {"constant_coarse": c0})


def is_muckenhoupt(w: Weight1D, p: float = 2.0, levels: int = 10, centers: int = 64) -> ClassReport:
    """A_p: sup over intervals of avg(w) * avg(w^{1/(1-p)})^{p-1}."""
    if not p > 1:
        raise ValueError("p must exceed 1")
    results = []
    for k, wk in ((1, w), (2, w.refined())):
        dual = wk.power_of(1.0 / (1.0 - p))
        pts = list(_intervals(wk.domain, levels * k, centers * k))
        vals = []
        for c, h in pts:
            lo, hi = max(c - h, 0.0), min(c + h, wk.domain)
            try:
                a = weight_measure(wk, (lo, hi)) / (hi - lo)
                b = weight_measure(dual, (lo, hi)) / (hi - lo)
                v = a * b ** (p - 1)
            except NonIntegrable:
                v = np.inf
            vals.append(v if np.isfinite(v) else np.inf)
        results.append((_sup(vals, pts), len(pts)))
    (c0, _), _ = results[0]
    (c1, (cs, hs)), n1 = results[1]
    return ClassReport(f"ap:{p:g}", _stable(c0, c1), c1, {"center": cs, "halfwidth": hs},
                       {"min_length": w.domain * 0.5 ** (2 * levels), "intervals": n1},
                       {"constant_coarse": c0})
