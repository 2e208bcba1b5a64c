"""Numerical checks of the kernel bounds, the weighted integral lemmas, and the norm comparison.

Every check returns a ``CheckResult``; all randomness comes from
``numpy.random.default_rng(seed)`` and every reduction has a fixed order, so
a result is a pure function of its arguments.

Boundedness "as h -> 0" is judged on a dyadic sweep h = 2^-2 .. 2^-6 by the
log-log slope over the last three points: a ratio that must stay bounded
above may not grow faster than h^-SLOPE_TOL, one that must stay bounded below
may not decay faster than h^SLOPE_TOL.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .atoms import AtomicFunction, SpecialAtom
from .errors import NonIntegrable, NonIntegrableWeight, PreconditionFailed, ToleranceNotMet
from .extension import (
    ANGULAR,
    RADIAL,
    ExtensionProvider,
    QuadratureSpec,
    _disc_nodes,
    aw_norm,
    check_radial_weight,
)
from .geometry import Cube, axis_pattern, checkerboard_pattern
from .kernels import TWO_PI, grad_components, k1, k2, kappa
from .quadrature import boundary_region_rule, graded_integral, integrate_from_zero
from .weights import (
    ProductWeight,
    Weight1D,
    _zero_to,
    is_Bn,
    is_calBp,
    is_dini,
    is_doubling,
    power,
    table,
    weight_measure,
)

K2_BOUND = 3 * math.sqrt(4 * math.log(2) ** 2 + math.pi**2)
K2_BOUND_FAR = 8 * math.sqrt(math.log(2) ** 2 + math.pi**2 / 4)
STABILITY = 0.05
SLOPE_TOL = 0.1
H_SWEEP = tuple(2.0**-k for k in range(2, 7))
DIVERGENCE_LEVELS = (12, 24, 48)


@dataclass
class CheckResult:
    name: str
    passed: bool
    observed: float
    bound: float
    samples: int
    witness: dict = field(default_factory=dict)
    seed: int | None = None
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "observed": self.observed, "bound": self.bound,
                "samples": self.samples, "witness": self.witness, "seed": self.seed, "detail": self.detail}


def thread_count() -> int:
    try:
        n = int(os.environ.get("ATOMLAB_THREADS", "1"))
    except ValueError:
        n = 1
    return max(1, n)


def parallel_map(fn, items) -> list:
    """Ordered map; ATOMLAB_THREADS workers (results keep input order)."""
    items = list(items)
    n = thread_count()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _slope(hs, vals) -> float:
    """Least-squares slope of log(val) against log(h) over the last three points."""
    x = np.log(np.asarray(hs[-3:]))
    y = np.log(np.asarray(vals[-3:]))
    return float(np.polyfit(x, y, 1)[0])


def diverges(values) -> bool:
    """True when a refinement sequence keeps growing without contracting increments."""
    v = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(v)):
        return True
    inc = np.diff(v)
    if np.any(inc <= 0):
        return False
    return bool(inc[-1] >= 0.5 * inc[-2] and inc[-1] > STABILITY * abs(v[-2]))


def _stable(a: float, b: float) -> bool:
    return bool(np.isfinite(a) and np.isfinite(b) and abs(b - a) <= STABILITY * abs(b))


# --- kernel bounds ------------------------------------------------------------

def _sample_kernel_args(rng, n: int):
    h = rng.uniform(0, np.pi, n)
    h = np.where(h == 0, np.pi, h)
    a = rng.uniform(h, TWO_PI - h)
    z = np.sqrt(rng.uniform(0, 1, n)) * np.exp(1j * rng.uniform(0, TWO_PI, n))
    return a, h, z


def check_k_bounds(samples: int = 10_000, seed: int = 0) -> CheckResult:
    """|K2| <= 3 sqrt(4 ln^2 2 + pi^2) everywhere and |K1| <= (8/3) h^2/|e^{ia}-z|^3 where |e^{ia}-z| > 2h."""
    rng = np.random.default_rng(seed)
    a, h, z = _sample_kernel_args(rng, samples)
    K2 = np.abs(k2(a, h, z))
    dist = np.abs(np.exp(1j * a) - z)
    far = dist > 2 * h
    env = (8.0 / 3.0) * h**2 / dist**3
    ratio = np.where(far, np.abs(k1(a, h, z)) / env, 0.0)
    k2_bad = int(np.sum(K2 > K2_BOUND))
    k1_bad = int(np.sum(ratio > 1))
    i2 = int(np.argmax(K2))
    i1 = int(np.argmax(ratio))
    scaled = np.abs(k1(a, h, z))[far] / h[far] ** 2
    return CheckResult(
        "k-bounds", k2_bad == 0 and k1_bad == 0, float(K2[i2]), K2_BOUND, samples,
        {"k2": {"a": float(a[i2]), "h": float(h[i2]), "z": [float(z[i2].real), float(z[i2].imag)]},
         "k1": {"a": float(a[i1]), "h": float(h[i1]), "z": [float(z[i1].real), float(z[i1].imag)]}},
        seed,
        {"k2_max": float(K2[i2]), "k2_violations": k2_bad, "k1_envelope_max_ratio": float(ratio[i1]),
         "k1_violations": k1_bad, "k1_samples_far": int(far.sum()),
         "k1_over_h2_max_far": float(scaled.max()) if scaled.size else 0.0})


def check_k2_far(samples: int = 10_000, seed: int = 0) -> CheckResult:
    """|K2| <= 8 sqrt(ln^2 2 + pi^2/4) when z stays 1/2 away from e^{i(a-h)}, e^{ia}, e^{i(a+h)}.

    There |1 - z e^{-i theta}| lies in [1/2, 2) and its argument in (-pi/2, pi/2),
    which bounds each logarithm in K2.
    """
    rng = np.random.default_rng(seed)
    a, h, z = _sample_kernel_args(rng, 4 * samples)
    dmin = np.min(np.abs(np.exp(1j * np.stack([a - h, a, a + h])) - z), axis=0)
    keep = np.flatnonzero(dmin >= 0.5)[:samples]
    K2 = np.abs(k2(a[keep], h[keep], z[keep]))
    i = int(np.argmax(K2))
    bad = int(np.sum(K2 > K2_BOUND_FAR))
    return CheckResult("k2-far", bad == 0, float(K2[i]), K2_BOUND_FAR, int(keep.size),
                       {"a": float(a[keep][i]), "h": float(h[keep][i]),
                        "z": [float(z[keep][i].real), float(z[keep][i].imag)]}, seed, {"violations": bad})


def k1_lower_envelopes(a, h, z):
    """(|K1|, (2-h)(h^2-h^4/12)/|u|^3, (2-|u|)(h^2-h^4/12)/(|u|(|u|^2+h^2))), u = e^{ia}-z."""
    dist = np.abs(np.exp(1j * np.asarray(a)) - z)
    core = h**2 - h**4 / 12
    return np.abs(k1(a, h, z)), (2 - h) * core / dist**3, (2 - dist) * core / (dist * (dist**2 + h**2))


def check_k1_lower(samples: int = 10_000, seed: int = 0, form: str = "mixed") -> CheckResult:
    """Sampled lower envelope for |K1| on {h < |e^{ia} - z|}.

    ``form="cubic"`` uses (2-h)(h^2-h^4/12)/|u|^3; ``form="mixed"`` uses
    (2-|u|)(h^2-h^4/12)/(|u|(|u|^2+h^2)), which follows from
    |K1| = 2(1-cos h)|E+z| / (|(E-z)^2 + 2Ez(1-cos h)| |E-z|) with |E+z| >= 2-|u|
    and |(E-z)^2 + 2Ez(1-cos h)| <= |u|^2 + h^2.
    """
    if form not in ("cubic", "mixed"):
        raise ValueError("form must be 'cubic' or 'mixed'")
    rng = np.random.default_rng(seed)
    a, h, z = _sample_kernel_args(rng, 4 * samples)
    keep = np.flatnonzero(np.abs(np.exp(1j * a) - z) > h)[:samples]
    a, h, z = a[keep], h[keep], z[keep]
    val, cubic, mixed = k1_lower_envelopes(a, h, z)
    env = cubic if form == "cubic" else mixed
    ratio = val / env
    i = int(np.argmin(ratio))
    bad = int(np.sum(ratio < 1 - 1e-12))
    return CheckResult(f"k1-lower-{form}", bad == 0, float(ratio[i]), 1.0, int(keep.size),
                       {"a": float(a[i]), "h": float(h[i]), "z": [float(z[i].real), float(z[i].imag)]}, seed,
                       {"violations": bad, "violation_fraction": bad / max(1, keep.size)})


# --- lemma 3 ------------------------------------------------------------------

def _class_ok(w: Weight1D, mode: str) -> dict:
    if mode == ANGULAR:
        rep = is_calBp(w, 2.0)
        if not rep.passed:
            raise PreconditionFailed(f"{w.name} fails the B_2 test (C={rep.constant:.4g})")
        return {"calbp:2": rep.constant}
    check_radial_weight(ProductWeight((w,)))
    try:
        dini = is_dini(w, 1)
    except NonIntegrable as exc:
        raise NonIntegrableWeight(str(exc)) from None
    bn = is_Bn(w, 2)
    if not (dini.passed and bn.passed):
        raise PreconditionFailed(f"{w.name} fails D_1 or B_2 (dini {dini.passed}, bn {bn.passed})")
    return {"dini:1": dini.constant, "bn:2": bn.constant}


def lemma3_integral(w: Weight1D, mode: str, a: float, h: float, levels: int = 24, order: int = 8,
                    uniform: int = 16) -> float:
    """int int_D |K1(a, h, z)| w dxi dr with the mode's weight."""
    sing = [a - h, a, a + h] + ([0.0] if mode == ANGULAR else [])
    u, wu, xi, wxi = _disc_nodes(sing, levels, order, uniform)
    z = (1 - u)[:, None] * np.exp(1j * xi)[None, :]
    W = wu[:, None] * wxi[None, :] * (w(xi)[None, :] if mode == ANGULAR else (w(u) / u)[:, None])
    return float(np.sum(np.abs(k1(a, h, z)) * W))


def _lemma_grid(hs):
    return [(a, h) for h in hs for a in (np.pi / 2, np.pi, 3 * np.pi / 2)]


def check_lemma3(w: Weight1D, mode: str = ANGULAR, hs=H_SWEEP, q: QuadratureSpec = QuadratureSpec(),
                 require_class: bool = True) -> CheckResult:
    """Finiteness and refinement stability of the weighted K1 integral over an (a, h) grid.

    Reports I / w(J) for each configuration.
    """
    classes = _class_ok(w, mode) if require_class else {}
    fine = q.refined()
    rows = []
    for a, h in _lemma_grid(hs):
        base = lemma3_integral(w, mode, a, h, q.levels, q.order, q.nodes_per_axis)
        ref = lemma3_integral(w, mode, a, h, fine.levels, fine.order, fine.nodes_per_axis)
        wJ = weight_measure(w, (a - h, a + h))
        rows.append({"a": a, "h": h, "integral": ref, "coarse": base, "ratio": ref / wJ,
                     "stable": _stable(base, ref)})
    ok = all(r["stable"] for r in rows)
    worst = max(rows, key=lambda r: abs(r["integral"] - r["coarse"]) / abs(r["integral"]))
    name = f"lemma3-{mode}-{w.name}" + ("" if require_class else "-ungated")
    return CheckResult(name, ok, max(r["ratio"] for r in rows), math.inf, len(rows),
                       {"a": worst["a"], "h": worst["h"]}, None,
                       {"weight": w.name, "classes": classes, "rows": rows})


def lemma3_divergence(w: Weight1D, a: float = np.pi, h: float = 0.25, levels=DIVERGENCE_LEVELS) -> dict:
    """Radial-mode K1 integral truncated at u = 2^-L for growing L."""
    vals = [lemma3_integral(w, RADIAL, a, h, L) for L in levels]
    return {"levels": list(levels), "values": vals, "diverges": diverges(vals)}


# --- lemma 4 ------------------------------------------------------------------

LEMMA4_PARTNER = (2.0, 0.5)  # (a_l, h_l) of the undifferentiated coordinates
LEMMA4_PARTNER_Z = -0.5      # z_l = LEMMA4_PARTNER_Z * e^{i a_l}


def lemma4_lhs(w: Weight1D, a: float, h: float, lower: float = 0.0) -> float:
    """(h^2 / w(J)) int_{(lower, 2pi) minus J} w(t)/t^2 dt."""

    def g(t):
        return w(t) / t**2

    left = graded_integral(g, lower, a - h, grade_lo=True, grade_hi=False) if lower > 0 else _zero_to(g, a - h, w.breaks)
    right = graded_integral(g, a + h, TWO_PI, grade_lo=True, grade_hi=False, breaks=w.breaks)
    return h * h / weight_measure(w, (a - h, a + h)) * (left + right)


def _lemma4_atom(weight: ProductWeight, a: float, h: float) -> SpecialAtom:
    d = weight.d
    centers = (a,) + (LEMMA4_PARTNER[0],) * (d - 1)
    halves = (h,) + (LEMMA4_PARTNER[1],) * (d - 1)
    return SpecialAtom(Cube(centers, halves), checkerboard_pattern(d), weight)


def lemma4_rhs(weight: ProductWeight, a: float, h: float, levels: int = 24, order: int = 8) -> float:
    """int int_{h < |e^{ia} - z_1|} |f_1(z)| dxi_1 dr_1, other coordinates fixed."""
    atom = _lemma4_atom(weight, a, h)
    u, xi, wt = boundary_region_rule(a, h, inside=False, levels=levels, order=order, singular=(a - h, a + h))
    z = np.empty((u.size, weight.d), dtype=complex)
    z[:, 0] = (1 - u) * np.exp(1j * xi)
    z[:, 1:] = LEMMA4_PARTNER_Z * np.exp(1j * LEMMA4_PARTNER[0])
    return float(np.sum(np.abs(grad_components(atom, z)[:, 0]) * wt))


def check_lemma4(weight: ProductWeight, hs=H_SWEEP, q: QuadratureSpec = QuadratureSpec()) -> CheckResult:
    """LHS <= C * RHS with a C that stays bounded along the h sweep."""
    for f in weight.factors:
        try:
            integrate_from_zero(lambda t, f=f: f(t) / t**2, 1.0)
        except NonIntegrable as exc:
            raise PreconditionFailed(f"w(t)/t^2 is not integrable near 0 for {f.name}: {exc}") from None
    w = weight.factors[0]
    fine = q.refined()
    rows = []
    for a, h in _lemma_grid(hs):
        lhs = lemma4_lhs(w, a, h)
        base = lhs / lemma4_rhs(weight, a, h, q.levels, q.order)
        ref = lhs / lemma4_rhs(weight, a, h, fine.levels, fine.order)
        rows.append({"a": a, "h": h, "lhs": lhs, "ratio": ref, "coarse": base, "stable": _stable(base, ref)})
    slopes = {}
    for a in sorted({r["a"] for r in rows}):
        sub = [r for r in rows if r["a"] == a]
        slopes[repr(a)] = _slope([r["h"] for r in sub], [r["ratio"] for r in sub])
    bounded = all(s >= -SLOPE_TOL for s in slopes.values())
    ok = bounded and all(r["stable"] and r["ratio"] > 0 for r in rows)
    top = max(rows, key=lambda r: r["ratio"])
    return CheckResult(f"lemma4-d{weight.d}", ok, float(top["ratio"]), math.inf, len(rows), {"a": top["a"], "h": top["h"]},
                       None, {"weight": [f.name for f in weight.factors], "slopes": slopes,
                              "bounded_above": bounded, "rows": rows})


def lemma4_divergence(w: Weight1D, a: float = np.pi, h: float = 0.25, levels=DIVERGENCE_LEVELS) -> dict:
    """LHS with the integral cut at t = 2^-L: grows without bound when w/t^2 is not integrable."""
    vals = [lemma4_lhs(w, a, h, lower=0.5**L) for L in levels]
    return {"levels": list(levels), "values": vals, "diverges": diverges(vals)}


# --- lemma 5 ------------------------------------------------------------------

def _lemma5_lhs(w: Weight1D, a: float, h: float, region: str, levels: int, order: int, check: bool = True) -> float:
    atom = SpecialAtom(Cube((a,), (h,)), checkerboard_pattern(1), ProductWeight((w,)))
    if region == "D1":
        u, xi, wt = boundary_region_rule(a, h, False, levels, order, singular=(a - h, a + h))
    else:
        u, xi, wt = boundary_region_rule(a, h / 4, True, levels, order, singular=(a,))
    z = ((1 - u) * np.exp(1j * xi))[:, None]
    f = np.abs(grad_components(atom, z)[:, 0])
    return float(np.sum(f * w(u) / u * wt))


def lemma5_sides(w: Weight1D, a: float, h: float, levels: int = 24, order: int = 8) -> dict:
    def g(u):
        return w(u) / u

    rhs_a = graded_integral(g, h, 1.0, grade_lo=True, grade_hi=False, breaks=w.breaks)
    rhs_b = integrate_from_zero(g, h / (4 * math.sqrt(2)))
    return {"lhs_a": _lemma5_lhs(w, a, h, "D1", levels, order), "rhs_a": rhs_a,
            "lhs_b": _lemma5_lhs(w, a, h, "D2", levels, order), "rhs_b": rhs_b}


def check_lemma5(w: Weight1D, hs=H_SWEEP, q: QuadratureSpec = QuadratureSpec()) -> CheckResult:
    """LHS/RHS over D1 and D2 stays bounded below along the h sweep."""
    try:
        integrate_from_zero(lambda t: w(t) / t, 1.0)
    except NonIntegrable as exc:
        raise PreconditionFailed(f"w(t)/t is not integrable near 0 for {w.name}: {exc}") from None
    fine = q.refined()
    rows = []
    for a, h in _lemma_grid(hs):
        s0 = lemma5_sides(w, a, h, q.levels, q.order)
        s1 = lemma5_sides(w, a, h, fine.levels, fine.order)
        ra, rb = s1["lhs_a"] / s1["rhs_a"], s1["lhs_b"] / s1["rhs_b"]
        ra0, rb0 = s0["lhs_a"] / s0["rhs_a"], s0["lhs_b"] / s0["rhs_b"]
        rows.append({"a": a, "h": h, "ratio_a": ra, "ratio_b": rb, "coarse_a": ra0, "coarse_b": rb0,
                     "stable": _stable(ra0, ra) and _stable(rb0, rb)})
    slopes = {}
    for a in sorted({r["a"] for r in rows}):
        sub = [r for r in rows if r["a"] == a]
        hs_a = [r["h"] for r in sub]
        slopes[repr(a)] = {"a": _slope(hs_a, [r["ratio_a"] for r in sub]),
                           "b": _slope(hs_a, [r["ratio_b"] for r in sub])}
    bounded = all(s["a"] <= SLOPE_TOL and s["b"] <= SLOPE_TOL for s in slopes.values())
    ok = bounded and all(r["stable"] and r["ratio_a"] > 0 and r["ratio_b"] > 0 for r in rows)
    low = min(rows, key=lambda r: min(r["ratio_a"], r["ratio_b"]))
    return CheckResult(f"lemma5-{w.name}", ok, float(min(low["ratio_a"], low["ratio_b"])), 0.0, len(rows),
                       {"a": low["a"], "h": low["h"]}, None,
                       {"weight": w.name, "slopes": slopes, "bounded_below": bounded, "rows": rows})


def lemma5_divergence(w: Weight1D, a: float = np.pi, h: float = 0.25, levels=DIVERGENCE_LEVELS) -> dict:
    """D1 integral truncated at u = 2^-L: grows without bound when w(u)/u is not integrable."""
    vals = [_lemma5_lhs(w, a, h, "D1", L, 8) for L in levels]
    return {"levels": list(levels), "values": vals, "diverges": diverges(vals)}


# --- main theorem -------------------------------------------------------------

def random_atoms(d: int, n: int, weight: ProductWeight, rng, h_range=(2.0**-6, 0.5),
                 pattern: str = "checkerboard") -> list[SpecialAtom]:
    """Atoms with log-uniform half-widths and centers keeping the cube in [0, 2pi].

    ``pattern`` is "checkerboard" or "axis"; axis atoms take a uniformly
    random split coordinate.
    """
    if pattern not in ("checkerboard", "axis"):
        raise ValueError("pattern must be 'checkerboard' or 'axis'")
    out = []
    lo, hi = np.log(h_range[0]), np.log(h_range[1])
    for _ in range(n):
        h = np.exp(rng.uniform(lo, hi, d))
        a = rng.uniform(h, TWO_PI - h)
        pat = checkerboard_pattern(d) if pattern == "checkerboard" else axis_pattern(d, int(rng.integers(d)))
        out.append(SpecialAtom(Cube(tuple(a), tuple(h)), pat, weight))
    return out


def _part_classes(weight: ProductWeight, mode: str) -> dict:
    return {f"w{j}": _class_ok(f, mode) for j, f in enumerate(weight.factors)}


def main_negative_control(w: Weight1D, hs=H_SWEEP, levels=DIVERGENCE_LEVELS, a: float = np.pi) -> dict:
    """Radial-mode norms of d = 1 atoms with the radial integrability check switched off."""
    rows = []
    pw = ProductWeight((w,))
    for h in hs:
        atom = SpecialAtom(Cube((a,), (h,)), checkerboard_pattern(1), pw)
        prov = ExtensionProvider.closed(atom)
        vals = [aw_norm(prov, pw, RADIAL, 1.0, QuadratureSpec(levels=L), check_weight=False,
                        strict=False).coarse for L in levels]
        rows.append({"h": h, "levels": list(levels), "values": vals, "diverges": diverges(vals)})
    return {"weight": w.name, "rows": rows, "diverges": all(r["diverges"] for r in rows)}


def check_main_theorem(d: int, weight: ProductWeight, mode: str, n_atoms: int = 50, seed: int = 0,
                       q: QuadratureSpec = QuadratureSpec(), negative: Weight1D | None = None,
                       max_spread: float | None = None, pattern: str = "checkerboard") -> CheckResult:
    """rho = ||F||_{A_w^1} / ||b||_{B_w} for random single atoms (||b|| <= 1 by construction).

    Passes when every rho is finite, positive and refinement-stable, the spread
    max/min does not exceed ``max_spread`` (if given), and the negative-control
    weight (if given) produces norms that diverge under refinement.
    """
    if d > 2:
        raise ValueError("main theorem sweeps are limited to d <= 2")
    if weight.d != d:
        raise ValueError("weight dimension must equal d")
    classes = _part_classes(weight, mode)
    rng = np.random.default_rng(seed)
    atoms = random_atoms(d, n_atoms, weight, rng, pattern=pattern)

    def one(atom):
        f = AtomicFunction.single(atom)
        try:
            res = aw_norm(ExtensionProvider.closed(f), weight, mode, 1.0, q)
            rho, err = res.value, res.error_indicator
        except ToleranceNotMet:
            rho, err = math.inf, math.inf
        return {"cube": atom.cube.to_json(), "pattern": atom.pattern.to_json(), "rho": rho, "error_indicator": err}

    rows = parallel_map(one, atoms)
    rhos = np.array([r["rho"] for r in rows])
    finite = bool(np.all(np.isfinite(rhos)) and np.all(rhos > 0))
    spread = float(rhos.max() / rhos.min()) if finite else math.inf
    ok = finite and (max_spread is None or spread <= max_spread)
    detail = {"mode": mode, "pattern": pattern, "weight": [f.name for f in weight.factors], "classes": classes,
              "spread": spread, "min_rho": float(rhos.min()), "max_rho": float(rhos.max()),
              "quadrature": q.to_json(), "atoms": rows}
    if negative is not None:
        neg = main_negative_control(negative)
        detail["negative_control"] = neg
        ok = ok and neg["diverges"]
    i = int(np.argmax(rhos))
    name = f"main-d{d}-{mode}" + ("" if pattern == "checkerboard" else f"-{pattern}")
    return CheckResult(name, ok, spread, max_spread if max_spread is not None else math.inf,
                       n_atoms, rows[i]["cube"], seed, detail)


# --- weight-class inclusion -----------------------------------------------------

def check_lem1_inclusion(weights, n: int = 2) -> CheckResult:
    """Every weight passing the D_1 and B_n tests must pass the doubling test."""
    rows = []
    bad = 0
    for w in weights:
        try:
            dini = is_dini(w, 1).passed
        except NonIntegrable:
            dini = False
        bn = is_Bn(w, n).passed
        row = {"weight": w.name, "dini": dini, f"bn{n}": bn}
        if dini and bn:
            rep = is_doubling(w)
            row.update(doubling=rep.passed, constant=rep.constant)
            bad += not rep.passed
        else:
            row["skipped"] = True
        rows.append(row)
    tested = sum(1 for r in rows if "doubling" in r)
    worst = max((r["constant"] for r in rows if "constant" in r), default=0.0)
    return CheckResult("inclusion", bad == 0, worst, math.inf, tested, {}, None, {"n": n, "rows": rows})


def default_inclusion_weights() -> list[Weight1D]:
    t = np.linspace(0, 1, 65)
    concave = table(t, np.sqrt(t) * (2 - t), name="table:sqrt(t)(2-t)")
    return [power(x) for x in (0.25, 0.5, 1.0, 1.5)] + [power(0.0), concave]


# --- negative controls and suites -------------------------------------------------

def _rejects(fn, exc_type) -> bool:
    try:
        fn()
    except exc_type:
        return True
    return False


def check_lemma3_negative(w: Weight1D | None = None) -> CheckResult:
    """A weight outside D_1 is rejected in radial mode and its K1 integral diverges under refinement."""
    w = w or power(0.0)
    rejected = _rejects(lambda: _class_ok(w, RADIAL), NonIntegrableWeight)
    div = lemma3_divergence(w)
    return CheckResult("lemma3-negative", rejected and div["diverges"], div["values"][-1], math.inf,
                       len(div["values"]), {}, None, {"weight": w.name, "rejected": rejected, **div})


def check_lemma4_negative(w: Weight1D | None = None) -> CheckResult:
    """w(t)/t^2 not integrable: precondition rejected and the left side diverges as the cut t -> 0."""
    w = w or power(1.0)
    rejected = _rejects(lambda: check_lemma4(ProductWeight((w,)), hs=H_SWEEP[:1]), PreconditionFailed)
    div = lemma4_divergence(w)
    return CheckResult("lemma4-negative", rejected and div["diverges"], div["values"][-1], math.inf,
                       len(div["values"]), {}, None, {"weight": w.name, "rejected": rejected, **div})


def check_lemma5_negative(w: Weight1D | None = None) -> CheckResult:
    """w(t)/t not integrable: precondition rejected and the D1 integral diverges under refinement."""
    w = w or power(0.0)
    rejected = _rejects(lambda: check_lemma5(w, hs=H_SWEEP[:1]), PreconditionFailed)
    div = lemma5_divergence(w)
    return CheckResult("lemma5-negative", rejected and div["diverges"], div["values"][-1], math.inf,
                       len(div["values"]), {}, None, {"weight": w.name, "rejected": rejected, **div})


def check_main_negative(w: Weight1D | None = None) -> CheckResult:
    """Radial mode with a weight outside D_1: rejected, and rho diverges under refinement at every h = 2^-k."""
    w = w or power(0.0)
    rejected = _rejects(lambda: _class_ok(w, RADIAL), PreconditionFailed)
    neg = main_negative_control(w)
    last = [r["values"][-1] for r in neg["rows"]]
    return CheckResult("main-negative", rejected and neg["diverges"], max(last), math.inf, len(neg["rows"]),
                       {}, None, {"rejected": rejected, **neg})


SUITES = ("k-bounds", "lemma3", "lemma4", "lemma5", "main", "inclusion")


def run_suite(name: str, seed: int = 0, samples: int = 10_000, n_atoms: int = 50,
              q: QuadratureSpec = QuadratureSpec()) -> list[CheckResult]:
    """The checks behind one ``verify`` subcommand, in a fixed order."""
    if name == "all":
        return [r for s in SUITES for r in run_suite(s, seed, samples, n_atoms, q)]
    if name == "k-bounds":
        return [check_k_bounds(samples, seed)]
    if name == "k2-far":
        return [check_k2_far(samples, seed)]
    if name == "k1-lower":
        return [check_k1_lower(samples, seed, "cubic"), check_k1_lower(samples, seed, "mixed")]
    if name == "lemma3":
        return [check_lemma3(power(0.5), ANGULAR, q=q), check_lemma3(power(0.0), ANGULAR, q=q),
                check_lemma3(power(0.5), RADIAL, q=q), check_lemma3(power(1.0), RADIAL, q=q),
                check_lemma3(power(1.0), ANGULAR, q=q, require_class=False), check_lemma3_negative()]
    if name == "lemma4":
        w2 = power(2.0)
        return [check_lemma4(ProductWeight((w2,)), q=q), check_lemma4(ProductWeight((w2, w2)), q=q),
                check_lemma4_negative()]
    if name == "lemma5":
        return [check_lemma5(power(1.0), q=q), check_lemma5(power(0.5), q=q), check_lemma5_negative()]
    if name == "main":
        out = []
        for d in (1, 2):
            out.append(check_main_theorem(d, ProductWeight.power(0.5, d), RADIAL, n_atoms, seed, q))
            out.append(check_main_theorem(d, ProductWeight.lebesgue(d), ANGULAR, n_atoms, seed, q))
        # axis-split atoms (d = 2 only; in d = 1 both patterns coincide)
        n_axis = max(1, n_atoms // 5)
        out.append(check_main_theorem(2, ProductWeight.power(0.5, 2), RADIAL, n_axis, seed, q, pattern="axis"))
        out.append(check_main_theorem(2, ProductWeight.lebesgue(2), ANGULAR, n_axis, seed, q, pattern="axis"))
        out.append(check_main_negative())
        return out
    if name == "inclusion":
        return [check_lem1_inclusion(default_inclusion_weights())]
    raise ValueError(f"unknown suite {name!r}")
