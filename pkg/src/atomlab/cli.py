"""Command-line entry point ``atomlab``.

Exit codes: 0 success, 1 a verification check failed, 2 usage error,
3 numerical error (non-integrable weight, tolerance not met, ...).
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import __version__
from .atoms import AtomicFunction, SpecialAtom, bw_norm_upper, haar_decompose
from .errors import DomainError, NoConvergence, NonIntegrable, PreconditionFailed, ToleranceNotMet
from .extension import ANGULAR, RADIAL, ExtensionProvider, QuadratureSpec, aw_norm, extend_general
from .geometry import TWO_PI, Cube, axis_pattern, checkerboard_pattern, parity_pattern
from .weights import ProductWeight, is_Bn, is_calBp, is_dini, is_doubling, is_muckenhoupt, parse_weight

NUMERICAL_ERRORS = (NonIntegrable, ToleranceNotMet, NoConvergence, DomainError, PreconditionFailed)


# --- serialization -------------------------------------------------------------

def _encode(obj) -> str:
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return "%.17g" % x
        return json.dumps("nan" if math.isnan(x) else ("inf" if x > 0 else "-inf"))
    if isinstance(obj, complex):
        return _encode([obj.real, obj.imag])
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = sorted((str(k), v) for k, v in obj.items())
        return "{" + ",".join(f"{json.dumps(k)}:{_encode(v)}" for k, v in items) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ",".join(_encode(v) for v in obj) + "]"
    if hasattr(obj, "to_json"):
        return _encode(obj.to_json())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, 17 significant digits, non-finite floats as strings."""
    return _encode(obj) + "\n"


# --- configuration -------------------------------------------------------------

@dataclass
class RunConfig:
    command: str
    action: str | None = None
    weights: list = field(default_factory=list)
    d: int | None = None
    cube: str | None = None
    pattern: str = "checkerboard"
    classes: list = field(default_factory=list)
    grid: int = 64
    margin: float = 0.25
    at: list | None = None
    radius: float = 0.9
    mode: str = RADIAL
    p: float = 1.0
    method: str = "closed"
    quadrature: dict = field(default_factory=dict)
    seed: int = 0
    samples: int = 10_000
    atoms: int = 50
    input: str | None = None
    output: str | None = None
    json: bool = False

    @classmethod
    def from_dict(cls, obj: dict) -> RunConfig:
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(obj) - known)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**obj)

    def spec(self) -> QuadratureSpec:
        return QuadratureSpec(**self.quadrature)

    def digest(self) -> str:
        body = {k: v for k, v in asdict(self).items() if k not in ("output", "json")}
        return hashlib.sha256(dumps(body).encode()).hexdigest()

    def envelope(self, results) -> dict:
        return {"tool": "atomlab", "version": __version__, "config_hash": self.digest(),
                "command": " ".join(x for x in (self.command, self.action) if x), "results": results}


def _weight_arg(text: str) -> str:
    try:
        parse_weight(text)
    except Exception as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return text


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _cube_arg(text: str) -> str:
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("cube must be CENTER:HALFWIDTH, e.g. 1.0,1.0:0.5,0.5")
    c, h = _floats(parts[0]), _floats(parts[1])
    try:
        Cube(tuple(c), tuple(h))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return text


def _classes_arg(text: str) -> list[str]:
    out = [c.strip() for c in text.split(",") if c.strip()]
    for c in out:
        name, _, arg = c.partition(":")
        if name not in ("dini", "bn", "calbp", "doubling", "ap"):
            raise argparse.ArgumentTypeError(f"unknown class {name!r}")
        if (name == "doubling") == bool(arg):
            raise argparse.ArgumentTypeError(f"bad class argument in {c!r}")
        if arg:
            try:
                float(arg)
            except ValueError:
                raise argparse.ArgumentTypeError(f"bad class argument in {c!r}") from None
    return out


def _quad_arg(text: str) -> dict:
    out = {}
    for item in text.split(","):
        key, _, val = item.partition("=")
        if key not in ("nodes_per_axis", "levels", "order", "cheb", "tol", "norm_tol"):
            raise argparse.ArgumentTypeError(f"unknown quadrature key {key!r}")
        try:
            out[key] = float(val) if key in ("tol", "norm_tol") else int(val)
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad value for {key}") from None
    try:
        QuadratureSpec(**out)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return out


# --- builders ----------------------------------------------------------------------

def _pattern(text: str, d: int):
    if text == "checkerboard":
        return checkerboard_pattern(d)
    kind, _, arg = text.partition(":")
    if kind == "axis":
        return axis_pattern(d, int(arg))
    if kind == "mask":
        return parity_pattern(d, int(arg))
    raise ValueError(f"unknown pattern {text!r}")


def _product_weight(cfg: RunConfig, d: int) -> ProductWeight:
    specs = cfg.weights or ["power:0"]
    if len(specs) == 1:
        specs = specs * d
    if len(specs) != d:
        raise ValueError(f"need 1 or {d} weights, got {len(specs)}")
    return ProductWeight(tuple(parse_weight(s) for s in specs))


def _atom(cfg: RunConfig) -> SpecialAtom:
    if cfg.cube is None:
        raise ValueError("--cube is required")
    cs, hs = cfg.cube.split(":")
    cube = Cube(tuple(_floats(cs)), tuple(_floats(hs)))
    if cfg.d is not None and cfg.d != cube.d:
        raise ValueError(f"--d {cfg.d} does not match the cube dimension {cube.d}")
    return SpecialAtom(cube, _pattern(cfg.pattern, cube.d), _product_weight(cfg, cube.d))


def _function(cfg: RunConfig) -> AtomicFunction:
    if cfg.input:
        with open(cfg.input) as fh:
            return AtomicFunction.from_json(json.load(fh))
    return AtomicFunction.single(_atom(cfg))


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["%.17g" % float(x) for x in row])
    return buf.getvalue()


# --- commands ----------------------------------------------------------------------

def cmd_atom_render(cfg: RunConfig) -> tuple[str, int]:
    atom = _atom(cfg)
    d = atom.d
    if d > 3:
        raise ValueError("render supports d <= 3")
    lo, hi = atom.cube.lower, atom.cube.upper
    pad = cfg.margin * (hi - lo)
    axes = [np.linspace(max(lo[j] - pad[j], 0.0), min(hi[j] + pad[j], TWO_PI), cfg.grid, endpoint=False)
            for j in range(d)]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    vals = atom(pts)
    names = ["x", "y", "z"][:d] + ["value"]
    return _csv(names, np.column_stack([pts, vals])), 0


def _provider(cfg: RunConfig, f: AtomicFunction) -> ExtensionProvider:
    if cfg.method == "closed":
        return ExtensionProvider.closed(f)
    breaks = [sorted({x for _, a in f.terms for x in (a.cube.lower[j], a.cube.center[j], a.cube.upper[j])})
              for j in range(f.d)]
    return ExtensionProvider.quadrature(f, f.d, cfg.spec(), breaks)


def cmd_extend_eval(cfg: RunConfig) -> tuple[str, int]:
    f = _function(cfg)
    if not cfg.at or len(cfg.at) != 2 * f.d:
        raise ValueError(f"--at needs {2 * f.d} numbers r1,theta1,...")
    r = np.asarray(cfg.at[0::2])
    t = np.asarray(cfg.at[1::2])
    z = r * np.exp(1j * t)
    if np.any(r >= 1) or np.any(r < 0):
        raise DomainError("radii must lie in [0, 1)")
    if cfg.method == "closed":
        value, err, cells = complex(ExtensionProvider.closed(f).value(z)), 0.0, 0
    else:
        prov = _provider(cfg, f)
        value, err = extend_general(f, z, cfg.spec(), prov.breaks, return_error=True)
        cells = 0
    out = {"at": {"radius": list(r), "angle": list(t)}, "value": [value.real, value.imag],
           "error_indicator": err, "method": cfg.method, "cells": cells}
    return dumps(cfg.envelope(out)), 0


def cmd_extend_grid(cfg: RunConfig) -> tuple[str, int]:
    f = _function(cfg)
    prov = _provider(cfg, f)
    n = cfg.grid
    thetas = np.linspace(0, TWO_PI, n, endpoint=False)
    if f.d == 1:
        radii = np.linspace(0, cfg.radius, n)
        R, T = np.meshgrid(radii, thetas, indexing="ij")
        vals = prov.value((R * np.exp(1j * T)).reshape(-1, 1))
        rows = np.column_stack([R.ravel(), T.ravel(), vals.real, vals.imag])
        return _csv(["r", "theta", "re", "im"], rows), 0
    T1, T2 = np.meshgrid(thetas, thetas, indexing="ij")
    z = np.full((T1.size, f.d), cfg.radius + 0j)
    z[:, 0] *= np.exp(1j * T1.ravel())
    z[:, 1] *= np.exp(1j * T2.ravel())
    if f.d > 2:
        center = np.asarray(f.terms[0][1].cube.center)
        z[:, 2:] *= np.exp(1j * center[2:])
    vals = prov.value(z)
    rows = np.column_stack([T1.ravel(), T2.ravel(), vals.real, vals.imag])
    return _csv(["theta1", "theta2", "re", "im"], rows), 0


def cmd_norm_aw(cfg: RunConfig) -> tuple[str, int]:
    f = _function(cfg)
    weight = _product_weight(cfg, f.d)
    res = aw_norm(_provider(cfg, f), weight, cfg.mode, cfg.p, cfg.spec())
    out = dict(res.to_json(), mode=cfg.mode, p=cfg.p, bw_norm_upper=bw_norm_upper(f))
    return dumps(cfg.envelope(out)), 0


def cmd_norm_bw(cfg: RunConfig) -> tuple[str, int]:
    f = _function(cfg)
    return dumps(cfg.envelope({"bw_norm_upper": bw_norm_upper(f), "terms": len(f.terms)})), 0


def _load_samples(path: str) -> np.ndarray:
    if path.endswith(".npy"):
        return np.load(path)
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if row:
                rows.append([float(x) for x in row])
    a = np.asarray(rows, dtype=float)
    return a.ravel() if 1 in a.shape else a


def cmd_decompose(cfg: RunConfig) -> tuple[str, int]:
    if not cfg.input:
        raise ValueError("--input is required")
    samples = _load_samples(cfg.input)
    f = haar_decompose(samples, _product_weight(cfg, samples.ndim))
    return dumps(cfg.envelope({"function": f.to_json(), "bw_norm_upper": bw_norm_upper(f)})), 0


def cmd_weight_classify(cfg: RunConfig) -> tuple[str, int]:
    if len(cfg.weights) != 1:
        raise ValueError("classify takes exactly one --weight")
    w = parse_weight(cfg.weights[0])
    reports = []
    for c in cfg.classes or ["dini:1", "bn:2", "calbp:2", "doubling", "ap:2"]:
        name, _, arg = c.partition(":")
        if name == "dini":
            try:
                rep = is_dini(w, int(float(arg))).to_json()
            except NonIntegrable as exc:
                rep = {"class": c, "passed": False, "constant": math.inf, "error": str(exc)}
        elif name == "bn":
            rep = is_Bn(w, int(float(arg))).to_json()
        elif name == "calbp":
            rep = is_calBp(w, float(arg)).to_json()
        elif name == "ap":
            rep = is_muckenhoupt(w, float(arg)).to_json()
        else:
            rep = is_doubling(w).to_json()
        reports.append(rep)
    return dumps(cfg.envelope(reports)), 0


def cmd_verify(cfg: RunConfig) -> tuple[str, int]:
    from .verify import run_suite

    results = run_suite(cfg.action, cfg.seed, cfg.samples, cfg.atoms, cfg.spec())
    code = 0 if all(r.passed for r in results) else 1
    if cfg.json:
        return dumps(cfg.envelope([r.to_json() for r in results])), code
    lines = [f"{'PASS' if r.passed else 'FAIL'} {r.name} observed={r.observed:.6g} bound={r.bound:.6g} "
             f"samples={r.samples}" for r in results]
    return "\n".join(lines) + "\n", code


# --- parser ------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser, atom: bool = True):
    if atom:
        p.add_argument("--d", type=int)
        p.add_argument("--cube", type=_cube_arg, help="CENTER:HALFWIDTH, e.g. 1.0,1.0:0.5,0.5")
        p.add_argument("--pattern", default="checkerboard", help="checkerboard | axis:J | mask:S")
    p.add_argument("--weight", dest="weights", action="append", type=_weight_arg, default=[],
                   help="weight spec (repeat once per coordinate, or give one for all)")
    p.add_argument("--quadrature", type=_quad_arg, default={}, help="e.g. levels=32,order=8")
    p.add_argument("--input")
    p.add_argument("--out", dest="output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="atomlab", description="Weighted special atoms, their polydisc extensions, and numerical checks.")
    parser.add_argument("--version", action="version", version=f"atomlab {__version__}")
    parser.add_argument("--config", help="JSON file with RunConfig fields (command-line flags win)")
    sub = parser.add_subparsers(dest="command", required=True)

    atom = sub.add_parser("atom", help="render special atoms").add_subparsers(dest="action", required=True)
    p = atom.add_parser("render", help="CSV of atom values on a grid around its cube")
    _common(p)
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--margin", type=float, default=0.25)

    weight = sub.add_parser("weight", help="weight-class membership tests").add_subparsers(dest="action", required=True)
    p = weight.add_parser("classify", help="class membership reports")
    _common(p, atom=False)
    p.add_argument("--class", dest="classes", type=_classes_arg, default=[])

    ext = sub.add_parser("extend", help="analytic extension to the polydisc").add_subparsers(dest="action", required=True)
    p = ext.add_parser("eval", help="F(z) at one point")
    _common(p)
    p.add_argument("--at", type=_floats, required=True, help="r1,theta1,r2,theta2,...")
    p.add_argument("--method", choices=["closed", "quadrature"], default="closed")
    p = ext.add_parser("grid", help="CSV of F on a polar grid (d=1) or an angle grid at fixed radius")
    _common(p)
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--radius", type=float, default=0.9)
    p.add_argument("--method", choices=["closed", "quadrature"], default="closed")

    norm = sub.add_parser("norm", help="A_w^p and B_w norms").add_subparsers(dest="action", required=True)
    p = norm.add_parser("aw", help="A_w^p norm of the extension")
    _common(p)
    p.add_argument("--mode", choices=[ANGULAR, RADIAL], default=RADIAL)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--method", choices=["closed", "quadrature"], default="closed")
    p = norm.add_parser("bw", help="representation norm sum |alpha_n|")
    _common(p)

    p = sub.add_parser("decompose", help="Haar decomposition of a zero-mean dyadic step function")
    _common(p, atom=False)

    p = sub.add_parser("verify", help="numerical checks; exit 1 if any fails")
    p.add_argument("action", choices=["all", "k-bounds", "k2-far", "k1-lower", "lemma3", "lemma4", "lemma5",
                                      "main", "inclusion"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--atoms", type=int, default=50)
    p.add_argument("--json", action="store_true")
    p.add_argument("--quadrature", type=_quad_arg, default={})
    p.add_argument("--out", dest="output")
    return parser


COMMANDS = {
    ("atom", "render"): cmd_atom_render,
    ("weight", "classify"): cmd_weight_classify,
    ("extend", "eval"): cmd_extend_eval,
    ("extend", "grid"): cmd_extend_grid,
    ("norm", "aw"): cmd_norm_aw,
    ("norm", "bw"): cmd_norm_bw,
    ("decompose", None): cmd_decompose,
}


FLAG_DESTS = {"weights": "--weight", "classes": "--class", "output": "--out"}


def _explicit(dest: str, argv) -> bool:
    flag = FLAG_DESTS.get(dest, "--" + dest)
    return any(a == flag or a.startswith(flag + "=") for a in argv)


def parse_config(argv) -> RunConfig:
    """Command-line flags, on top of an optional ``--config`` JSON file."""
    parser = build_parser()
    ns = parser.parse_args(argv)
    merged = {k: v for k, v in vars(ns).items() if k != "config"}
    if ns.config:
        try:
            with open(ns.config) as fh:
                base = json.load(fh)
            RunConfig.from_dict({"command": ns.command, **base})
        except (OSError, ValueError, TypeError) as exc:
            parser.error(f"bad config file: {exc}")
        for k, v in base.items():
            if k not in ("command", "action") and not _explicit(k, argv):
                merged[k] = v
    merged.setdefault("action", None)
    return RunConfig.from_dict(merged)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler = cmd_verify if cfg.command == "verify" else COMMANDS[(cfg.command, cfg.action)]
    try:
        text, code = handler(cfg)
    except NUMERICAL_ERRORS as exc:
        print(f"atomlab: numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError, KeyError) as exc:
        print(f"atomlab: error: {exc}", file=sys.stderr)
        build_parser().print_usage(sys.stderr)
        return 2
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
