"""Radial limits of atom extensions: Re F(r e^{i xi}) as r -> 1 against the atom value.

In d = 1 the limit recovers the atom. In d = 2 the real part of the product
kernel is Re P1 Re P2 - Im P1 Im P2, so the limit is b - H1 H2 b, where Hj is
the conjugate function in coordinate j; the script prints both.

    python3 scripts/radial_limit_study.py --atoms 5 --seed 1
"""
import argparse

import numpy as np

from atomlab.extension import ExtensionProvider, radial_limit
from atomlab.verify import random_atoms
from atomlab.weights import ProductWeight


def conj_interval(lo, hi, x):
    """Conjugate function of the indicator of [lo, hi] at x (periodic, principal value)."""
    return (np.log(abs(np.sin((x - lo) / 2))) - np.log(abs(np.sin((x - hi) / 2)))) / np.pi


def conj_factor(atom, j, x, upper):
    a, h = atom.cube.center[j], atom.cube.halfwidth[j]
    return conj_interval(a, a + h, x) if upper else conj_interval(a - h, a, x)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--atoms", type=int, default=5)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    for d in (1, 2):
        print(f"d = {d}")
        for atom in random_atoms(d, args.atoms, ProductWeight.power(0.5, d), rng, h_range=(0.05, 0.5)):
            xi = np.asarray(atom.cube.center) + 0.5 * np.asarray(atom.cube.halfwidth)
            res = radial_limit(ExtensionProvider.closed(atom), xi)
            b = float(atom(xi[None, :])[0])
            line = f"  xi={np.round(xi, 4)}  limit={res.value:+.6e}  b={b:+.6e}  ratio={res.ratio:.4f}"
            if d == 2:
                # b - H1 H2 b for the checkerboard atom: sum over subcubes of s_k prod_j H(I_kj)
                hh = 0.0
                for k, s in enumerate(atom.pattern.signs()):
                    bits = [(k >> j) & 1 for j in range(2)]
                    hh += s * conj_factor(atom, 0, xi[0], bits[0]) * conj_factor(atom, 1, xi[1], bits[1])
                line += f"  b - H1H2 b={b - hh / atom.wJ:+.6e}"
            print(line)


if __name__ == "__main__":
    main()
