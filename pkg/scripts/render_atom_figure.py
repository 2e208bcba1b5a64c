"""Render an atom and |F'| of its extension to PNG files (needs matplotlib).

    python3 scripts/render_atom_figure.py --out atom.png
"""
import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from atomlab.atoms import SpecialAtom
from atomlab.extension import gradient_closed
from atomlab.geometry import Cube, checkerboard_pattern
from atomlab.weights import ProductWeight, parse_weight


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cube", default="3.0:0.5")
    ap.add_argument("--weight", default="power:0.5")
    ap.add_argument("--grid", type=int, default=256)
    ap.add_argument("--out", default="atom.png")
    args = ap.parse_args()

    c, h = args.cube.split(":")
    atom = SpecialAtom(Cube((float(c),), (float(h),)), checkerboard_pattern(1),
                       ProductWeight((parse_weight(args.weight),)))
    xi = np.linspace(0, 2 * np.pi, 4 * args.grid, endpoint=False)
    r = 1 - np.geomspace(1e-3, 1, args.grid)
    z = (r[:, None] * np.exp(1j * xi[None, :]))[..., None]
    g = np.abs(gradient_closed(_single(atom), z)[..., 0])

    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(10, 4))
    ax0.step(xi, atom(xi), where="post")
    ax0.set_xlabel("xi")
    ax0.set_title("atom")
    im = ax1.pcolormesh(xi, r, np.log10(g), shading="auto")
    ax1.set_xlabel("xi")
    ax1.set_ylabel("r")
    ax1.set_title("log10 |F'(r e^{i xi})|")
    fig.colorbar(im, ax=ax1)
    fig.tight_layout()
    fig.savefig(args.out, dpi=120)
    print(f"wrote {args.out}")


def _single(atom):
    from atomlab.atoms import AtomicFunction

    return AtomicFunction.single(atom)


if __name__ == "__main__":
    main()
