"""Search for points where |K2| exceeds 3 sqrt(4 ln^2 2 + pi^2) and cross-check them in extended precision.

    python3 scripts/k2_counterexample.py --samples 10000 --seed 7
"""
import argparse

import mpmath as mp
import numpy as np

from atomlab.kernels import k2
from atomlab.verify import K2_BOUND, _sample_kernel_args


def k2_mp(a, h, z, dps=30):
    """|K2| with 30 digits, once with branch-safe logs and once with principal logs."""
    mp.mp.dps = dps
    a, h, z = mp.mpf(a), mp.mpf(h), mp.mpc(z.real, z.imag)
    safe = lambda t: 1j * t + mp.log(1 - z * mp.expj(-t))
    prin = lambda t: mp.log(mp.expj(t) - z)
    return tuple(abs(-2j * (f(a - h) + f(a + h) - 2 * f(a))) for f in (safe, prin))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--show", type=int, default=5)
    args = ap.parse_args()

    a, h, z = _sample_kernel_args(np.random.default_rng(args.seed), args.samples)
    val = np.abs(k2(a, h, z))
    bad = np.flatnonzero(val > K2_BOUND)
    print(f"bound {K2_BOUND:.6f}; {bad.size} of {args.samples} samples exceed it; max {val.max():.6f}")
    for i in bad[np.argsort(-val[bad])][: args.show]:
        safe, prin = k2_mp(a[i], h[i], z[i])
        print(f"a={a[i]:.6f} h={h[i]:.6f} z={z[i]:.6f} |K2|={val[i]:.10f} "
              f"(30 digits: {float(safe):.10f}; principal logs: {float(prin):.10f}; |z|={abs(z[i]):.4f})")

    # a one-parameter family: z -> e^{ia} along the radius, large h
    print("\nalong z = r e^{ia}, a = pi, h = 2.6:")
    for r in (0.9, 0.99, 0.999, 0.9999):
        print(f"  r={r}: |K2| = {abs(k2(np.pi, 2.6, r * np.exp(1j * np.pi))):.6f}")


if __name__ == "__main__":
    main()
