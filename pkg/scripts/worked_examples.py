"""Leading eigenvalues of both discretisations next to the closed form.

    python3 scripts/worked_examples.py [-N 24]
"""
import argparse

import numpy as np

from blaschke_transfer import BlaschkeProduct
from blaschke_transfer.blaschke import closed_form_spectrum
from blaschke_transfer.hardy import admissible_annulus
from blaschke_transfer.spectral import adjoint_eigenvalues, direct_eigenvalues

EXAMPLES = {
    "z^2": BlaschkeProduct.power(2),
    "z^2 (z - 0.3)/(1 - 0.3 z)": BlaschkeProduct((0.0, 0.0, 0.3)),
    "mu = 0.5": BlaschkeProduct.mu_family(0.5),
    "mu = 0.3+0.2i": BlaschkeProduct.mu_family(0.3 + 0.2j),
}


def fmt(z):
    z = complex(z)
    if abs(z.imag) < 1e-15:
        return f"{z.real: .12f}"
    return f"{z.real: .6f}{z.imag:+.6f}i"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("-N", type=int, default=24)
    ap.add_argument("-k", type=int, default=7)
    args = ap.parse_args()

    for name, b in EXAMPLES.items():
        a = admissible_annulus(b)
        pred = closed_form_spectrum(b, args.k).values
        d = direct_eigenvalues(b, a, args.N)[: args.k]
        adj = adjoint_eigenvalues(b, a, args.N)[: args.k]
        print(f"\n{name}   annulus r={a.r:.4f} R={a.R:.4f}   N={args.N}")
        print(f"  {'predicted':>24} {'direct':>24} {'adjoint':>24}")
        for p, x, y in zip(pred, d, adj):
            print(f"  {fmt(p):>24} {fmt(x):>24} {fmt(y):>24}")
        print(f"  max |direct - predicted| = {np.abs(d - pred).max():.2e}")


if __name__ == "__main__":
    main()
