"""Match error against N, and independence of the spectrum from the annulus.

    python3 scripts/convergence.py [--csv-dir DIR]

Maps with B(0) = 0 give exactly triangular finite sections, so their errors
sit at the roundoff floor from the smallest N on. The pair map with zeros
+-0.3 has B(0) != 0 and shows the exponential decay.
"""
import argparse
from pathlib import Path

import numpy as np

from blaschke_transfer import BlaschkeProduct
from blaschke_transfer.blaschke import fixed_points
from blaschke_transfer.hardy import Annulus, admissible_annulus, check_annulus
from blaschke_transfer.spectral import convergence_study, direct_eigenvalues

MAPS = {
    "mu0.5": BlaschkeProduct.mu_family(0.5),
    "mu0.3+0.2i": BlaschkeProduct.mu_family(0.3 + 0.2j),
    "pair0.3": BlaschkeProduct((0.3, -0.3)),
    "mixed": BlaschkeProduct((0.4j, 0.2)),
}
N_LIST = [4, 6, 8, 10, 12, 14, 16, 20]


def annulus_sweep(b, N=20, k=7, count=4):
    """Top-k spectra on nested admissible annuli between the search result and the circle."""
    base = admissible_annulus(b)
    rows = []
    for s in np.linspace(0, 0.8, count):
        a = Annulus(base.r + s * (1 - base.r) / 2, base.R - s * (base.R - 1) / 2)
        if check_annulus(b, a, margin=0.0):
            continue
        rows.append((a, direct_eigenvalues(b, a, N)[:k]))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--csv-dir", default=None)
    args = ap.parse_args()

    for name, b in MAPS.items():
        lam = fixed_points(b).interior_multiplier
        res = convergence_study(b, N_LIST)
        print(f"\n{name}: multiplier {complex(lam):.6f}")
        for N, e in res.table:
            print(f"  N={N:3d}  error={e:.3e}")
        print("  " + res.summary())
        if args.csv_dir:
            Path(args.csv_dir).mkdir(parents=True, exist_ok=True)
            (Path(args.csv_dir) / f"{name}.csv").write_text(res.to_csv())

    print("\nannulus independence, N=20, top 7")
    for name in ("pair0.3", "mixed", "mu0.3+0.2i"):
        rows = annulus_sweep(MAPS[name])
        ref = rows[0][1]
        for a, ev in rows:
            print(f"  {name:12s} r={a.r:.4f} R={a.R:.4f}  max diff to first = {np.abs(ev - ref).max():.2e}")


if __name__ == "__main__":
    main()
