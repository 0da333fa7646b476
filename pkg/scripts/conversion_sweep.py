"""Compare RDP -> DP conversion laws over a grid of (alpha, delta) at fixed rho.

For each cell prints eps from the Mironov, refined and numeric-tangent laws,
and whether the Renyi region sits inside each resulting DP region.

    python3 scripts/conversion_sweep.py [rho]
"""

import sys

import numpy as np

from divkit import rdp_to_dp
from divkit.regions import RegionSpec, region_contains_region

METHODS = ("mironov", "refined", "tangent")


def main(rho=1.0):
    rho = float(rho)
    print(f"rho = {rho}")
    print(f"{'alpha':>8} {'delta':>10} " + " ".join(f"{m:>10}" for m in METHODS) + "  contained")
    for alpha in np.geomspace(1.25, 64, 6):
        inner = RegionSpec.renyi(float(alpha), rho)
        for delta in (1e-8, 1e-5, 1e-2):
            res = [rdp_to_dp(float(alpha), rho, delta, m) for m in METHODS]
            ok = [region_contains_region(inner, RegionSpec.dp(r.eps, delta)).contained for r in res]
            print(f"{alpha:8.3f} {delta:10.1e} " + " ".join(f"{r.eps:10.5f}" for r in res)
                  + "  " + "".join("y" if o else "n" for o in ok))


if __name__ == "__main__":
    main(*sys.argv[1:2])
