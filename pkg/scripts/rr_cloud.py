"""Error-rate cloud of randomised response on 3 bits, with DP region boundaries.

Writes rr_cloud.csv (all 256 points, with a membership flag) and rr_cloud.svg
into the output directory (default: current directory).

    python3 scripts/rr_cloud.py [outdir]
"""

import math
import sys
import time
from pathlib import Path

from divkit import RandomizedResponse, RegionSpec, error_cloud, region_contains
from divkit.cli import emit_csv, emit_svg
from divkit.regions import region_boundary


def main(outdir="."):
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    pts = error_cloud(RandomizedResponse(3, 0.34), ("000", "001"))
    elapsed = time.perf_counter() - t0

    exact = RegionSpec.dp(math.log(33 / 17), 0.0)
    drawn = RegionSpec.dp(0.67, 0.05)
    inside = [region_contains(exact, p) or p.pfa + p.pmd >= 1 for p in pts]
    in_drawn = [region_contains(drawn, p) or region_contains(drawn, p.negated()) for p in pts]

    (out / "rr_cloud.csv").write_text(emit_csv(pts, inside) + "\n")
    curves = []
    for region in (exact, drawn):
        lower = region_boundary(region, 200)
        curves.append(lower)
        curves.append([p.negated() for p in lower])
    (out / "rr_cloud.svg").write_text(emit_svg(curves, pts))

    print(f"points: {len(pts)}  cloud time: {elapsed * 1e3:.1f} ms")
    print(f"inside exact region (eps=ln(33/17), delta=0) or above the diagonal: {sum(inside)}/{len(pts)}")
    print(f"inside drawn region (0.67, 0.05) or its mirror: {sum(in_drawn)}/{len(pts)}")
    print(f"wrote {out / 'rr_cloud.csv'} and {out / 'rr_cloud.svg'}")


if __name__ == "__main__":
    main(*sys.argv[1:2])
