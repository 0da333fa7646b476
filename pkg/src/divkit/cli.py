"""``divkit`` command line.

Exit status: 0 on success, 2 on usage errors, 1 on domain, capacity,
numeric or sampling errors (with a one-line JSON error on stderr).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from divkit import convert, kcut, mechanisms, regions
from divkit.core import Channel, Dist, bvn_decompose
from divkit.divergences import DivergenceSpec, evaluate
from divkit.errors import DivkitError, DomainError
from divkit.regions import ErrorPoint, RegionSpec

SIG = 12


def fmt(v: float) -> str:
    return f"{v:.{SIG}g}"


def _clean(obj):
    """Round floats to 12 significant digits; non-finite floats become strings."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not math.isfinite(v):
            return "inf" if v > 0 else ("-inf" if v < 0 else "nan")
        return float(fmt(v))
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=False)


def emit_csv(points: Sequence[ErrorPoint], annotations: Optional[Sequence[bool]] = None) -> str:
    """``pfa,pmd[,inside]`` header plus one row per point, 12 significant digits."""
    header = "pfa,pmd" if annotations is None else "pfa,pmd,inside"
    rows = [header]
    for i, p in enumerate(points):
        row = f"{fmt(p.pfa)},{fmt(p.pmd)}"
        if annotations is not None:
            row += "," + ("true" if annotations[i] else "false")
        rows.append(row)
    return "\n".join(rows)


def emit_svg(curves: Iterable[Sequence[ErrorPoint]] = (), points: Sequence[ErrorPoint] = (), size: int = 600) -> str:
    """Polylines for boundary curves and dots for points on the unit square (y axis up)."""
    pad = 30
    scale = size - 2 * pad

    def xy(p: ErrorPoint) -> str:
        return f"{pad + p.pfa * scale:.2f},{pad + (1 - p.pmd) * scale:.2f}"

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect x="{pad}" y="{pad}" width="{scale}" height="{scale}" fill="none" stroke="black"/>',
        f'<text x="{size // 2}" y="{size - 6}" text-anchor="middle" font-size="12">PFA</text>',
        f'<text x="10" y="{size // 2}" font-size="12" transform="rotate(-90 10 {size // 2})">PMD</text>',
    ]
    for curve in curves:
        pts = " ".join(xy(p) for p in curve)
        parts.append(f'<polyline points="{pts}" fill="none" stroke="gray" stroke-width="1.5"/>')
    for p in points:
        x, y = xy(p).split(",")
        parts.append(f'<circle cx="{x}" cy="{y}" r="2" fill="black"/>')
    parts.append("</svg>")
    return "\n".join(parts)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(json.dumps({"error": "usage", "message": message}) + "\n")
        raise SystemExit(2)


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise DomainError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise DomainError(f"{path} is not valid JSON: {exc}") from None


def _load_dist(path: str) -> Dist:
    return Dist.from_dict(_load_json(path))


def _floats(text: str, n: int, what: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise DomainError(f"{what} must be {n} comma-separated numbers, got {text!r}") from None
    if len(vals) != n:
        raise DomainError(f"{what} must be {n} comma-separated numbers, got {text!r}")
    return vals


def _pair(args) -> tuple[Dist, Dist]:
    if getattr(args, "counterexample", None):
        alpha, beta = _floats(args.counterexample, 2, "--counterexample")
        return kcut.counterexample_pair(alpha, beta)
    if not (args.mu1 and args.mu2):
        raise DomainError("give --mu1 and --mu2 (or --counterexample alpha,beta)")
    return _load_dist(args.mu1), _load_dist(args.mu2)


def _unit(args) -> float:
    return math.log(2.0) if getattr(args, "bits", False) else 1.0


def _points_out(args, points, annotations=None, curves=None) -> str:
    if args.svg or args.out == "svg":
        return emit_svg(curves if curves is not None else [points], points if curves is not None else ())
    if args.out == "json" or args.format == "json":
        rows = [{"pfa": p.pfa, "pmd": p.pmd} for p in points]
        if annotations is not None:
            for r, a in zip(rows, annotations):
                r["inside"] = bool(a)
        return dumps(rows)
    return emit_csv(points, annotations)


# ------------------------------------------------------------------ verbs


def cmd_div(args) -> str:
    spec = DivergenceSpec.parse(args.div)
    mu1, mu2 = _pair(args)
    return dumps({"value": evaluate(spec, mu1, mu2) / _unit(args)})


def _cut_result(args):
    spec = DivergenceSpec.parse(args.div)
    mu1, mu2 = _pair(args)
    if args.closed_form:
        if spec.family != "renyi" or args.k not in (2, 3):
            raise DomainError("--closed-form is available for renyi with k = 2 or 3")
        fn = kcut.renyi_2cut_closed_form if args.k == 2 else kcut.renyi_3cut_closed_form
        return fn(spec.param, mu1, mu2)
    return kcut.k_cut(spec, args.k, mu1, mu2)


def cmd_cut(args) -> str:
    res = _cut_result(args)
    u = _unit(args)
    out = res.to_dict()
    for key in ("value", "full_value", "gap"):
        out[key] = out[key] / u
    return dumps(out)


def cmd_gen_test(args) -> str:
    spec = DivergenceSpec.parse(args.div)
    if args.counterexample or args.mu1:
        res = _cut_result(args)
        out = {"k": args.k, "full_value": res.full_value, "cut_value": res.value, "gap": res.gap,
               "not_k_generated": res.not_k_generated, "witness_blocks": res.witness.blocks()}
        if args.delta is not None:
            out["full_distinguishing"] = res.full_value > args.delta
            out["cut_distinguishing"] = res.value > args.delta
        return dumps(out)
    found = kcut.search_gap(spec, args.k, args.size, args.trials, args.seed)
    if found is None:
        return dumps({"k": args.k, "size": args.size, "trials": args.trials, "seed": args.seed,
                      "gap_found": False})
    mu1, mu2, res = found
    return dumps({"k": args.k, "size": args.size, "trials": args.trials, "seed": args.seed,
                  "gap_found": True, "gap": res.gap, "full_value": res.full_value, "cut_value": res.value,
                  "mu1": mu1.to_dict(), "mu2": mu2.to_dict()})


def cmd_region(args) -> str:
    region = RegionSpec.parse(args.spec)
    if args.contains:
        x, y = _floats(args.contains, 2, "--contains")
        pt = ErrorPoint(x, y)
        return dumps({"region": str(region), "point": [x, y], "inside": regions.region_contains(region, pt),
                      "margin": regions.region_margin(region, pt)})
    if args.inside_of:
        outer = RegionSpec.parse(args.inside_of)
        res = regions.region_contains_region(region, outer, args.boundary or 1024)
        return dumps({"contained": res.contained, "max_violation": res.max_violation,
                      "worst": [res.worst.pfa, res.worst.pmd]})
    pts = regions.region_boundary(region, args.boundary or 512)
    if args.svg or args.out == "svg":
        mirror = [p.negated() for p in pts]
        return emit_svg([pts, mirror])
    return _points_out(args, pts)


def cmd_convert(args) -> str:
    if args.law == "rdp2dp":
        if args.alpha is None or args.rho is None or args.delta is None:
            raise DomainError("rdp2dp needs --alpha, --rho and --delta")
        return dumps(convert.rdp_to_dp(args.alpha, args.rho, args.delta, args.method).to_dict())
    if args.law == "hd2dp":
        if args.eps is None or args.rho is None:
            raise DomainError("hd2dp needs --eps and --rho")
        return dumps(convert.hellinger_to_dp(args.eps, args.rho).to_dict())
    # falsify
    if None in (args.div, args.rho, args.eps, args.delta):
        raise DomainError("falsify needs --div, --rho, --eps and --delta")
    spec = DivergenceSpec.parse(args.div)
    res = convert.divergence_to_dp_check(spec, args.rho, args.eps, args.delta, args.trials, args.seed)
    return dumps(res.to_dict())


def cmd_bvn(args) -> str:
    gamma = Channel.from_dict(_load_json(args.channel))
    dec = bvn_decompose(gamma)
    err = float(np.max(np.abs(dec.reconstruct() - gamma.array)))
    out = dec.to_dict()
    out["reconstruction_error"] = err
    return dumps(out)


def cmd_rr_cloud(args) -> str:
    spec = mechanisms.RandomizedResponse(args.bits, args.flip)
    region = RegionSpec.parse(args.region)
    pairs = mechanisms.adjacent_pairs(spec) if args.all_pairs else [("0" * args.bits, "0" * (args.bits - 1) + "1")]
    points = []
    for pair in pairs:
        points.extend(mechanisms.error_cloud(spec, pair))
    inside = [regions.region_contains(region, p) or p.pfa + p.pmd >= 1.0 for p in points]
    if args.svg or args.out == "svg":
        boundary = regions.region_boundary(region, 256)
        return emit_svg([boundary, [p.negated() for p in boundary]], points)
    return _points_out(args, points, inside)


def cmd_check(args) -> str:
    spec = mechanisms.RandomizedResponse.parse(args.mech)
    claim = mechanisms.PrivacyClaim.parse(args.claim)
    return dumps(mechanisms.check_claim(spec, claim).to_dict())


# ----------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="divkit", description="Exact divergences, k-cuts, privacy regions and conversion laws.")
    parser.add_argument("--format", choices=("json", "csv"), default=None, help="output format for point sets")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomised searches and falsification")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def pair_args(p):
        p.add_argument("--mu1", help="Dist JSON file")
        p.add_argument("--mu2", help="Dist JSON file")
        p.add_argument("--counterexample", metavar="ALPHA,BETA", help="use the three-point Renyi counterexample pair")

    def point_args(p):
        p.add_argument("--out", choices=("csv", "json", "svg"), default="csv")
        p.add_argument("--svg", action="store_true", help="emit SVG instead of CSV")

    p = sub.add_parser("div", help="evaluate a divergence")
    p.add_argument("--div", required=True, help="eps:E | renyi:A | kl | max | tv | hellinger")
    pair_args(p)
    p.add_argument("--bits", action="store_true", help="report in bits instead of nats")
    p.set_defaults(func=cmd_div)

    p = sub.add_parser("cut", help="exact k-cut with witness rule")
    p.add_argument("--div", required=True)
    p.add_argument("--k", type=int, required=True)
    pair_args(p)
    p.add_argument("--closed-form", action="store_true", help="use the Renyi 2-/3-cut subset formulas")
    p.add_argument("--bits", action="store_true")
    p.set_defaults(func=cmd_cut)

    p = sub.add_parser("gen-test", help="certify a k-generatedness gap, or search for one")
    p.add_argument("--div", required=True)
    p.add_argument("--k", type=int, required=True)
    pair_args(p)
    p.add_argument("--closed-form", action="store_true")
    p.add_argument("--delta", type=float, help="also report delta-distinguishing of full divergence and cut")
    p.add_argument("--size", type=int, default=4, help="support size for random search")
    p.add_argument("--trials", type=int, default=200, help="random pairs to try")
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    p.set_defaults(func=cmd_gen_test)

    p = sub.add_parser("region", help="privacy region membership, boundary or containment")
    p.add_argument("--spec", required=True, help="dp:E,D | renyi:A,R | gauss:D | hellinger:R")
    p.add_argument("--boundary", type=int, help="number of boundary points")
    p.add_argument("--contains", metavar="X,Y", help="test one (pfa, pmd) point")
    p.add_argument("--inside-of", metavar="SPEC", help="check containment of this region in SPEC")
    point_args(p)
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("convert", help="conversion laws to (eps, delta)-DP")
    p.add_argument("law", choices=("rdp2dp", "hd2dp", "falsify"))
    p.add_argument("--alpha", type=float)
    p.add_argument("--rho", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--method", choices=("refined", "mironov", "tangent"), default="refined")
    p.add_argument("--div", help="premise divergence for falsify")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("bvn", help="weak Birkhoff-von Neumann decomposition of a channel")
    p.add_argument("--channel", required=True, help="Channel JSON file")
    p.set_defaults(func=cmd_bvn)

    p = sub.add_parser("rr-cloud", help="(PFA, PMD) cloud of randomized response")
    p.add_argument("--bits", type=int, default=3)
    p.add_argument("--flip", type=float, default=0.34)
    p.add_argument("--region", default="dp:0.67,0.05")
    p.add_argument("--all-pairs", action="store_true")
    point_args(p)
    p.set_defaults(func=cmd_rr_cloud)

    p = sub.add_parser("check", help="check a privacy claim on a mechanism")
    p.add_argument("--mech", required=True, help="rr:BITS,FLIP")
    p.add_argument("--claim", required=True, help="dp:E,D | rdp:A,R | zcdp:XI,R | tcdp:R,OMEGA")
    p.set_defaults(func=cmd_check)
    return parser


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text = args.func(args)
    except DivkitError as exc:
        stderr.write(json.dumps({"error": exc.kind, "message": str(exc)}) + "\n")
        return 1
    stdout.write(text + "\n")
    return 0


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
