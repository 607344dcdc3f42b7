#!/usr/bin/env python3
"""Generate a synthetic smooth target CSV (and optional pseudoproxy CSV).

The target is a low-pass filtered AR(1) draw rescaled to temperature-anomaly
amplitudes, which is enough to drive every CLI command without real data.
"""

import argparse
from pathlib import Path

from paleoxval import NoiseSpec, generate, smooth_target
from paleoxval.io import save_proxies, save_target


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=149, help="series length in years")
    ap.add_argument("--seed", type=int, default=77)
    ap.add_argument("--first-year", type=int, default=1850)
    ap.add_argument("--scale", type=float, default=0.25, help="target std in degC")
    ap.add_argument("--out", default="target.csv")
    ap.add_argument("--proxies", help="also write a pseudoproxy matrix CSV here")
    ap.add_argument("--proxy-kind", default="ar1", choices=["white", "ar1", "brownian"])
    ap.add_argument("--proxy-phi", type=float, default=0.9)
    ap.add_argument("--proxy-count", type=int, default=1138)
    args = ap.parse_args()

    y = smooth_target(args.n, seed=args.seed, scale=args.scale,
                      first_year=args.first_year)
    path = save_target(y, Path(args.out))
    print(f"wrote {path} ({y.n} years, {y.years[0]}..{y.years[-1]})")

    if args.proxies:
        phi = args.proxy_phi if args.proxy_kind == "ar1" else None
        X = generate(NoiseSpec(kind=args.proxy_kind, n=args.n, p=args.proxy_count,
                               seed=args.seed + 1, phi=phi))
        ppath = save_proxies(X, y.years, Path(args.proxies))
        print(f"wrote {ppath} ({X.n} x {X.p})")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
