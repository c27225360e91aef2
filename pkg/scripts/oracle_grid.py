"""Engine vs closed forms vs truncated Fock oracle on a small grid.

Points whose photon population reaches the top of the cutoff are reported and
skipped rather than compared.
"""

from __future__ import annotations

import argparse
import itertools
import time

from dqs.cli import oracle_routes, route_deviation
from dqs.fock import CutoffError


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--cutoff", type=int, default=60)
    p.add_argument("--tol", type=float, default=1e-7)
    args = p.parse_args()

    pts = [("single", *q) for q in itertools.product([0.0, 0.5, 1.0], [0.0, 0.5, 1.0], [-1.5, -0.4, 0.3, 1.5], [0.5, 1.2])]
    pts += [(s, *q) for s in ("scheme1", "scheme2")
            for q in itertools.product([0.25, 0.5], [0.25, 0.5], [-0.4, 0.3], [0.5, 1.0])]
    t0 = time.perf_counter()
    worst, skipped = 0.0, 0
    for scheme, r, rm, x, xm in pts:
        tag = f"{scheme:8s} r={r:<4} rm={rm:<4} x={x:<5} xm={xm:<4}"
        try:
            dev = route_deviation(oracle_routes(scheme, r, rm, x, xm, cutoff=args.cutoff))
        except CutoffError:
            skipped += 1
            print(f"{tag} skipped (cutoff)")
            continue
        d = max(dev.values())
        worst = max(worst, d)
        print(f"{tag} max rel dev {d:.2e}")
    print(f"{len(pts) - skipped} compared, {skipped} skipped, worst {worst:.2e} "
          f"({'within' if worst <= args.tol else 'ABOVE'} {args.tol:g}); {time.perf_counter() - t0:.1f} s")


if __name__ == "__main__":
    main()
