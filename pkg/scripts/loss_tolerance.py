"""Ratio to the loss-degraded optimum on an (eta1, eta2) grid for both schemes.

Prints, per eta1, the spread across eta2 and the worst ratio. Encoding loss
attenuates the signal itself, so the ratio grows roughly like 1/eta1 while the
eta2 direction stays flat once the OPA gain is high.
"""

from __future__ import annotations

import argparse

import numpy as np

from dqs import closed_form as cf
from dqs.cli import parse_range
from dqs.protocols import Scheme, SensingScenario, loss_surface


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--m", type=int, default=10)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--gain-db", type=float, default=50.0)
    p.add_argument("--x", type=float, default=0.01)
    p.add_argument("--x0", type=float, default=2.5)
    p.add_argument("--eta1", default="0.1:1:0.1")
    p.add_argument("--eta2", default="0.1:1:0.05")
    args = p.parse_args()

    eta1, eta2 = parse_range(args.eta1), parse_range(args.eta2)
    rm = cf.gain_db_to_rm(args.gain_db)
    for scheme in (Scheme.SCHEME1, Scheme.SCHEME2):
        base = SensingScenario.from_x0(args.x0, scheme=scheme, modes=args.m, r=args.r, rm=rm, x=args.x)
        surf = loss_surface(base, eta1, eta2)
        print(f"{scheme.value}  M={args.m} r={args.r} G={args.gain_db} dB x={args.x} x0={args.x0}")
        print(f"  {'eta1':>5} {'min ratio':>10} {'max ratio':>10} {'eta2 spread':>12}")
        for e1, row in zip(eta1, surf):
            print(f"  {e1:5.2f} {row.min():10.4f} {row.max():10.4f} {(row.max() - row.min()) / row.min():12.2e}")
        print(f"  1/eta1 reference at eta1={eta1[0]}: {1 / eta1[0]:.3f}")


if __name__ == "__main__":
    main()
