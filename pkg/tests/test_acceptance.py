"""Acceptance criteria, one test per criterion.

Each test prints a single ``CRITERION n PASS|FAIL ...`` line; the lines are
collected again in the terminal summary. Run ``python3 tests/test_acceptance.py``
for the bare report without pytest.
"""

import itertools
import math
import time

import numpy as np

from dqs import closed_form as cf
from dqs.cli import oracle_routes, route_deviation
from dqs.fock import CutoffError
from dqs.gaussian import (
    apply_displacement,
    apply_loss,
    apply_orthogonal_network,
    apply_squeeze,
    ordering_correction,
    photon_moments,
    total_photon_number,
    vacuum,
)
from dqs.protocols import Scheme, SensingScenario, evaluate, loss_surface, weighted_estimate_check

G50 = cf.gain_db_to_rm(50.0)

REPORT: dict[int, str] = {}


def verdict(n: int, ok: bool, detail: str) -> None:
    line = f"CRITERION {n:2d} {'PASS' if ok else 'FAIL'}  {detail}"
    REPORT[n] = line
    print(line)
    assert ok, line


def rel(a, b):
    return abs(a - b) / abs(b)


def test_criterion_01_optimal_point():
    t0 = time.perf_counter()
    rm_grid = np.round(np.arange(0.0, 3.0 + 1e-9, 0.05), 12)
    worst, misplaced = 0.0, []
    for r in (0.5, 1.0, 1.5, 2.0):
        errs = [evaluate(SensingScenario.from_x0(1.0, r=r, rm=float(rm), x=0.01)).error_engine for rm in rm_grid]
        k = int(np.argmin(errs))
        if rm_grid[k] != r:
            misplaced.append(r)
        worst = max(worst, rel(errs[k], 1.0 / (2.0 * math.exp(2.0 * r))))
    dt = time.perf_counter() - t0
    verdict(1, not misplaced and worst <= 1e-9 and dt < 1.0,
            f"argmin at rm=r for all r (misplaced {misplaced}); max rel dev {worst:.1e} (tol 1e-9); {dt:.2f} s (< 1 s)")


def oracle_grid():
    single = itertools.product([0.0, 0.5, 1.0], [0.0, 0.5, 1.0], [-1.5, -0.4, 0.3, 1.5], [0.5, 1.2])
    pts = [("single", *p) for p in single]
    two = itertools.product([0.25, 0.5], [0.25, 0.5], [-0.4, 0.3], [0.5, 1.0])
    pts += [(s, *p) for s, p in itertools.product(("scheme1", "scheme2"), list(two))]
    return pts


def test_criterion_02_triple_route():
    t0 = time.perf_counter()
    worst, used, skipped = 0.0, 0, 0
    for scheme, r, rm, x, xm in oracle_grid():
        try:
            dev = route_deviation(oracle_routes(scheme, r, rm, x, xm, cutoff=60))
        except CutoffError:
            skipped += 1
            continue
        used += 1
        worst = max(worst, *dev.values())
    dt = time.perf_counter() - t0
    verdict(2, used >= 50 and worst <= 1e-7 and dt < 120,
            f"{used} points ({skipped} beyond N_c=60); max rel dev {worst:.1e} (tol 1e-7); {dt:.1f} s (< 120 s)")


def test_criterion_03_dual_route():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20240603)
    worst = 0.0
    for k in range(500):
        scheme = (Scheme.SINGLE, Scheme.SCHEME1, Scheme.SCHEME2)[k % 3]
        gain = 50.0 if k % 5 == 0 else rng.uniform(0.0, 50.0)
        lossless = k % 4 == 0
        s = SensingScenario.from_x0(
            rng.uniform(0.1, 5.0), scheme=scheme, modes=int(rng.integers(1, 51)), r=rng.uniform(0.0, 2.0),
            rm=cf.gain_db_to_rm(gain), x=rng.uniform(-0.5, 0.5),
            eta1=1.0 if lossless else rng.uniform(0.1, 1.0), eta2=1.0 if lossless else rng.uniform(0.1, 1.0),
        )
        rep = evaluate(s)
        worst = max(worst, rel(rep.error_engine, rep.error_closed_form))
    dt = time.perf_counter() - t0
    verdict(3, worst <= 1e-9 and dt < 10, f"500 points, max rel dev {worst:.1e} (tol 1e-9); {dt:.2f} s (< 10 s)")


def test_criterion_04_heisenberg_scaling():
    target = 1.0 / (2.0 * math.e**2)
    worst = 0.0
    for scheme, M in itertools.product((Scheme.SCHEME1, Scheme.SCHEME2), (1, 2, 5, 10, 20)):
        err = evaluate(SensingScenario.from_x0(50.0, scheme=scheme, modes=M, r=1.0, rm=G50, x=0.01)).error_engine
        worst = max(worst, rel(err * M, target))
    verdict(4, worst <= 5e-3, f"max rel dev of M*err from 1/(2e^2): {worst:.2e} (tol 5e-3)")


def test_criterion_05_loss_tolerance():
    eta1 = [0.2, 0.5, 0.8, 1.0]
    eta2 = np.round(np.arange(0.1, 1.0 + 1e-9, 0.05), 12)
    spread, peak = 0.0, {}
    for scheme in (Scheme.SCHEME1, Scheme.SCHEME2):
        base = SensingScenario.from_x0(2.5, scheme=scheme, modes=10, r=1.0, rm=G50, x=0.01)
        surf = loss_surface(base, eta1, eta2)
        spread = max(spread, float(((surf.max(axis=1) - surf.min(axis=1)) / surf.min(axis=1)).max()))
        peak[scheme.value] = float(surf.max())
    flat = spread < 0.01
    bounded = max(peak.values()) <= 2.5
    verdict(5, flat and bounded,
            f"eta2 spread {spread:.2e} (< 1e-2: {'ok' if flat else 'no'}); max ratio over eta1 in [0.2, 1]: "
            + ", ".join(f"{k} {v:.3f}" for k, v in peak.items()) + " (<= 2.5)")


def test_criterion_06_scheme1_factorization():
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(100):
        M = int(rng.integers(1, 51))
        r, rm = rng.uniform(0, 2), rng.uniform(0, 6)
        x, xm = rng.uniform(-0.5, 0.5), rng.uniform(0.1, 5.0) * math.exp(rm)
        s1 = evaluate(SensingScenario(Scheme.SCHEME1, modes=M, r=r, rm=rm, x=x, xm=xm)).error_engine
        single = evaluate(SensingScenario(Scheme.SINGLE, r=r, rm=rm, x=math.sqrt(M) * x, xm=xm)).error_engine
        worst = max(worst, rel(s1, single / M))
    verdict(6, worst <= 1e-10, f"100 points, max rel dev {worst:.1e} (tol 1e-10)")


def test_criterion_07_weighted_reduction():
    rng = np.random.default_rng(7)
    worst = 0.0
    for M in (2, 3, 5):
        for _ in range(50):
            w = rng.normal(size=M)
            w /= np.linalg.norm(w)
            xs = rng.uniform(-0.5, 0.5, size=M)
            rm = rng.uniform(0, 3)
            weighted, single = weighted_estimate_check(
                w, xs, rng.uniform(0, 2), rm, rng.uniform(0.5, 3) * math.exp(rm),
                rng.uniform(0.1, 1), rng.uniform(0.1, 1),
            )
            worst = max(worst, rel(weighted.error_engine, single.error_engine))
    verdict(7, worst <= 1e-10, f"150 draws, max rel dev {worst:.1e} (tol 1e-10)")


def test_criterion_08_ratio_bands():
    r_grid = np.round(np.arange(0.05, 3.0 + 1e-9, 0.05), 12)
    x0_grid = np.round(np.arange(0.0, 5.0 + 1e-9, 0.05), 12)
    notes, ok = [], True
    for scheme, M in ((Scheme.SINGLE, 1), (Scheme.SCHEME1, 10), (Scheme.SCHEME2, 10)):
        ratio = np.array([[evaluate(SensingScenario.from_x0(float(x0), scheme=scheme, modes=M, r=float(r),
                                                            rm=G50, x=0.01)).ratio_lossless
                           for x0 in x0_grid] for r in r_grid])
        region = int((ratio <= 5).sum())
        rises = int((np.diff(ratio, axis=1) > 1e-12 * ratio[:, 1:]).sum())
        ok &= region > 0 and rises == 0
        notes.append(f"{scheme.value}: {region} cells <= 5, {rises} increases in x0")
    verdict(8, ok, "; ".join(notes))


def test_criterion_09_moment_identities():
    devs = []
    for M in (1, 2, 5):
        mean, var = photon_moments(vacuum(M), total_photon_number(M))
        devs += [abs(var), abs(mean - M), abs(ordering_correction(total_photon_number(M)) + M)]
    for y in (0.3, 1.0, 4.0):
        _, var = photon_moments(apply_displacement(vacuum(1), 0, y), total_photon_number(1))
        devs.append(abs(var - 2 * y * y) / (2 * y * y))
    worst = max(devs)
    verdict(9, worst <= 1e-12, f"max deviation {worst:.1e} (tol 1e-12)")


def _random_orthogonal(rng, M):
    q, r = np.linalg.qr(rng.normal(size=(M, M)))
    return q * np.sign(np.diag(r))


def test_criterion_10_random_compositions():
    t0 = time.perf_counter()
    rng = np.random.default_rng(10)
    bad = 0
    for _ in range(1000):
        M = int(rng.integers(1, 5))
        s = vacuum(M)
        unitary_only = rng.random() < 0.5
        for _ in range(int(rng.integers(1, 9))):
            kind = int(rng.integers(0, 3 if unitary_only else 4))
            mode = int(rng.integers(0, M))
            if kind == 0:
                s = apply_squeeze(s, mode, rng.uniform(-1.5, 1.5), rng.uniform(0, 2 * np.pi))
            elif kind == 1:
                s = apply_displacement(s, mode, rng.normal(), rng.normal())
            elif kind == 2:
                s = apply_orthogonal_network(s, _random_orthogonal(rng, M))
            else:
                s = apply_loss(s, [mode], rng.uniform(0, 1))
        nu = s.symplectic_eigenvalues()
        if nu.min() < 0.5 - 1e-9:
            bad += 1
        if unitary_only and abs(s.purity_det() - 1.0) > 1e-9:
            bad += 1
    dt = time.perf_counter() - t0
    verdict(10, bad == 0 and dt < 5, f"1000 compositions, {bad} violations; {dt:.2f} s (< 5 s)")


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                pass
