"""Command-line front end: sweeps, figure grids and oracle cross-checks.

Exit codes: 0 success, 2 spec error, 3 tolerance breach, 4 degenerate row
encountered, 5 Fock cutoff insufficient.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np
import yaml

from . import __version__
from . import closed_form as cf
from .closed_form import DegenerateScenarioError
from .protocols import Scheme, ScenarioError, SensingScenario, evaluate

log = logging.getLogger("dqs")

EXIT_OK, EXIT_SPEC, EXIT_TOL, EXIT_DEGENERATE, EXIT_CUTOFF = 0, 2, 3, 4, 5

PARAMS = ("m", "r", "gain_db", "rm", "x", "x0", "xm", "eta1", "eta2")
SCHEME_ALIASES = {"single": "single", "scheme1": "scheme1", "scheme2": "scheme2", "1": "scheme1", "2": "scheme2"}
DEGENERATE = "degenerate"


class SpecError(ValueError):
    pass


def parse_range(text) -> list[float]:
    """'v', 'start:stop:step' (inclusive within half a step) or 'start:stop:countL' (log)."""
    if isinstance(text, (int, float)):
        return [float(text)]
    text = str(text).strip()
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return [float(parts[0])]
        if len(parts) != 3:
            raise SpecError(f"bad range {text!r}; use start:stop:step or start:stop:countL")
        start, stop = float(parts[0]), float(parts[1])
        if parts[2].upper().endswith("L"):
            count = int(parts[2][:-1])
            if count < 1 or start <= 0 or stop <= 0:
                raise SpecError(f"log range {text!r} needs positive endpoints and count")
            return [float(v) for v in np.geomspace(start, stop, count)]
        step = float(parts[2])
    except ValueError as exc:
        raise SpecError(f"bad range {text!r}: {exc}") from None
    if step <= 0:
        raise SpecError(f"step must be positive in {text!r}")
    if stop < start:
        raise SpecError(f"stop below start in {text!r}")
    count = int(math.floor((stop - start) / step + 0.5)) + 1
    return [float(np.round(start + k * step, 12)) for k in range(count)]


@dataclass
class SweepSpec:
    """Scenario template plus swept axes; every value is a range string or number."""

    scheme: str = "single"
    axes: dict = field(default_factory=dict)
    denominator: str = "lossy-opt"

    def validate(self) -> None:
        if self.scheme not in SCHEME_ALIASES:
            raise SpecError(f"unknown scheme {self.scheme!r}")
        self.scheme = SCHEME_ALIASES[self.scheme]
        unknown = set(self.axes) - set(PARAMS)
        if unknown:
            raise SpecError(f"unknown parameters {sorted(unknown)}")
        if "gain_db" in self.axes and "rm" in self.axes:
            raise SpecError("give either gain_db or rm, not both")
        if "x0" in self.axes and "xm" in self.axes:
            raise SpecError("give either x0 or xm, not both")
        if self.denominator not in ("lossy-opt", "lossless-opt"):
            raise SpecError(f"unknown denominator {self.denominator!r}")
        for name, val in self.axes.items():
            if not parse_range(val):
                raise SpecError(f"axis {name} is empty")

    def grid(self) -> list[dict]:
        names = list(self.axes)
        values = [parse_range(self.axes[n]) for n in names]
        return [dict(zip(names, combo)) for combo in itertools.product(*values)]

    def dump(self) -> str:
        return yaml.safe_dump(asdict(self), sort_keys=False)

    @classmethod
    def load(cls, text: str) -> "SweepSpec":
        data = yaml.safe_load(text) or {}
        if not isinstance(data, dict):
            raise SpecError("spec file must hold a mapping")
        extra = set(data) - {"scheme", "axes", "denominator"}
        if extra:
            raise SpecError(f"unknown spec keys {sorted(extra)}")
        return cls(**data)


@dataclass
class ResultRow:
    scheme: str
    M: int
    r: float
    gain_db: float
    x: float
    x0: float
    x_m: float
    eta1: float
    eta2: float
    error: float | str
    error_closed_form: float | str
    optimal: float
    ratio: float | str
    ratio_lossless_opt: float | str
    ratio_lossy_opt: float | str
    mean_photons: float | str


FIELDNAMES = [f.name for f in fields(ResultRow)]


def scenario_from_point(scheme: str, point: dict) -> SensingScenario:
    p = dict(point)
    rm = cf.gain_db_to_rm(p["gain_db"]) if "gain_db" in p else p.get("rm", 0.0)
    eta1 = p.get("eta1", 1.0)
    if "x0" in p:
        xm = cf.xm_from_x0(p["x0"], rm, eta1)
    else:
        xm = p.get("xm", 0.0)
    m = p.get("m", 1.0)
    if m != int(m):
        raise SpecError(f"mode count must be an integer, got {m}")
    return SensingScenario(
        Scheme(scheme), modes=int(m), r=p.get("r", 0.0), rm=rm, x=p.get("x", 0.0), xm=xm,
        eta1=eta1, eta2=p.get("eta2", 1.0),
    )


def evaluate_point(args) -> ResultRow:
    scheme, point, denominator = args
    s = scenario_from_point(scheme, point)
    opt_lossy = cf.optimal_bound(s.r, s.effective_modes, s.eta1)
    opt_lossless = cf.optimal_bound(s.r, s.effective_modes, 1.0)
    optimal = opt_lossy if denominator == "lossy-opt" else opt_lossless
    base = dict(
        scheme=s.scheme.value, M=s.modes, r=s.r, gain_db=s.gain_db, x=s.x, x0=s.x0, x_m=s.xm,
        eta1=s.eta1, eta2=s.eta2, optimal=optimal,
    )
    try:
        rep = evaluate(s)
    except DegenerateScenarioError:
        return ResultRow(**base, error=DEGENERATE, error_closed_form=DEGENERATE, ratio=DEGENERATE,
                         ratio_lossless_opt=DEGENERATE, ratio_lossy_opt=DEGENERATE, mean_photons=DEGENERATE)
    return ResultRow(
        **base,
        error=rep.error_engine,
        error_closed_form=rep.error_closed_form,
        ratio=rep.error_engine / optimal,
        ratio_lossless_opt=rep.error_engine / opt_lossless,
        ratio_lossy_opt=rep.error_engine / opt_lossy,
        mean_photons=rep.mean_photons,
    )


def worker_count() -> int:
    cap = os.environ.get("DQS_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            log.warning("ignoring non-integer DQS_THREADS=%r", cap)
    return n


def run_sweep(spec: SweepSpec) -> list[ResultRow]:
    spec.validate()
    jobs = [(spec.scheme, p, spec.denominator) for p in spec.grid()]
    for _, p, _ in jobs:
        scenario_from_point(spec.scheme, p)
    workers = worker_count()
    if workers > 1 and len(jobs) > 2000:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(evaluate_point, jobs, chunksize=256))
    return [evaluate_point(j) for j in jobs]


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


def render(rows: list[ResultRow], fmt: str) -> str:
    if fmt == "json":
        return json.dumps([asdict(r) for r in rows], indent=1) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FIELDNAMES)
    for r in rows:
        w.writerow([_fmt(getattr(r, f)) for f in FIELDNAMES])
    return buf.getvalue()


def write_output(text: str, out: str, meta: dict | None) -> None:
    if out == "-":
        sys.stdout.write(text)
        return
    with open(out, "w", newline="") as fh:
        fh.write(text)
    if meta is not None:
        with open(out + ".meta.json", "w") as fh:
            json.dump(meta, fh, indent=1)


def _meta(argv, spec: SweepSpec) -> dict:
    import datetime
    import platform

    return {
        "dqs_version": __version__,
        "argv": list(argv),
        "spec": asdict(spec),
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "python": platform.python_version(),
    }


FIGURES = {
    "fig3a": SweepSpec("single", {"r": "0.5:2:0.5", "gain_db": "0:60:0.5", "x": 0.01, "x0": 1}, "lossless-opt"),
    "fig3b": SweepSpec("single", {"r": "0.05:3:0.05", "x0": "0:5:0.05", "gain_db": 50, "x": 0.01}, "lossless-opt"),
    "fig3c": SweepSpec("single", {"r": "0:2:0.1", "x": "-0.05:0.05:0.001", "gain_db": 50, "x0": 1}, "lossless-opt"),
    "fig5a": SweepSpec("scheme1", {"m": 10, "r": "0.05:3:0.05", "x0": "0:5:0.05", "gain_db": 50, "x": 0.01}, "lossless-opt"),
    "fig5b": SweepSpec("scheme1", {"m": 10, "r": "0:2:0.1", "x": "-0.05:0.05:0.001", "gain_db": 50, "x0": 2.5}, "lossless-opt"),
    "fig5c": SweepSpec("scheme2", {"m": 10, "r": "0.05:3:0.05", "x0": "0:5:0.05", "gain_db": 50, "x": 0.01}, "lossless-opt"),
    "fig5d": SweepSpec("scheme2", {"m": 10, "r": "0:2:0.1", "x": "-0.05:0.05:0.001", "gain_db": 50, "x0": 2.5}, "lossless-opt"),
    "fig6a": SweepSpec("scheme1", {"m": 10, "r": 1, "gain_db": 50, "x": 0.01, "x0": 2.5,
                                   "eta1": "0.1:1:0.05", "eta2": "0.1:1:0.05"}, "lossy-opt"),
    "fig6b": SweepSpec("scheme2", {"m": 10, "r": 1, "gain_db": 50, "x": 0.01, "x0": 2.5,
                                   "eta1": "0.1:1:0.05", "eta2": "0.1:1:0.05"}, "lossy-opt"),
}


ORACLE_PRESETS = {
    "default": dict(scheme="single", r=0.2, rm=0.5, x=0.1, xm=1.0, eta1=1.0, eta2=1.0, cutoff=60, tol=1e-7),
    "lossy": dict(scheme="single", r=0.2, rm=0.5, x=0.1, xm=1.0, eta1=0.6, eta2=0.8, cutoff=60, tol=1e-6),
    "scheme1": dict(scheme="scheme1", r=0.3, rm=0.3, x=0.2, xm=0.8, eta1=1.0, eta2=1.0, cutoff=40, tol=1e-7),
    "scheme2": dict(scheme="scheme2", r=0.2, rm=0.4, x=0.05, xm=0.8, eta1=1.0, eta2=1.0, cutoff=30, tol=1e-6),
}


def oracle_routes(scheme, r, rm, x, xm, eta1=1.0, eta2=1.0, cutoff=60, h=1e-3):
    """<O>, Var O and the error by the engine, the closed forms and the Fock oracle.

    Returns a dict route -> (mean, variance, error). Fock errors use a central
    difference of <O>, which is exact for the quadratic x-dependence.
    """
    from .fock import fock_intensity_moments, oracle_pipeline

    M = 1 if scheme == "single" else 2
    s = SensingScenario(Scheme(scheme), modes=M, r=r, rm=rm, x=x, xm=xm, eta1=eta1, eta2=eta2)
    rep = evaluate(s)
    routes = {"engine": (rep.first_moment, rep.variance, rep.error_engine)}

    if scheme == "scheme2":
        mean, var, deriv = cf.scheme2_moments(r, rm, x, xm, 2, eta1, eta2)
    else:
        scale = math.sqrt(M)
        mean, var, deriv = cf.single_mode_moments(r, rm, scale * x, xm, eta1, eta2)
        deriv *= scale
    routes["closed_form"] = (mean, var, var / deriv**2)

    st = oracle_pipeline(scheme, r, rm, x, xm, eta1, eta2, cutoff)
    fmean, fvar = fock_intensity_moments(st)
    up = fock_intensity_moments(oracle_pipeline(scheme, r, rm, x + h, xm, eta1, eta2, cutoff))[0]
    dn = fock_intensity_moments(oracle_pipeline(scheme, r, rm, x - h, xm, eta1, eta2, cutoff))[0]
    fderiv = (up - dn) / (2 * h)
    routes["fock"] = (fmean, fvar, fvar / fderiv**2)
    return routes


def route_deviation(routes: dict) -> dict:
    """Max relative deviation of each quantity across routes."""
    out = {}
    for k, name in enumerate(("mean", "variance", "error")):
        vals = [v[k] for v in routes.values()]
        ref = max(abs(v) for v in vals)
        out[name] = (max(vals) - min(vals)) / ref if ref > 0 else 0.0
    return out


def cmd_sweep(args) -> int:
    if args.config:
        with open(args.config) as fh:
            spec = SweepSpec.load(fh.read())
    else:
        axes = {}
        for name in PARAMS:
            val = getattr(args, name)
            if val is not None:
                axes[name] = val
        spec = SweepSpec(args.scheme, axes, args.denominator)
    spec.validate()
    if args.dump_spec:
        with open(args.dump_spec, "w") as fh:
            fh.write(spec.dump())
    return _emit(spec, args)


def _emit(spec: SweepSpec, args) -> int:
    try:
        rows = run_sweep(spec)
    except ScenarioError as exc:
        raise SpecError(str(exc)) from None
    degenerate = [r for r in rows if r.error == DEGENERATE]
    if degenerate and args.strict:
        print(f"error: degenerate scenario at {asdict(degenerate[0])}", file=sys.stderr)
        return EXIT_DEGENERATE
    write_output(render(rows, args.format), args.out, None if args.no_meta else _meta(sys.argv, spec))
    _summary(rows, getattr(args, "report", "error"))
    if degenerate:
        print(f"warning: {len(degenerate)} degenerate rows marked", file=sys.stderr)
        return EXIT_DEGENERATE
    return EXIT_OK


def _summary(rows, report) -> None:
    good = [r for r in rows if r.error != DEGENERATE]
    if not good:
        return
    if report == "photons":
        n = [r.mean_photons for r in good]
        log.info("mean photons: min %.6g max %.6g over %d rows", min(n), max(n), len(good))
    else:
        best = min(good, key=lambda r: r.error)
        log.info("min error %.9g at gain_db=%.6g r=%.6g x0=%.6g (ratio %.6g)",
                 best.error, best.gain_db, best.r, best.x0, best.ratio)


def cmd_figure(args) -> int:
    if args.name not in FIGURES:
        print(f"error: unknown figure {args.name!r}; valid names: {', '.join(FIGURES)}", file=sys.stderr)
        return EXIT_SPEC
    spec = FIGURES[args.name]
    spec = SweepSpec(spec.scheme, dict(spec.axes), spec.denominator)
    args.report = "photons" if args.name in ("fig3c", "fig5b", "fig5d") else "error"
    return _emit(spec, args)


def cmd_oracle_check(args) -> int:
    from .fock import CutoffError

    cfg = dict(ORACLE_PRESETS[args.preset])
    if args.config:
        with open(args.config) as fh:
            extra = yaml.safe_load(fh) or {}
        unknown = set(extra) - set(cfg)
        if unknown:
            raise SpecError(f"unknown oracle keys {sorted(unknown)}")
        cfg.update(extra)
    if args.cutoff is not None:
        cfg["cutoff"] = args.cutoff
    if args.tol is not None:
        cfg["tol"] = args.tol
    tol = cfg.pop("tol")
    try:
        routes = oracle_routes(**cfg)
    except CutoffError as exc:
        print(f"CUTOFF-INSUFFICIENT: {exc}", file=sys.stderr)
        return EXIT_CUTOFF
    except DegenerateScenarioError as exc:
        print(f"DEGENERATE: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    for name, (m, v, e) in routes.items():
        print(f"{name:12s} <O>={m:.12g} Var(O)={v:.12g} error={e:.12g}")
    dev = route_deviation(routes)
    ok = True
    for name, d in dev.items():
        status = "PASS" if d <= tol else "FAIL"
        ok &= d <= tol
        print(f"{status} {name:9s} max relative deviation {d:.3e} (tol {tol:.1e})")
    return EXIT_OK if ok else EXIT_TOL


def _add_output_flags(p):
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--strict", action="store_true", help="abort on the first degenerate row")
    p.add_argument("--no-meta", action="store_true", help="skip the .meta.json sidecar")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dqs", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="evaluate a parameter grid")
    sw.add_argument("--config", help="YAML sweep spec (as written by --dump-spec)")
    sw.add_argument("--scheme", default="single", choices=sorted(SCHEME_ALIASES))
    sw.add_argument("--m", help="mode count")
    sw.add_argument("--r", help="probe squeezing")
    g = sw.add_mutually_exclusive_group()
    g.add_argument("--gain-db", dest="gain_db", help="OPA gain in dB")
    g.add_argument("--rm", help="OPA squeezing parameter")
    sw.add_argument("--x", help="unknown displacement")
    g = sw.add_mutually_exclusive_group()
    g.add_argument("--x0", help="gain-scaled reference displacement")
    g.add_argument("--xm", help="raw reference displacement")
    sw.add_argument("--eta1", help="transmissivity after encoding")
    sw.add_argument("--eta2", help="transmissivity before detection")
    sw.add_argument("--denominator", choices=("lossy-opt", "lossless-opt"), default="lossy-opt")
    sw.add_argument("--report", choices=("error", "photons"), default="error")
    sw.add_argument("--dump-spec", help="write the resolved spec as YAML")
    _add_output_flags(sw)
    sw.set_defaults(func=cmd_sweep)

    fg = sub.add_parser("figure", help="emit the data grid behind a figure panel")
    fg.add_argument("name")
    _add_output_flags(fg)
    fg.set_defaults(func=cmd_figure)

    oc = sub.add_parser("oracle-check", help="engine vs closed form vs Fock oracle")
    oc.add_argument("--preset", choices=sorted(ORACLE_PRESETS), default="default")
    oc.add_argument("--config", help="YAML overrides for the preset")
    oc.add_argument("--cutoff", type=int)
    oc.add_argument("--tol", type=float)
    oc.set_defaults(func=cmd_oracle_check)
    return parser


def _glue_negative_ranges(argv: list[str]) -> list[str]:
    """Turn '--x -0.05:0.05:0.001' into '--x=-0.05:0.05:0.001' so argparse keeps it."""
    out = []
    i = 0
    while i < len(argv):
        a = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else ""
        if a.startswith("--") and "=" not in a and len(nxt) > 1 and nxt[0] == "-" and (nxt[1].isdigit() or nxt[1] == "."):
            out.append(f"{a}={nxt}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_glue_negative_ranges(argv))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (SpecError, ScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC


if __name__ == "__main__":
    sys.exit(main())
