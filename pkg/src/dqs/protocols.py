"""End-to-end sensing pipelines evaluated by error propagation.

Pipeline order: probe squeeze on mode 1, splitter, signal displacement(s),
encoding loss eta1 on all modes, inverse splitter (scheme 1 / weighted),
measurement OPA, reference displacement, detection loss eta2.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import closed_form as cf
from .closed_form import DegenerateScenarioError
from .gaussian import (
    GaussianState,
    apply_displacement,
    apply_loss,
    apply_orthogonal_network,
    apply_squeeze,
    intensity_on,
    photon_moments,
    vacuum,
)
from .network import balanced_bsa_matrix, weighted_network


class Scheme(str, enum.Enum):
    SINGLE = "single"
    SCHEME1 = "scheme1"
    SCHEME2 = "scheme2"
    WEIGHTED = "weighted"


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class SensingScenario:
    scheme: Scheme = Scheme.SINGLE
    modes: int = 1
    r: float = 0.0
    rm: float = 0.0
    x: float = 0.0
    xm: float = 0.0
    eta1: float = 1.0
    eta2: float = 1.0
    weights: tuple[float, ...] | None = None
    signals: tuple[float, ...] | None = None

    def __post_init__(self):
        scheme = Scheme(self.scheme)
        object.__setattr__(self, "scheme", scheme)
        if scheme is Scheme.SINGLE:
            object.__setattr__(self, "modes", 1)
        if scheme is Scheme.WEIGHTED:
            if self.weights is None or self.signals is None:
                raise ScenarioError("weighted scheme needs weights and per-mode signals")
            w = np.asarray(self.weights, dtype=float)
            if len(w) != len(self.signals):
                raise ScenarioError("weights and signals differ in length")
            if not np.any(w):
                raise ScenarioError("weight vector must be nonzero")
            w = w / np.linalg.norm(w)
            object.__setattr__(self, "weights", tuple(w))
            object.__setattr__(self, "signals", tuple(float(v) for v in self.signals))
            object.__setattr__(self, "modes", len(w))
            object.__setattr__(self, "x", float(w @ np.asarray(self.signals)))
        if self.modes < 1:
            raise ScenarioError(f"mode count must be positive, got {self.modes}")
        if self.r < 0 or self.rm < 0:
            raise ScenarioError("squeezing parameters must be non-negative")
        for name in ("eta1", "eta2"):
            eta = getattr(self, name)
            if not 0.0 <= eta <= 1.0:
                raise ScenarioError(f"{name} must lie in [0, 1], got {eta}")

    @classmethod
    def from_x0(cls, x0: float, **kw) -> "SensingScenario":
        """Build with the gain-scaled reference x0, x_m = x0 e^{rm} sqrt(eta1)."""
        xm = cf.xm_from_x0(x0, kw.get("rm", 0.0), kw.get("eta1", 1.0))
        return cls(xm=xm, **kw)

    @property
    def x0(self) -> float:
        return cf.x0_from_xm(self.xm, self.rm, self.eta1) if self.eta1 > 0 else math.nan

    @property
    def gain_db(self) -> float:
        return cf.rm_to_gain_db(self.rm)

    @property
    def measured_modes(self) -> list[int]:
        if self.scheme is Scheme.SCHEME2:
            return list(range(self.modes))
        return [0]

    @property
    def effective_modes(self) -> int:
        """Mode count in the optimal bound; the weighted scheme estimates one sum."""
        return 1 if self.scheme is Scheme.WEIGHTED else self.modes


@dataclass(frozen=True)
class SensitivityReport:
    error_engine: float
    error_closed_form: float | None
    optimal: float
    optimal_lossless: float
    mean_photons: float
    first_moment: float
    variance: float
    derivative: float
    ratio: float = field(init=False)
    ratio_lossless: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "ratio", self.error_engine / self.optimal)
        object.__setattr__(self, "ratio_lossless", self.error_engine / self.optimal_lossless)


def _signal_pattern(s: SensingScenario) -> np.ndarray:
    if s.scheme is Scheme.WEIGHTED:
        return np.asarray(s.signals)
    return np.full(s.modes, s.x)


def _networks(s: SensingScenario):
    """(encoder, decoder) orthogonal matrices; None where the scheme has none."""
    if s.scheme is Scheme.SINGLE:
        return None, None
    if s.scheme is Scheme.WEIGHTED:
        O = weighted_network(s.weights).matrix
        return O.T, O
    B = balanced_bsa_matrix(s.modes)
    return B, (B.T if s.scheme is Scheme.SCHEME1 else None)


def _pipeline(s: SensingScenario, signals: np.ndarray, xm: float, state: GaussianState | None = None) -> GaussianState:
    enc, dec = _networks(s)
    if state is None:
        state = apply_squeeze(vacuum(s.modes), 0, s.r)
    if enc is not None:
        state = apply_orthogonal_network(state, enc)
    for i, xi in enumerate(signals):
        if xi != 0.0:
            state = apply_displacement(state, i, xi, 0.0)
    state = apply_loss(state, None, s.eta1)
    if dec is not None:
        state = apply_orthogonal_network(state, dec)
    measured = s.measured_modes
    for m in measured:
        state = apply_squeeze(state, m, -s.rm)
        if xm != 0.0:
            state = apply_displacement(state, m, xm, 0.0)
    return apply_loss(state, measured, s.eta2)


def build_output_state(s: SensingScenario) -> GaussianState:
    """Gaussian state reaching the intensity detector."""
    return _pipeline(s, _signal_pattern(s), s.xm)


def signal_direction(s: SensingScenario) -> np.ndarray:
    """d mu / dx at the detector; the mean is affine in the signal.

    Obtained by pushing a unit signal through the linear part of the pipeline
    (zero probe mean, no reference displacement).
    """
    if s.scheme is Scheme.WEIGHTED:
        unit = np.asarray(s.weights)
    else:
        unit = np.ones(s.modes)
    return _pipeline(s, unit, 0.0).mean


def closed_form_error(s: SensingScenario) -> float | None:
    lossless = s.eta1 == 1.0 and s.eta2 == 1.0
    if s.scheme in (Scheme.SINGLE, Scheme.WEIGHTED):
        if lossless:
            return cf.single_mode_exact(s.r, s.rm, s.x, s.xm)
        return cf.single_mode_lossy(s.r, s.rm, s.x, s.xm, s.eta1, s.eta2)
    if s.scheme is Scheme.SCHEME1:
        if lossless:
            return cf.scheme1_exact(s.r, s.rm, s.x, s.xm, s.modes)
        return cf.scheme1_lossy(s.r, s.rm, s.x, s.xm, s.modes, s.eta1, s.eta2)
    if lossless:
        return cf.scheme2_exact(s.r, s.rm, s.x, s.xm, s.modes)
    return cf.scheme2_lossy(s.r, s.rm, s.x, s.xm, s.modes, s.eta1, s.eta2)


def evaluate(s: SensingScenario, closed_form: bool = True) -> SensitivityReport:
    """Error propagation Var(O) / (d<O>/dx)^2 through the Gaussian engine."""
    state = build_output_state(s)
    obs = intensity_on(s.modes, s.measured_modes)
    mean, var = photon_moments(state, obs)
    v = signal_direction(s)
    deriv = float(2.0 * v @ obs.matrix @ state.mean)
    if abs(deriv) < 1e-300:
        raise DegenerateScenarioError(f"d<O>/dx vanishes for {s}")
    err = var / deriv**2
    n_meas = len(s.measured_modes)
    return SensitivityReport(
        error_engine=err,
        error_closed_form=closed_form_error(s) if closed_form else None,
        optimal=cf.optimal_bound(s.r, s.effective_modes, s.eta1),
        optimal_lossless=cf.optimal_bound(s.r, s.effective_modes, 1.0),
        mean_photons=(mean - n_meas) / 2.0,
        first_moment=mean,
        variance=var,
        derivative=deriv,
    )


def mean_intensity(s: SensingScenario) -> float:
    """<O> at the detector; used as the finite-difference oracle for the derivative."""
    state = build_output_state(s)
    return photon_moments(state, intensity_on(s.modes, s.measured_modes))[0]


def loss_surface(s: SensingScenario, eta1_grid, eta2_grid) -> np.ndarray:
    """Ratio to the eta1-degraded optimum on an (eta1, eta2) grid; rows follow eta1."""
    out = np.empty((len(eta1_grid), len(eta2_grid)))
    x0 = s.x0
    for i, e1 in enumerate(eta1_grid):
        for j, e2 in enumerate(eta2_grid):
            sc = replace(s, eta1=float(e1), eta2=float(e2), xm=cf.xm_from_x0(x0, s.rm, float(e1)))
            out[i, j] = evaluate(sc, closed_form=False).ratio
    return out


def weighted_estimate_check(w, signals, r, rm, xm, eta1=1.0, eta2=1.0):
    """Run the weighted pipeline and the single-mode pipeline at x* = w . x.

    Returns both reports; their engine errors coincide.
    """
    weighted = SensingScenario(
        Scheme.WEIGHTED, r=r, rm=rm, xm=xm, eta1=eta1, eta2=eta2,
        weights=tuple(np.asarray(w, dtype=float)), signals=tuple(np.asarray(signals, dtype=float)),
    )
    single = SensingScenario(Scheme.SINGLE, r=r, rm=rm, x=weighted.x, xm=xm, eta1=eta1, eta2=eta2)
    return evaluate(weighted), evaluate(single)
