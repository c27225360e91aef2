"""Analytic sensitivities of the OPA-assisted intensity measurement.

All functions take the OPA gain as its squeezing parameter ``rm`` (G = e^{2 rm})
and the reference displacement in its raw form ``xm``. Use :func:`xm_from_x0`
for the gain-scaled parameterization.
"""

from __future__ import annotations

import math


class DegenerateScenarioError(ArithmeticError):
    """The signal derivative vanishes, so the error-propagation estimate diverges."""


def gain_db_to_rm(gain_db: float) -> float:
    """10 log10 G = gain_db with G = e^{2 rm}."""
    return gain_db * math.log(10.0) / 20.0


def rm_to_gain_db(rm: float) -> float:
    return 20.0 * rm / math.log(10.0)


def xm_from_x0(x0: float, rm: float, eta1: float = 1.0) -> float:
    """x_m = x0 e^{rm} sqrt(eta1); reduces to sqrt(G) x0 without loss."""
    return x0 * math.exp(rm) * math.sqrt(eta1)


def x0_from_xm(xm: float, rm: float, eta1: float = 1.0) -> float:
    return xm * math.exp(-rm) / math.sqrt(eta1)


def squeezed_split_entries(r: float, M: int) -> tuple[float, float]:
    """(eps1, eps2) of a squeezed vacuum split evenly over M modes.

    Equal to (N -/+ sqrt(N (N + 1))) / M with N = sinh^2 r, written without
    the cancellation.
    """
    s = math.sinh(r)
    return -s * math.exp(-r) / M, s * math.exp(r) / M


def _checked(var: float, deriv: float) -> float:
    if abs(deriv) < 1e-300:
        raise DegenerateScenarioError("d<O>/dx vanishes; shift the reference displacement")
    return var / deriv**2


def single_mode_exact(r: float, rm: float, x: float, xm: float) -> float:
    """Lossless single-mode error, exact in the OPA gain."""
    y = x * math.exp(rm) + xm
    if y == 0.0:
        raise DegenerateScenarioError("x e^{rm} + x_m = 0")
    # cosh(4d) - 1 = 2 sinh^2(2d); the 2 e^{-2(r - 2rm)}(...)^2 term over the
    # denominator is exactly e^{-2r}/2
    return math.sinh(2.0 * (r - rm)) ** 2 / (2.0 * y * y * math.exp(2.0 * rm)) + math.exp(-2.0 * r) / 2.0


def single_mode_moments(r, rm, x, xm, eta1=1.0, eta2=1.0):
    """(<O>, Var O, d<O>/dx) for O = x^2 + p^2 at the detector."""
    _check_eta(eta1, eta2)
    g = math.exp(rm)
    t = math.sqrt(eta1 * eta2)
    mx = t * x * g + math.sqrt(eta2) * xm
    vx = eta1 * eta2 * math.exp(-2.0 * (r - rm)) / 2 + (1 - eta1) * eta2 * g * g / 2 + (1 - eta2) / 2
    vp = eta1 * eta2 * math.exp(2.0 * (r - rm)) / 2 + (1 - eta1) * eta2 / (g * g) / 2 + (1 - eta2) / 2
    mean = vx + vp + mx * mx
    var = 2 * vx * vx + 4 * vx * mx * mx + 2 * vp * vp - 1
    return mean, var, 2 * t * g * mx


def single_mode_lossy(r, rm, x, xm, eta1=1.0, eta2=1.0) -> float:
    _, var, deriv = single_mode_moments(r, rm, x, xm, eta1, eta2)
    return _checked(var, deriv)


def scheme1_exact(r, rm, x, xm, M) -> float:
    """Inverse-splitter scheme; the uniform shift x lands on mode 1 as sqrt(M) x."""
    return single_mode_exact(r, rm, math.sqrt(M) * x, xm) / M


def scheme1_lossy(r, rm, x, xm, M, eta1=1.0, eta2=1.0) -> float:
    return single_mode_lossy(r, rm, math.sqrt(M) * x, xm, eta1, eta2) / M


def scheme2_exact(r, rm, x, xm, M) -> float:
    """Per-mode OPA detection with the summed intensity as estimator (lossless)."""
    e1, e2 = squeezed_split_entries(r, M)
    g1, g2 = e1 + 0.5, e2 + 0.5
    g = math.exp(rm)
    den = 4.0 * M * (x * g + xm) ** 2 * g * g
    if den == 0.0:
        raise DegenerateScenarioError("x e^{rm} + x_m = 0")
    s = (x + xm / g) ** 2
    num = (
        2.0 * (g1 * g1 + 2.0 * s * g1) * g**4
        + 2.0 * (M - 1) * (e1 * e1 + 2.0 * s * e1) * g**4
        + 2.0 * (g2 * g2 + (M - 1) * e2 * e2) / g**4
        - 1.0
    )
    return num / den


def scheme2_moments(r, rm, x, xm, M, eta1=1.0, eta2=1.0):
    """(<O>, Var O, d<O>/dx) for O = sum_i (x_i^2 + p_i^2)."""
    _check_eta(eta1, eta2)
    e1, e2 = squeezed_split_entries(r, M)
    G = math.exp(2.0 * rm)
    k = eta1 * eta2
    xc = k * e1 * G
    pc = k * e2 / G
    xd = xc + eta2 * G / 2 + (1 - eta2) / 2
    pd = pc + eta2 / G / 2 + (1 - eta2) / 2
    dy = math.sqrt(k) * math.exp(rm)
    y = dy * x + math.sqrt(eta2) * xm
    mean = M * (xd + pd + y * y)
    var = (
        2 * M * (xd * xd + 2 * y * y * xd)
        + 2 * M * (M - 1) * (xc * xc + 2 * y * y * xc)
        + 2 * M * pd * pd
        + 2 * M * (M - 1) * pc * pc
        - M
    )
    return mean, var, 2 * M * y * dy


def scheme2_lossy(r, rm, x, xm, M, eta1=1.0, eta2=1.0) -> float:
    _, var, deriv = scheme2_moments(r, rm, x, xm, M, eta1, eta2)
    return _checked(var, deriv)


def optimal_bound(r: float, M: int = 1, eta1: float = 1.0) -> float:
    """Inverse QFI of the split squeezed probe, degraded by encoding loss eta1."""
    return eta1 / (2.0 * M * math.exp(2.0 * r)) + (1.0 - eta1) / (2.0 * M)


def single_mode_high_gain(r, x, x0) -> float:
    return 1.0 / (2.0 * math.exp(2.0 * r)) + math.exp(-4.0 * r) / (8.0 * (x + x0) ** 2)


def scheme1_high_gain(r, x, x0, M) -> float:
    return single_mode_high_gain(r, math.sqrt(M) * x, x0) / M


def scheme2_high_gain(r, x, x0, M) -> float:
    d2 = (x + x0) ** 2
    return (4 * M * math.exp(-2 * r) * d2 + math.exp(-4 * r) + M - 1) / (8 * M * M * d2)


def _check_eta(eta1, eta2):
    for name, eta in (("eta1", eta1), ("eta2", eta2)):
        if not 0.0 <= eta <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {eta}")
