"""Gaussian states in the covariance-matrix picture.

Quadratures are interleaved as (x1, p1, x2, p2, ...) with x = (a + a^dag)/sqrt(2),
so the vacuum covariance is I/2. Every channel returns a new state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

SYM_TOL = 1e-12
UNCERTAINTY_TOL = 1e-9
ORTHO_TOL = 1e-10


class DimensionError(ValueError):
    pass


class ValidationError(ValueError):
    pass


def symplectic_form(modes: int) -> np.ndarray:
    """Block-diagonal Omega with [[0, 1], [-1, 0]] per mode."""
    return np.kron(np.eye(modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


@dataclass(frozen=True)
class GaussianState:
    modes: int
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        if self.modes < 1:
            raise DimensionError(f"mode count must be positive, got {self.modes}")
        mean = np.asarray(self.mean, dtype=float).reshape(-1)
        cov = np.asarray(self.cov, dtype=float)
        n = 2 * self.modes
        if mean.shape != (n,) or cov.shape != (n, n):
            raise DimensionError(
                f"expected mean ({n},) and cov ({n}, {n}), got {mean.shape} and {cov.shape}"
            )
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", 0.5 * (cov + cov.T))

    def symplectic_eigenvalues(self) -> np.ndarray:
        ev = np.linalg.eigvals(symplectic_form(self.modes) @ self.cov)
        return np.sort(np.abs(ev.imag))[::2]

    def check_uncertainty(self, tol: float = UNCERTAINTY_TOL) -> None:
        """Raise if cov + i Omega / 2 fails to be positive semidefinite."""
        nu = self.symplectic_eigenvalues()
        if nu.min() < 0.5 - tol:
            raise ValidationError(f"symplectic eigenvalue {nu.min():.3e} below 1/2")

    def purity_det(self) -> float:
        """det(2 Sigma); equals 1 exactly for pure states."""
        return float(np.linalg.det(2.0 * self.cov))


def vacuum(modes: int) -> GaussianState:
    if modes < 1:
        raise DimensionError(f"mode count must be positive, got {modes}")
    return GaussianState(modes, np.zeros(2 * modes), 0.5 * np.eye(2 * modes))


def _check_mode(state: GaussianState, mode: int) -> None:
    if not 0 <= mode < state.modes:
        raise IndexError(f"mode {mode} out of range for {state.modes}-mode state")


def _apply_symplectic(state: GaussianState, S: np.ndarray) -> GaussianState:
    return GaussianState(state.modes, S @ state.mean, S @ state.cov @ S.T)


def _embed(state: GaussianState, mode: int, block: np.ndarray) -> np.ndarray:
    S = np.eye(2 * state.modes)
    S[2 * mode:2 * mode + 2, 2 * mode:2 * mode + 2] = block
    return S


def rotation_block(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def squeeze_block(r: float, phase: float = 0.0) -> np.ndarray:
    """Symplectic matrix of exp(r (a^2 e^{-i phase} - a^dag^2 e^{i phase}) / 2).

    At zero phase x -> x e^{-r}, p -> p e^{r}. The measurement OPA of gain
    G = e^{2 r_m} is ``squeeze_block(-r_m)``.
    """
    R = rotation_block(phase / 2.0)
    return R @ np.diag([np.exp(-r), np.exp(r)]) @ R.T


def apply_squeeze(state: GaussianState, mode: int, r: float, phase: float = 0.0) -> GaussianState:
    _check_mode(state, mode)
    return _apply_symplectic(state, _embed(state, mode, squeeze_block(r, phase)))


def apply_displacement(state: GaussianState, mode: int, dx: float, dp: float = 0.0) -> GaussianState:
    _check_mode(state, mode)
    mean = state.mean.copy()
    mean[2 * mode] += dx
    mean[2 * mode + 1] += dp
    return GaussianState(state.modes, mean, state.cov)


def network_symplectic(O: np.ndarray) -> np.ndarray:
    """O acting identically on the x- and p-subvectors, in interleaved order."""
    return np.kron(O, np.eye(2))


def apply_orthogonal_network(state: GaussianState, O) -> GaussianState:
    O = np.asarray(O, dtype=float)
    if O.shape != (state.modes, state.modes):
        raise DimensionError(f"network is {O.shape}, state has {state.modes} modes")
    dev = np.abs(O.T @ O - np.eye(state.modes)).max()
    if dev > ORTHO_TOL:
        raise ValidationError(f"network matrix is not orthogonal (max deviation {dev:.3e})")
    return _apply_symplectic(state, network_symplectic(O))


def apply_loss(state: GaussianState, mode_set: Iterable[int] | None, eta: float) -> GaussianState:
    """Pure-loss channel of transmissivity eta on ``mode_set`` (None means all modes)."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"transmissivity must lie in [0, 1], got {eta}")
    modes = range(state.modes) if mode_set is None else list(mode_set)
    scale = np.ones(2 * state.modes)
    for m in modes:
        _check_mode(state, m)
        scale[2 * m:2 * m + 2] = np.sqrt(eta)
    added = (1.0 - scale**2) / 2.0
    cov = scale[:, None] * state.cov * scale[None, :] + np.diag(added)
    return GaussianState(state.modes, scale * state.mean, cov)


@dataclass(frozen=True)
class QuadraticObservable:
    """The Hermitian operator R^T A R + c built from the quadrature vector R."""

    matrix: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        A = np.asarray(self.matrix, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] % 2:
            raise DimensionError(f"observable matrix must be 2M x 2M, got {A.shape}")
        if np.abs(A - A.T).max() > SYM_TOL * max(1.0, np.abs(A).max()):
            raise ValidationError("observable matrix must be symmetric")
        object.__setattr__(self, "matrix", 0.5 * (A + A.T))

    @property
    def modes(self) -> int:
        return self.matrix.shape[0] // 2


def total_photon_number(modes: int) -> QuadraticObservable:
    """sum_i (x_i^2 + p_i^2) = 2 sum_i n_i + M."""
    return QuadraticObservable(np.eye(2 * modes))


def intensity_on(modes: int, measured: Iterable[int]) -> QuadraticObservable:
    """sum over ``measured`` of (x_i^2 + p_i^2); other modes are ignored."""
    d = np.zeros(2 * modes)
    for m in measured:
        d[2 * m:2 * m + 2] = 1.0
    return QuadraticObservable(np.diag(d))


def ordering_correction(obs: QuadraticObservable) -> float:
    """(1/2) tr((A Omega)^2), the commutator part of the variance."""
    AO = obs.matrix @ symplectic_form(obs.modes)
    return 0.5 * float(np.trace(AO @ AO))


def photon_moments(state: GaussianState, obs: QuadraticObservable) -> tuple[float, float]:
    """Exact mean and variance of R^T A R + c in a Gaussian state."""
    if obs.modes != state.modes:
        raise DimensionError(f"observable acts on {obs.modes} modes, state has {state.modes}")
    A, mu, S = obs.matrix, state.mean, state.cov
    AS = A @ S
    mean = float(np.trace(AS) + mu @ A @ mu + obs.offset)
    var = float(2.0 * np.trace(AS @ AS) + 4.0 * mu @ AS @ A @ mu + ordering_correction(obs))
    return mean, var
