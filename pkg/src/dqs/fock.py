"""Truncated number-basis oracle for one and two modes.

States are kets while every operation is unitary and become density matrices
once a loss channel acts. Nothing here assumes Gaussianity.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np
from scipy.linalg import expm
from scipy.sparse import csr_matrix, identity, kron
from scipy.sparse.linalg import expm_multiply

PAD = 10
LEAK_FRACTION = 0.9
LEAK_TOL = 1e-8


class CutoffError(RuntimeError):
    """Population above 0.9 N_c exceeds the leakage tolerance."""


@dataclass(frozen=True)
class FockState:
    modes: int
    cutoff: int
    data: np.ndarray  # ket of length cutoff**modes, or density matrix

    @property
    def is_pure(self) -> bool:
        return self.data.ndim == 1

    @property
    def dim(self) -> int:
        return self.cutoff**self.modes

    def density(self) -> np.ndarray:
        if self.is_pure:
            return np.outer(self.data, self.data.conj())
        return self.data

    def populations(self) -> np.ndarray:
        """Joint photon-number distribution, shape (cutoff,) * modes."""
        p = np.abs(self.data) ** 2 if self.is_pure else np.real(np.diag(self.data))
        return p.reshape((self.cutoff,) * self.modes)

    def leakage(self) -> float:
        """Largest single-mode population at n >= 0.9 cutoff."""
        p = self.populations()
        start = int(np.ceil(LEAK_FRACTION * self.cutoff))
        worst = 0.0
        for m in range(self.modes):
            marg = p.sum(axis=tuple(k for k in range(self.modes) if k != m))
            worst = max(worst, float(marg[start:].sum()))
        return worst


def fock_vacuum(modes: int, cutoff: int) -> FockState:
    if modes not in (1, 2):
        raise ValueError("the oracle supports one or two modes")
    ket = np.zeros(cutoff**modes, dtype=complex)
    ket[0] = 1.0
    return FockState(modes, cutoff, ket)


def annihilation(n: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), 1).astype(complex)


def _checked(state: FockState, tol: float = LEAK_TOL) -> FockState:
    leak = state.leakage()
    if leak > tol:
        raise CutoffError(f"population {leak:.2e} above 0.9 N_c={state.cutoff}; raise the cutoff")
    return state


def _single_mode_unitary(generator_of_a, cutoff: int) -> np.ndarray:
    """exp of the generator built at cutoff + PAD, projected to cutoff."""
    a = annihilation(cutoff + PAD)
    return expm(generator_of_a(a))[:cutoff, :cutoff]


def _apply_local(state: FockState, mode: int, U: np.ndarray) -> FockState:
    if not 0 <= mode < state.modes:
        raise IndexError(f"mode {mode} out of range")
    N, M = state.cutoff, state.modes
    if state.is_pure:
        t = state.data.reshape((N,) * M)
        t = np.moveaxis(np.tensordot(U, t, axes=([1], [mode])), 0, mode)
        return FockState(M, N, t.reshape(-1))
    t = state.data.reshape((N,) * (2 * M))
    t = np.moveaxis(np.tensordot(U, t, axes=([1], [mode])), 0, mode)
    t = np.moveaxis(np.tensordot(U.conj(), t, axes=([1], [M + mode])), 0, M + mode)
    return FockState(M, N, t.reshape(state.dim, state.dim))


def fock_squeeze(state: FockState, mode: int, r: float, phase: float = 0.0, check: bool = True) -> FockState:
    """exp(r (a^2 e^{-i phase} - a^dag^2 e^{i phase}) / 2); r > 0 squeezes x."""
    if r == 0.0:
        return state
    U = _single_mode_unitary(
        lambda a: 0.5 * r * (np.exp(-1j * phase) * a @ a - np.exp(1j * phase) * a.conj().T @ a.conj().T),
        state.cutoff,
    )
    out = _apply_local(state, mode, U)
    return _checked(out) if check else out


def fock_displace(state: FockState, mode: int, dx: float, dp: float = 0.0, check: bool = True) -> FockState:
    """Shift <x> by dx and <p> by dp; dx alone is exp(-i p dx)."""
    if dx == 0.0 and dp == 0.0:
        return state
    alpha = (dx + 1j * dp) / np.sqrt(2.0)
    U = _single_mode_unitary(lambda a: alpha * a.conj().T - np.conj(alpha) * a, state.cutoff)
    out = _apply_local(state, mode, U)
    return _checked(out) if check else out


def _phase_flip(state: FockState, mode: int) -> FockState:
    return _apply_local(state, mode, np.diag((-1.0) ** np.arange(state.cutoff)).astype(complex))


def fock_network(state: FockState, O) -> FockState:
    """Passive real orthogonal network: <a> -> O <a> (two modes at most)."""
    O = np.asarray(O, dtype=float)
    if O.shape != (state.modes, state.modes):
        raise ValueError(f"network is {O.shape}, state has {state.modes} modes")
    if state.modes == 1:
        return _phase_flip(state, 0) if O[0, 0] < 0 else state
    if np.linalg.det(O) < 0:
        # O = O' diag(1, -1): flip mode 2 first, then rotate
        state = _phase_flip(state, 1)
        O = O @ np.diag([1.0, -1.0])
    theta = np.arctan2(O[0, 1], O[0, 0])
    N = state.cutoff
    a = csr_matrix(annihilation(N))
    one = identity(N, format="csr")
    a1, a2 = kron(a, one, format="csr"), kron(one, a, format="csr")
    # exp(G) with G = theta (a1^dag a2 - a2^dag a1) maps a1 -> c a1 + s a2, a2 -> c a2 - s a1
    G = (theta * (a1.conj().T @ a2 - a2.conj().T @ a1)).tocsc()
    if state.is_pure:
        return _checked(FockState(2, N, expm_multiply(G, state.data)))
    X = expm_multiply(G, state.data)
    rho = expm_multiply(G, X.conj().T).conj().T
    return _checked(FockState(2, N, rho))


def damping_kraus(cutoff: int, eta: float) -> list[np.ndarray]:
    """Kraus operators of the pure-loss channel a -> sqrt(eta) a + sqrt(1 - eta) e."""
    n = np.arange(cutoff)
    ops = []
    for k in range(cutoff):
        K = np.zeros((cutoff, cutoff), dtype=complex)
        m = n[k:]
        K[m - k, m] = np.sqrt([comb(int(j), k) for j in m]) * eta ** ((m - k) / 2) * (1 - eta) ** (k / 2)
        ops.append(K)
    return ops


def fock_loss(state: FockState, mode: int, eta: float) -> FockState:
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"transmissivity must lie in [0, 1], got {eta}")
    if eta == 1.0:
        return state
    rho = state.density()
    mixed = FockState(state.modes, state.cutoff, rho)
    out = np.zeros_like(rho)
    for K in damping_kraus(state.cutoff, eta):
        out += _apply_local(mixed, mode, K).data
    return FockState(state.modes, state.cutoff, out)


def fock_expectation(state: FockState, power: int = 1) -> float:
    """<O^power> for O = sum_i (2 n_i + 1), read off the number distribution."""
    p = state.populations()
    n = np.arange(state.cutoff)
    O = np.zeros(p.shape)
    for m in range(state.modes):
        shape = [1] * state.modes
        shape[m] = state.cutoff
        O = O + (2 * n + 1).reshape(shape)
    return float((p * O**power).sum())


def fock_intensity_moments(state: FockState) -> tuple[float, float]:
    m1 = fock_expectation(state, 1)
    return m1, fock_expectation(state, 2) - m1 * m1


def quadrature_moments(state: FockState, mode: int = 0):
    """(<x>, <p>, <x^2>, <p^2>) of one mode."""
    N = state.cutoff
    a = annihilation(N)
    xo = (a + a.conj().T) / np.sqrt(2.0)
    po = (a - a.conj().T) / (1j * np.sqrt(2.0))
    out = []
    for op in (xo, po, xo @ xo, po @ po):
        full = op
        if state.modes == 2:
            full = np.kron(op, np.eye(N)) if mode == 0 else np.kron(np.eye(N), op)
        if state.is_pure:
            val = state.data.conj() @ full @ state.data
        else:
            val = np.trace(full @ state.data)
        out.append(float(np.real(val)))
    return tuple(out)


def trace(state: FockState) -> float:
    return float(np.real(np.vdot(state.data, state.data))) if state.is_pure else float(np.real(np.trace(state.data)))


def oracle_pipeline(scheme: str, r, rm, x, xm, eta1=1.0, eta2=1.0, cutoff=60, network=None) -> FockState:
    """Detector state for the single-mode pipeline or a two-mode scheme.

    ``network`` is the 2x2 encoding splitter (balanced by default); scheme 1
    applies its transpose before the single OPA on mode 1.
    """
    from .network import balanced_bsa_matrix

    if scheme == "single":
        st = fock_squeeze(fock_vacuum(1, cutoff), 0, r)
        st = fock_displace(st, 0, x)
        st = fock_loss(st, 0, eta1)
        st = fock_squeeze(st, 0, -rm)
        st = fock_displace(st, 0, xm)
        return fock_loss(st, 0, eta2)
    B = balanced_bsa_matrix(2) if network is None else np.asarray(network)
    st = fock_squeeze(fock_vacuum(2, cutoff), 0, r)
    st = fock_network(st, B)
    for m in (0, 1):
        st = fock_displace(st, m, x)
    for m in (0, 1):
        st = fock_loss(st, m, eta1)
    measured = (0, 1)
    if scheme == "scheme1":
        st = fock_network(st, B.T)
        measured = (0,)
    elif scheme != "scheme2":
        raise ValueError(f"unknown scheme {scheme!r}")
    for m in measured:
        st = fock_squeeze(st, m, -rm)
        st = fock_displace(st, m, xm)
        st = fock_loss(st, m, eta2)
    if scheme == "scheme1":
        # only mode 1 is detected; trace out mode 2 into a one-mode state
        if st.is_pure:
            T = st.data.reshape(cutoff, cutoff)
            reduced = T @ T.conj().T
        else:
            reduced = np.einsum("ikjk->ij", st.data.reshape((cutoff,) * 4))
        st = FockState(1, cutoff, reduced)
    return st
