"""Beam-splitter arrays as real orthogonal matrices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class WeightedNetwork:
    """Orthogonal ``matrix`` whose first row is the unit vector ``weights``.

    Applying ``matrix.T`` spreads mode 1 along ``weights``; applying
    ``matrix`` afterwards gathers the weighted sum of per-mode x shifts,
    sum_i w_i x_i, back onto mode 1.
    """

    weights: np.ndarray
    matrix: np.ndarray

    @property
    def modes(self) -> int:
        return len(self.weights)


def householder_completion(w: np.ndarray) -> np.ndarray:
    """Symmetric reflector H with H e1 = w, hence first row equal to w."""
    m = len(w)
    e1 = np.zeros(m)
    e1[0] = 1.0
    v = e1 - w
    vv = v @ v
    if vv == 0.0:
        return np.eye(m)
    return np.eye(m) - 2.0 * np.outer(v, v) / vv


def weighted_network(w) -> WeightedNetwork:
    w = np.asarray(w, dtype=float).reshape(-1)
    if w.size == 0:
        raise ValueError("weight vector is empty")
    norm = np.linalg.norm(w)
    if norm == 0.0:
        raise ValueError("weight vector must be nonzero")
    w = w / norm
    O = householder_completion(w)
    # the reflector already has w as its first row up to rounding; pin it exactly
    O[0] = w
    return WeightedNetwork(w, O)


def balanced_bsa_matrix(modes: int) -> np.ndarray:
    """Orthogonal matrix with uniform first column 1/sqrt(M).

    Routing a mode-1 probe through it spreads it evenly over all modes;
    its transpose maps sum_i p_i onto sqrt(M) p_1.
    """
    if modes < 1:
        raise ValueError(f"mode count must be positive, got {modes}")
    return weighted_network(np.ones(modes)).matrix.T.copy()
