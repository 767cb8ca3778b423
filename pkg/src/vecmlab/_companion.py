"""Levels-VAR form of a VECM and its companion matrix."""

import numpy as np


def levels_var(pi: np.ndarray, gammas: np.ndarray) -> np.ndarray:
    """``A_1..A_l`` of the levels VAR implied by ``dy_t = Pi y_{t-1} + sum Gamma_i dy_{t-i}``.

    ``A_1 = I + Pi + Gamma_1``, ``A_i = Gamma_i - Gamma_{i-1}``, ``A_l = -Gamma_{l-1}``.
    """
    K = pi.shape[0]
    gammas = np.asarray(gammas, dtype=float).reshape(-1, K, K)
    l = gammas.shape[0] + 1
    A = np.zeros((l, K, K))
    A[0] = np.eye(K) + pi
    for i in range(l - 1):
        A[i] += gammas[i]
        A[i + 1] -= gammas[i]
    return A


def vecm_from_levels(A: np.ndarray):
    """Inverse of :func:`levels_var`: returns ``(Pi, Gammas)``."""
    l, K, _ = A.shape
    pi = A.sum(axis=0) - np.eye(K)
    gammas = np.stack([-A[i + 1 :].sum(axis=0) for i in range(l - 1)]) if l > 1 else np.zeros((0, K, K))
    return pi, gammas


def companion(A: np.ndarray) -> np.ndarray:
    l, K, _ = A.shape
    C = np.zeros((K * l, K * l))
    C[:K] = np.hstack(list(A))
    if l > 1:
        C[K:, :-K] = np.eye(K * (l - 1))
    return C


def companion_moduli(A: np.ndarray) -> np.ndarray:
    """Eigenvalue moduli of the companion matrix, largest first."""
    return np.sort(np.abs(np.linalg.eigvals(companion(A))))[::-1]


def count_unit(moduli: np.ndarray, tol: float = 1e-6) -> int:
    return int(np.sum(np.abs(moduli - 1.0) <= tol))
