"""Least-squares helpers shared by the estimators."""

from __future__ import annotations

import numpy as np
from scipy import linalg

from .errors import NumericalError


def check_full_rank(X: np.ndarray, labels=None, tol: float | None = None) -> None:
    """Raise :class:`NumericalError` naming collinear columns of ``X``."""
    if X.shape[1] == 0:
        return
    _, R, piv = linalg.qr(X, mode="economic", pivoting=True)
    d = np.abs(np.diag(R))
    if tol is None:
        tol = max(X.shape) * np.finfo(float).eps * (d[0] if d.size else 0.0)
    rank = int(np.sum(d > tol))
    if rank < X.shape[1]:
        bad = sorted(int(j) for j in piv[rank:])
        names = [labels[j] for j in bad] if labels is not None else bad
        raise NumericalError(f"regressor matrix is rank deficient; collinear columns: {names}")


def ols(Y: np.ndarray, X: np.ndarray):
    """Multivariate least squares ``Y = X B + E``; returns ``(B, E)``."""
    if X.shape[1] == 0:
        return np.zeros((0, Y.shape[1])), Y.copy()
    B, *_ = linalg.lstsq(X, Y, lapack_driver="gelsy")
    return B, Y - X @ B


def residualize(Y: np.ndarray, X: np.ndarray) -> np.ndarray:
    return ols(Y, X)[1]


def gaussian_loglik(resid: np.ndarray) -> float:
    """Concentrated Gaussian log-likelihood with the ML covariance ``E'E / n``."""
    n, k = resid.shape
    sigma = resid.T @ resid / n
    sign, logdet = np.linalg.slogdet(sigma)
    if sign <= 0:
        return -np.inf
    return -0.5 * n * (k * np.log(2 * np.pi) + k + logdet)


def lagmat(x: np.ndarray, lags: int) -> np.ndarray:
    """Rows ``t = lags..T-1`` holding ``[x_{t-1}, ..., x_{t-lags}]`` column blocks."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    T = x.shape[0]
    if lags == 0:
        return np.empty((T, 0))[: T - lags]
    return np.hstack([x[lags - j : T - j] for j in range(1, lags + 1)])
