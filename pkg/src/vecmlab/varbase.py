"""Unrestricted VAR in levels and lag-order selection by information criteria."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._ols import check_full_rank, gaussian_loglik, lagmat, ols
from .dataset import TimeSeriesTable
from .errors import DataError

VAR_DETERMINISTIC = ("c", "ct")


@dataclass(frozen=True)
class VarFit:
    """Least-squares VAR(p).

    ``coefs[i]`` is the K x K matrix multiplying ``y_{t-i-1}``. The residual
    covariance uses the ML denominator ``T - p``.
    """

    names: tuple[str, ...]
    p: int
    deterministic: str
    coefs: np.ndarray
    intercept: np.ndarray
    trend: np.ndarray | None
    resid: np.ndarray
    sigma: np.ndarray
    llf: float
    regressors: np.ndarray
    coef_matrix: np.ndarray

    @property
    def nobs(self) -> int:
        return self.resid.shape[0]

    @property
    def K(self) -> int:
        return self.resid.shape[1]

    @property
    def n_params(self) -> int:
        return self.coef_matrix.size

    def stderr(self) -> np.ndarray:
        """Standard errors laid out like ``coef_matrix`` (regressor x equation)."""
        XtX_inv = np.linalg.inv(self.regressors.T @ self.regressors)
        return np.sqrt(np.outer(np.diag(XtX_inv), np.diag(self.sigma)))


def _var_design(y: np.ndarray, p: int, deterministic: str, start: int):
    T = y.shape[0]
    Y = y[start:]
    n = T - start
    lags = lagmat(y, p)[start - p :]
    cols = [np.ones((n, 1))]
    if deterministic == "ct":
        cols.append(np.arange(start + 1, T + 1, dtype=float)[:, None])
    X = np.hstack(cols + [lags])
    return Y, X


def fit_var(table: TimeSeriesTable | np.ndarray, p: int, deterministic: str = "c", start: int | None = None) -> VarFit:
    """Equation-by-equation least squares for a VAR(p) in levels.

    ``start`` (default ``p``) is the first row used as a dependent
    observation; raising it lets several lag orders share one sample.
    """
    if isinstance(table, TimeSeriesTable):
        y, names = table.values, table.names
    else:
        y = np.asarray(table, dtype=float)
        if y.ndim == 1:
            y = y[:, None]
        names = tuple(f"y{i + 1}" for i in range(y.shape[1]))
    if deterministic not in VAR_DETERMINISTIC:
        raise ValueError(f"deterministic must be one of {VAR_DETERMINISTIC}")
    if p < 1:
        raise ValueError("lag order must be positive")
    start = p if start is None else start
    T, K = y.shape
    if T - start <= K * p + 2:
        raise DataError(f"too few observations ({T - start}) for a VAR({p}) in {K} variables")
    Y, X = _var_design(y, p, deterministic, start)
    labels = ["const"] + (["trend"] if deterministic == "ct" else [])
    labels += [f"L{i}.{n}" for i in range(1, p + 1) for n in names]
    check_full_rank(X, labels)
    B, E = ols(Y, X)
    nd = 2 if deterministic == "ct" else 1
    coefs = np.stack([B[nd + i * K : nd + (i + 1) * K].T for i in range(p)])
    sigma = E.T @ E / E.shape[0]
    sigma = (sigma + sigma.T) / 2
    return VarFit(
        names=tuple(names),
        p=p,
        deterministic=deterministic,
        coefs=coefs,
        intercept=B[0].copy(),
        trend=B[1].copy() if deterministic == "ct" else None,
        resid=E,
        sigma=sigma,
        llf=float(gaussian_loglik(E)),
        regressors=X,
        coef_matrix=B,
    )


@dataclass(frozen=True)
class LagCriteria:
    p: int
    llf: float
    n_params: int
    nobs: int
    aic: float
    bic: float
    hqic: float

    def as_dict(self) -> dict:
        return {"p": self.p, "llf": self.llf, "n_params": self.n_params, "nobs": self.nobs,
                "aic": self.aic, "bic": self.bic, "hqic": self.hqic}


@dataclass(frozen=True)
class LagOrderTable:
    rows: tuple[LagCriteria, ...]

    def selected(self, criterion: str = "bic") -> int:
        # min() returns the first minimiser, i.e. the smaller p on ties
        return min(self.rows, key=lambda r: getattr(r, criterion)).p

    def as_dict(self) -> dict:
        return {
            "rows": [r.as_dict() for r in self.rows],
            "selected": {c: self.selected(c) for c in ("aic", "bic", "hqic")},
        }


def lag_order_table(table, p_max: int, deterministic: str = "c") -> LagOrderTable:
    """AIC, Schwarz (BIC) and Hannan-Quinn for p = 1..p_max on a common sample.

    Each criterion is ``(-2 llf + penalty * n_params) / nobs`` where ``n_params``
    counts every estimated coefficient (lags and deterministic terms).
    """
    if p_max < 1:
        raise ValueError("p_max must be at least 1")
    rows = []
    for p in range(1, p_max + 1):
        fit = fit_var(table, p, deterministic, start=p_max)
        n, k = fit.nobs, fit.n_params
        base = -2 * fit.llf / n
        rows.append(LagCriteria(
            p=p, llf=fit.llf, n_params=k, nobs=n,
            aic=base + 2 * k / n,
            bic=base + np.log(n) * k / n,
            hqic=base + 2 * np.log(np.log(n)) * k / n,
        ))
    return LagOrderTable(tuple(rows))
