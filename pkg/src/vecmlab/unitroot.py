"""Augmented Dickey-Fuller test with MacKinnon (1994) response-surface p-values."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from ._ols import check_full_rank, lagmat, ols
from .errors import DataError, NumericalError

MIN_EXTRA_OBS = 10

# Single-series (N=1) coefficients from MacKinnon (1994), as distributed with
# statsmodels. Small-p polynomials apply for tau <= tau_star, large-p above it.
_TAU_MIN = {"c": -18.83, "ct": -16.18}
_TAU_MAX = {"c": 2.74, "ct": 0.7}
_TAU_STAR = {"c": -1.61, "ct": -2.89}
_TAU_SMALLP = {
    "c": (2.1659, 1.4412, 3.8269e-2),
    "ct": (3.2512, 1.6047, 4.9588e-2),
}
_TAU_LARGEP = {
    "c": (1.7339, 9.3202e-1, -1.2745e-1, -1.0368e-2),
    "ct": (2.5261, 6.1654e-1, -3.7956e-1, -6.0285e-2),
}

DETERMINISTIC = {"c": "constant", "ct": "constant and trend"}


def mackinnon_pvalue(stat: float, deterministic: str = "c") -> float:
    """Approximate p-value of a Dickey-Fuller tau statistic.

    Parameters
    ----------
    stat : float
        t-ratio on the lagged level.
    deterministic : {"c", "ct"}
        Constant, or constant and linear trend, in the test regression.
    """
    if deterministic not in _TAU_STAR:
        raise ValueError(f"deterministic must be 'c' or 'ct', got {deterministic!r}")
    if stat > _TAU_MAX[deterministic]:
        return 1.0
    if stat < _TAU_MIN[deterministic]:
        return 0.0
    coef = _TAU_SMALLP if stat <= _TAU_STAR[deterministic] else _TAU_LARGEP
    z = sum(c * stat**i for i, c in enumerate(coef[deterministic]))
    return float(stats.norm.cdf(z))


@dataclass(frozen=True)
class AdfResult:
    statistic: float
    p_value: float
    lags_used: int
    deterministic: str
    n_obs: int

    def as_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "p_value": self.p_value,
            "lags_used": self.lags_used,
            "deterministic": self.deterministic,
            "n_obs": self.n_obs,
        }


def _adf_design(x: np.ndarray, lags: int, deterministic: str, start: int | None = None):
    """Dependent variable and regressors of the ADF regression.

    Column 0 of the regressor matrix is the lagged level. ``start`` trims the
    sample so several lag lengths can share estimation rows.
    """
    dx = np.diff(x)
    start = lags if start is None else start
    y = dx[start:]
    n = y.size
    cols = [x[start : start + n, None]]
    if lags:
        cols.append(lagmat(dx, lags)[start - lags :])
    cols.append(np.ones((n, 1)))
    if deterministic == "ct":
        cols.append(np.arange(start + 1, start + n + 1, dtype=float)[:, None])
    return y, np.hstack(cols)


def _max_auto_lag(T: int) -> int:
    return int(math.floor(12 * (T / 100) ** 0.25))


def adf_test(series, deterministic: str = "c", lags="auto") -> AdfResult:
    """Augmented Dickey-Fuller test of a unit root.

    With ``lags="auto"`` the lag length minimises the Schwarz criterion over
    ``0..floor(12 (T/100)^(1/4))`` on a common sample, then the chosen
    regression is re-estimated on all available observations.
    """
    x = np.asarray(series, dtype=float)
    if x.ndim != 1:
        raise ValueError("adf_test expects a single series")
    if deterministic not in DETERMINISTIC:
        raise ValueError(f"deterministic must be 'c' or 'ct', got {deterministic!r}")
    T = x.size
    if not np.all(np.isfinite(x)):
        raise DataError("series contains non-finite values")
    if lags == "auto":
        maxlag = min(_max_auto_lag(T), T - MIN_EXTRA_OBS)
        if maxlag < 0:
            raise DataError(f"series too short for the ADF test (T={T})")
        best = None
        for k in range(maxlag + 1):
            y, X = _adf_design(x, k, deterministic, start=maxlag)
            check_full_rank(X)
            _, e = ols(y[:, None], X)
            n = y.size
            llf = -0.5 * n * (np.log(2 * np.pi) + np.log(e[:, 0] @ e[:, 0] / n) + 1)
            bic = -2 * llf + np.log(n) * X.shape[1]
            if best is None or bic < best[0] - 1e-12:
                best = (bic, k)
        lags = best[1]
    lags = int(lags)
    if lags < 0:
        raise ValueError("lags must be nonnegative")
    if T < lags + MIN_EXTRA_OBS:
        raise DataError(f"series too short for ADF with {lags} lags (T={T}, need {lags + MIN_EXTRA_OBS})")
    y, X = _adf_design(x, lags, deterministic)
    if np.ptp(x) == 0:
        raise NumericalError("constant series: ADF regressors are collinear")
    check_full_rank(X)
    B, e = ols(y[:, None], X)
    n, k = X.shape
    if n <= k:
        raise DataError("not enough observations for the ADF regression")
    s2 = float(e[:, 0] @ e[:, 0]) / (n - k)
    XtX_inv = np.linalg.inv(X.T @ X)
    se = math.sqrt(s2 * XtX_inv[0, 0])
    stat = float(B[0, 0] / se)
    return AdfResult(
        statistic=stat,
        p_value=mackinnon_pvalue(stat, deterministic),
        lags_used=lags,
        deterministic=deterministic,
        n_obs=n,
    )


def integration_order(series, deterministic: str = "c", alpha: float = 0.05, lags="auto") -> str:
    """Classify a series as ``"I(0)"``, ``"I(1)"`` or ``"I(2+)"``.

    Levels are tested first; if the unit root is not rejected the first
    difference is tested with the same deterministic case.
    """
    x = np.asarray(series, dtype=float)
    if adf_test(x, deterministic, lags).p_value < alpha:
        return "I(0)"
    if adf_test(np.diff(x), deterministic, lags).p_value < alpha:
        return "I(1)"
    return "I(2+)"


@dataclass(frozen=True)
class UnitRootRow:
    name: str
    level: AdfResult
    difference: AdfResult
    order: str

    def as_dict(self) -> dict:
        return {
            "variable": self.name,
            "level_p": self.level.p_value,
            "difference_p": self.difference.p_value,
            "deterministic": DETERMINISTIC[self.level.deterministic],
            "order": self.order,
            "level": self.level.as_dict(),
            "difference": self.difference.as_dict(),
        }


def unit_root_table(table, deterministic: dict | str = "c", alpha: float = 0.05, lags="auto") -> list[UnitRootRow]:
    """Level and first-difference ADF p-values for every column of a table."""
    rows = []
    for j, name in enumerate(table.names):
        det = deterministic if isinstance(deterministic, str) else deterministic.get(name, "c")
        x = table.values[:, j]
        lev = adf_test(x, det, lags)
        dif = adf_test(np.diff(x), det, lags)
        if lev.p_value < alpha:
            order = "I(0)"
        elif dif.p_value < alpha:
            order = "I(1)"
        else:
            order = "I(2+)"
        rows.append(UnitRootRow(name, lev, dif, order))
    return rows
