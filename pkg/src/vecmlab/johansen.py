"""Johansen reduced-rank regression: trace test and VECM estimation.

The model is

    dy_t = alpha (beta' y_{t-1} + rho t) + sum_i Gamma_i dy_{t-i} + mu + u_t

with the linear trend confined to the cointegration space (``"rtrend"``), or
without the ``rho t`` term (``"constant"``). ``t`` is the 1-based row index of
the current observation in the input table. With ``"rtrend"`` the stored
``beta`` has one extra last row holding ``rho``.

Sign convention: after normalisation a relation reads
``y_norm + sum_j b_j y_j (+ rho t)`` and is stationary, so the long-run level
of the normalised variable moves as ``-b_j`` per unit of ``y_j``. A negative
coefficient therefore means positive co-movement with the normalised variable.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np
from scipy import linalg, stats

from ._critical_values import trace_critical_values
from ._ols import check_full_rank, gaussian_loglik, lagmat, ols, residualize
from .dataset import TimeSeriesTable
from .errors import DataError, NumericalError

DETERMINISTIC = ("rtrend", "constant")


@dataclass(frozen=True)
class VecmSpec:
    """``lags`` counts lags of the levels VAR, so ``lags - 1`` differenced lags enter."""

    lags: int = 2
    rank: int = 1
    deterministic: str = "rtrend"

    def __post_init__(self):
        if self.lags < 1:
            raise ValueError("lags must be at least 1")
        if self.rank < 0:
            raise ValueError("rank must be nonnegative")
        if self.deterministic not in DETERMINISTIC:
            raise ValueError(f"deterministic must be one of {DETERMINISTIC}")


def _as_array(table):
    if isinstance(table, TimeSeriesTable):
        return table.values, table.names
    y = np.asarray(table, dtype=float)
    if y.ndim == 1:
        y = y[:, None]
    return y, tuple(f"y{i + 1}" for i in range(y.shape[1]))


class Concentrated:
    """Data matrices of the VECM regression and their concentrated moments.

    ``Z0`` holds ``dy_t``, ``Z1`` the lagged levels (plus trend), ``Z2`` the
    lagged differences followed by the constant. ``R0``/``R1`` are ``Z0``/``Z1``
    with ``Z2`` partialled out.
    """

    def __init__(self, y: np.ndarray, lags: int, deterministic: str):
        T, K = y.shape
        n = T - lags
        if n <= K * lags + 2:
            raise DataError(f"too few observations ({n}) for a VECM with {lags} lags in {K} variables")
        dy = np.diff(y, axis=0)
        self.T_eff = n
        self.K = K
        self.lags = lags
        self.deterministic = deterministic
        self.Z0 = dy[lags - 1 :]
        z1 = y[lags - 1 : T - 1]
        if deterministic == "rtrend":
            trend = np.arange(lags + 1, T + 1, dtype=float)[:, None]
            z1 = np.hstack([z1, trend])
        self.Z1 = z1
        self.Z2 = np.hstack([lagmat(dy, lags - 1), np.ones((n, 1))])
        self.R0 = residualize(self.Z0, self.Z2)
        self.R1 = residualize(self.Z1, self.Z2)
        self.S00 = self.R0.T @ self.R0 / n
        self.S11 = self.R1.T @ self.R1 / n
        self.S01 = self.R0.T @ self.R1 / n

    @cached_property
    def eig(self):
        """Generalised eigenpairs of ``S10 S00^-1 S01`` relative to ``S11``, descending.

        Eigenvectors are scaled so that ``V' S11 V = I``.
        """
        return reduced_rank_eig(self.S00, self.S01, self.S11)


def reduced_rank_eig(S00, S01, S11):
    """Solve ``|lam S11 - S10 S00^-1 S01| = 0`` by Cholesky whitening of ``S11``."""
    try:
        L = linalg.cholesky(S11, lower=True)
    except linalg.LinAlgError:
        raise NumericalError("singular moment matrix of lagged levels (collinear levels?)") from None
    try:
        A = linalg.solve(S00, S01, assume_a="pos")
    except linalg.LinAlgError:
        raise NumericalError("singular moment matrix of differences") from None
    M = S01.T @ A
    Linv_M = linalg.solve_triangular(L, M, lower=True)
    C = linalg.solve_triangular(L, Linv_M.T, lower=True)
    C = (C + C.T) / 2
    lam, U = linalg.eigh(C)
    if not np.all(np.isfinite(lam)):
        raise NumericalError("non-finite eigenvalue in reduced-rank regression")
    order = np.argsort(lam)[::-1]
    lam, U = lam[order], U[:, order]
    V = linalg.solve_triangular(L, U, lower=True, trans="T")
    return np.clip(lam, 0.0, 1.0 - 1e-15), V


def select_rank(statistics, critical_values) -> int:
    """First null rank whose trace statistic falls below its critical value.

    Returns ``K`` (the number of statistics) when every null is rejected.
    """
    for r0, (s, c) in enumerate(zip(statistics, critical_values)):
        if s < c:
            return r0
    return len(statistics)


@dataclass(frozen=True)
class TraceTestResult:
    eigenvalues: np.ndarray
    statistics: np.ndarray
    cv95: np.ndarray
    cv99: np.ndarray
    nobs: int
    deterministic: str
    names: tuple[str, ...] = ()

    @property
    def rank_5pct(self) -> int:
        return select_rank(self.statistics, self.cv95)

    @property
    def rank_1pct(self) -> int:
        return select_rank(self.statistics, self.cv99)

    def selected_rank(self, level: float = 0.05) -> int:
        if np.isclose(level, 0.05):
            return self.rank_5pct
        if np.isclose(level, 0.01):
            return self.rank_1pct
        raise ValueError("critical values are tabulated at the 5% and 1% levels only")

    def as_dict(self) -> dict:
        return {
            "deterministic": self.deterministic,
            "nobs": self.nobs,
            "rows": [
                {"rank": r0, "eigenvalue": float(self.eigenvalues[r0]),
                 "statistic": float(self.statistics[r0]),
                 "cv_5pct": float(self.cv95[r0]), "cv_1pct": float(self.cv99[r0])}
                for r0 in range(len(self.statistics))
            ],
            "selected_rank": {"5%": self.rank_5pct, "1%": self.rank_1pct},
        }


def trace_statistics(eigenvalues, nobs: int) -> np.ndarray:
    """``-nobs * sum_{i > r0} log(1 - lambda_i)`` for r0 = 0..K-1."""
    logs = np.log1p(-np.asarray(eigenvalues, dtype=float))
    tail = np.cumsum(logs[::-1])[::-1]
    return -nobs * tail


def trace_test(table, lags: int = 2, deterministic: str = "rtrend") -> TraceTestResult:
    """Johansen trace test for the cointegration rank."""
    if deterministic not in DETERMINISTIC:
        raise ValueError(f"deterministic must be one of {DETERMINISTIC}")
    y, names = _as_array(table)
    conc = Concentrated(y, lags, deterministic)
    K = y.shape[1]
    lam = conc.eig[0][:K]
    stat = trace_statistics(lam, conc.T_eff)
    cv = np.array([trace_critical_values(K - r0, deterministic) for r0 in range(K)])
    return TraceTestResult(
        eigenvalues=lam, statistics=stat, cv95=cv[:, 0], cv99=cv[:, 1],
        nobs=conc.T_eff, deterministic=deterministic, names=tuple(names),
    )


@dataclass(frozen=True)
class VecmFit:
    """Estimated rank-restricted VECM.

    ``beta`` has ``K`` rows, plus a final trend row under ``"rtrend"``.
    ``gammas[i]`` multiplies ``dy_{t-i-1}``. ``coef_matrix`` stacks the
    regression coefficients in the order of ``regressors`` columns:
    ``[beta' Z1 (r), dy lags (K (l-1)), const]``.
    """

    names: tuple[str, ...]
    spec: VecmSpec
    alpha: np.ndarray
    beta: np.ndarray
    gammas: np.ndarray
    const: np.ndarray
    resid: np.ndarray
    sigma: np.ndarray
    llf: float
    eigenvalues: np.ndarray
    data: np.ndarray
    regressors: np.ndarray
    coef_matrix: np.ndarray
    normalization: tuple[str, ...] | None = None
    beta_se: np.ndarray | None = None
    beta_restrictions: Mapping | None = field(default=None, compare=False)

    @property
    def K(self) -> int:
        return len(self.names)

    @property
    def rank(self) -> int:
        return self.spec.rank

    @property
    def lags(self) -> int:
        return self.spec.lags

    @property
    def nobs(self) -> int:
        return self.resid.shape[0]

    @property
    def beta_y(self) -> np.ndarray:
        return self.beta[: self.K]

    @property
    def trend_coef(self) -> np.ndarray | None:
        return self.beta[self.K] if self.spec.deterministic == "rtrend" else None

    @property
    def pi(self) -> np.ndarray:
        """Levels loading ``alpha beta_y'`` (K x K)."""
        return self.alpha @ self.beta_y.T

    @property
    def beta_rows(self) -> tuple[str, ...]:
        return self.names + (("trend",) if self.spec.deterministic == "rtrend" else ())

    def concentrated(self) -> Concentrated:
        return Concentrated(self.data, self.spec.lags, self.spec.deterministic)

    def coef_cov(self) -> np.ndarray:
        """Covariance of ``vec(coef_matrix)`` treating ``beta`` as known (column-stacked by equation)."""
        XtX_inv = np.linalg.inv(self.regressors.T @ self.regressors)
        return np.kron(self.sigma, XtX_inv)

    def gamma_index(self, lag: int, cause: int) -> int:
        """Row of ``coef_matrix`` holding the coefficient on ``dy_{t-lag}`` of variable ``cause``."""
        return self.rank + (lag - 1) * self.K + cause

    def as_dict(self) -> dict:
        out = {
            "names": list(self.names),
            "lags": self.spec.lags,
            "rank": self.spec.rank,
            "deterministic": self.spec.deterministic,
            "nobs": self.nobs,
            "llf": self.llf,
            "eigenvalues": self.eigenvalues.tolist(),
            "alpha": self.alpha.tolist(),
            "beta": self.beta.tolist(),
            "beta_rows": list(self.beta_rows),
            "gammas": self.gammas.tolist(),
            "const": self.const.tolist(),
            "sigma": self.sigma.tolist(),
            "normalization": list(self.normalization) if self.normalization else None,
        }
        if self.beta_se is not None:
            out["beta_se"] = np.where(np.isnan(self.beta_se), None, self.beta_se).tolist()
        return out


def _fit_given_beta(conc: Concentrated, beta: np.ndarray):
    """Least-squares alpha, Gamma and constant for fixed ``beta``."""
    K, r, lags = conc.K, beta.shape[1], conc.lags
    X = np.hstack([conc.Z1 @ beta, conc.Z2])
    B, E = ols(conc.Z0, X)
    alpha = B[:r].T
    gammas = np.stack([B[r + i * K : r + (i + 1) * K].T for i in range(lags - 1)]) if lags > 1 else np.zeros((0, K, K))
    const = B[-1].copy()
    sigma = E.T @ E / E.shape[0]
    return alpha, gammas, const, E, (sigma + sigma.T) / 2, X, B


def _beta_cov(alpha, sigma, S11, nobs, H):
    """Covariance of free parameters ``phi`` where ``vec(beta) = h + H phi``."""
    a = alpha.T @ linalg.solve(sigma, alpha, assume_a="pos")
    info = H.T @ np.kron(a, S11 * nobs) @ H
    return linalg.inv(info)


def estimate_vecm(
    table, spec: VecmSpec, normalization: Sequence[str] | None = None, normalize: bool = True
) -> VecmFit:
    """Maximum-likelihood VECM of cointegration rank ``spec.rank``.

    ``beta`` is normalised on ``normalization`` (default: the first ``r``
    variables) as in :func:`normalize_beta`. ``normalize=False`` keeps the
    raw eigenvectors (scaled so ``beta' S11 beta = I``) and skips standard
    errors. With ``rank=0`` the model is a VAR in differences.
    """
    y, names = _as_array(table)
    T, K = y.shape
    r = spec.rank
    if r > K:
        raise ValueError(f"rank {r} exceeds the number of variables {K}")
    conc = Concentrated(y, spec.lags, spec.deterministic)
    labels = [f"L{i}.D.{n}" for i in range(1, spec.lags) for n in names] + ["const"]
    check_full_rank(conc.Z2, labels)
    lam, V = conc.eig
    if r and lam[r - 1] <= 1e-12:
        raise NumericalError(f"rank {r} exceeds the number of positive eigenvalues")
    beta = V[:, :r]
    alpha, gammas, const, E, sigma, X, B = _fit_given_beta(conc, beta)
    fit = VecmFit(
        names=tuple(names), spec=spec, alpha=alpha, beta=beta, gammas=gammas,
        const=const, resid=E, sigma=sigma, llf=float(gaussian_loglik(E)),
        eigenvalues=lam[:K], data=np.array(y), regressors=X, coef_matrix=B,
    )
    if r == 0 or not normalize:
        return fit
    if normalization is None:
        normalization = names[:r]
    return normalize_beta(fit, normalization, _conc=conc)


def vecm_from_params(
    alpha, beta, gammas, sigma, const=None, names=None, deterministic: str | None = None
) -> VecmFit:
    """A :class:`VecmFit` carrying given parameters and no data.

    Useful for the structural tools on a known process. ``beta`` with
    ``K + 1`` rows implies the restricted-trend case.
    """
    sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
    K = sigma.shape[0]
    alpha = np.asarray(alpha, dtype=float).reshape(K, -1)
    beta = np.asarray(beta, dtype=float).reshape(-1, alpha.shape[1])
    gammas = np.zeros((0, K, K)) if gammas is None else np.asarray(gammas, dtype=float).reshape(-1, K, K)
    if deterministic is None:
        deterministic = "rtrend" if beta.shape[0] == K + 1 else "constant"
    names = tuple(names) if names is not None else tuple(f"y{i + 1}" for i in range(K))
    spec = VecmSpec(lags=gammas.shape[0] + 1, rank=alpha.shape[1], deterministic=deterministic)
    return VecmFit(
        names=names, spec=spec, alpha=alpha, beta=beta, gammas=gammas,
        const=np.zeros(K) if const is None else np.asarray(const, dtype=float),
        resid=np.zeros((0, K)), sigma=sigma, llf=float("nan"), eigenvalues=np.full(K, np.nan),
        data=np.zeros((0, K)), regressors=np.zeros((0, 0)), coef_matrix=np.zeros((0, K)),
    )


def loglik_from_eigenvalues(fit: VecmFit) -> float:
    """Restricted log-likelihood implied by ``|S00|`` and the top-``r`` eigenvalues."""
    conc = fit.concentrated()
    K, n = fit.K, conc.T_eff
    _, logdet = np.linalg.slogdet(conc.S00)
    lam = conc.eig[0][: fit.rank]
    return float(-0.5 * n * (K * np.log(2 * np.pi) + K + logdet + np.sum(np.log1p(-lam))))


def normalize_beta(fit: VecmFit, normalization: Sequence[str], _conc: Concentrated | None = None) -> VecmFit:
    """Phillips/Johansen normalisation: the ``r x r`` block on ``normalization`` becomes the identity.

    ``beta <- beta B^-1`` and ``alpha <- alpha B'`` so ``alpha beta'`` is
    unchanged. Standard errors of the remaining (free) ``beta`` entries come
    from the asymptotic mixed-normal distribution; normalised entries get NaN.
    """
    r = fit.rank
    normalization = tuple(normalization)
    if len(normalization) != r:
        raise ValueError(f"need {r} normalisation variables, got {len(normalization)}")
    rows = list(fit.beta_rows)
    try:
        idx = [rows.index(n) for n in normalization]
    except ValueError as exc:
        raise KeyError(f"unknown normalisation variable: {exc}") from None
    if len(set(idx)) != r:
        raise ValueError("normalisation variables must be distinct")
    block = fit.beta[idx]
    if abs(np.linalg.det(block)) < 1e-12 * max(1.0, np.abs(block).max()) ** r:
        raise NumericalError(f"normalisation block on {list(normalization)} is singular")
    beta = linalg.solve(block.T, fit.beta.T).T
    beta[idx] = np.eye(r)
    alpha = fit.alpha @ block.T
    conc = _conc if _conc is not None else fit.concentrated()
    # regressors change with beta; refit keeps the stored pieces mutually consistent
    alpha2, gammas, const, E, sigma, X, B = _fit_given_beta(conc, beta)
    free = [i for i in range(len(rows)) if i not in idx]
    n1 = len(rows)
    H = np.zeros((n1 * r, len(free) * r))
    col = 0
    for j in range(r):
        for i in free:
            H[j * n1 + i, col] = 1.0
            col += 1
    cov = _beta_cov(alpha2, sigma, conc.S11, conc.T_eff, H)
    se = np.full_like(beta, np.nan)
    sd = np.sqrt(np.diag(cov))
    col = 0
    for j in range(r):
        for i in free:
            se[i, j] = sd[col]
            col += 1
    return replace(
        fit, alpha=alpha2, beta=beta, gammas=gammas, const=const, resid=E, sigma=sigma,
        regressors=X, coef_matrix=B, normalization=normalization, beta_se=se,
        beta_restrictions=None,
    )


@dataclass(frozen=True)
class RestrictedBetaResult:
    fit: VecmFit
    lr_statistic: float
    df: int
    p_value: float
    iterations: int
    converged: bool


def restrict_beta(
    fit: VecmFit,
    normalization: Sequence[str],
    zeros: Mapping[int, Sequence[str]],
    tol: float = 1e-10,
    max_iter: int = 1000,
) -> RestrictedBetaResult:
    """Estimate ``beta`` under per-relation zero restrictions by the switching algorithm.

    Relation ``i`` has coefficient 1 on ``normalization[i]`` and 0 on every
    name in ``zeros.get(i, ())``. The LR statistic against the unrestricted
    rank-``r`` model has as many degrees of freedom as there are restrictions
    beyond the ``r (r - 1)`` needed for exact identification.
    """
    r = fit.rank
    if len(normalization) != r:
        raise ValueError(f"need {r} normalisation variables")
    rows = list(fit.beta_rows)
    n1 = len(rows)
    conc = fit.concentrated()
    Hs = []
    for i in range(r):
        z = set(zeros.get(i, ()))
        unknown = z - set(rows)
        if unknown:
            raise KeyError(f"unknown variables in restrictions: {sorted(unknown)}")
        if normalization[i] in z:
            raise ValueError(f"relation {i} restricts its own normalisation variable to zero")
        keep = [k for k in range(n1) if rows[k] not in z]
        H = np.zeros((n1, len(keep)))
        H[keep, range(len(keep))] = 1.0
        Hs.append(H)

    beta = fit.beta.copy()
    for i in range(r):
        beta[:, i] = Hs[i] @ linalg.lstsq(Hs[i], beta[:, i])[0]
    prev = -np.inf
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        for i in range(r):
            others = np.delete(beta, i, axis=1)
            W = conc.R1 @ others
            R0i = residualize(conc.R0, W) if others.size else conc.R0
            R1i = residualize(conc.R1 @ Hs[i], W) if others.size else conc.R1 @ Hs[i]
            n = conc.T_eff
            lam, V = reduced_rank_eig(R0i.T @ R0i / n, R0i.T @ R1i / n, R1i.T @ R1i / n)
            beta[:, i] = Hs[i] @ V[:, 0]
        _, _, _, E, _, _, _ = _fit_given_beta(conc, beta)
        llf = gaussian_loglik(E)
        if abs(llf - prev) < tol:
            converged = True
            break
        prev = llf
    if not converged:
        warnings.warn(f"beta restriction switching did not converge in {max_iter} iterations")
    idx = [rows.index(v) for v in normalization]
    scale = beta[idx, range(r)]
    if np.any(np.abs(scale) < 1e-12):
        raise NumericalError("restricted beta has a zero coefficient on a normalisation variable")
    beta = beta / scale
    alpha, gammas, const, E, sigma, X, B = _fit_given_beta(conc, beta)
    # free parameters: every non-zero, non-normalised entry
    free = [(i, k) for i in range(r) for k in range(n1) if Hs[i][k].any() and k != idx[i]]
    H = np.zeros((n1 * r, len(free)))
    for c, (i, k) in enumerate(free):
        H[i * n1 + k, c] = 1.0
    cov = _beta_cov(alpha, sigma, conc.S11, conc.T_eff, H)
    se = np.full_like(beta, np.nan)
    for c, (i, k) in enumerate(free):
        se[k, i] = np.sqrt(cov[c, c])
    llf = float(gaussian_loglik(E))
    unrestricted = fit.llf
    n_restr = sum(int(n1 - H_.shape[1]) for H_ in Hs)
    df = n_restr - r * (r - 1)
    lr = max(2 * (unrestricted - llf), 0.0)
    p = float(stats.chi2.sf(lr, df)) if df > 0 else float("nan")
    new = replace(
        fit, alpha=alpha, beta=beta, gammas=gammas, const=const, resid=E, sigma=sigma,
        llf=llf, regressors=X, coef_matrix=B, normalization=tuple(normalization), beta_se=se,
        beta_restrictions={i: tuple(zeros.get(i, ())) for i in range(r)},
    )
    return RestrictedBetaResult(new, lr, df, p, it, converged)
