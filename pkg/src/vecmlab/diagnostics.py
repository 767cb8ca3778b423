"""Post-estimation checks for a fitted VECM."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg, stats

from ._companion import companion_moduli, count_unit, levels_var
from ._ols import ols, residualize
from .errors import DataError, NumericalError
from .johansen import VecmFit, reduced_rank_eig

UNIT_TOL = 1e-6
UNSTABLE_TOL = 1e-8


@dataclass(frozen=True)
class TestResult:
    """Chi-square test outcome; ``p_value`` is always derived from the statistic."""

    statistic: float
    df: int
    label: str = ""

    __test__ = False  # not a pytest class

    @property
    def p_value(self) -> float:
        return float(stats.chi2.sf(self.statistic, self.df))

    def as_dict(self) -> dict:
        return {"label": self.label, "statistic": self.statistic, "df": self.df, "p_value": self.p_value}


@dataclass(frozen=True)
class StabilityReport:
    moduli: np.ndarray
    unit_count: int
    expected_unit_count: int
    max_other: float

    @property
    def stable(self) -> bool:
        return self.max_other <= 1.0 + UNSTABLE_TOL

    def as_dict(self) -> dict:
        return {
            "moduli": self.moduli.tolist(),
            "unit_count": self.unit_count,
            "expected_unit_count": self.expected_unit_count,
            "max_other_modulus": self.max_other,
            "stable": self.stable,
        }


def stability(fit: VecmFit, tol: float = UNIT_TOL) -> StabilityReport:
    """Companion-matrix eigenvalue moduli of the levels VAR implied by the fit.

    A rank-``r`` model has ``K - r`` roots on the unit circle by construction;
    the report counts moduli within ``tol`` of one and gives the largest of
    the rest.
    """
    mod = companion_moduli(levels_var(fit.pi, fit.gammas))
    units = count_unit(mod, tol)
    rest = mod[np.abs(mod - 1.0) > tol]
    return StabilityReport(
        moduli=mod,
        unit_count=units,
        expected_unit_count=fit.K - fit.rank,
        max_other=float(rest.max()) if rest.size else 0.0,
    )


def lm_autocorrelation(fit: VecmFit, lag: int) -> TestResult:
    """Multivariate LM test for residual autocorrelation at one lag.

    Residuals are regressed on the VECM regressors and their own value
    ``lag`` periods back (zero-filled at the start). The statistic is
    ``(n - d - 1/2) log(|Sigma| / |Sigma_aux|)`` with ``d`` the number of
    auxiliary-regression coefficients per equation excluding the constant,
    compared with chi-square(K^2).
    """
    if lag < 1:
        raise ValueError("lag must be positive")
    U = fit.resid
    n, K = U.shape
    if n <= K * lag:
        raise DataError(f"residual sample ({n}) too short for an LM test at lag {lag}")
    lagged = np.zeros_like(U)
    lagged[lag:] = U[:-lag]
    X = np.hstack([fit.regressors, lagged])
    _, E = ols(U, X)
    s_full = U.T @ U / n
    s_aux = E.T @ E / n
    d = X.shape[1] - 1
    ld_full = np.linalg.slogdet(s_full)[1]
    ld_aux = np.linalg.slogdet(s_aux)[1]
    stat = (n - d - 0.5) * (ld_full - ld_aux)
    return TestResult(float(stat), K * K, f"lag {lag}")


def _weak_exog_loglik(conc, j: int, r: int) -> float:
    """Maximised log-likelihood with row ``j`` of alpha set to zero (closed form)."""
    n, K = conc.R0.shape
    others = [k for k in range(K) if k != j]
    Rb = conc.R0[:, [j]]
    Ra = residualize(conc.R0[:, others], Rb)
    R1 = residualize(conc.R1, Rb)
    Saa, Sa1, S11 = Ra.T @ Ra / n, Ra.T @ R1 / n, R1.T @ R1 / n
    lam, _ = reduced_rank_eig(Saa, Sa1, S11)
    ld_b = np.log(float(Rb[:, 0] @ Rb[:, 0]) / n)
    ld_a = np.linalg.slogdet(Saa)[1]
    return float(-0.5 * n * (K * np.log(2 * np.pi) + K + ld_b + ld_a + np.sum(np.log1p(-lam[:r]))))


def weak_exogeneity(fit: VecmFit, variable: str) -> TestResult:
    """LR test that ``variable``'s row of alpha is zero (df = r).

    The restricted model conditions the remaining equations on the
    variable's concentrated difference and solves the reduced-rank problem
    of the partial system, which gives the restricted maximum exactly.
    ``beta`` is left unrestricted (just-identified) in both models.
    """
    r = fit.rank
    if r < 1:
        raise ValueError("weak exogeneity needs rank >= 1")
    if r >= fit.K:
        raise ValueError("weak exogeneity is not testable at full rank")
    j = fit.names.index(variable)
    conc = fit.concentrated()
    n = conc.T_eff
    _, logdet = np.linalg.slogdet(conc.S00)
    lam = conc.eig[0][:r]
    llf_u = -0.5 * n * (fit.K * np.log(2 * np.pi) + fit.K + logdet + np.sum(np.log1p(-lam)))
    llf_r = _weak_exog_loglik(conc, j, r)
    stat = 2.0 * (llf_u - llf_r)
    return TestResult(float(stat), r, variable)


def granger_short_run(fit: VecmFit, cause: str, effect: str) -> TestResult:
    """Wald test that every lagged difference of ``cause`` drops out of ``effect``'s equation (df = l - 1)."""
    if fit.lags < 2:
        raise ValueError("short-run Granger causality needs at least one lagged difference (lags >= 2)")
    c = fit.names.index(cause)
    e = fit.names.index(effect)
    idx = [fit.gamma_index(i, c) for i in range(1, fit.lags)]
    theta = fit.coef_matrix[idx, e]
    XtX_inv = np.linalg.inv(fit.regressors.T @ fit.regressors)
    V = fit.sigma[e, e] * XtX_inv[np.ix_(idx, idx)]
    try:
        stat = float(theta @ linalg.solve(V, theta, assume_a="pos"))
    except linalg.LinAlgError:
        raise NumericalError("singular covariance of Granger coefficients") from None
    return TestResult(stat, len(idx), f"{cause} -> {effect}")


def granger_table(fit: VecmFit) -> dict[str, dict[str, TestResult]]:
    """``table[effect][cause]`` for every ordered pair, diagonal included."""
    return {e: {c: granger_short_run(fit, c, e) for c in fit.names} for e in fit.names}


def weak_exogeneity_table(fit: VecmFit) -> dict[str, TestResult]:
    return {v: weak_exogeneity(fit, v) for v in fit.names}
