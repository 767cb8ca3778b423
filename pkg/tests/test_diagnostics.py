import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import optimize, stats

from vecmlab._ols import gaussian_loglik
from vecmlab.diagnostics import (
    TestResult, granger_short_run, granger_table, lm_autocorrelation, stability,
    weak_exogeneity, weak_exogeneity_table,
)
from vecmlab.johansen import VecmSpec, estimate_vecm, vecm_from_params
from vecmlab.synthetic import VecmDgp, random_dgp, simulate

sm_vecm = pytest.importorskip("statsmodels.tsa.vector_ar.vecm")


def test_p_value_is_derived():
    t = TestResult(3.0, 2)
    assert t.p_value == pytest.approx(np.exp(-1.5))
    assert t.as_dict()["p_value"] == t.p_value


@given(st.floats(0, 200), st.integers(1, 60))
def test_p_value_bounds(stat, df):
    p = TestResult(stat, df).p_value
    assert 0.0 <= p <= 1.0
    assert TestResult(stat + 1.0, df).p_value <= p


def test_stability_counts_and_flags(dgp3, sample3):
    fit = estimate_vecm(sample3, VecmSpec(2, 1))
    rep = stability(fit)
    assert rep.unit_count == 2 == rep.expected_unit_count
    assert rep.stable and rep.max_other < 1
    assert len(rep.moduli) == 3 * 2
    # an explosive alpha gives a modulus above one
    bad = vecm_from_params(alpha=[[0.8], [0.0], [0.0]], beta=[[1.0], [0.0], [0.0]], gammas=None, sigma=np.eye(3))
    rep = stability(bad)
    assert not rep.stable and rep.max_other > 1


def test_granger_matches_statsmodels_wald(sample3):
    fit = estimate_vecm(sample3, VecmSpec(2, 1, "constant"))
    ref = sm_vecm.VECM(sample3.values, k_ar_diff=1, coint_rank=1, deterministic="co").fit()
    for e in range(3):
        for c in range(3):
            ours = granger_short_run(fit, fit.names[c], fit.names[e])
            assert ours.df == 1
            assert ours.statistic == pytest.approx((ref.gamma[e, c] / ref.stderr_gamma[e, c]) ** 2, rel=1e-8)


def test_granger_table_layout(sample3):
    fit = estimate_vecm(sample3, VecmSpec(3, 1))
    tab = granger_table(fit)
    assert set(tab) == set(fit.names)
    assert tab["p"]["i"].df == 2
    assert tab["p"]["i"].label == "i -> p"
    with pytest.raises(ValueError):
        granger_short_run(estimate_vecm(sample3, VecmSpec(1, 1)), "p", "m")


def test_granger_detects_short_run_link():
    dgp = VecmDgp(alpha=[[-0.2], [0.0]], beta=[[1.0], [-1.0]], sigma=np.eye(2),
                  gammas=[[[0.0, 0.5], [0.0, 0.0]]])
    fit = estimate_vecm(simulate(dgp, 600, seed=2), VecmSpec(2, 1))
    assert granger_short_run(fit, "y2", "y1").p_value < 1e-6
    assert granger_short_run(fit, "y1", "y2").p_value > 0.001


# --- weak exogeneity: closed form against brute-force restricted ML ---------


def _restricted_llf_given_beta(conc, beta, j, iters=300):
    """ML with alpha row j = 0 for fixed beta, by iterated GLS on concentrated data."""
    R0, W = conc.R0, conc.R1 @ beta
    n, K = R0.shape
    r = W.shape[1]
    free = [k for k in range(K) if k != j]
    A = np.zeros((K, r))
    A[free] = np.linalg.lstsq(W, R0[:, free], rcond=None)[0].T
    for _ in range(iters):
        E = R0 - W @ A.T
        Si = np.linalg.inv(E.T @ E / n)
        # normal equations for the free rows: sum_l Si[k,l] W'(R0_l - W a_l) = 0
        WW, WR = W.T @ W, W.T @ R0
        m = len(free)
        M = np.zeros((m * r, m * r))
        b = np.zeros(m * r)
        for a, k in enumerate(free):
            b[a * r:(a + 1) * r] = WR @ Si[k]
            for c, l in enumerate(free):
                M[a * r:(a + 1) * r, c * r:(c + 1) * r] = Si[k, l] * WW
        A_new = np.zeros_like(A)
        A_new[free] = np.linalg.solve(M, b).reshape(m, r)
        if np.abs(A_new - A).max() < 1e-13:
            A = A_new
            break
        A = A_new
    return gaussian_loglik(R0 - W @ A.T)


@pytest.mark.parametrize("variable", ["p", "i"])
def test_weak_exogeneity_matches_brute_force(dgp3, variable):
    tab = simulate(dgp3, 150, seed=9)
    fit = estimate_vecm(tab, VecmSpec(2, 1))
    conc = fit.concentrated()
    j = fit.names.index(variable)
    norm = 1 if variable == "p" else 0  # avoid normalising on a row that may be near zero

    def negll(theta):
        beta = np.insert(theta, norm, 1.0)[:, None]
        return -_restricted_llf_given_beta(conc, beta, j)

    start = np.delete(fit.beta[:, 0] / fit.beta[norm, 0], norm)
    opt = optimize.minimize(negll, start, method="Nelder-Mead",
                            options={"xatol": 1e-9, "fatol": 1e-11, "maxiter": 20_000})
    brute = 2 * (fit.llf + opt.fun)
    res = weak_exogeneity(fit, variable)
    assert res.df == 1
    assert res.statistic == pytest.approx(brute, abs=1e-4)


def test_weak_exogeneity_power_and_size(dgp3):
    # variable "i" has a small alpha; "p" adjusts strongly
    fit = estimate_vecm(simulate(dgp3, 1500, seed=4), VecmSpec(2, 1))
    tab = weak_exogeneity_table(fit)
    assert tab["p"].p_value < 1e-6
    exog = VecmDgp(alpha=[[-0.3], [0.0]], beta=[[1.0], [-1.0]], sigma=np.eye(2))
    p = [weak_exogeneity(estimate_vecm(simulate(exog, 300, seed=s), VecmSpec(2, 1)), "y2").p_value for s in range(150)]
    assert 0.01 <= np.mean(np.array(p) < 0.05) <= 0.12
    with pytest.raises(ValueError):
        weak_exogeneity(estimate_vecm(simulate(exog, 100, seed=1), VecmSpec(2, 2)), "y1")


# --- LM autocorrelation ----------------------------------------------------


def test_lm_size_under_correct_specification(dgp3):
    stats_ = [lm_autocorrelation(estimate_vecm(simulate(dgp3, 250, seed=s), VecmSpec(2, 1)), 1) for s in range(150)]
    assert stats_[0].df == 9
    rej = np.mean([t.p_value < 0.05 for t in stats_])
    assert 0.0 <= rej <= 0.12
    assert np.mean([t.statistic for t in stats_]) == pytest.approx(9, abs=1.5)


def test_lm_power_under_omitted_lags():
    dgp = random_dgp(3, 1, 3, seed=12, gamma_scale=0.9)
    fit = estimate_vecm(simulate(dgp, 400, seed=1), VecmSpec(1, 1))
    assert lm_autocorrelation(fit, 1).p_value < 0.01


def test_lm_statistic_formula(sample3):
    fit = estimate_vecm(sample3, VecmSpec(2, 1))
    U = fit.resid
    n, K = U.shape
    lagged = np.vstack([np.zeros((2, K)), U[:-2]])
    X = np.hstack([fit.regressors, lagged])
    E = U - X @ np.linalg.lstsq(X, U, rcond=None)[0]
    d = X.shape[1] - 1
    want = (n - d - 0.5) * np.log(np.linalg.det(U.T @ U) / np.linalg.det(E.T @ E))
    assert lm_autocorrelation(fit, 2).statistic == pytest.approx(want, rel=1e-10)
    assert stats.chi2.sf(want, 9) == pytest.approx(lm_autocorrelation(fit, 2).p_value)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 5000), st.integers(1, 3))
def test_stability_unit_count_property(seed, r):
    K = 4
    fit = estimate_vecm(simulate(random_dgp(K, r, 2, seed=seed), 120, seed=seed), VecmSpec(2, r))
    assert stability(fit).unit_count == K - r
