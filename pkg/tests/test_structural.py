from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vecmlab._companion import vecm_from_levels
from vecmlab.errors import NumericalError
from vecmlab.johansen import VecmSpec, estimate_vecm, vecm_from_params
from vecmlab.structural import (
    ORDER_PRESETS, PANEL_VARIABLES, Ordering, bootstrap_bands, cholesky_impact, fevd, irf,
    ma_matrices, vecm_to_var,
)
from vecmlab.synthetic import random_dgp, simulate

sm_var = pytest.importorskip("statsmodels.tsa.api")


def test_presets_are_permutations():
    for key, names in ORDER_PRESETS.items():
        assert sorted(names) == sorted(PANEL_VARIABLES), key
    o = Ordering.preset("order1", {"CPI": "p"})
    assert o.names[-1] == "p" and o.label == "order1"
    with pytest.raises(KeyError):
        Ordering.preset("order9")
    with pytest.raises(ValueError):
        Ordering(("a", "a"))
    with pytest.raises(ValueError):
        Ordering(("a", "b")).permutation(["a", "c"])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.permutations(range(4)))
def test_cholesky_impact_recursive(seed, perm):
    rng = np.random.default_rng(seed)
    B = rng.normal(size=(4, 4))
    sigma = B @ B.T + 0.1 * np.eye(4)
    P = cholesky_impact(sigma, perm)
    assert np.allclose(P @ P.T, sigma)
    # a shock ordered later has no impact on variables ordered earlier
    for a, i in enumerate(perm):
        for b, j in enumerate(perm):
            if b > a:
                assert P[i, j] == 0.0


def test_cholesky_needs_pd():
    with pytest.raises(NumericalError):
        cholesky_impact(np.array([[1.0, 1.0], [1.0, 1.0]]), [0, 1])


def test_irf_matches_statsmodels_var(sample3):
    # with full rank the VECM is the levels VAR; responses must coincide
    fit = estimate_vecm(sample3, VecmSpec(2, 3, "constant"), normalize=False)
    ref = sm_var.VAR(sample3.values).fit(2, trend="c")
    # statsmodels orthogonalises with the degrees-of-freedom corrected covariance
    ours = irf(replace(fit, sigma=np.asarray(ref.sigma_u)), Ordering(fit.names), 8)
    want = ref.irf(8).orth_irfs  # (h, response, shock)
    assert np.allclose(np.transpose(ours.values, (2, 1, 0)), want, atol=1e-8)
    fe = fevd(fit, Ordering(fit.names), 8)
    # statsmodels decomp is (response, step, shock) for steps 1..H
    assert np.allclose(np.transpose(fe.shares, (0, 2, 1)), ref.fevd(8).decomp, atol=1e-8)


def test_ma_matrices_match_companion_powers():
    A = np.array([[[0.5, 0.1], [0.0, 0.3]], [[0.1, 0.0], [0.2, -0.1]]])
    psi = ma_matrices(A, 6)
    C = np.zeros((4, 4))
    C[:2] = np.hstack(A)
    C[2:, :2] = np.eye(2)
    for h in range(7):
        assert np.allclose(psi[h], np.linalg.matrix_power(C, h)[:2, :2])


def test_vecm_round_trip():
    A = np.array([[[0.5, 0.1], [0.0, 0.3]], [[0.1, 0.0], [0.2, -0.1]]])
    pi, gammas = vecm_from_levels(A)
    fit = vecm_from_params(pi, np.eye(2), gammas, np.eye(2))
    assert np.allclose(vecm_to_var(fit), A)


def test_i1_responses_are_permanent(dgp2):
    fit = vecm_from_params(dgp2.alpha, np.vstack([dgp2.beta, dgp2.trend]), dgp2.gammas, dgp2.sigma)
    r = irf(fit, Ordering(fit.names), 200)
    # long-run impact matrix C = beta_perp (alpha_perp' Gamma beta_perp)^-1 alpha_perp' times P
    assert not np.allclose(r.values[:, :, -1], 0, atol=1e-3)
    assert np.allclose(r.values[:, :, -1], r.values[:, :, -2], atol=1e-8)


def test_fevd_first_step_recursive(sample3):
    fit = estimate_vecm(sample3, VecmSpec(2, 1))
    o = Ordering(("i", "m", "p"))
    fe = fevd(fit, o, 6)
    assert fe.share("i", "i")[0] == pytest.approx(1.0)
    assert fe.share("i", "p")[0] == pytest.approx(0.0)
    assert list(fe.horizons) == [1, 2, 3, 4, 5, 6]
    rows = fe.long_format()
    assert len(rows) == 9 * 6 and rows[0]["horizon"] == 1


def test_long_format_irf(sample3):
    fit = estimate_vecm(sample3, VecmSpec(2, 1))
    r = irf(fit, Ordering(fit.names, "nat"), 3)
    rows = r.long_format()
    assert len(rows) == 9 * 4
    row = next(x for x in rows if x["shock"] == "m" and x["response"] == "p" and x["horizon"] == 2)
    assert row["value"] == r.response("m", "p")[2] == r.matrix(2)[0, 1]
    assert row["lower"] is None


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 5), st.integers(1, 3))
def test_fevd_shares_property(seed, K, lags):
    r = seed % K
    fit = estimate_vecm(simulate(random_dgp(K, r, lags, seed=seed), 120, seed=seed), VecmSpec(lags, r))
    rng = np.random.default_rng(seed)
    sh = fevd(fit, Ordering(tuple(rng.permutation(fit.names))), 10).shares
    assert np.allclose(sh.sum(axis=1), 1.0, atol=1e-12)
    assert sh.min() >= 0.0 and sh.max() <= 1.0 + 1e-15


# --- bootstrap -------------------------------------------------------------


@pytest.fixture(scope="module")
def fit2(dgp2):
    return estimate_vecm(simulate(dgp2, 200, seed=5), VecmSpec(2, 1))


def test_bootstrap_deterministic_and_parallel_equal(fit2):
    o = Ordering(fit2.names)
    a = bootstrap_bands(fit2, o, 4, reps=100, seed=7)
    b = bootstrap_bands(fit2, o, 4, reps=100, seed=7, n_jobs=2)
    c = bootstrap_bands(fit2, o, 4, reps=100, seed=8)
    assert np.array_equal(a.irf.lower, b.irf.lower) and np.array_equal(a.fevd.upper, b.fevd.upper)
    assert not np.array_equal(a.irf.lower, c.irf.lower)


def test_bands_contain_point_estimate(fit2):
    bb = bootstrap_bands(fit2, Ordering(fit2.names), 6, reps=100, level=0.9, seed=1)
    assert np.all(bb.irf.lower <= bb.irf.values) and np.all(bb.irf.values <= bb.irf.upper)
    assert np.all(bb.fevd.lower <= bb.fevd.shares) and np.all(bb.fevd.shares <= bb.fevd.upper)
    assert bb.failed == 0 and bb.irf.level == 0.9
    assert np.all(bb.fevd.lower >= 0) and np.all(bb.fevd.upper <= 1)


def test_bootstrap_wider_at_higher_level(fit2):
    o = Ordering(fit2.names)
    lo = bootstrap_bands(fit2, o, 4, reps=200, level=0.68, seed=2).irf
    hi = bootstrap_bands(fit2, o, 4, reps=200, level=0.95, seed=2).irf
    assert np.all(hi.upper - hi.lower >= lo.upper - lo.lower - 1e-12)


def test_bootstrap_validation(fit2):
    o = Ordering(fit2.names)
    with pytest.raises(ValueError):
        bootstrap_bands(fit2, o, 4, reps=10)
    with pytest.raises(ValueError):
        bootstrap_bands(fit2, o, 4, reps=100, level=1.5)
    nodata = vecm_from_params(fit2.alpha, fit2.beta, fit2.gammas, fit2.sigma)
    with pytest.raises(ValueError):
        bootstrap_bands(nodata, o, 4, reps=100)
