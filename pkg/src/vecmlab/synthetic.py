"""Seeded data-generating processes used as oracles for the estimators.

Random numbers come from numpy's PCG64 bit generator (128-bit state, 64-bit
output). Gaussian variates are produced from its doubles by the Box-Muller
transform rather than numpy's ziggurat sampler, so the stream can be
reproduced from the documented algorithms alone:

    u1, u2 = rng.random(), rng.random()
    z0 = sqrt(-2 log(1 - u1)) cos(2 pi u2)
    z1 = sqrt(-2 log(1 - u1)) sin(2 pi u2)

draws are consumed in the order z0, z1 of successive pairs, filling arrays
in C (row-major) order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._companion import companion_moduli, count_unit, levels_var
from .dataset import TimeSeriesTable
from .errors import ConfigError

UNIT_TOL = 1e-6


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(int(seed)))


def standard_normal(rng: np.random.Generator, size) -> np.ndarray:
    shape = (size,) if np.isscalar(size) else tuple(size)
    n = int(np.prod(shape))
    m = (n + 1) // 2
    u = rng.random(2 * m)
    u1, u2 = u[0::2], u[1::2]
    rad = np.sqrt(-2.0 * np.log1p(-u1))
    z = np.empty(2 * m)
    z[0::2] = rad * np.cos(2 * np.pi * u2)
    z[1::2] = rad * np.sin(2 * np.pi * u2)
    return z[:n].reshape(shape)


def psd_factor(sigma: np.ndarray) -> np.ndarray:
    """Lower-triangular ``L`` with ``L L' = sigma``; handles singular PSD input."""
    sigma = np.asarray(sigma, dtype=float)
    try:
        return np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        w, V = np.linalg.eigh(sigma)
        if w.min() < -1e-10 * max(1.0, w.max()):
            raise ConfigError("innovation covariance is not positive semidefinite") from None
        F = V * np.sqrt(np.clip(w, 0, None))
        # QR of F' gives a triangular factor with the same outer product
        _, R = np.linalg.qr(F.T)
        return R.T


def random_walk(T: int, seed: int, drift: float = 0.0, scale: float = 1.0) -> np.ndarray:
    """``y_t = sum_{s<=t} (drift + scale * e_s)`` for t = 1..T."""
    if T < 1:
        raise ValueError("T must be at least 1")
    e = standard_normal(make_rng(seed), T)
    return np.cumsum(drift + scale * e)


@dataclass
class VecmDgp:
    """Gaussian VECM

        dy_t = alpha (beta' y_{t-1} + trend * t) + sum_i gammas[i] dy_{t-i} + const + e_t,

    with ``e_t ~ N(0, sigma)``. Validated on construction: the implied
    companion matrix must have exactly ``K - r`` unit moduli and every other
    modulus strictly inside the unit circle.
    """

    alpha: np.ndarray
    beta: np.ndarray
    sigma: np.ndarray
    gammas: np.ndarray = None
    const: np.ndarray = None
    trend: np.ndarray = None
    y0: np.ndarray = None
    names: tuple[str, ...] = field(default=None)

    def __post_init__(self):
        self.sigma = np.atleast_2d(np.asarray(self.sigma, dtype=float))
        K = self.sigma.shape[0]
        try:
            self.alpha = np.asarray(self.alpha, dtype=float).reshape(K, -1)
            self.beta = np.asarray(self.beta, dtype=float).reshape(K, -1)
        except ValueError:
            raise ConfigError(f"alpha and beta must have {K} rows (one per variable)") from None
        if self.alpha.shape != self.beta.shape:
            raise ConfigError(f"alpha {self.alpha.shape} and beta {self.beta.shape} must match")
        r = self.alpha.shape[1]
        self.gammas = np.zeros((0, K, K)) if self.gammas is None else np.asarray(self.gammas, dtype=float).reshape(-1, K, K)
        self.const = np.zeros(K) if self.const is None else np.asarray(self.const, dtype=float).reshape(K)
        self.trend = np.zeros(r) if self.trend is None else np.asarray(self.trend, dtype=float).reshape(r)
        self.y0 = np.zeros(K) if self.y0 is None else np.asarray(self.y0, dtype=float).reshape(K)
        if self.names is None:
            self.names = tuple(f"y{i + 1}" for i in range(K))
        self.names = tuple(self.names)
        if len(self.names) != K:
            raise ConfigError("names must match the number of variables")
        if not np.allclose(self.sigma, self.sigma.T, atol=1e-12):
            raise ConfigError("sigma must be symmetric")
        psd_factor(self.sigma)
        mod = self.moduli()
        units = count_unit(mod, UNIT_TOL)
        rest = mod[np.abs(mod - 1.0) > UNIT_TOL]
        if units != K - r or (rest.size and rest.max() >= 1.0):
            raise ConfigError(
                f"invalid VECM DGP: {units} unit moduli (need {K - r}), "
                f"largest other modulus {rest.max() if rest.size else 0.0:.6g}"
            )

    @property
    def K(self) -> int:
        return self.sigma.shape[0]

    @property
    def rank(self) -> int:
        return self.alpha.shape[1]

    @property
    def lags(self) -> int:
        return self.gammas.shape[0] + 1

    def levels_var(self) -> np.ndarray:
        return levels_var(self.alpha @ self.beta.T, self.gammas)

    def moduli(self) -> np.ndarray:
        return companion_moduli(self.levels_var())


def vecm_recursion(alpha, beta_ext, gammas, const, y_init, eps, t0: int) -> np.ndarray:
    """Iterate a VECM forward from ``len(y_init)`` presample rows.

    ``beta_ext`` may carry a trailing trend row; the trend regressor for
    generated row ``j`` is ``t0 + j``. Returns presample plus generated rows.
    """
    y_init = np.atleast_2d(np.asarray(y_init, dtype=float))
    K = y_init.shape[1]
    n = eps.shape[0]
    lags = gammas.shape[0] + 1
    if y_init.shape[0] < lags:
        raise ValueError(f"need {lags} presample rows, got {y_init.shape[0]}")
    has_trend = beta_ext.shape[0] == K + 1
    by = beta_ext[:K]
    rho = beta_ext[K] if has_trend else None
    p0 = y_init.shape[0]
    y = np.empty((p0 + n, K))
    y[:p0] = y_init
    for j in range(n):
        t = p0 + j
        ect = y[t - 1] @ by
        if has_trend:
            ect = ect + rho * (t0 + j)
        dy = alpha @ ect + const + eps[j]
        for i in range(lags - 1):
            dy += gammas[i] @ (y[t - 1 - i] - y[t - 2 - i])
        y[t] = y[t - 1] + dy
    return y


def simulate(dgp: VecmDgp, T: int, seed: int, burn_in: int | None = None, start: str = "2000Q1") -> TimeSeriesTable:
    """Draw ``T`` observations from ``dgp`` after discarding ``burn_in`` periods (default ``10 * lags``)."""
    l = dgp.lags
    if T < l + 1:
        raise ValueError(f"T must be at least lags + 1 = {l + 1}")
    burn = 10 * l if burn_in is None else int(burn_in)
    rng = make_rng(seed)
    n = burn + T
    z = standard_normal(rng, (n, dgp.K))
    eps = z @ psd_factor(dgp.sigma).T
    beta_ext = np.vstack([dgp.beta, dgp.trend[None, :]])
    y_init = np.tile(dgp.y0, (l, 1))
    y = vecm_recursion(dgp.alpha, beta_ext, dgp.gammas, dgp.const, y_init, eps, t0=l + 1)
    return TimeSeriesTable.from_array(y[-T:], dgp.names, start=start)


def simulate_var(A, sigma, T: int, seed: int, burn_in: int = 100, const=None) -> np.ndarray:
    """Stationary VAR(p) draws ``y_t = const + sum_i A_i y_{t-i} + e_t`` (T x K)."""
    A = np.asarray(A, dtype=float)
    if A.ndim == 2:
        A = A[None]
    p, K, _ = A.shape
    const = np.zeros(K) if const is None else np.asarray(const, dtype=float)
    rng = make_rng(seed)
    eps = standard_normal(rng, (burn_in + T, K)) @ psd_factor(np.atleast_2d(sigma)).T
    y = np.zeros((p + burn_in + T, K))
    for t in range(p, y.shape[0]):
        y[t] = const + eps[t - p]
        for i in range(p):
            y[t] += A[i] @ y[t - 1 - i]
    return y[-T:]


def random_dgp(K: int, r: int, lags: int = 2, seed=0, gamma_scale: float = 0.2, names=None) -> VecmDgp:
    """A random valid VECM DGP with rank ``r``.

    ``beta`` has orthonormal columns and ``alpha = -beta diag(u)`` plus a
    component orthogonal to ``beta``, so ``I + beta' alpha`` has eigenvalues
    ``1 - u`` with ``u`` in (0.1, 0.6). Short-run matrices are shrunk until
    the process is valid.
    """
    rng = make_rng(seed)
    Q, _ = np.linalg.qr(standard_normal(rng, (K, K)))
    beta = Q[:, :r]
    u = 0.1 + 0.5 * rng.random(r)
    alpha = -beta * u + (Q[:, r:] @ standard_normal(rng, (K - r, r))) * 0.2 if r else np.zeros((K, 0))
    G = standard_normal(rng, (lags - 1, K, K)) * gamma_scale / np.sqrt(K)
    B = standard_normal(rng, (K, K))
    sigma = B @ B.T / K + 0.5 * np.eye(K)
    for _ in range(50):
        try:
            return VecmDgp(alpha, beta, sigma, gammas=G, names=names)
        except ConfigError:
            G = G * 0.5
    raise ConfigError("could not draw a valid DGP")  # pragma: no cover
