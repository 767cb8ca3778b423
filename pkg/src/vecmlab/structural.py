"""Cholesky-orthogonalised impulse responses, variance decompositions and bootstrap bands."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from joblib import Parallel, delayed

from ._companion import levels_var
from .errors import NumericalError
from .johansen import VecmFit, estimate_vecm
from .synthetic import make_rng, vecm_recursion

DEFAULT_HORIZON = 6

PANEL_VARIABLES = (
    "CPI", "M2", "Activity Level", "Interest Rate", "NEER", "Imports Prices", "Regulated Prices",
)

ORDER_PRESETS = {
    "order1": ("Imports Prices", "M2", "Interest Rate", "Activity Level", "NEER", "Regulated Prices", "CPI"),
    "order2": ("Imports Prices", "M2", "Interest Rate", "NEER", "Activity Level", "Regulated Prices", "CPI"),
    "order3": ("Imports Prices", "NEER", "Regulated Prices", "CPI", "Activity Level", "M2", "Interest Rate"),
    "order4": ("Imports Prices", "NEER", "Activity Level", "Regulated Prices", "M2", "Interest Rate", "CPI"),
}


@dataclass(frozen=True)
class Ordering:
    """Recursive ordering, most exogenous variable first."""

    names: tuple[str, ...]
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"ordering repeats a variable: {self.names}")

    def permutation(self, names: Sequence[str]) -> list[int]:
        """Positions of the ordered variables in ``names``; checks it is a permutation."""
        names = list(names)
        if sorted(self.names) != sorted(names):
            raise ValueError(f"ordering {list(self.names)} is not a permutation of {names}")
        return [names.index(n) for n in self.names]

    @classmethod
    def preset(cls, key: str, aliases: dict[str, str] | None = None) -> "Ordering":
        """One of ``order1..order4``; ``aliases`` maps canonical names to column names."""
        if key not in ORDER_PRESETS:
            raise KeyError(f"unknown ordering preset {key!r}; have {sorted(ORDER_PRESETS)}")
        aliases = aliases or {}
        return cls(tuple(aliases.get(n, n) for n in ORDER_PRESETS[key]), key)


def vecm_to_var(fit: VecmFit) -> np.ndarray:
    """Levels-VAR matrices ``A_1..A_l`` (array of shape ``(l, K, K)``)."""
    return levels_var(fit.pi, fit.gammas)


def ma_matrices(A: np.ndarray, H: int) -> np.ndarray:
    """Reduced-form responses ``Psi_0..Psi_H`` of the VAR with coefficients ``A``."""
    l, K, _ = A.shape
    psi = np.zeros((H + 1, K, K))
    psi[0] = np.eye(K)
    for h in range(1, H + 1):
        for j in range(1, min(h, l) + 1):
            psi[h] += psi[h - j] @ A[j - 1]
    return psi


def cholesky_impact(sigma: np.ndarray, perm: Sequence[int]) -> np.ndarray:
    """Impact matrix ``P`` (rows: responses, columns: shocks) in natural variable order.

    ``P`` is the lower Cholesky factor of ``sigma`` permuted into ``perm``
    order, mapped back, so ``P P' = sigma``.
    """
    perm = list(perm)
    S = sigma[np.ix_(perm, perm)]
    try:
        L = np.linalg.cholesky(S)
    except np.linalg.LinAlgError:
        raise NumericalError(
            f"residual covariance is not positive definite (smallest eigenvalue {np.linalg.eigvalsh(sigma).min():.3g})"
        ) from None
    P = np.zeros_like(L)
    P[np.ix_(perm, perm)] = L
    return P


def _orth_responses(fit: VecmFit, perm, H: int) -> np.ndarray:
    """``Theta_h = Psi_h P`` for h = 0..H, shape ``(H+1, K, K)`` (response, shock)."""
    P = cholesky_impact(fit.sigma, perm)
    return ma_matrices(vecm_to_var(fit), H) @ P


def _fevd_from_theta(theta: np.ndarray) -> np.ndarray:
    """Shares indexed ``(response, shock, step)`` for steps 1..len(theta)."""
    cum = np.cumsum(theta**2, axis=0)
    total = cum.sum(axis=2, keepdims=True)
    return np.transpose(cum / total, (1, 2, 0))


@dataclass(frozen=True)
class IrfResult:
    """Orthogonalised responses.

    ``values[s, k, h]`` is the response of variable ``k`` at horizon ``h`` to
    a one-standard-deviation shock in variable ``s``.
    """

    names: tuple[str, ...]
    ordering: Ordering
    values: np.ndarray
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None
    level: float | None = None

    @property
    def horizon(self) -> int:
        return self.values.shape[2] - 1

    def matrix(self, h: int) -> np.ndarray:
        """Response matrix at horizon ``h`` (rows: responses, columns: shocks)."""
        return self.values[:, :, h].T

    def response(self, shock: str, response: str) -> np.ndarray:
        return self.values[self.names.index(shock), self.names.index(response)]

    def long_format(self) -> list[dict]:
        rows = []
        for s, sn in enumerate(self.names):
            for k, kn in enumerate(self.names):
                for h in range(self.horizon + 1):
                    rows.append({
                        "ordering": self.ordering.label or "->".join(self.ordering.names),
                        "shock": sn, "response": kn, "horizon": h,
                        "value": float(self.values[s, k, h]),
                        "lower": None if self.lower is None else float(self.lower[s, k, h]),
                        "upper": None if self.upper is None else float(self.upper[s, k, h]),
                    })
        return rows


@dataclass(frozen=True)
class FevdResult:
    """``shares[k, s, i]``: share of variable ``k``'s ``horizons[i]``-step forecast-error variance due to shock ``s``."""

    names: tuple[str, ...]
    ordering: Ordering
    shares: np.ndarray
    horizons: np.ndarray
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None
    level: float | None = None

    def share(self, response: str, shock: str) -> np.ndarray:
        return self.shares[self.names.index(response), self.names.index(shock)]

    def long_format(self) -> list[dict]:
        rows = []
        for k, kn in enumerate(self.names):
            for s, sn in enumerate(self.names):
                for i, h in enumerate(self.horizons):
                    rows.append({
                        "ordering": self.ordering.label or "->".join(self.ordering.names),
                        "shock": sn, "response": kn, "horizon": int(h),
                        "value": float(self.shares[k, s, i]),
                        "lower": None if self.lower is None else float(self.lower[k, s, i]),
                        "upper": None if self.upper is None else float(self.upper[k, s, i]),
                    })
        return rows


def irf(fit: VecmFit, ordering: Ordering, H: int = DEFAULT_HORIZON) -> IrfResult:
    """Cholesky-orthogonalised impulse responses for horizons 0..H.

    Responses of an I(1) system need not die out.
    """
    if H < 0:
        raise ValueError("horizon must be nonnegative")
    perm = ordering.permutation(fit.names)
    theta = _orth_responses(fit, perm, H)
    return IrfResult(fit.names, ordering, np.transpose(theta, (2, 1, 0)).copy())


def fevd(fit: VecmFit, ordering: Ordering, H: int = DEFAULT_HORIZON) -> FevdResult:
    """Forecast-error variance shares for forecast steps 1..H.

    Step ``h`` accumulates squared orthogonalised responses of horizons
    ``0..h-1``; step 1 is the impact period.
    """
    if H < 1:
        raise ValueError("FEVD horizon must be at least 1")
    perm = ordering.permutation(fit.names)
    theta = _orth_responses(fit, perm, H - 1)
    return FevdResult(fit.names, ordering, _fevd_from_theta(theta), np.arange(1, H + 1))


@dataclass(frozen=True)
class BootstrapBands:
    irf: IrfResult
    fevd: FevdResult
    reps: int
    failed: int
    seed: int

    def as_dict(self) -> dict:
        return {"reps": self.reps, "failed": self.failed, "seed": self.seed, "level": self.irf.level}


def _replicate(fit: VecmFit, perm, H: int, seed_seq: np.random.SeedSequence):
    rng = make_rng(seed_seq)
    E = fit.resid - fit.resid.mean(axis=0)
    n = E.shape[0]
    l = fit.lags
    draw = E[rng.integers(0, n, size=n)]
    y = vecm_recursion(fit.alpha, fit.beta, fit.gammas, fit.const, fit.data[:l], draw, t0=l + 1)
    try:
        boot = estimate_vecm(y, fit.spec, normalize=False)
        theta = _orth_responses(boot, perm, max(H, 1))
    except (NumericalError, np.linalg.LinAlgError, ValueError):
        return None
    if not np.all(np.isfinite(theta)):
        return None
    return theta


def bootstrap_bands(
    fit: VecmFit,
    ordering: Ordering,
    H: int = DEFAULT_HORIZON,
    reps: int = 1000,
    level: float = 0.95,
    seed: int = 0,
    n_jobs: int = 1,
    max_fail: float = 0.05,
) -> BootstrapBands:
    """Recursive residual bootstrap percentile bands for IRFs and FEVDs.

    Each replication resamples the centred residuals with replacement,
    rebuilds the levels from the observed presample through the fitted VECM,
    re-estimates with the same specification and recomputes the responses.
    Replication ``b`` draws from the ``b``-th child of ``SeedSequence(seed)``,
    so results do not depend on ``n_jobs``. Bands are widened where needed so
    they always contain the point estimate.
    """
    if reps < 100:
        raise ValueError("reps must be at least 100")
    if not 0 < level < 1:
        raise ValueError("level must lie in (0, 1)")
    if fit.data.shape[0] == 0:
        raise ValueError("bootstrap needs a fit estimated from data")
    perm = ordering.permutation(fit.names)
    children = np.random.SeedSequence(seed).spawn(reps)
    if n_jobs == 1:
        draws = [_replicate(fit, perm, H, c) for c in children]
    else:
        draws = Parallel(n_jobs=n_jobs)(delayed(_replicate)(fit, perm, H, c) for c in children)
    ok = [d for d in draws if d is not None]
    failed = reps - len(ok)
    if failed > max_fail * reps:
        raise NumericalError(f"{failed} of {reps} bootstrap replications failed to estimate")
    theta = np.stack(ok)  # (B, H+1, K, K)
    q = [100 * (1 - level) / 2, 100 * (1 - (1 - level) / 2)]

    point_irf = irf(fit, ordering, H)
    irf_draws = np.transpose(theta[:, : H + 1], (0, 3, 2, 1))
    lo, hi = np.percentile(irf_draws, q, axis=0)
    irf_res = IrfResult(
        fit.names, ordering, point_irf.values,
        np.minimum(lo, point_irf.values), np.maximum(hi, point_irf.values), level,
    )

    Hf = max(H, 1)
    point_fevd = fevd(fit, ordering, Hf)
    fevd_draws = np.stack([_fevd_from_theta(t[:Hf]) for t in theta])
    lo, hi = np.percentile(fevd_draws, q, axis=0)
    fevd_res = FevdResult(
        fit.names, ordering, point_fevd.shares, point_fevd.horizons,
        np.minimum(lo, point_fevd.shares), np.maximum(hi, point_fevd.shares), level,
    )
    return BootstrapBands(irf_res, fevd_res, reps, failed, seed)
