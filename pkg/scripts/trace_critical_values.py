"""Simulate asymptotic quantiles of the Johansen trace statistic.

The limit distribution is the trace of

    int dW F' (int F F')^{-1} int F dW'

with W an n-dimensional standard Brownian motion and F the demeaned regressor
process of the deterministic case:

* ``rtrend``   : F = (W, u), trend restricted to the cointegration space and
                 an unrestricted constant.
* ``constant`` : F = (W_1, ..., W_{n-1}, u), unrestricted constant generating
                 a linear trend in the levels.

Integrals are approximated by Riemann sums over ``--steps`` increments.
Output is a Python literal suitable for pasting into
``vecmlab/_critical_values.py``.

Usage::

    python scripts/trace_critical_values.py --reps 100000 --steps 1000
"""

import argparse
import time

import numpy as np

QUANTILES = (0.90, 0.95, 0.99)


def trace_draws(n, case, reps, steps, rng, chunk=500):
    out = np.empty(reps)
    u = np.arange(1, steps + 1) / steps
    done = 0
    while done < reps:
        m = min(chunk, reps - done)
        e = rng.standard_normal((m, steps, n))
        w = np.cumsum(e, axis=1) - e  # W_{t-1}
        w /= np.sqrt(steps)
        if case == "rtrend":
            f = np.concatenate([w, np.broadcast_to(u[None, :, None], (m, steps, 1))], axis=2)
        elif case == "constant":
            f = np.concatenate([w[:, :, : n - 1], np.broadcast_to(u[None, :, None], (m, steps, 1))], axis=2)
        else:
            raise ValueError(case)
        f = f - f.mean(axis=1, keepdims=True)
        a = np.matmul(f.transpose(0, 2, 1), e) / np.sqrt(steps)
        b = np.matmul(f.transpose(0, 2, 1), f) / steps
        x = np.linalg.solve(b, a)
        out[done : done + m] = np.einsum("cij,cij->c", a, x)
        done += m
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--reps", type=int, default=100_000)
    parser.add_argument("--steps", type=int, default=1000)
    parser.add_argument("--max-dim", type=int, default=12)
    parser.add_argument("--seed", type=int, default=20231122)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    for case in ("rtrend", "constant"):
        print(f"{case.upper()} = {{")
        for n in range(1, args.max_dim + 1):
            t0 = time.time()
            draws = trace_draws(n, case, args.reps, args.steps, rng)
            q = np.quantile(draws, QUANTILES)
            print(
                f"    {n}: ({q[0]:.2f}, {q[1]:.2f}, {q[2]:.2f}),"
                f"  # mean {draws.mean():.3f}, {time.time() - t0:.0f}s",
                flush=True,
            )
        print("}")


if __name__ == "__main__":
    main()
