"""Numba-compiled rollout kernels (hot inner loops).

Both backends expose the same two functions with identical semantics;
see `_kernels_numpy` for the pure-NumPy fallback. Divergence is reported
as the lowest trajectory index whose state norm exceeds the guard, along
with the step at which that happened.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def truncated_cost_batch(M, S, x0, tau, norm_limit_sq):
    """Accumulate sum_{t<tau} x_t' S_i x_t along x_{t+1} = M_i x_t for each lane i.

    M, S: (B, n, n); x0: (B, n). Returns (costs, div_traj, div_step) where
    div_traj is -1 when every lane stayed within the norm guard.
    """
    nb = M.shape[0]
    n = M.shape[1]
    costs = np.zeros(nb)
    x = np.empty(n)
    y = np.empty(n)
    for i in range(nb):
        for a in range(n):
            x[a] = x0[i, a]
        c = 0.0
        for t in range(tau):
            acc = 0.0
            for a in range(n):
                row = 0.0
                for b in range(n):
                    row += S[i, a, b] * x[b]
                acc += x[a] * row
            c += acc
            nrm = 0.0
            for a in range(n):
                row = 0.0
                for b in range(n):
                    row += M[i, a, b] * x[b]
                y[a] = row
                nrm += row * row
            for a in range(n):
                x[a] = y[a]
            if not nrm <= norm_limit_sq:
                return costs, i, t + 1
        costs[i] = c
    return costs, -1, -1


@njit(cache=True, nogil=True)
def rollout_states(M, x0, horizon, norm_limit_sq):
    """States x_0..x_{horizon-1} of x_{t+1} = M x_t. Returns (states, div_step)."""
    n = M.shape[0]
    states = np.zeros((horizon, n))
    x = x0.copy()
    for a in range(n):
        states[0, a] = x[a]
    for t in range(horizon - 1):
        nrm = 0.0
        y = np.empty(n)
        for a in range(n):
            row = 0.0
            for b in range(n):
                row += M[a, b] * x[b]
            y[a] = row
            nrm += row * row
        x = y
        if not nrm <= norm_limit_sq:
            return states, t + 1
        for a in range(n):
            states[t + 1, a] = x[a]
    return states, -1
