"""Pure-NumPy rollout kernels, vectorized across the batch dimension.

Semantics match `_kernels_numba` exactly: same costs for non-diverged
lanes and the same (lowest-index) divergence report. Lanes that trip the
norm guard are frozen at zero so they cannot poison the rest of the batch
with overflow.
"""

import numpy as np


def truncated_cost_batch(M, S, x0, tau, norm_limit_sq):
    nb = M.shape[0]
    x = x0.copy()
    costs = np.zeros(nb)
    div_step = np.full(nb, -1, dtype=np.int64)
    alive = np.ones(nb, dtype=bool)
    for t in range(tau):
        costs[alive] += np.einsum("bi,bij,bj->b", x[alive], S[alive], x[alive])
        x[alive] = np.einsum("bij,bj->bi", M[alive], x[alive])
        nrm = np.einsum("bi,bi->b", x, x)
        blown = alive & ~(nrm <= norm_limit_sq)
        if blown.any():
            div_step[blown] = t + 1
            alive &= ~blown
            x[blown] = 0.0
            if not alive.any():
                break
    diverged = np.nonzero(div_step >= 0)[0]
    if diverged.size:
        i = int(diverged[0])
        return costs, i, int(div_step[i])
    return costs, -1, -1


def rollout_states(M, x0, horizon, norm_limit_sq):
    n = M.shape[0]
    states = np.zeros((horizon, n))
    states[0] = x0
    x = x0.copy()
    for t in range(horizon - 1):
        x = M @ x
        if not (x @ x) <= norm_limit_sq:
            return states, t + 1
        states[t + 1] = x
    return states, -1
