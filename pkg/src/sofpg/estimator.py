"""Model-free measurement layer: empirical cost and two-point gradient estimation.

Both estimators consume only the learner-facing rollout interface. The
two-point estimator follows the standard recipe: unit-Frobenius random
directions U_i, a fresh initial state per pair shared by the +/- rollouts
(common random numbers), and the scale m*p/(2 r Ne) on the averaged
cost differences.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DivergenceError, DomainError


@dataclass(frozen=True)
class GradEstConfig:
    """Two-point estimator knobs: smoothing radius, horizon, pair count, seed."""

    r: float
    tau_e: int
    ne: int
    seed: int = 0

    def __post_init__(self):
        if self.r <= 0:
            raise DomainError("smoothing radius r must be positive")
        if self.tau_e < 1 or self.ne < 1:
            raise DomainError("tau_e and ne must be >= 1")


@dataclass(frozen=True)
class CostEstConfig:
    """Empirical cost knobs: truncation horizon, trajectory count, seed."""

    tau: int
    n: int
    seed: int = 0

    def __post_init__(self):
        if self.tau < 1 or self.n < 1:
            raise DomainError("tau and n must be >= 1")


@dataclass(frozen=True)
class GradEstimate:
    matrix: np.ndarray
    fro_norm: float
    trajectories_used: int


def sample_perturbation(m, p, seed, index):
    """Unit-Frobenius perturbation direction, deterministic in (seed, index)."""
    if m < 1 or p < 1:
        raise DimensionError("m and p must be >= 1")
    rng = np.random.default_rng(np.random.SeedSequence((seed, index)))
    u = rng.standard_normal((m, p))
    return u / np.linalg.norm(u)


def _unit_directions(rng, count, m, p):
    u = rng.standard_normal((count, m, p))
    norms = np.sqrt(np.einsum("bij,bij->b", u, u))
    return u / norms[:, None, None]


def estimate_cost(rollout, k, gamma, cfg):
    """Average of cfg.n truncated damped costs from fresh initial states."""
    k = np.asarray(k, dtype=np.float64)
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed))
    x0s = rollout.sample_x0_batch(rng, cfg.n)
    ks = np.broadcast_to(k, (cfg.n,) + k.shape)
    costs = rollout.truncated_costs(ks, gamma, x0s, cfg.tau)
    return float(costs.mean())


def estimate_gradient(rollout, k, gamma, cfg):
    """Two-point zeroth-order gradient estimate from 2*Ne damped rollouts.

    Pair i perturbs the policy to K + r U_i and K - r U_i and rolls both out
    from the same initial state; the estimate is
    (m p / (2 r Ne)) * sum_i (J+_i - J-_i) U_i.
    """
    m, p = rollout.m, rollout.p
    k = np.asarray(k, dtype=np.float64)
    if k.shape != (m, p):
        raise DimensionError(f"K must have shape ({m}, {p}), got {k.shape}")
    ss = np.random.SeedSequence(cfg.seed)
    rng_u, rng_x = (np.random.default_rng(child) for child in ss.spawn(2))
    us = _unit_directions(rng_u, cfg.ne, m, p)
    x0s = rollout.sample_x0_batch(rng_x, cfg.ne)

    # Interleave +/- so pair i occupies rows 2i, 2i+1 with a shared x0.
    ks = np.empty((2 * cfg.ne, m, p))
    ks[0::2] = k[None] + cfg.r * us
    ks[1::2] = k[None] - cfg.r * us
    x0_pairs = np.repeat(x0s, 2, axis=0)
    try:
        costs = rollout.truncated_costs(ks, gamma, x0_pairs, cfg.tau_e)
    except DivergenceError as exc:
        pair = None if exc.trajectory is None else exc.trajectory // 2
        sign = None if exc.trajectory is None else (1 if exc.trajectory % 2 == 0 else -1)
        raise DivergenceError(
            f"perturbed rollout diverged (pair {pair}, sign {sign:+d}, step {exc.step})",
            step=exc.step, trajectory=pair, sign=sign) from exc

    diffs = costs[0::2] - costs[1::2]
    matrix = (m * p / (2.0 * cfg.r * cfg.ne)) * np.tensordot(diffs, us, axes=([0], [0]))
    return GradEstimate(matrix=matrix,
                        fro_norm=float(np.linalg.norm(matrix)),
                        trajectories_used=2 * cfg.ne)
