"""Hidden true system, damped rollouts, and initial-state sampling.

The `Plant` holds the ground-truth matrices (A, B, C). Everything the
learner is allowed to touch goes through `RolloutInterface`, which only
returns rollout costs and initial states, never the system matrices.

Rollouts realize the discounted cost through the damped dynamics

    x~_{t+1} = sqrt(gamma) * (A x~_t + B u_t),   u_t = -K C x~_t,

so signals stay bounded whenever sqrt(gamma)*rho(A - BKC) < 1 even for
an unstable open loop, and the undiscounted stage-cost sum along the
damped states equals the gamma-discounted cost of the true system.
"""

from dataclasses import dataclass, field

import numpy as np

from . import backend
from .errors import DimensionError, DivergenceError, DomainError
from .matops import as_matrix, as_vector

# Rollouts abort once the damped state norm passes this guard.
DIVERGENCE_LIMIT = 1e12

SAMPLER_KINDS = ("gaussian", "sphere-scaled", "rademacher")


@dataclass(frozen=True)
class Plant:
    """Ground-truth LTI system x_{t+1} = A x_t + B u_t, y_t = C x_t."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        a = as_matrix(self.A, "A")
        b = as_matrix(self.B, "B")
        c = as_matrix(self.C, "C")
        if a.shape[0] != a.shape[1]:
            raise DimensionError(f"A must be square, got {a.shape}")
        n = a.shape[0]
        if b.shape[0] != n:
            raise DimensionError(f"B must have {n} rows, got {b.shape}")
        if c.shape[1] != n:
            raise DimensionError(f"C must have {n} columns, got {c.shape}")
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "B", b)
        object.__setattr__(self, "C", c)

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def m(self):
        return self.B.shape[1]

    @property
    def p(self):
        return self.C.shape[0]

    def closed_loop(self, k):
        """A - B K C for a policy K (ground-truth side only)."""
        k = _check_policy(k, self.m, self.p)
        return self.A - self.B @ k @ self.C


@dataclass(frozen=True)
class Trajectory:
    """One damped rollout: states (T,n), outputs (T,p), inputs (T,m)."""

    states: np.ndarray
    outputs: np.ndarray
    inputs: np.ndarray
    horizon: int


@dataclass(frozen=True)
class InitStateSampler:
    """Zero-mean identity-covariance initial states.

    `gaussian` draws standard normals; `d` is then only the soft bound used
    in the theory formulas. `sphere-scaled` draws uniformly from the radius
    sqrt(n) sphere and `rademacher` draws +-1 entries; both have identity
    covariance and satisfy the hard bound ||x0|| = sqrt(n) <= d.
    """

    kind: str
    dim: int
    d: float = field(default=0.0)

    def __post_init__(self):
        if self.kind not in SAMPLER_KINDS:
            raise DomainError(f"sampler kind must be one of {SAMPLER_KINDS}, got {self.kind!r}")
        if self.dim < 1:
            raise DimensionError("sampler dimension must be >= 1")
        d = float(self.d) if self.d else float(np.sqrt(self.dim))
        if d <= 0:
            raise DomainError("norm bound d must be positive")
        if self.kind != "gaussian" and d < np.sqrt(self.dim) - 1e-12:
            raise DomainError(
                f"{self.kind} sampler needs d >= sqrt(n) = {np.sqrt(self.dim):.4f} "
                "to keep identity covariance within the norm bound")
        object.__setattr__(self, "d", d)

    def sample_batch(self, rng, count):
        if self.kind == "gaussian":
            return rng.standard_normal((count, self.dim))
        if self.kind == "rademacher":
            return rng.integers(0, 2, size=(count, self.dim)).astype(np.float64) * 2.0 - 1.0
        g = rng.standard_normal((count, self.dim))
        norms = np.sqrt(np.einsum("bi,bi->b", g, g))
        return np.sqrt(self.dim) * g / norms[:, None]


def sample_initial_state(sampler, seed):
    """One initial state, deterministic in (sampler, seed)."""
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    return sampler.sample_batch(rng, 1)[0]


def _check_policy(k, m, p):
    k = as_matrix(k, "K")
    if k.shape != (m, p):
        raise DimensionError(f"K must have shape ({m}, {p}), got {k.shape}")
    return k


def _check_stage_cost(q, r, n, m):
    q = as_matrix(q, "Q")
    r = as_matrix(r, "R")
    if q.shape != (n, n):
        raise DimensionError(f"Q must have shape ({n}, {n}), got {q.shape}")
    if r.shape != (m, m):
        raise DimensionError(f"R must have shape ({m}, {m}), got {r.shape}")
    return q, r


def rollout_damped(plant, k, gamma, x0, horizon):
    """Simulate the damped closed loop; returns the full Trajectory.

    No stability is required: an unstable rollout is returned as long as it
    stays inside the floating guard, otherwise DivergenceError carries the
    step index.
    """
    if horizon < 1:
        raise DimensionError("horizon must be >= 1")
    if not 0.0 < gamma <= 1.0:
        raise DomainError(f"gamma must lie in (0, 1], got {gamma}")
    k = _check_policy(k, plant.m, plant.p)
    x0 = as_vector(x0, plant.n, "x0")
    m_cl = np.sqrt(gamma) * (plant.A - plant.B @ k @ plant.C)
    states, div_step = backend.kernels().rollout_states(
        m_cl, x0, int(horizon), DIVERGENCE_LIMIT ** 2)
    if div_step >= 0:
        raise DivergenceError(
            f"damped state norm exceeded {DIVERGENCE_LIMIT:.0e} at step {div_step}",
            step=int(div_step))
    outputs = states @ plant.C.T
    inputs = -(outputs @ k.T)
    return Trajectory(states=states, outputs=outputs, inputs=inputs, horizon=int(horizon))


def _batch_cost_arrays(plant, ks, gamma, q, r):
    """Damped closed-loop and stage-cost matrices for a batch of policies."""
    kc = np.einsum("bmp,pj->bmj", ks, plant.C)
    m_cl = np.sqrt(gamma) * (plant.A[None, :, :] - np.einsum("im,bmj->bij", plant.B, kc))
    s = q[None, :, :] + np.einsum("bmi,mq,bqj->bij", kc, r, kc)
    return np.ascontiguousarray(m_cl), np.ascontiguousarray(s)


def truncated_cost_batch(plant, ks, gamma, x0s, q, r, tau):
    """Truncated damped costs for a batch of policies and initial states."""
    if tau < 1:
        raise DimensionError("tau must be >= 1")
    ks = np.asarray(ks, dtype=np.float64)
    if ks.ndim != 3 or ks.shape[1:] != (plant.m, plant.p):
        raise DimensionError(
            f"policy batch must have shape (B, {plant.m}, {plant.p}), got {ks.shape}")
    x0s = np.ascontiguousarray(np.asarray(x0s, dtype=np.float64))
    if x0s.shape != (ks.shape[0], plant.n):
        raise DimensionError(
            f"x0 batch must have shape ({ks.shape[0]}, {plant.n}), got {x0s.shape}")
    q, r = _check_stage_cost(q, r, plant.n, plant.m)
    m_cl, s = _batch_cost_arrays(plant, ks, gamma, q, r)
    costs, div_traj, div_step = backend.kernels().truncated_cost_batch(
        m_cl, s, x0s, int(tau), DIVERGENCE_LIMIT ** 2)
    if div_traj >= 0:
        raise DivergenceError(
            f"rollout {div_traj} exceeded the divergence guard at step {div_step}",
            step=int(div_step), trajectory=int(div_traj))
    if not np.all(np.isfinite(costs)):
        bad = int(np.nonzero(~np.isfinite(costs))[0][0])
        raise DivergenceError(f"rollout {bad} produced a non-finite cost", trajectory=bad)
    return costs


def truncated_cost(plant, k, gamma, x0, q, r, tau):
    """sum_{t<tau} x~_t' (Q + C'K'RKC) x~_t along one damped rollout."""
    k = _check_policy(k, plant.m, plant.p)
    x0 = as_vector(x0, plant.n, "x0")
    costs = truncated_cost_batch(plant, k[None, :, :], gamma, x0[None, :], q, r, tau)
    return float(costs[0])


class RolloutInterface:
    """The learner-facing view of the system: costs from rollouts, nothing else.

    Bundles the hidden plant with an initial-state sampler and the stage-cost
    matrices. Deliberately exposes only input/output dimensions, sampled
    initial states, and truncated rollout costs, preserving the model-free
    contract (A, B, C stay hidden).
    """

    def __init__(self, plant, sampler, q, r):
        if sampler.dim != plant.n:
            raise DimensionError(
                f"sampler dimension {sampler.dim} does not match state dimension {plant.n}")
        q, r = _check_stage_cost(q, r, plant.n, plant.m)
        self._plant = plant
        self.sampler = sampler
        self.Q = q
        self.R = r

    @property
    def m(self):
        return self._plant.m

    @property
    def p(self):
        return self._plant.p

    def sample_x0_batch(self, rng, count):
        return self.sampler.sample_batch(rng, count)

    def truncated_costs(self, ks, gamma, x0s, tau):
        return truncated_cost_batch(self._plant, ks, gamma, x0s, self.Q, self.R, tau)
