"""Outer learning driver: PG inner loop, discount annealing, trace accounting.

The driver alternates a zeroth-order policy-gradient inner loop (run until
the estimated gradient norm drops to 2*eps/3) with a multiplicative update
of the discount factor driven by the empirical cost, and stops once the
discount reaches 1. Every rollout consumed by either estimator is counted
into the trace.

Seeds: each estimate draws a fresh stream derived from (run seed, kind, k, j)
so no randomness is ever reused across estimates.
"""

import csv
import io
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import DivergenceError, DomainError
from .estimator import (CostEstConfig, GradEstConfig, estimate_cost,
                        estimate_gradient)
from .oracle import nu_next, theory_constants

TRACE_HEADER = ("outer_k", "inner_j", "gamma", "grad_norm_est", "cost_est",
                "traj_cum", "true_cost", "true_rho")

STATUS_STABILIZED = "stabilized"
STATUS_MAX_ITERATIONS = "max_iterations"
STATUS_DIVERGED = "diverged"

_KIND_GRAD, _KIND_COST, _KIND_NU0 = 0, 1, 2


@dataclass(frozen=True)
class StabilizerConfig:
    """Everything one learning run needs besides the rollout interface."""

    gamma0: float
    zeta: float
    eps: float
    eta: object                      # positive float, or "auto" for the schedule rule
    inner_cfg: GradEstConfig
    cost_cfg: CostEstConfig
    max_inner: int = 100_000
    max_outer: int = 10_000
    seed: int = 0
    k0: Optional[np.ndarray] = None  # warm start; default is the zero policy
    cost_params: object = None       # CostParams, required only for eta="auto"

    def __post_init__(self):
        if not 0.0 < self.gamma0 < 1.0:
            raise DomainError(f"gamma0 must lie in (0, 1), got {self.gamma0}")
        if not 0.0 < self.zeta < 1.0:
            raise DomainError(f"zeta must lie in (0, 1), got {self.zeta}")
        if self.eps <= 0:
            raise DomainError("eps must be positive")
        if self.eta != "auto" and not float(self.eta) > 0:
            raise DomainError("eta must be positive or 'auto'")
        if self.eta == "auto" and self.cost_params is None:
            raise DomainError("eta='auto' needs cost_params for the theory constants")
        if self.max_inner < 1 or self.max_outer < 1:
            raise DomainError("max_inner and max_outer must be >= 1")


@dataclass
class RunTrace:
    """Per-estimate log; one row per estimator invocation plus a terminal row."""

    records: list = field(default_factory=list)

    def add(self, outer_k, inner_j, gamma, grad_norm_est, cost_est, traj_cum,
            true_cost=None, true_rho=None):
        self.records.append((outer_k, inner_j, gamma, grad_norm_est, cost_est,
                             traj_cum, true_cost, true_rho))

    def outer_records(self):
        """Rows written after each discount update (cost_est present)."""
        return [r for r in self.records if r[4] is not None]

    def terminal_record(self):
        return self.records[-1] if self.records else None

    def write_csv(self, fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_HEADER)
        for rec in self.records:
            writer.writerow(["" if v is None else repr(v) if isinstance(v, float) else v
                             for v in rec])

    def to_csv_string(self):
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


@dataclass(frozen=True)
class StabilizationResult:
    K_final: np.ndarray
    gamma_final: float
    outer_iterations: int
    total_trajectories: int
    trace: RunTrace
    status: str


def derive_seed(run_seed, kind, *tags):
    """Independent integer seed for one estimate, stable in (run_seed, kind, tags)."""
    ss = np.random.SeedSequence((int(run_seed), int(kind)) + tuple(int(t) for t in tags))
    return int(ss.generate_state(1, np.uint64)[0])


def update_discount(j_hat, gamma, zeta, l0):
    """Discount step: alpha = l0/(2*Jhat - l0), gamma' = (1 + zeta*alpha)*gamma."""
    if l0 <= 0:
        raise DomainError("l0 must be positive")
    if not 0.0 < zeta < 1.0:
        raise DomainError("zeta must lie in (0, 1)")
    if 2.0 * j_hat <= l0:
        raise DomainError(
            f"cost estimate {j_hat} is at or below l0/2 = {l0 / 2}: no admissible step")
    alpha = l0 / (2.0 * j_hat - l0)
    return alpha, (1.0 + zeta * alpha) * gamma


def pg_inner_loop(rollout, k_start, gamma, eta, eps, inner_cfg, max_inner,
                  trace=None, probe=None, outer_k=0, run_seed=None, traj_start=0,
                  gradient_override=None):
    """Run PG updates until the estimated gradient norm is <= 2*eps/3.

    Returns (K, inner_count, trace, status) with status "converged" or
    "budget" (budget: max_inner updates were spent without meeting the stop
    rule; the last iterate is returned). Rollout divergence propagates as
    DivergenceError. `gradient_override` is a test hook that replaces the
    two-point estimator with an externally supplied gradient (NOT model-free);
    it consumes no trajectories.
    """
    k = np.array(k_start, dtype=np.float64)
    traj = traj_start
    if trace is None:
        trace = RunTrace()
    j = 0
    while True:
        seed = inner_cfg.seed if run_seed is None else derive_seed(run_seed, _KIND_GRAD, outer_k, j)
        if gradient_override is not None:
            matrix = np.asarray(gradient_override(k, gamma, seed), dtype=np.float64)
            norm, used = float(np.linalg.norm(matrix)), 0
        else:
            est = estimate_gradient(rollout, k, gamma, replace(inner_cfg, seed=seed))
            matrix, norm, used = est.matrix, est.fro_norm, est.trajectories_used
        traj += used
        true_cost = true_rho = None
        if probe is not None:
            true_cost, true_rho = probe(k, gamma)
        trace.add(outer_k, j, gamma, norm, None, traj, true_cost, true_rho)
        if norm <= 2.0 * eps / 3.0:
            return k, j, trace, "converged"
        if j >= max_inner:
            return k, j, trace, "budget"
        k = k - eta * matrix
        j += 1


def estimate_nu0(rollout, gamma0, cfg):
    """Rollout estimate of the zero-policy cost at gamma0 (seeds nu_0)."""
    k0 = np.zeros((rollout.m, rollout.p))
    return estimate_cost(rollout, k0, gamma0, cfg)


def _auto_eta(cost_params, nu, m, p, eps):
    consts = theory_constants(cost_params, max(nu, cost_params.l0), m, p)
    return min(consts.D / (consts.G0 + eps), 1.0 / (2.0 * consts.L))


def learn_sof(rollout, cfg, l0, oracle_probe=None, oracle_gradient=None):
    """Full discount-annealed learning run starting from the zero policy.

    Alternates the PG inner loop with the discount update until gamma >= 1
    (status "stabilized"), an iteration budget is exhausted
    ("max_iterations"), or a rollout diverges ("diverged"). `oracle_probe`
    and `oracle_gradient` are white-box hooks for logging/tests and are NOT
    part of the model-free contract.
    """
    if l0 <= 0:
        raise DomainError("l0 must be positive")
    k = np.zeros((rollout.m, rollout.p)) if cfg.k0 is None else np.array(cfg.k0, float)
    gamma = float(cfg.gamma0)
    trace = RunTrace()
    traj = 0
    status = STATUS_MAX_ITERATIONS
    outer_done = 0
    nu_k = None
    if cfg.eta == "auto":
        nu_cfg = replace(cfg.cost_cfg, seed=derive_seed(cfg.seed, _KIND_NU0))
        nu_k = estimate_nu0(rollout, gamma, nu_cfg)
        traj += cfg.cost_cfg.n
    for outer_k in range(cfg.max_outer):
        eta_k = (_auto_eta(cfg.cost_params, nu_k, rollout.m, rollout.p, cfg.eps)
                 if cfg.eta == "auto" else float(cfg.eta))
        try:
            k, _, trace, inner_status = pg_inner_loop(
                rollout, k, gamma, eta_k, cfg.eps, cfg.inner_cfg, cfg.max_inner,
                trace=trace, probe=oracle_probe, outer_k=outer_k,
                run_seed=cfg.seed, traj_start=traj, gradient_override=oracle_gradient)
        except DivergenceError:
            status = STATUS_DIVERGED
            outer_done = outer_k
            break
        traj = trace.records[-1][5]
        if inner_status == "budget":
            status = STATUS_MAX_ITERATIONS
            outer_done = outer_k
            break
        cost_cfg = replace(cfg.cost_cfg, seed=derive_seed(cfg.seed, _KIND_COST, outer_k))
        try:
            j_hat = estimate_cost(rollout, k, gamma, cost_cfg)
        except DivergenceError:
            status = STATUS_DIVERGED
            outer_done = outer_k
            break
        traj += cfg.cost_cfg.n
        true_cost = true_rho = None
        if oracle_probe is not None:
            true_cost, true_rho = oracle_probe(k, gamma)
        trace.add(outer_k, None, gamma, None, j_hat, traj, true_cost, true_rho)
        _, gamma_next = update_discount(j_hat, gamma, cfg.zeta, l0)
        if cfg.eta == "auto":
            nu_k = nu_next(j_hat, cfg.zeta, l0)
        outer_done = outer_k + 1
        gamma = gamma_next
        if gamma >= 1.0:
            status = STATUS_STABILIZED
            break
    true_cost = true_rho = None
    if oracle_probe is not None:
        true_cost, true_rho = oracle_probe(k, gamma)
    trace.add(outer_done, None, gamma, None, None, traj, true_cost, true_rho)
    return StabilizationResult(K_final=k, gamma_final=gamma,
                               outer_iterations=outer_done,
                               total_trajectories=traj, trace=trace, status=status)
