"""White-box ground truth: exact costs/gradients, stability constants, schedules.

Everything here reads the hidden system matrices and is therefore NOT
model-free. It exists for verification, tests, and for computing the
theory-prescribed parameter schedules; the learner's update path never
calls into this module.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError, InstabilityError, NumericalError
from .matops import (as_matrix, solve_dlyap_P, solve_dlyap_Sigma,
                     spectral_radius, symmetrize)


@dataclass(frozen=True)
class CostParams:
    """Stage-cost matrices and the known bounds (l0, l1, psi, phi, d).

    l0*I <= Q, R <= l1*I must hold; psi and phi bound ||B|| and ||C|| of the
    (possibly unknown) plant; d bounds the initial-state norm.
    """

    Q: np.ndarray
    R: np.ndarray
    l0: float
    l1: float
    psi: float
    phi: float
    d: float

    def __post_init__(self):
        q = symmetrize(as_matrix(self.Q, "Q"))
        r = symmetrize(as_matrix(self.R, "R"))
        if q.shape[0] != q.shape[1] or r.shape[0] != r.shape[1]:
            raise DimensionError("Q and R must be square")
        if not (0 < self.l0 <= self.l1):
            raise DomainError(f"need 0 < l0 <= l1, got l0={self.l0}, l1={self.l1}")
        slack = 1e-9
        for name, mat in (("Q", q), ("R", r)):
            eigs = np.linalg.eigvalsh(mat)
            if eigs.min() < self.l0 - slack or eigs.max() > self.l1 + slack:
                raise DomainError(
                    f"{name} eigenvalues [{eigs.min():.6g}, {eigs.max():.6g}] violate "
                    f"l0={self.l0}, l1={self.l1}")
        if self.psi < 1 or self.phi < 1:
            raise DomainError("psi and phi must be >= 1")
        if self.d <= 0:
            raise DomainError("d must be positive")
        object.__setattr__(self, "Q", q)
        object.__setattr__(self, "R", r)


@dataclass(frozen=True)
class LyapunovSolution:
    """Exact P, Sigma, E, cost and gradient for one (K, gamma) pair."""

    P: np.ndarray
    Sigma: np.ndarray
    E: np.ndarray
    cost: float
    grad: np.ndarray


@dataclass(frozen=True)
class TheoryConstants:
    """Strong-stability and smoothness constants on the nu-sublevel set."""

    nu: float
    kappa: float
    varrho: float
    D: float
    G: float
    L: float
    G0: float


@dataclass(frozen=True)
class ScheduleReport:
    """Theory-prescribed parameters (counts rounded up to integers)."""

    tau_e: int
    ne: int
    r: float
    eta: float
    tau: int
    n: int
    pg_iters: int
    k_prime: int
    nu: float


def exact_solution(plant, params, k, gamma):
    """Exact discounted cost and policy gradient via the Lyapunov equations.

    P and Sigma solve the damped fixed points; the gradient is
    2 * E Sigma C' with E = (R + gamma B'PB) K C - gamma B'P A.
    """
    q, r = params.Q, params.R
    if q.shape != (plant.n, plant.n) or r.shape != (plant.m, plant.m):
        raise DimensionError("cost matrices do not match the plant dimensions")
    k = as_matrix(k, "K")
    if k.shape != (plant.m, plant.p):
        raise DimensionError(f"K must have shape ({plant.m}, {plant.p}), got {k.shape}")
    acl = plant.closed_loop(k)
    kc = k @ plant.C
    s = q + kc.T @ r @ kc
    p_mat = solve_dlyap_P(acl, s, gamma)
    sigma = solve_dlyap_Sigma(acl, gamma)
    e_mat = (r + gamma * plant.B.T @ p_mat @ plant.B) @ kc - gamma * plant.B.T @ p_mat @ plant.A
    grad = 2.0 * e_mat @ sigma @ plant.C.T
    return LyapunovSolution(P=p_mat, Sigma=sigma, E=e_mat,
                            cost=float(np.trace(p_mat)), grad=grad)


def theory_constants(params, nu, m, p):
    """kappa, varrho, D, G, L, G0 for the nu-sublevel set (exact formulas)."""
    if nu < params.l0:
        raise DomainError(f"nu must be >= l0 = {params.l0}, got {nu}")
    if m < 1 or p < 1:
        raise DimensionError("m and p must be >= 1")
    kappa = math.sqrt(nu / params.l0)
    varrho = 1.0 / (2.0 * kappa ** 2)
    dd = 1.0 / (8.0 * kappa ** 3 * params.psi * params.phi)
    gg = 16.0 * kappa ** 9 * params.l1 * params.psi * params.phi
    root_mp = math.sqrt(min(m, p))
    ll = 104.0 * kappa ** 10 * params.l1 * params.psi ** 2 * params.phi * root_mp
    g0 = 2.0 * kappa ** 3 * params.phi * (params.l1 + params.psi * nu) * root_mp
    return TheoryConstants(nu=float(nu), kappa=kappa, varrho=varrho,
                           D=dd, G=gg, L=ll, G0=g0)


def schedule(params, constants, eps, delta0, delta1, zeta, m, p, j_bar, gamma0):
    """Theory-prescribed (tau_e, Ne, r, eta, tau, N, M, k') for one sublevel nu.

    All inequalities are met with equality or above; counts round up. These
    values certify the high-probability statements and are typically far
    larger than the practical overrides used in experiments.
    """
    if eps <= 0:
        raise DomainError("eps must be positive")
    if not 0 < delta0 < math.exp(-2) / 2:
        raise DomainError(f"delta0 must lie in (0, e^-2/2 ~= {math.exp(-2)/2:.4f})")
    if not 0 < delta1 < 1:
        raise DomainError("delta1 must lie in (0, 1)")
    if not 0 < zeta < 1:
        raise DomainError("zeta must lie in (0, 1)")
    if not 0 < gamma0 < 1:
        raise DomainError("gamma0 must lie in (0, 1)")
    if j_bar <= params.l0:
        raise DomainError(f"J_bar must exceed l0 = {params.l0}")
    nu, l0, d = constants.nu, params.l0, params.d
    r = min(constants.D, nu / constants.G, eps / (9.0 * constants.L))
    tau_e = _count((2.0 * nu / l0) * math.log(36.0 * d * d * nu * nu * m * p / (r * eps * l0)))
    ne = _count(81.0 * (m * p * constants.G) ** 2 * (d * d + 1.0) ** 2
                / eps ** 2 * math.log(15.0 / delta0))
    eta = min(constants.D / (constants.G0 + eps), 1.0 / (2.0 * constants.L))
    tau = _count((2.0 * nu / l0) * math.log(nu * d * d / l0))
    n = _count(8.0 * d ** 4 * math.log(2.0 / delta1))
    pg_iters = _count(9.0 * nu / (eta * eps ** 2))
    k_prime = _count(math.log(1.0 / gamma0) / math.log1p(zeta * l0 / (3.0 * j_bar - l0)))
    return ScheduleReport(tau_e=tau_e, ne=ne, r=r, eta=eta, tau=tau, n=n,
                          pg_iters=pg_iters, k_prime=k_prime, nu=constants.nu)


def _count(x):
    """Round a lower-bound inequality up to a usable count (at least 1)."""
    return max(1, int(math.ceil(x)))


def nu_next(j_hat, zeta, l0):
    """Sublevel value for the next outer iteration: 8*Jhat^3 / ((1-zeta) l0^2)."""
    if not 0 < zeta < 1:
        raise DomainError("zeta must lie in (0, 1)")
    if j_hat < l0 / 2:
        raise DomainError(f"cost estimate {j_hat} below the admissible floor l0/2")
    return 8.0 * j_hat ** 3 / ((1.0 - zeta) * l0 ** 2)


def spectral_margin_bound(cost, l0):
    """Certified bound sqrt(gamma)*rho(A-BKC) <= sqrt(1 - l0/J_gamma(K))."""
    if cost < l0:
        raise DomainError(f"cost {cost} below l0 = {l0}; no margin certificate exists")
    return math.sqrt(1.0 - l0 / cost)


def true_closed_loop_radius(plant, k):
    """rho(A - BKC) of the undamped closed loop (ground truth)."""
    return spectral_radius(plant.closed_loop(k))


def make_trace_probe(plant, params):
    """Non-model-free probe for run traces: (K, gamma) -> (true cost or None, true rho).

    Reports J at min(gamma, 1); the cost is None when the damped loop is
    unstable there (the discounted cost is infinite) or the solver cannot
    reach tolerance at a near-unit stability margin.
    """
    def probe(k, gamma):
        g = min(float(gamma), 1.0)
        rho = true_closed_loop_radius(plant, k)
        if math.sqrt(g) * rho >= 1.0:
            return None, rho
        try:
            sol = exact_solution(plant, params, k, g)
        except (InstabilityError, NumericalError):
            return None, rho
        return sol.cost, rho
    return probe
