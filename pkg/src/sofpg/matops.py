"""Dense-matrix kernel: validation, spectral radius, discounted Lyapunov solvers.

Conventions: matrices are 2-D float64 ndarrays, finite on entry. The two
Lyapunov solvers handle the damped fixed points

    P = S + gamma * Acl' P Acl        (state-cost form)
    Sigma = I + gamma * Acl Sigma Acl'  (covariance form)

via a doubling fixed-point iteration on sqrt(gamma)*Acl, which needs no
eigen-decomposition and converges geometrically whenever the damped loop
is stable.
"""

import numpy as np

from .errors import DimensionError, InstabilityError, NumericalError

# Doubling stops once this many series terms are covered (spec'd budget).
_MAX_TERMS = 10_000
_CONVERGENCE_RTOL = 1e-12
_RESIDUAL_RTOL = 1e-9


def as_matrix(x, name="matrix"):
    """Validate and return a 2-D finite float64 array with positive dims."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionError(f"{name} must have at least one row and column")
    if not np.all(np.isfinite(arr)):
        raise DimensionError(f"{name} contains non-finite entries")
    return arr


def as_square(x, name="matrix"):
    arr = as_matrix(x, name)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {arr.shape}")
    return arr


def as_vector(x, dim=None, name="vector"):
    arr = np.asarray(x, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise DimensionError(f"{name} contains non-finite entries")
    if dim is not None and arr.shape[0] != dim:
        raise DimensionError(f"{name} must have length {dim}, got {arr.shape[0]}")
    return arr


def symmetrize(x):
    return 0.5 * (x + x.T)


def spectral_radius(m):
    """Largest eigenvalue modulus of a square matrix."""
    arr = as_square(m, "spectral_radius input")
    try:
        eig = np.linalg.eigvals(arr)
    except np.linalg.LinAlgError as exc:  # QR iteration failed to converge
        raise NumericalError(f"eigenvalue iteration did not converge: {exc}",
                             iterations=30 * arr.shape[0]) from exc
    return float(np.max(np.abs(eig)))


def _check_gamma(gamma):
    if not (0.0 < gamma <= 1.0) or not np.isfinite(gamma):
        raise DimensionError(f"gamma must lie in (0, 1], got {gamma}")


def _dlyap_series(m, s):
    """Fixed point of P = S + M' P M by doubling: P_k covers 2^k series terms."""
    p = s.copy()
    mk = m.copy()
    terms = 1
    while terms < _MAX_TERMS:
        p_next = p + mk.T @ p @ mk
        change = np.linalg.norm(p_next - p, "fro")
        p = p_next
        terms *= 2
        if change <= _CONVERGENCE_RTOL * np.linalg.norm(p, "fro"):
            break
        mk = mk @ mk
    p = symmetrize(p)
    residual = np.linalg.norm(p - s - m.T @ p @ m, "fro")
    if residual > _RESIDUAL_RTOL * np.linalg.norm(p, "fro"):
        raise NumericalError(
            f"Lyapunov iteration residual {residual:.3e} above tolerance "
            f"after {terms} series terms", iterations=terms)
    return p


def solve_dlyap_P(acl, s, gamma):
    """Solve P = S + gamma * Acl' P Acl for the damped-stable closed loop."""
    acl = as_square(acl, "Acl")
    s = as_square(s, "S")
    if s.shape != acl.shape:
        raise DimensionError(f"S shape {s.shape} does not match Acl {acl.shape}")
    _check_gamma(gamma)
    m = np.sqrt(gamma) * acl
    margin = np.sqrt(gamma) * spectral_radius(acl)
    if margin >= 1.0:
        raise InstabilityError(
            f"sqrt(gamma)*rho(Acl) = {margin:.6f} >= 1: Lyapunov solution does not exist")
    return _dlyap_series(m, symmetrize(s))


def solve_dlyap_Sigma(acl, gamma):
    """Solve Sigma = I + gamma * Acl Sigma Acl' for the damped-stable closed loop."""
    acl = as_square(acl, "Acl")
    _check_gamma(gamma)
    m = np.sqrt(gamma) * acl
    margin = np.sqrt(gamma) * spectral_radius(acl)
    if margin >= 1.0:
        raise InstabilityError(
            f"sqrt(gamma)*rho(Acl) = {margin:.6f} >= 1: Lyapunov solution does not exist")
    return _dlyap_series(m.T, np.eye(acl.shape[0]))
