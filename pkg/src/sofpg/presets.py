"""Benchmark systems and their experiment settings.

Two presets reproduce the evaluation setups: a 4-state open-loop-unstable
numerical system (rho(A) ~= 6.41) and a linearized, ZOH-discretized
cart-pole (rho(A) ~= 1.37), both with single-input two-output SOF.
"""

import numpy as np

from .errors import ConfigError
from .estimator import CostEstConfig, GradEstConfig
from .oracle import CostParams
from .plant import InitStateSampler, Plant
from .stabilizer import StabilizerConfig

PRESET_NAMES = ("numerical-example", "cart-pole")


def numerical_example():
    plant = Plant(
        A=np.array([[4.5, 2.8, 0.0, 0.0],
                    [3.0, 2.0, 0.0, 0.0],
                    [2.0, 0.0, 1.4, 0.0],
                    [1.5, 0.0, 2.0, 0.4]]),
        B=np.array([[2.0], [2.0], [1.0], [0.0]]),
        C=np.array([[1.0, 0.0, 0.3, 0.0],
                    [0.0, 1.0, 0.0, 0.0]]))
    cost = CostParams(Q=np.eye(4), R=np.eye(1),
                      l0=1.0, l1=1.0, psi=3.0, phi=1.05, d=2.0)
    sampler = InitStateSampler(kind="gaussian", dim=4, d=2.0)
    stab = StabilizerConfig(
        gamma0=1e-2, zeta=0.9, eps=1.0, eta=1e-3,
        inner_cfg=GradEstConfig(r=1e-3, tau_e=100, ne=60),
        cost_cfg=CostEstConfig(tau=100, n=20))
    return plant, cost, sampler, stab


def cart_pole():
    plant = Plant(
        A=np.array([[1.0, 0.02, 0.1, 0.0],
                    [0.0, 1.05, 0.0, 0.1],
                    [0.0, 0.41, 1.0, 0.02],
                    [0.0, 1.02, 0.0, 1.05]]),
        B=np.array([[0.01], [0.02], [0.2], [0.41]]),
        C=np.array([[1.0, 0.0, 2.0, 1.0],
                    [0.0, 2.0, 1.0, 2.0]]))
    cost = CostParams(Q=2.0 * np.eye(4), R=np.eye(1),
                      l0=1.0, l1=2.0, psi=1.0, phi=3.5, d=2.0)
    sampler = InitStateSampler(kind="gaussian", dim=4, d=2.0)
    stab = StabilizerConfig(
        gamma0=0.1, zeta=0.8, eps=1.0, eta=1e-3,
        inner_cfg=GradEstConfig(r=1e-2, tau_e=100, ne=40),
        cost_cfg=CostEstConfig(tau=100, n=20))
    return plant, cost, sampler, stab


def load_preset(name):
    if name == "numerical-example":
        return numerical_example()
    if name == "cart-pole":
        return cart_pole()
    raise ConfigError(f"unknown preset {name!r}; choose from {PRESET_NAMES}")
