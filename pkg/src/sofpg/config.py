"""Experiment configuration files: INI sections with JSON-literal values.

Schema:

    [plant]        A, B, C as row-major nested lists (omit to use a preset)
    [cost]         Q, R, l0, l1, psi, phi, d
    [sampler]      kind (gaussian | sphere-scaled | rademacher)
    [stabilizer]   gamma0, zeta, eps, eta, tau_e, ne, r, tau, n, seed,
                   max_inner, max_outer
    [experiment]   preset, runs, oracle_logging

Values are JSON literals (numbers, nested lists, true/false, quoted
strings); `eta` additionally accepts the bare word auto. A config written
by `write_config` reads back to identical matrices (floats round-trip via
repr).
"""

import configparser
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError
from .estimator import CostEstConfig, GradEstConfig
from .oracle import CostParams
from .plant import InitStateSampler, Plant
from .presets import load_preset
from .stabilizer import StabilizerConfig


@dataclass
class ExperimentConfig:
    """One full experiment: system, cost, sampler, stabilizer, run settings."""

    plant: Plant
    cost: CostParams
    sampler: InitStateSampler
    stabilizer: StabilizerConfig
    runs: int = 1
    oracle_logging: bool = True
    plant_source: str = "config"
    output_dir: Optional[str] = None


def _parse_value(raw):
    raw = raw.strip()
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw  # bare strings like: auto, gaussian


def _section(parser, name):
    return dict(parser[name]) if parser.has_section(name) else {}


def _get(section, key, default=None, required=False):
    if key in section:
        return _parse_value(section[key])
    if required:
        raise ConfigError(f"missing required key {key!r}")
    return default


def read_config(path):
    """Load an ExperimentConfig from an INI file (preset fields fill gaps)."""
    parser = configparser.ConfigParser()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise exc
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc

    exp = _section(parser, "experiment")
    preset_name = _get(exp, "preset")
    if preset_name is not None:
        plant, cost, sampler, stab = load_preset(preset_name)
        source = f"preset:{preset_name}"
    else:
        plant = cost = sampler = stab = None
        source = str(path)

    pl = _section(parser, "plant")
    if pl:
        try:
            plant = Plant(A=np.array(_get(pl, "a", required=True), dtype=float),
                          B=np.array(_get(pl, "b", required=True), dtype=float),
                          C=np.array(_get(pl, "c", required=True), dtype=float))
        except ConfigError:
            raise
        except Exception as exc:
            raise ConfigError(f"bad [plant] section: {exc}") from exc
    if plant is None:
        raise ConfigError("config needs a [plant] section or an [experiment] preset")

    co = _section(parser, "cost")
    if co or cost is None:
        base = cost
        try:
            cost = CostParams(
                Q=np.array(_get(co, "q", base.Q.tolist() if base else None, required=base is None), dtype=float),
                R=np.array(_get(co, "r", base.R.tolist() if base else None, required=base is None), dtype=float),
                l0=float(_get(co, "l0", base.l0 if base else 1.0)),
                l1=float(_get(co, "l1", base.l1 if base else 1.0)),
                psi=float(_get(co, "psi", base.psi if base else 1.0)),
                phi=float(_get(co, "phi", base.phi if base else 1.0)),
                d=float(_get(co, "d", base.d if base else float(np.sqrt(plant.n)))))
        except ConfigError:
            raise
        except Exception as exc:
            raise ConfigError(f"bad [cost] section: {exc}") from exc

    sa = _section(parser, "sampler")
    kind = _get(sa, "kind", sampler.kind if sampler else "gaussian")
    sampler = InitStateSampler(kind=kind, dim=plant.n, d=cost.d)

    st = _section(parser, "stabilizer")
    base = stab
    try:
        inner = GradEstConfig(
            r=float(_get(st, "r", base.inner_cfg.r if base else None, required=base is None)),
            tau_e=int(_get(st, "tau_e", base.inner_cfg.tau_e if base else None, required=base is None)),
            ne=int(_get(st, "ne", base.inner_cfg.ne if base else None, required=base is None)))
        cost_cfg = CostEstConfig(
            tau=int(_get(st, "tau", base.cost_cfg.tau if base else None, required=base is None)),
            n=int(_get(st, "n", base.cost_cfg.n if base else None, required=base is None)))
        eta = _get(st, "eta", base.eta if base else None, required=base is None)
        stab = StabilizerConfig(
            gamma0=float(_get(st, "gamma0", base.gamma0 if base else None, required=base is None)),
            zeta=float(_get(st, "zeta", base.zeta if base else None, required=base is None)),
            eps=float(_get(st, "eps", base.eps if base else None, required=base is None)),
            eta=eta if eta == "auto" else float(eta),
            inner_cfg=inner, cost_cfg=cost_cfg,
            max_inner=int(_get(st, "max_inner", base.max_inner if base else 100_000)),
            max_outer=int(_get(st, "max_outer", base.max_outer if base else 10_000)),
            seed=int(_get(st, "seed", base.seed if base else 0)),
            cost_params=cost)
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"bad [stabilizer] section: {exc}") from exc

    return ExperimentConfig(
        plant=plant, cost=cost, sampler=sampler, stabilizer=stab,
        runs=int(_get(exp, "runs", 1)),
        oracle_logging=bool(_get(exp, "oracle_logging", True)),
        plant_source=source,
        output_dir=_get(exp, "output_dir"))


def write_config(cfg, path):
    """Write an ExperimentConfig so that read_config reproduces it exactly."""
    parser = configparser.ConfigParser()
    parser["plant"] = {
        "a": json.dumps(cfg.plant.A.tolist()),
        "b": json.dumps(cfg.plant.B.tolist()),
        "c": json.dumps(cfg.plant.C.tolist()),
    }
    parser["cost"] = {
        "q": json.dumps(cfg.cost.Q.tolist()),
        "r": json.dumps(cfg.cost.R.tolist()),
        "l0": json.dumps(cfg.cost.l0),
        "l1": json.dumps(cfg.cost.l1),
        "psi": json.dumps(cfg.cost.psi),
        "phi": json.dumps(cfg.cost.phi),
        "d": json.dumps(cfg.cost.d),
    }
    parser["sampler"] = {"kind": cfg.sampler.kind}
    st = cfg.stabilizer
    parser["stabilizer"] = {
        "gamma0": json.dumps(st.gamma0),
        "zeta": json.dumps(st.zeta),
        "eps": json.dumps(st.eps),
        "eta": "auto" if st.eta == "auto" else json.dumps(float(st.eta)),
        "r": json.dumps(st.inner_cfg.r),
        "tau_e": json.dumps(st.inner_cfg.tau_e),
        "ne": json.dumps(st.inner_cfg.ne),
        "tau": json.dumps(st.cost_cfg.tau),
        "n": json.dumps(st.cost_cfg.n),
        "seed": json.dumps(st.seed),
        "max_inner": json.dumps(st.max_inner),
        "max_outer": json.dumps(st.max_outer),
    }
    parser["experiment"] = {
        "runs": json.dumps(cfg.runs),
        "oracle_logging": json.dumps(cfg.oracle_logging),
    }
    with open(path, "w", encoding="utf-8") as fh:
        parser.write(fh)


def read_policy(path):
    """Read a policy matrix from a file holding one JSON nested list."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"policy file {path} is not a JSON matrix: {exc}") from exc
    arr = np.array(data, dtype=float)
    if arr.ndim != 2:
        raise ConfigError(f"policy in {path} must be a 2-D matrix, got shape {arr.shape}")
    return arr
