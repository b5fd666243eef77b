"""Run configuration: presets, TOML files and flag overrides (flags win).

All frequencies are ordinary frequencies in MHz (eps/2pi), times in ns.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Any, Callable

from ._toml import load_toml
from .ising import DEFAULT_TAU_GRID


class ConfigError(ValueError):
    pass


def _floats(v) -> list[float]:
    if isinstance(v, str):
        v = [s for s in v.replace(",", " ").split() if s]
    if isinstance(v, (int, float)):
        v = [v]
    return [float(x) for x in v]


def _ints(v) -> list[int]:
    out = []
    for x in _floats(v):
        if x != int(x):
            raise ValueError(f"{x!r} is not an integer")
        out.append(int(x))
    return out


def _optional_float(v):
    if v is None or (isinstance(v, str) and v.lower() in ("inf", "none", "")):
        return math.inf
    return float(v)


# field -> (parser, help)
SCHEMA: dict[str, tuple[Callable[[Any], Any], str]] = {
    "delta_mhz": (float, "gap delta/2pi in MHz"),
    "eps_i_mhz": (float, "initial diabatic energy eps_i/2pi in MHz"),
    "eps_f_mhz": (float, "final diabatic energy eps_f/2pi in MHz"),
    "t_lz_ns": (float, "chirp duration in ns"),
    "scheme": (lambda v: str(v).upper(), "A or B"),
    "prep": (str, "ground or diabatic"),
    "decoherence": (str, "none, q1 or q2 (t1_ns/t2_ns override it)"),
    "t1_ns": (_optional_float, "energy relaxation time T1 in ns (inf = none)"),
    "t2_ns": (_optional_float, "total decoherence time T2* in ns (inf = none)"),
    "sample_every_ns": (float, "trajectory sampling interval in ns"),
    "alpha": (float, "AIA constant; default pi/2 (A) or pi/4 (B)"),
    "eps_f_min_mhz": (float, "sweep: smallest eps_f/2pi"),
    "eps_f_max_mhz": (float, "sweep: largest eps_f/2pi"),
    "eps_f_step_mhz": (float, "sweep: eps_f spacing"),
    "t_lz_min_ns": (float, "sweep: shortest t_lz"),
    "t_lz_max_ns": (float, "sweep: longest t_lz"),
    "t_lz_step_ns": (float, "sweep: t_lz spacing"),
    "t_lz_list_ns": (_floats, "regions/freezeout: chirp durations"),
    "alpha_fit_eps_f_mhz": (float, "regions: eps_f/2pi of the alpha-fit runs"),
    "alpha_fit_t_lz_ns": (_floats, "regions: chirp durations of the alpha-fit runs"),
    "tau_q_i": (_floats, "kzm-scan: dimensionless quench times"),
    "k_c_over_pi": (float, "kzm-scan: momentum cutoff / pi"),
    "n_k": (int, "kzm-scan: number of modes"),
    "range_policy": (str, "kzm-scan: 'fixed:<eps_f/delta>' or 'cotk'"),
    "delta_ref_mhz": (float, "kzm-scan: physical gap used to embed modes"),
    "n_spins": (int, "kzm-scan: chain length for the finite-size check"),
    "workers": (int, "parallel worker processes"),
    "ed_n_spins": (_ints, "ed-check: chain lengths (even, <= 12)"),
    "ed_tau_q": (_floats, "ed-check: quench times"),
    "g_start": (float, "ed-check: initial transverse field"),
}

_BASE = {
    "delta_mhz": 20.0,
    "eps_i_mhz": -200.0,
    "eps_f_mhz": 200.0,
    "t_lz_ns": 20.0,
    "scheme": "A",
    "prep": "ground",
    "decoherence": "q2",
    "sample_every_ns": 0.1,
    "workers": 1,
}

PRESETS: dict[str, dict[str, Any]] = {
    "scheme-a-map": {
        "scheme": "A", "eps_i_mhz": -200.0,
        "eps_f_min_mhz": -200.0, "eps_f_max_mhz": 400.0, "eps_f_step_mhz": 10.0,
        "t_lz_min_ns": 1.0, "t_lz_max_ns": 120.0, "t_lz_step_ns": 1.0,
    },
    "scheme-a-regions": {
        "scheme": "A", "eps_i_mhz": -200.0, "eps_f_mhz": 200.0, "t_lz_ns": 20.0,
        "t_lz_list_ns": [10.0, 20.0, 40.0, 80.0],
    },
    "scheme-b-regions": {
        "scheme": "B", "eps_i_mhz": 0.0, "eps_f_mhz": 400.0, "t_lz_ns": 40.0,
        "t_lz_list_ns": [10.0, 20.0, 40.0, 80.0],
        "alpha_fit_eps_f_mhz": 200.0,
        "alpha_fit_t_lz_ns": [10.0 * i for i in range(1, 13)],
    },
    "freezeout": {
        "scheme": "B", "eps_i_mhz": 0.0, "eps_f_mhz": 400.0, "t_lz_ns": 40.0,
        "t_lz_list_ns": [10.0, 20.0, 30.0, 40.0],
        "sample_every_ns": 0.05,
    },
    "kzm-scan": {
        "decoherence": "none",
        "k_c_over_pi": 0.2, "n_k": 127, "range_policy": "fixed:10",
        "delta_ref_mhz": 20.0, "n_spins": 1000,
        "tau_q_i": list(DEFAULT_TAU_GRID),
    },
    "ed-check": {
        "ed_n_spins": [8], "ed_tau_q": [1.0, 2.0, 4.0, 8.0], "g_start": 10.0,
    },
}

DEFAULT_PRESET = {
    "lz-run": "scheme-b-regions",
    "sweep": "scheme-a-map",
    "regions": "scheme-b-regions",
    "freezeout": "freezeout",
    "kzm-scan": "kzm-scan",
    "ed-check": "ed-check",
    "fit": None,
}


def _coerce(key: str, value: Any) -> Any:
    if key not in SCHEMA:
        raise ConfigError(f"unknown config field {key!r}")
    parser = SCHEMA[key][0]
    try:
        return parser(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"field {key!r}: {exc}") from None


def _flatten(d: dict, out: dict | None = None) -> dict:
    # TOML tables are namespaces only; keys must be globally unique
    out = {} if out is None else out
    for k, v in d.items():
        if isinstance(v, dict):
            _flatten(v, out)
        else:
            out[k.replace("-", "_")] = v
    return out


def resolve(preset: str | None, file: str | Path | None = None, overrides: dict | None = None) -> dict:
    """Merge base defaults, a preset, a TOML file and flag overrides, in that order."""
    cfg = dict(_BASE)
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        cfg.update(PRESETS[preset])
    if file is not None:
        try:
            data = load_toml(file)
        except OSError as exc:
            raise ConfigError(f"cannot read config {file}: {exc}") from None
        except Exception as exc:  # tomli.TOMLDecodeError and friends
            raise ConfigError(f"cannot parse config {file}: {exc}") from None
        data = _flatten(data)
        if "preset" in data:
            name = data.pop("preset")
            if name not in PRESETS:
                raise ConfigError(f"unknown preset {name!r}")
            cfg.update(PRESETS[name])
        cfg.update(data)
    for k, v in (overrides or {}).items():
        if v is not None:
            cfg[k] = v
    return {k: _coerce(k, v) for k, v in cfg.items()}
