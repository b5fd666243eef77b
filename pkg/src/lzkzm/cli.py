"""``lzkzm`` command line: one subcommand per numerical experiment.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import contextlib
import math
import sys
import warnings

import numpy as np

from . import config as cfgmod
from . import io
from .aia import DEFAULT_ALPHA, FitError, classify, fit_alpha, freeze_out_time
from .config import ConfigError
from .ed import EDError, SpinChainSpec, kink_density, mode_sum_prediction, quench_evolve
from .fit import FitInputError, linear_fit, theory_slope
from .ising import FiniteSizeWarning, IsingQuenchSpec, RangePolicy, scaling_scan
from .lindblad import DECOHERENCE_PRESETS, DecoherenceParams, IntegrationError, final_states, integrate, state_at
from .lz import ChirpProtocol, LZParams, Prep, Scheme, mhz_to_rad_ns, p_plus_array
from .state import bloch_array

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


@contextlib.contextmanager
def _as_config_error():
    # domain constructors raise ValueError; at build time those are config errors
    try:
        yield
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _decoherence(cfg: dict) -> DecoherenceParams:
    name = str(cfg.get("decoherence", "none")).lower()
    if name not in DECOHERENCE_PRESETS:
        raise ConfigError(f"field 'decoherence': unknown preset {name!r}")
    base = DECOHERENCE_PRESETS[name]
    t1 = cfg.get("t1_ns", base.t1_ns)
    t2 = cfg.get("t2_ns", base.t2_ns)
    with _as_config_error():
        return DecoherenceParams.from_times(t1, t2)


def _protocol(cfg: dict, **over) -> ChirpProtocol:
    c = {**cfg, **over}
    with _as_config_error():
        params = LZParams.from_mhz(c["delta_mhz"], c["eps_i_mhz"], c["eps_f_mhz"], c["t_lz_ns"])
        return ChirpProtocol(params, Scheme(c["scheme"]), Prep(c["prep"]))


def _alpha(cfg: dict, scheme: Scheme) -> float:
    a = cfg.get("alpha", DEFAULT_ALPHA[scheme])
    if not a > 0:
        raise ConfigError("field 'alpha' must be positive")
    return a


def _grid(lo: float, hi: float, step: float, name: str) -> list[float]:
    if not step > 0 or hi < lo:
        raise ConfigError(f"field '{name}': need step > 0 and max >= min")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + i * step for i in range(n)]


def _require(cfg: dict, *keys: str) -> None:
    for k in keys:
        if k not in cfg:
            raise ConfigError(f"field {k!r} is required for this command")


# ---------------------------------------------------------------- lz-run

TRAJ_HEADER = ["t_ns", "rho00", "rho11", "re01", "im01", "sx", "sy", "sz",
               "theta", "p_plus", "purity", "t_over_that", "region"]


def _trajectory_rows(protocol: ChirpProtocol, cfg: dict, prefix=()):
    dec = _decoherence(cfg)
    tr = integrate(protocol, dec=dec, sample_every=cfg["sample_every_ns"])
    p = protocol.params
    cols = tr.columns()
    purity = tr.purity
    if p.v > 0:
        t_hat = freeze_out_time(p.delta, p.v, _alpha(cfg, protocol.scheme))
        t_cross = 0.0 if protocol.scheme is Scheme.B else -p.eps_i / p.v
        rel = tr.times - t_cross
        ratio = rel / t_hat
        region = [classify(float(t), t_hat, protocol.scheme).value for t in rel]
    else:
        t_hat = math.nan
        ratio = np.full(len(tr), math.nan)
        region = ["none"] * len(tr)
    rows = []
    for i in range(len(tr)):
        rows.append([*prefix, *(cols[k][i] for k in TRAJ_HEADER[:10]), purity[i], ratio[i], region[i]])
    return rows, t_hat, tr


def cmd_lz_run(cfg: dict, args) -> None:
    protocol = _protocol(cfg)
    rows, _, _ = _trajectory_rows(protocol, cfg)
    io.write_csv(args.out, TRAJ_HEADER, rows, "lz-run", cfg)


# ---------------------------------------------------------------- sweep

SWEEP_HEADER = ["eps_f_mhz", "t_lz_ns", "rho00", "rho11", "re01", "im01", "sx", "sy", "sz", "p_plus"]


def cmd_sweep(cfg: dict, args) -> None:
    _require(cfg, "eps_f_min_mhz", "eps_f_max_mhz", "eps_f_step_mhz", "t_lz_min_ns", "t_lz_max_ns", "t_lz_step_ns")
    eps_grid = _grid(cfg["eps_f_min_mhz"], cfg["eps_f_max_mhz"], cfg["eps_f_step_mhz"], "eps_f_step_mhz")
    t_grid = _grid(cfg["t_lz_min_ns"], cfg["t_lz_max_ns"], cfg["t_lz_step_ns"], "t_lz_step_ns")
    cells = [(e, t) for e in eps_grid for t in t_grid]
    protocols = [_protocol(cfg, eps_f_mhz=e, t_lz_ns=t) for e, t in cells]
    states = final_states(protocols, _decoherence(cfg))
    eps_f = np.array([p.params.eps_f for p in protocols])
    delta = np.array([p.params.delta for p in protocols])
    pp = p_plus_array(states, eps_f, delta)
    b = bloch_array(states)
    rows = [[e, t, *states[j], *b[j], pp[j]] for j, (e, t) in enumerate(cells)]
    io.write_csv(args.out, SWEEP_HEADER, rows, "sweep", cfg)


# ---------------------------------------------------------------- regions

def cmd_regions(cfg: dict, args) -> None:
    _require(cfg, "t_lz_list_ns")
    rows, t_hats = [], {}
    scheme = None
    for t_lz in cfg["t_lz_list_ns"]:
        protocol = _protocol(cfg, t_lz_ns=t_lz)
        scheme = protocol.scheme
        r, t_hat, _ = _trajectory_rows(protocol, cfg, prefix=(t_lz,))
        rows.extend(r)
        t_hats[repr(t_lz)] = t_hat
    io.write_csv(args.out, ["t_lz_ns", *TRAJ_HEADER], rows, "regions", cfg)

    summary: dict = {"t_hat_ns": t_hats, "alpha_used": _alpha(cfg, scheme)}
    if "alpha_fit_eps_f_mhz" in cfg and "alpha_fit_t_lz_ns" in cfg:
        protocols = [_protocol(cfg, eps_f_mhz=cfg["alpha_fit_eps_f_mhz"], t_lz_ns=t) for t in cfg["alpha_fit_t_lz_ns"]]
        states = final_states(protocols, _decoherence(cfg))
        p = protocols[0].params
        pp = p_plus_array(states, np.full(len(protocols), p.eps_f), p.delta)
        ratios = [q.params.delta ** 2 / q.params.v for q in protocols]
        fit = fit_alpha(zip(ratios, pp), scheme)
        summary["alpha_fit"] = {
            "alpha": fit.alpha, "sse": fit.sse, "iterations": fit.iterations,
            "samples": [{"t_lz_ns": t, "tau_q_over_tau_0": r, "p_plus": float(q)}
                        for t, r, q in zip(cfg["alpha_fit_t_lz_ns"], ratios, pp)],
        }
    dest = args.json_out or io.sidecar(args.out, "regions")
    if dest is not None:
        io.write_json(dest, summary, "regions", cfg)


# ---------------------------------------------------------------- freezeout

FREEZE_HEADER = ["t_lz_ns", "t_ns", "t_over_that", "sx", "sy", "sz", "region"]


def freeze_displacements(protocol: ChirpProtocol, dec: DecoherenceParams, alpha: float) -> dict:
    """Bloch displacement over the impulse window ``[0, t_hat]`` and over ``[t_hat, 2 t_hat]``."""
    p = protocol.params
    t_hat = freeze_out_time(p.delta, p.v, alpha)
    times = [0.0, t_hat, 2.0 * t_hat]
    bl = [np.array(_bloch(state_at(protocol, t, dec=dec))) if t <= p.t_lz else None for t in times]
    inside = float(np.linalg.norm(bl[1] - bl[0])) if bl[1] is not None else None
    after = float(np.linalg.norm(bl[2] - bl[1])) if bl[2] is not None else None
    return {"t_hat_ns": t_hat, "impulse_displacement": inside, "adiabatic_displacement": after,
            "frozen": None if after is None or inside is None else inside < after}


def _bloch(rho):
    return bloch_array(rho.as_array()[None, :])[0]


def cmd_freezeout(cfg: dict, args) -> None:
    _require(cfg, "t_lz_list_ns")
    rows, summary = [], {}
    dec = _decoherence(cfg)
    for t_lz in cfg["t_lz_list_ns"]:
        protocol = _protocol(cfg, t_lz_ns=t_lz)
        r, _, _ = _trajectory_rows(protocol, cfg, prefix=(t_lz,))
        idx = [0] + [TRAJ_HEADER.index(c) + 1 for c in ("t_ns", "t_over_that", "sx", "sy", "sz", "region")]
        rows.extend([row[i] for i in idx] for row in r)
        if protocol.params.v > 0:
            summary[repr(t_lz)] = freeze_displacements(protocol, dec, _alpha(cfg, protocol.scheme))
    io.write_csv(args.out, FREEZE_HEADER, rows, "freezeout", cfg)
    dest = args.json_out or io.sidecar(args.out, "freezeout")
    if dest is not None:
        io.write_json(dest, {"displacements": summary}, "freezeout", cfg)


# ---------------------------------------------------------------- kzm-scan

SCAN_HEADER = ["tau_q_i", "inv_sqrt_tau", "n_defects", "n_modes", "k_c_over_pi", "range_policy", "t1_ns", "t2_ns"]


def _fit_payload(points) -> dict:
    try:
        fit = linear_fit(points)
    except FitInputError as exc:
        return {"fit": None, "fit_error": str(exc)}
    return {"fit": fit.to_json(), "theory_slope": theory_slope()}


def cmd_kzm_scan(cfg: dict, args) -> None:
    _require(cfg, "tau_q_i", "k_c_over_pi", "n_k", "range_policy", "delta_ref_mhz")
    dec = _decoherence(cfg)
    with _as_config_error():
        policy = RangePolicy.parse(cfg["range_policy"])
        template = IsingQuenchSpec(
            cfg["tau_q_i"][0], cfg["k_c_over_pi"] * math.pi, cfg["n_k"], policy,
            mhz_to_rad_ns(cfg["delta_ref_mhz"]), Prep(cfg["prep"]),
        )
        for t in cfg["tau_q_i"]:
            template.with_tau(t)
        if cfg["workers"] < 1:
            raise ValueError("workers must be >= 1")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", FiniteSizeWarning)
        points = scaling_scan(cfg["tau_q_i"], template, dec, workers=cfg["workers"], n_spins=cfg.get("n_spins"))
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    rows = [[pt.tau_q_i, pt.x, pt.n_defects, template.n_k, cfg["k_c_over_pi"], policy.label(), dec.t1_ns, dec.t2_ns]
            for pt in points]
    io.write_csv(args.out, SCAN_HEADER, rows, "kzm-scan", cfg)
    dest = args.json_out or io.sidecar(args.out, "fit")
    if dest is not None:
        io.write_json(dest, _fit_payload([(pt.x, pt.n_defects) for pt in points]), "kzm-scan", cfg)


# ---------------------------------------------------------------- fit

def cmd_fit(cfg: dict, args) -> None:
    if args.input is None:
        raise ConfigError("fit needs an input scan CSV")
    try:
        _, rows = io.read_csv(args.input)
        points = [(float(r["inv_sqrt_tau"]), float(r["n_defects"])) for r in rows]
    except OSError as exc:
        raise ConfigError(f"cannot read {args.input}: {exc}") from None
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"{args.input} is not a kzm-scan CSV ({exc})") from None
    fit = linear_fit(points)
    io.write_json(args.out, {"fit": fit.to_json(), "theory_slope": theory_slope(), "input": str(args.input)},
                  "fit", cfg)


# ---------------------------------------------------------------- ed-check

ED_HEADER = ["n_spins", "tau_q", "kink_density_ed", "kink_density_modesum", "rel_diff", "kink_density_modesum_exact"]


def cmd_ed_check(cfg: dict, args) -> None:
    _require(cfg, "ed_n_spins", "ed_tau_q", "g_start")
    with _as_config_error():
        specs = [SpinChainSpec(n, tau, cfg["g_start"]) for n in cfg["ed_n_spins"] for tau in cfg["ed_tau_q"]]
    rows = []
    for spec in specs:
        ed = kink_density(quench_evolve(spec))
        ms = mode_sum_prediction(spec)
        exact = mode_sum_prediction(spec, exact=True)
        rel = (ms - ed) / ed if ed != 0 else math.nan
        rows.append([spec.n_spins, spec.tau_q, ed, ms, rel, exact])
    io.write_csv(args.out, ED_HEADER, rows, "ed-check", cfg)


# ---------------------------------------------------------------- driver

COMMANDS = {
    "lz-run": (cmd_lz_run, "time-resolved trajectory of one chirp"),
    "sweep": (cmd_sweep, "final state over an eps_f x t_lz grid"),
    "regions": (cmd_regions, "trajectories for several durations plus the alpha fit"),
    "freezeout": (cmd_freezeout, "Bloch components around the freeze-out time"),
    "kzm-scan": (cmd_kzm_scan, "Ising defect density vs quench time, with linear fit"),
    "fit": (cmd_fit, "linear fit of an existing kzm-scan CSV"),
    "ed-check": (cmd_ed_check, "exact small-chain kink density vs the mode sum"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lzkzm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_, description=help_)
        sp.add_argument("--config", help="TOML config file")
        sp.add_argument("--preset", choices=sorted(cfgmod.PRESETS),
                        help=f"named parameter set (default: {cfgmod.DEFAULT_PRESET[name]})")
        sp.add_argument("--out", default="-", help="output path, '-' for stdout")
        if name in ("regions", "freezeout", "kzm-scan"):
            sp.add_argument("--json-out", help="summary JSON path (default: next to --out)")
        if name == "fit":
            sp.add_argument("input", nargs="?", help="kzm-scan CSV")
        for key, (_, h) in cfgmod.SCHEMA.items():
            sp.add_argument("--" + key.replace("_", "-"), dest=key, default=None, metavar="V", help=h)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    overrides = {k: getattr(args, k) for k in cfgmod.SCHEMA}
    preset = args.preset or cfgmod.DEFAULT_PRESET[args.command]
    try:
        cfg = cfgmod.resolve(preset, args.config, overrides)
        COMMANDS[args.command][0](cfg, args)
    except ConfigError as exc:
        print(f"lzkzm {args.command}: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IntegrationError, EDError, FitError, FitInputError, FloatingPointError) as exc:
        print(f"lzkzm {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
