"""Command-line interface: angle sweeps, oracle verification, single-channel bounds.

Exit codes: 0 on success, 2 on configuration errors, 3 on numerical domain
errors.
"""
from __future__ import annotations

import argparse
import sys

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from .channel import RelayChannel, Topology
from .linalg import NumericalDomainError
from .mc import EXPRESSIONS, estimate_mi_many
from .optimize import (OptimizerConfig, decode_profile, optimize_lower_bound,
                       optimize_strategy, optimize_upper_bound, profile_dim)
from .rates import (achievable_rate, mi_direct_given, mi_mac, mi_mac_given_v,
                    mi_relay_link_dpc, mi_relay_link_sc, mi_v_unconditional)
from .sweep import QUANTITIES, SweepConfig, emit, run_sweep


class ConfigError(Exception):
    pass


def _load_toml(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc


def _optimizer_from(data: dict, seed_override: int | None) -> OptimizerConfig:
    opt = data.get("optimizer", {})
    if not isinstance(opt, dict):
        raise ConfigError("[optimizer] must be a table")
    kwargs = {}
    for key in ("method", "budget", "restarts", "seed", "tol"):
        if key in opt:
            kwargs[key] = opt[key]
    if seed_override is not None:
        kwargs["seed"] = seed_override
    try:
        return OptimizerConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad optimizer settings: {exc}") from exc


def _sweep_config(path: str, seed_override: int | None,
                  out_override: str | None) -> SweepConfig:
    data = _load_toml(path)
    try:
        topology = Topology(kind=data.get("topology", "equidistant"),
                            base_gamma=float(data.get("base_gamma", 0.5)))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if "thetas" in data:
        thetas = tuple(float(t) for t in data["thetas"])
    else:
        points = int(data.get("theta_points", 17))
        if points < 1:
            raise ConfigError("theta_points must be >= 1")
        thetas = tuple(np.linspace(0.0, np.pi, points))
    quantities = tuple(data.get("quantities", list(QUANTITIES)))
    optimizer = _optimizer_from(data, seed_override)
    out = out_override or data.get("output", "sweep.csv")
    try:
        return SweepConfig(topology=topology, theta_grid=thetas,
                           h1_norm=float(data.get("h1_norm", 10.0)),
                           optimizer=optimizer, quantities=quantities,
                           output_path=out)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _channel_from(data: dict) -> RelayChannel:
    for key in ("H1", "H2", "H3"):
        if key not in data:
            raise ConfigError(f"missing channel matrix {key}")
    try:
        return RelayChannel(
            H1=np.array(data["H1"], dtype=float),
            H2=np.array(data["H2"], dtype=float),
            H3=np.array(data["H3"], dtype=float),
            gamma1=float(data.get("gamma1", 1.0)),
            gamma2=float(data.get("gamma2", 1.0)),
            gamma3=float(data.get("gamma3", 1.0)))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def cmd_sweep(args) -> int:
    cfg = _sweep_config(args.config, args.seed, args.out)
    result = run_sweep(cfg, jobs=args.jobs)
    files = emit(result, args.format, cfg.output_path)
    for f in files:
        print(f"wrote {f}")
    return 0


def cmd_verify(args) -> int:
    """MC-oracle agreement suite over random feasible profiles."""
    rng = np.random.default_rng(args.seed)
    closed_forms = {
        "relay_sc": mi_relay_link_sc,
        "mac": mi_mac,
        "direct_given": mi_direct_given,
        "v_unconditional": mi_v_unconditional,
        "mac_given_v": mi_mac_given_v,
        "relay_dpc": mi_relay_link_dpc,
    }
    hits = {w: 0 for w in EXPRESSIONS}
    for i in range(args.profiles):
        mt, mr = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        nt, nr = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        ch = RelayChannel(H1=rng.normal(size=(nr, mt)),
                          H2=rng.normal(size=(nt, mt)),
                          H3=rng.normal(size=(nt, mr)),
                          gamma1=float(rng.uniform(0.2, 2.0)),
                          gamma2=float(rng.uniform(0.2, 2.0)),
                          gamma3=float(rng.uniform(0.2, 2.0)))
        x = rng.normal(size=profile_dim(ch))
        p = decode_profile(x, ch, "pre_u_first")
        est = estimate_mi_many(ch, p, EXPRESSIONS, samples=args.samples,
                               seed=int(rng.integers(2 ** 32)))
        for w, fn in closed_forms.items():
            exact = fn(ch, p)
            e = est[w]
            if abs(exact - e.value) <= 3.0 * e.std_error:
                hits[w] += 1
    ok = True
    for w in EXPRESSIONS:
        frac = hits[w] / args.profiles
        good = frac >= 0.95
        ok = ok and good
        print(f"{w:16s} {hits[w]}/{args.profiles} within 3 SE "
              f"[{'ok' if good else 'FAIL'}]")
    return 0 if ok else 1


def cmd_bounds(args) -> int:
    data = _load_toml(args.config)
    ch = _channel_from(data)
    quantities = tuple(data.get("quantities", list(QUANTITIES)))
    for q in quantities:
        if q not in QUANTITIES:
            raise ConfigError(f"unknown quantity {q!r}")
    opt = _optimizer_from(data, args.seed)
    values = {}
    if "lower" in quantities:
        values["lower"] = optimize_lower_bound(ch)
    if "upper" in quantities:
        values["upper"] = optimize_upper_bound(ch, opt).value
    sc_res = None
    if "sc" in quantities:
        sc_res = optimize_strategy(ch, "sc", opt)
        values["sc"] = sc_res.value
    if "pre" in quantities:
        extra = [sc_res.argmax] if sc_res is not None else []
        values["pre"] = optimize_strategy(ch, "pre", opt,
                                          extra_starts=extra).value
    for name in ("upper", "lower", "sc", "pre"):
        if name in values:
            print(f"{name:6s} {values[name]:.6f} bits/s/Hz")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="relaybounds",
        description="Capacity bounds and message-splitting rates for "
                    "fixed Gaussian MIMO relay channels")
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("sweep", help="run an angle sweep from a config file")
    ps.add_argument("--config", required=True)
    ps.add_argument("--jobs", type=int, default=1)
    ps.add_argument("--seed", type=int, default=None)
    ps.add_argument("--format", choices=["csv", "gnuplot", "svg"],
                    default="csv")
    ps.add_argument("--out", default=None)
    ps.set_defaults(func=cmd_sweep)

    pv = sub.add_parser("verify", help="run the Monte Carlo agreement suite")
    pv.add_argument("--profiles", type=int, default=20)
    pv.add_argument("--samples", type=int, default=10 ** 5)
    pv.add_argument("--seed", type=int, default=0)
    pv.set_defaults(func=cmd_verify)

    pb = sub.add_parser("bounds",
                        help="evaluate one channel given explicit matrices")
    pb.add_argument("--config", required=True)
    pb.add_argument("--seed", type=int, default=None)
    pb.set_defaults(func=cmd_bounds)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalDomainError as exc:
        print(f"numerical domain error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
