"""Command-line entry point: ``twrelay {region,solve,oracle,simulate}``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from .channel import (
    ChannelRealization,
    Individual,
    SumPower,
    SystemConfig,
    effective_channels,
    rate_pair,
    relay_powers,
    simulate_link,
    snr_pair,
)
from .errors import ContractViolation, NumericalFailure, ParameterError
from .experiment import db_to_watts, load_config, run_experiment, write_dataset
from .nonreciprocal import BisectionConfig, bisect_individual, bisect_sum_power, solve_nonreciprocal
from .oracle import grid_wsismin, random_search_rate
from .reciprocal import (
    beam_from_amplitudes,
    wsis_objective,
    wsismin_individual,
    wsismin_sum_power,
)

MODES = ("reciprocal-sum", "reciprocal-ind", "nonrecip-sum", "nonrecip-ind")


def _complex_vector(pairs) -> np.ndarray:
    a = np.asarray(pairs, dtype=float)
    if a.ndim != 2 or a.shape[1] != 2:
        raise ParameterError("vectors must be JSON arrays of [re, im] pairs")
    return a[:, 0] + 1j * a[:, 1]


def _pairs(v) -> List[List[float]]:
    return [[float(np.real(z)), float(np.imag(z))] for z in np.asarray(v)]


def load_channels(path) -> ChannelRealization:
    """Channel file: {"h1": [[re, im], ...], "h2": ..., "h1r"?: ..., "h2r"?: ...}.

    Missing backward vectors mean reciprocal channels.
    """
    with open(path) as fh:
        d = json.load(fh)
    h1, h2 = _complex_vector(d["h1"]), _complex_vector(d["h2"])
    if "h1r" not in d and "h2r" not in d:
        return ChannelRealization.from_forward(h1, h2)
    return ChannelRealization(h1, h2, _complex_vector(d["h1r"]), _complex_vector(d["h2r"]))


def load_beam(path) -> np.ndarray:
    with open(path) as fh:
        d = json.load(fh)
    return _complex_vector(d["w"] if isinstance(d, dict) else d)


def _system(args, k: int, individual: bool) -> SystemConfig:
    if individual:
        if args.p_individual is None:
            p = np.full(k, db_to_watts(args.pr_db) / k)
        else:
            p = np.array([float(v) for v in args.p_individual.split(",")])
        rc = Individual(p)
    else:
        rc = SumPower(db_to_watts(args.pr_db))
    sc = SystemConfig.unit_noise(db_to_watts(args.ps1_db), db_to_watts(args.ps2_db), k, rc)
    sc.check(k)
    return sc


def _emit(obj, out: Optional[str]) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_region(args) -> int:
    cfg = load_config(args.config)
    cfg.seed = args.seed
    if args.workers is not None:
        cfg.workers = args.workers
    out = args.out or cfg.out_path
    if not out:
        raise ParameterError("no output path: pass --out or set out_path in the config")
    ds = run_experiment(cfg)
    paths = write_dataset(ds, out, args.format or cfg.out_format)
    for p in paths:
        print(p)
    if ds.failures:
        print(f"{len(ds.failures)} solver failures recorded", file=sys.stderr)
    return 0


def cmd_solve(args) -> int:
    ch = load_channels(args.channels)
    individual = args.mode.endswith("ind")
    sc = _system(args, ch.k, individual)
    eff = effective_channels(ch, sc)
    report = {"mode": args.mode}
    if args.mode.startswith("reciprocal"):
        if args.mu is None:
            raise ParameterError("--mu is required for reciprocal modes")
        if individual:
            sol = wsismin_individual(eff, sc, args.mu)
            x = sol.amplitudes(eff, sc)
            report.update(k_star=sol.k_star, lambda_star=sol.lambda_star,
                          alpha=sol.alpha.tolist())
        else:
            sol = wsismin_sum_power(eff, sc, args.mu)
            x = sol.x
            report.update(broadcast=sol.broadcast)
        w = beam_from_amplitudes(x, ch)
        report.update(mu=args.mu, objective=float(wsis_objective(x, eff, sc, args.mu)))
    else:
        if args.kappa is None:
            raise ParameterError("--kappa is required for non-reciprocal modes")
        if individual and args.seed is None:
            raise ParameterError("--seed is required: nonrecip-ind uses randomisation")
        bis = BisectionConfig(epsilon=args.epsilon)
        sol = solve_nonreciprocal(ch, sc, args.kappa, bis, seed=args.seed or 0,
                                  num_candidates=args.candidates)
        w = sol.w
        report.update(kappa=args.kappa, r_star=sol.r_star,
                      bisection_steps=len(sol.bisection.trace))
    r1, r2 = rate_pair(w, eff, sc)
    _, total = relay_powers(w, ch, sc)
    report.update(w=_pairs(w), rates=[float(r1), float(r2)], relay_power=float(total))
    _emit(report, args.out)
    return 0


def cmd_oracle(args) -> int:
    ch = load_channels(args.channels)
    individual = args.constraint == "individual"
    sc = _system(args, ch.k, individual)
    eff = effective_channels(ch, sc)
    report = {"constraint": args.constraint}
    if args.mu is not None:
        if individual:
            x = wsismin_individual(eff, sc, args.mu).amplitudes(eff, sc)
        else:
            x = wsismin_sum_power(eff, sc, args.mu).x
        closed = float(wsis_objective(x, eff, sc, args.mu))
        _, grid = grid_wsismin(eff, sc, args.mu, args.resolution)
        report["wsismin"] = {"mu": args.mu, "closed_form": closed, "grid": grid,
                             "resolution": args.resolution,
                             "relative_excess": (closed - grid) / grid}
    if args.kappa is not None:
        if args.seed is None:
            raise ParameterError("--seed is required for the random-search oracle")
        bis = BisectionConfig(epsilon=args.epsilon)
        res = (bisect_individual if individual else bisect_sum_power)(eff, sc, args.kappa, bis)
        lb = random_search_rate(eff, sc, args.kappa, args.samples, args.seed)
        report["rate_profile"] = {"kappa": args.kappa, "r_star": res.r_star,
                                  "random_search": lb, "samples": args.samples,
                                  "seed": args.seed}
    if len(report) == 1:
        raise ParameterError("pass --mu and/or --kappa")
    _emit(report, args.out)
    return 0


def cmd_simulate(args) -> int:
    ch = load_channels(args.channels)
    w = load_beam(args.w)
    if w.size != ch.k:
        raise ParameterError("beam length does not match the channel")
    sc = SystemConfig.unit_noise(db_to_watts(args.ps1_db), db_to_watts(args.ps2_db), ch.k,
                                 SumPower(db_to_watts(args.pr_db)))
    eff = effective_channels(ch, sc)
    analytic = snr_pair(w, eff, sc)
    empirical = simulate_link(w, ch, sc, args.symbols, args.seed)
    _emit({
        "symbols": args.symbols, "seed": args.seed,
        "analytic_snr": [float(v) for v in analytic],
        "empirical_snr": [float(v) for v in empirical],
        "relative_error": [float(abs(e - a) / a) if a > 0 else None
                           for e, a in zip(empirical, analytic)],
    }, args.out)
    return 0


def _power_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ps1-db", type=float, default=0.0, help="source 1 power in dB")
    p.add_argument("--ps2-db", type=float, default=0.0, help="source 2 power in dB")
    p.add_argument("--pr-db", type=float, default=10.0, help="relay power budget in dB")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="twrelay",
                                 description="Two-way relay beamforming and rate regions")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("region", help="run a Monte Carlo rate-region experiment")
    p.add_argument("--config", required=True, help="JSON experiment config")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", help="output path stem (overrides out_path)")
    p.add_argument("--format", choices=("csv", "json", "both"))
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("solve", help="optimal beamformer for one channel")
    p.add_argument("--channels", required=True)
    p.add_argument("--mode", required=True, choices=MODES)
    p.add_argument("--mu", type=float)
    p.add_argument("--kappa", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--p-individual", help="comma-separated per-relay limits in watts")
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--candidates", type=int, default=1000)
    p.add_argument("--out")
    _power_args(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="compare solvers against brute-force baselines")
    p.add_argument("--channels", required=True)
    p.add_argument("--constraint", choices=("sum", "individual"), default="sum")
    p.add_argument("--mu", type=float)
    p.add_argument("--resolution", type=int, default=400)
    p.add_argument("--kappa", type=float)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int)
    p.add_argument("--p-individual")
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--out")
    _power_args(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("simulate", help="symbol-level check of the SNR formulas")
    p.add_argument("--channels", required=True)
    p.add_argument("--w", required=True, help="JSON beam vector of [re, im] pairs")
    p.add_argument("--symbols", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    _power_args(p)
    p.set_defaults(func=cmd_simulate)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParameterError, ContractViolation, NumericalFailure, KeyError,
            FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
