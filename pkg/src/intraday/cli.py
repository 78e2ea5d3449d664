"""Command-line interface: tables, simulations, verification, bounds.

Subcommands
-----------
tables      Emit the three benchmark tables (varying horizon, demand,
            initial price) as CSV files.
simulate    Sample Euler trajectories under the optimal policy for a
            scenario (nojump | jump-positive | jump-negative | delay) and
            write them as CSV.
verify      Run the independent verification suite (ODE oracle, quadrature,
            martingale and cost checks); nonzero exit on any failure.
errorbound  Print the approximation-error bound and shortfall probability
            for a configured initial state.
delay       Print the delay constant, delayed value and bound, production
            quantity and post-decision mean rate.

``--config`` accepts either a bundled preset name (table13, sim-nojump,
sim-jump-pos, sim-jump-neg, sim-delay) or a path to a JSON parameter file.
Exit codes: 0 success, 1 validation error, 2 verification failure,
3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import closed_form, delay as delay_mod, error_bounds, model, oracle, simulate
from .model import HOUR, MarketState, load_param_file

#: Fixed default seed so that every subcommand is reproducible by default.
DEFAULT_SEED = 20_240_817

#: Default initial state (demand forecast, quoted price, inventory) shared
#: by the benchmark tables and the simulation scenarios.
DEFAULT_D0 = 50_000.0
DEFAULT_Y0 = 50.0
DEFAULT_X0 = 0.0

PRESETS = ("table13", "sim-nojump", "sim-jump-pos", "sim-jump-neg", "sim-delay")
SCENARIO_PRESETS = {
    "nojump": "sim-nojump",
    "jump-positive": "sim-jump-pos",
    "jump-negative": "sim-jump-neg",
    "delay": "sim-delay",
}

#: Threshold below which probabilities and bounds are rendered as a
#: sub-threshold marker in table output.
_TINY = 1e-16


class VerificationFailure(Exception):
    pass


def resolve_config(name_or_path: str | None, default: str) -> Path:
    """Map a preset name or filesystem path to a parameter file path."""
    name = name_or_path or default
    if name in PRESETS:
        return Path(str(resources.files("intraday").joinpath(
            f"presets/{name}.json")))
    path = Path(name)
    if not path.exists():
        raise ValueError(f"config {name!r} is neither a bundled preset "
                         f"({', '.join(PRESETS)}) nor an existing file")
    return path


def _format_value(value: float) -> str:
    return f"{value:.3g}"


def _format_tail(value: float) -> str:
    if value == 0.0:
        return "0"
    if value < _TINY:
        return "<1e-16"
    return f"{value:.3g}"


def _table_row(params, tau: float, d0: float, y0: float):
    state = MarketState(t=0.0, x=DEFAULT_X0, y=y0, d=d0)
    tabled = model.ModelParams(
        sigma0=params.sigma0, sigma_d=params.sigma_d, beta=params.beta,
        eta=params.eta, mu=params.mu, nu=params.nu, gamma=params.gamma,
        rho=params.rho, horizon=tau)
    value = closed_form.value_aux(state, tabled)
    report = error_bounds.error_bound(tau, d0 - DEFAULT_X0, y0, tabled)
    return value, report.shortfall_probability, report.bound


def cmd_tables(args) -> int:
    params, _, _ = load_param_file(resolve_config(args.config, "table13"))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    specs = [
        ("table1.csv", "T_hours",
         [(f"{t:g}",) + _table_row(params, t * HOUR, DEFAULT_D0, DEFAULT_Y0)
          for t in (1, 8, 24, 50)]),
        ("table2.csv", "D0_mw",
         [(f"{d0:g}",) + _table_row(params, 24 * HOUR, d0, DEFAULT_Y0)
          for d0 in (500.0, 5000.0, 50_000.0, 500_000.0)]),
        ("table3.csv", "Y0_eur_per_mw",
         [(f"{y0:g}",) + _table_row(params, 24 * HOUR, DEFAULT_D0, y0)
          for y0 in (500.0, 50.0, 40.0, 30.0, 20.0)]),
    ]
    for filename, label, rows in specs:
        path = out / filename
        with path.open("w", newline="") as handle:
            handle.write(f"{label},shortfall_probability,value_eur,"
                         "error_bound_eur\n")
            for varied, value, prob, bound in rows:
                handle.write(f"{varied},{_format_tail(prob)},"
                             f"{_format_value(value)},{_format_tail(bound)}\n")
        print(f"wrote {path}")
    return 0


def _build_policy(params, jumps, delay_seconds):
    if delay_seconds is not None:
        return delay_mod.composite_delay_policy(params, delay_seconds)
    return simulate.optimal_policy(params, jumps)


def cmd_simulate(args) -> int:
    default = SCENARIO_PRESETS.get(args.scenario)
    if args.scenario is not None and default is None:
        raise ValueError(f"unknown scenario {args.scenario!r}; expected one "
                         f"of {', '.join(SCENARIO_PRESETS)}")
    params, jumps, delay_seconds = load_param_file(
        resolve_config(args.config, default or "sim-nojump"))
    policy = _build_policy(params, jumps, delay_seconds)
    paths = simulate.sample_paths(
        params, jumps, policy, args.paths, args.dt, args.seed,
        d0=args.d0, y0=args.y0, x0=args.x0, n_workers=args.workers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    destination = simulate.export_csv(paths, out / "paths.csv")
    cost = simulate.estimate_cost(paths, params)
    print(f"wrote {destination}")
    print(f"mean realized cost: {cost.mean:.6g} EUR"
          + (f" (stderr {cost.stderr:.3g})" if paths.n_paths > 1 else ""))
    return 0


def cmd_verify(args) -> int:
    params, jumps, _ = load_param_file(
        resolve_config(args.config, "sim-nojump"))
    report = oracle.verification_report(
        params, jumps, seed=args.seed, n_paths=args.paths, dt=args.dt,
        d0=args.d0, y0=args.y0)
    text = oracle.format_report(report)
    print(text, end="")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.txt").write_text(text)
        (out / "report.json").write_text(json.dumps(report, indent=2) + "\n")
        print(f"wrote {out / 'report.txt'} and {out / 'report.json'}")
    if not report["passed"]:
        raise VerificationFailure("verification checks failed")
    return 0


def cmd_errorbound(args) -> int:
    params, jumps, delay_seconds = load_param_file(
        resolve_config(args.config, "sim-nojump"))
    tau = params.horizon
    spread = args.d0 - args.x0
    if delay_seconds is not None:
        state = MarketState(t=0.0, x=args.x0, y=args.y0, d=args.d0)
        report = delay_mod.error_bound_delay(state, params, delay_seconds)
        kind = f"delay (h = {delay_seconds / HOUR:g} h)"
    elif jumps is not None:
        report = error_bounds.error_bound_jump(
            tau, spread, args.y0, params, jumps, seed=args.seed)
        kind = "jump"
    else:
        report = error_bounds.error_bound(tau, spread, args.y0, params)
        kind = "no-jump"
    print(f"model: {kind}")
    print(f"error bound: {report.bound:.6g} EUR")
    if report.mc_stderr:
        print(f"mc stderr: {report.mc_stderr:.3g} EUR")
    print(f"shortfall probability: {report.shortfall_probability:.6g}")
    print(f"mean terminal spread: {report.moments.mean:.6g} MW")
    print(f"variance terminal spread: {report.moments.variance:.6g} MW^2")
    return 0


def cmd_delay(args) -> int:
    params, _, delay_seconds = load_param_file(
        resolve_config(args.config, "sim-delay"))
    h = args.delay_hours * HOUR if args.delay_hours is not None else delay_seconds
    if h is None:
        raise ValueError("no delay configured; set delay_hours in the config "
                         "or pass --delay-hours")
    state = MarketState(t=0.0, x=args.x0, y=args.y0, d=args.d0)
    k_h = delay_mod.delay_constant(h, params)
    value = delay_mod.value_aux_delay(state, params, h)
    bound = delay_mod.error_bound_delay(state, params, h)
    xi = delay_mod.production_rule_delay(state.spread, state.y, params, h)
    rate = delay_mod.post_decision_mean_rate(state, params, h)
    print(f"delay h: {h / HOUR:g} h")
    print(f"delay constant K_h: {k_h:.6g} EUR")
    print(f"value with delay: {value:.6g} EUR")
    print(f"error bound: {bound.bound:.6g} EUR")
    print(f"shortfall probability: {bound.shortfall_probability:.6g}")
    print(f"production at decision state: {xi:.6g} MW")
    print(f"post-decision mean rate: {rate:.6g} MW/s")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="intraday",
        description="Closed-form optimal intraday trading: tables, "
                    "simulation, verification, error bounds.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default=None,
                       help="bundled preset name or parameter file path")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--paths", type=int, default=1)
        p.add_argument("--dt", type=float, default=60.0,
                       help="simulation step, seconds")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--d0", type=float, default=DEFAULT_D0)
        p.add_argument("--y0", type=float, default=DEFAULT_Y0)
        p.add_argument("--x0", type=float, default=DEFAULT_X0)

    p = sub.add_parser("tables", help="emit benchmark tables as CSV")
    common(p)
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("simulate", help="sample trajectories as CSV")
    common(p)
    p.add_argument("--scenario", default=None,
                   help="named scenario (selects a bundled preset): "
                        + " | ".join(sorted(SCENARIO_PRESETS)))
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="run the verification suite")
    common(p)
    p.set_defaults(func=cmd_verify, paths=2000)

    p = sub.add_parser("errorbound", help="print the error bound")
    common(p)
    p.set_defaults(func=cmd_errorbound)

    p = sub.add_parser("delay", help="print delay quantities")
    common(p)
    p.add_argument("--delay-hours", type=float, default=None)
    p.set_defaults(func=cmd_delay)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except VerificationFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
