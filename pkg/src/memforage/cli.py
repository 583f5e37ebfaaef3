"""Command-line interface.

Subcommands:

* ``run``      : simulate one strategy on an environment, write trace/summary
* ``compare``  : run all strategies and print the comparison + ordering report
* ``validate`` : check the fixed-step engine against the closed-form solution
* ``plot``     : emit SVG charts (voltage share, or cumulative comparison)
* ``presets``  : list the built-in environments

Exit codes: 0 success, 1 usage or input error, 2 incomplete run,
3 validation failure.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import metrics, scenario
from .engine import simulate
from .oracle import strategy_oracle_time
from .strategies import (
    ALL_SITES,
    LEAFCUTTER,
    PARALLEL_RESIDUAL,
    SEQ_MODES,
    SEQUENTIAL,
    STRATEGIES,
    make_schedule,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INCOMPLETE = 2
EXIT_VALIDATION = 3

REL_TOLERANCE = 0.005
RATIO_WINDOW = (0.3, 0.7)
SCALING_TOLERANCE = 1e-6


class _Parser(argparse.ArgumentParser):
    """argparse parser that reports usage errors with exit code 1."""

    def error(self, message: str) -> None:  # noqa: D401 - argparse hook
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_scenario_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--preset", choices=scenario.PRESET_NAMES, help="built-in environment")
    group.add_argument("--scenario", metavar="PATH", help="scenario JSON file")
    parser.add_argument("--dt", type=float, default=None, help="integration step override")
    parser.add_argument("--max-steps", type=int, default=None, help="step cap override")
    parser.add_argument(
        "--record-every", type=int, default=1, metavar="K", help="keep every K-th trace row"
    )


def _load_env(args: argparse.Namespace) -> scenario.Environment:
    if args.preset:
        return scenario.preset(args.preset)
    return scenario.load_scenario(args.scenario)


def build_parser() -> _Parser:
    parser = _Parser(prog="memforage", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one strategy", parents=[])
    _add_scenario_args(p_run)
    p_run.add_argument("--strategy", choices=STRATEGIES, required=True)
    p_run.add_argument("--seq-mode", choices=SEQ_MODES, default=PARALLEL_RESIDUAL)
    p_run.add_argument("--out", metavar="PATH", help="write trace CSV here")
    p_run.add_argument("--summary", metavar="PATH", help="write summary JSON here")

    p_cmp = sub.add_parser("compare", help="run all strategies and report orderings")
    _add_scenario_args(p_cmp)
    p_cmp.add_argument("--summary", metavar="PATH", help="write comparison JSON here")

    p_val = sub.add_parser("validate", help="engine vs closed-form check")
    p_val.add_argument("--dt", type=float, default=scenario.DEFAULT_DT)

    p_plot = sub.add_parser("plot", help="emit SVG charts")
    _add_scenario_args(p_plot)
    p_plot.add_argument(
        "--strategy",
        choices=STRATEGIES,
        action="append",
        help="strategy to plot; repeat for a comparison chart (default: all three)",
    )
    p_plot.add_argument("--seq-mode", choices=SEQ_MODES, default=PARALLEL_RESIDUAL)
    p_plot.add_argument("--svg", metavar="PATH", required=True)

    p_presets = sub.add_parser("presets", help="list built-in environments")
    # accepted for interface uniformity; presets has no use for a strategy
    p_presets.add_argument("--strategy", help=argparse.SUPPRESS)
    return parser


def _fmt(value: float | None) -> str:
    return "-" if value is None else f"{value:.4f}"


def _run_command(args: argparse.Namespace) -> int:
    env = _load_env(args)
    schedule = make_schedule(args.strategy, env, seq_mode=args.seq_mode)
    trace = simulate(
        env, schedule, dt=args.dt, max_steps=args.max_steps, record_every=args.record_every
    )
    mode = args.seq_mode if args.strategy == SEQUENTIAL else None
    summary = metrics.summarize(trace, args.strategy, mode=mode, env_name=env.name)

    print(f"environment: {env.name or 'custom'} ({len(env.sites)} sites)")
    print(f"strategy: {summary.key}")
    print(f"dt={trace.dt} steps={summary.n_steps}")
    if trace.completed:
        print(f"depleted at t={trace.depletion_time:.6f}")
    else:
        print(f"INCOMPLETE: step cap reached before full depletion")
    if summary.site_depletion_times:
        print("site depletion times (interpolated):")
        for label in trace.site_labels:
            if label in summary.site_depletion_times:
                print(f"  {label}: {summary.site_depletion_times[label]:.6f}")
    if trace.completed and len(trace.segments) > 1:
        bounds = [s * trace.dt for s, _ in trace.segments] + [trace.depletion_time]
        durations = " + ".join(f"{b - a:.4f}" for a, b in zip(bounds, bounds[1:]))
        print(f"phase durations: {durations} = {trace.depletion_time:.4f}")
    if summary.milestones:
        stones = "  ".join(
            f"t({int(f * 100)}%)={t:.4f}" for f, t in sorted(summary.milestones.items())
        )
        print(f"milestones: {stones}")
    print(f"total delivered charge: {summary.total_delivered:.6f}")

    if args.out:
        scenario.write_trace(trace, args.out)
        print(f"wrote trace: {args.out}")
    if args.summary:
        scenario.write_summary(
            {"environment": scenario.scenario_dict(env), "summary": summary.to_dict()},
            args.summary,
        )
        print(f"wrote summary: {args.summary}")
    return EXIT_OK if trace.completed else EXIT_INCOMPLETE


def _compare_command(args: argparse.Namespace) -> int:
    env = _load_env(args)
    report = metrics.compare(
        env, dt=args.dt, max_steps=args.max_steps, record_every=args.record_every
    )
    header = f"{'strategy':34s} {'D':>10s} {'t50':>10s} {'t90':>10s} {'delivered':>10s}"
    print(f"environment: {env.name or 'custom'}  dt={report.dt}")
    print(header)
    for s in report.summaries:
        print(
            f"{s.key:34s} {_fmt(s.depletion_time):>10s} "
            f"{_fmt(s.milestones.get(0.5)):>10s} {_fmt(s.milestones.get(0.9)):>10s} "
            f"{s.total_delivered:>10.4f}" + ("" if s.completed else "  [INCOMPLETE]")
        )
    if report.relations:
        print("expected-ordering checks:")
        for rel in report.relations:
            print(f"  {rel.format_line()}")
    if args.summary:
        scenario.write_summary(report.to_dict(), args.summary)
        print(f"wrote summary: {args.summary}")
    if any(not s.completed for s in report.summaries):
        return EXIT_INCOMPLETE
    return EXIT_OK


def _site_times_by_index(trace) -> dict[int, float]:
    return {e.site: e.time for e in trace.events}


def _validate_command(args: argparse.Namespace) -> int:
    dt = args.dt
    cases = [
        (preset_name, strategy, mode)
        for preset_name in scenario.PRESET_NAMES
        for strategy, mode in (
            (ALL_SITES, None),
            (SEQUENTIAL, "parallel-residual"),
            (SEQUENTIAL, "shared-series"),
            (LEAFCUTTER, None),
        )
    ]
    ok = True
    print(
        f"{'case':40s} {'t_oracle':>10s} {'t_engine':>10s} {'rel_err':>9s} "
        f"{'ratio':>6s} {'status':>7s}"
    )
    for preset_name, strategy, mode in cases:
        env = scenario.preset(preset_name)
        oracle = strategy_oracle_time(env, strategy, mode)
        errs = []
        t_eng = None
        complete = True
        for d in (dt, dt / 2):
            schedule = make_schedule(strategy, env, seq_mode=mode or PARALLEL_RESIDUAL)
            trace = simulate(env, schedule, dt=d, record_every=10**9)
            if not trace.completed:
                complete = False
                break
            by_site = _site_times_by_index(trace)
            errs.append(max(abs(by_site[i] - oracle.site_times[i]) for i in by_site))
            if d == dt:
                t_eng = trace.depletion_time
        name = f"{preset_name}/{strategy}" + (f"[{mode}]" if mode else "")
        if not complete:
            print(f"{name:40s} {'-':>10s} {'-':>10s} {'-':>9s} {'-':>6s} {'FAIL':>7s}")
            ok = False
            continue
        rel = max(
            abs(t_eng - oracle.total_time) / oracle.total_time,
            errs[0] / oracle.total_time,
        )
        ratio = errs[1] / errs[0] if errs[0] > 0 else float("nan")
        passed = rel <= REL_TOLERANCE and RATIO_WINDOW[0] <= ratio <= RATIO_WINDOW[1]
        ok &= passed
        print(
            f"{name:40s} {oracle.total_time:>10.4f} {t_eng:>10.4f} "
            f"{rel:>9.2e} {ratio:>6.3f} {'PASS' if passed else 'FAIL':>7s}"
        )

    print("supply-scaling checks (2x supply, dt/2 -> times halve):")
    for preset_name in scenario.PRESET_NAMES:
        for strategy in (ALL_SITES, SEQUENTIAL):
            env = scenario.preset(preset_name)
            schedule = make_schedule(strategy, env)
            base = simulate(env, schedule, dt=dt, record_every=10**9)
            scaled_env = scenario.Environment(
                sites=env.sites,
                r_off=env.r_off,
                beta=env.beta,
                supply_v=env.supply_v * 2,
                dt=env.dt,
                max_steps=env.max_steps,
                name=env.name,
            )
            scaled = simulate(scaled_env, schedule, dt=dt / 2, record_every=10**9)
            t_base = _site_times_by_index(base)
            t_scaled = _site_times_by_index(scaled)
            worst = max(
                abs(t_scaled[i] - t_base[i] / 2) / (t_base[i] / 2) if t_base[i] else 0.0
                for i in t_base
            )
            passed = worst <= SCALING_TOLERANCE
            ok &= passed
            name = f"{preset_name}/{strategy} x2 supply"
            print(f"  {name:38s} worst rel dev {worst:.2e} {'PASS' if passed else 'FAIL'}")

    print("validation:", "PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_VALIDATION


def _plot_command(args: argparse.Namespace) -> int:
    from . import plots

    env = _load_env(args)
    strategies = args.strategy or list(STRATEGIES)
    traces = []
    for strategy in strategies:
        schedule = make_schedule(strategy, env, seq_mode=args.seq_mode)
        trace = simulate(
            env, schedule, dt=args.dt, max_steps=args.max_steps, record_every=args.record_every
        )
        if not trace.completed:
            print(
                f"error: {strategy} run incomplete at step cap; cannot plot", file=sys.stderr
            )
            return EXIT_INCOMPLETE
        label = strategy if strategy != SEQUENTIAL else f"{strategy}[{args.seq_mode}]"
        traces.append((label, trace))
    env_label = env.name or "custom"
    if len(traces) == 1:
        plots.voltage_chart(
            traces[0][1], args.svg, title=f"Voltage share, {traces[0][0]} ({env_label})"
        )
    else:
        plots.cumulative_chart(
            traces, args.svg, title=f"Cumulative gathered resource ({env_label})"
        )
    print(f"wrote chart: {args.svg}")
    return EXIT_OK


def _presets_command(args: argparse.Namespace) -> int:
    for name in scenario.PRESET_NAMES:
        env = scenario.preset(name)
        sites = ", ".join(f"{s.label}={s.m0:g}" for s in env.sites)
        print(f"{name}: supply_v={env.supply_v:g} r_off={env.r_off:g} beta={env.beta:g}")
        print(f"  sites: {sites}")
    return EXIT_OK


_COMMANDS = {
    "run": _run_command,
    "compare": _compare_command,
    "validate": _validate_command,
    "plot": _plot_command,
    "presets": _presets_command,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
