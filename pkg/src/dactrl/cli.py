"""Command-line front end.

Subcommands: ``simulate`` (run one scenario), ``verify`` (run + check all
performance bounds + lemma suites), ``sweep`` (repeat a scenario across
one parameter axis), ``plotdata`` (extract signals from a trace CSV) and
``lemmas`` (randomized lemma suites standalone).

Exit codes form the machine contract:
  0  success / all checks passed
  2  configuration error (bad config, unknown axis or column, empty sweep)
  3  numeric blow-up or gain-sign violation during integration
  4  a verified bound was violated or a lemma suite failed
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import sys
from pathlib import Path

import numpy as np

from . import analysis, plots
from .errors import (ConfigError, DactrlError, GainSignError,
                     NumericBlowupError)
from .scenario import (SWEEPABLE_AXES, Scenario, parse_scenario,
                       parse_scenario_text, scenario_to_toml, set_axis)
from .sim_engine import (build_setup, read_table_csv, run_closed_loop,
                         write_trace_csv)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BLOWUP = 3
EXIT_VIOLATION = 4


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _out_dir(args, config_path=None) -> Path:
    if args.out_dir is not None:
        out = Path(args.out_dir)
    elif config_path is not None:
        out = Path("runs") / Path(config_path).stem
    else:
        out = Path("runs") / "out"
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load(args) -> Scenario:
    scenario = parse_scenario(args.config)
    if args.seed is not None:
        scenario.seed = int(args.seed)
    return scenario


def _write_summary(path, scenario, setup, inputs, trace, extra=()):
    tail = max(1, int(0.2 * trace.n_samples))
    lines = [
        f"scenario          : plant {scenario.plant_name}, variant {scenario.variant}, "
        f"reference {scenario.reference.family}",
        f"grid              : h = {scenario.h:g}, horizon = {scenario.horizon:g} s, "
        f"steps = {trace.n_samples - 1}",
        f"network           : {setup.net_f.n_nodes} nodes per net "
        f"(per_axis = {scenario.per_axis})",
        f"initial e_f       : {trace.e_f[0]:.6g}  (settling moment delta = {scenario.delta:g} s)",
        f"fit ||W*_f||, eps : {np.linalg.norm(inputs.fit_f.w_star):.6g}, "
        f"{inputs.fit_f.eps_bar:.3e}",
        f"fit ||W*_g||, eps : {np.linalg.norm(inputs.fit_g.w_star):.6g}, "
        f"{inputs.fit_g.eps_bar:.3e}",
        f"filter constants  : c1 = {inputs.filter_spec.c1:.6g}, "
        f"c2 = {inputs.filter_spec.c2:.6g} (per unit ||e(0)||^2)",
        f"tail max |e_f|    : {np.max(np.abs(trace.e_f[-tail:])):.6g} (final 20%)",
        f"final mean square : {analysis.ms_output_error(trace, trace.times[-1]):.6g}",
    ]
    lines.extend(extra)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def cmd_simulate(args) -> int:
    try:
        scenario = _load(args)
        setup = build_setup(scenario)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, str(exc))
    out = _out_dir(args, args.config)
    try:
        trace = run_closed_loop(scenario)
    except (NumericBlowupError, GainSignError) as exc:
        partial = getattr(exc, "partial_trace", None)
        if partial is not None and partial.n_samples:
            write_trace_csv(partial, out / "trace_partial.csv", verbose=args.verbose_trace)
        return _fail(EXIT_BLOWUP, f"run aborted at step {getattr(exc, 'step', '?')}: {exc}")
    inputs = analysis.prepare_report_inputs(setup, apply_overrides=False)
    write_trace_csv(trace, out / "trace.csv", verbose=args.verbose_trace)
    _write_summary(out / "summary.txt", scenario, setup, inputs, trace)
    plots.save_trace_figure(trace, out / "trace.png")
    print(f"wrote {out / 'trace.csv'} ({trace.n_samples} rows)")
    return EXIT_OK


def _verify_one(scenario: Scenario, out: Path, verbose: bool):
    """Shared by verify and sweep: run, fit, check. Returns (trace, report)."""
    setup = build_setup(scenario)
    trace = run_closed_loop(scenario)
    inputs = analysis.prepare_report_inputs(setup)
    report = analysis.check_theorem_bounds(trace, inputs, scenario.variant)
    if out is not None:
        write_trace_csv(trace, out / "trace.csv", verbose=verbose)
        _write_summary(out / "summary.txt", scenario, setup, inputs, trace,
                       extra=[f"steady bound      : {report.b_ef:.6g}",
                              f"verdict           : {'PASS' if report.passed else 'FAIL'}"])
        plots.save_trace_figure(trace, out / "trace.png")
        plots.save_bound_figure(trace, report, out / "bounds.png")
    return trace, report


def cmd_verify(args) -> int:
    try:
        scenario = _load(args)
        build_setup(scenario)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, str(exc))
    out = _out_dir(args, args.config)
    try:
        trace, report = _verify_one(scenario, out, args.verbose_trace)
    except (NumericBlowupError, GainSignError) as exc:
        return _fail(EXIT_BLOWUP, f"run aborted: {exc}")

    lemma1 = analysis.lemma1_suite(seed=scenario.seed)
    lemma2 = analysis.lemma2_suite(seed=scenario.seed)
    lemmas_ok = all(lemma1) and all(v.passed for v in lemma2)

    text = analysis.report_to_text(report)
    text += (f"lemma suites      : positivity {sum(lemma1)}/{len(lemma1)}, "
             f"sequence {sum(v.passed for v in lemma2)}/{len(lemma2)}\n")
    (out / "report.txt").write_text(text, encoding="utf-8")
    with open(out / "report.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["check", "t", "lhs", "rhs", "margin"])
        for name, t, lhs, rhs, margin in analysis.report_rows(report):
            writer.writerow([name, f"{t:.12e}", f"{lhs:.12e}", f"{rhs:.12e}",
                             f"{margin:.12e}"])
    print(text, end="")
    if not report.passed or not lemmas_ok:
        return _fail(EXIT_VIOLATION,
                     f"{len(report.violations)} bound violations"
                     + ("" if lemmas_ok else "; lemma suite failed"))
    return EXIT_OK


def _sweep_worker(config_text: str, axis: str, value: float, out_dir: str,
                  seed, verbose: bool):
    scenario = parse_scenario_text(config_text)
    if seed is not None:
        scenario.seed = int(seed)
    scenario = set_axis(scenario, axis, value)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    trace, report = _verify_one(scenario, out, verbose)
    tail = max(1, int(0.2 * trace.n_samples))
    return {
        "value": value,
        "tail_max_ef": float(np.max(np.abs(trace.e_f[-tail:]))),
        "ms_error": analysis.ms_output_error(trace, trace.times[-1]),
        "bound": report.b_ef,
        "passed": report.passed,
    }


def cmd_sweep(args) -> int:
    try:
        scenario = _load(args)
        build_setup(scenario)
        if args.axis not in SWEEPABLE_AXES:
            raise ConfigError(f"unknown sweep axis {args.axis!r}; "
                              f"choose one of {SWEEPABLE_AXES}")
        values = [float(v) for v in args.values.split(",") if v.strip() != ""]
        if not values:
            raise ConfigError("sweep needs a non-empty list of values")
        for v in values:
            set_axis(scenario, args.axis, v).gains.validate()
    except (ConfigError, ValueError) as exc:
        return _fail(EXIT_CONFIG, str(exc))

    out = _out_dir(args, args.config)
    text = scenario_to_toml(scenario)
    jobs = max(1, args.jobs)
    tasks = [(text, args.axis, v, str(out / f"{args.axis}_{v:g}"), args.seed,
              args.verbose_trace) for v in values]
    try:
        if jobs == 1:
            rows = [_sweep_worker(*task) for task in tasks]
        else:
            with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
                rows = list(pool.map(_sweep_worker, *zip(*tasks)))
    except (NumericBlowupError, GainSignError) as exc:
        return _fail(EXIT_BLOWUP, f"sweep sub-run aborted: {exc}")
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, str(exc))

    with open(out / "sweep.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([args.axis, "tail_max_ef", "ms_error", "bound", "passed"])
        for row in rows:
            writer.writerow([f"{row['value']:.12e}", f"{row['tail_max_ef']:.12e}",
                             f"{row['ms_error']:.12e}", f"{row['bound']:.12e}",
                             "pass" if row["passed"] else "fail"])
    plots.save_sweep_figure(args.axis, [r["value"] for r in rows],
                            [r["tail_max_ef"] for r in rows],
                            [r["bound"] for r in rows], out / "sweep.png")
    for row in rows:
        print(f"{args.axis} = {row['value']:<10g} tail |e_f| = {row['tail_max_ef']:.4e}  "
              f"bound = {row['bound']:.4e}  "
              f"{'pass' if row['passed'] else 'fail'}")
    return EXIT_OK


def cmd_plotdata(args) -> int:
    try:
        table = read_table_csv(args.trace)
    except (OSError, DactrlError) as exc:
        return _fail(EXIT_CONFIG, f"cannot read trace {args.trace}: {exc}")
    names = [c.strip() for c in args.columns.split(",") if c.strip()]
    if not names:
        return _fail(EXIT_CONFIG, "no columns requested")
    available = [c for c in table if c != "t"]
    missing = [c for c in names if c not in table or c == "t"]
    if missing:
        return _fail(EXIT_CONFIG, f"columns {missing} not in trace; "
                                  f"available: {', '.join(available)}")
    out = _out_dir(args)
    t = table["t"]
    for name in names:
        with open(out / f"{name}.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", name])
            for ti, vi in zip(t, table[name]):
                writer.writerow([f"{ti:.12e}", f"{vi:.12e}"])
        plots.save_signal_figure(t, table[name], name, out / f"{name}.png")
        print(f"wrote {out / (name + '.csv')} ({len(t)} rows)")
    return EXIT_OK


def cmd_lemmas(args) -> int:
    seed = 0 if args.seed is None else int(args.seed)
    lemma1 = analysis.lemma1_suite(seed=seed)
    lemma2 = analysis.lemma2_suite(seed=seed)
    for i, ok in enumerate(lemma1):
        print(f"positivity pair {i:2d}: {'PASS' if ok else 'FAIL'}")
    n_pass = sum(v.passed for v in lemma2)
    print(f"sequence harness : {n_pass}/{len(lemma2)} PASS")
    if all(lemma1) and n_pass == len(lemma2):
        return EXIT_OK
    return _fail(EXIT_VIOLATION, "lemma suite failed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dactrl",
        description="Simulate and verify desired-trajectory adaptive neural control.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True, help="scenario TOML file")
        p.add_argument("--out-dir", default=None, help="output directory")
        p.add_argument("--seed", default=None, type=int,
                       help="override the scenario seed (randomized probes only)")

    p = sub.add_parser("simulate", help="run one scenario, write trace + summary")
    common(p)
    p.add_argument("--verbose-trace", action="store_true",
                   help="include controller internals in the trace CSV")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="simulate and check all performance bounds")
    common(p)
    p.add_argument("--verbose-trace", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="repeat a scenario across one parameter axis")
    common(p)
    p.add_argument("--axis", required=True, help=f"one of {', '.join(SWEEPABLE_AXES)}")
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--jobs", type=int, default=1, help="parallel sub-runs")
    p.add_argument("--verbose-trace", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("plotdata", help="extract (t, signal) files from a trace CSV")
    p.add_argument("--trace", required=True, help="trace CSV path")
    p.add_argument("--columns", required=True, help="comma-separated column names")
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=cmd_plotdata)

    p = sub.add_parser("lemmas", help="run the randomized lemma suites standalone")
    p.add_argument("--seed", default=None, type=int)
    p.set_defaults(func=cmd_lemmas)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
