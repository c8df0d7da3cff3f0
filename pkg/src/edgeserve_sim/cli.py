"""Command-line front end.

    edgeserve-sim {gen-trace|simulate|compare|calibrate} --config PATH
                  [--policy NAME] [--out DIR] [--log]

Exit codes: 0 success, 2 configuration error, 3 unknown policy.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import experiment
from .catalog import builtin_catalog, calibrate_accuracy, accuracy_at, load_catalog
from .config import DEFAULT_CONFIG, UnknownPolicy, load_config, parse_policy
from .errors import CalibrationError, SimError
from .workload import generate_trace, write_trace

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_POLICY = 3


def _fail(exc) -> int:
    print(f"error: {exc}", file=sys.stderr)
    return EXIT_POLICY if isinstance(exc, UnknownPolicy) else EXIT_CONFIG


def cmd_gen_trace(args) -> int:
    cfg = load_config(args.config)
    if cfg.workload is None:
        raise SimError("workload: gen-trace needs an inline workload, not a trace path")
    seed = args.seed if args.seed is not None else cfg.seeds[0]
    trace = generate_trace(cfg.workload_for(seed), cfg.catalog)
    out = Path(args.out)
    if out.suffix != ".csv":
        out.mkdir(parents=True, exist_ok=True)
        out = out / "trace.csv"
    write_trace(trace, out)
    print(len(trace))
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    if args.policy is not None:
        policy = parse_policy(args.policy)
    elif len(cfg.policies) == 1:
        policy = cfg.policies[0]
    else:
        policy = parse_policy("lc")
    log = args.log or cfg.options.log
    results = experiment.run_grid(cfg, [policy], log=log)
    out = Path(args.out)
    experiment.write_atomic(out / "metrics.json",
                            experiment.dump_json(experiment.metrics_document(policy, results)))
    if log:
        for r in results:
            experiment.write_atomic(out / f"requests_{policy.value}_seed{r.seed}.csv", r.log)
    print(experiment.summary_table(experiment.summarize(results)))
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg = load_config(args.config)
    policies = [parse_policy(args.policy)] if args.policy else cfg.policies
    results = experiment.run_grid(cfg, policies)
    summary = experiment.summarize(results)
    out = Path(args.out)
    experiment.write_atomic(out / "comparison.csv", experiment.comparison_csv(results))
    experiment.write_atomic(out / "summary.csv", experiment.summary_csv(summary))
    print(experiment.summary_table(summary))
    print()
    print("ranking by mean system cost:")
    for i, p in enumerate(experiment.ranking(summary), start=1):
        print(f"  {i}. {p.value:<6} {summary[p]['system_cost']:.4f}")
    return EXIT_OK


def calibration_report(catalog) -> str:
    lines = []
    for m in catalog:
        if m.context_window == 0:
            continue
        for t in m.tasks:
            if t.one_shot_score is None:
                continue
            window = m.window_for(t.task_id)
            name = f"{m.id}/{t.task_id}"
            try:
                acc = calibrate_accuracy(t, window)
            except CalibrationError as exc:
                lines.append(f"{name}: not calibratable: {exc}")
                continue
            ks = [0]
            k = 1
            while k < window:
                ks.append(k)
                k *= 2
            ks.append(window)
            curve = " ".join(f"{k}:{accuracy_at(acc, k):.3f}" for k in ks)
            lines.append(f"{name}: a0={acc.a0:g} a1_gain={acc.a1_gain:.4g} "
                         f"alpha={acc.alpha:.6f} | {curve}")
    return "\n".join(lines)


def cmd_calibrate(args) -> int:
    if args.catalog:
        catalog = load_catalog(args.catalog)
    elif args.config:
        catalog = load_config(args.config).catalog
    else:
        catalog = builtin_catalog()
    report = calibration_report(catalog)
    if report:
        print(report)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="edgeserve-sim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_default=str(DEFAULT_CONFIG)):
        p.add_argument("--config", default=config_default, help="experiment config JSON")
        p.add_argument("--out", default=".", help="output directory")

    p = sub.add_parser("gen-trace", help="write a request trace CSV")
    common(p)
    p.add_argument("--seed", type=int, default=None, help="workload seed (default: first config seed)")
    p.set_defaults(func=cmd_gen_trace)

    p = sub.add_parser("simulate", help="run one policy over every seed")
    common(p)
    p.add_argument("--policy", default=None, help="random|cloud|fifo|lfu|lc")
    p.add_argument("--log", action="store_true", help="write per-request logs")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="run every policy over every seed")
    common(p)
    p.add_argument("--policy", default=None, help="restrict to one policy")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("calibrate", help="print fitted accuracy curves")
    common(p, config_default=None)
    p.add_argument("--catalog", default=None, help="catalog JSON (default: builtin)")
    p.set_defaults(func=cmd_calibrate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SimError as exc:
        return _fail(exc)


if __name__ == "__main__":
    sys.exit(main())
