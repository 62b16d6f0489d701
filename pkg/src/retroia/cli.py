"""
Command-line entry point ``retroia``.

Exit codes: 0 success, 2 malformed configuration, 3 no scheme applies to
the configuration, 4 numerically singular channel draws after reseeding.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .model import AntennaConfig, FeedbackSetting
from .regions import (ConditionNotHolding, Known, classify_case, condition_holds,
                      format_fraction, region_for_setting, region_relation,
                      shannon_outer_region)
from .scenarios import run_example_6243_dcsit, run_example_6243_shannon
from .scheme import (DEFAULT_BLOCKS, CRITERIA, WrongCase, build_schedule, build_set_plan,
                     plan, scheme_config, target_in_region, validate)
from .simulator import IllConditioned, SimulationMode, decode_success_rate, \
    simulate, trace_csv
from .svg import region_svg

EXIT_CONFIG = 2
EXIT_NOT_APPLICABLE = 3
EXIT_NUMERICAL = 4
RESEEDS = 3

DEFAULTS = {"setting": "shannon", "format": "text", "corner": "auto", "B": DEFAULT_BLOCKS,
            "seed": 0, "trials": 100, "mode": "noiseless", "variant": "shannon",
            "output": None, "cfg": None}

EPILOG = """exit codes:
  2  malformed configuration
  3  no retrospective alignment scheme applies (no condition holds)
  4  decoding systems numerically singular after 3 reseeds
"""


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _frac(x: Fraction) -> str:
    return format_fraction(x)


def _point(p) -> str:
    return f"({_frac(p.d1)},{_frac(p.d2)})"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="retroia", epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter,
        description="DoF regions and retrospective interference alignment for the "
                    "two-user MIMO interference channel.")
    parser.add_argument("--config", help="JSON file with option values (flags override it)")
    sub = parser.add_subparsers(dest="command")

    def common(p, *names):
        if "cfg" in names:
            p.add_argument("--cfg", help="antenna counts M1,M2,N1,N2")
        if "setting" in names:
            p.add_argument("--setting", choices=[s.value for s in FeedbackSetting])
        if "corner" in names:
            p.add_argument("--corner", choices=["auto", "o2_1", "o2_3", "1_3"])
        if "B" in names:
            p.add_argument("--B", type=int, help=f"number of data blocks (default {DEFAULT_BLOCKS})")
        if "seed" in names:
            p.add_argument("--seed", type=int)
        if "mode" in names:
            p.add_argument("--mode", help="'noiseless' or 'noisy:<power>'")
        p.add_argument("--format", choices=["text", "json", "csv", "svg"])
        p.add_argument("--output", help="write to this path instead of stdout")

    common(sub.add_parser("region", help="DoF region under a feedback setting"), "cfg", "setting")
    common(sub.add_parser("plan", help="scheme parameters and design-criteria check"),
           "cfg", "corner", "B")
    common(sub.add_parser("simulate", help="run the scheme and count decoded symbols"),
           "cfg", "corner", "B", "seed", "mode")
    ex = sub.add_parser("example", help="fixed (6,2,4,3) scenario")
    ex.add_argument("--variant", choices=["shannon", "dcsit"])
    common(ex, "seed", "mode")
    common(sub.add_parser("compare", help="region status for every feedback setting"), "cfg")
    sr = sub.add_parser("success-rate", help="fraction of seeds that decode")
    sr.add_argument("--trials", type=int)
    common(sr, "cfg", "corner", "B", "seed")
    return parser


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read config {path}: {exc}", EXIT_CONFIG) from None
    if not isinstance(data, dict):
        raise CliError("config file must hold a JSON object", EXIT_CONFIG)
    return data


def _resolve(args: argparse.Namespace, config: dict) -> argparse.Namespace:
    for key, default in DEFAULTS.items():
        if getattr(args, key, None) is None:
            value = config.get(key, default)
            if key == "cfg" and isinstance(value, dict):
                value = ",".join(str(value[k]) for k in ("m1", "m2", "n1", "n2"))
            setattr(args, key, value)
    if args.cfg is not None:
        try:
            args.cfg = AntennaConfig.parse(str(args.cfg))
        except (ValueError, TypeError) as exc:
            raise CliError(f"bad --cfg: {exc}", EXIT_CONFIG) from None
    elif args.command not in ("example",):
        raise CliError("--cfg is required", EXIT_CONFIG)
    try:
        args.mode = SimulationMode.parse(str(args.mode))
    except ValueError as exc:
        raise CliError(str(exc), EXIT_CONFIG) from None
    if int(args.B) < 1 or int(args.trials) < 1:
        raise CliError("--B and --trials must be positive", EXIT_CONFIG)
    return args


# -- commands ---------------------------------------------------------------

def cmd_region(args) -> str:
    setting = FeedbackSetting(args.setting)
    answer = region_for_setting(args.cfg, setting)
    if not isinstance(answer, Known):
        if args.format == "json":
            return json.dumps({"cfg": args.cfg.to_json(), "setting": setting.value,
                               "status": "unknown", "reason": answer.reason}, indent=2) + "\n"
        return f"region not characterized: {answer.reason}\n"
    region = answer.region
    if args.format == "json":
        return json.dumps({"cfg": args.cfg.to_json(), "setting": setting.value,
                           "status": "known", **region.to_json()}, indent=2) + "\n"
    if args.format == "csv":
        return region.to_csv()
    if args.format == "svg":
        return region_svg(region, f"{setting.value} {args.cfg}")
    lines = [f"cfg {args.cfg}, setting {setting.value}", "half-planes:"]
    for h in region.halfplanes:
        if region.active(h.label):
            note = " [edge]"
        else:
            note = " (redundant)" if region.redundant(h.label) else ""
        lines.append(f"  {h}{note}")
    lines.append("vertices: " + ", ".join(_point(v) for v in region.vertices))
    return "\n".join(lines) + "\n"


def _plan(args):
    try:
        params = plan(args.cfg, args.corner, int(args.B))
    except ConditionNotHolding:
        raise CliError(f"no condition holds for {args.cfg}; no scheme applies",
                       EXIT_NOT_APPLICABLE) from None
    except WrongCase as exc:
        raise CliError(str(exc), EXIT_NOT_APPLICABLE) from None
    return params


def cmd_plan(args) -> str:
    params = _plan(args)
    run_cfg = scheme_config(args.cfg, params)
    violations = validate(params, run_cfg)
    failed = {v.criterion for v in violations}
    checklist = {c: ("fail" if c in failed else "pass") for c in CRITERIA}
    payload = {"cfg": args.cfg.to_json(), "case": classify_case(args.cfg).value,
               "params": params.to_json(), "criteria": checklist,
               "violations": [str(v) for v in violations],
               "target_in_region": target_in_region(params, run_cfg)}
    if args.format == "json":
        return json.dumps(payload, indent=2) + "\n"
    lines = [f"cfg {args.cfg}: {payload['case']}, corner {params.corner}"
             + (" (planned on swapped users)" if params.swapped else ""),
             json.dumps(params.to_json())]
    lines += [f"  {c}: {state}" for c, state in checklist.items()]
    lines += [f"  ! {v}" for v in violations]
    lines.append(f"target {_point(params.target)} in Shannon-feedback region: "
                 f"{payload['target_in_region']}")
    return "\n".join(lines) + "\n"


def _with_reseed(fn, seed):
    last = None
    for attempt in range(RESEEDS + 1):
        try:
            return fn(seed + attempt), seed + attempt
        except IllConditioned as exc:
            last = exc
    raise CliError(f"ill-conditioned draws after {RESEEDS} reseeds: {last}", EXIT_NUMERICAL)


def cmd_simulate(args) -> str:
    params = _plan(args)
    report, used_seed = _with_reseed(lambda s: simulate(args.cfg, params, s, args.mode),
                                     int(args.seed))
    B = params.B
    target = params.target.mirrored() if params.swapped else params.target
    scaled = target.scaled(Fraction(B, B + 1))
    if args.format == "csv":
        run_cfg = scheme_config(args.cfg, params)
        sched = build_schedule(params, build_set_plan(params, run_cfg), run_cfg)
        return trace_csv(sched, report.traces)
    payload = report.to_json()
    payload.update({"cfg": args.cfg.to_json(), "seed": used_seed, "mode": str(args.mode),
                    "target_scaled": [_frac(scaled.d1), _frac(scaled.d2)],
                    "target_match": report.achieved == scaled})
    if args.format == "json":
        return json.dumps(payload, indent=1) + "\n"
    lines = [f"cfg {args.cfg}, corner {params.corner}, B={B}, seed {used_seed}, mode {args.mode}",
             f"achieved {_frac(report.achieved.d1)}, {_frac(report.achieved.d2)} "
             f"over {report.total_slots} slots",
             f"target*B/(B+1) {_frac(scaled.d1)}, {_frac(scaled.d2)}: "
             f"{'exact match' if payload['target_match'] else 'MISMATCH'}",
             f"all success flags: {report.all_success}",
             f"max residual {report.max_residual:.3g}, min rcond {report.min_rcond:.3g}"]
    if report.noisy:
        lines.append(f"MSE {report.mse:.6g}")
    lines += [f"  [{'pass' if c.passed else 'FAIL'}] {c.name}: {c.detail}"
              for c in report.feedback_checks]
    return "\n".join(lines) + "\n"


def cmd_example(args) -> str:
    runner = run_example_6243_shannon if args.variant == "shannon" else run_example_6243_dcsit
    report, used_seed = _with_reseed(lambda s: runner(s, args.mode), int(args.seed))
    if args.format == "json":
        payload = report.to_json()
        payload.update({"variant": args.variant, "seed": used_seed, "mode": str(args.mode)})
        return json.dumps(payload, indent=1) + "\n"
    passed = sum(c.passed for c in report.feedback_checks)
    lines = [f"(6,2,4,3) {args.variant} scenario, seed {used_seed}, mode {args.mode}"]
    lines += [f"  [{'pass' if c.passed else 'FAIL'}] {c.name}: {c.detail}"
              for c in report.feedback_checks]
    lines.append(f"checks passed {passed}/{len(report.feedback_checks)}")
    lines.append(f"decoded ({report.symbols_decoded[1]},{report.symbols_decoded[2]}) over "
                 f"{report.total_slots} slots; achieved {_point(report.achieved)}")
    if report.noisy:
        lines.append(f"MSE {report.mse:.6g}")
    return "\n".join(lines) + "\n"


def compare_rows(cfg: AntennaConfig) -> list:
    shannon = shannon_outer_region(cfg)
    case = classify_case(cfg)
    rows = []
    for s in FeedbackSetting:
        answer = region_for_setting(cfg, s)
        if isinstance(answer, Known):
            status, relation, reason = "Known", region_relation(answer.region, shannon).value, ""
        else:
            status, relation, reason = "Unknown", "-", answer.reason
        rows.append({"setting": s.value, "status": status, "vs_shannon": relation,
                     "condition1": condition_holds(cfg, 1), "condition2": condition_holds(cfg, 2),
                     "case": case.value, "reason": reason})
    return rows


def cmd_compare(args) -> str:
    rows = compare_rows(args.cfg)
    if args.format == "json":
        return json.dumps({"cfg": args.cfg.to_json(), "rows": rows}, indent=2) + "\n"
    if args.format == "csv":
        keys = list(rows[0])
        return "\n".join([",".join(keys)] + [",".join(str(r[k]) for k in keys)
                                             for r in rows]) + "\n"
    lines = [f"cfg {args.cfg}: {rows[0]['case']}",
             f"{'setting':<20}{'status':<9}{'vs shannon':<14}reason"]
    lines += [f"{r['setting']:<20}{r['status']:<9}{r['vs_shannon']:<14}{r['reason']}"
              for r in rows]
    return "\n".join(lines) + "\n"


def cmd_success_rate(args) -> str:
    params = _plan(args)
    rate = decode_success_rate(args.cfg, params, int(args.trials), int(args.seed))
    if args.format == "json":
        return json.dumps({"cfg": args.cfg.to_json(), "params": params.to_json(),
                           "trials": int(args.trials), "base_seed": int(args.seed),
                           "success_rate": rate}, indent=2) + "\n"
    return f"success rate {rate:.4f} over {args.trials} trials from seed {args.seed}\n"


COMMANDS = {"region": cmd_region, "plan": cmd_plan, "simulate": cmd_simulate,
            "example": cmd_example, "compare": cmd_compare, "success-rate": cmd_success_rate}


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        pre, _ = parser.parse_known_args(argv)
        config = _load_config(pre.config) if pre.config else {}
        if pre.command is None and "command" in config:
            argv = argv + [config["command"]]
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return EXIT_CONFIG
        args = _resolve(args, config)
        text = COMMANDS[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
