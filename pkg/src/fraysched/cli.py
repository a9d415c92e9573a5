"""Command-line front end: generate, schedule, validate, bench.

Exit codes: 0 success (validate: schedule feasible), 1 validation found
violations, 2 unreadable/malformed input or infeasible instance.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import benchgen, core, exclusion, multischedule, validator
from .scheduler import OrderingStrategy, schedule


def _fail(message: str, code: int = 2) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def cmd_generate(args) -> int:
    profile = benchgen.PROFILES.get(args.profile.lower())
    if profile is None:
        return _fail(
            f"unknown profile {args.profile!r}; available: "
            + ", ".join(sorted(benchgen.PROFILES))
        )
    doc = benchgen.generate_instance(profile, args.seed)
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_schedule(args) -> int:
    try:
        instance = core.read_instance(args.instance)
    except FileNotFoundError:
        return _fail(f"instance file not found: {args.instance}")
    except core.InstanceError as exc:
        return _fail(str(exc))
    try:
        strategy = OrderingStrategy.from_name(args.strategy)
    except ValueError as exc:
        return _fail(str(exc))

    try:
        result = schedule(instance, strategy)
    except core.InfeasibleSignalError as exc:
        return _fail(f"infeasible instance: {exc}")

    ms = result.multischedule
    doc = multischedule.schedule_to_dict(ms)
    Path(args.out).write_text(
        json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )

    if args.native_dir:
        out_dir = Path(args.native_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        for j in range(instance.variants.count):
            native = multischedule.extract_native_schedule(ms, j, instance.variants)
            (out_dir / f"variant{j:02d}.json").write_text(
                json.dumps(native, indent=2, sort_keys=True) + "\n", encoding="utf-8"
            )

    if args.mems_dump:
        mems = exclusion.compute_mems(instance.signals, instance.variants)
        exclusion.dump_mems_csv(mems, args.mems_dump)

    stats = {
        "strategy": strategy.value,
        "slot_count": result.slot_count,
        "wall_time_s": round(result.wall_time_s, 6),
        "signal_count": len(instance.signals),
        "variant_count": instance.variants.count,
    }
    if args.stats:
        Path(args.stats).write_text(
            json.dumps(stats, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    print(
        "scheduled {signal_count} signals / {variant_count} variants with "
        "{strategy}: {slot_count} slots in {wall_time_s:.3f} s".format(**stats)
    )
    if 0 < instance.config.static_slots < result.slot_count:
        print(
            f"warning: allocated {result.slot_count} slots but the network "
            f"declares only {instance.config.static_slots}",
            file=sys.stderr,
        )
    return 0


def cmd_validate(args) -> int:
    try:
        instance = core.read_instance(args.instance)
        sched_doc = json.loads(Path(args.schedule).read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        return _fail(f"file not found: {exc.filename}")
    except (core.InstanceError, json.JSONDecodeError) as exc:
        return _fail(str(exc))
    try:
        ms = multischedule.schedule_from_dict(sched_doc, instance)
    except multischedule.ScheduleError as exc:
        return _fail(str(exc))

    violations = validator.validate_multischedule(ms, instance)
    for v in violations:
        print(json.dumps(v.to_dict(), sort_keys=True))
    if violations:
        print(f"INFEASIBLE: {len(violations)} violation(s)", file=sys.stderr)
        return 1
    print("ok", file=sys.stderr)
    return 0


def _bench_cell(profile_name: str, seed: int, strategy_name: str) -> dict:
    row = {
        "profile": profile_name,
        "seed": seed,
        "strategy": strategy_name,
        "signal_count": "",
        "variant_count": "",
        "slot_count": "",
        "wall_time_s": "",
        "status": "ok",
    }
    try:
        doc = benchgen.generate_instance(benchgen.PROFILES[profile_name], seed)
        instance = core.load_instance(doc)
        result = schedule(instance, OrderingStrategy.from_name(strategy_name))
        row.update(
            signal_count=len(instance.signals),
            variant_count=instance.variants.count,
            slot_count=result.slot_count,
            wall_time_s=f"{result.wall_time_s:.6f}",
        )
    except Exception as exc:  # recorded, batch continues
        row["status"] = f"error: {exc}"
    return row


def cmd_bench(args) -> int:
    profiles = [p.strip().lower() for p in args.profiles.split(",") if p.strip()]
    strategies = [s.strip().lower() for s in args.strategies.split(",") if s.strip()]
    for p in profiles:
        if p not in benchgen.PROFILES:
            return _fail(f"unknown profile {p!r}")
    for s in strategies:
        try:
            OrderingStrategy.from_name(s)
        except ValueError as exc:
            return _fail(str(exc))

    cells = [
        (p, args.seed_base + i, s)
        for p in profiles
        for i in range(args.repeats)
        for s in strategies
    ]
    if args.jobs > 1 and cells:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_bench_cell, *zip(*cells)))
    else:
        rows = [_bench_cell(*cell) for cell in cells]

    fields = [
        "profile",
        "seed",
        "strategy",
        "signal_count",
        "variant_count",
        "slot_count",
        "wall_time_s",
        "status",
    ]
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)

    # per-profile mean slot counts, profiles in rows and strategies in
    # columns like the usual results-table layout
    if args.aggregate_out:
        means: dict[tuple[str, str], list[int]] = {}
        for row in rows:
            if row["status"] == "ok":
                means.setdefault((row["profile"], row["strategy"]), []).append(
                    int(row["slot_count"])
                )
        with open(args.aggregate_out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["profile"] + strategies)
            for p in profiles:
                line = [p]
                for s in strategies:
                    vals = means.get((p, s))
                    line.append(f"{sum(vals) / len(vals):.2f}" if vals else "")
                writer.writerow(line)
    print(f"wrote {len(rows)} bench rows to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fraysched",
        description="Multi-variant FlexRay static-segment schedule synthesis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a benchmark instance")
    p.add_argument("--profile", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("schedule", help="synthesize a multischedule")
    p.add_argument("instance")
    p.add_argument("--strategy", default="ffc", help="ff|ffp|ffw|ffl|ffc")
    p.add_argument("--out", default="schedule.json")
    p.add_argument("--native-dir", help="also write per-variant native schedules")
    p.add_argument("--stats", help="write a JSON stats record")
    p.add_argument("--mems-dump", help="dump exclusion matrices as CSV into DIR")
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("validate", help="check a schedule against its instance")
    p.add_argument("instance")
    p.add_argument("schedule")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("bench", help="batch-run generated benchmarks")
    p.add_argument("--profiles", default=",".join(sorted(benchgen.PROFILES)))
    p.add_argument("--strategies", default="ff,ffp,ffw,ffl,ffc")
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--seed-base", type=int, default=0)
    p.add_argument("--out", default="bench.csv")
    p.add_argument("--aggregate-out", help="write per-profile mean slot counts")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
