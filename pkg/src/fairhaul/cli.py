"""Command-line front end.

Subcommands: solve, verify, repair, classify, gen, bench, mechanism.
JSON (or CSV for bench) goes to stdout/files; logs go to stderr. Exit
codes are a stable contract: 0 success, 1 input error, 2 budget exhausted.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import fairness, generators, structure
from .errors import BudgetExceededError, FairhaulError
from .model import (
    Instance,
    allocation_costs,
    parse_allocation,
    parse_instance,
    serialize_allocation,
    serialize_instance,
)
from .nonwaste import repair_to_nonwasteful, verify_nonwasteful
from .oracle import ponw
from .solvers import ALGORITHMS, Budgets, solve

log = logging.getLogger("fairhaul")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_BUDGET = 2


def _read_instance(path: str) -> Instance:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise FairhaulError(f"cannot read {path}: {exc}") from None
    return parse_instance(data)


def _read_allocation(instance: Instance, path: str):
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise FairhaulError(f"cannot read {path}: {exc}") from None
    return parse_allocation(instance, data)


def _emit(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n")


def _budgets(args) -> Budgets:
    budgets = Budgets.from_env()
    overrides = {}
    for field_name in vars(args):
        if field_name.startswith("budget_"):
            value = getattr(args, field_name)
            if value is not None:
                overrides[field_name[len("budget_"):]] = value
    return budgets.replace(**overrides) if overrides else budgets


def _add_budget_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("budget overrides")
    for name in (
        "brute_leaves", "brute_agents", "leaf_dp_leaves",
        "leaf_dp_witness_leaves", "auto_leaf_dp_leaves", "ilp_junctions",
        "ilp_weights", "ilp_states", "star_agents", "star_max_weight",
        "star_states",
    ):
        group.add_argument(
            f"--budget-{name.replace('_', '-')}",
            dest=f"budget_{name}",
            type=int,
            default=None,
        )


# ---------------------------------------------------------------------------
# subcommands

def cmd_solve(args) -> int:
    instance = _read_instance(args.instance)
    report = solve(instance, algorithm=args.algorithm, budgets=_budgets(args))
    payload = report.to_json_dict(include_allocation=not args.no_allocation)
    if args.witness and report.allocation is not None:
        Path(args.witness).write_text(serialize_allocation(report.allocation))
        payload["witness_file"] = args.witness
    _emit(payload)
    return EXIT_OK


def cmd_verify(args) -> int:
    instance = _read_instance(args.instance)
    alloc = _read_allocation(instance, args.allocation)
    nw_ok, witness = verify_nonwasteful(instance, alloc)
    costs = allocation_costs(instance, alloc)
    payload = {
        "nonwasteful": nw_ok,
        "ef": fairness.is_ef(instance, alloc),
        "ef1": fairness.is_ef1(instance, alloc),
        "costs": [str(c) for c in costs],
        "max_cost": str(max(costs, default=Fraction(0))),
    }
    if not nw_ok:
        payload["violation"] = {"order": witness[0], "agent": witness[1]}
    _emit(payload)
    checks = args.check.split(",") if args.check else ["nw"]
    if args.fairness:
        checks.append(args.fairness)
    key = {"nw": "nonwasteful", "ef": "ef", "ef1": "ef1"}
    for c in checks:
        if c not in key:
            raise FairhaulError(f"unknown check {c!r}; use nw, ef, ef1")
    return EXIT_OK if all(payload[key[c]] for c in checks) else EXIT_INPUT


def cmd_repair(args) -> int:
    instance = _read_instance(args.instance)
    alloc = _read_allocation(instance, args.allocation)
    before = allocation_costs(instance, alloc)
    repaired = repair_to_nonwasteful(instance, alloc)
    after = allocation_costs(instance, repaired)
    if args.out:
        Path(args.out).write_text(serialize_allocation(repaired))
    _emit(
        {
            "allocation": dict(sorted(repaired.assignment.items())),
            "costs_before": [str(c) for c in before],
            "costs_after": [str(c) for c in after],
        }
    )
    return EXIT_OK


def cmd_classify(args) -> int:
    instance = _read_instance(args.instance)
    _emit(structure.classify(instance))
    return EXIT_OK


_GEN_FAMILIES = (
    "ponw-util", "spider", "3part-star", "3part-depth2", "binpack",
    "equitable-star", "random", "caterpillar",
)


def _generate(family: str, args) -> Instance:
    def elements():
        if not args.elements:
            raise FairhaulError(f"family {family} requires --elements")
        return [int(x) for x in args.elements.split(",")]

    if family == "ponw-util":
        return generators.gen_ponw_util(args.m, args.n)
    if family == "spider":
        return generators.gen_spider(args.n, args.length)
    if family == "3part-star":
        return generators.gen_3partition_star(elements())
    if family == "3part-depth2":
        return generators.gen_3partition_depth2(elements())
    if family == "binpack":
        return generators.gen_binpacking_paths(elements(), args.bins)
    if family == "equitable-star":
        return generators.gen_equitable_star(elements())
    if family == "random":
        return generators.gen_random_tree(
            args.m, max_weight=args.max_weight, seed=args.seed, agents=args.n
        )
    if family == "caterpillar":
        legs = (
            [int(x) for x in args.legs.split(",")]
            if "," in args.legs
            else int(args.legs)
        )
        return generators.gen_random_caterpillar(
            args.spine, legs, seed=args.seed, agents=args.n
        )
    raise FairhaulError(f"unknown family {family!r}")


def cmd_gen(args) -> int:
    instance = _generate(args.family, args)
    text = serialize_instance(instance)
    if args.out:
        Path(args.out).write_text(text)
        _emit({"family": args.family, "m": instance.m, "n": instance.agents,
               "out": args.out})
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _parse_sweep(spec: str) -> dict[str, list[int]]:
    out: dict[str, list[int]] = {}
    if not spec:
        return out
    for part in spec.split(","):
        key, _, rng = part.partition("=")
        if not rng:
            raise FairhaulError(f"bad sweep entry {part!r}; use key=lo:hi or key=v")
        lo, sep, hi = rng.partition(":")
        values = (
            list(range(int(lo), int(hi) + 1)) if sep else [int(lo)]
        )
        if not values:
            raise FairhaulError(f"empty sweep range in {part!r}")
        out[key.strip()] = values
    return out


def _bench_instances(args) -> list[tuple[str, Instance]]:
    sweep = _parse_sweep(args.sweep)
    family = args.family
    out: list[tuple[str, Instance]] = []
    if family == "spider":
        for n in sweep.get("n", [2]):
            for length in sweep.get("len", [2]):
                out.append((f"spider-n{n}-len{length}", generators.gen_spider(n, length)))
    elif family == "ponw-util":
        for n in sweep.get("n", [2]):
            for m in sweep.get("m", [n + 2]):
                if m > n:
                    out.append((f"ponw-n{n}-m{m}", generators.gen_ponw_util(m, n)))
    elif family == "random":
        for m in sweep.get("m", [8]):
            for i in range(args.count):
                inst = generators.gen_random_tree(
                    m, max_weight=args.max_weight, seed=args.seed + i, agents=args.n
                )
                out.append((f"random-m{m}-s{args.seed + i}", inst))
    elif family == "caterpillar":
        for spine in sweep.get("spine", [4]):
            for i in range(args.count):
                inst = generators.gen_random_caterpillar(
                    spine, args.max_legs, seed=args.seed + i, agents=args.n
                )
                out.append((f"cat-s{spine}-s{args.seed + i}", inst))
    else:
        raise FairhaulError(f"unknown bench family {family!r}")
    if not out:
        raise FairhaulError("bench family produced no instances")
    return out


def _bench_row(instance_id: str, instance: Instance, algorithm: str,
               budgets: Budgets, with_ratios: str | None) -> dict:
    cls = structure.classify(instance)
    start = time.perf_counter()
    report = solve(instance, algorithm=algorithm, budgets=budgets)
    elapsed_ms = (time.perf_counter() - start) * 1000.0
    row = {
        "instance_id": instance_id,
        "m": instance.m,
        "n": instance.agents,
        "L": cls["L"],
        "k": cls["k"],
        "psi": cls["psi"],
        "algorithm": report.algorithm,
        "share": str(report.share),
        "share_float": float(report.share),
        "wall_time_ms": f"{elapsed_ms:.3f}",
        "stats": ";".join(f"{k}={v}" for k, v in sorted(report.stats.items())),
        "ponw_pessimistic": "",
    }
    if with_ratios:
        try:
            row["ponw_pessimistic"] = str(
                ponw(instance, with_ratios).pessimistic_ratio
            )
        except (BudgetExceededError, FairhaulError) as exc:
            log.warning("skipping ratio for %s: %s", instance_id, exc)
    return row


_BENCH_COLUMNS = (
    "instance_id", "m", "n", "L", "k", "psi", "algorithm", "share",
    "wall_time_ms", "ponw_pessimistic", "stats",
)


def cmd_bench(args) -> int:
    budgets = _budgets(args)
    instances = _bench_instances(args)
    ratios = {"ponw-util": "UTIL", "spider": "EGAL"}.get(args.family)
    if not args.ratios:
        ratios = None
    jobs = max(1, args.jobs)
    work = [
        (iid, inst, args.algorithm, budgets, ratios) for iid, inst in instances
    ]
    if jobs == 1:
        rows = [_bench_row(*item) for item in work]
    else:
        from concurrent.futures import ProcessPoolExecutor

        payload = [
            (iid, serialize_instance(inst), args.algorithm, budgets, ratios)
            for iid, inst, *_ in work
        ]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_bench_row_serialized, payload))
    rows.sort(key=lambda r: (r["m"], r["n"], r["instance_id"]))
    out_path = Path(args.out)
    with out_path.open("w", newline="") as fh:
        writer = csv.DictWriter(
            fh, fieldnames=_BENCH_COLUMNS, extrasaction="ignore", lineterminator="\n"
        )
        writer.writeheader()
        writer.writerows(rows)
    payload = {"rows": len(rows), "out": str(out_path)}
    if not args.no_figure:
        from .plotting import render_bench_figure

        figure_path = str(out_path.with_suffix(".png"))
        render_bench_figure(rows, figure_path)
        payload["figure"] = figure_path
    _emit(payload)
    return EXIT_OK


def _bench_row_serialized(item) -> dict:
    iid, text, algorithm, budgets, ratios = item
    return _bench_row(iid, parse_instance(text), algorithm, budgets, ratios)


def cmd_mechanism(args) -> int:
    instance = _read_instance(args.instance)
    if args.mechanism == "round-robin":
        alloc = fairness.round_robin(instance)
    else:
        alloc = fairness.envy_cycle(instance)
    costs = allocation_costs(instance, alloc)
    if args.out:
        Path(args.out).write_text(serialize_allocation(alloc))
    _emit(
        {
            "mechanism": args.mechanism,
            "allocation": dict(sorted(alloc.assignment.items())),
            "costs": [str(c) for c in costs],
            "ef": fairness.is_ef(instance, alloc),
            "ef1": fairness.is_ef1(instance, alloc),
            "nonwasteful": verify_nonwasteful(instance, alloc)[0],
        }
    )
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairhaul",
        description="Fair assignment of delivery orders on tree road networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="compute the share and a witness")
    p_solve.add_argument("instance")
    p_solve.add_argument("--algorithm", choices=ALGORITHMS, default="auto")
    p_solve.add_argument("--witness", help="write the witness allocation here")
    p_solve.add_argument("--no-allocation", action="store_true",
                         help="omit the allocation from stdout")
    _add_budget_flags(p_solve)
    p_solve.set_defaults(func=cmd_solve)

    p_verify = sub.add_parser("verify", help="check an allocation")
    p_verify.add_argument("instance")
    p_verify.add_argument("allocation")
    p_verify.add_argument("--check", default="nw",
                          help="comma list of nw, ef, ef1 (exit 0 iff all hold)")
    p_verify.add_argument("--fairness", choices=("ef", "ef1"),
                          help="additionally require this fairness predicate")
    p_verify.set_defaults(func=cmd_verify)

    p_repair = sub.add_parser("repair", help="make an allocation non-wasteful")
    p_repair.add_argument("instance")
    p_repair.add_argument("allocation")
    p_repair.add_argument("--out", help="write the repaired allocation here")
    p_repair.set_defaults(func=cmd_repair)

    p_classify = sub.add_parser("classify", help="structural parameters")
    p_classify.add_argument("instance")
    p_classify.set_defaults(func=cmd_classify)

    p_gen = sub.add_parser("gen", help="generate an instance")
    p_gen.add_argument("--family", choices=_GEN_FAMILIES, required=True)
    p_gen.add_argument("--m", type=int, default=6)
    p_gen.add_argument("--n", type=int, default=2)
    p_gen.add_argument("--length", type=int, default=2)
    p_gen.add_argument("--elements", default="")
    p_gen.add_argument("--bins", type=int, default=2)
    p_gen.add_argument("--spine", type=int, default=4)
    p_gen.add_argument("--legs", default="2")
    p_gen.add_argument("--max-weight", type=int, default=1)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out")
    p_gen.set_defaults(func=cmd_gen)

    p_bench = sub.add_parser("bench", help="sweep a family, write CSV + figure")
    p_bench.add_argument("--family", required=True,
                         choices=("spider", "ponw-util", "random", "caterpillar"))
    p_bench.add_argument("--sweep", default="",
                         help="comma list of key=lo:hi ranges, e.g. n=1:4,len=1:4")
    p_bench.add_argument("--out", required=True, help="CSV output path")
    p_bench.add_argument("--algorithm", choices=ALGORITHMS, default="auto")
    p_bench.add_argument("--count", type=int, default=1,
                         help="instances per size for seeded families")
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--n", type=int, default=2)
    p_bench.add_argument("--max-weight", type=int, default=1)
    p_bench.add_argument("--max-legs", type=int, default=2)
    p_bench.add_argument("--jobs", type=int, default=1)
    p_bench.add_argument("--ratios", action="store_true",
                         help="add exhaustive price-of-non-wastefulness ratios")
    p_bench.add_argument("--no-figure", action="store_true")
    _add_budget_flags(p_bench)
    p_bench.set_defaults(func=cmd_bench)

    p_mech = sub.add_parser("mechanism", help="run an assignment mechanism")
    p_mech.add_argument("mechanism", choices=("round-robin", "envy-cycle"))
    p_mech.add_argument("instance")
    p_mech.add_argument("--out", help="write the allocation here")
    p_mech.set_defaults(func=cmd_mechanism)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING,
                        format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceededError as exc:
        log.error("budget exhausted: %s", exc)
        return EXIT_BUDGET
    except FairhaulError as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    except ValueError as exc:
        log.error("%s", exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
