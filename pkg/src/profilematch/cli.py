"""Command-line front end.

Exit codes: 0 on success (including "yes" answers), 1 on domain errors and on
negative check answers (condition violated, not reducible), 2 on usage
errors. All randomness is controlled by explicit seed flags.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .core import complete_and_balance, profile_of, read_instance
from .errors import ProfileMatchingError, ValidationError
from .lottery import SynthConfig, baseline_greedy, load, report, run_mcrm, run_rm
from .lottery import synth_generate
from .oracle import brute_force_optimal
from .reduction import solve_instance, solve_instance_with
from .rmcheck import is_rank_maximal, is_rank_maximal_grouped, to_ranks
from .weights import (
    RankSystem,
    WeightAssignment,
    mcrm_weights,
    mixed_radix,
    read_weight_lines,
    rm_weights,
    satisfies_condition,
)


def _ranks_from_indicators(inst, with_distance: bool):
    """Interpret utilities as rank indicators (plus a trailing distance term)."""
    r = inst.r - 1 if with_distance else inst.r
    if r < 1:
        raise ValidationError("instance has no rank-indicator functions")
    utilities = inst.utilities[:, :r]
    if not np.all(utilities.sum(axis=1) == 1) or utilities.max(initial=0) > 1:
        raise ValidationError(
            "preset weights need rank-indicator utilities: exactly one 1 "
            "among the first functions of every edge"
        )
    ranks = np.argmax(utilities, axis=1) + 1
    distances = None
    d_max = None
    if with_distance:
        d_max = inst.bounds[-1]
        # the last function stores D - d(e)
        distances = d_max - inst.utilities[:, -1]
    return RankSystem(
        inst.edges, ranks, r, distances=distances, max_distance=d_max
    ), r


def _cmd_solve(args) -> int:
    inst = read_instance(args.instance)
    check = "skip" if args.no_check else "auto"
    max_weight = None
    if args.weights is None:
        result = solve_instance(inst)
    else:
        completed = complete_and_balance(inst)
        if args.weights == "mixed-radix":
            assignment = mixed_radix(completed)
            result = solve_instance_with(
                inst, assignment, check="skip", completed=completed
            )
        elif args.weights == "rm":
            ranks, r = _ranks_from_indicators(inst, with_distance=False)
            assignment = rm_weights(completed, ranks, r)
            result = solve_instance_with(
                inst, assignment, check=check, completed=completed,
                samples=args.samples, seed=args.seed,
            )
        elif args.weights == "mcrm":
            ranks, r = _ranks_from_indicators(inst, with_distance=True)
            assignment = mcrm_weights(completed, ranks, r)
            result = solve_instance_with(
                inst, assignment, check=check, completed=completed,
                samples=args.samples, seed=args.seed,
            )
        elif args.weights.startswith("file:"):
            entries = read_weight_lines(args.weights[len("file:"):])
            assignment = WeightAssignment.from_edge_weights(completed, entries)
            result = solve_instance_with(
                inst, assignment, check=check, completed=completed,
                samples=args.samples, seed=args.seed,
            )
        else:
            raise ValidationError(
                f"unknown weight family {args.weights!r}; use mixed-radix, "
                "rm, mcrm or file:<path>"
            )
        max_weight = result.max_weight

    if args.verify:
        recomputed = profile_of(result.matching, inst)
        if recomputed.values != result.profile.values:
            raise ValidationError("verify: recomputed profile mismatch")
    if args.oracle:
        best, _ = brute_force_optimal(inst)
        if best.values != result.profile.values:
            raise ValidationError(
                f"oracle cross-check failed: solver {result.profile.values}, "
                f"brute force {best.values}"
            )

    pairs = sorted(result.matching.pairs)
    if args.format == "json":
        doc = {
            "matching": [[a, b] for a, b in pairs],
            "profile": list(result.profile.values),
            "max_weight_decimal": None if max_weight is None else str(max_weight),
            "condition_check": result.condition_check,
            "stages": result.stages,
        }
        if args.emit == "matching":
            doc = {"matching": doc["matching"]}
        elif args.emit == "profile":
            doc = {"profile": doc["profile"]}
        print(json.dumps(doc))
    else:
        if args.emit in ("matching", "both"):
            for a, b in pairs:
                print(f"{a} {b}")
        if args.emit in ("profile", "both"):
            print("profile: " + " ".join(str(x) for x in result.profile.values))
        if max_weight is not None and args.emit == "both":
            print(f"max_weight: {max_weight}")
    return 0


def _cmd_check_weights(args) -> int:
    inst = read_instance(args.instance)
    completed = complete_and_balance(inst)
    entries = read_weight_lines(args.weights)
    assignment = WeightAssignment.from_edge_weights(completed, entries)
    hit = satisfies_condition(
        completed, assignment, samples=args.samples, seed=args.seed
    )
    if hit is None:
        mode = "sampled" if args.samples else "exhaustive"
        print(f"condition: ok ({mode})")
        return 0
    print("condition: violated")
    print(str(hit))
    return 1


def _cmd_rm_check(args) -> int:
    entries = read_weight_lines(args.weights)
    values = [w for _, w in entries]
    if args.mode == "literal":
        ok = is_rank_maximal(values)
    else:
        ok = is_rank_maximal_grouped(values)
    print(f"reducible: {'yes' if ok else 'no'}")
    if ok and args.emit_ranks:
        ranks = to_ranks(entries)
        lines = [
            f"{int(ranks.edges[e, 0])} {int(ranks.edges[e, 1])} {int(ranks.ranks[e])}"
            for e in range(ranks.edge_count)
        ]
        Path(args.emit_ranks).write_text("\n".join(lines) + "\n")
    return 0 if ok else 1


def _cmd_lottery(args) -> int:
    inst = load(args.students, args.schools)
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    known = {"baseline", "rm", "mcrm"}
    unknown = set(algos) - known
    if unknown:
        raise ValidationError(f"unknown algorithms: {sorted(unknown)}")
    reports = []
    for algo in algos:
        if algo == "baseline":
            for k in range(args.seeds):
                reports.append(baseline_greedy(inst, args.seed_base + k))
        elif algo == "rm":
            reports.append(run_rm(inst))
        else:
            reports.append(run_mcrm(inst, paper_formula=args.paper_formula))
    _, csv_text = report(reports, out_dir=args.out)
    sys.stdout.write(csv_text)
    return 0


def _cmd_gen(args) -> int:
    config = SynthConfig(
        male_students=args.male,
        female_students=args.female,
        side_units=args.side_units,
        distance_bias=args.bias,
    )
    students_path, schools_path = synth_generate(config, args.seed, args.out)
    print(students_path)
    print(schools_path)
    return 0


def _cmd_oracle(args) -> int:
    inst = read_instance(args.instance)
    best, winners = brute_force_optimal(inst)
    print("profile: " + " ".join(str(x) for x in best.values))
    print(f"optimal_matchings: {len(winners)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="profilematch",
        description="Profile-based bipartite matching tools",
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"profilematch {__version__} (exact integer arithmetic: "
        "numpy int64 with Python-int fallback)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="find a profile-optimal matching")
    p.add_argument("--instance", required=True)
    p.add_argument("--weights", default=None,
                   help="mixed-radix | rm | mcrm | file:<path>; omit for the "
                        "exact profile-first solve")
    p.add_argument("--emit", choices=["matching", "profile", "both"],
                   default="both")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--oracle", action="store_true",
                   help="cross-check against brute force (small instances)")
    p.add_argument("--verify", action="store_true",
                   help="recompute the profile from the emitted matching")
    p.add_argument("--no-check", action="store_true",
                   help="skip the dominance-condition check for user weights")
    p.add_argument("--samples", type=int, default=None,
                   help="sampled condition check size for large instances")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("check-weights", help="test the dominance condition")
    p.add_argument("--instance", required=True)
    p.add_argument("--weights", required=True)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_check_weights)

    p = sub.add_parser("rm-check", help="test reducibility to rank-maximal")
    p.add_argument("--weights", required=True)
    p.add_argument("--mode", choices=["literal", "grouped"], default="grouped")
    p.add_argument("--emit-ranks", default=None)
    p.set_defaults(func=_cmd_rm_check)

    p = sub.add_parser("lottery", help="run school-choice assignments")
    p.add_argument("--students", required=True)
    p.add_argument("--schools", required=True)
    p.add_argument("--algos", default="baseline,rm,mcrm")
    p.add_argument("--seeds", type=int, default=1,
                   help="number of baseline seeds")
    p.add_argument("--seed-base", type=int, default=1)
    p.add_argument("--paper-formula", action="store_true",
                   help="use the closed-form distance-discounted weights")
    p.add_argument("--out", default=None, help="directory for report files")
    p.set_defaults(func=_cmd_lottery)

    p = sub.add_parser("gen", help="generate a synthetic lottery instance")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--male", type=int, default=715)
    p.add_argument("--female", type=int, default=699)
    p.add_argument("--side-units", type=int, default=1000)
    p.add_argument("--bias", type=float, default=0.95)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("oracle", help="brute-force optimal profile")
    p.add_argument("--instance", required=True)
    p.set_defaults(func=_cmd_oracle)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ProfileMatchingError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
