"""Profile-optimal matching by reduction to exact assignment solves.

``optimal_matching`` finds a lexicographically optimal matching. It completes
and balances the graph, then runs one assignment solve per coordinate group:
each group is encoded with the profile-injective bases (s*U_i + 1) from
``weights.lex_weights``, and after each solve the search is restricted to the
tight pairs of the dual certificate. Perfect matchings of the tight subgraph
are exactly the maximum-weight matchings of that stage, so each stage narrows
the candidate set to the matchings that are lexicographically optimal in all
coordinates seen so far. The result is provably profile-optimal for any
instance, with no reliance on tie-breaking.

``optimal_matching_with`` solves under a caller-supplied weight assignment
(after checking the dominance condition, unless told not to) and then applies
the same lexicographic refinement inside the maximum-weight face. It returns
a genuine maximum-weight matching whose profile is lexicographically best
among all maximum-weight matchings. For weight families that order matchings
consistently with profiles this is the optimal matching; for weights that
merely pass the pairwise dominance condition, optimality of the weight-argmax
set itself is not guaranteed (small counterexamples exist and are pinned in
the test suite), which is why the profile-first entry point above never
routes through user-style weights.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    CompletedInstance,
    Instance,
    Matching,
    Profile,
    complete_and_balance,
    profile_of,
    restrict,
)
from .errors import ConditionViolatedError, ValidationError
from .solver import AssignmentProblem, AssignmentSolution, solve_assignment, tight_pairs
from .weights import (
    WeightAssignment,
    _place_values,
    condition_scan_cost,
    satisfies_condition,
)

_INT64_SAFE = 2**62
_AUTO_EXHAUSTIVE_COST = 2_000_000
_AUTO_SAMPLES = 200_000


@dataclass(frozen=True)
class ReduceResult:
    """Outcome of a reduction solve, with provenance metadata."""

    matching: Matching
    profile: Profile
    condition_check: str  # "exhaustive" | "sampled" | "skipped" | "none"
    stages: int
    max_weight: int | None = None  # total under the supplied weights, if any


def _stage_budget(n: int) -> int:
    # Largest per-stage weight V such that the masked matrix (penalty about
    # n*V) still rides the solver's int64 fast path with wide margin.
    return max((2**60 // (n + 3)) // (n + 3), 1)


def _coordinate_groups(bounds: tuple[int, ...], s: int, n: int) -> list[list[int]]:
    """Pack priority-ordered coordinates into stages of bounded weight."""
    budget = _stage_budget(max(n, 1))
    groups: list[list[int]] = []
    cur: list[int] = []
    prod = 1
    for i, u in enumerate(bounds):
        if u == 0:
            continue  # the coordinate is constant zero; nothing to optimize
        base = s * u + 1
        if cur and prod * base > budget:
            groups.append(cur)
            cur, prod = [], 1
        cur.append(i)
        prod *= base
        if prod > budget:  # a single oversized coordinate gets its own stage
            groups.append(cur)
            cur, prod = [], 1
    if cur:
        groups.append(cur)
    return groups


def _group_matrix(
    completed: CompletedInstance, coords: list[int], s: int
) -> tuple[np.ndarray, int]:
    """Grid weights encoding the selected coordinates injectively."""
    inst = completed.instance
    bases = [s * inst.bounds[i] + 1 for i in coords]
    places = _place_values(bases)
    vmax = sum(inst.bounds[i] * p for i, p in zip(coords, places))
    na, nb = completed.a_count, completed.b_count
    if vmax < _INT64_SAFE:
        pv = np.asarray(places, dtype=np.int64)
        w = inst.utilities[:, coords] @ pv
        return w.reshape(na, nb), vmax
    grid = np.zeros((na, nb), dtype=object)
    flat = grid.reshape(-1)
    utils = inst.utilities
    for e in range(inst.edge_count):
        flat[e] = sum(int(utils[e, i]) * p for i, p in zip(coords, places))
    return grid, vmax


def _stage_solve(
    grid: np.ndarray, vmax: int, allowed: np.ndarray
) -> tuple[AssignmentSolution, np.ndarray]:
    """Solve one stage restricted to ``allowed`` pairs; return its face."""
    n = grid.shape[0]
    penalty = -(n * vmax + 1)
    if grid.dtype == object:
        masked = np.where(allowed, grid, penalty)
    else:
        masked = np.where(allowed, grid, np.int64(penalty))
    problem = AssignmentProblem(masked)
    solution = solve_assignment(problem)
    for a, b in solution.matching.pairs:
        if not allowed[a, b]:
            raise ValidationError(
                "stage solve left the allowed face; no feasible matching"
            )
    face = tight_pairs(problem, solution) & allowed
    return solution, face


def _lex_refine(
    completed: CompletedInstance,
    allowed: np.ndarray,
    solution: AssignmentSolution | None,
) -> tuple[AssignmentSolution, int]:
    """Refine lexicographically over coordinate groups within ``allowed``."""
    n = completed.a_count
    s = min(completed.source_a_count, completed.source_b_count)
    groups = _coordinate_groups(completed.instance.bounds, s, n)
    stages = 0
    for coords in groups:
        grid, vmax = _group_matrix(completed, coords, s)
        solution, allowed = _stage_solve(grid, vmax, allowed)
        stages += 1
    if solution is None:  # every coordinate is constant; any perfect matching
        grid = np.zeros((n, n), dtype=np.int64)
        solution, allowed = _stage_solve(grid, 0, allowed)
        stages += 1
    return solution, stages


def solve_instance(
    inst: Instance, *, completed: CompletedInstance | None = None
) -> ReduceResult:
    """Profile-optimal matching of the instance, with solve metadata.

    ``completed`` may supply a precomputed ``complete_and_balance(inst)`` to
    avoid rebuilding the grid.
    """
    if completed is None:
        completed = complete_and_balance(inst)
    n = completed.a_count
    allowed = np.ones((n, n), dtype=bool)
    solution, stages = _lex_refine(completed, allowed, None)
    matched = restrict(solution.matching, inst, completed)
    return ReduceResult(
        matching=matched,
        profile=profile_of(matched, inst),
        condition_check="none",
        stages=stages,
    )


def optimal_matching(inst: Instance) -> tuple[Matching, Profile]:
    """A matching whose profile is lexicographically maximum, plus the profile."""
    result = solve_instance(inst)
    return result.matching, result.profile


def _aligned_matrix(
    assignment: WeightAssignment, completed: CompletedInstance, inst: Instance
) -> np.ndarray:
    src = assignment.completed
    if (src.source_a_count, src.source_b_count) != (inst.a_count, inst.b_count):
        raise ValidationError(
            "weight assignment was built for a different instance shape"
        )
    n = completed.a_count
    matrix = assignment.matrix
    if matrix.shape == (n, n):
        return matrix
    out = np.zeros((n, n), dtype=matrix.dtype)
    out[: matrix.shape[0], : matrix.shape[1]] = matrix
    return out


def solve_instance_with(
    inst: Instance,
    assignment: WeightAssignment,
    *,
    check: str = "auto",
    samples: int | None = None,
    seed: int = 0,
    completed: CompletedInstance | None = None,
) -> ReduceResult:
    """Maximum-weight solve under supplied weights, refined lexicographically.

    ``check`` is one of "auto", "exhaustive", "sampled", "skip". The dominance
    condition is verified on the balanced completion before solving (auto
    picks exhaustive when the triple scan is small enough, else sampled) and
    a violation raises ConditionViolatedError carrying the triple. The
    returned matching attains the exact maximum total weight; among all
    matchings doing so, its profile is lexicographically maximal.
    """
    if completed is None:
        completed = complete_and_balance(inst)
    n = completed.a_count
    matrix = _aligned_matrix(assignment, completed, inst)
    square = WeightAssignment(completed, matrix)

    if check not in ("auto", "exhaustive", "sampled", "skip"):
        raise ValidationError(f"unknown check mode {check!r}")
    mode = check
    if mode == "auto":
        mode = (
            "exhaustive"
            if condition_scan_cost(completed) <= _AUTO_EXHAUSTIVE_COST
            else "sampled"
        )
    if mode == "skip":
        check_label = "skipped"
    else:
        kwargs = {}
        if mode == "sampled":
            kwargs = {"samples": samples or _AUTO_SAMPLES, "seed": seed}
        hit = satisfies_condition(completed, square, **kwargs)
        if hit is not None:
            raise ConditionViolatedError(
                f"weights violate the dominance condition: {hit}", hit
            )
        check_label = mode

    allowed = np.ones((n, n), dtype=bool)
    vmax = max(square.max_weight(), 0)
    base_solution, allowed = _stage_solve(square.matrix, vmax, allowed)
    solution, stages = (
        _lex_refine(completed, allowed, base_solution)
        if completed.instance.edge_count
        else (base_solution, 0)
    )
    matched = restrict(solution.matching, inst, completed)
    return ReduceResult(
        matching=matched,
        profile=profile_of(matched, inst),
        condition_check=check_label,
        stages=stages + 1,
        max_weight=base_solution.total,
    )


def optimal_matching_with(
    inst: Instance,
    assignment: WeightAssignment,
    *,
    check: str = "auto",
    samples: int | None = None,
    seed: int = 0,
) -> tuple[Matching, Profile]:
    """Matching and profile from ``solve_instance_with``."""
    result = solve_instance_with(
        inst, assignment, check=check, samples=samples, seed=seed
    )
    return result.matching, result.profile
