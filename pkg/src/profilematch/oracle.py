"""Brute-force ground truth on small instances.

Everything here enumerates matchings directly (recursive include/exclude with
incident-vertex masking) and never touches the solver or the reduction, so it
can serve as an independent check for both.
"""

from __future__ import annotations

from typing import Iterator

from .core import Instance, Matching, Profile, profile_of
from .errors import TooLargeError
from .weights import WeightAssignment

MAX_ORACLE_EDGES = 24


def _guard(inst: Instance) -> None:
    if inst.edge_count > MAX_ORACLE_EDGES:
        raise TooLargeError(
            f"{inst.edge_count} edges exceed the enumeration guard "
            f"({MAX_ORACLE_EDGES})"
        )


def enumerate_matchings(inst: Instance) -> Iterator[Matching]:
    """Yield every matching of the instance exactly once, empty one included.

    Deterministic order: edges are considered in instance order, exclusion
    branch first.
    """
    _guard(inst)
    edges = [(int(a), int(b)) for a, b in inst.edges]
    m = len(edges)
    chosen: list[tuple[int, int]] = []
    used_a: set[int] = set()
    used_b: set[int] = set()

    def rec(i: int) -> Iterator[Matching]:
        if i == m:
            yield Matching(chosen)
            return
        yield from rec(i + 1)
        a, b = edges[i]
        if a not in used_a and b not in used_b:
            chosen.append((a, b))
            used_a.add(a)
            used_b.add(b)
            yield from rec(i + 1)
            chosen.pop()
            used_a.discard(a)
            used_b.discard(b)

    yield from rec(0)


def brute_force_optimal(inst: Instance) -> tuple[Profile, tuple[Matching, ...]]:
    """Lexicographically maximum profile and all matchings attaining it."""
    best: Profile | None = None
    winners: list[Matching] = []
    for m in enumerate_matchings(inst):
        p = profile_of(m, inst)
        if best is None or p > best:
            best = p
            winners = [m]
        elif p.values == best.values:
            winners.append(m)
    assert best is not None  # the empty matching always exists
    return best, tuple(winners)


def brute_force_max_weight(
    inst: Instance, assignment: WeightAssignment
) -> tuple[int, tuple[Matching, ...]]:
    """Maximum total weight over all matchings and the attaining set.

    Pairs are weighed through the assignment, so instances and assignments
    built over the same completion line up by construction.
    """
    _guard(inst)
    best: int | None = None
    winners: list[Matching] = []
    for m in enumerate_matchings(inst):
        w = sum(assignment.weight(a, b) for a, b in m.pairs)
        if best is None or w > best:
            best = w
            winners = [m]
        elif w == best:
            winners.append(m)
    assert best is not None
    return best, tuple(winners)
