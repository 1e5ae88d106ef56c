"""Edge-weight constructions and the dominance-condition checker.

Weights are exact non-negative integers of arbitrary size. A WeightAssignment
covers every pair of a completed instance (padding pairs included); matrices
are stored as int64 when the theoretical maximum fits comfortably, otherwise
as Python ints in an object array.

Two positional encodings of the utility vector are provided:

* ``mixed_radix`` uses base (2*U_i + 1) per coordinate. Its weights are small
  (bounded by the product of the bases, independent of the graph size) and
  satisfy the local dominance condition checked by ``satisfies_condition``.
  Matching totals under this encoding can, however, collide or even invert
  across lexicographically distinct profiles once a profile coordinate
  exceeds its base, so a maximum-weight matching is not guaranteed to carry
  an optimal profile in every instance.
* ``lex_weights`` uses base (s*U_i + 1), where s bounds the number of matched
  original edges. Totals then encode profiles injectively and in strict
  lexicographic order, so every maximum-weight matching is profile-optimal.
  The price is that weights grow with the instance.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence, TextIO

import numpy as np

from .core import CompletedInstance, Instance, Profile
from .errors import (
    MissingDistanceError,
    ParseError,
    RankCountError,
    RankRangeError,
    ValidationError,
    WeightRangeError,
)

_INT64_SAFE = 2**62


class WeightAssignment:
    """Per-pair weights over a completed instance."""

    __slots__ = ("completed", "matrix")

    def __init__(self, completed: CompletedInstance, matrix: np.ndarray):
        matrix = np.asarray(matrix)
        if matrix.shape != (completed.a_count, completed.b_count):
            raise ValidationError(
                f"weight matrix shape {matrix.shape} does not match the "
                f"{completed.a_count}x{completed.b_count} completion"
            )
        if matrix.dtype != object:
            matrix = matrix.astype(np.int64, copy=True)
        else:
            matrix = matrix.copy()
        if matrix.size and matrix.min() < 0:
            raise ValidationError("weights must be non-negative")
        matrix.setflags(write=False)
        object.__setattr__(self, "completed", completed)
        object.__setattr__(self, "matrix", matrix)

    def __setattr__(self, name, value):
        raise AttributeError("WeightAssignment is immutable")

    def weight(self, a: int, b: int) -> int:
        return int(self.matrix[a, b])

    def max_weight(self) -> int:
        if self.matrix.size == 0:
            return 0
        return int(self.matrix.max())

    def min_weight(self) -> int:
        if self.matrix.size == 0:
            return 0
        return int(self.matrix.min())

    @classmethod
    def zeros(cls, completed: CompletedInstance) -> "WeightAssignment":
        m = np.zeros((completed.a_count, completed.b_count), dtype=np.int64)
        return cls(completed, m)

    @classmethod
    def from_edge_weights(
        cls,
        completed: CompletedInstance,
        entries: Iterable[tuple[tuple[int, int], int]],
    ) -> "WeightAssignment":
        """Zeros everywhere except the listed (pair, weight) entries."""
        items = [((int(a), int(b)), int(w)) for (a, b), w in entries]
        for (a, b), w in items:
            if not (0 <= a < completed.a_count and 0 <= b < completed.b_count):
                raise ValidationError(f"pair ({a}, {b}) outside the completion")
            if w < 0:
                raise ValidationError("weights must be non-negative")
        big = any(w >= _INT64_SAFE for _, w in items)
        dtype = object if big else np.int64
        m = np.zeros((completed.a_count, completed.b_count), dtype=dtype)
        if big:
            m += 0  # object zeros are Python ints already
        for (a, b), w in items:
            m[a, b] = w
        return cls(completed, m)


# ---------------------------------------------------------------------------
# Positional encodings
# ---------------------------------------------------------------------------


def _place_values(bases: Sequence[int]) -> list[int]:
    places = [1] * len(bases)
    for i in range(len(bases) - 2, -1, -1):
        places[i] = places[i + 1] * bases[i + 1]
    return places


def mixed_radix_bound(bounds: Sequence[int]) -> int:
    """Product of the bases (2*U_i + 1); every mixed-radix weight is below it."""
    out = 1
    for u in bounds:
        out *= 2 * int(u) + 1
    return out


def _encode(completed: CompletedInstance, bases: list[int]) -> WeightAssignment:
    inst = completed.instance
    places = _place_values(bases)
    max_weight = sum(u * p for u, p in zip(inst.bounds, places))
    na, nb = completed.a_count, completed.b_count
    if max_weight < _INT64_SAFE:
        pv = np.asarray(places, dtype=np.int64)
        w = inst.utilities @ pv
        return WeightAssignment(completed, w.reshape(na, nb))
    matrix = np.zeros((na, nb), dtype=object)
    utils = inst.utilities
    flat = matrix.reshape(-1)
    for e in range(inst.edge_count):
        row = utils[e]
        flat[e] = sum(int(row[i]) * places[i] for i in range(inst.r))
    return WeightAssignment(completed, matrix.reshape(na, nb))


def mixed_radix(completed: CompletedInstance) -> WeightAssignment:
    """Utility vector read as a mixed-radix numeral with base (2*U_i + 1).

    w(e) = sum_i u_i(e) * prod_{j>i} (2*U_j + 1). Padding pairs weigh 0, and
    every weight is strictly below ``mixed_radix_bound``. The assignment
    always passes ``satisfies_condition``.
    """
    bases = [2 * u + 1 for u in completed.instance.bounds]
    return _encode(completed, bases)


def lex_weights(
    completed: CompletedInstance, max_matched: int | None = None
) -> WeightAssignment:
    """Profile-injective encoding with base (s*U_i + 1).

    ``s`` defaults to the largest possible number of matched original edges,
    min(source sides). Totals of two matchings compare exactly like their
    profiles, so the argmax set of the induced assignment problem contains
    only profile-optimal matchings.
    """
    if max_matched is None:
        max_matched = min(completed.source_a_count, completed.source_b_count)
    s = max(int(max_matched), 0)
    bases = [s * u + 1 for u in completed.instance.bounds]
    return _encode(completed, bases)


# ---------------------------------------------------------------------------
# Dominance condition (triple scan)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Counterexample:
    """A vertex-sharing triple violating the dominance condition.

    ``edge`` beats the two pairs it would displace on profile, yet its weight
    does not exceed their combined weight.
    """

    edge: tuple[int, int]
    via_b: tuple[int, int]
    via_a: tuple[int, int]
    singleton: Profile
    displaced: Profile
    weight: int
    weight_sum: int

    def __str__(self) -> str:
        return (
            f"edge {self.edge} with profile {self.singleton.values} beats "
            f"{self.via_b}+{self.via_a} with {self.displaced.values}, but "
            f"weight {self.weight} <= {self.weight_sum}"
        )


def _check_triple(
    tup, wmat, a: int, b: int, bp: int, ap: int
) -> Counterexample | None:
    single = tup[a][b]
    left = tup[a][bp]
    right = tup[ap][b]
    displaced = tuple(x + y for x, y in zip(left, right))
    if single > displaced:
        w = int(wmat[a, b])
        ws = int(wmat[a, bp]) + int(wmat[ap, b])
        if not w > ws:
            return Counterexample(
                (a, b), (a, bp), (ap, b),
                Profile(single), Profile(displaced), w, ws,
            )
    return None


def satisfies_condition(
    completed: CompletedInstance,
    assignment: WeightAssignment,
    *,
    samples: int | None = None,
    seed: int = 0,
) -> Counterexample | None:
    """Scan vertex-sharing triples for dominance violations.

    Checks that whenever the profile of {(a, b)} lexicographically exceeds
    the profile of {(a, b'), (a', b)}, the weight of (a, b) strictly exceeds
    the weight sum of the displaced pair. Returns None when no violation is
    found, else the first violating triple in ascending (a, b, b', a') order.

    With ``samples`` set, only that many randomly drawn triples are checked
    (deterministic for a fixed seed). A None result is then *not* exhaustive.

    Note this condition constrains only pairwise displacements. It is a
    necessary ingredient of the reduction but not by itself sufficient for
    every maximum-weight matching to be profile-optimal; see the reduction
    module for how ties and carries are resolved.
    """
    na, nb = completed.a_count, completed.b_count
    if na < 2 or nb < 2:
        return None
    grid = completed.utility_grid()
    tup = [[tuple(int(x) for x in grid[a, b]) for b in range(nb)] for a in range(na)]
    wmat = assignment.matrix

    if samples is not None:
        rng = random.Random(seed)
        zero = (0,) * completed.instance.r
        for _ in range(samples):
            a = rng.randrange(na)
            b = rng.randrange(nb)
            if tup[a][b] == zero:
                continue
            bp = rng.randrange(nb)
            ap = rng.randrange(na)
            if bp == b or ap == a:
                continue
            hit = _check_triple(tup, wmat, a, b, bp, ap)
            if hit is not None:
                return hit
        return None

    zero = (0,) * completed.instance.r
    for a in range(na):
        for b in range(nb):
            if tup[a][b] == zero:
                continue  # a zero profile never beats a non-negative sum
            for bp in range(nb):
                if bp == b:
                    continue
                for ap in range(na):
                    if ap == a:
                        continue
                    hit = _check_triple(tup, wmat, a, b, bp, ap)
                    if hit is not None:
                        return hit
    return None


def condition_scan_cost(completed: CompletedInstance) -> int:
    """Number of triples an exhaustive scan would visit."""
    na, nb = completed.a_count, completed.b_count
    return na * nb * max(nb - 1, 0) * max(na - 1, 0)


# ---------------------------------------------------------------------------
# Preset weight families
# ---------------------------------------------------------------------------


def grp_weights(r: int) -> tuple[int, ...]:
    """Global-preference ladder: w[r]=1, w[r-1]=2, w[i]=w[i+1]+w[i+2]+1.

    Index 0 is rank 1. Strictly decreasing, and each entry exceeds the sum
    of the next two; consecutive ratios fall below 2 from rank r-3 upward.
    """
    if r < 2:
        raise RankCountError("the ladder needs at least 2 rank levels")
    w = [0] * r
    w[r - 1] = 1
    w[r - 2] = 2
    for i in range(r - 3, -1, -1):
        w[i] = w[i + 1] + w[i + 2] + 1
    return tuple(w)


def rm_weight_table(r: int) -> tuple[int, ...]:
    """Rank-maximal ladder 2**(r - k + 1) - 1 for rank k = 1..r."""
    if r < 1:
        raise RankCountError("need at least one rank level")
    return tuple(2 ** (r - k + 1) - 1 for k in range(1, r + 1))


def mcrm_weight(rank: int, distance: int, max_distance: int, r: int) -> int:
    """Distance-discounted rank weight (D+1)*2**(r-rank) - D - d."""
    return (max_distance + 1) * 2 ** (r - rank) - max_distance - distance


@dataclass(frozen=True)
class RankSystem:
    """Per-edge ranks, optionally with distances, for preset weight families."""

    edges: np.ndarray
    ranks: np.ndarray
    rank_count: int
    distances: np.ndarray | None = None
    max_distance: int | None = None

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        ranks = np.asarray(self.ranks, dtype=np.int64).reshape(-1)
        if ranks.shape[0] != edges.shape[0]:
            raise ValidationError("one rank per edge is required")
        if ranks.size and (ranks.min() < 1 or ranks.max() > self.rank_count):
            raise RankRangeError(
                f"ranks must lie in 1..{self.rank_count}"
            )
        edges.setflags(write=False)
        ranks.setflags(write=False)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "ranks", ranks)
        if self.distances is not None:
            if self.max_distance is None:
                raise ValidationError("distances require an explicit maximum")
            d = np.asarray(self.distances, dtype=np.int64).reshape(-1)
            if d.shape[0] != edges.shape[0]:
                raise ValidationError("one distance per edge is required")
            if d.size and (d.min() < 0 or d.max() > self.max_distance):
                raise ValidationError(
                    f"distances must lie in 0..{self.max_distance}"
                )
            d.setflags(write=False)
            object.__setattr__(self, "distances", d)

    @property
    def edge_count(self) -> int:
        return int(self.edges.shape[0])


def _scatter_weights(
    completed: CompletedInstance, ranks: RankSystem, values: np.ndarray | list[int]
) -> WeightAssignment:
    na, nb = completed.a_count, completed.b_count
    big = any(int(v) >= _INT64_SAFE for v in values)
    matrix = np.zeros((na, nb), dtype=object if big else np.int64)
    for e in range(ranks.edge_count):
        a, b = int(ranks.edges[e, 0]), int(ranks.edges[e, 1])
        if not (0 <= a < na and 0 <= b < nb):
            raise ValidationError(f"ranked pair ({a}, {b}) outside the completion")
        matrix[a, b] = int(values[e])
    return WeightAssignment(completed, matrix)


def rm_weights(
    completed: CompletedInstance, ranks: RankSystem, r: int
) -> WeightAssignment:
    """Rank-maximal preset: w(e) = 2**(r - rank(e) + 1) - 1, padding 0."""
    if ranks.rank_count > r or (ranks.ranks.size and int(ranks.ranks.max()) > r):
        raise RankRangeError(f"ranks exceed the requested {r} levels")
    table = rm_weight_table(r)
    values = [table[int(k) - 1] for k in ranks.ranks]
    return _scatter_weights(completed, ranks, values)


def mcrm_weights(
    completed: CompletedInstance, ranks: RankSystem, r: int
) -> WeightAssignment:
    """Distance-discounted preset: w(e) = (D+1)*2**(r-rank(e)) - D - d(e).

    Rejects any instance where the closed form drops to zero or below, since
    non-negative strict dominance is the whole point of the construction; in
    that case build utilities (rank indicators ..., D - d(e)) and solve the
    profile problem directly instead.
    """
    if ranks.distances is None or ranks.max_distance is None:
        raise MissingDistanceError("this family needs per-edge distances")
    if ranks.rank_count > r or (ranks.ranks.size and int(ranks.ranks.max()) > r):
        raise RankRangeError(f"ranks exceed the requested {r} levels")
    d_max = int(ranks.max_distance)
    values = []
    for e in range(ranks.edge_count):
        k = int(ranks.ranks[e])
        d = int(ranks.distances[e])
        w = mcrm_weight(k, d, d_max, r)
        if w <= 0:
            raise WeightRangeError(
                f"(rank {k}, distance {d}, max {d_max}) gives weight {w} <= 0; "
                "use rank-indicator utilities with a final (D - d) function "
                "and solve the profile problem directly"
            )
        values.append(w)
    return _scatter_weights(completed, ranks, values)


def fair_utilities(
    ranks_a: Sequence[int] | np.ndarray,
    ranks_b: Sequence[int] | np.ndarray,
    r: int,
) -> tuple[np.ndarray, tuple[int, ...]]:
    """Utility family expressing fair matching with r rank levels.

    Returns (utilities, bounds) with r+1 functions: the first is constantly 1
    (cardinality first), and function j+1 counts how many of the two
    endpoints rank the other within r - j + 1. Bounds are (1, 2, ..., 2).
    """
    ra = np.asarray(ranks_a, dtype=np.int64).reshape(-1)
    rb = np.asarray(ranks_b, dtype=np.int64).reshape(-1)
    if ra.shape != rb.shape:
        raise ValidationError("endpoint rank vectors differ in length")
    if ra.size and not (
        1 <= ra.min() and ra.max() <= r and 1 <= rb.min() and rb.max() <= r
    ):
        raise RankRangeError(f"endpoint ranks must lie in 1..{r}")
    m = ra.shape[0]
    utilities = np.zeros((m, r + 1), dtype=np.int64)
    utilities[:, 0] = 1
    for j in range(1, r + 1):
        threshold = r - j + 1
        utilities[:, j] = (ra <= threshold).astype(np.int64) + (
            rb <= threshold
        ).astype(np.int64)
    return utilities, (1,) + (2,) * r


def validate_uniform_bound(inst: Instance, w_max: int) -> bool:
    """True when every utility bound equals w_max (weight-maximal shape)."""
    return all(u == w_max for u in inst.bounds)


# ---------------------------------------------------------------------------
# Weight text format: one line per pair, "a b weight_decimal"
# ---------------------------------------------------------------------------


def format_weights(assignment: WeightAssignment) -> str:
    """Write original pairs (plus any non-zero padding weights) as text."""
    completed = assignment.completed
    out = []
    for a in range(completed.a_count):
        for b in range(completed.b_count):
            w = assignment.weight(a, b)
            if completed.is_original(a, b) or w != 0:
                out.append(f"{a} {b} {w}")
    return "\n".join(out) + ("\n" if out else "")


def write_weights(assignment: WeightAssignment, target: str | TextIO) -> None:
    text = format_weights(assignment)
    if isinstance(target, str):
        with open(target, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        target.write(text)


def read_weight_lines(source: str | TextIO) -> list[tuple[tuple[int, int], int]]:
    """Parse "a b weight" lines; comments (#) and blanks are skipped."""
    if isinstance(source, str):
        with open(source, "r", encoding="utf-8") as fh:
            return read_weight_lines(fh)
    entries: list[tuple[tuple[int, int], int]] = []
    for lineno, raw in enumerate(source, start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        fields = stripped.split()
        if len(fields) != 3:
            raise ParseError("expected 'a b weight'", lineno)
        try:
            a, b, w = int(fields[0]), int(fields[1]), int(fields[2])
        except ValueError:
            raise ParseError("fields must be integers", lineno) from None
        if w < 0:
            raise ParseError("weights must be non-negative", lineno)
        entries.append(((a, b), w))
    return entries
