"""Problem data model: instances, profiles, matchings, completion, improvement.

An instance is a bipartite graph with ``r`` prioritized integer utility
functions on its edges. The profile of a matching is the r-tuple of per
function utility sums, ordered lexicographically; a matching is optimal when
its profile is lexicographically maximum over all matchings.

Utilities are stored as non-negative 64-bit integers (numpy arrays); profile
sums accumulate as Python ints, so they can never overflow. All objects are
immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import enum
import io
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, TextIO

import numpy as np

from .errors import (
    LengthMismatchError,
    NotImprovingError,
    NotPerfectError,
    ParseError,
    UnknownEdgeError,
    ValidationError,
)

_MAX_GRID = 200_000_000  # a_count * b_count guard for the dense edge index


class Ordering(enum.IntEnum):
    """Result of a lexicographic profile comparison."""

    LESS = -1
    EQUAL = 0
    GREATER = 1


@dataclass(frozen=True)
class Profile:
    """An r-tuple of utility sums, compared lexicographically.

    Entries are exact Python ints. Comparison operators require equal
    lengths and raise LengthMismatchError otherwise; ``==`` between
    different lengths is simply False.
    """

    values: tuple[int, ...]

    @staticmethod
    def zero(r: int) -> "Profile":
        return Profile((0,) * r)

    def __len__(self) -> int:
        return len(self.values)

    def __add__(self, other: "Profile") -> "Profile":
        if len(self.values) != len(other.values):
            raise LengthMismatchError(
                f"cannot add profiles of lengths {len(self)} and {len(other)}"
            )
        return Profile(tuple(x + y for x, y in zip(self.values, other.values)))

    def __lt__(self, other: "Profile") -> bool:
        return cmp_profile(self, other) is Ordering.LESS

    def __le__(self, other: "Profile") -> bool:
        return cmp_profile(self, other) is not Ordering.GREATER

    def __gt__(self, other: "Profile") -> bool:
        return cmp_profile(self, other) is Ordering.GREATER

    def __ge__(self, other: "Profile") -> bool:
        return cmp_profile(self, other) is not Ordering.LESS


def cmp_profile(p: Profile, q: Profile) -> Ordering:
    """Lexicographic three-way comparison of two equal-length profiles."""
    if len(p.values) != len(q.values):
        raise LengthMismatchError(
            f"profile lengths differ: {len(p.values)} vs {len(q.values)}"
        )
    if p.values > q.values:
        return Ordering.GREATER
    if p.values < q.values:
        return Ordering.LESS
    return Ordering.EQUAL


class Matching:
    """A set of disjoint (a, b) pairs with O(1) partner lookup."""

    __slots__ = ("_pairs", "_a_to_b", "_b_to_a")

    def __init__(self, pairs: Iterable[tuple[int, int]] = ()):
        a_to_b: dict[int, int] = {}
        b_to_a: dict[int, int] = {}
        for a, b in pairs:
            a = int(a)
            b = int(b)
            if a in a_to_b or b in b_to_a:
                raise ValidationError(
                    f"pair ({a}, {b}) reuses a vertex already matched"
                )
            a_to_b[a] = b
            b_to_a[b] = a
        self._pairs = frozenset(a_to_b.items())
        self._a_to_b = a_to_b
        self._b_to_a = b_to_a

    @property
    def pairs(self) -> frozenset[tuple[int, int]]:
        return self._pairs

    @property
    def partner_of_a(self) -> dict[int, int]:
        return dict(self._a_to_b)

    @property
    def partner_of_b(self) -> dict[int, int]:
        return dict(self._b_to_a)

    def partner_a(self, a: int) -> int | None:
        return self._a_to_b.get(a)

    def partner_b(self, b: int) -> int | None:
        return self._b_to_a.get(b)

    def __contains__(self, pair: tuple[int, int]) -> bool:
        return pair in self._pairs

    def __len__(self) -> int:
        return len(self._pairs)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(sorted(self._pairs))

    def __eq__(self, other) -> bool:
        return isinstance(other, Matching) and self._pairs == other._pairs

    def __hash__(self) -> int:
        return hash(self._pairs)

    def __repr__(self) -> str:
        return f"Matching({sorted(self._pairs)!r})"


class Instance:
    """A bipartite graph with r prioritized utility functions.

    Edges are (a_index, b_index) pairs; each edge carries a vector of r
    non-negative utilities, the i-th bounded by bounds[i]. Duplicate edges
    are rejected. The instance is immutable.
    """

    __slots__ = ("a_count", "b_count", "bounds", "edges", "utilities", "_index")

    def __init__(
        self,
        a_count: int,
        b_count: int,
        bounds: Sequence[int],
        edges: Sequence[tuple[int, int]] | np.ndarray,
        utilities: Sequence[Sequence[int]] | np.ndarray,
    ):
        if a_count < 0 or b_count < 0:
            raise ValidationError("side sizes must be non-negative")
        bounds_t = tuple(int(u) for u in bounds)
        if len(bounds_t) < 1:
            raise ValidationError("at least one utility function is required")
        if any(u < 0 for u in bounds_t):
            raise ValidationError("utility bounds must be non-negative")
        if any(u >= 2**63 for u in bounds_t):
            raise ValidationError("utility bounds must fit in 64 bits")
        if a_count * b_count > _MAX_GRID:
            raise ValidationError("instance too large for the dense edge index")

        r = len(bounds_t)
        edge_arr = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        util_arr = np.asarray(utilities, dtype=np.int64).reshape(-1, r)
        m = edge_arr.shape[0]
        if util_arr.shape[0] != m:
            raise ValidationError(
                f"{m} edges but {util_arr.shape[0]} utility rows"
            )
        if m:
            if edge_arr[:, 0].min(initial=0) < 0 or edge_arr[:, 1].min(initial=0) < 0:
                raise ValidationError("negative vertex index")
            if (edge_arr[:, 0] >= a_count).any() or (edge_arr[:, 1] >= b_count).any():
                raise ValidationError("edge endpoint outside the vertex range")
            if util_arr.min(initial=0) < 0:
                raise ValidationError("utilities must be non-negative")
            too_big = util_arr > np.asarray(bounds_t, dtype=np.int64)[None, :]
            if too_big.any():
                e = int(np.nonzero(too_big.any(axis=1))[0][0])
                raise ValidationError(
                    f"edge ({edge_arr[e, 0]}, {edge_arr[e, 1]}) exceeds a utility bound"
                )

        index = np.full(a_count * b_count, -1, dtype=np.int64)
        if m:
            flat = edge_arr[:, 0] * b_count + edge_arr[:, 1]
            if np.unique(flat).size != m:
                raise ValidationError("duplicate edges are not allowed")
            index[flat] = np.arange(m, dtype=np.int64)

        edge_arr.setflags(write=False)
        util_arr.setflags(write=False)
        index.setflags(write=False)
        object.__setattr__(self, "a_count", int(a_count))
        object.__setattr__(self, "b_count", int(b_count))
        object.__setattr__(self, "bounds", bounds_t)
        object.__setattr__(self, "edges", edge_arr)
        object.__setattr__(self, "utilities", util_arr)
        object.__setattr__(self, "_index", index)

    def __setattr__(self, name, value):
        raise AttributeError("Instance is immutable")

    @property
    def r(self) -> int:
        return len(self.bounds)

    @property
    def edge_count(self) -> int:
        return int(self.edges.shape[0])

    def edge_id(self, a: int, b: int) -> int:
        """Index of edge (a, b), or -1 when absent."""
        if not (0 <= a < self.a_count and 0 <= b < self.b_count):
            return -1
        return int(self._index[a * self.b_count + b])

    def has_edge(self, a: int, b: int) -> bool:
        return self.edge_id(a, b) >= 0

    def utility(self, a: int, b: int) -> tuple[int, ...]:
        e = self.edge_id(a, b)
        if e < 0:
            raise UnknownEdgeError(f"({a}, {b}) is not an edge of the instance")
        return tuple(int(x) for x in self.utilities[e])

    def __repr__(self) -> str:
        return (
            f"Instance({self.a_count}x{self.b_count}, r={self.r}, "
            f"m={self.edge_count})"
        )


class CompletedInstance:
    """A complete-grid instance plus a marker for the original edges.

    ``instance`` covers every (a, b) pair; pairs absent from the source get
    all-zero utilities and are marked as padding. ``source_a_count`` and
    ``source_b_count`` record the dimensions before any balancing, so results
    can be restricted back.
    """

    __slots__ = ("instance", "original", "source_a_count", "source_b_count")

    def __init__(
        self,
        instance: Instance,
        original: np.ndarray,
        source_a_count: int,
        source_b_count: int,
    ):
        original = np.asarray(original, dtype=bool).reshape(-1)
        if original.shape[0] != instance.edge_count:
            raise ValidationError("original marker length mismatch")
        original.setflags(write=False)
        object.__setattr__(self, "instance", instance)
        object.__setattr__(self, "original", original)
        object.__setattr__(self, "source_a_count", int(source_a_count))
        object.__setattr__(self, "source_b_count", int(source_b_count))

    def __setattr__(self, name, value):
        raise AttributeError("CompletedInstance is immutable")

    @property
    def a_count(self) -> int:
        return self.instance.a_count

    @property
    def b_count(self) -> int:
        return self.instance.b_count

    @property
    def is_square(self) -> bool:
        return self.a_count == self.b_count

    def edge_id(self, a: int, b: int) -> int:
        # complete grid in row-major order
        return a * self.b_count + b

    def is_original(self, a: int, b: int) -> bool:
        return bool(self.original[self.edge_id(a, b)])

    def padding_pairs(self) -> list[tuple[int, int]]:
        ids = np.nonzero(~self.original)[0]
        b = self.b_count
        return [(int(i // b), int(i % b)) for i in ids]

    def utility_grid(self) -> np.ndarray:
        """Utilities as an (a_count, b_count, r) view of the grid."""
        return self.instance.utilities.reshape(
            self.a_count, self.b_count, self.instance.r
        )


def _grid_instance(
    a_count: int, b_count: int, bounds: tuple[int, ...], util_grid: np.ndarray
) -> Instance:
    aa, bb = np.meshgrid(
        np.arange(a_count, dtype=np.int64),
        np.arange(b_count, dtype=np.int64),
        indexing="ij",
    )
    edges = np.stack([aa.ravel(), bb.ravel()], axis=1)
    return Instance(a_count, b_count, bounds, edges, util_grid.reshape(-1, len(bounds)))


def complete(inst: Instance) -> CompletedInstance:
    """Extend the edge set to the full grid; added pairs get zero utilities."""
    grid = np.zeros((inst.a_count, inst.b_count, inst.r), dtype=np.int64)
    mask = np.zeros(inst.a_count * inst.b_count, dtype=bool)
    if inst.edge_count:
        flat = inst.edges[:, 0] * inst.b_count + inst.edges[:, 1]
        grid.reshape(-1, inst.r)[flat] = inst.utilities
        mask[flat] = True
    full = _grid_instance(inst.a_count, inst.b_count, inst.bounds, grid)
    return CompletedInstance(full, mask, inst.a_count, inst.b_count)


def balance(completed: CompletedInstance) -> CompletedInstance:
    """Pad the smaller side with dummy vertices until the grid is square.

    Dummy-incident pairs get zero utilities and are marked as padding, so a
    perfect matching exists and every vertex has a partner.
    """
    n = max(completed.a_count, completed.b_count)
    if completed.is_square:
        return completed
    inst = completed.instance
    grid = np.zeros((n, n, inst.r), dtype=np.int64)
    grid[: completed.a_count, : completed.b_count] = completed.utility_grid()
    mask = np.zeros((n, n), dtype=bool)
    mask[: completed.a_count, : completed.b_count] = completed.original.reshape(
        completed.a_count, completed.b_count
    )
    full = _grid_instance(n, n, inst.bounds, grid)
    return CompletedInstance(
        full, mask.ravel(), completed.source_a_count, completed.source_b_count
    )


def complete_and_balance(inst: Instance) -> CompletedInstance:
    """Canonical square completion used throughout the solve pipeline."""
    return balance(complete(inst))


def profile_of(m: Matching, inst: Instance) -> Profile:
    """Componentwise sum of edge utilities over the matching."""
    total = [0] * inst.r
    for a, b in m.pairs:
        e = inst.edge_id(a, b)
        if e < 0:
            raise UnknownEdgeError(f"({a}, {b}) is not an edge of the instance")
        row = inst.utilities[e]
        for i in range(inst.r):
            total[i] += int(row[i])
    return Profile(tuple(total))


def restrict(m: Matching, inst: Instance, completed: CompletedInstance) -> Matching:
    """Drop padding pairs, returning a matching of the source instance."""
    kept = []
    for a, b in m.pairs:
        if not (0 <= a < completed.a_count and 0 <= b < completed.b_count):
            raise UnknownEdgeError(f"({a}, {b}) outside the completed grid")
        if completed.is_original(a, b):
            kept.append((a, b))
    result = Matching(kept)
    for a, b in kept:
        if not inst.has_edge(a, b):
            raise UnknownEdgeError(
                f"original marker points at ({a}, {b}) which inst lacks"
            )
    return result


def improving_pair(
    m: Matching, completed: CompletedInstance
) -> tuple[int, int] | None:
    """First pair whose lone profile beats the two pairs it would displace.

    Requires a perfect matching on a balanced (square) completion, so both
    displaced partners exist. Scans pairs in ascending (a, b) order and
    returns the first hit, or None when the matching admits no such pair.
    Note the test is one-sided: absence of an improving pair does not by
    itself certify profile optimality.
    """
    if not completed.is_square:
        raise NotPerfectError("completion must be balanced before this check")
    n = completed.a_count
    if len(m) != n:
        raise NotPerfectError(
            f"matching covers {len(m)} of {n} vertices per side"
        )
    grid = completed.utility_grid()
    a_to_b = m.partner_of_a
    b_to_a = m.partner_of_b
    for a in range(n):
        ma = a_to_b.get(a)
        if ma is None:
            raise NotPerfectError(f"vertex a{a} is unmatched")
        for b in range(n):
            if b == ma:
                continue
            mb = b_to_a.get(b)
            if mb is None:
                raise NotPerfectError(f"vertex b{b} is unmatched")
            single = grid[a, b]
            displaced = grid[a, ma] + grid[mb, b]
            if tuple(single) > tuple(displaced):
                return (a, b)
    return None


def improve(
    m: Matching, pair: tuple[int, int], completed: CompletedInstance
) -> Matching:
    """Swap partners along an improving pair; the profile strictly grows."""
    a, b = pair
    ma = m.partner_a(a)
    mb = m.partner_b(b)
    if ma is None or mb is None:
        raise NotImprovingError(f"both endpoints of ({a}, {b}) must be matched")
    if ma == b:
        raise NotImprovingError(f"({a}, {b}) is already in the matching")
    grid = completed.utility_grid()
    single = tuple(grid[a, b])
    displaced = tuple(grid[a, ma] + grid[mb, b])
    if not single > displaced:
        raise NotImprovingError(
            f"({a}, {b}) does not improve: {single} vs displaced {displaced}"
        )
    pairs = set(m.pairs)
    pairs.discard((a, ma))
    pairs.discard((mb, b))
    pairs.add((a, b))
    pairs.add((mb, ma))
    return Matching(pairs)


# ---------------------------------------------------------------------------
# Instance text format
#
#   # comment lines and blank lines are skipped
#   a_count b_count r
#   U_1 ... U_r
#   a b u_1 ... u_r        (one line per edge)
# ---------------------------------------------------------------------------


def format_instance(inst: Instance) -> str:
    out = [f"{inst.a_count} {inst.b_count} {inst.r}"]
    out.append(" ".join(str(u) for u in inst.bounds))
    for e in range(inst.edge_count):
        a, b = inst.edges[e]
        utils = " ".join(str(int(x)) for x in inst.utilities[e])
        out.append(f"{a} {b} {utils}")
    return "\n".join(out) + "\n"


def write_instance(inst: Instance, target: str | TextIO) -> None:
    text = format_instance(inst)
    if isinstance(target, str):
        with open(target, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        target.write(text)


def _content_lines(source: TextIO) -> Iterator[tuple[int, list[str]]]:
    for lineno, raw in enumerate(source, start=1):
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            yield lineno, stripped.split()


def parse_instance(text: str) -> Instance:
    return read_instance(io.StringIO(text))


def read_instance(source: str | TextIO) -> Instance:
    if isinstance(source, str):
        with open(source, "r", encoding="utf-8") as fh:
            return read_instance(fh)

    lines = _content_lines(source)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise ParseError("empty instance file") from None
    if len(header) != 3:
        raise ParseError("header must be 'a_count b_count r'", lineno)
    try:
        a_count, b_count, r = (int(x) for x in header)
    except ValueError:
        raise ParseError("header fields must be integers", lineno) from None
    if r < 1:
        raise ParseError("r must be at least 1", lineno)

    try:
        lineno, bounds_f = next(lines)
    except StopIteration:
        raise ParseError("missing bounds line") from None
    if len(bounds_f) != r:
        raise ParseError(f"expected {r} bounds, got {len(bounds_f)}", lineno)
    try:
        bounds = [int(x) for x in bounds_f]
    except ValueError:
        raise ParseError("bounds must be integers", lineno) from None

    edges: list[tuple[int, int]] = []
    utilities: list[list[int]] = []
    for lineno, fields in lines:
        if len(fields) != 2 + r:
            raise ParseError(
                f"edge line needs 2 endpoints and {r} utilities", lineno
            )
        try:
            vals = [int(x) for x in fields]
        except ValueError:
            raise ParseError("edge fields must be integers", lineno) from None
        edges.append((vals[0], vals[1]))
        utilities.append(vals[2:])

    try:
        return Instance(
            a_count,
            b_count,
            bounds,
            np.asarray(edges, dtype=np.int64).reshape(-1, 2),
            np.asarray(utilities, dtype=np.int64).reshape(-1, r),
        )
    except ValidationError as exc:
        raise ParseError(str(exc)) from exc
