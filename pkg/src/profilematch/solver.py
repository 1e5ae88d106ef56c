"""Exact maximum-weight assignment over arbitrary-precision integers.

The solver is an augmenting-path method with vertex potentials (Kuhn-Munkres
with slack caching), running in O(n^3). Arithmetic is exact everywhere: a
vectorized int64 path handles weights small enough that potentials provably
stay in range, and an object-dtype path with Python ints handles the rest.
Both paths execute the same algorithm with the same tie-breaking (lowest
index wins), so results are identical.

The final potentials form an optimality certificate: y_a[i] + y_b[j] >= w[i,j]
on every pair with equality on matched pairs. The solver checks it after
every run and exposes it to callers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Matching
from .errors import UnknownEdgeError, ValidationError

# int64 is used only when (n + 2) * max|w| stays below this, which keeps
# every potential and slack comfortably inside 63 bits (duals of the
# assignment problem are bounded by n times the largest absolute weight).
_INT64_HEADROOM = 2**60


class AssignmentProblem:
    """A balanced, complete max-weight assignment instance."""

    __slots__ = ("n", "matrix")

    def __init__(self, weights: Sequence[Sequence[int]] | np.ndarray):
        matrix = np.asarray(weights)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValidationError("weight matrix must be square")
        n = int(matrix.shape[0])
        if matrix.dtype == object or matrix.dtype.kind not in "iu":
            rows = [[int(x) for x in row] for row in matrix.tolist()] if n else []
            absmax = max((abs(x) for row in rows for x in row), default=0)
            if (n + 2) * max(absmax, 1) < _INT64_HEADROOM:
                matrix = np.asarray(rows, dtype=np.int64).reshape(n, n)
            else:
                matrix = np.empty((n, n), dtype=object)
                for i in range(n):
                    for j in range(n):
                        matrix[i, j] = rows[i][j]
        else:
            matrix = matrix.astype(np.int64, copy=True)
            absmax = int(np.abs(matrix).max()) if n else 0
            if (n + 2) * max(absmax, 1) >= _INT64_HEADROOM:
                obj = np.empty((n, n), dtype=object)
                for i in range(n):
                    for j in range(n):
                        obj[i, j] = int(matrix[i, j])
                matrix = obj
        matrix.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "matrix", matrix)

    def __setattr__(self, name, value):
        raise AttributeError("AssignmentProblem is immutable")

    def weight(self, a: int, b: int) -> int:
        if not (0 <= a < self.n and 0 <= b < self.n):
            raise UnknownEdgeError(f"({a}, {b}) outside the {self.n}x{self.n} grid")
        return int(self.matrix[a, b])


@dataclass(frozen=True)
class AssignmentSolution:
    """A maximum-weight perfect matching with its dual certificate."""

    matching: Matching
    row_potentials: tuple[int, ...]
    col_potentials: tuple[int, ...]
    total: int


def _huge(matrix: np.ndarray, n: int):
    if matrix.dtype == object:
        absmax = max((abs(int(x)) for x in matrix.ravel()), default=0)
        return (absmax + 1) * (4 * n + 8)
    return np.iinfo(np.int64).max


def _km(matrix: np.ndarray):
    """Run the augmenting-path phase structure; return matches + potentials."""
    n = matrix.shape[0]
    dtype = matrix.dtype
    if n == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, np.zeros(0, dtype=dtype), np.zeros(0, dtype=dtype)

    lu = matrix.max(axis=1).copy()  # row potentials, start feasible
    lv = np.zeros(n, dtype=dtype)
    row_of = np.full(n, -1, dtype=np.int64)  # column -> matched row
    col_of = np.full(n, -1, dtype=np.int64)  # row -> matched column
    huge = _huge(matrix, n)

    # Greedy seeding: give each row the first free tight column, if any.
    for i in range(n):
        slack_i = lu[i] + lv - matrix[i]
        candidates = np.nonzero((slack_i == 0) & (row_of == -1))[0]
        if candidates.size:
            j = int(candidates[0])
            row_of[j] = i
            col_of[i] = j

    for u0 in range(n):
        if col_of[u0] != -1:
            continue
        in_tree_col = np.zeros(n, dtype=bool)
        in_tree_row = np.zeros(n, dtype=bool)
        in_tree_row[u0] = True
        parent = np.full(n, -1, dtype=np.int64)
        min_slack = lu[u0] + lv - matrix[u0]
        slack_row = np.full(n, u0, dtype=np.int64)

        while True:
            masked = np.where(in_tree_col, huge, min_slack)
            j = int(np.argmin(masked))
            delta = masked[j]
            if delta > 0:
                lu[in_tree_row] -= delta
                lv[in_tree_col] += delta
                min_slack[~in_tree_col] -= delta
            in_tree_col[j] = True
            parent[j] = slack_row[j]
            i1 = int(row_of[j])
            if i1 == -1:
                while True:  # augment along the alternating tree
                    i = int(parent[j])
                    prev = int(col_of[i])
                    col_of[i] = j
                    row_of[j] = i
                    if prev == -1:
                        break
                    j = prev
                break
            in_tree_row[i1] = True
            new_slack = lu[i1] + lv - matrix[i1]
            better = (~in_tree_col) & (new_slack < min_slack)
            min_slack[better] = new_slack[better]
            slack_row[better] = i1

    return col_of, row_of, lu, lv


def solve_assignment(problem: AssignmentProblem) -> AssignmentSolution:
    """Maximum-weight perfect matching plus its dual certificate.

    Deterministic: ties are broken toward the lowest vertex index. The
    certificate is re-verified before returning.
    """
    matrix = problem.matrix
    col_of, _row_of, lu, lv = _km(matrix)
    n = problem.n
    pairs = [(i, int(col_of[i])) for i in range(n)]
    matching = Matching(pairs)
    ya = tuple(int(x) for x in lu)
    yb = tuple(int(x) for x in lv)
    total = sum(problem.weight(a, b) for a, b in pairs)
    solution = AssignmentSolution(matching, ya, yb, total)
    verify_potentials(problem, solution)
    return solution


def max_weight_matching(problem: AssignmentProblem) -> Matching:
    """The matching of ``solve_assignment``, for callers without dual needs."""
    return solve_assignment(problem).matching


def matching_weight(m: Matching, problem: AssignmentProblem) -> int:
    """Exact total weight of a matching of the problem."""
    return sum(problem.weight(a, b) for a, b in m.pairs)


def verify_potentials(
    problem: AssignmentProblem, solution: AssignmentSolution
) -> None:
    """Raise unless the potentials certify optimality of the matching.

    Checks y_a[i] + y_b[j] >= w[i, j] for every pair, equality on matched
    pairs, and that the matching is perfect. All comparisons are exact.
    """
    n = problem.n
    if len(solution.matching) != n:
        raise ValidationError("certificate check: matching is not perfect")
    matrix = problem.matrix
    if matrix.dtype == object:
        ya = np.array(solution.row_potentials, dtype=object)
        yb = np.array(solution.col_potentials, dtype=object)
    else:
        ya = np.asarray(solution.row_potentials, dtype=np.int64)
        yb = np.asarray(solution.col_potentials, dtype=np.int64)
    slack = ya[:, None] + yb[None, :] - matrix
    if n and (slack < 0).any():
        i, j = np.unravel_index(int(np.argmin(slack)), slack.shape)
        raise ValidationError(
            f"certificate check: potentials infeasible at ({i}, {j})"
        )
    for a, b in solution.matching.pairs:
        if int(slack[a, b]) != 0:
            raise ValidationError(
                f"certificate check: matched pair ({a}, {b}) is not tight"
            )
    if solution.total != sum(int(ya[i]) for i in range(n)) + sum(
        int(yb[j]) for j in range(n)
    ):
        raise ValidationError("certificate check: dual total mismatch")


def tight_pairs(problem: AssignmentProblem, solution: AssignmentSolution) -> np.ndarray:
    """Boolean grid of pairs where the certificate holds with equality.

    Perfect matchings inside this grid are exactly the maximum-weight
    matchings of the problem (complementary slackness both ways).
    """
    matrix = problem.matrix
    if matrix.dtype == object:
        ya = np.array(solution.row_potentials, dtype=object)
        yb = np.array(solution.col_potentials, dtype=object)
    else:
        ya = np.asarray(solution.row_potentials, dtype=np.int64)
        yb = np.asarray(solution.col_potentials, dtype=np.int64)
    return np.asarray((ya[:, None] + yb[None, :]) == matrix, dtype=bool)
