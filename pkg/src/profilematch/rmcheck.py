"""Reducibility of a weighted instance to rank-maximal matching.

Two sweeps over the sorted weights are provided. The literal one compares
each weight against the sum of the two immediately preceding sorted entries,
which rejects any multiset containing duplicates (a duplicated value can
never strictly exceed its own copy). The grouped variant treats equal weights
as one rank level and compares each distinct value against the two largest
weights strictly below it, counted with multiplicity; equal-valued edges
never reject each other. On strictly distinct positive weights the two
sweeps agree.
"""

from __future__ import annotations

from collections import Counter
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import NotReducibleError, ValidationError
from .weights import RankSystem


def _as_weight_list(weights: Sequence[int]) -> list[int]:
    out = [int(w) for w in weights]
    if any(w < 0 for w in out):
        raise ValidationError("weights must be non-negative")
    return out


def is_rank_maximal(weights: Sequence[int]) -> bool:
    """Literal sweep: sort ascending, reject when w[i] <= w[i-1] + w[i-2]."""
    ws = sorted(_as_weight_list(weights))
    if not ws:
        return True
    w_i, w_j, w_k = ws[0], 0, 0
    for i in range(1, len(ws)):
        w_i, w_j, w_k = ws[i], w_i, w_j
        if w_i <= w_j + w_k:
            return False
    return True


def is_rank_maximal_grouped(weights: Sequence[int]) -> bool:
    """Grouped sweep over distinct values, duplicates forming one rank.

    For each distinct value v in ascending order, let s be the sum of the two
    largest weights strictly below v (with multiplicity, 0 when fewer exist);
    reject when v <= s.
    """
    counts = Counter(_as_weight_list(weights))
    values = sorted(counts)
    for i, v in enumerate(values):
        below: list[int] = []
        if i >= 1:
            below.extend([values[i - 1]] * min(counts[values[i - 1]], 2))
        if len(below) < 2 and i >= 2:
            below.append(values[i - 2])
        s = sum(below[:2])
        if v <= s:
            return False
    return True


def to_ranks(
    edge_weights: Mapping[tuple[int, int], int]
    | Iterable[tuple[tuple[int, int], int]],
) -> RankSystem:
    """Turn reducible weights into ranks: greatest weight is rank 1.

    Requires the grouped sweep to accept the weights; distinct values sorted
    descending define ranks 1..r and each edge receives the rank of its value.
    """
    if isinstance(edge_weights, Mapping):
        items = list(edge_weights.items())
    else:
        items = list(edge_weights)
    pairs = [(int(a), int(b)) for (a, b), _ in items]
    values = _as_weight_list([w for _, w in items])
    if not is_rank_maximal_grouped(values):
        raise NotReducibleError(
            "weights fail the grouped rank-maximal sweep; no rank system exists"
        )
    distinct = sorted(set(values), reverse=True)
    rank_of = {v: k for k, v in enumerate(distinct, start=1)}
    ranks = [rank_of[v] for v in values]
    r = max(len(distinct), 1)
    if not pairs:
        return RankSystem(
            np.zeros((0, 2), dtype=np.int64), np.zeros(0, dtype=np.int64), r
        )
    return RankSystem(np.asarray(pairs, dtype=np.int64), ranks, r)
