import random
from fractions import Fraction

import numpy as np
import pytest

from profilematch import (
    Instance,
    MissingDistanceError,
    RankCountError,
    RankRangeError,
    RankSystem,
    ValidationError,
    WeightAssignment,
    WeightRangeError,
    complete_and_balance,
    fair_utilities,
    grp_weights,
    lex_weights,
    mcrm_weight,
    mcrm_weights,
    mixed_radix,
    mixed_radix_bound,
    rm_weight_table,
    rm_weights,
    satisfies_condition,
    validate_uniform_bound,
)
from profilematch.weights import format_weights, read_weight_lines
from conftest import make_instance, random_instance


# ---------------------------------------------------------------------------
# mixed radix
# ---------------------------------------------------------------------------


def test_mixed_radix_single_function():
    inst = make_instance({(0, 0): (2,)}, 1, 1, (3,))
    w = mixed_radix(complete_and_balance(inst))
    assert w.weight(0, 0) == 2


def test_mixed_radix_two_functions_base_three():
    inst = make_instance(
        {(0, 0): (1, 0), (0, 1): (0, 1), (1, 0): (1, 1)}, 2, 2, (1, 1)
    )
    w = mixed_radix(complete_and_balance(inst))
    assert w.weight(0, 0) == 3
    assert w.weight(0, 1) == 1
    assert w.weight(1, 0) == 4
    assert w.weight(1, 1) == 0  # padding


def test_mixed_radix_rank_ladder_r3():
    inst = make_instance(
        {(0, 0): (1, 0, 0), (0, 1): (0, 1, 0), (0, 2): (0, 0, 1)}, 1, 3, (1, 1, 1)
    )
    w = mixed_radix(complete_and_balance(inst))
    assert w.weight(0, 0) == 9
    assert w.weight(0, 1) == 3
    assert w.weight(0, 2) == 1


def test_mixed_radix_weights_below_bound():
    for seed in range(60):
        inst = random_instance(random.Random(seed), max_side=5, max_r=4, max_u=3)
        done = complete_and_balance(inst)
        w = mixed_radix(done)
        assert w.max_weight() < mixed_radix_bound(inst.bounds)


def test_mixed_radix_huge_bounds_stay_exact():
    # force the arbitrary-precision path: product of bases far beyond 64 bits
    r = 12
    bounds = (9,) * r
    edges = {(0, 0): (9,) * r, (0, 1): (0,) * (r - 1) + (1,)}
    inst = make_instance(edges, 1, 2, bounds)
    w = mixed_radix(complete_and_balance(inst))
    expected = sum(9 * 19 ** (r - 1 - i) for i in range(r))
    assert w.weight(0, 0) == expected
    assert w.weight(0, 1) == 1
    assert w.max_weight() < mixed_radix_bound(bounds)
    assert 19**r > 2**63  # the point of the test


# ---------------------------------------------------------------------------
# satisfies_condition
# ---------------------------------------------------------------------------


def test_condition_holds_for_mixed_radix_everywhere():
    for seed in range(80):
        inst = random_instance(random.Random(seed), max_side=4, max_r=4, max_u=3)
        done = complete_and_balance(inst)
        assert satisfies_condition(done, mixed_radix(done)) is None


def test_condition_violation_reported_with_first_triple():
    inst = make_instance(
        {(0, 0): (3,), (0, 1): (1,), (1, 0): (1,)}, 2, 2, (3,)
    )
    done = complete_and_balance(inst)
    w = WeightAssignment.from_edge_weights(
        done, [(((0, 0)), 1), (((0, 1)), 1), (((1, 0)), 1)]
    )
    hit = satisfies_condition(done, w)
    assert hit is not None
    assert hit.edge == (0, 0)
    assert hit.via_b == (0, 1) and hit.via_a == (1, 0)
    assert hit.singleton.values == (3,) and hit.displaced.values == (2,)
    assert hit.weight == 1 and hit.weight_sum == 2


def test_condition_vacuous_when_all_utilities_zero():
    inst = make_instance({(0, 0): (0,), (1, 1): (0,)}, 2, 2, (1,))
    done = complete_and_balance(inst)
    w = WeightAssignment.from_edge_weights(done, [((0, 0), 7), ((1, 1), 3)])
    assert satisfies_condition(done, w) is None


def test_condition_sampled_mode_finds_gross_violation():
    inst = make_instance(
        {(0, 0): (3,), (0, 1): (1,), (1, 0): (1,)}, 2, 2, (3,)
    )
    done = complete_and_balance(inst)
    w = WeightAssignment.from_edge_weights(done, [((0, 0), 1), ((0, 1), 1), ((1, 0), 1)])
    assert satisfies_condition(done, w, samples=2000, seed=1) is not None


def test_lex_weights_orders_matching_totals_like_profiles():
    from profilematch import enumerate_matchings, profile_of

    for seed in range(40):
        inst = random_instance(random.Random(seed), max_side=3)
        done = complete_and_balance(inst)
        w = lex_weights(done)
        seen = []
        for m in enumerate_matchings(inst):
            total = sum(w.weight(a, b) for a, b in m.pairs)
            seen.append((profile_of(m, inst).values, total))
        for p1, t1 in seen:
            for p2, t2 in seen:
                if p1 > p2:
                    assert t1 > t2
                elif p1 == p2:
                    assert t1 == t2


# ---------------------------------------------------------------------------
# preset families
# ---------------------------------------------------------------------------


def test_grp_ladder_values():
    assert grp_weights(4) == (7, 4, 2, 1)
    assert grp_weights(6) == (20, 12, 7, 4, 2, 1)
    assert grp_weights(2) == (2, 1)


def test_grp_requires_two_levels():
    with pytest.raises(RankCountError):
        grp_weights(1)


def test_grp_ratio_below_two_and_pair_dominance():
    for r in range(4, 13):
        w = grp_weights(r)
        for i in range(r - 3):
            assert Fraction(w[i], w[i + 1]) < 2
        for i in range(r - 2):
            assert w[i] > w[i + 1] + w[i + 2]


def test_rm_table_values():
    assert rm_weight_table(4) == (15, 7, 3, 1)
    assert rm_weight_table(1) == (1,)


def test_rm_table_ratio_exceeds_two():
    w = rm_weight_table(4)
    assert w[0] > 2 * w[1] and w[1] > 2 * w[2] and w[2] > 2 * w[3]


def test_rm_weights_scatter_and_condition():
    inst = make_instance(
        {(0, 0): (1, 0), (0, 1): (0, 1), (1, 0): (0, 1), (1, 1): (1, 0)},
        2, 2, (1, 1),
    )
    done = complete_and_balance(inst)
    ranks = RankSystem(inst.edges, np.argmax(inst.utilities, axis=1) + 1, 2)
    w = rm_weights(done, ranks, 2)
    assert w.weight(0, 0) == 3 and w.weight(0, 1) == 1
    assert satisfies_condition(done, w) is None


def test_rm_weights_rank_out_of_bounds():
    inst = make_instance({(0, 0): (1,)}, 1, 1, (1,))
    done = complete_and_balance(inst)
    ranks = RankSystem(inst.edges, [3], 3)
    with pytest.raises(RankRangeError):
        rm_weights(done, ranks, 2)


def test_mcrm_closed_form_values():
    assert mcrm_weight(1, 0, 10, 4) == 78
    assert mcrm_weight(4, 10, 10, 4) == -9  # the formula goes negative here


def test_mcrm_zero_distance_reduces_to_rank_ladder():
    for rank in range(1, 5):
        assert mcrm_weight(rank, 0, 0, 4) == 2 ** (4 - rank)


def test_mcrm_weights_reject_non_positive():
    inst = make_instance({(0, 0): (0, 0, 0, 1)}, 1, 1, (1, 1, 1, 1))
    done = complete_and_balance(inst)
    ranks = RankSystem(inst.edges, [4], 4, distances=[10], max_distance=10)
    with pytest.raises(WeightRangeError):
        mcrm_weights(done, ranks, 4)


def test_mcrm_weights_require_distances():
    inst = make_instance({(0, 0): (1,)}, 1, 1, (1,))
    done = complete_and_balance(inst)
    ranks = RankSystem(inst.edges, [1], 1)
    with pytest.raises(MissingDistanceError):
        mcrm_weights(done, ranks, 1)


def test_mcrm_weights_positive_case():
    inst = make_instance({(0, 0): (1, 0), (0, 1): (0, 1)}, 1, 2, (1, 1))
    done = complete_and_balance(inst)
    ranks = RankSystem(inst.edges, [1, 2], 2, distances=[3, 0], max_distance=5)
    w = mcrm_weights(done, ranks, 2)
    assert w.weight(0, 0) == 6 * 2 - 5 - 3
    assert w.weight(0, 1) == 6 * 1 - 5 - 0


# ---------------------------------------------------------------------------
# fair utilities
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "ra,rb,expected",
    [
        (1, 1, (1, 2, 2)),
        (1, 2, (1, 2, 1)),
        (2, 2, (1, 2, 0)),
    ],
)
def test_fair_utilities_r2_cases(ra, rb, expected):
    utils, bounds = fair_utilities([ra], [rb], 2)
    assert tuple(utils[0]) == expected
    assert bounds == (1, 2, 2)


def test_fair_utilities_bounds_shape():
    utils, bounds = fair_utilities([1, 3], [2, 1], 3)
    assert bounds == (1, 2, 2, 2)
    assert utils.shape == (2, 4)


def test_fair_utilities_rank_range():
    with pytest.raises(RankRangeError):
        fair_utilities([0], [1], 2)


def test_fair_mixed_radix_bases_are_small():
    # bases (3, 5, 5, ...): weight growth depends on r only, not the graph
    _, bounds = fair_utilities([1], [1], 4)
    assert mixed_radix_bound(bounds) == 3 * 5**4


# ---------------------------------------------------------------------------
# uniform bound, weight text format
# ---------------------------------------------------------------------------


def test_validate_uniform_bound():
    inst = make_instance({(0, 0): (1, 1, 1)}, 1, 1, (3, 3, 3))
    assert validate_uniform_bound(inst, 3)
    inst2 = make_instance({(0, 0): (1, 1, 1)}, 1, 1, (3, 2, 3))
    assert not validate_uniform_bound(inst2, 3)


def test_weight_text_roundtrip(tmp_path):
    inst = make_instance({(0, 0): (1,), (1, 1): (1,)}, 2, 2, (1,))
    done = complete_and_balance(inst)
    w = WeightAssignment.from_edge_weights(done, [((0, 0), 10**40), ((1, 1), 7)])
    path = tmp_path / "w.txt"
    path.write_text(format_weights(w))
    entries = read_weight_lines(str(path))
    assert (((0, 0)), 10**40) in entries
    back = WeightAssignment.from_edge_weights(done, entries)
    assert back.weight(0, 0) == 10**40 and back.weight(1, 1) == 7


def test_weight_assignment_rejects_negative():
    inst = make_instance({(0, 0): (1,)}, 1, 1, (1,))
    done = complete_and_balance(inst)
    with pytest.raises(ValidationError):
        WeightAssignment(done, np.asarray([[-1]]))
