import io
import random

import pytest
from hypothesis import given, strategies as st

from profilematch import (
    Instance,
    LengthMismatchError,
    Matching,
    NotImprovingError,
    NotPerfectError,
    Ordering,
    ParseError,
    Profile,
    UnknownEdgeError,
    ValidationError,
    balance,
    brute_force_optimal,
    cmp_profile,
    complete,
    complete_and_balance,
    format_instance,
    improve,
    improving_pair,
    parse_instance,
    profile_of,
    read_instance,
    restrict,
)
from conftest import make_instance, random_instance


# ---------------------------------------------------------------------------
# Instance construction and validation
# ---------------------------------------------------------------------------


def test_instance_rejects_duplicate_edges():
    with pytest.raises(ValidationError):
        Instance(2, 2, (1,), [(0, 0), (0, 0)], [[1], [0]])


def test_instance_rejects_out_of_range_utility():
    with pytest.raises(ValidationError):
        Instance(1, 1, (2,), [(0, 0)], [[3]])


def test_instance_rejects_bad_endpoint():
    with pytest.raises(ValidationError):
        Instance(2, 2, (1,), [(2, 0)], [[1]])


def test_instance_lookup():
    inst = make_instance({(0, 1): (1, 0), (1, 0): (0, 2)}, 2, 2, (1, 2))
    assert inst.has_edge(0, 1) and not inst.has_edge(0, 0)
    assert inst.utility(1, 0) == (0, 2)
    with pytest.raises(UnknownEdgeError):
        inst.utility(1, 1)


# ---------------------------------------------------------------------------
# profile_of
# ---------------------------------------------------------------------------


def test_profile_of_empty_matching_is_zero():
    inst = make_instance({(0, 0): (1, 1)}, 1, 1, (1, 1))
    assert profile_of(Matching(), inst).values == (0, 0)


def test_profile_of_adds_utility_vectors():
    inst = make_instance({(0, 0): (1, 0), (1, 1): (0, 2)}, 2, 2, (1, 2))
    m = Matching([(0, 0), (1, 1)])
    assert profile_of(m, inst).values == (1, 2)


def test_profile_of_singleton():
    inst = make_instance({(0, 0): (3, 1, 0)}, 1, 1, (3, 1, 0))
    assert profile_of(Matching([(0, 0)]), inst).values == (3, 1, 0)


def test_profile_of_unknown_pair():
    inst = make_instance({(0, 0): (1,)}, 2, 2, (1,))
    with pytest.raises(UnknownEdgeError):
        profile_of(Matching([(1, 1)]), inst)


def test_profile_additivity_over_disjoint_unions(rng):
    for seed in range(30):
        r = random.Random(seed)
        inst = random_instance(r, max_side=4)
        pairs = [(int(a), int(b)) for a, b in inst.edges]
        r.shuffle(pairs)
        left, used_a, used_b = [], set(), set()
        right = []
        for a, b in pairs:
            if a in used_a or b in used_b:
                continue
            used_a.add(a)
            used_b.add(b)
            (left if r.random() < 0.5 else right).append((a, b))
        total = profile_of(Matching(left + right), inst)
        split = profile_of(Matching(left), inst) + profile_of(Matching(right), inst)
        assert total.values == split.values


# ---------------------------------------------------------------------------
# cmp_profile
# ---------------------------------------------------------------------------


def test_cmp_first_coordinate_decides():
    assert cmp_profile(Profile((1, 0)), Profile((0, 9))) is Ordering.GREATER


def test_cmp_equal():
    assert cmp_profile(Profile((2, 5)), Profile((2, 5))) is Ordering.EQUAL


def test_cmp_second_coordinate_decides():
    assert cmp_profile(Profile((1, 3, 0)), Profile((1, 4, 9))) is Ordering.LESS


def test_cmp_length_mismatch():
    with pytest.raises(LengthMismatchError):
        cmp_profile(Profile((1,)), Profile((1, 2)))


@given(
    st.lists(st.tuples(st.integers(0, 50), st.integers(0, 50), st.integers(0, 50)),
             min_size=3, max_size=3)
)
def test_cmp_is_a_total_order(triple):
    p, q, s = (Profile(t) for t in triple)
    # antisymmetry
    if cmp_profile(p, q) is Ordering.GREATER:
        assert cmp_profile(q, p) is Ordering.LESS
    # totality
    assert cmp_profile(p, q) in (Ordering.LESS, Ordering.EQUAL, Ordering.GREATER)
    # transitivity
    if cmp_profile(p, q) is not Ordering.LESS and cmp_profile(q, s) is not Ordering.LESS:
        assert cmp_profile(p, s) is not Ordering.LESS


# ---------------------------------------------------------------------------
# Matching
# ---------------------------------------------------------------------------


def test_matching_rejects_shared_vertices():
    with pytest.raises(ValidationError):
        Matching([(0, 0), (0, 1)])
    with pytest.raises(ValidationError):
        Matching([(0, 0), (1, 0)])


def test_matching_partner_maps_are_consistent():
    m = Matching([(0, 1), (2, 0)])
    assert m.partner_a(0) == 1 and m.partner_b(1) == 0
    assert m.partner_a(2) == 0 and m.partner_b(0) == 2
    assert m.partner_a(5) is None


# ---------------------------------------------------------------------------
# complete / balance / restrict
# ---------------------------------------------------------------------------


def test_complete_is_fixpoint_on_complete_instance():
    inst = make_instance(
        {(0, 0): (1,), (0, 1): (0,), (1, 0): (1,), (1, 1): (1,)}, 2, 2, (1,)
    )
    done = complete(inst)
    assert done.instance.edge_count == 4
    assert not done.padding_pairs()


def test_complete_pads_missing_pairs_with_zero():
    inst = make_instance({(0, 0): (1,)}, 2, 2, (1,))
    done = complete(inst)
    assert done.instance.edge_count == 4
    assert len(done.padding_pairs()) == 3
    assert done.instance.utility(1, 1) == (0,)
    assert done.instance.utility(0, 0) == (1,)


def test_complete_one_by_three():
    inst = make_instance({(0, 0): (1,), (0, 2): (1,)}, 1, 3, (1,))
    done = complete(inst)
    assert done.padding_pairs() == [(0, 1)]


def test_balance_makes_square_with_padding():
    inst = make_instance({(0, 0): (1,), (0, 2): (1,)}, 1, 3, (1,))
    sq = balance(complete(inst))
    assert sq.a_count == sq.b_count == 3
    assert sq.instance.utility(2, 0) == (0,)
    assert not sq.is_original(1, 1)
    assert sq.source_a_count == 1 and sq.source_b_count == 3


def test_restrict_identity_without_padding():
    inst = make_instance({(0, 0): (1,), (1, 1): (1,)}, 2, 2, (1,))
    done = complete(inst)
    m = Matching([(0, 0), (1, 1)])
    assert restrict(m, inst, done) == m


def test_restrict_drops_padding_only_matching():
    inst = make_instance({(0, 0): (1,)}, 2, 2, (1,))
    done = complete(inst)
    assert len(restrict(Matching([(1, 1)]), inst, done)) == 0


def test_restrict_mixed():
    inst = make_instance({(0, 0): (1,), (1, 1): (1,)}, 2, 3, (1,))
    done = complete(inst)
    m = Matching([(0, 0), (1, 1)])  # wholly original here
    mixed = Matching([(0, 2), (1, 1)])  # (0, 2) is padding
    assert restrict(m, inst, done) == m
    assert restrict(mixed, inst, done) == Matching([(1, 1)])


def test_restrict_preserves_profile(rng):
    for seed in range(40):
        r = random.Random(seed)
        inst = random_instance(r)
        done = complete_and_balance(inst)
        n = done.a_count
        perm = list(range(n))
        r.shuffle(perm)
        m = Matching(list(enumerate(perm)))
        inner = restrict(m, inst, done)
        assert profile_of(inner, inst).values == profile_of(m, done.instance).values


# ---------------------------------------------------------------------------
# improving pairs
# ---------------------------------------------------------------------------


def _square(edges, n, bounds):
    return complete_and_balance(make_instance(edges, n, n, bounds))


def test_improving_pair_found():
    done = _square({(0, 0): (0,), (0, 1): (5,), (1, 0): (0,), (1, 1): (0,)}, 2, (5,))
    m = Matching([(0, 0), (1, 1)])
    assert improving_pair(m, done) == (0, 1)


def test_improving_pair_none_when_all_zero():
    done = _square({(0, 0): (0,), (0, 1): (0,), (1, 0): (0,), (1, 1): (0,)}, 2, (1,))
    assert improving_pair(Matching([(0, 0), (1, 1)]), done) is None


def test_improving_pair_requires_perfect_matching():
    done = _square({(0, 0): (1,)}, 2, (1,))
    with pytest.raises(NotPerfectError):
        improving_pair(Matching([(0, 0)]), done)


def test_optimal_matching_admits_no_improving_pair():
    for seed in range(25):
        r = random.Random(seed)
        inst = random_instance(r, max_side=3, min_side=2)
        done = complete_and_balance(inst)
        best, winners = brute_force_optimal(done.instance)
        n = done.a_count
        for m in winners:
            if len(m) != n:
                continue  # only perfect matchings enter the improvement lemma
            assert improving_pair(m, done) is None


def test_improve_applies_swap_and_raises_profile():
    done = _square({(0, 0): (0,), (0, 1): (5,), (1, 0): (0,), (1, 1): (0,)}, 2, (5,))
    m = Matching([(0, 0), (1, 1)])
    m2 = improve(m, (0, 1), done)
    assert m2 == Matching([(0, 1), (1, 0)])
    assert profile_of(m2, done.instance) > profile_of(m, done.instance)
    # partner bookkeeping after the swap
    assert m2.partner_a(0) == 1 and m2.partner_a(1) == 0


def test_improve_rejects_non_improving_pair():
    done = _square({(0, 0): (1,), (0, 1): (1,), (1, 0): (1,), (1, 1): (1,)}, 2, (1,))
    with pytest.raises(NotImprovingError):
        improve(Matching([(0, 0), (1, 1)]), (0, 1), done)


def test_iterated_improvement_reaches_the_optimum_here():
    # On this 3x3 instance, repeated improvement from the identity matching
    # terminates at the brute-force optimum. (Termination is guaranteed by the
    # strict profile increase; reaching the global optimum is not guaranteed in
    # general, see test_reduction.py for a stuck example.)
    r = random.Random(11)
    edges = {
        (a, b): (r.randint(0, 2), r.randint(0, 2))
        for a in range(3)
        for b in range(3)
    }
    inst = make_instance(edges, 3, 3, (2, 2))
    done = complete_and_balance(inst)
    m = Matching([(i, i) for i in range(3)])
    for _ in range(100):
        pair = improving_pair(m, done)
        if pair is None:
            break
        m2 = improve(m, pair, done)
        assert profile_of(m2, done.instance) > profile_of(m, done.instance)
        m = m2
    else:
        pytest.fail("improvement did not terminate")
    best, _ = brute_force_optimal(inst)
    assert profile_of(m, done.instance).values == best.values


def test_stuck_local_matching_exists_without_improving_pair():
    # Documented limitation: no improving pair does not imply optimality.
    # Here the identity matching has no improving pair yet a lex-better
    # matching exists, so local improvement alone cannot solve the problem.
    edges = {
        (0, 0): (1,), (0, 1): (1,), (1, 0): (1,), (1, 1): (0,),
    }
    inst = make_instance(edges, 2, 2, (1,))
    done = complete_and_balance(inst)
    m = Matching([(0, 0), (1, 1)])
    assert improving_pair(m, done) is None
    best, _ = brute_force_optimal(inst)
    assert profile_of(m, done.instance).values < best.values


# ---------------------------------------------------------------------------
# text round-trip
# ---------------------------------------------------------------------------


def test_instance_text_roundtrip(rng):
    for seed in range(20):
        inst = random_instance(random.Random(seed))
        text = format_instance(inst)
        back = parse_instance(text)
        assert back.a_count == inst.a_count and back.b_count == inst.b_count
        assert back.bounds == inst.bounds
        assert back.edges.tolist() == inst.edges.tolist()
        assert back.utilities.tolist() == inst.utilities.tolist()


def test_parse_skips_comments_and_blank_lines():
    text = "# instance\n\n2 2 1\n1\n0 0 1  # edge\n"
    inst = parse_instance(text)
    assert inst.edge_count == 1


def test_parse_reports_line_numbers():
    with pytest.raises(ParseError) as exc:
        parse_instance("2 2 1\n1\n0 0\n")
    assert exc.value.line == 3


def test_read_instance_from_file(tmp_path):
    path = tmp_path / "x.inst"
    path.write_text("1 1 2\n1 1\n0 0 1 1\n")
    inst = read_instance(str(path))
    assert inst.utility(0, 0) == (1, 1)
