import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from monodt.boolfn import TruthTable, alternation, threshold
from monodt.corpus import random_rmdt, random_wrmdt
from monodt.models import Leaf, ModelError, MonotoneDecisionTree, Node, mdt_build
from monodt.queries import TableQuery, const_query
from monodt.stochastic import (
    HALF,
    TWO_THIRDS,
    Coin,
    M1Node,
    M2Node,
    NondetMDT_M1,
    NondetMDT_M2,
    QSet,
    QuerySetRMDT,
    RandomizedMDT,
    accept_prob_by_coin_strings,
    from_mdt,
    function_at_half,
    function_at_two_thirds,
    leaf_records,
    m1_to_m2,
    m2_to_m1,
    majority_eval,
    nmdt_build,
    nmdt_eval,
    nmdt_table,
    normal_form_parts,
    rmdt_accept_prob,
    rmdt_computes,
    rmdt_derandomize,
    rmdt_normalize,
    rmdt_to_majority_form,
    rmdt_to_wrmdt,
    wrmdt_accept_prob,
    wrmdt_to_rmdt,
)

from conftest import tables, tt

AND2, OR2, XOR2 = tt(2, "0001"), tt(2, "0111"), tt(2, "0110")
X1, X2 = TableQuery(TruthTable.var(2, 1)), TableQuery(TruthTable.var(2, 2))


def coin_majority(n, leaf_for):
    """Coin levels that reach a rejecting leaf, an accepting leaf or a copy of ``leaf_for``."""
    return RandomizedMDT(
        n,
        Coin(
            Coin(Leaf(0), Coin(Leaf(0), leaf_for)),
            Coin(Coin(Leaf(0), leaf_for), Leaf(1)),
        ),
    )


# -- nondeterministic trees --------------------------------------------------------------------------


def test_nmdt_xor2():
    t = nmdt_build(XOR2)
    assert t.height == 2 and t.branch_count == 1
    assert [nmdt_eval(t, x) for x in range(4)] == [0, 1, 1, 0]


def test_nmdt_constants_and_monotone():
    zero = nmdt_build(TruthTable.const(3, 0))
    assert zero.height == 2 and nmdt_table(zero) == TruthTable.const(3, 0)
    one = nmdt_build(TruthTable.const(3, 1))
    assert nmdt_table(one) == TruthTable.const(3, 1)
    mono = nmdt_build(threshold(3, 2))
    assert mono.branch_count == 1 and nmdt_table(mono) == threshold(3, 2)


def test_nmdt_manual_tree():
    # accept when x1 = 0 and x2 = 1, or when both are 1
    root = M1Node(((X1, 0, M1Node(((X2, 1, Leaf(1)),))), (TableQuery(AND2), 1, Leaf(1))))
    assert nmdt_table(NondetMDT_M1(2, root)) == X2.table


@given(tables())
def test_nmdt_build_properties(f):
    t = nmdt_build(f)
    assert nmdt_table(t) == f
    assert t.height == 2
    assert t.branch_count == max(1, (alternation(f) + f(0) + 1) // 2)


@given(tables())
def test_m1_m2_round_trip(f):
    t1 = nmdt_build(f)
    t2 = m1_to_m2(t1)
    assert nmdt_table(t2) == f and t2.height <= 2 * t1.height
    back = m2_to_m1(t2)
    assert nmdt_table(back) == f and back.height == t2.height


def test_m2_node_semantics():
    root = M2Node(TableQuery(OR2), ((0, Leaf(1)), (1, M2Node(TableQuery(AND2), ((0, Leaf(1)),)))))
    t = NondetMDT_M2(2, root)
    assert nmdt_table(t) == ~AND2
    assert nmdt_table(m2_to_m1(t)) == ~AND2


def test_nondet_rejects_nonmonotone():
    with pytest.raises(ModelError):
        NondetMDT_M1(2, M1Node(((TableQuery(XOR2), 1, Leaf(1)),)))


# -- randomized trees -----------------------------------------------------------------------------


def test_deterministic_tree_computes_at_both_thresholds():
    t = from_mdt(mdt_build(XOR2))
    assert t.coin_count == 0
    assert rmdt_computes(t, XOR2, HALF) and rmdt_computes(t, XOR2, TWO_THIRDS)


def test_single_coin_fails_two_thirds():
    t = RandomizedMDT(2, Coin(Leaf(0), Leaf(1)))
    assert all(rmdt_accept_prob(t, x) == HALF for x in range(4))
    assert rmdt_computes(t, TruthTable.const(2, 1), HALF)
    assert not rmdt_computes(t, TruthTable.const(2, 1), TWO_THIRDS)
    with pytest.raises(ModelError):
        function_at_two_thirds(t)


def test_coin_majority_over_query():
    # Pr(accept) is 1/4 from the all-ones branch plus 1/4 * x1 from the two query leaves
    t = coin_majority(2, Node(X1, Leaf(0), Leaf(1)))
    assert t.height == 4 and t.coin_count == 5
    assert rmdt_accept_prob(t, 0b01) == Fraction(1, 4) + Fraction(1, 8) + Fraction(1, 8)
    assert rmdt_accept_prob(t, 0b10) == Fraction(1, 4)
    assert function_at_half(t) == X1.table


def test_coin_amplified_tree_computes_at_two_thirds():
    # x1 = 0 accepts with probability 1/4 and x1 = 1 with probability 1
    leaf = Node(X1, Leaf(0), Leaf(1))
    t = RandomizedMDT(2, Node(X1, Coin(Leaf(0), Coin(Leaf(0), Leaf(1))), Coin(Leaf(1), Coin(leaf, Leaf(1)))))
    assert rmdt_computes(t, X1.table, TWO_THIRDS)
    assert function_at_two_thirds(t) == X1.table


def test_accept_prob_formula_example():
    t = RandomizedMDT(2, Node(X1, Coin(Leaf(0), Node(X2, Leaf(0), Leaf(1))), Leaf(1)))
    assert [rmdt_accept_prob(t, x) for x in range(4)] == [0, 1, HALF, 1]
    recs = leaf_records(t)
    assert [(r.label, r.coins) for r in recs] == [(0, 1), (0, 1), (1, 1), (1, 0)]


@given(st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_accept_prob_matches_coin_enumeration(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    t = random_rmdt(n, rng.randint(1, 5), rng, coin_rate=0.4, max_coins=6)
    for x in range(1 << n):
        p = rmdt_accept_prob(t, x)
        assert p == accept_prob_by_coin_strings(t, x)
        assert 0 <= p <= 1


def test_coin_enumeration_cap():
    node = Leaf(1)
    for _ in range(4):
        node = Coin(node, node)
    with pytest.raises(ValueError):
        accept_prob_by_coin_strings(RandomizedMDT(1, node), 0, max_coins=3)


def test_computes_rejects_other_theta():
    with pytest.raises(ValueError):
        rmdt_computes(RandomizedMDT(1, Leaf(0)), TruthTable.const(1, 0), Fraction(3, 4))


# -- normal form and majority -------------------------------------------------------------------


def test_normalize_deterministic_tree_has_no_coins():
    t = from_mdt(mdt_build(XOR2))
    r, parts = normal_form_parts(t)
    assert r == 0 and len(parts) == 1
    out = rmdt_normalize(t)
    assert all(rmdt_accept_prob(out, x) == rmdt_accept_prob(t, x) for x in range(4))


def test_normalize_one_coin_on_one_branch():
    t = RandomizedMDT(2, Node(X1, Coin(Leaf(0), Leaf(1)), Node(X2, Leaf(0), Leaf(1))))
    r, parts = normal_form_parts(t)
    assert r == 1 and len(parts) == 2
    out = rmdt_normalize(t)
    assert isinstance(out.root, Coin) and out.coin_count == 1
    assert [rmdt_accept_prob(out, x) for x in range(4)] == [HALF, 0, HALF, 1]


@given(st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_normalize_preserves_acceptance(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    t = random_rmdt(n, rng.randint(1, 4), rng, coin_rate=0.4, max_coins=4)
    out = rmdt_normalize(t)
    assert all(rmdt_accept_prob(out, x) == rmdt_accept_prob(t, x) for x in range(1 << n))
    r, parts = normal_form_parts(t)
    # acceptance is the fraction of coin strings whose fixed tree accepts
    for x in range(1 << n):
        hits = sum(majority_eval([MonotoneDecisionTree(n, p)], x) for p in parts)
        assert Fraction(hits, 1 << r) == rmdt_accept_prob(t, x)


def test_majority_form_examples():
    single = rmdt_to_majority_form(from_mdt(mdt_build(XOR2)))
    assert len(single) == 1 and single[0].truth_table() == XOR2
    one_coin = RandomizedMDT(2, Node(X1, Leaf(0), Coin(Leaf(1), Leaf(1))))
    trees = rmdt_to_majority_form(one_coin)
    assert len(trees) == 2
    assert all(majority_eval(trees, x) == X1.table(x) for x in range(4))


def test_majority_form_rejects_gap():
    with pytest.raises(ModelError):
        rmdt_to_majority_form(RandomizedMDT(2, Coin(Leaf(0), Leaf(1))))


@given(st.integers(0, 10**6))
@settings(max_examples=80, deadline=None)
def test_majority_form_on_corpus(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    t = random_rmdt(n, rng.randint(1, 4), rng, coin_rate=0.4, max_coins=4)
    try:
        f = function_at_two_thirds(t)
    except ModelError:
        return
    trees = rmdt_to_majority_form(t)
    assert all(majority_eval(trees, x) == f(x) for x in range(1 << n))


# -- derandomization --------------------------------------------------------------------------------


def test_derandomize_keeps_deterministic_trees():
    t = mdt_build(XOR2)
    out = rmdt_derandomize(from_mdt(t))
    assert out.truth_table() == XOR2 and out.height <= t.height


def test_derandomize_xor2_height_three():
    t = RandomizedMDT(
        2,
        Node(TableQuery(OR2), Leaf(0), Coin(Node(TableQuery(AND2), Leaf(1), Leaf(0)), Node(X1, Leaf(1), Leaf(0)))),
    )
    assert t.height == 3
    out = rmdt_derandomize(t)
    assert out.height <= 3
    assert out.truth_table() == function_at_half(t)


def test_derandomize_no_accepting_leaves():
    t = RandomizedMDT(2, Coin(Leaf(0), Node(X1, Leaf(0), Leaf(0))))
    assert rmdt_derandomize(t).truth_table() == TruthTable.const(2, 0)


@given(st.integers(0, 10**6))
@settings(max_examples=80, deadline=None)
def test_derandomize_corpus(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    t = random_rmdt(n, rng.randint(1, 4), rng, coin_rate=0.4, max_coins=5)
    out = rmdt_derandomize(t)
    assert out.height <= t.height
    assert out.truth_table() == function_at_half(t)


# -- query-set trees ---------------------------------------------------------------------------------


def test_wrmdt_repeated_query_is_deterministic():
    t = QuerySetRMDT(2, QSet((X1, X1), Leaf(0), Leaf(1)), 2)
    assert [wrmdt_accept_prob(t, x) for x in range(4)] == [0, 1, 0, 1]
    r = wrmdt_to_rmdt(t)
    assert [rmdt_accept_prob(r, x) for x in range(4)] == [0, 1, 0, 1]


def test_wrmdt_constant_half():
    zero, one = const_query(2, 0), const_query(2, 1)
    t = QuerySetRMDT(2, QSet((zero, zero, one, one), Leaf(0), Leaf(1)), 4)
    assert all(wrmdt_accept_prob(t, x) == HALF for x in range(4))
    r = wrmdt_to_rmdt(t)
    assert r.coin_count == 3 and r.height == 3
    assert all(rmdt_accept_prob(r, x) == HALF for x in range(4))


def test_wrmdt_single_query_is_plain_tree():
    t = QuerySetRMDT(2, QSet((TableQuery(AND2),), Leaf(0), Leaf(1)), 1)
    r = wrmdt_to_rmdt(t)
    assert r.coin_count == 0 and function_at_half(r) == AND2


def test_wrmdt_errors():
    with pytest.raises(ValueError):
        wrmdt_to_rmdt(QuerySetRMDT(2, QSet((X1, X1, X2), Leaf(0), Leaf(1)), 3))
    with pytest.raises(ModelError):
        QuerySetRMDT(2, QSet((X1,), Leaf(0), Leaf(1)), 2)
    with pytest.raises(ValueError):
        rmdt_to_wrmdt(RandomizedMDT(2, Leaf(1)), 3)


@given(st.integers(0, 10**6), st.sampled_from([1, 2, 4]))
@settings(max_examples=60, deadline=None)
def test_wrmdt_conversion_preserves_probability(seed, w):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    t = random_wrmdt(n, rng.randint(1, 3), w, rng)
    r = wrmdt_to_rmdt(t)
    assert r.height <= t.height * (w.bit_length())
    assert all(rmdt_accept_prob(r, x) == wrmdt_accept_prob(t, x) for x in range(1 << n))


@given(st.integers(0, 10**6), st.sampled_from([2, 4, 8]))
@settings(max_examples=60, deadline=None)
def test_rmdt_to_wrmdt_preserves_probability(seed, w):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    t = random_rmdt(n, rng.randint(1, 4), rng, coin_rate=0.4)
    q = rmdt_to_wrmdt(t, w)
    assert q.height == t.height
    assert all(wrmdt_accept_prob(q, x) == rmdt_accept_prob(t, x) for x in range(1 << n))
