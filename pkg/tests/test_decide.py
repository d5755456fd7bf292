import random
from fractions import Fraction

import pytest
from hypothesis import given, settings

from gfodd.combine import BinaryOp, apply, complement
from gfodd.core import (AggregationList, Diagram, DiagramBuilder, Eq, GFODD, GfoddError, Interpretation, Node,
                        Pred, Signature, Var, constant_gfodd)
from gfodd.decide import (Answer, SearchBudget, count_interpretations, edge_removal_check,
                          enumerate_interpretations, fodd_sat, gfodd_equiv, gfodd_sat, gfodd_value,
                          search_space_size, small_model_bound, verify_edge_removal_shape, zero_like)
from gfodd.evaluate import eval_map
from gfodd.reductions import (Cnf, I_STAR, Qbf, gen_3sat, gen_hampath, gen_qbf_equiv_simple, gen_value_instance)
from gfodd.sampling import PLAIN_SIGNATURE, random_gfodd

from reference import all_interpretations, ref_map
from strategies import gfodds

x, y = Var("x"), Var("y")
P = Signature((("p", 1),))


def p_fodd(true_leaf=1, false_leaf=0, op="max", sig=P):
    b = DiagramBuilder()
    t, f = b.leaf(true_leaf), b.leaf(false_leaf)
    return GFODD(AggregationList.of(f"{op} x"), b.build(b.node(Pred("p", (x,)), t, f)), sig)


# -- enumeration ------------------------------------------------------------

@pytest.mark.parametrize("sig,n,count", [
    (Signature((("p", 1),)), 2, 4),
    (Signature((("E", 2),)), 2, 16),
    (Signature((("p", 1),), ("c",)), 2, 8),
    (Signature((("s", 0),)), 3, 2),
])
def test_enumeration_counts(sig, n, count):
    found = list(enumerate_interpretations(sig, n))
    assert len(found) == count == count_interpretations(sig, n)
    assert len(set(found)) == count
    assert set(found) == set(all_interpretations(sig, n))


def test_enumeration_is_deterministic():
    sig = Signature((("p", 1), ("E", 2)), ("c",))
    assert list(enumerate_interpretations(sig, 2)) == list(enumerate_interpretations(sig, 2))
    assert search_space_size(sig, 2) == 1 * 2 * 2 + 2 * 4 * 16


# -- satisfiability ---------------------------------------------------------

def test_leaf_one_is_satisfiable():
    out = gfodd_sat(constant_gfodd(1), SearchBudget(1))
    assert out.answer is Answer.YES and out.witness.domain_size == 1


def test_unsatisfiable_conjunction_exhausts_twenty_interpretations():
    sig = Signature((("p", 1), ("r", 1)))
    everyone = p_fodd(op="min", sig=sig)
    someone_not = p_fodd(0, 1, op="max", sig=sig)
    g = apply(everyone, someone_not, BinaryOp.AND)
    out = gfodd_sat(g, SearchBudget(2))
    assert out.answer is Answer.NO
    assert out.examined == 20


def test_sat_requires_binary_leaves():
    with pytest.raises(GfoddError):
        gfodd_sat(p_fodd(2, 0), SearchBudget(1))


def test_satisfiable_3cnf_gives_satisfiable_fodd():
    f = Cnf(4, ((1, -2, 4), (-1, 2, 3), (1, 3, -4)))
    out = gfodd_sat(gen_3sat(f), SearchBudget(2))
    assert out.answer is Answer.YES
    assert eval_map(gen_3sat(f), out.witness) == 1


def test_fodd_sat_examples():
    ham = fodd_sat(gen_hampath(3))
    assert ham.answer is Answer.YES and ham.witness.domain_size <= 3
    b = DiagramBuilder()
    one, zero = b.leaf(1), b.leaf(0)
    neq = GFODD(AggregationList.of("max x", "max y"), b.build(b.node(Eq(x, y), zero, one)), Signature())
    out = fodd_sat(neq)
    assert out.answer is Answer.YES and out.witness.domain_size == 2
    assert fodd_sat(constant_gfodd(0)).answer is Answer.NO
    with pytest.raises(GfoddError):
        fodd_sat(p_fodd(op="min"))


def test_fodd_sat_respects_small_model_bound():
    g = gen_hampath(3)
    assert small_model_bound(g) == 3
    out = fodd_sat(g)
    assert out.examined <= search_space_size(g.signature, 3)
    none = fodd_sat(GFODD(g.aggregation, g.diagram.map_leaves(lambda v: 0 * v), g.signature))
    assert none.examined == search_space_size(g.signature, 3)


# -- value ------------------------------------------------------------------

def test_value_examples():
    half = constant_gfodd(Fraction(1, 2))
    assert gfodd_value(half, SearchBudget(2), Fraction(1, 2)).answer is Answer.YES
    assert gfodd_value(half, SearchBudget(2), 1).answer is Answer.NO
    with pytest.raises(GfoddError):
        gfodd_value(half, SearchBudget(1), -1)


def test_value_instance_of_equivalent_inputs_never_hits_one():
    g = p_fodd()
    b, target = gen_value_instance(g, g)
    assert gfodd_value(b, SearchBudget(3), target).answer is Answer.NO


def test_value_is_exact_not_threshold():
    g = p_fodd(2, 1)
    assert gfodd_value(g, SearchBudget(2), 1).answer is Answer.YES
    assert gfodd_value(g, SearchBudget(2), Fraction(3, 2)).answer is Answer.NO


# -- equivalence ------------------------------------------------------------

def test_equiv_examples():
    g = p_fodd()
    assert gfodd_equiv(g, g, SearchBudget(3)).answer is Answer.YES
    out = gfodd_equiv(constant_gfodd(0), constant_gfodd(1), SearchBudget(1))
    assert out.answer is Answer.NO
    cx = out.counterexample
    assert cx.interpretation.domain_size == 1 and (cx.value1, cx.value2) == (0, 1)
    with pytest.raises(GfoddError):
        gfodd_equiv(g, constant_gfodd(1), SearchBudget(1))


def test_equiv_on_true_qbf_pair_at_three_objects():
    q = Qbf((("forall", 1), ("exists", 2), ("forall", 3)), Cnf(3, ((1, 2, 3), (-1, -2, 3))))
    b1, b, n = gen_qbf_equiv_simple(q)
    assert gfodd_equiv(b1, b, SearchBudget(3)).answer is Answer.YES


def test_equiv_warns_on_different_lists(caplog):
    gfodd_equiv(p_fodd(), p_fodd(op="min"), SearchBudget(1))
    assert "different aggregation" in caplog.text


def test_budget_exhaustion_is_distinct_from_no():
    g = p_fodd()
    capped = gfodd_equiv(g, g, SearchBudget(3, max_interpretations=3))
    assert capped.answer is Answer.BUDGET_EXHAUSTED and capped.examined == 3
    timed = gfodd_sat(constant_gfodd(0), SearchBudget(3, time_limit=0.0))
    assert timed.answer is Answer.BUDGET_EXHAUSTED
    with pytest.raises(GfoddError):
        SearchBudget(0)


def test_parallel_search_matches_sequential():
    rng = random.Random(2)
    for _ in range(2):
        g1 = random_gfodd(rng, PLAIN_SIGNATURE, binary=True)
        g2 = random_gfodd(rng, PLAIN_SIGNATURE, binary=True)
        seq = gfodd_equiv(g1, g2, SearchBudget(2))
        par = gfodd_equiv(g1, g2, SearchBudget(2, jobs=2))
        assert seq.answer is par.answer
        assert seq.counterexample == par.counterexample
        assert seq.examined == par.examined


# -- edge removal -----------------------------------------------------------

def _dominated_pair():
    """eq(x,y) with identical p(x) tests on both sides; dropping the false side is harmless."""
    b = DiagramBuilder()
    one, zero = b.leaf(1), b.leaf(0)
    left = b.node(Pred("p", (x,)), one, zero)
    right = b.node(Pred("p", (x,)), one, zero)
    root = b.node(Eq(x, y), left, right)
    d1 = b.build(root)
    nodes = list(d1.nodes)
    nodes[root] = Node(Eq(x, y), left, zero)
    agg = AggregationList.of("max x", "max y")
    return GFODD(agg, d1, P), GFODD(agg, Diagram(tuple(nodes), root), P), root


def test_shape_examples():
    g1, g2, root = _dominated_pair()
    assert verify_edge_removal_shape(g1, g2) == (root, False)
    assert verify_edge_removal_shape(g1, g1) is None
    nodes = list(g2.diagram.nodes)
    zero = [k for k, n in enumerate(nodes) if getattr(n, "value", None) == 0][0]
    nodes[root] = Node(Eq(x, y), zero, zero)
    both = GFODD(g1.aggregation, Diagram(tuple(nodes), root), P)
    assert verify_edge_removal_shape(g1, both) is None


def test_edge_removal_check_examples():
    g1, g2, _ = _dominated_pair()
    assert edge_removal_check(g1, g2, SearchBudget(2)).answer is Answer.YES
    f = p_fodd()
    d = f.diagram
    k = d.root
    cut = GFODD(f.aggregation, Diagram(d.nodes[:k] + (Node(d.nodes[k].label, d.nodes[k].false_child,
                                                          d.nodes[k].false_child),), k), P)
    out = edge_removal_check(f, cut, SearchBudget(2))
    assert out.answer is Answer.NO
    assert out.counterexample.value1 == 1 and out.counterexample.value2 == 0
    with pytest.raises(GfoddError):
        edge_removal_check(f, f, SearchBudget(1))


# -- properties -------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(gfodds(binary=True, sig=PLAIN_SIGNATURE))
def test_sat_witness_sound_and_monotone(g):
    one = gfodd_sat(g, SearchBudget(1))
    two = gfodd_sat(g, SearchBudget(2))
    if one:
        assert two
    if two:
        assert ref_map(g, two.witness) == 1
    else:
        assert all(ref_map(g, i) == 0 for n in (1, 2) for i in all_interpretations(g.signature, n))


@settings(max_examples=40, deadline=None)
@given(gfodds(binary=True, sig=PLAIN_SIGNATURE))
def test_sat_equiv_duality(g):
    sat = gfodd_sat(g, SearchBudget(2)).answer is Answer.YES
    zero = GFODD(AggregationList(), Diagram.constant(0), g.signature)
    assert sat == (gfodd_equiv(g, zero, SearchBudget(2)).answer is Answer.NO)
    assert zero_like(g) == zero


@settings(max_examples=30, deadline=None)
@given(gfodds(binary=True, sig=PLAIN_SIGNATURE), gfodds(binary=True, sig=PLAIN_SIGNATURE))
def test_equiv_counterexamples_and_complement_duality(g1, g2):
    plain = gfodd_equiv(g1, g2, SearchBudget(2))
    dual = gfodd_equiv(complement(g1, 1), complement(g2, 1), SearchBudget(2))
    assert plain.answer is dual.answer
    if plain.answer is Answer.NO:
        cx = plain.counterexample
        assert cx.value1 != cx.value2
        assert ref_map(g1, cx.interpretation) == cx.value1
        assert ref_map(g2, cx.interpretation) == cx.value2
        assert gfodd_equiv(g1, g2, SearchBudget(3)).answer is Answer.NO
    else:
        assert plain.counterexample is None


def test_i_star_shape():
    assert I_STAR.domain_size == 2 and I_STAR.extensions["P_T"] == frozenset({(0,)})


def test_zero_like_evaluates_to_zero():
    assert eval_map(zero_like(p_fodd()), Interpretation(2)) == 0
