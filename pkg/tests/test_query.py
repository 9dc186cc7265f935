import numpy as np
import pytest

from intervalid.model import upper_bounds
from intervalid.oracle import brute_force_batch, closure
from intervalid.query import (
    PlanningError,
    Query,
    QueryError,
    Remove,
    Reverse,
    answer,
    plan,
    prune_barren,
    replay,
)
from intervalid.synth import random_diagram

from conftest import make_diagram


def binary(name, parents, rng=None):
    rng = rng or np.random.default_rng(abs(hash(name)) % 2**32)
    n_ctx = 2 ** len(parents)
    ctxs = [tuple(int(b) for b in np.binary_repr(i, len(parents))) if parents else () for i in range(n_ctx)]
    return (name, [f"{name.lower()}1", f"{name.lower()}2"], parents,
            {c: list(rng.dirichlet([1, 1]) * 0.7) for c in ctxs})


@pytest.fixture
def chain():
    return make_diagram([binary("Z", []), binary("Y", ["Z"]), binary("X", ["Y"])])


def test_query_validation(two_node):
    with pytest.raises(QueryError):
        Query("Q").check(two_node)
    with pytest.raises(QueryError):
        Query("Y", {"X": "x9"}).check(two_node)
    with pytest.raises(QueryError):
        Query("Y", {"Y": "y1"}).check(two_node)
    with pytest.raises(QueryError):
        Query("Y", {"W": "w1"}).check(two_node)


def test_prune_keeps_target(two_node):
    assert prune_barren(two_node, Query("X")) is two_node


def test_prune_drops_isolated_leaf():
    d = make_diagram([binary("Y", []), binary("X", ["Y"]), binary("Z", [])])
    assert prune_barren(d, Query("X")).nodes == ("Y", "X")


def test_prune_keeps_evidence():
    d = make_diagram([binary("Y", []), binary("X", ["Y"]), binary("W", ["X"])])
    assert prune_barren(d, Query("Y", {"X": "x1"})).nodes == ("Y", "X")


def test_plan_examples(two_node, chain):
    assert plan(two_node, Query("Y", {"X": "x1"})) == [Reverse("Y", "X")]
    assert plan(two_node, Query("X")) == [Remove("Y")]
    assert plan(chain, Query("X")) == [Remove("Z"), Remove("Y")]


def test_plan_rejects_barren_nodes():
    d = make_diagram([binary("Y", []), binary("X", ["Y"]), binary("Z", [])])
    with pytest.raises(PlanningError, match="barren"):
        plan(d, Query("X"))


def test_answer_worked_example(two_node):
    res = answer(two_node, Query("X"))
    np.testing.assert_allclose(res.intervals, [(0.13, 0.52), (0.07, 0.46), (0.41, 0.80)], atol=1e-12)
    assert res.range == pytest.approx(0.39, abs=1e-12)
    post = answer(two_node, Query("Y", {"X": "x1"}))
    np.testing.assert_allclose(
        post.intervals,
        [(0.2000, 0.8839), (0.0392, 0.7231), (0.0769, 0.7608)],
        atol=5e-5,
    )
    assert post.transform_log == (Reverse("Y", "X"),)


def test_root_query_returns_stored_bounds(two_node):
    res = answer(two_node, Query("Y"))
    np.testing.assert_array_equal(res.lower, two_node.table("Y")[()])
    np.testing.assert_array_equal(res.upper, upper_bounds(two_node.table("Y")[()]))
    assert res.transform_log == ()


def test_multiple_successors_are_reversed_first():
    d = make_diagram([binary("A", []), binary("B", ["A"]), binary("C", ["A"]), binary("T", ["B", "C"])])
    steps = plan(d, Query("T"))
    assert sum(isinstance(s, Remove) for s in steps) == 3
    res = answer(d, Query("T"))
    ext = brute_force_batch(d, [Query("T")])[0]
    assert np.all(np.array(res.lower) <= ext.lo + 1e-9)


def test_target_above_two_evidence_nodes():
    d = make_diagram([binary("T", []), binary("E1", ["T"]), binary("E2", ["T", "E1"])])
    q = Query("T", {"E1": "e11", "E2": "e22"})
    res = answer(d, q)
    assert all(isinstance(s, Reverse) for s in res.transform_log)
    oracle = closure(brute_force_batch(d, [q])[0].lo)
    for e, o in zip(res.intervals, oracle):
        assert e.lo <= o.lo + 1e-9 and e.hi >= o.hi - 1e-9


@pytest.mark.parametrize("seed", range(10))
def test_replay_and_barren_neutrality(seed):
    rng = np.random.default_rng(seed)
    d = random_diagram(rng, 5, max_outcomes=3)
    t, e = d.nodes[1], d.nodes[3]
    q = Query(t, {e: d.space(e).outcomes[0]})
    res = answer(d, q)
    again = replay(d, q, res.transform_log)
    assert again.intervals == res.intervals
    pruned = prune_barren(d, q)
    assert answer(pruned, q).intervals == res.intervals


@pytest.mark.parametrize("seed", range(10))
def test_result_range_identity(seed):
    d = random_diagram(np.random.default_rng(seed), 4)
    res = answer(d, Query(d.nodes[-1]))
    lo = np.array(res.lower)
    np.testing.assert_allclose(np.array(res.upper) - lo, res.range, atol=1e-12)
    assert res.range == pytest.approx(1 - lo.sum(), abs=1e-15)
