import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from intervalid.model import ValidationError, upper_bounds, validate_diagram
from intervalid.oracle import brute_force_extremes, sample_distributions, vertex_distributions
from intervalid.query import Query
from intervalid.synth import random_bounds
from intervalid.transforms import (
    PreconditionError,
    marginal_lower_bounds,
    partition_predecessors,
    posterior_lower_bounds,
    remove_node,
    reverse_arc,
)

from conftest import B_X_GIVEN_Y, B_Y, make_diagram


def two_node(b_y, cond):
    ny, nx = np.shape(cond)
    return make_diagram([
        ("Y", [f"y{i}" for i in range(ny)], [], {(): b_y}),
        ("X", [f"x{i}" for i in range(nx)], ["Y"], {(j,): cond[j] for j in range(ny)}),
    ])


@st.composite
def families(draw, max_y=4, max_x=4):
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    ny, nx = draw(st.integers(2, max_y)), draw(st.integers(2, max_x))
    return np.array([random_bounds(rng, nx) for _ in range(ny)]), random_bounds(rng, ny)


# -- kernels ---------------------------------------------------------------------


def test_marginal_worked_example():
    np.testing.assert_allclose(marginal_lower_bounds(B_X_GIVEN_Y, B_Y), [0.13, 0.07, 0.41], atol=1e-15)


def test_posterior_worked_example():
    got = posterior_lower_bounds(B_X_GIVEN_Y, B_Y, 0)
    np.testing.assert_allclose(got, [0.2000, 0.0392, 0.0769], atol=5e-5)
    # exact fractions behind the printed figures
    np.testing.assert_allclose(got, [0.04 / 0.2, 0.02 / 0.51, 0.04 / 0.52], atol=1e-15)


def test_marginal_exact_inputs():
    got = marginal_lower_bounds([[1, 0], [0, 1]], [0.5, 0.5])
    np.testing.assert_allclose(got, [0.5, 0.5], atol=1e-15)


def test_posterior_deterministic_likelihood():
    got = posterior_lower_bounds([[1, 0], [0, 1]], [0.5, 0.5], 0)
    np.testing.assert_allclose(got, [1, 0], atol=1e-15)


def test_zero_denominator_gives_zero():
    # x0 impossible under every y
    got = posterior_lower_bounds([[0, 1], [0, 1]], [0.3, 0.2], 0)
    np.testing.assert_array_equal(got, [0, 0])


def test_dimension_mismatch():
    with pytest.raises(ValidationError):
        marginal_lower_bounds(B_X_GIVEN_Y, [0.5, 0.5])
    with pytest.raises(ValidationError):
        posterior_lower_bounds(B_X_GIVEN_Y, B_Y, 3)


@pytest.mark.parametrize("seed", range(5))
def test_random_3x3_kernels_match_oracle(seed):
    rng = np.random.default_rng(1000 + seed)
    cond = np.array([random_bounds(rng, 3) for _ in range(3)])
    b_y = random_bounds(rng, 3)
    d = two_node(b_y, cond)
    oracle_x = brute_force_extremes(d, Query("X"))
    np.testing.assert_allclose(marginal_lower_bounds(cond, b_y), oracle_x.lo, atol=1e-12)
    for x in range(3):
        oracle_y = brute_force_extremes(d, Query("Y", {"X": f"x{x}"}))
        np.testing.assert_allclose(posterior_lower_bounds(cond, b_y, x), oracle_y.lo, atol=1e-12)


def _tied_choices(values, exclude=None):
    pool = [i for i in range(len(values)) if i != exclude]
    return [i for i in pool if values[i] == values[pool].min()]


def test_tie_break_invariance_marginal():
    cond = np.array([[0.1, 0.5], [0.1, 0.3], [0.4, 0.3]])
    b_y = np.array([0.2, 0.1, 0.3])
    ref = marginal_lower_bounds(cond, b_y)
    for pivots in itertools.product(_tied_choices(cond[:, 0]), _tied_choices(cond[:, 1])):
        np.testing.assert_allclose(marginal_lower_bounds(cond, b_y, pivots=pivots), ref, atol=1e-15, rtol=0)


def test_tie_break_invariance_posterior():
    cond = np.array([[0.1, 0.5], [0.2, 0.4], [0.2, 0.4], [0.3, 0.2]])
    b_y = np.array([0.1, 0.2, 0.1, 0.3])
    lik_hi = np.array([upper_bounds(r)[0] for r in cond])
    ref = posterior_lower_bounds(cond, b_y, 0)
    choices = [[i for i in range(4) if i != y and lik_hi[i] == max(lik_hi[j] for j in range(4) if j != y)]
               for y in range(4)]
    assert any(len(c) > 1 for c in choices)
    for pivots in itertools.product(*choices):
        np.testing.assert_allclose(posterior_lower_bounds(cond, b_y, 0, pivots=pivots), ref, atol=1e-15, rtol=0)


@given(families())
def test_outputs_are_valid_bound_vectors(fam):
    cond, b_y = fam
    m = marginal_lower_bounds(cond, b_y)
    assert np.all(m >= 0) and m.sum() <= 1 + 1e-12
    for x in range(cond.shape[1]):
        p = posterior_lower_bounds(cond, b_y, x)
        assert np.all(p >= 0) and np.all(p <= 1) and p.sum() <= 1 + 1e-12


@given(families())
@settings(max_examples=50)
def test_sampled_distributions_respect_bounds(fam):
    cond, b_y = fam
    rng = np.random.default_rng(0)
    py = sample_distributions(b_y, rng, 200)
    pxy = np.stack([sample_distributions(row, rng, 200) for row in cond], axis=1)
    px = np.einsum("sy,syx->sx", py, pxy)
    assert np.all(px >= marginal_lower_bounds(cond, b_y) - 1e-12)
    for x in range(cond.shape[1]):
        with np.errstate(invalid="ignore", divide="ignore"):
            post = pxy[:, :, x] * py / px[:, [x]]
        ok = px[:, x] > 0
        assert np.all(post[ok] >= posterior_lower_bounds(cond, b_y, x) - 1e-12)


@given(st.integers(0, 2**32 - 1), st.integers(2, 4), st.integers(2, 4))
def test_point_degeneration(seed, ny, nx):
    rng = np.random.default_rng(seed)
    cond = np.array([random_bounds(rng, nx, exact=True) for _ in range(ny)])
    p_y = random_bounds(rng, ny, exact=True)
    px = p_y @ cond
    np.testing.assert_allclose(marginal_lower_bounds(cond, p_y), px, atol=1e-12)
    for x in range(nx):
        if px[x] > 1e-9:
            np.testing.assert_allclose(posterior_lower_bounds(cond, p_y, x), cond[:, x] * p_y / px[x], atol=1e-12)


# -- diagram transformations ---------------------------------------------------


def test_remove_worked_example(two_node):
    out = remove_node(two_node, "Y")
    assert out.nodes == ("X",)
    assert out.parents("X") == ()
    np.testing.assert_allclose(out.table("X")[()], [0.13, 0.07, 0.41], atol=1e-15)


def test_reverse_worked_example(two_node):
    out = reverse_arc(two_node, "Y", "X")
    assert out.parents("X") == ()
    assert out.parents("Y") == ("X",)
    np.testing.assert_allclose(out.table("X")[()], [0.13, 0.07, 0.41], atol=1e-15)
    np.testing.assert_allclose(out.table("Y")[(0,)], [0.2000, 0.0392, 0.0769], atol=5e-5)
    assert validate_diagram(out) == []


def test_reverse_exact_binary_is_bayes():
    d = two_node([0.5, 0.5], [[1, 0], [0, 1]])
    out = reverse_arc(d, "Y", "X")
    np.testing.assert_allclose(out.table("Y")[(0,)], [1, 0], atol=1e-15)
    np.testing.assert_allclose(out.table("Y")[(1,)], [0, 1], atol=1e-15)


def test_remove_irrelevant_parent_grafts_parents():
    d = make_diagram([
        ("A", ["a1", "a2"], [], {(): [0.3, 0.3]}),
        ("Y", ["y1", "y2"], ["A"], {(0,): [0.1, 0.2], (1,): [0.5, 0.1]}),
        ("X", ["x1", "x2", "x3"], ["Y"], {(0,): [0.2, 0.1, 0.3], (1,): [0.2, 0.1, 0.3]}),
    ])
    out = remove_node(d, "Y")
    assert out.parents("X") == ("A",)
    for ctx in out.contexts("X"):
        np.testing.assert_allclose(out.table("X")[ctx], [0.2, 0.1, 0.3], atol=1e-15)


def test_remove_needs_single_successor():
    d = make_diagram([
        ("Y", ["y1", "y2"], [], {(): [0.3, 0.3]}),
        ("A", ["a1", "a2"], ["Y"], {(0,): [0, 0], (1,): [0, 0]}),
        ("B", ["b1", "b2"], ["Y"], {(0,): [0, 0], (1,): [0, 0]}),
    ])
    with pytest.raises(PreconditionError, match="A.*B"):
        remove_node(d, "Y")
    with pytest.raises(PreconditionError):
        remove_node(d, "A")


def test_reverse_preconditions():
    d = make_diagram([
        ("Y", ["y1", "y2"], [], {(): [0, 0]}),
        ("Z", ["z1", "z2"], ["Y"], {(0,): [0, 0], (1,): [0, 0]}),
        ("X", ["x1", "x2"], ["Y", "Z"], {c: [0, 0] for c in [(0, 0), (0, 1), (1, 0), (1, 1)]}),
    ])
    with pytest.raises(PreconditionError, match="Y -> Z -> X"):
        reverse_arc(d, "Y", "X")
    with pytest.raises(PreconditionError, match="no arc"):
        reverse_arc(d, "X", "Y")


def test_partition_and_parent_order():
    rank = {n: i for i, n in enumerate("ABCDYX")}.__getitem__
    parts = partition_predecessors(["C", "A", "B"], ["Y", "D", "B"], "Y", rank)
    assert (parts.v1, parts.v2, parts.v3) == (("A", "C"), ("B",), ("D",))
    assert parts.merged == ("A", "C", "B", "D")


def _three_node(seed):
    """Z -> Y -> X with Z -> X, random bounds, 2-3 outcomes."""
    rng = np.random.default_rng(seed)
    cz, cy, cx = rng.integers(2, 4, size=3)
    return make_diagram([
        ("Z", [f"z{i}" for i in range(cz)], [], {(): random_bounds(rng, cz)}),
        ("Y", [f"y{i}" for i in range(cy)], ["Z"], {(i,): random_bounds(rng, cy) for i in range(cz)}),
        ("X", [f"x{i}" for i in range(cx)], ["Z", "Y"],
         {(i, j): random_bounds(rng, cx) for i in range(cz) for j in range(cy)}),
    ])


@pytest.mark.parametrize("seed", range(4))
def test_remove_contains_oracle_per_context(seed):
    d = _three_node(seed)
    out = remove_node(d, "Y")
    assert out.parents("X") == ("Z",)
    for (z,) in out.contexts("X"):
        ext = brute_force_extremes(d, Query("X", {"Z": f"z{z}"}))
        lo = out.table("X")[(z,)]
        assert np.all(lo <= ext.lo + 1e-9)
        assert np.all(upper_bounds(lo) >= ext.hi - 1e-9)


@pytest.mark.parametrize("seed", range(4))
def test_reverse_with_common_parent_is_sharp(seed):
    d = _three_node(seed)
    out = reverse_arc(d, "Y", "X")
    assert out.parents("X") == ("Z",)
    assert out.parents("Y") == ("Z", "X")
    for z, x in out.contexts("Y"):
        ext = brute_force_extremes(d, Query("Y", {"Z": f"z{z}", "X": f"x{x}"}))
        np.testing.assert_allclose(out.table("Y")[(z, x)], ext.lo, atol=1e-9)
    for (z,) in out.contexts("X"):
        ext = brute_force_extremes(d, Query("X", {"Z": f"z{z}"}))
        np.testing.assert_allclose(out.table("X")[(z,)], ext.lo, atol=1e-9)


def test_vertices_of_worked_example():
    verts = {tuple(np.round(v, 12)) for v in vertex_distributions(B_Y)}
    assert verts == {(0.5, 0.1, 0.4), (0.2, 0.4, 0.4), (0.2, 0.1, 0.7)}
