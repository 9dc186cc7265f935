"""Brute-force reference answers for small diagrams.

Every context's constraint set is a simplex slice whose extreme points are
the distributions that put all the free mass on one outcome. A query value
(marginal or posterior) is a ratio of functions that are affine in each
context's distribution separately, so its extrema over the product of these
polytopes are reached at vertex choices. Enumerating every vertex assignment
and building the exact joint for each therefore gives the exact extrema.

Nothing here uses the propagation rules in :mod:`intervalid.transforms`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

import numpy as np

from . import _backend
from .model import InfluenceDiagram, ParentConfig, ProbInterval, as_bound_vector
from .query import Query

DEFAULT_CAP = 10**7
# free mass at or below this is rounding noise of an exact distribution
COLLAPSE_TOL = 1e-12


class OracleCapacityError(RuntimeError):
    def __init__(self, count: int, cap: int):
        self.count = count
        self.cap = cap
        super().__init__(f"{count} vertex combinations exceed the cap of {cap}")


def vertex_distributions(bv) -> np.ndarray:
    """Extreme points of ``{p : p >= bv, sum(p) = 1}``, one per row.

    Row ``i`` gives outcome ``i`` all the free mass. A zero-range vector has a
    single vertex, itself.
    """
    bv = as_bound_vector(bv)
    free = 1.0 - float(bv.sum())
    if free <= COLLAPSE_TOL:
        return bv[None, :].copy()
    verts = np.tile(bv, (bv.size, 1))
    verts[np.diag_indices(bv.size)] += free
    return verts


def sample_distribution(bv, seed: int) -> np.ndarray:
    """A seeded point of the constraint set: ``bv + range * q``.

    ``q`` is a uniform point of the standard simplex (normalized exponential
    spacings).
    """
    rng = np.random.default_rng(seed)
    return sample_distributions(bv, rng, 1)[0]


def sample_distributions(bv, rng: np.random.Generator, size: int) -> np.ndarray:
    bv = as_bound_vector(bv)
    free = max(0.0, 1.0 - float(bv.sum()))
    e = rng.exponential(size=(size, bv.size))
    q = e / e.sum(axis=1, keepdims=True)
    return bv[None, :] + free * q


@dataclass(frozen=True)
class VertexAssignment:
    """A vertex index for every ``(node, parent config)`` of a diagram."""

    choices: Mapping[tuple[str, ParentConfig], int]


def vertex_assignments(d: InfluenceDiagram) -> Iterator[VertexAssignment]:
    """Every vertex assignment of ``d``; exponential, for tiny diagrams."""
    keys, options = [], []
    for n in d.nodes:
        for ctx in d.contexts(n):
            keys.append((n, ctx))
            options.append(range(len(vertex_distributions(d.table(n)[ctx]))))
    for combo in itertools.product(*options):
        yield VertexAssignment(dict(zip(keys, combo)))


def _state_grid(cards: Sequence[int]) -> np.ndarray:
    if not cards:
        return np.zeros((1, 0), dtype=np.intp)
    return np.indices(cards).reshape(len(cards), -1).T


def joint_from_assignment(d: InfluenceDiagram, va: VertexAssignment) -> np.ndarray:
    """Joint table over ``d.nodes`` (axis order) from the chosen vertices."""
    cards = [d.card(n) for n in d.nodes]
    states = _state_grid(cards)
    col = {n: i for i, n in enumerate(d.nodes)}
    joint = np.ones(len(states))
    for n in d.nodes:
        table = {}
        for ctx in d.contexts(n):
            try:
                v = va.choices[(n, ctx)]
            except KeyError:
                raise ValueError(f"assignment has no choice for {n} in context {ctx}") from None
            table[ctx] = vertex_distributions(d.table(n)[ctx])[v]
        pcols = [col[p] for p in d.parents(n)]
        for s, st in enumerate(states):
            joint[s] *= table[tuple(st[pcols])][st[col[n]]]
    return joint.reshape(cards)


def query_value(joint: np.ndarray, d: InfluenceDiagram, q: Query) -> np.ndarray | None:
    """Exact ``p(target | evidence)`` from a joint table; ``None`` if the evidence has probability 0."""
    index = []
    for n in d.nodes:
        if n in q.evidence:
            index.append(d.space(n).index(q.evidence[n]))
        else:
            index.append(slice(None))
    sub = joint[tuple(index)]
    kept = [n for n in d.nodes if n not in q.evidence]
    t = kept.index(q.target)
    marg = sub.sum(axis=tuple(i for i in range(len(kept)) if i != t))
    den = marg.sum()
    if den <= 0.0:
        return None
    return marg / den


# -- enumeration ---------------------------------------------------------------


def _ancestral_set(d: InfluenceDiagram, roots) -> list[str]:
    seen, stack = set(), list(roots)
    while stack:
        n = stack.pop()
        if n not in seen:
            seen.add(n)
            stack.extend(d.parents(n))
    return [n for n in d.nodes if n in seen]


class _Layout:
    """Flat arrays describing the joint over a node subset for the kernel."""

    def __init__(self, d: InfluenceDiagram, nodes: list[str]):
        self.d = d
        self.nodes = nodes
        self.cards = [d.card(n) for n in nodes]
        self.col = {n: i for i, n in enumerate(nodes)}
        self.states = _state_grid(self.cards)
        self.slot_start = {}
        self.slots: list[tuple[str, ParentConfig]] = []
        for n in nodes:
            self.slot_start[n] = len(self.slots)
            self.slots.extend((n, ctx) for ctx in d.contexts(n))
        n_states = len(self.states)
        self.slot = np.zeros((n_states, len(nodes)), dtype=np.intp)
        self.outcome = np.zeros((n_states, len(nodes)), dtype=np.intp)
        for k, n in enumerate(nodes):
            pcols = [self.col[p] for p in d.parents(n)]
            pcards = [d.card(p) for p in d.parents(n)]
            ctx_index = np.zeros(n_states, dtype=np.intp)
            for c, card in zip(pcols, pcards):
                ctx_index = ctx_index * card + self.states[:, c]
            self.slot[:, k] = self.slot_start[n] + ctx_index
            self.outcome[:, k] = self.states[:, k]
        self.stride = np.array(self.cards, dtype=np.intp)

    def columns(self, queries: Sequence[Query]):
        col_of = np.full((len(queries), len(self.states)), -1, dtype=np.intp)
        q_off = [0]
        for qi, q in enumerate(queries):
            ok = np.ones(len(self.states), dtype=bool)
            for n, label in q.evidence.items():
                ok &= self.states[:, self.col[n]] == self.d.space(n).index(label)
            t = self.states[:, self.col[q.target]]
            col_of[qi, ok] = t[ok]
            q_off.append(q_off[-1] + self.d.card(q.target))
        return col_of, np.array(q_off, dtype=np.intp)

    def kernel_args(self, slot_dists: Sequence[np.ndarray]):
        """Kernel inputs given each slot's candidate distributions (rows)."""
        offsets = np.zeros(len(slot_dists), dtype=np.intp)
        acc = 0
        for i, m in enumerate(slot_dists):
            offsets[i] = acc
            acc += m.size
        vdist = np.concatenate([m.ravel() for m in slot_dists])
        base = offsets[self.slot] + self.outcome
        radix = np.array([m.shape[0] for m in slot_dists], dtype=np.intp)
        return vdist, np.ascontiguousarray(base), np.ascontiguousarray(self.slot), self.stride, radix


@dataclass(frozen=True)
class Extremes:
    """Attained min/max of each target outcome's probability."""

    lo: np.ndarray
    hi: np.ndarray
    valid: int
    assignments: int


def combination_count(d: InfluenceDiagram, nodes: Sequence[str] | None = None) -> int:
    total = 1
    for n in nodes if nodes is not None else d.nodes:
        for ctx in d.contexts(n):
            total *= len(vertex_distributions(d.table(n)[ctx]))
    return total


def brute_force_batch(
    d: InfluenceDiagram,
    queries: Sequence[Query],
    *,
    cap: int = DEFAULT_CAP,
    kernel=None,
) -> list[Extremes]:
    """Extremes of several queries from a single pass over vertex assignments."""
    for q in queries:
        q.check(d)
    nodes = _ancestral_set(d, {n for q in queries for n in (q.target, *q.evidence)})
    count = combination_count(d, nodes)
    if count > cap:
        raise OracleCapacityError(count, cap)
    layout = _Layout(d, nodes)
    slot_dists = [vertex_distributions(d.table(n)[ctx]) for n, ctx in layout.slots]
    col_of, q_off = layout.columns(queries)
    kernel = kernel or _backend.enumerate_extrema
    lo, hi, valid = kernel(*layout.kernel_args(slot_dists), np.ascontiguousarray(col_of), q_off)
    out = []
    for qi, q in enumerate(queries):
        a, b = q_off[qi], q_off[qi + 1]
        if valid[qi] == 0:
            n = b - a
            out.append(Extremes(np.zeros(n), np.ones(n), 0, count))
        else:
            out.append(Extremes(np.asarray(lo[a:b]), np.asarray(hi[a:b]), int(valid[qi]), count))
    return out


def brute_force_extremes(d: InfluenceDiagram, q: Query, *, cap: int = DEFAULT_CAP, kernel=None) -> Extremes:
    return brute_force_batch(d, [q], cap=cap, kernel=kernel)[0]


def closure(lo: np.ndarray) -> tuple[ProbInterval, ...]:
    """Intervals of the tightest lower-bound-only constraint with the given infima."""
    lo = np.asarray(lo, dtype=np.float64)
    hi = 1.0 - (lo.sum() - lo)
    return tuple(ProbInterval(float(a), float(b)) for a, b in zip(lo, hi))


def brute_force_interval(d: InfluenceDiagram, q: Query, *, cap: int = DEFAULT_CAP) -> tuple[ProbInterval, ...]:
    """Sharp per-outcome intervals for ``q`` among lower-bound-only constraints.

    The lower end is the exact infimum over the diagram's constraint set. The
    upper end is implied by the other outcomes' infima, which is the best any
    lower-bound description can do; the attained maxima, which can be
    smaller, are available from :func:`brute_force_extremes`.

    Assignments under which the evidence has probability zero are skipped. If
    every assignment is skipped the result is vacuous, ``[0, 1]``.

    Raises:
        OracleCapacityError: more than ``cap`` vertex combinations.
    """
    ext = brute_force_extremes(d, q, cap=cap)
    if ext.valid == 0:
        return tuple(ProbInterval(0.0, 1.0) for _ in ext.lo)
    return closure(ext.lo)


def sampled_query_values(
    d: InfluenceDiagram,
    queries: Sequence[Query],
    n_samples: int,
    seed: int,
) -> list[np.ndarray]:
    """Exact query values under ``n_samples`` random distribution families.

    Each family draws one interior distribution per context. Returns one
    ``(n_samples, |target|)`` array per query; rows are NaN where the evidence
    has probability zero.
    """
    nodes = _ancestral_set(d, {n for q in queries for n in (q.target, *q.evidence)})
    layout = _Layout(d, nodes)
    rng = np.random.default_rng(seed)
    draws = [sample_distributions(d.table(n)[ctx], rng, n_samples) for n, ctx in layout.slots]
    offsets = np.cumsum([0] + [m.shape[1] for m in draws])
    flat = np.concatenate(draws, axis=1)
    base = offsets[layout.slot] + layout.outcome
    joint = flat[:, base].prod(axis=2)
    col_of, q_off = layout.columns(queries)
    out = []
    for qi in range(len(queries)):
        n_t = q_off[qi + 1] - q_off[qi]
        member = np.zeros((len(layout.states), n_t))
        hit = col_of[qi] >= 0
        member[np.flatnonzero(hit), col_of[qi][hit]] = 1.0
        num = joint @ member
        den = num.sum(axis=1, keepdims=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            out.append(np.where(den > 0, num / den, np.nan))
    return out


def exact_query(d: InfluenceDiagram, q: Query) -> np.ndarray | None:
    """Point inference for a diagram whose every context has range zero."""
    va = next(vertex_assignments(d))
    if combination_count(d) != 1:
        raise ValueError("diagram is not point-valued")
    return query_value(joint_from_assignment(d, va), d, q)
