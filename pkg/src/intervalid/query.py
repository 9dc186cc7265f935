"""Interval queries answered by sequences of removals and reversals."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .model import InfluenceDiagram, ProbInterval, upper_bounds
from .transforms import partition_predecessors, remove_node, reverse_arc


class QueryError(ValueError):
    pass


class PlanningError(RuntimeError):
    pass


@dataclass(frozen=True)
class Query:
    target: str
    evidence: Mapping[str, str] = field(default_factory=dict)

    def check(self, d: InfluenceDiagram) -> None:
        if self.target not in d:
            raise QueryError(f"unknown target node {self.target!r}")
        for node, label in self.evidence.items():
            if node not in d:
                raise QueryError(f"unknown evidence node {node!r}")
            if label not in d.space(node).outcomes:
                raise QueryError(f"{label!r} is not an outcome of {node!r}")
        if self.target in self.evidence:
            raise QueryError(f"target {self.target!r} is also an evidence node")


@dataclass(frozen=True)
class Remove:
    node: str

    def apply(self, d: InfluenceDiagram) -> InfluenceDiagram:
        return remove_node(d, self.node)

    def __str__(self) -> str:
        return f"remove {self.node}"


@dataclass(frozen=True)
class Reverse:
    source: str
    target: str

    def apply(self, d: InfluenceDiagram) -> InfluenceDiagram:
        return reverse_arc(d, self.source, self.target)

    def __str__(self) -> str:
        return f"reverse {self.source}->{self.target}"


Step = Remove | Reverse


@dataclass(frozen=True)
class QueryResult:
    target: str
    outcomes: tuple[str, ...]
    intervals: tuple[ProbInterval, ...]
    range: float
    transform_log: tuple[Step, ...]

    @property
    def lower(self) -> list[float]:
        return [iv.lo for iv in self.intervals]

    @property
    def upper(self) -> list[float]:
        return [iv.hi for iv in self.intervals]


def prune_barren(d: InfluenceDiagram, q: Query) -> InfluenceDiagram:
    """Drop, repeatedly, successor-free nodes that are neither queried nor observed."""
    keep = {q.target, *q.evidence}
    parents = {n: set(d.parents(n)) for n in d.nodes}
    while True:
        has_child = set().union(*parents.values()) if parents else set()
        barren = [n for n in parents if n not in keep and n not in has_child]
        if not barren:
            break
        for n in barren:
            del parents[n]
    if len(parents) == len(d):
        return d
    return d.subdiagram(parents)


class _Structure:
    """Parent lists only; enough to simulate the topology of a plan."""

    def __init__(self, d: InfluenceDiagram):
        self.rank = d.rank
        self.card = {n: d.card(n) for n in d.nodes}
        self.parents = {n: list(d.parents(n)) for n in d.nodes}

    def children(self, node: str) -> list[str]:
        return sorted((n for n, ps in self.parents.items() if node in ps), key=self.rank)

    def _size(self, node: str, parents) -> int:
        size = self.card[node]
        for p in parents:
            size *= self.card[p]
        return size

    def _merged(self, y: str, x: str) -> list[str]:
        return list(partition_predecessors(self.parents[y], self.parents[x], y, self.rank).merged)

    def removal_cost(self, y: str) -> int:
        (x,) = self.children(y)
        return self._size(x, self._merged(y, x))

    def reversal_cost(self, y: str, x: str) -> int:
        merged = self._merged(y, x)
        return self._size(x, merged) + self._size(y, merged + [x])

    def has_other_path(self, y: str, x: str) -> bool:
        stack = [c for c in self.children(y) if c != x]
        seen = set()
        while stack:
            n = stack.pop()
            if n == x:
                return True
            if n not in seen:
                seen.add(n)
                stack.extend(self.children(n))
        return False

    def reversible_children(self, y: str) -> list[str]:
        return [c for c in self.children(y) if not self.has_other_path(y, c)]

    def cheapest_reversal(self, y: str) -> Reverse:
        options = self.reversible_children(y)
        if not options:
            raise PlanningError(f"no arc out of {y!r} can be reversed")
        best = min(options, key=lambda c: (self.reversal_cost(y, c), self.rank(c)))
        return Reverse(y, best)

    def next_step(self, y: str) -> tuple[int, Step]:
        kids = self.children(y)
        if not kids:
            raise PlanningError(f"{y!r} is barren; prune the diagram before planning")
        if len(kids) == 1:
            return self.removal_cost(y), Remove(y)
        step = self.cheapest_reversal(y)
        return self.reversal_cost(y, step.target), step

    def apply(self, step: Step) -> None:
        if isinstance(step, Remove):
            y = step.node
            (x,) = self.children(y)
            self.parents[x] = self._merged(y, x)
            del self.parents[y]
        else:
            y, x = step.source, step.target
            merged = self._merged(y, x)
            self.parents[x] = merged
            self.parents[y] = merged + [x]


def plan(d: InfluenceDiagram, q: Query) -> list[Step]:
    """Order removals and reversals that leave only target and evidence nodes.

    Non-target, non-evidence nodes are eliminated one at a time: the node
    whose next step recomputes the smallest table goes first, and its arcs
    are reversed until a single successor remains, which it is then removed
    into. Finally the target's arcs into evidence nodes are reversed, so the
    target ends with no successors and only evidence nodes as parents.

    ``d`` must be free of barren nodes (see :func:`prune_barren`).
    """
    q.check(d)
    g = _Structure(d)
    keep = {q.target, *q.evidence}
    steps: list[Step] = []

    def do(step: Step) -> None:
        g.apply(step)
        steps.append(step)

    while True:
        pending = [n for n in g.parents if n not in keep]
        if not pending:
            break
        node = min(pending, key=lambda n: (g.next_step(n)[0], g.rank(n)))
        while len(g.children(node)) > 1:
            do(g.cheapest_reversal(node))
        do(Remove(node))

    while g.children(q.target):
        do(g.cheapest_reversal(q.target))
    return steps


def answer(d: InfluenceDiagram, q: Query) -> QueryResult:
    """Interval probabilities of ``q.target`` given ``q.evidence``."""
    q.check(d)
    work = prune_barren(d, q)
    steps = plan(work, q)
    for step in steps:
        work = step.apply(work)
    return _read_result(work, q, tuple(steps))


def _read_result(d: InfluenceDiagram, q: Query, steps: tuple[Step, ...]) -> QueryResult:
    table = d.table(q.target)
    try:
        ctx = tuple(d.space(p).index(q.evidence[p]) for p in table.parents)
    except KeyError as exc:
        raise PlanningError(f"target still depends on non-evidence node {exc}") from None
    lo = table[ctx]
    hi = upper_bounds(lo)
    ivs = tuple(ProbInterval(float(a), float(b)) for a, b in zip(lo, hi))
    return QueryResult(
        target=q.target,
        outcomes=d.space(q.target).outcomes,
        intervals=ivs,
        range=float(1.0 - lo.sum()),
        transform_log=steps,
    )


def replay(d: InfluenceDiagram, q: Query, steps) -> QueryResult:
    """Apply a logged step sequence to the pruned diagram and read the result."""
    work = prune_barren(d, q)
    for step in steps:
        work = step.apply(work)
    return _read_result(work, q, tuple(steps))

