"""Diagram data model and lower-bound arithmetic.

A node's conditional distribution is described only by lower bounds, one
vector per parent configuration. Upper bounds and ranges are always derived
from those vectors and never stored.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from graphlib import CycleError, TopologicalSorter
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

import numpy as np

EPS_VALIDATE = 1e-9

ParentConfig = tuple[int, ...]


class ValidationError(ValueError):
    """A bound vector, table or diagram violates its invariants."""


class DiagramError(ValidationError):
    def __init__(self, violations: Sequence["Violation"]):
        self.violations = list(violations)
        lines = "\n".join(str(v) for v in self.violations)
        super().__init__(f"invalid diagram:\n{lines}")


class UnknownNodeError(KeyError):
    pass


@dataclass(frozen=True)
class Violation:
    kind: str
    node: str | None
    message: str
    context: str | None = None

    def __str__(self) -> str:
        where = self.node or "-"
        if self.context is not None:
            where += f"[{self.context}]"
        return f"{self.kind}: {where}: {self.message}"


class ProbInterval(NamedTuple):
    lo: float
    hi: float


# -- bound vectors -----------------------------------------------------------


def as_bound_vector(values: Iterable[float]) -> np.ndarray:
    """Return ``values`` as a read-only float64 lower-bound vector.

    Raises:
        ValidationError: if an entry is negative or not finite, or the
            entries sum to more than ``1 + EPS_VALIDATE``.
    """
    bv = np.array(values, dtype=np.float64)
    if bv.ndim != 1 or bv.size == 0:
        raise ValidationError("bound vector must be a non-empty 1-d sequence")
    problem = bound_vector_problem(bv)
    if problem is not None:
        raise ValidationError(problem)
    bv.flags.writeable = False
    return bv


def bound_vector_problem(bv: np.ndarray) -> str | None:
    if not np.all(np.isfinite(bv)):
        return "bounds must be finite"
    if np.any(bv < 0):
        return f"negative lower bound in {list(bv)}"
    total = float(bv.sum())
    if total > 1.0 + EPS_VALIDATE:
        return f"lower bounds sum to {total:.12g} > 1"
    return None


def upper_bounds(bv) -> np.ndarray:
    """Sharp upper bounds implied by a lower-bound vector.

    ``U_i = 1 - sum_{j != i} b_j``; every ``U_i - b_i`` equals the range.
    """
    bv = as_bound_vector(bv)
    return 1.0 - (bv.sum() - bv)


def bound_range(bv) -> float:
    """Common width ``1 - sum(b)`` of all the intervals of a bound vector."""
    bv = as_bound_vector(bv)
    return float(1.0 - bv.sum())


def intervals(bv) -> tuple[ProbInterval, ...]:
    bv = as_bound_vector(bv)
    return tuple(ProbInterval(float(lo), float(hi)) for lo, hi in zip(bv, upper_bounds(bv)))


# -- nodes and tables --------------------------------------------------------


@dataclass(frozen=True)
class OutcomeSpace:
    node_id: str
    outcomes: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "outcomes", tuple(self.outcomes))

    def __len__(self) -> int:
        return len(self.outcomes)

    def index(self, label: str) -> int:
        try:
            return self.outcomes.index(label)
        except ValueError:
            raise ValidationError(
                f"{label!r} is not an outcome of {self.node_id!r} {list(self.outcomes)}"
            ) from None


@dataclass(frozen=True)
class LowerBoundTable:
    """Lower bounds ``b(x | parent config)`` for one node.

    ``entries`` maps a tuple of parent outcome indices (in ``parents`` order)
    to the node's lower-bound vector for that context.
    """

    node_id: str
    parents: tuple[str, ...]
    entries: Mapping[ParentConfig, np.ndarray] = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "parents", tuple(self.parents))
        frozen = {}
        for ctx, vec in self.entries.items():
            arr = np.array(vec, dtype=np.float64)
            arr.flags.writeable = False
            frozen[tuple(int(i) for i in ctx)] = arr
        object.__setattr__(self, "entries", frozen)

    def __getitem__(self, ctx: ParentConfig) -> np.ndarray:
        return self.entries[tuple(ctx)]


def contexts(cards: Sequence[int]) -> Iterator[ParentConfig]:
    """All parent configurations in row-major order."""
    return itertools.product(*(range(c) for c in cards))


# -- diagram -----------------------------------------------------------------


class InfluenceDiagram:
    """An acyclic diagram of chance nodes carrying lower-bound tables.

    Instances are immutable. Node order is the declaration order and is used
    to order predecessor sets and tie-breaks everywhere.

    Args:
        spaces: outcome space of every node, in declaration order.
        tables: one lower-bound table per node.
        check: when true (default) raise :class:`DiagramError` listing every
            violation found by :func:`validate_diagram`.
    """

    def __init__(
        self,
        spaces: Sequence[OutcomeSpace],
        tables: Sequence[LowerBoundTable],
        *,
        check: bool = True,
    ):
        self._space_list = tuple(spaces)
        self._table_list = tuple(tables)
        self._spaces = {s.node_id: s for s in self._space_list}
        self._tables = {t.node_id: t for t in self._table_list}
        self._order = tuple(dict.fromkeys(s.node_id for s in self._space_list))
        self._rank = {n: i for i, n in enumerate(self._order)}
        self._children: dict[str, tuple[str, ...]] = {n: () for n in self._order}
        for n in self._order:
            for p in self.parents(n) if n in self._tables else ():
                if p in self._children:
                    self._children[p] = self._children[p] + (n,)
        if check:
            report = validate_diagram(self)
            if report:
                raise DiagramError(report)

    @property
    def nodes(self) -> tuple[str, ...]:
        return self._order

    def __contains__(self, node: str) -> bool:
        return node in self._spaces

    def __len__(self) -> int:
        return len(self._order)

    def _need(self, node: str) -> None:
        if node not in self._spaces:
            raise UnknownNodeError(node)

    def rank(self, node: str) -> int:
        self._need(node)
        return self._rank[node]

    def space(self, node: str) -> OutcomeSpace:
        self._need(node)
        return self._spaces[node]

    def table(self, node: str) -> LowerBoundTable:
        self._need(node)
        return self._tables[node]

    def card(self, node: str) -> int:
        return len(self.space(node))

    def parents(self, node: str) -> tuple[str, ...]:
        return self.table(node).parents

    def children(self, node: str) -> tuple[str, ...]:
        self._need(node)
        return self._children[node]

    def parent_cards(self, node: str) -> tuple[int, ...]:
        return tuple(self.card(p) for p in self.parents(node))

    def contexts(self, node: str) -> Iterator[ParentConfig]:
        return contexts(self.parent_cards(node))

    def sorted_nodes(self, nodes: Iterable[str]) -> list[str]:
        return sorted(nodes, key=self.rank)

    def topological_order(self) -> list[str]:
        """Nodes parents-first, ties resolved by declaration order."""
        indeg = {n: len(self.parents(n)) for n in self._order}
        ready = [n for n in self._order if indeg[n] == 0]
        out = []
        while ready:
            ready.sort(key=self.rank)
            n = ready.pop(0)
            out.append(n)
            for c in self.children(n):
                indeg[c] -= 1
                if indeg[c] == 0:
                    ready.append(c)
        return out

    def replace(
        self,
        tables: Mapping[str, LowerBoundTable] = {},
        drop: Iterable[str] = (),
    ) -> "InfluenceDiagram":
        """New diagram with some tables swapped and some nodes deleted."""
        drop = set(drop)
        spaces = [s for s in self._space_list if s.node_id not in drop]
        new_tables = [tables.get(s.node_id, self._tables[s.node_id]) for s in spaces]
        return InfluenceDiagram(spaces, new_tables)

    def subdiagram(self, keep: Iterable[str]) -> "InfluenceDiagram":
        keep = set(keep)
        return self.replace(drop=[n for n in self._order if n not in keep])

    def __repr__(self) -> str:
        arcs = [f"{p}->{n}" for n in self._order for p in self.parents(n)]
        return f"InfluenceDiagram(nodes={list(self._order)}, arcs={arcs})"


def validate_diagram(d: InfluenceDiagram) -> list[Violation]:
    """Every structural and numerical violation in ``d``; empty iff valid."""
    out: list[Violation] = []
    seen: set[str] = set()
    for s in d._space_list:
        if s.node_id in seen:
            out.append(Violation("duplicate-node", s.node_id, "node declared more than once"))
        seen.add(s.node_id)
        if len(s.outcomes) < 2:
            out.append(Violation("single-outcome", s.node_id, "a node needs at least 2 outcomes"))
        if len(set(s.outcomes)) != len(s.outcomes):
            out.append(Violation("duplicate-outcome", s.node_id, f"outcome labels repeat: {list(s.outcomes)}"))
    table_ids = [t.node_id for t in d._table_list]
    for n in d.nodes:
        if table_ids.count(n) != 1:
            out.append(Violation("table", n, f"expected one lower-bound table, found {table_ids.count(n)}"))
    for t in d._table_list:
        if t.node_id not in d:
            out.append(Violation("table", t.node_id, "table for an undeclared node"))

    for t in d._table_list:
        if t.node_id not in d:
            continue
        missing = [p for p in t.parents if p not in d]
        for p in missing:
            out.append(Violation("unknown-parent", t.node_id, f"parent {p!r} is not a node"))
        if len(set(t.parents)) != len(t.parents):
            out.append(Violation("duplicate-parent", t.node_id, f"parents repeat: {list(t.parents)}"))
        if t.node_id in t.parents:
            out.append(Violation("cycle", t.node_id, "node lists itself as a parent"))
        if missing:
            continue
        out.extend(_table_violations(d, t))

    graph = {
        t.node_id: [p for p in t.parents if p in d and p != t.node_id]
        for t in d._table_list
        if t.node_id in d
    }
    out.extend(_cycle_violations(graph))
    return out


def _table_violations(d: InfluenceDiagram, t: LowerBoundTable) -> list[Violation]:
    out = []
    n = d.card(t.node_id)
    pspaces = [d.space(p) for p in t.parents]
    expected = set(contexts([len(s) for s in pspaces]))

    def label(ctx):
        if len(ctx) != len(pspaces):
            return repr(ctx)
        return ",".join(s.outcomes[i] if 0 <= i < len(s) else f"#{i}" for s, i in zip(pspaces, ctx))

    for ctx in sorted(expected - set(t.entries)):
        out.append(Violation("missing-context", t.node_id, "no lower bounds for this parent configuration", label(ctx)))
    for ctx in sorted(set(t.entries) - expected):
        out.append(Violation("extra-context", t.node_id, "parent configuration does not exist", label(ctx)))
    for ctx in sorted(set(t.entries) & expected):
        vec = t.entries[ctx]
        if vec.shape != (n,):
            out.append(Violation("arity", t.node_id, f"expected {n} bounds, got {vec.size}", label(ctx)))
            continue
        if not np.all(np.isfinite(vec)):
            out.append(Violation("non-finite", t.node_id, f"bounds must be finite: {list(vec)}", label(ctx)))
            continue
        if np.any(vec < 0):
            out.append(Violation("negative-bound", t.node_id, f"negative lower bound in {list(vec)}", label(ctx)))
        total = float(vec.sum())
        if total > 1.0 + EPS_VALIDATE:
            out.append(Violation("sum-exceeds-one", t.node_id, f"lower bounds sum to {total:.12g} > 1", label(ctx)))
    return out


def _cycle_violations(graph: dict[str, list[str]]) -> list[Violation]:
    out = []
    graph = {k: list(v) for k, v in graph.items()}
    while True:
        try:
            TopologicalSorter(graph).prepare()
            return out
        except CycleError as exc:
            cycle = exc.args[1]
            out.append(Violation("cycle", cycle[0], "directed cycle " + " -> ".join(reversed(cycle))))
            # break this cycle and look for more
            graph.pop(cycle[0], None)
            for v in graph.values():
                if cycle[0] in v:
                    v.remove(cycle[0])


def other_directed_path(d: InfluenceDiagram, source: str, target: str) -> list[str] | None:
    """A directed path ``source -> ... -> target`` avoiding the direct arc.

    Returns the path as a node list, or ``None`` when no such path exists.
    """
    d._need(source)
    d._need(target)
    stack = [(c, [source, c]) for c in d.children(source) if c != target]
    seen = set()
    while stack:
        node, path = stack.pop()
        if node == target:
            return path
        if node in seen:
            continue
        seen.add(node)
        stack.extend((c, path + [c]) for c in d.children(node))
    return None


def has_other_directed_path(d: InfluenceDiagram, source: str, target: str) -> bool:
    return other_directed_path(d, source, target) is not None
