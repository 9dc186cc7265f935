"""Seeded random diagrams for testing and oracle cross-checks."""

from __future__ import annotations

import numpy as np

from .model import InfluenceDiagram, LowerBoundTable, OutcomeSpace, contexts


def random_bounds(rng: np.random.Generator, n: int, *, exact: bool = False, max_range: float = 0.6) -> np.ndarray:
    """A lower-bound vector: a random distribution shrunk by a random range.

    Entries are zeroed now and then so that degenerate factors get exercised.
    """
    p = rng.dirichlet(np.ones(n))
    if rng.random() < 0.15:
        p[rng.integers(n)] = 0.0
        p /= p.sum()
    if exact:
        return p
    r = rng.uniform(0.0, max_range)
    return p * (1.0 - r)


def random_diagram(
    rng: np.random.Generator,
    n_nodes: int,
    *,
    max_outcomes: int = 3,
    max_parents: int = 2,
    arc_prob: float = 0.5,
    exact: bool = False,
    max_combinations: int | None = None,
) -> InfluenceDiagram:
    """A random DAG over ``n_nodes`` nodes with random lower-bound tables.

    Nodes are declared in a topological order and each earlier node becomes a
    parent with probability ``arc_prob``, up to ``max_parents``. With
    ``max_combinations`` set, structures whose vertex-assignment count exceeds
    it are redrawn.
    """
    while True:
        names = [f"N{i}" for i in range(n_nodes)]
        cards = {n: int(rng.integers(2, max_outcomes + 1)) for n in names}
        parents = {}
        for i, n in enumerate(names):
            cand = [names[j] for j in range(i) if rng.random() < arc_prob]
            if len(cand) > max_parents:
                cand = [cand[j] for j in sorted(rng.choice(len(cand), max_parents, replace=False))]
            parents[n] = tuple(cand)
        if max_combinations is not None:
            count = 1
            for n in names:
                count *= cards[n] ** int(np.prod([cards[p] for p in parents[n]]))
            if count > max_combinations:
                continue
        spaces = [OutcomeSpace(n, tuple(f"{n.lower()}_{k}" for k in range(cards[n]))) for n in names]
        tables = []
        for n in names:
            entries = {
                ctx: random_bounds(rng, cards[n], exact=exact)
                for ctx in contexts([cards[p] for p in parents[n]])
            }
            tables.append(LowerBoundTable(n, parents[n], entries))
        return InfluenceDiagram(spaces, tables)
