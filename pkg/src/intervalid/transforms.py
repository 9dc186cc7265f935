"""Bound propagation through node removal and arc reversal.

The two kernels work on a single conditioning context:

* :func:`marginal_lower_bounds` gives sharp lower bounds on ``p(x)`` from
  lower bounds on ``p(x|y)`` and ``p(y)``;
* :func:`posterior_lower_bounds` gives sharp lower bounds on ``p(y|x)``.

:func:`remove_node` and :func:`reverse_arc` apply them context by context to
rewrite a whole :class:`~intervalid.model.InfluenceDiagram`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import (
    InfluenceDiagram,
    LowerBoundTable,
    ValidationError,
    as_bound_vector,
    contexts,
    other_directed_path,
    upper_bounds,
)


class PreconditionError(ValueError):
    """A transformation was requested on a diagram that does not admit it."""


def _family(b_x_given_y) -> np.ndarray:
    cond = np.asarray(b_x_given_y, dtype=np.float64)
    if cond.ndim != 2:
        raise ValidationError("conditional family must be a 2-d array (one row per y)")
    for row in cond:
        as_bound_vector(row)
    return cond


def _check_dims(cond: np.ndarray, b_y: np.ndarray) -> None:
    if cond.shape[0] != b_y.size:
        raise ValidationError(
            f"conditional family has {cond.shape[0]} rows but Y has {b_y.size} outcomes"
        )


def marginal_lower_bounds(b_x_given_y, b_y, *, pivots: Sequence[int] | None = None) -> np.ndarray:
    """Lower bounds on ``p(x)`` given lower bounds on ``p(x|y)`` and ``p(y)``.

    For each outcome x the y with the smallest ``b(x|y)`` receives all of the
    free mass of Y (its upper bound); every other y sits at its lower bound.

    Args:
        b_x_given_y: array of shape ``(|Y|, |X|)``, row ``j`` holding
            ``b(x | y_j)``.
        b_y: lower bounds on ``p(y)``.
        pivots: override the minimizing y per outcome of X. Only useful for
            checking that the choice among ties is immaterial.
    """
    cond = _family(b_x_given_y)
    b_y = as_bound_vector(b_y)
    _check_dims(cond, b_y)
    u_y = upper_bounds(b_y)
    if pivots is None:
        pivots = np.argmin(cond, axis=0)
    out = np.empty(cond.shape[1])
    for x in range(cond.shape[1]):
        s = int(pivots[x])
        weights = b_y.copy()
        weights[s] = u_y[s]
        out[x] = float(np.dot(cond[:, x], weights))
    return out


def posterior_lower_bounds(b_x_given_y, b_y, x: int, *, pivots: Sequence[int] | None = None) -> np.ndarray:
    """Lower bounds on ``p(y | x)`` for a fixed observed outcome ``x``.

    The numerator takes every factor at its lower bound. The denominator
    takes the other y's likelihoods at their upper bounds and gives the free
    mass of Y to the competitor with the largest upper likelihood.

    A zero denominator forces a zero numerator; the result is then the vacuous
    bound 0.

    Args:
        pivots: override the maximizing competitor per outcome of Y (used to
            check tie-break invariance).
    """
    cond = _family(b_x_given_y)
    b_y = as_bound_vector(b_y)
    _check_dims(cond, b_y)
    if not 0 <= x < cond.shape[1]:
        raise ValidationError(f"outcome index {x} out of range for X with {cond.shape[1]} outcomes")
    n_y = b_y.size
    u_y = upper_bounds(b_y)
    lik_lo = cond[:, x]
    lik_hi = np.array([upper_bounds(row)[x] for row in cond])
    out = np.zeros(n_y)
    for y in range(n_y):
        num = lik_lo[y] * b_y[y]
        if pivots is None:
            rivals = [i for i in range(n_y) if i != y]
            s = rivals[int(np.argmax(lik_hi[rivals]))]
        else:
            s = int(pivots[y])
        den = num + lik_hi[s] * u_y[s]
        for i in range(n_y):
            if i != y and i != s:
                den += lik_hi[i] * b_y[i]
        if den > 0.0:
            out[y] = min(num / den, 1.0)
    return out


# -- diagram-level -------------------------------------------------------------


@dataclass(frozen=True)
class PartitionedPredecessors:
    """Predecessors around an arc ``y -> x``.

    ``v1``: parents of y only; ``v2``: shared parents; ``v3``: parents of x
    only (excluding y). Each is in declaration order.
    """

    v1: tuple[str, ...]
    v2: tuple[str, ...]
    v3: tuple[str, ...]

    @property
    def merged(self) -> tuple[str, ...]:
        return self.v1 + self.v2 + self.v3


def partition_predecessors(parents_y: Sequence[str], parents_x: Sequence[str], y: str, rank) -> PartitionedPredecessors:
    py, px = set(parents_y), set(parents_x) - {y}
    order = lambda s: tuple(sorted(s, key=rank))
    return PartitionedPredecessors(order(py - px), order(py & px), order(px - py))


def _partition(d: InfluenceDiagram, y: str, x: str) -> PartitionedPredecessors:
    return partition_predecessors(d.parents(y), d.parents(x), y, d.rank)


def _local_family(d: InfluenceDiagram, y: str, x: str, merged: tuple[str, ...], ctx):
    """``b(x | y, ...)`` rows and ``b(y | ...)`` for one merged context."""
    value = dict(zip(merged, ctx))
    ty, tx = d.table(y), d.table(x)
    b_y = ty[tuple(value[p] for p in ty.parents)]
    rows = []
    for yo in range(d.card(y)):
        value[y] = yo
        rows.append(tx[tuple(value[p] for p in tx.parents)])
    return np.array(rows), b_y


def remove_node(d: InfluenceDiagram, y: str) -> InfluenceDiagram:
    """Remove ``y`` by marginalizing it into its single successor.

    The successor inherits ``y``'s predecessors and its lower bounds are
    recomputed in every context with :func:`marginal_lower_bounds`.

    Raises:
        PreconditionError: ``y`` does not have exactly one successor.
    """
    succ = d.children(y)
    if len(succ) != 1:
        raise PreconditionError(
            f"cannot remove {y!r}: needs exactly one successor, has {len(succ)} {list(succ)}"
        )
    (x,) = succ
    parts = _partition(d, y, x)
    merged = parts.merged
    entries = {}
    for ctx in contexts([d.card(p) for p in merged]):
        cond, b_y = _local_family(d, y, x, merged, ctx)
        entries[ctx] = marginal_lower_bounds(cond, b_y)
    return d.replace({x: LowerBoundTable(x, merged, entries)}, drop=[y])


def reverse_arc(d: InfluenceDiagram, y: str, x: str) -> InfluenceDiagram:
    """Reverse the arc ``y -> x``.

    Both nodes end up with predecessors ``V1 + V2 + V3``; ``y`` additionally
    gets ``x`` as its last parent. Both new tables are computed from the
    original tables: ``y``'s with :func:`posterior_lower_bounds`, ``x``'s
    with :func:`marginal_lower_bounds`.

    Raises:
        PreconditionError: no arc ``y -> x``, or another directed path from
            ``y`` to ``x`` exists (reversing would create a cycle).
    """
    if y not in d.parents(x):
        raise PreconditionError(f"no arc {y} -> {x} to reverse")
    witness = other_directed_path(d, y, x)
    if witness is not None:
        raise PreconditionError(
            f"cannot reverse {y} -> {x}: other directed path {' -> '.join(witness)}"
        )
    merged = _partition(d, y, x).merged
    n_x = d.card(x)
    x_entries, y_entries = {}, {}
    for ctx in contexts([d.card(p) for p in merged]):
        cond, b_y = _local_family(d, y, x, merged, ctx)
        x_entries[ctx] = marginal_lower_bounds(cond, b_y)
        for xo in range(n_x):
            y_entries[ctx + (xo,)] = posterior_lower_bounds(cond, b_y, xo)
    return d.replace({
        x: LowerBoundTable(x, merged, x_entries),
        y: LowerBoundTable(y, merged + (x,), y_entries),
    })
