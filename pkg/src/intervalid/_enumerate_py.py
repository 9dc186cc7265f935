"""Numpy implementation of the vertex-enumeration kernel.

Used when the compiled ``_enumerate`` extension is unavailable. Both share
one signature and must return identical extrema.

Arguments (``S`` joint states, ``K`` nodes, ``Q`` queries):

vdist
    Every slot's vertex distributions, flattened; slot ``(node, context)``
    owns ``radix[slot] * stride[k]`` consecutive entries.
base, slot
    ``(S, K)``: for state ``s`` and node ``k``, ``base`` is the offset of the
    node's outcome inside its slot block and ``slot`` the slot index.
stride
    ``(K,)`` outcome count per node.
radix
    ``(n_slots,)`` vertex count per slot.
col_of
    ``(Q, S)`` target-outcome column of each state per query, ``-1`` when
    the state contradicts the query's evidence.
q_off
    ``(Q + 1,)`` first output column of each query.

Returns ``(lo, hi, valid)``: per-column min and max of the query value over
all assignments with positive evidence probability, and the number of such
assignments per query.
"""

import numpy as np

CHUNK_ELEMENTS = 1 << 21


def enumerate_extrema(vdist, base, slot, stride, radix, col_of, q_off):
    vdist = np.ascontiguousarray(vdist, dtype=np.float64)
    base = np.asarray(base, dtype=np.intp)
    slot = np.asarray(slot, dtype=np.intp)
    stride = np.asarray(stride, dtype=np.intp)
    radix = np.asarray(radix, dtype=np.intp)
    col_of = np.asarray(col_of, dtype=np.intp)
    q_off = np.asarray(q_off, dtype=np.intp)
    n_states, n_nodes = base.shape
    n_queries = col_of.shape[0]
    n_cols = int(q_off[-1])

    # states -> output columns, as a 0/1 matrix
    member = np.zeros((n_states, n_cols))
    for q in range(n_queries):
        hit = col_of[q] >= 0
        member[np.flatnonzero(hit), q_off[q] + col_of[q][hit]] = 1.0
    query_of_col = np.repeat(np.arange(n_queries), np.diff(q_off))

    total = int(np.prod(radix)) if radix.size else 1
    lo = np.full(n_cols, np.inf)
    hi = np.full(n_cols, -np.inf)
    valid = np.zeros(n_queries, dtype=np.int64)
    chunk = max(1, CHUNK_ELEMENTS // max(1, n_states * n_nodes))
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk))
        if radix.size:
            digits = np.stack(np.unravel_index(idx, tuple(radix)), axis=1)
        else:
            digits = np.zeros((idx.size, 0), dtype=np.intp)
        pos = base[None, :, :] + digits[:, slot] * stride[None, None, :]
        joint = vdist[pos].prod(axis=2)
        num = joint @ member
        den = np.add.reduceat(num, q_off[:-1], axis=1) if n_cols else num
        ok = den > 0.0
        valid += ok.sum(axis=0)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = num / den[:, query_of_col]
        keep = ok[:, query_of_col]
        lo = np.minimum(lo, np.where(keep, val, np.inf).min(axis=0))
        hi = np.maximum(hi, np.where(keep, val, -np.inf).max(axis=0))
    return lo, hi, valid
