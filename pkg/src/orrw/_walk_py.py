"""NumPy version of the compiled stepping loop (same arithmetic, same results)."""
from __future__ import annotations

import numpy as np


def advance(ptr, nbr, edge, delta, table, uniforms, vertex, mask, stop, offset):
    ptr = np.asarray(ptr)
    deg = np.diff(ptr)
    width = int(deg.max())
    n = len(deg)
    # padded per-vertex neighbour and edge tables
    pad_nbr = np.zeros((n, width), dtype=np.int64)
    pad_edge = np.zeros((n, width), dtype=np.int64)
    real = np.zeros((n, width), dtype=bool)
    for x in range(n):
        d = deg[x]
        pad_nbr[x, :d] = nbr[ptr[x]:ptr[x + 1]]
        pad_edge[x, :d] = edge[ptr[x]:ptr[x + 1]]
        real[x, :d] = True
    table = np.asarray(table)
    rows = np.flatnonzero(stop < 0)
    x = vertex[rows].copy()
    m = mask[rows].copy()
    alive = np.ones(len(rows), dtype=bool)
    for j in range(uniforms.shape[1]):
        idx = np.flatnonzero(alive)
        if len(idx) == 0:
            break
        xs, ms = x[idx], m[idx]
        e = pad_edge[xs]
        traversed = (ms[:, None] >> e) & 1
        w = np.where(real[xs], np.where(traversed == 1, delta, 1.0), 0.0)
        cum = np.cumsum(w, axis=1)
        total = cum[:, -1]
        target = uniforms[rows[idx], j] * total
        hit = cum > target[:, None]
        k = np.where(hit.any(axis=1), hit.argmax(axis=1), deg[xs] - 1)
        chosen_edge = e[np.arange(len(idx)), k]
        x[idx] = pad_nbr[xs, k]
        bit = np.left_shift(np.int64(1), chosen_edge)
        fresh = (ms & bit) == 0
        ms = ms | bit
        m[idx] = ms
        left = fresh & (table[ms] == 0)
        if left.any():
            stop[rows[idx[left]]] = offset + j + 1
            alive[idx[left]] = False
    vertex[rows] = x
    mask[rows] = m
