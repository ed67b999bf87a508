"""Batched range minima in linear space.

The sequence is cut into blocks of width ``t = ceil(log2 n)``. Each block
keeps its prefix and suffix minima, and a sparse table is built over the
block minima only, so storage is ``O(n)`` instead of ``O(n log n)``. A query
must span at least ``t`` positions; shorter ranges are scanned locally by
the caller. Positions are 1-based throughout.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .mpc import RoundLedger


class ShortRangeError(ValueError):
    """Query narrower than the block width; answer it by a local scan instead."""


@dataclass
class RmqIndex:
    n: int
    width: int
    block_min: np.ndarray
    lef: np.ndarray
    rig: np.ndarray
    sparse: list[np.ndarray]

    @property
    def entries(self) -> int:
        return sum(len(level) for level in self.sparse) + 2 * self.n

    def lef_at(self, i: int):
        return self.lef[i - 1]

    def rig_at(self, i: int):
        return self.rig[i - 1]


def block_width(n: int) -> int:
    return max(1, (n - 1).bit_length())


def rmq_preprocess(values: Sequence | np.ndarray, ledger: RoundLedger | None = None) -> RmqIndex:
    ledger = ledger if ledger is not None else RoundLedger()
    a = np.asarray(values)
    if a.ndim != 1 or len(a) == 0:
        raise ValueError("range-minimum index needs a non-empty one-dimensional sequence")
    n = len(a)
    t = block_width(n)
    nb = -(-n // t)
    # replicate each block (plus the next t entries) onto one machine
    ledger.charge("sort", 2 * n)
    fill = _max_value(a.dtype)
    padded = np.full(nb * t, fill, dtype=a.dtype)
    padded[:n] = a
    blocks = padded.reshape(nb, t)
    lef = np.minimum.accumulate(blocks, axis=1).ravel()[:n]
    rig = np.minimum.accumulate(blocks[:, ::-1], axis=1)[:, ::-1].ravel()[:n]
    block_min = blocks.min(axis=1)
    ledger.charge("local_round", 3 * n + nb)
    sparse = [block_min]
    span = 1
    while 2 * span <= nb:
        prev = sparse[-1]
        sparse.append(np.minimum(prev[:-span], prev[span:]))
        span *= 2
    ledger.charge("sort", 3 * n + sum(len(s) for s in sparse))
    return RmqIndex(n, t, block_min, lef, rig, sparse)


def _max_value(dtype):
    if np.issubdtype(dtype, np.integer):
        return np.iinfo(dtype).max
    return np.inf


def _block_range_min(index: RmqIndex, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Minimum of ``block_min[lo:hi]`` (0-based, half-open, non-empty)."""
    length = hi - lo
    level = np.floor(np.log2(np.maximum(length, 1))).astype(np.int64)
    # guard against float rounding at exact powers of two
    level -= (1 << level) > length
    level += (1 << (level + 1)) <= length
    out = np.empty(len(lo), dtype=index.block_min.dtype)
    for k in np.unique(level):
        sel = level == k
        tab = index.sparse[k]
        out[sel] = np.minimum(tab[lo[sel]], tab[hi[sel] - (1 << k)])
    return out


def rmq_arrays(index: RmqIndex, ls: np.ndarray, rs: np.ndarray,
               ledger: RoundLedger | None = None) -> np.ndarray:
    ledger = ledger if ledger is not None else RoundLedger()
    ls = np.asarray(ls, dtype=np.int64)
    rs = np.asarray(rs, dtype=np.int64)
    t = index.width
    bad = (ls < 1) | (rs > index.n) | (ls + t > rs)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise ShortRangeError(
            f"query ({ls[i]}, {rs[i]}) must satisfy 1 <= l, l + {t} <= r <= {index.n}; "
            "scan short ranges locally")
    ledger.charge("multi_query", index.entries + 3 * len(ls))
    if len(ls) == 0:
        return np.zeros(0, dtype=index.block_min.dtype)
    lq = -(-ls // t) * t
    rq = (rs // t) * t
    out = np.minimum(index.rig[ls - 1], index.lef[rs - 1])
    inner = lq != rq
    if inner.any():
        # blocks lq/t + 1 .. rq/t in 1-based numbering
        mid = _block_range_min(index, lq[inner] // t, rq[inner] // t)
        out[inner] = np.minimum(out[inner], mid)
    return out


def rmq_batch(index: RmqIndex, queries: Iterable[tuple[int, int]],
              ledger: RoundLedger | None = None) -> dict[tuple[int, int], object]:
    pairs = [(int(l), int(r)) for l, r in queries]
    arr = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    vals = rmq_arrays(index, arr[:, 0], arr[:, 1], ledger)
    return {q: v.item() for q, v in zip(pairs, vals)}
