"""Vantage-point tree for exact nearest-neighbor search in Euclidean space.

The tree partitions points by distance to a chosen vantage point and prunes
subtrees with the triangle inequality, so searches are exact for any query.
Callers drive the search through a visit callback that returns the current
pruning radius, which lets them search under one metric while ranking
candidates under an equivalent one.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["VPTree"]

_LEAF = 0
_SPLIT = 1


class VPTree:
    """Exact nearest-neighbor index over a fixed (N, dim) float array.

    Construction is deterministic for a given ``seed``: vantage points are
    drawn from a private RNG stream.  ``leaf_size`` bounds the bucket size at
    which recursion stops.
    """

    def __init__(self, points, *, leaf_size: int = 24, seed: int = 0):
        pts = np.ascontiguousarray(points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise ValueError(f"points must be a nonempty 2-d array, got shape {pts.shape}")
        if leaf_size < 1:
            raise ValueError("leaf_size must be positive")
        self._points = pts
        self._leaf_size = int(leaf_size)
        rng = np.random.default_rng(seed)
        self._root = self._build(np.arange(len(pts), dtype=np.intp), rng)

    def __len__(self) -> int:
        return len(self._points)

    def _build(self, idx: np.ndarray, rng: np.random.Generator):
        if len(idx) <= self._leaf_size:
            return (_LEAF, idx)
        pick = int(rng.integers(len(idx)))
        v = idx[pick]
        rest = np.delete(idx, pick)
        dists = np.linalg.norm(self._points[rest] - self._points[v], axis=1)
        mu = float(np.median(dists))
        inner = rest[dists < mu]
        outer = rest[dists >= mu]
        if len(inner) == 0 or len(outer) == 0:
            # Degenerate split (many coincident distances): stop here.
            return (_LEAF, idx)
        return (_SPLIT, v, mu, self._build(inner, rng), self._build(outer, rng))

    def search(self, query, visit) -> None:
        """Visit candidate points for ``query``, pruning with the callback's radius.

        ``visit(index, euclidean_distance)`` is called for every examined
        point and must return the current pruning radius tau: subtrees that
        cannot contain a point within tau of the query are skipped.  A
        callback that never shrinks tau below the best distance seen keeps
        the search exact.
        """
        q = np.asarray(query, dtype=np.float64).reshape(-1)
        if q.shape[0] != self._points.shape[1]:
            raise ValueError(f"query has {q.shape[0]} coordinates, index holds {self._points.shape[1]}")
        tau = math.inf
        stack = [(0.0, self._root)]
        while stack:
            gap, node = stack.pop()
            if gap > tau:
                continue
            if node[0] == _LEAF:
                idx = node[1]
                dists = np.linalg.norm(self._points[idx] - q, axis=1)
                for i, dv in zip(idx.tolist(), dists.tolist()):
                    tau = visit(i, dv)
                continue
            _, v, mu, inner, outer = node
            dv = float(np.linalg.norm(self._points[v] - q))
            tau = visit(v, dv)
            if dv < mu:
                near, far, far_gap = inner, outer, mu - dv
            else:
                near, far, far_gap = outer, inner, dv - mu
            # Far side first so the near side is popped (and searched) first.
            if far_gap <= tau:
                stack.append((far_gap, far))
            stack.append((0.0, near))

    def nearest(self, query) -> tuple[int, float]:
        """Index and Euclidean distance of the closest stored point."""
        best_i, best_d = -1, math.inf

        def visit(i, dv):
            nonlocal best_i, best_d
            if dv < best_d:
                best_i, best_d = i, dv
            return best_d

        self.search(query, visit)
        return best_i, best_d
