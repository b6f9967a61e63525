"""
Undirected planner graph with Euclidean edge weights.

Besides the adjacency lists the roadmap keeps single-source distances from the
init vertex up to date on every edge insertion (insertions only ever shorten
distances), so the current best init-goal cost is available in O(1) after each
planner iteration.  ``min_path`` runs a fresh Dijkstra and is the authority for
the returned path.
"""

from __future__ import annotations

import heapq
import json
import math
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

LINEAR_SCAN_LIMIT = 4096


@dataclass
class PathResult:
    vertices: list = field(default_factory=list)
    cost: float = math.inf
    found: bool = False


class GridIndex:
    """Uniform bucket grid over a box for ball and nearest-neighbour queries."""

    def __init__(self, lo, hi, cell: float):
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)
        self.cell = float(cell)
        self.buckets = defaultdict(list)
        self.shape = np.maximum(np.ceil((self.hi - self.lo) / self.cell).astype(int), 1)

    def key(self, x) -> tuple:
        k = np.floor((np.asarray(x) - self.lo) / self.cell).astype(int)
        return tuple(np.clip(k, 0, self.shape - 1))

    def insert(self, idx: int, x):
        self.buckets[self.key(x)].append(idx)

    def _cells(self, center, radius_cells: int):
        ranges = [range(max(c - radius_cells, 0), min(c + radius_cells, s - 1) + 1)
                  for c, s in zip(center, self.shape)]
        grids = np.meshgrid(*[np.fromiter(r, int) for r in ranges], indexing="ij")
        return zip(*(g.ravel() for g in grids))

    def candidates(self, x, radius: float) -> list:
        reach = int(math.ceil(radius / self.cell))
        out = []
        for cell in self._cells(self.key(x), reach):
            out.extend(self.buckets.get(cell, ()))
        return out


class Roadmap:
    def __init__(self, dim: int, lo=None, hi=None, capacity: int = 256):
        self.dim = dim
        self._pts = np.empty((capacity, dim))
        self.n = 0
        self.shapes = []
        self.adj: list[dict] = []
        self.edge_count = 0
        self.dist: list[float] = []
        self.init_id = 0
        self.goal_id = 1
        self.lo = None if lo is None else np.asarray(lo, dtype=float)
        self.hi = None if hi is None else np.asarray(hi, dtype=float)
        self._grid = None

    @property
    def points(self) -> np.ndarray:
        return self._pts[: self.n]

    @property
    def best_cost(self) -> float:
        return self.dist[self.goal_id] if self.n > self.goal_id else math.inf

    def add_vertex(self, point, shape=None) -> int:
        if self.n == self._pts.shape[0]:
            grown = np.empty((2 * self.n, self.dim))
            grown[: self.n] = self._pts[: self.n]
            self._pts = grown
        idx = self.n
        self._pts[idx] = point
        self.n += 1
        self.shapes.append(shape)
        self.adj.append({})
        self.dist.append(0.0 if idx == self.init_id else math.inf)
        if self._grid is not None:
            self._grid.insert(idx, point)
        elif self.n > LINEAR_SCAN_LIMIT and self.lo is not None:
            self._build_grid()
        return idx

    def _build_grid(self):
        vol = float(np.prod(self.hi - self.lo))
        cell = (vol * 4 / self.n) ** (1 / self.dim)
        self._grid = GridIndex(self.lo, self.hi, cell)
        for i, p in enumerate(self.points):
            self._grid.insert(i, p)

    def has_edge(self, i: int, j: int) -> bool:
        return j in self.adj[i]

    def add_edge(self, i: int, j: int) -> bool:
        if i == j or j in self.adj[i]:
            return False
        w = float(np.linalg.norm(self._pts[i] - self._pts[j]))
        if not w > 0:
            return False
        self.adj[i][j] = w
        self.adj[j][i] = w
        self.edge_count += 1
        self._relax(i, j, w)
        return True

    def connect(self, idx: int, nbrs) -> int:
        """Add edges from vertex ``idx`` to every vertex in ``nbrs``."""
        nbrs = [int(j) for j in nbrs if j != idx and j not in self.adj[idx]]
        if not nbrs:
            return 0
        w = np.linalg.norm(self._pts[nbrs] - self._pts[idx], axis=1)
        mine = self.adj[idx]
        added = 0
        for j, wj in zip(nbrs, w.tolist()):
            if wj > 0:
                mine[j] = wj
                self.adj[j][idx] = wj
                added += 1
        self.edge_count += added
        # settle idx from its neighbours, then push any improvement outward
        dist = self.dist
        best = min((dist[j] + mine[j] for j in nbrs if j in mine), default=math.inf)
        if best < dist[idx]:
            dist[idx] = best
        self._propagate([(dist[idx], idx)])
        return added

    def _relax(self, i: int, j: int, w: float):
        dist = self.dist
        heap = []
        if dist[i] + w < dist[j]:
            dist[j] = dist[i] + w
            heap.append((dist[j], j))
        elif dist[j] + w < dist[i]:
            dist[i] = dist[j] + w
            heap.append((dist[i], i))
        self._propagate(heap)

    def _propagate(self, heap):
        dist = self.dist
        heap = [(d, u) for d, u in heap if math.isfinite(d)]
        heapq.heapify(heap)
        while heap:
            d, u = heapq.heappop(heap)
            if d > dist[u]:
                continue
            for v, wv in self.adj[u].items():
                nd = d + wv
                if nd < dist[v]:
                    dist[v] = nd
                    heapq.heappush(heap, (nd, v))

    def edges(self):
        for i, nbrs in enumerate(self.adj):
            for j, w in nbrs.items():
                if i < j:
                    yield i, j, w

    def nearest(self, X, among: np.ndarray | None = None) -> int:
        """Index of the closest vertex; ties go to the lowest index.

        ``among`` optionally restricts the search to a sorted index array.
        """
        X = np.asarray(X, dtype=float)
        if self.n == 0:
            raise ValueError("roadmap is empty")
        if among is None and self._grid is not None:
            return self._grid_nearest(X)
        pts = self.points if among is None else self.points[among]
        d2 = np.einsum("ij,ij->i", pts - X, pts - X)
        k = int(np.argmin(d2))
        return k if among is None else int(among[k])

    def _grid_nearest(self, X) -> int:
        g = self._grid
        reach = 0
        while True:
            radius = reach * g.cell
            cand = g.candidates(X, radius)
            if cand:
                cand = np.sort(np.asarray(cand))
                d2 = np.einsum("ij,ij->i", self.points[cand] - X, self.points[cand] - X)
                best = float(np.sqrt(d2.min()))
                # anything closer than `best` lies within ceil(best / cell) rings
                if best <= radius:
                    return int(cand[np.argmin(d2)])
                cand = np.sort(np.asarray(g.candidates(X, best)))
                d2 = np.einsum("ij,ij->i", self.points[cand] - X, self.points[cand] - X)
                return int(cand[np.argmin(d2)])
            reach += 1

    def near(self, X, r: float) -> list:
        """Indices of vertices within distance r of X, ascending."""
        X = np.asarray(X, dtype=float)
        if self._grid is not None:
            cand = np.sort(np.asarray(self._grid.candidates(X, r), dtype=int))
        else:
            cand = np.arange(self.n)
        pts = self.points[cand]
        d2 = np.einsum("ij,ij->i", pts - X, pts - X)
        return [int(k) for k in cand[d2 <= r * r]]

    def min_path(self) -> PathResult:
        """Dijkstra from init to goal; equal-cost ties resolved by the
        lexicographically smallest vertex-index sequence."""
        src, dst = self.init_id, self.goal_id
        best = {src: 0.0}
        heap = [(0.0, (src,))]
        done = set()
        while heap:
            d, path = heapq.heappop(heap)
            u = path[-1]
            if u in done:
                continue
            done.add(u)
            if u == dst:
                return PathResult(list(path), d, True)
            for v, w in self.adj[u].items():
                if v in done:
                    continue
                nd = d + w
                if nd <= best.get(v, math.inf):
                    best[v] = nd
                    heapq.heappush(heap, (nd, path + (v,)))
        return PathResult([], math.inf, False)

    def path_points(self, path: PathResult) -> np.ndarray:
        return self.points[path.vertices]

    def to_json(self) -> dict:
        return {
            "vertices": self.points.tolist(),
            "edges": [[i, j, w] for i, j, w in self.edges()],
        }

    def dump(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh)
