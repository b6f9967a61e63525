import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gseplan.roadmap import LINEAR_SCAN_LIMIT, Roadmap


def bellman_ford(n, edges, src):
    dist = [math.inf] * n
    dist[src] = 0.0
    for _ in range(n - 1):
        changed = False
        for i, j, w in edges:
            for a, b in ((i, j), (j, i)):
                if dist[a] + w < dist[b]:
                    dist[b] = dist[a] + w
                    changed = True
        if not changed:
            break
    return dist


def random_graph(seed, n=None, p=None):
    rng = np.random.default_rng(seed)
    n = n or int(rng.integers(2, 51))
    p = p if p is not None else rng.uniform(0.02, 0.3)
    rm = Roadmap(2, [0, 0], [1, 1])
    for x in rng.uniform(0, 1, size=(n, 2)):
        rm.add_vertex(x)
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                rm.add_edge(i, j)
    return rm


class TestNearest:
    def test_strict(self):
        rm = Roadmap(2)
        rm.add_vertex([0, 0])
        rm.add_vertex([1, 1])
        assert rm.nearest([0.2, 0]) == 0

    def test_tie_lowest_index(self):
        rm = Roadmap(2)
        rm.add_vertex([1, 0])
        rm.add_vertex([0, 1])
        assert rm.nearest([0, 0]) == 0

    def test_linear_scan(self):
        rng = np.random.default_rng(3)
        rm = Roadmap(2)
        pts = rng.uniform(0, 1, size=(500, 2))
        for p in pts:
            rm.add_vertex(p)
        for q in rng.uniform(0, 1, size=(100, 2)):
            assert rm.nearest(q) == int(np.argmin(np.linalg.norm(pts - q, axis=1)))


class TestNear:
    def test_empty_result(self):
        rm = Roadmap(2)
        rm.add_vertex([0, 0])
        rm.add_vertex([1, 1])
        assert rm.near([0.5, 0.5], 0.1) == []

    def test_everything(self):
        rm = random_graph(1, n=30)
        assert rm.near([0.5, 0.5], 2.0) == list(range(30))

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 10_000), st.floats(0.01, 0.8))
    def test_matches_scan(self, seed, r):
        rm = random_graph(seed, n=40, p=0)
        q = np.random.default_rng(seed + 1).uniform(0, 1, 2)
        expect = [i for i, p in enumerate(rm.points) if np.linalg.norm(p - q) <= r]
        assert rm.near(q, r) == expect


def test_grid_index_agrees_with_scan():
    rng = np.random.default_rng(9)
    rm = Roadmap(2, [0, 0], [1, 1])
    pts = rng.uniform(0, 1, size=(LINEAR_SCAN_LIMIT + 500, 2))
    for p in pts:
        rm.add_vertex(p)
    assert rm._grid is not None
    for q in rng.uniform(0, 1, size=(200, 2)):
        d = np.linalg.norm(pts - q, axis=1)
        assert rm.nearest(q) == int(np.argmin(d))
        assert rm.near(q, 0.03) == [int(i) for i in np.flatnonzero(d <= 0.03)]


class TestMinPath:
    def test_disconnected(self):
        rm = Roadmap(2)
        rm.add_vertex([0, 0])
        rm.add_vertex([1, 0])
        res = rm.min_path()
        assert not res.found and res.cost == math.inf

    def test_chain_via_intermediate(self):
        rm = Roadmap(2)
        for p in ([0, 0], [2, 0], [1, 0]):
            rm.add_vertex(p)
        rm.add_edge(0, 2)
        rm.add_edge(2, 1)
        res = rm.min_path()
        assert res.found and res.vertices == [0, 2, 1] and res.cost == pytest.approx(2)

    def test_shortcut_preferred(self):
        rm = Roadmap(2)
        for p in ([0, 0], [2, 0], [1, 1]):
            rm.add_vertex(p)
        rm.add_edge(0, 2)
        rm.add_edge(2, 1)
        assert rm.min_path().cost == pytest.approx(2 * math.sqrt(2))
        rm.add_edge(0, 1)
        res = rm.min_path()
        assert res.vertices == [0, 1] and res.cost == pytest.approx(2)

    def test_lexicographic_tie(self):
        rm = Roadmap(2)
        for p in ([0, 0], [1, 1], [0, 1], [1, 0]):
            rm.add_vertex(p)
        for i, j in ((0, 3), (3, 1), (0, 2), (2, 1)):
            rm.add_edge(i, j)
        assert rm.min_path().vertices == [0, 2, 1]

    @pytest.mark.parametrize("seed", range(100))
    def test_bellman_ford(self, seed):
        rm = random_graph(seed)
        edges = list(rm.edges())
        ref = bellman_ford(rm.n, edges, 0)
        res = rm.min_path()
        if math.isinf(ref[1]):
            assert not res.found
        else:
            assert res.cost == pytest.approx(ref[1], abs=1e-12)
            recomputed = sum(np.linalg.norm(rm.points[a] - rm.points[b])
                             for a, b in zip(res.vertices, res.vertices[1:]))
            assert recomputed == pytest.approx(res.cost, abs=1e-9)
            assert all(rm.has_edge(a, b) for a, b in zip(res.vertices, res.vertices[1:]))
        # the incrementally maintained distances agree with the oracle
        np.testing.assert_allclose(rm.dist, ref, atol=1e-12)
        assert rm.best_cost == pytest.approx(ref[1], abs=1e-12) or math.isinf(ref[1])


def test_batched_connect_matches_oracle():
    rng = np.random.default_rng(4)
    rm = Roadmap(2)
    for _ in range(60):
        idx = rm.add_vertex(rng.uniform(0, 1, 2))
        if idx >= 2:
            nbrs = np.flatnonzero(rng.random(idx) < 0.15)
            rm.connect(idx, nbrs)
        np.testing.assert_allclose(rm.dist, bellman_ford(rm.n, list(rm.edges()), 0), atol=1e-12)


def test_cost_monotone_under_growth():
    rng = np.random.default_rng(5)
    rm = Roadmap(2)
    rm.add_vertex([0, 0])
    rm.add_vertex([1, 1])
    last = math.inf
    for _ in range(200):
        i = rm.add_vertex(rng.uniform(0, 1, 2))
        j = int(rng.integers(0, i))
        rm.add_edge(i, j)
        c = rm.min_path().cost
        assert c <= last
        last = c


def test_edges_symmetric_and_dump(tmp_path):
    rm = random_graph(7, n=20, p=0.3)
    for i, j, w in rm.edges():
        assert rm.adj[j][i] == w == pytest.approx(np.linalg.norm(rm.points[i] - rm.points[j]))
        assert w > 0
    path = tmp_path / "rm.json"
    rm.dump(path)
    doc = json.loads(path.read_text())
    assert len(doc["vertices"]) == 20
    assert len(doc["edges"]) == rm.edge_count
