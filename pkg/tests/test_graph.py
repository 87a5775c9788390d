import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fcit.cspace import SampleStore
from fcit.errors import ContractViolation
from fcit.graph import (
    InvalidEdgeCache,
    OpenQueue,
    SearchTree,
    build_local_queue,
    mark_invalid,
    next_best_edge,
    open_pop_min,
    rewire,
)


def g_from_scratch(tree: SearchTree) -> dict[int, float]:
    """Cost-to-come by walking every parent chain, independent of stored g."""
    out = {}
    for v in tree.vertices():
        total, u = 0.0, v
        chain = []
        while u != tree.root:
            chain.append(float(tree.edge_cost[u]))
            u = int(tree.parent[u])
        for c in reversed(chain):
            total += c
        out[v] = total
    return out


def test_rewire_matches_recomputation_over_many_operations():
    rng = np.random.default_rng(0)
    n = 60
    tree = SearchTree(0, n)
    done = 0
    while done < 1000:
        child = int(rng.integers(1, n))
        parent = int(rng.integers(0, n))
        if parent == child or parent not in tree or tree.is_ancestor(child, parent):
            continue
        gap = min(float(tree.g[child] - tree.g[parent]), 1.0)
        if not gap > 0:
            continue
        cost = float(rng.uniform(0.0, gap)) or gap / 2
        changed = rewire(tree, parent, child, cost)
        done += 1
        expected = g_from_scratch(tree)
        for v, g in expected.items():
            assert tree.g[v] == pytest.approx(g, abs=1e-12)
        assert child in changed
        for v in changed:
            assert tree.is_ancestor(child, v)
    # every child set agrees with the parent array
    for v in tree.vertices():
        for c in tree.children[v]:
            assert tree.parent[c] == v
    assert len(tree) == len(tree.vertices())


def test_rewire_contracts():
    tree = SearchTree(0, 5)
    rewire(tree, 0, 1, 1.0)
    rewire(tree, 1, 2, 1.0)
    with pytest.raises(ContractViolation, match="not in the tree"):
        rewire(tree, 3, 4, 0.1)
    with pytest.raises(ContractViolation, match="root"):
        rewire(tree, 1, 0, 0.1)
    with pytest.raises(ContractViolation, match="does not improve"):
        rewire(tree, 0, 2, 2.0)
    tree.g[1] = 5.0  # make a cycle look improving
    with pytest.raises(ContractViolation, match="cycle"):
        rewire(tree, 2, 1, 0.1)


def test_rewire_moves_subtree():
    tree = SearchTree(0, 4)
    rewire(tree, 0, 1, 2.0)
    rewire(tree, 1, 2, 1.0)
    rewire(tree, 0, 3, 0.5)
    changed = rewire(tree, 3, 1, 0.5)
    assert changed == {1, 2}
    assert tree.g[2] == 2.0
    assert tree.children[0] == {3}
    assert tree.path_to(2) == [0, 3, 1, 2]


# -- invalid cache --------------------------------------------------------------


def test_invalid_cache_symmetric_and_idempotent():
    cache = InvalidEdgeCache()
    mark_invalid(cache, 3, 7)
    mark_invalid(cache, 7, 3)
    mark_invalid(cache, 3, 7)
    assert len(cache) == 1
    assert cache.contains(7, 3) and cache.contains(3, 7)
    assert cache.is_symmetric()
    with pytest.raises(ContractViolation):
        cache.add(4, 4)


@given(st.lists(st.tuples(st.integers(0, 30), st.integers(0, 30)).filter(lambda e: e[0] != e[1]), max_size=80))
def test_invalid_cache_symmetry_property(edges):
    cache = InvalidEdgeCache()
    for a, b in edges:
        cache.add(a, b)
        assert cache.is_symmetric()
    assert len(cache) == len({frozenset(e) for e in edges})


# -- local queues ------------------------------------------------------------------


def _store(points) -> SampleStore:
    s = SampleStore(2)
    s.extend(np.asarray(points, dtype=float))
    return s


def test_local_queue_example():
    store = _store([[0, 0], [1, 0], [0, 2], [3, 0]])
    h = np.array([3.0, 2.0, 3.6, 0.0])
    invalid = InvalidEdgeCache()
    invalid.add(0, 1)
    q = build_local_queue(0, store, h, invalid)
    # keys: id2 -> 2 + 3.6, id3 -> 3 + 0; id1 is known invalid
    assert q.children.tolist() == [3, 2]
    assert q.keys.tolist() == pytest.approx([3.0, 5.6])
    assert q.c_hat.tolist() == pytest.approx([3.0, 2.0])


def test_local_queue_radius():
    store = _store([[0, 0], [1, 0], [0, 2], [3, 0]])
    h = np.zeros(4)
    q = build_local_queue(0, store, h, InvalidEdgeCache(), radius=2.0)
    assert sorted(q.children.tolist()) == [1, 2]


def test_local_queue_ties_broken_by_id():
    store = _store([[0, 0], [1, 0], [-1, 0], [0, 1]])
    q = build_local_queue(0, store, np.zeros(4), InvalidEdgeCache())
    assert q.children.tolist() == [1, 2, 3]


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_local_queue_key_order_invariance(seed):
    """Relabelling samples permutes ids but leaves the key sequence unchanged."""
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0, 1, (30, 2))
    goal = rng.uniform(0, 1, 2)
    h = np.linalg.norm(pts - goal, axis=1)
    perm = np.concatenate([[0], 1 + rng.permutation(29)])
    q1 = build_local_queue(0, _store(pts), h, InvalidEdgeCache())
    q2 = build_local_queue(0, _store(pts[perm]), h[perm], InvalidEdgeCache())
    assert np.array_equal(q1.keys, q2.keys)
    assert np.all(np.diff(q1.keys) >= 0)
    assert np.array_equal(perm[q2.children], q1.children) or len(set(q1.keys.tolist())) < len(q1.keys)


def test_next_best_edge_skips_useless_and_returns_tree_edges():
    store = _store([[0, 0], [1, 0], [2, 0], [0, 1]])
    h = np.zeros(4)
    tree = SearchTree(0, 4)
    rewire(tree, 0, 1, 1.0)
    rewire(tree, 0, 3, 1.0)
    tree_g = tree.g.copy()
    q = build_local_queue(1, store, h, InvalidEdgeCache())
    # queue order from 1: 0 (1.0), 2 (1.0), 3 (sqrt 2)
    assert q.children.tolist() == [0, 2, 3]
    assert next_best_edge(1, tree, q) == (1, 2)  # 0 is the root, cannot improve
    assert next_best_edge(1, tree, q) is None  # 3 already has g = 1 < 1 + sqrt 2
    assert np.array_equal(tree.g, tree_g)

    q0 = build_local_queue(0, store, h, InvalidEdgeCache())
    seen = []
    while (e := next_best_edge(0, tree, q0)) is not None:
        seen.append(e[1])
    assert seen == [1, 3, 2]  # 1 and 3 are tree edges of 0, 2 improves


def test_next_best_edge_respects_invalid_cache():
    store = _store([[0, 0], [1, 0], [2, 0]])
    tree = SearchTree(0, 3)
    invalid = InvalidEdgeCache()
    invalid.add(0, 1)
    q = build_local_queue(0, store, np.zeros(3), InvalidEdgeCache())
    assert next_best_edge(0, tree, q, invalid) == (0, 2)


def test_next_best_edge_owner_check():
    store = _store([[0, 0], [1, 0]])
    q = build_local_queue(0, store, np.zeros(2), InvalidEdgeCache())
    with pytest.raises(ContractViolation):
        next_best_edge(1, SearchTree(0, 2), q)


# -- open queue ------------------------------------------------------------------


def test_open_queue_tie_break_order():
    tree = SearchTree(0, 10)
    for v in (1, 2, 3):
        tree.g[v] = 0.0
        tree.parent[v] = 0
    q = OpenQueue()
    # all f_hat = 2: smaller h(child) first, then parent id
    q.push(3, 7, 1.0, 1.0, 0.0)
    q.push(2, 8, 1.5, 0.5, 0.0)
    q.push(1, 9, 1.0, 1.0, 0.0)
    q.push(0, 6, 0.5, 1.5, 0.0)
    assert [open_pop_min(q, tree) for _ in range(4)] == [(2, 8), (1, 9), (3, 7), (0, 6)]
    assert q.pop(tree) is None


def test_open_queue_one_entry_per_parent():
    q = OpenQueue()
    q.push(1, 2, 1.0, 1.0, 0.0)
    with pytest.raises(ContractViolation):
        q.push(1, 3, 1.0, 1.0, 0.0)
    q.discard(1)
    q.push(1, 3, 1.0, 1.0, 0.0)
    assert len(q) == 1 and q.entry(1) == (3, 1.0)


def test_open_queue_rekey_reorders():
    tree = SearchTree(0, 10)
    tree.g[[1, 2]] = [1.0, 2.0]
    q = OpenQueue()
    q.push(1, 5, 1.0, 0.0, tree.g[1])
    q.push(2, 6, 1.0, 0.0, tree.g[2])
    tree.g[2] = 0.5
    q.rekey(2, tree.g[2])
    parent, child, f_hat, c_hat = q.pop(tree)
    assert (parent, child, f_hat, c_hat) == (2, 6, 1.5, 1.0)
    assert len(q) == 1


def test_open_queue_stale_key_settled_at_pop():
    """A g decrease that was not rekeyed is still noticed before popping."""
    tree = SearchTree(0, 10)
    tree.g[[1, 2]] = [1.0, 2.0]
    q = OpenQueue()
    q.push(1, 5, 1.0, 0.0, 1.0)
    q.push(2, 6, 1.0, 0.0, 2.0)
    tree.g[1] = 3.0  # stale: stored key 2.0 is now too small
    assert q.pop(tree)[:3] == (2, 6, 3.0)
    assert q.pop(tree)[:3] == (1, 5, 4.0)


@settings(max_examples=100)
@given(st.lists(st.tuples(st.sampled_from(["push", "pop", "rekey", "discard"]), st.integers(0, 15), st.floats(0, 5)), max_size=120))
def test_open_queue_size_bounded_by_parents(ops):
    """At most one entry per parent, so the queue never exceeds the vertex count."""
    tree = SearchTree(0, 16)
    for v in range(1, 16):
        tree.parent[v] = 0
        tree.g[v] = 1.0
    tree.vertex_count = 16
    q = OpenQueue()
    popped_keys = []
    for op, v, x in ops:
        if op == "push" and v not in q:
            q.push(v, (v + 1) % 16, x, 0.0, float(tree.g[v]))
        elif op == "pop":
            out = q.pop(tree)
            if out is not None:
                popped_keys.append(out[2])
        elif op == "rekey":
            tree.g[v] = min(tree.g[v], x)
            q.rekey(v, float(tree.g[v]))
        elif op == "discard":
            q.discard(v)
        assert len(q) <= len(tree)
        assert len(q) == len({p for p in range(16) if p in q})
    assert all(math.isfinite(k) for k in popped_keys)
