"""Search-tree and edge-queue structures for the fully connected search.

Every vertex that the search expands owns a :class:`LocalQueue` holding all of
its outgoing candidate edges, sorted once by ``c_hat + h_hat``. The global
:class:`OpenQueue` holds at most one edge per parent vertex: the best
remaining edge from that vertex's local queue.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .cspace import SampleStore, distances_from
from .errors import ContractViolation

INF = math.inf


class SearchTree:
    """Parent pointers, cost-to-come, and child sets indexed by sample id.

    ``parent[v] == -1`` and ``g[v] == inf`` for every id not in the tree.
    """

    def __init__(self, root: int, size: int = 0):
        self.root = root
        self.parent = np.empty(0, dtype=np.int64)
        self.g = np.empty(0)
        self.edge_cost = np.empty(0)
        self.children: list[set[int]] = []
        self.grow(max(size, root + 1))
        self.g[root] = 0.0
        self.vertex_count = 1

    def grow(self, size: int) -> None:
        extra = size - len(self.parent)
        if extra <= 0:
            return
        self.parent = np.concatenate([self.parent, np.full(extra, -1, dtype=np.int64)])
        self.edge_cost = np.concatenate([self.edge_cost, np.full(extra, INF)])
        self.g = np.concatenate([self.g, np.full(extra, INF)])
        self.children.extend(set() for _ in range(extra))

    def __contains__(self, v: int) -> bool:
        return v == self.root or self.parent[v] >= 0

    def __len__(self) -> int:
        return self.vertex_count

    def vertices(self) -> list[int]:
        return [v for v in range(len(self.parent)) if v in self]

    def is_ancestor(self, a: int, v: int) -> bool:
        """True if ``a`` lies on the parent chain of ``v`` (including ``v`` itself)."""
        while v >= 0:
            if v == a:
                return True
            v = int(self.parent[v])
        return False

    def path_to(self, v: int) -> list[int]:
        out = []
        while v >= 0:
            out.append(v)
            v = int(self.parent[v])
        return out[::-1]


def rewire(tree: SearchTree, parent: int, child: int, cost: float) -> set[int]:
    """Make ``parent`` the parent of ``child`` via an edge of the given cost.

    Inserts ``child`` if it is not yet a vertex. The new cost-to-come is
    pushed down the whole subtree of ``child``; every id whose ``g`` changed is
    returned.
    """
    if parent not in tree:
        raise ContractViolation(f"parent {parent} is not in the tree")
    if child == tree.root:
        raise ContractViolation("the root cannot be rewired")
    new_g = tree.g[parent] + cost
    if not new_g < tree.g[child]:
        raise ContractViolation(f"rewire {parent}->{child} does not improve g ({new_g} >= {tree.g[child]})")
    if tree.is_ancestor(child, parent):
        raise ContractViolation(f"rewire {parent}->{child} would create a cycle")
    old = int(tree.parent[child])
    if old < 0:
        tree.vertex_count += 1
    else:
        tree.children[old].discard(child)
    tree.parent[child] = parent
    tree.edge_cost[child] = cost
    tree.children[parent].add(child)
    tree.g[child] = new_g
    affected = {child}
    stack = deque(tree.children[child])
    while stack:
        v = stack.popleft()
        # recomputed from the parent rather than shifted by a delta, so g stays exactly consistent
        tree.g[v] = tree.g[tree.parent[v]] + tree.edge_cost[v]
        affected.add(v)
        stack.extend(tree.children[v])
    return affected


class InvalidEdgeCache:
    """Symmetric record of sample pairs whose connecting motion is in collision."""

    def __init__(self):
        self._partners: dict[int, set[int]] = {}

    def add(self, a: int, b: int) -> None:
        if a == b:
            raise ContractViolation("an edge needs two distinct endpoints")
        self._partners.setdefault(a, set()).add(b)
        self._partners.setdefault(b, set()).add(a)

    def __getitem__(self, a: int) -> set[int]:
        return self._partners.get(a, set())

    def contains(self, a: int, b: int) -> bool:
        return b in self._partners.get(a, ())

    def __len__(self) -> int:
        return sum(len(s) for s in self._partners.values()) // 2

    def is_symmetric(self) -> bool:
        return all(a in self._partners.get(b, ()) for a, s in self._partners.items() for b in s)


def mark_invalid(cache: InvalidEdgeCache, a: int, b: int) -> None:
    cache.add(a, b)


@dataclass
class LocalQueue:
    """Outgoing candidate edges of one vertex, sorted ascending by ``c_hat + h_hat``."""

    owner: int
    children: np.ndarray
    c_hat: np.ndarray
    keys: np.ndarray
    cursor: int = 0
    batch: int = 0

    def __len__(self) -> int:
        return len(self.children) - self.cursor

    @property
    def exhausted(self) -> bool:
        return self.cursor >= len(self.children)


def build_local_queue(
    owner: int,
    store: SampleStore,
    h_hat: np.ndarray,
    invalid: InvalidEdgeCache,
    radius: float | None = None,
    batch: int = 0,
) -> LocalQueue:
    """Queue every stored sample other than ``owner`` and its known-invalid partners.

    ``h_hat`` holds the cost-to-go estimate of every stored id. With
    ``radius`` set, only samples within that distance are queued (r-disc mode).
    """
    points = store.points
    c_hat = distances_from(points[owner], points)
    keep = np.ones(len(points), dtype=bool)
    keep[owner] = False
    bad = invalid[owner]
    if bad:
        keep[np.fromiter(bad, dtype=np.int64, count=len(bad))] = False
    if radius is not None:
        keep &= c_hat <= radius
    ids = np.flatnonzero(keep)
    keys = c_hat[ids] + h_hat[ids]
    # stable sort: equal keys are ordered by child id
    order = np.argsort(keys, kind="stable")
    ids = ids[order]
    return LocalQueue(owner, ids, c_hat[ids], keys[order], batch=batch)


def next_best_edge(
    owner: int,
    tree: SearchTree,
    local: LocalQueue,
    invalid: InvalidEdgeCache | None = None,
) -> tuple[int, int] | None:
    """Advance ``local`` to the next edge that could improve the tree.

    An entry qualifies when ``g(owner) + c_hat < g(child)``, or when it is the
    current tree edge ``owner -> child`` (so that its subtree can be
    re-expanded). Entries that are skipped or returned are consumed.
    """
    if local.owner != owner:
        raise ContractViolation("local queue belongs to a different vertex")
    g_owner = tree.g[owner]
    g = tree.g
    parent = tree.parent
    children = local.children
    n = len(children)
    chunk = 16
    while local.cursor < n:
        lo = local.cursor
        hi = min(n, lo + chunk)
        ids = children[lo:hi]
        # tree edges fail the strict test by equality, so they are matched explicitly
        hits = np.flatnonzero((g_owner + local.c_hat[lo:hi] < g[ids]) | (parent[ids] == owner))
        if len(hits):
            k = int(hits[0])
            local.cursor = lo + k + 1
            c = int(ids[k])
            if invalid is not None and invalid.contains(owner, c):
                continue
            return owner, c
        local.cursor = hi
        chunk = min(chunk * 2, 4096)
    return None


class OpenQueue:
    """Priority queue of ``(parent, child)`` edges with at most one entry per parent.

    Ordered by ``f_hat = g(parent) + c_hat(parent, child) + h_hat(child)``, ties
    broken by smaller ``h_hat(child)``, then parent id, then child id. Keys are
    stored; when a parent's ``g`` changes, :meth:`rekey` pushes a fresh entry and
    the old one is discarded lazily.
    """

    def __init__(self):
        self._heap: list[tuple[float, float, int, int, int]] = []
        self._entries: dict[int, tuple[int, float, float, int]] = {}
        self._version = 0

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, parent: int) -> bool:
        return parent in self._entries

    def entry(self, parent: int) -> tuple[int, float] | None:
        e = self._entries.get(parent)
        return None if e is None else (e[0], e[1])

    def push(self, parent: int, child: int, c_hat: float, h_child: float, g_parent: float) -> None:
        if parent in self._entries:
            raise ContractViolation(f"parent {parent} already has an open edge")
        self._put(parent, child, c_hat, h_child, g_parent)

    def _put(self, parent, child, c_hat, h_child, g_parent) -> None:
        self._version += 1
        key = g_parent + c_hat + h_child
        self._entries[parent] = (child, c_hat, h_child, self._version)
        heapq.heappush(self._heap, (key, h_child, parent, child, self._version))

    def rekey(self, parent: int, g_parent: float) -> None:
        e = self._entries.get(parent)
        if e is not None:
            child, c_hat, h_child, _ = e
            self._put(parent, child, c_hat, h_child, g_parent)

    def discard(self, parent: int) -> None:
        self._entries.pop(parent, None)

    def clear(self) -> None:
        self._heap.clear()
        self._entries.clear()

    def _live(self, item) -> bool:
        e = self._entries.get(item[2])
        return e is not None and e[3] == item[4]

    def peek_key(self, tree: SearchTree) -> float:
        self._settle(tree)
        return self._heap[0][0] if self._heap else INF

    def _settle(self, tree: SearchTree) -> None:
        heap = self._heap
        while heap:
            item = heap[0]
            if not self._live(item):
                heapq.heappop(heap)
                continue
            key, h_child, parent, child, _ = item
            fresh = tree.g[parent] + self._entries[parent][1] + h_child
            if fresh == key:
                return
            heapq.heappop(heap)
            self._put(parent, child, self._entries[parent][1], h_child, tree.g[parent])

    def pop(self, tree: SearchTree) -> tuple[int, int, float, float] | None:
        """Remove the minimum edge; returns ``(parent, child, f_hat, c_hat)``."""
        self._settle(tree)
        if not self._heap:
            return None
        key, _, parent, child, _ = heapq.heappop(self._heap)
        c_hat = self._entries.pop(parent)[1]
        return parent, child, key, c_hat


def open_pop_min(open_queue: OpenQueue, tree: SearchTree) -> tuple[int, int] | None:
    popped = open_queue.pop(tree)
    return None if popped is None else popped[:2]
