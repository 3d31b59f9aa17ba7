"""Significant (alpha, beta)-community search.

Four routes to the same answer: shrink the community from its lightest
edges (peel), grow a component of q from the heaviest edges with cheap
rejection bounds (expand), binary search over weight thresholds, and the
index-free baseline that expands over q's whole connected component.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from itertools import groupby
from typing import Iterable

from .bigraph import BipartiteGraph, Edge, VertexNames, format_weight
from .ccindex import CommunityIndex, query_community
from .decomp import Community


@dataclass(frozen=True)
class SignificantCommunity(Community):
    significance: float | None = None
    validations: int = field(default=0, compare=False)
    edges_touched: int = field(default=0, compare=False)


def _result(q, alpha, beta, edges, validations=0, touched=0) -> SignificantCommunity:
    edges = tuple(sorted(edges))
    f = min(e[2] for e in edges) if edges else None
    return SignificantCommunity(q, alpha, beta, edges, f, validations, touched)


class ComponentTracker:
    """Union-find over vertices with per-component counters.

    Each root keeps its edge count, upper/lower vertex counts, the number of
    upper vertices with degree >= alpha and lower vertices with degree >=
    beta, and the component's edge list.
    """

    def __init__(self, alpha: int, beta: int):
        self.alpha = alpha
        self.beta = beta
        self.parent: dict[int, int] = {}
        self.rank: dict[int, int] = {}
        self.deg: dict[int, int] = {}
        self.n_edges: dict[int, int] = {}
        self.n_upper: dict[int, int] = {}
        self.n_lower: dict[int, int] = {}
        self.qual_upper: dict[int, int] = {}
        self.qual_lower: dict[int, int] = {}
        self.edge_lists: dict[int, list[Edge]] = {}

    def __contains__(self, x: int) -> bool:
        return x in self.parent

    def _add_vertex(self, x: int) -> None:
        self.parent[x] = x
        self.rank[x] = 0
        self.deg[x] = 0
        self.n_edges[x] = 0
        self.n_upper[x] = 0 if x & 1 else 1
        self.n_lower[x] = 1 if x & 1 else 0
        self.qual_upper[x] = 0
        self.qual_lower[x] = 0
        self.edge_lists[x] = []

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: int, b: int) -> int:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        elif self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        self.parent[rb] = ra
        for counter in (self.n_edges, self.n_upper, self.n_lower, self.qual_upper,
                        self.qual_lower):
            counter[ra] += counter.pop(rb)
        small, big = self.edge_lists.pop(rb), self.edge_lists[ra]
        if len(small) > len(big):
            small, big = big, small
            self.edge_lists[ra] = big
        big.extend(small)
        return ra

    def add_edge(self, u: int, v: int, w: float) -> int:
        for x in (u, v):
            if x not in self.parent:
                self._add_vertex(x)
        r = self.union(u, v)
        self.n_edges[r] += 1
        self.edge_lists[r].append((u, v, w))
        self.deg[u] += 1
        self.deg[v] += 1
        if self.deg[u] == self.alpha:
            self.qual_upper[r] += 1
        if self.deg[v] == self.beta:
            self.qual_lower[r] += 1
        return r

    def size(self, x: int) -> int:
        return self.n_edges[self.find(x)] if x in self.parent else 0

    def component_edges(self, x: int) -> list[Edge]:
        return list(self.edge_lists[self.find(x)])

    @classmethod
    def from_edges(cls, edges: Iterable[Edge], alpha: int, beta: int) -> "ComponentTracker":
        tracker = cls(alpha, beta)
        for u, v, w in edges:
            tracker.add_edge(u, v, w)
        return tracker


def bounds_check(tracker: ComponentTracker, q: int, alpha: int, beta: int) -> bool:
    """Necessary conditions for q's component to contain the significant community.

    (i) alpha*beta - alpha - beta <= |E| - |U| - |L|; (ii) at least alpha
    lower vertices of degree >= beta and at least beta upper vertices of
    degree >= alpha; (iii) q meets its own degree bound.
    """
    if q not in tracker:
        return False
    r = tracker.find(q)
    if alpha * beta - alpha - beta > tracker.n_edges[r] - tracker.n_upper[r] - tracker.n_lower[r]:
        return False
    if tracker.qual_lower[r] < alpha or tracker.qual_upper[r] < beta:
        return False
    return tracker.deg[q] >= (beta if q & 1 else alpha)


# ---------------------------------------------------------------------------
# peeling helpers on explicit edge sets


def _adjacency(edges: Iterable[Edge]) -> dict[int, dict[int, float]]:
    adj: dict[int, dict[int, float]] = {}
    for u, v, w in edges:
        adj.setdefault(u, {})[v] = w
        adj.setdefault(v, {})[u] = w
    return adj


def prune_component(edges: Iterable[Edge], q: int, alpha: int, beta: int) -> tuple[list[Edge], int]:
    """Peel deficient vertices, then return q's component (empty if q is peeled).

    Also returns the number of adjacency entries scanned.
    """
    adj = _adjacency(edges)
    work = 0
    if q not in adj:
        return [], work
    queue = deque(x for x, nbrs in adj.items() if len(nbrs) < (beta if x & 1 else alpha))
    dead = set(queue)
    while queue:
        x = queue.popleft()
        for y in adj.pop(x):
            work += 1
            nbrs = adj.get(y)
            if nbrs is None:
                continue
            del nbrs[x]
            if y not in dead and len(nbrs) < (beta if y & 1 else alpha):
                dead.add(y)
                queue.append(y)
    if q in dead:
        return [], work
    seen = {q}
    stack = [q]
    out = []
    while stack:
        x = stack.pop()
        for y, w in adj[x].items():
            work += 1
            if x & 1:
                out.append((y, x, w))
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return out, work


def _peel_to_significant(edges: list[Edge], q: int, alpha: int, beta: int) -> tuple[list[Edge], int]:
    """Remove whole minimum-weight classes with cascades until q falls out.

    ``edges`` must be degree-qualified and contain q.  The answer is q's
    component of the graph as it stood when the fatal class started.
    """
    adj = _adjacency(edges)
    work = len(edges)
    dead: set[int] = set()
    ordered = sorted(edges, key=lambda e: e[2])
    for _, group in groupby(ordered, key=lambda e: e[2]):
        removed: list[Edge] = []
        queue: deque[int] = deque()
        q_dead = False

        def drop(x: int, y: int) -> None:
            w = adj[x].pop(y)
            del adj[y][x]
            removed.append((x, y, w))

        def check(x: int) -> bool:
            if x not in dead and len(adj[x]) < (beta if x & 1 else alpha):
                dead.add(x)
                queue.append(x)
                return x == q
            return False

        for u, v, _w in group:
            if v not in adj[u]:
                continue
            drop(u, v)
            work += 1
            q_dead |= check(u)
            q_dead |= check(v)
        while queue and not q_dead:
            x = queue.popleft()
            for y in list(adj[x]):
                drop(x, y)
                work += 1
                q_dead |= check(y)
        if q_dead:
            rest = [(x, y, w) for x, nbrs in adj.items() if not x & 1 for y, w in nbrs.items()]
            snapshot = rest + [(x, y, w) if not x & 1 else (y, x, w) for x, y, w in removed]
            out, extra = prune_component(snapshot, q, alpha, beta)
            return out, work + extra
    raise AssertionError("peeling exhausted the graph without removing the query vertex")


def _uniform_weight(edges: list[Edge]) -> bool:
    return len({e[2] for e in edges}) <= 1


def _empty(q, alpha, beta, touched=0) -> SignificantCommunity:
    return SignificantCommunity(q, alpha, beta, (), None, 0, touched)


# ---------------------------------------------------------------------------
# public searches


def peel_significant(index: CommunityIndex, q, alpha: int, beta: int) -> SignificantCommunity:
    community, reads = query_community(index, q, alpha, beta)
    q = community.anchor
    if not community:
        return _empty(q, alpha, beta, reads)
    edges = list(community.edges)
    if _uniform_weight(edges):
        return _result(q, alpha, beta, edges, 0, reads + len(edges))
    out, work = _peel_to_significant(edges, q, alpha, beta)
    return _result(q, alpha, beta, out, 1, reads + work)


def _validate(snapshot: list[Edge], q: int, alpha: int, beta: int):
    """Prune a copy of the snapshot; if q survives, peel it to the answer."""
    pruned, work = prune_component(snapshot, q, alpha, beta)
    work += len(snapshot)
    if not pruned:
        return None, work
    if _uniform_weight(pruned):
        return pruned, work
    out, extra = _peel_to_significant(pruned, q, alpha, beta)
    return out, work + extra


def _expand(edges: list[Edge], q: int, alpha: int, beta: int, epsilon: float,
            touched: int) -> SignificantCommunity:
    tracker = ComponentTracker(alpha, beta)
    ordered = sorted(edges, key=lambda e: -e[2])
    pre_size = 0
    last_size = 0
    validated_size = None
    validations = 0
    for _, group in groupby(ordered, key=lambda e: e[2]):
        for u, v, w in group:
            tracker.add_edge(u, v, w)
            touched += 1
        size = tracker.size(q)
        if size == last_size:
            continue
        last_size = size
        if not bounds_check(tracker, q, alpha, beta):
            continue
        if size < pre_size * epsilon:
            continue
        pre_size = size
        validations += 1
        validated_size = size
        out, work = _validate(tracker.component_edges(q), q, alpha, beta)
        touched += work
        if out:
            return _result(q, alpha, beta, out, validations, touched)
    if q in tracker and validated_size != tracker.size(q):
        validations += 1
        out, work = _validate(tracker.component_edges(q), q, alpha, beta)
        touched += work
        if out:
            return _result(q, alpha, beta, out, validations, touched)
    return SignificantCommunity(q, alpha, beta, (), None, validations, touched)


def expand_significant(index: CommunityIndex, q, alpha: int, beta: int,
                       epsilon: float = 2.0) -> SignificantCommunity:
    if not epsilon > 1:
        raise ValueError("epsilon must be > 1")
    community, reads = query_community(index, q, alpha, beta)
    q = community.anchor
    if not community:
        return _empty(q, alpha, beta, reads)
    edges = list(community.edges)
    if _uniform_weight(edges):
        return _result(q, alpha, beta, edges, 0, reads + len(edges))
    return _expand(edges, q, alpha, beta, epsilon, reads)


def binary_significant(index: CommunityIndex, q, alpha: int, beta: int) -> SignificantCommunity:
    """Largest weight threshold whose pruned subgraph still holds q."""
    community, reads = query_community(index, q, alpha, beta)
    q = community.anchor
    if not community:
        return _empty(q, alpha, beta, reads)
    edges = list(community.edges)
    weights = sorted({e[2] for e in edges})
    touched = reads
    probes = 0
    cache: dict[int, list[Edge]] = {}

    def probe(i: int) -> bool:
        nonlocal touched, probes
        probes += 1
        kept = [e for e in edges if e[2] >= weights[i]]
        out, work = prune_component(kept, q, alpha, beta)
        touched += len(edges) + work
        if out:
            cache[i] = out
        return bool(out)

    lo, hi = 0, len(weights) - 1
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if probe(mid):
            lo = mid
        else:
            hi = mid - 1
    if lo not in cache:
        probe(lo)
    return _result(q, alpha, beta, cache[lo], probes, touched)


def baseline_significant(graph: BipartiteGraph, q, alpha: int, beta: int,
                         epsilon: float = 2.0) -> SignificantCommunity:
    """Expand over q's connected component of the whole graph, no index."""
    q = graph.vid(q)
    if alpha < 1 or beta < 1:
        raise ValueError("alpha and beta must be >= 1")
    if graph.degree(q) < (beta if q & 1 else alpha):
        return _empty(q, alpha, beta)
    ip, nb, wt = graph.adj
    seen = {q}
    queue = deque([q])
    edges = []
    touched = 0
    while queue:
        x = queue.popleft()
        for k in range(ip[x], ip[x + 1]):
            touched += 1
            y = nb[k]
            if x & 1:
                edges.append((y, x, wt[k]))
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return _expand(edges, q, alpha, beta, epsilon, touched)


def validation_bound(community_size: int) -> int:
    """Upper bound on expand validations with epsilon = 2."""
    return math.ceil(math.log2(community_size)) + 2 if community_size > 0 else 0


EMPTY_MARKER = "# no community"


def format_community(community: Community, names: VertexNames) -> str:
    """Header ``q=.. alpha=.. beta=.. f=..`` then one ``u v w`` line per edge."""
    f = getattr(community, "significance", None)
    if f is None and community:
        f = min(e[2] for e in community.edges)
    head = (f"q={names.name(community.anchor)} alpha={community.alpha} "
            f"beta={community.beta} f={'none' if f is None else format_weight(f)}")
    lines = [head]
    if not community:
        lines.append(EMPTY_MARKER)
    for u, v, w in sorted(community.edges):
        lines.append(f"{names.name(u)} {names.name(v)} {format_weight(w)}")
    return "\n".join(lines) + "\n"
