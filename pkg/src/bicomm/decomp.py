"""Index-free core computations: (alpha, beta)-core peeling, offsets, degeneracy
and the online community query."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import NamedTuple

from .bigraph import BipartiteGraph, Edge


@dataclass(frozen=True)
class Community:
    """Edge set of a community around ``anchor``; empty when ``anchor`` fails the core."""

    anchor: int
    alpha: int
    beta: int
    edges: tuple[Edge, ...] = ()

    @classmethod
    def of(cls, anchor: int, alpha: int, beta: int, edges) -> "Community":
        return cls(anchor, alpha, beta, tuple(sorted(edges)))

    @property
    def empty(self) -> bool:
        return not self.edges

    def __bool__(self) -> bool:
        return bool(self.edges)

    def __len__(self) -> int:
        return len(self.edges)

    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset((u, v) for u, v, _ in self.edges)

    def vertices(self) -> set[int]:
        out = set()
        for u, v, _ in self.edges:
            out.add(u)
            out.add(v)
        return out


class Core(NamedTuple):
    alive: list[bool]
    edges: list[Edge]


@dataclass(frozen=True)
class OffsetTable:
    """s_a(x, level) for kind 'alpha' or s_b(x, level) for kind 'beta', by vertex id."""

    kind: str
    level: int
    values: tuple[int, ...]

    def __getitem__(self, x: int) -> int:
        return self.values[x]


def core_mask(graph: BipartiteGraph, alpha: int, beta: int) -> list[bool]:
    ip, nb, _ = graph.adj
    deg = [ip[x + 1] - ip[x] for x in range(graph.id_space)]
    alive = [False] * graph.id_space
    queue = deque()
    for x in graph.vertices():
        if deg[x] < (beta if x & 1 else alpha):
            queue.append(x)
        else:
            alive[x] = True
    while queue:
        x = queue.popleft()
        for k in range(ip[x], ip[x + 1]):
            y = nb[k]
            if alive[y]:
                deg[y] -= 1
                if deg[y] < (beta if y & 1 else alpha):
                    alive[y] = False
                    queue.append(y)
    return alive


def compute_abcore(graph: BipartiteGraph, alpha: int, beta: int) -> Core:
    """Maximal subgraph with upper degrees >= alpha and lower degrees >= beta."""
    if alpha < 1 or beta < 1:
        raise ValueError("alpha and beta must be >= 1")
    alive = core_mask(graph, alpha, beta)
    edges = [e for e in graph.edges() if alive[e[0]] and alive[e[1]]]
    return Core(alive, edges)


def _offsets(graph: BipartiteGraph, level: int, fixed_parity: int) -> list[int]:
    """Offsets for one level with the constraint ``level`` fixed on one layer.

    Vertices on the fixed layer need ``level`` live neighbors; the other layer's
    requirement k is raised one step at a time with bucketed degrees.  Each
    vertex records the largest k it survived.
    """
    ip, nb, _ = graph.adj
    size = graph.id_space
    deg = [ip[x + 1] - ip[x] for x in range(size)]
    val = [0] * size
    alive = [False] * size
    for x in range(fixed_parity, size, 2):
        if deg[x] >= level:
            alive[x] = True
    cnt = [0] * size
    free = []
    for y in range(1 - fixed_parity, size, 2):
        c = 0
        for k in range(ip[y], ip[y + 1]):
            if alive[nb[k]]:
                c += 1
        if c:
            cnt[y] = c
            alive[y] = True
            free.append(y)
    if not free:
        return val
    maxc = max(cnt[y] for y in free)
    buckets: list[list[int]] = [[] for _ in range(maxc + 1)]
    key = cnt[:]
    for y in free:
        buckets[cnt[y]].append(y)
    remaining = len(free)
    b = 1
    while remaining:
        while not buckets[b]:
            b += 1
        y = buckets[b].pop()
        if not alive[y] or key[y] != b:
            continue
        alive[y] = False
        val[y] = b
        remaining -= 1
        for k in range(ip[y], ip[y + 1]):
            x = nb[k]
            if not alive[x]:
                continue
            deg[x] -= 1
            if deg[x] >= level:
                continue
            alive[x] = False
            val[x] = b
            for k2 in range(ip[x], ip[x + 1]):
                z = nb[k2]
                if alive[z]:
                    cnt[z] -= 1
                    nk = cnt[z] if cnt[z] > b else b
                    if nk != key[z]:
                        key[z] = nk
                        buckets[nk].append(z)
    return val


def compute_alpha_offsets(graph: BipartiteGraph, alpha: int) -> OffsetTable:
    """s_a(x, alpha): the largest beta with x in the (alpha, beta)-core, else 0."""
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    return OffsetTable("alpha", alpha, tuple(_offsets(graph, alpha, 0)))


def compute_beta_offsets(graph: BipartiteGraph, beta: int) -> OffsetTable:
    """s_b(x, beta): the largest alpha with x in the (alpha, beta)-core, else 0."""
    if beta < 1:
        raise ValueError("beta must be >= 1")
    return OffsetTable("beta", beta, tuple(_offsets(graph, beta, 1)))


def core_numbers(graph: BipartiteGraph) -> list[int]:
    """Layer-agnostic k-core numbers (bucket peeling), indexed by vertex id."""
    ip, nb, _ = graph.adj
    size = graph.id_space
    deg = [ip[x + 1] - ip[x] for x in range(size)]
    core = [0] * size
    if graph.m == 0:
        return core
    buckets: list[list[int]] = [[] for _ in range(max(deg) + 1)]
    remaining = 0
    for x in graph.vertices():
        buckets[deg[x]].append(x)
        remaining += 1
    key = deg[:]
    done = [False] * size
    b = 0
    while remaining:
        while not buckets[b]:
            b += 1
        x = buckets[b].pop()
        if done[x] or key[x] != b:
            continue
        done[x] = True
        core[x] = b
        remaining -= 1
        for i in range(ip[x], ip[x + 1]):
            y = nb[i]
            if not done[y]:
                deg[y] -= 1
                nk = deg[y] if deg[y] > b else b
                if nk != key[y]:
                    key[y] = nk
                    buckets[nk].append(y)
    return core


def compute_degeneracy(graph: BipartiteGraph) -> tuple[int, list[Edge]]:
    """Degeneracy delta and the edges of the (delta, delta)-core."""
    core = core_numbers(graph)
    delta = max(core, default=0)
    if delta == 0:
        return 0, []
    return delta, compute_abcore(graph, delta, delta).edges


def component_edges(adj: dict[int, dict[int, float]], q: int) -> list[Edge]:
    """Edges of the connected component of q in a dict-of-dicts adjacency."""
    if q not in adj:
        return []
    seen = {q}
    queue = deque([q])
    out = []
    while queue:
        x = queue.popleft()
        for y, w in adj[x].items():
            if x & 1:
                out.append((y, x, w))
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return out


def community_online(graph: BipartiteGraph, q, alpha: int, beta: int) -> Community:
    """Peel the whole graph to the (alpha, beta)-core, then BFS from q."""
    q = graph.vid(q)
    if alpha < 1 or beta < 1:
        raise ValueError("alpha and beta must be >= 1")
    alive = core_mask(graph, alpha, beta)
    if not alive[q]:
        return Community(q, alpha, beta)
    ip, nb, wt = graph.adj
    seen = {q}
    queue = deque([q])
    edges = []
    while queue:
        x = queue.popleft()
        for k in range(ip[x], ip[x + 1]):
            y = nb[k]
            if not alive[y]:
                continue
            if x & 1:
                edges.append((y, x, wt[k]))
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return Community.of(q, alpha, beta, edges)
