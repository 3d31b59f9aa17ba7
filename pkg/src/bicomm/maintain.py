"""Single-edge insertion and removal for the degeneracy-bounded index.

Every level t is handled on both sides: the alpha side (upper vertices need
t neighbors, offsets are the lower-side requirement) and the mirrored beta
side.  Only vertices whose stored offset (>= t) may change are revisited:

* Insertion.  Apart from the upper (alpha side) or lower (beta side)
  endpoint, offsets rise by at most one, and a vertex that gains must reach
  the new edge through vertices that gain too.  The affected set is
  therefore the endpoints plus everything reachable from them through
  vertices whose old offset is at least t - 1.
* Removal.  A vertex that drops had its old offset >= t and reached the
  removed edge inside that core, so both endpoints must have stored offsets
  at level t and the affected set is their reach through stored vertices.

Inside the affected set offsets are recomputed by peeling with the outside
held fixed at its old stored values; outside vertices keep theirs.  All
levels are planned against the old index before any of them is rewritten,
because the insertion reach at level t reads level t - 1 of the other side.

The graph itself is immutable, so each update returns a fresh copy.  The
index is updated in place and returned for convenience; take a deep copy
first if a pre-update snapshot must stay readable.
"""

from __future__ import annotations

from bisect import bisect_left, insort
from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, Union

from .bigraph import BipartiteGraph, DuplicateEdgeError, Layer, VertexRef, layer_of_token
from .ccindex import DEGENERACY, CommunityIndex, LeveledAdjacency, build_delta_level, entry_key
from .sigsearch import prune_component

Vertex = Union[str, int, VertexRef]


@dataclass(frozen=True)
class UpdateScope:
    level: int
    side: str  # "alpha" or "beta"
    affected: frozenset[int]
    offsets: dict[int, int]  # new offset per affected vertex, 0 when below the level


def _reach(graph: BipartiteGraph, seeds, passable: Callable[[int], bool]) -> set[int]:
    ip, nb, _ = graph.adj
    seen = set(seeds)
    stack = list(seeds)
    while stack:
        x = stack.pop()
        for k in range(ip[x], ip[x + 1]):
            y = nb[k]
            if y not in seen and passable(y):
                seen.add(y)
                stack.append(y)
    return seen


def _local_offsets(graph: BipartiteGraph, region: set[int], fixed_parity: int, t: int,
                   outside: dict[int, int]) -> dict[int, int]:
    """Offsets at level t for ``region`` with every other vertex frozen.

    ``outside`` maps vertices to stored offsets (absent means below t).  The
    free-side requirement b starts at t and climbs; an outside neighbor
    supports a region vertex while its stored offset is >= b.
    """
    ip, nb, _ = graph.adj
    cnt = {}
    expiry: dict[int, list[int]] = defaultdict(list)
    for x in region:
        c = 0
        for k in range(ip[x], ip[x + 1]):
            y = nb[k]
            if y in region:
                c += 1
            else:
                off = outside.get(y, 0)
                if off >= t:
                    c += 1
                    expiry[off + 1].append(x)
        cnt[x] = c
    val = dict.fromkeys(region, 0)
    alive = set(region)
    b = t
    while alive:
        for x in expiry.pop(b, ()):
            if x in alive:
                cnt[x] -= 1

        def short(x: int) -> bool:
            return cnt[x] < (t if (x & 1) == fixed_parity else b)

        stack = [x for x in alive if short(x)]
        while stack:
            x = stack.pop()
            if x not in alive:
                continue
            alive.discard(x)
            val[x] = b - 1 if b > t else 0
            for k in range(ip[x], ip[x + 1]):
                y = nb[k]
                if y in alive:
                    cnt[y] -= 1
                    if short(y):
                        stack.append(y)
        b += 1
    return val


def _remove_entry(lst: list, nbr: int, off: int) -> None:
    i = bisect_left(lst, (-off, nbr), key=entry_key)
    if i == len(lst) or lst[i][0] != nbr:
        raise AssertionError(f"index list is missing neighbor {nbr} at offset {off}")
    del lst[i]


def _apply_level(part: LeveledAdjacency, t: int, graph: BipartiteGraph, new_vals: dict[int, int],
                 edge: tuple, inserted: bool) -> None:
    own, lists = part.own[t], part.lists[t]
    own_min, nbr_min = part.own_min(t), part.nbr_min(t)
    u, v, w = edge
    if not inserted:
        for x, y in ((u, v), (v, u)):
            if x in lists and own.get(y, 0) >= nbr_min:
                _remove_entry(lists[x], y, own[y])
    old = {x: own.get(x, 0) for x in new_vals}

    def value(y: int) -> int:
        return new_vals[y] if y in new_vals else own.get(y, 0)

    entering = set()
    for x, nv in new_vals.items():
        if nv >= own_min:
            own[x] = nv
            if old[x] < own_min:
                entering.add(x)
        elif old[x] >= own_min:
            del own[x]
            del lists[x]

    ip, nb, wt = graph.adj
    for x, nv in new_vals.items():
        before = old[x] if old[x] >= nbr_min else 0
        after = nv if nv >= nbr_min else 0
        if before == after:
            continue
        for k in range(ip[x], ip[x + 1]):
            y = nb[k]
            if y in entering or y not in lists:
                continue
            if inserted and (y == u or y == v) and (x == u or x == v):
                continue
            lst = lists[y]
            if before:
                _remove_entry(lst, x, before)
            if after:
                insort(lst, (x, wt[k], after), key=entry_key)

    for x in entering:
        lst = []
        for k in range(ip[x], ip[x + 1]):
            off = value(nb[k])
            if off >= nbr_min:
                lst.append((nb[k], wt[k], off))
        lst.sort(key=entry_key)
        lists[x] = lst
    if inserted:
        for x, y in ((u, v), (v, u)):
            if x in lists and x not in entering and value(y) >= nbr_min:
                insort(lists[x], (y, w, value(y)), key=entry_key)


def _plan(index: CommunityIndex, graph: BipartiteGraph, u: int, v: int, inserted: bool):
    part_a, part_b = index.parts
    plans = []
    for t in range(1, index.bound + 1):
        for side, part, other, parity in (("alpha", part_a, part_b, 0), ("beta", part_b, part_a, 1)):
            own = part.own[t]
            if inserted:
                below = other.own.get(t - 1, {})

                def passable(y, own=own, below=below, t=t):
                    return t == 1 or y in own or below.get(y, 0) >= t

                region = _reach(graph, (u, v), passable)
            elif u in own and v in own:
                region = _reach(graph, (u, v), own.__contains__)
            else:
                region = set()
            new_vals = _local_offsets(graph, region, parity, t, own) if region else {}
            plans.append((part, t, new_vals, UpdateScope(t, side, frozenset(region), new_vals)))
    return plans


def _top_level_scopes(index: CommunityIndex, t: int) -> list[UpdateScope]:
    return [UpdateScope(t, side, frozenset(part.own[t]), dict(part.own[t]))
            for side, part in zip(("alpha", "beta"), index.parts)]


def _grows(index: CommunityIndex, u: int) -> bool:
    """Whether the new edge at u lifts the degeneracy by one."""
    d = index.bound
    if d == 0:
        return True
    part = index.parts[0]
    lists = part.lists[d]
    if u not in lists:
        return False
    seen = {u}
    stack = [u]
    edges = []
    while stack:
        x = stack.pop()
        for y, w, _ in lists[x]:
            if x & 1:
                edges.append((y, x, w))
            if y not in seen:
                seen.add(y)
                stack.append(y)
    survivors, _ = prune_component(edges, u, d + 1, d + 1)
    return bool(survivors)


def _sync(index: CommunityIndex, graph: BipartiteGraph) -> None:
    index.upper_names = graph.upper_names
    index.lower_names = graph.lower_names
    index.fingerprint = graph.fingerprint
    index.__dict__.pop("_name_index", None)


def _require_degeneracy(index: CommunityIndex, graph: BipartiteGraph) -> None:
    if index.variant != DEGENERACY:
        raise ValueError("only the degeneracy index supports incremental updates; rebuild others")
    index.check_graph(graph)


def _endpoint_name(graph: BipartiteGraph, x: Vertex, layer: Layer) -> str:
    if isinstance(x, str):
        if layer_of_token(x) is not layer:
            raise ValueError(f"{x!r} is not a {layer.name.lower()} vertex token")
        return x
    gid = graph.vid(x)
    if (Layer.LOWER if gid & 1 else Layer.UPPER) is not layer:
        raise ValueError(f"vertex {gid} is not on the {layer.name.lower()} layer")
    return graph.name(gid)


def insert_edge(index: CommunityIndex, graph: BipartiteGraph, u: Vertex, v: Vertex,
                weight: float = 1.0) -> tuple[CommunityIndex, BipartiteGraph, list[UpdateScope]]:
    """Add edge (u, v); unknown vertex tokens become new vertices."""
    _require_degeneracy(index, graph)
    u_name = _endpoint_name(graph, u, Layer.UPPER)
    v_name = _endpoint_name(graph, v, Layer.LOWER)
    if u_name in graph._name_index and v_name in graph._name_index:
        if graph.has_edge(graph.vid(u_name), graph.vid(v_name)):
            raise DuplicateEdgeError(f"edge {u_name} {v_name} already present")
    new_graph = graph.with_edge(u_name, v_name, float(weight))
    u, v = new_graph.vid(u_name), new_graph.vid(v_name)
    edge = (u, v, new_graph.weight(u, v))

    plans = _plan(index, new_graph, u, v, inserted=True)
    for part, t, new_vals, _ in plans:
        _apply_level(part, t, new_graph, new_vals, edge, inserted=True)
    scopes = [p[3] for p in plans]
    if _grows(index, u):
        index.bound += 1
        build_delta_level(new_graph, index.bound, *index.parts)
        scopes.extend(_top_level_scopes(index, index.bound))
    _sync(index, new_graph)
    return index, new_graph, scopes


def delete_edge(index: CommunityIndex, graph: BipartiteGraph, u: Vertex,
                v: Vertex) -> tuple[CommunityIndex, BipartiteGraph, list[UpdateScope]]:
    """Remove edge (u, v); endpoints left without edges drop out of every level."""
    _require_degeneracy(index, graph)
    u, v = graph.vid(u), graph.vid(v)
    if u & 1:
        u, v = v, u
    new_graph = graph.without_edge(u, v)
    edge = (u, v, graph.weight(u, v))

    plans = _plan(index, new_graph, u, v, inserted=False)
    for part, t, new_vals, _ in plans:
        _apply_level(part, t, new_graph, new_vals, edge, inserted=False)
    d = index.bound
    if d and not index.parts[0].own[d]:
        for part in index.parts:
            del part.own[d]
            del part.lists[d]
        index.bound -= 1
    _sync(index, new_graph)
    return index, new_graph, [p[3] for p in plans]
