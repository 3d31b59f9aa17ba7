"""Leveled community indexes (basic-A, basic-B, degeneracy-bounded), their
binary file format, and the output-linear community query."""

from __future__ import annotations

import hashlib
import io
import struct
from dataclasses import dataclass, field
from typing import BinaryIO, NamedTuple, Union

from .bigraph import BipartiteGraph, VertexNames
from .decomp import Community, compute_alpha_offsets, compute_beta_offsets, core_numbers

Entry = tuple  # (neighbor id, weight, neighbor offset)

BASIC_A = "basic-a"
BASIC_B = "basic-b"
DEGENERACY = "degeneracy"
VARIANTS = (BASIC_A, BASIC_B, DEGENERACY)

MAGIC = b"BCSI"
FORMAT_VERSION = 1
_RECORD = struct.Struct("<IIdI")


class IndexFormatError(ValueError):
    pass


class BadMagicError(IndexFormatError):
    pass


class VersionMismatchError(IndexFormatError):
    pass


class TruncatedIndexError(IndexFormatError):
    pass


class ChecksumError(IndexFormatError):
    pass


class StaleIndexError(RuntimeError):
    """The index was built for a different graph."""


def entry_key(entry: Entry) -> tuple[int, int]:
    return (-entry[2], entry[0])


@dataclass
class LeveledAdjacency:
    """Offset-sorted neighbor lists per level.

    ``lists[t][x]`` holds (neighbor, weight, offset) sorted by offset
    descending (ties by neighbor id); ``own[t][x]`` is x's own offset at
    level t and is present exactly for the vertices that have a list.
    """

    kind: str  # basic_a | basic_b | delta_a | delta_b
    lists: dict[int, dict[int, list[Entry]]] = field(default_factory=dict)
    own: dict[int, dict[int, int]] = field(default_factory=dict)

    @property
    def levels(self) -> list[int]:
        return sorted(self.own)

    def entry_count(self) -> int:
        return sum(len(lst) for level in self.lists.values() for lst in level.values())

    def stored_edges(self) -> int:
        """Distinct undirected edges per level (an edge kept in both endpoint lists counts once)."""
        total = 0
        for level in self.lists.values():
            total += len({(min(x, e[0]), max(x, e[0])) for x, lst in level.items() for e in lst})
        return total

    def own_min(self, t: int) -> int:
        return 1 if self.kind.startswith("basic") else t

    def nbr_min(self, t: int) -> int:
        if self.kind.startswith("basic"):
            return 1
        return t if self.kind == "delta_a" else t + 1


def _fill_level(part: LeveledAdjacency, graph: BipartiteGraph, t: int, off: list[int]) -> None:
    ip, nb, wt = graph.adj
    own_min, nbr_min = part.own_min(t), part.nbr_min(t)
    own = {}
    lists = {}
    for x in graph.vertices():
        if off[x] < own_min:
            continue
        own[x] = off[x]
        lst = [(nb[k], wt[k], off[nb[k]]) for k in range(ip[x], ip[x + 1]) if off[nb[k]] >= nbr_min]
        lst.sort(key=entry_key)
        lists[x] = lst
    part.own[t] = own
    part.lists[t] = lists


@dataclass
class CommunityIndex(VertexNames):
    variant: str
    bound: int  # alpha_max, beta_max or delta
    parts: tuple[LeveledAdjacency, ...]
    upper_names: tuple[str, ...]
    lower_names: tuple[str, ...]
    fingerprint: tuple[int, int, int, int]

    @property
    def delta(self) -> int:
        if self.variant != DEGENERACY:
            raise AttributeError("only the degeneracy index has delta")
        return self.bound

    @property
    def levels(self) -> list[int]:
        return self.parts[0].levels

    def entry_count(self) -> int:
        return sum(p.entry_count() for p in self.parts)

    def stored_edges(self) -> int:
        return sum(p.stored_edges() for p in self.parts)

    def check_graph(self, graph: BipartiteGraph) -> None:
        if graph.fingerprint != self.fingerprint:
            raise StaleIndexError("index fingerprint does not match the graph")


def _new_index(graph: BipartiteGraph, variant: str, bound: int, parts) -> CommunityIndex:
    return CommunityIndex(variant, bound, tuple(parts), graph.upper_names, graph.lower_names,
                          graph.fingerprint)


def build_basic_a(graph: BipartiteGraph) -> CommunityIndex:
    alpha_max = max((graph.degree(x) for x in range(0, graph.id_space, 2)), default=0)
    part = LeveledAdjacency("basic_a")
    for a in range(1, alpha_max + 1):
        _fill_level(part, graph, a, list(compute_alpha_offsets(graph, a).values))
    return _new_index(graph, BASIC_A, alpha_max, [part])


def build_basic_b(graph: BipartiteGraph) -> CommunityIndex:
    beta_max = max((graph.degree(x) for x in range(1, graph.id_space, 2)), default=0)
    part = LeveledAdjacency("basic_b")
    for b in range(1, beta_max + 1):
        _fill_level(part, graph, b, list(compute_beta_offsets(graph, b).values))
    return _new_index(graph, BASIC_B, beta_max, [part])


def build_delta_level(graph: BipartiteGraph, t: int, part_a: LeveledAdjacency,
                      part_b: LeveledAdjacency) -> None:
    _fill_level(part_a, graph, t, list(compute_alpha_offsets(graph, t).values))
    _fill_level(part_b, graph, t, list(compute_beta_offsets(graph, t).values))


def build_degeneracy(graph: BipartiteGraph) -> CommunityIndex:
    delta = max(core_numbers(graph), default=0)
    part_a = LeveledAdjacency("delta_a")
    part_b = LeveledAdjacency("delta_b")
    for t in range(1, delta + 1):
        build_delta_level(graph, t, part_a, part_b)
    return _new_index(graph, DEGENERACY, delta, [part_a, part_b])


def build_index(graph: BipartiteGraph, variant: str) -> CommunityIndex:
    builders = {BASIC_A: build_basic_a, BASIC_B: build_basic_b, DEGENERACY: build_degeneracy}
    try:
        return builders[variant](graph)
    except KeyError:
        raise ValueError(f"unknown index type {variant!r}; expected one of {VARIANTS}") from None


# ---------------------------------------------------------------------------
# query


class QueryResult(NamedTuple):
    community: Community
    reads: int  # list entries inspected, including the failing probe per vertex


def route(index: CommunityIndex, alpha: int, beta: int):
    """(part, level, threshold) serving an (alpha, beta) query, or None if no level applies."""
    if index.variant == BASIC_A:
        part, level, thr = index.parts[0], alpha, beta
    elif index.variant == BASIC_B:
        part, level, thr = index.parts[0], beta, alpha
    elif alpha <= beta:
        part, level, thr = index.parts[0], alpha, beta
    else:
        part, level, thr = index.parts[1], beta, alpha
    if level not in part.own:
        return None
    return part, level, thr


def query_community(index: CommunityIndex, q, alpha: int, beta: int,
                    graph: BipartiteGraph | None = None) -> QueryResult:
    """BFS over the level lists serving (alpha, beta), starting at q."""
    if alpha < 1 or beta < 1:
        raise ValueError("alpha and beta must be >= 1")
    if graph is not None:
        index.check_graph(graph)
    q = index.vid(q)
    routed = route(index, alpha, beta)
    if routed is None:
        return QueryResult(Community(q, alpha, beta), 0)
    part, level, thr = routed
    own = part.own[level]
    if own.get(q, 0) < thr:
        return QueryResult(Community(q, alpha, beta), 0)
    lists = part.lists[level]
    seen = {q}
    queue = [q]
    edges = []
    reads = 0
    i = 0
    while i < len(queue):
        x = queue[i]
        i += 1
        lower = x & 1
        for y, w, off in lists[x]:
            reads += 1
            if off < thr:
                break
            if lower:
                edges.append((y, x, w))
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return QueryResult(Community.of(q, alpha, beta, edges), reads)


# ---------------------------------------------------------------------------
# serialization
#
# header: magic, version u32, variant u8, bound u32, n_upper u32, n_lower u32,
#         m u64, content hash u64
# per part, per level 1..bound: level u32, own count u32, own (vertex u32,
#         offset u32) pairs, entry count u32, entry records (vertex u32,
#         neighbor u32, weight f64, offset u32)
# names: per layer count u32 then (length u16, utf-8 bytes)
# trailer: 64-bit blake2b checksum of everything before it

_VARIANT_TAGS = {BASIC_A: 0, BASIC_B: 1, DEGENERACY: 2}
_PART_KINDS = {BASIC_A: ("basic_a",), BASIC_B: ("basic_b",), DEGENERACY: ("delta_a", "delta_b")}
_HEADER = struct.Struct("<4sIBIIIQQ")


def _checksum(payload: bytes) -> bytes:
    return hashlib.blake2b(payload, digest_size=8).digest()


def index_to_bytes(index: CommunityIndex) -> bytes:
    buf = io.BytesIO()
    n_up, n_lo, m, chash = index.fingerprint
    buf.write(_HEADER.pack(MAGIC, FORMAT_VERSION, _VARIANT_TAGS[index.variant], index.bound,
                           n_up, n_lo, m, chash))
    for part in index.parts:
        for t in range(1, index.bound + 1):
            own = part.own.get(t, {})
            lists = part.lists.get(t, {})
            buf.write(struct.pack("<II", t, len(own)))
            for x in sorted(own):
                buf.write(struct.pack("<II", x, own[x]))
            records = [(x, e) for x in sorted(lists) for e in lists[x]]
            buf.write(struct.pack("<I", len(records)))
            for x, (y, w, off) in records:
                buf.write(_RECORD.pack(x, y, w, off))
    for names in (index.upper_names, index.lower_names):
        buf.write(struct.pack("<I", len(names)))
        for name in names:
            raw = name.encode("utf-8")
            buf.write(struct.pack("<H", len(raw)))
            buf.write(raw)
    payload = buf.getvalue()
    return payload + _checksum(payload)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, fmt: Union[str, struct.Struct]):
        st = fmt if isinstance(fmt, struct.Struct) else struct.Struct(fmt)
        end = self.pos + st.size
        if end > len(self.data):
            raise TruncatedIndexError("index file is truncated")
        out = st.unpack_from(self.data, self.pos)
        self.pos = end
        return out

    def raw(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise TruncatedIndexError("index file is truncated")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out


def index_from_bytes(data: bytes) -> CommunityIndex:
    if len(data) < 8 or data[:4] != MAGIC:
        raise BadMagicError("not a community index file (bad magic)")
    (version,) = struct.unpack_from("<I", data, 4)
    if version != FORMAT_VERSION:
        raise VersionMismatchError(f"index format version {version}, expected {FORMAT_VERSION}")
    if len(data) < _HEADER.size + 8:
        raise TruncatedIndexError("index file is truncated")
    payload, trailer = data[:-8], data[-8:]
    if _checksum(payload) != trailer:
        raise ChecksumError("index checksum mismatch (corrupt or truncated file)")
    r = _Reader(payload)
    _, _, tag, bound, n_up, n_lo, m, chash = r.take(_HEADER)
    variants = {v: k for k, v in _VARIANT_TAGS.items()}
    if tag not in variants:
        raise IndexFormatError(f"unknown variant tag {tag}")
    variant = variants[tag]
    parts = []
    for kind in _PART_KINDS[variant]:
        part = LeveledAdjacency(kind)
        for t in range(1, bound + 1):
            level, n_own = r.take("<II")
            if level != t:
                raise IndexFormatError(f"expected level {t}, found {level}")
            own = {}
            for _ in range(n_own):
                x, off = r.take("<II")
                own[x] = off
            lists = {x: [] for x in own}
            (n_rec,) = r.take("<I")
            for _ in range(n_rec):
                x, y, w, off = r.take(_RECORD)
                if x not in lists:
                    raise IndexFormatError(f"list entry for vertex {x} without own offset")
                lists[x].append((y, w, off))
            part.own[t] = own
            part.lists[t] = lists
        parts.append(part)
    names = []
    for _ in range(2):
        (count,) = r.take("<I")
        layer = []
        for _ in range(count):
            (length,) = r.take("<H")
            layer.append(r.raw(length).decode("utf-8"))
        names.append(tuple(layer))
    if r.pos != len(payload):
        raise IndexFormatError("trailing bytes after index payload")
    if (len(names[0]), len(names[1])) != (n_up, n_lo):
        raise IndexFormatError("vertex name table does not match header counts")
    return CommunityIndex(variant, bound, tuple(parts), names[0], names[1], (n_up, n_lo, m, chash))


def save_index(index: CommunityIndex, sink: Union[str, BinaryIO]) -> int:
    """Write the index; returns the number of bytes written."""
    data = index_to_bytes(index)
    if isinstance(sink, (str, bytes)) or hasattr(sink, "__fspath__"):
        with open(sink, "wb") as fh:
            fh.write(data)
    else:
        sink.write(data)
    return len(data)


def load_index(source: Union[str, BinaryIO]) -> CommunityIndex:
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, "rb") as fh:
            data = fh.read()
    else:
        data = source.read()
    return index_from_bytes(data)
