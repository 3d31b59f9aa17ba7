"""Weighted bipartite graph model, edge-list ingestion, synthetic weights and stats.

Vertices of both layers share one integer id space by interleaving: upper
vertex ``i`` has id ``2*i`` and lower vertex ``j`` has id ``2*j + 1``.  The
layer of an id is therefore its parity, and adding vertices to one layer
never renumbers the other.
"""

from __future__ import annotations

import enum
import hashlib
import io
import math
import os
from dataclasses import dataclass
from functools import cached_property
from typing import IO, Iterable, Iterator, NamedTuple, Sequence, Union

import numpy as np
from scipy import stats as sps


class GraphFormatError(ValueError):
    """Malformed edge-list input."""

    def __init__(self, message: str, lineno: int | None = None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


class DuplicateEdgeError(GraphFormatError):
    pass


class UnknownVertexError(KeyError):
    pass


class Layer(enum.Enum):
    UPPER = "u"
    LOWER = "v"


class VertexRef(NamedTuple):
    layer: Layer
    ordinal: int

    @property
    def gid(self) -> int:
        return to_gid(self.layer, self.ordinal)


def to_gid(layer: Layer, ordinal: int) -> int:
    return 2 * ordinal if layer is Layer.UPPER else 2 * ordinal + 1


def is_upper(x: int) -> bool:
    return not x & 1


def layer_of_token(token: str) -> Layer | None:
    if len(token) < 2:
        return None
    if token[0] == "u":
        return Layer.UPPER
    if token[0] == "v":
        return Layer.LOWER
    return None


def format_weight(w: float) -> str:
    if w.is_integer() and abs(w) < 1e15:
        return str(int(w))
    return repr(w)


Edge = tuple  # (upper gid, lower gid, weight)


class VertexNames:
    """Layer-prefixed vertex tokens and their interleaved ids."""

    upper_names: tuple[str, ...]
    lower_names: tuple[str, ...]

    @property
    def n_upper(self) -> int:
        return len(self.upper_names)

    @property
    def n_lower(self) -> int:
        return len(self.lower_names)

    def vertices(self) -> Iterator[int]:
        for i in range(self.n_upper):
            yield 2 * i
        for j in range(self.n_lower):
            yield 2 * j + 1

    def has_vertex(self, x: int) -> bool:
        if x < 0:
            return False
        return (x >> 1) < (self.n_lower if x & 1 else self.n_upper)

    def name(self, x: int) -> str:
        return self.lower_names[x >> 1] if x & 1 else self.upper_names[x >> 1]

    def ref(self, x: int) -> VertexRef:
        return VertexRef(Layer.LOWER if x & 1 else Layer.UPPER, x >> 1)

    @cached_property
    def _name_index(self) -> dict[str, int]:
        index = {name: 2 * i for i, name in enumerate(self.upper_names)}
        index.update({name: 2 * j + 1 for j, name in enumerate(self.lower_names)})
        return index

    def vid(self, vertex: Union[str, int, VertexRef]) -> int:
        """Resolve a token (``"u7"``), a VertexRef, or an id to a vertex id."""
        if isinstance(vertex, VertexRef):
            x = vertex.gid
        elif isinstance(vertex, str):
            try:
                return self._name_index[vertex]
            except KeyError:
                raise UnknownVertexError(vertex) from None
        else:
            x = int(vertex)
        if not self.has_vertex(x):
            raise UnknownVertexError(vertex)
        return x


class BipartiteGraph(VertexNames):
    """Immutable weighted bipartite graph in compressed sparse row layout.

    ``indptr``/``nbrs``/``weights`` are indexed by interleaved vertex id.
    Neighbor spans are sorted by neighbor id.
    """

    def __init__(
        self,
        upper_names: Sequence[str],
        lower_names: Sequence[str],
        edges: Iterable[tuple[int, int, float]],
        *,
        allow_isolated: bool = False,
    ):
        self.upper_names = tuple(upper_names)
        self.lower_names = tuple(lower_names)
        size = 2 * max(self.n_upper, self.n_lower, 1)

        seen: dict[tuple[int, int], float] = {}
        for i, j, w in edges:
            if not (0 <= i < self.n_upper and 0 <= j < self.n_lower):
                raise ValueError(f"edge ({i}, {j}) out of range")
            w = float(w)
            if not math.isfinite(w) or w < 0:
                raise GraphFormatError(f"invalid weight {w!r} on edge "
                                       f"({self.upper_names[i]}, {self.lower_names[j]})")
            if (i, j) in seen:
                raise DuplicateEdgeError(
                    f"duplicate edge ({self.upper_names[i]}, {self.lower_names[j]})")
            seen[(i, j)] = w

        deg = np.zeros(size, dtype=np.int64)
        for i, j in seen:
            deg[2 * i] += 1
            deg[2 * j + 1] += 1
        if not allow_isolated:
            for x in self.vertices():
                if deg[x] == 0:
                    raise GraphFormatError(f"vertex {self.name(x)} has no incident edge")

        indptr = np.zeros(size + 1, dtype=np.int64)
        np.cumsum(deg, out=indptr[1:])
        nbrs = np.empty(indptr[-1], dtype=np.int64)
        weights = np.empty(indptr[-1], dtype=np.float64)
        fill = indptr[:-1].copy()
        for (i, j), w in sorted(seen.items()):
            u, v = 2 * i, 2 * j + 1
            nbrs[fill[u]] = v
            weights[fill[u]] = w
            fill[u] += 1
            nbrs[fill[v]] = u
            weights[fill[v]] = w
            fill[v] += 1
        self.indptr = indptr
        self.nbrs = nbrs
        self.weights = weights
        self.m = len(seen)
        for arr in (self.indptr, self.nbrs, self.weights):
            arr.setflags(write=False)

    # -- size and identity -------------------------------------------------

    @property
    def n(self) -> int:
        return self.n_upper + self.n_lower

    @property
    def id_space(self) -> int:
        """Length of arrays indexed by vertex id."""
        return len(self.indptr) - 1

    @cached_property
    def fingerprint(self) -> tuple[int, int, int, int]:
        """(n_upper, n_lower, m, 64-bit content hash)."""
        h = hashlib.blake2b(digest_size=8)
        h.update("\0".join(self.upper_names).encode())
        h.update(b"\1")
        h.update("\0".join(self.lower_names).encode())
        h.update(b"\1")
        h.update(self.indptr.tobytes())
        h.update(self.nbrs.tobytes())
        h.update(self.weights.tobytes())
        return (self.n_upper, self.n_lower, self.m, int.from_bytes(h.digest(), "little"))

    # -- adjacency -----------------------------------------------------------

    @cached_property
    def adj(self) -> tuple[list[int], list[int], list[float]]:
        """Plain-list copies of the CSR arrays (faster for scalar loops)."""
        return self.indptr.tolist(), self.nbrs.tolist(), self.weights.tolist()

    def degree(self, x: int) -> int:
        return int(self.indptr[x + 1] - self.indptr[x])

    def neighbors(self, x: int) -> list[int]:
        ip, nb, _ = self.adj
        return nb[ip[x]:ip[x + 1]]

    def neighbor_items(self, x: int) -> list[tuple[int, float]]:
        ip, nb, wt = self.adj
        lo, hi = ip[x], ip[x + 1]
        return list(zip(nb[lo:hi], wt[lo:hi]))

    def weight(self, x: int, y: int) -> float:
        lo, hi = self.indptr[x], self.indptr[x + 1]
        k = lo + int(np.searchsorted(self.nbrs[lo:hi], y))
        if k < hi and self.nbrs[k] == y:
            return float(self.weights[k])
        raise KeyError((x, y))

    def has_edge(self, x: int, y: int) -> bool:
        try:
            self.weight(x, y)
        except KeyError:
            return False
        return True

    def edges(self) -> list[Edge]:
        """All edges as (upper id, lower id, weight), by upper then lower ordinal."""
        ip, nb, wt = self.adj
        out = []
        for i in range(self.n_upper):
            u = 2 * i
            for k in range(ip[u], ip[u + 1]):
                out.append((u, nb[k], wt[k]))
        return out

    # -- derived graphs ------------------------------------------------------

    def _ordinal_edges(self) -> list[tuple[int, int, float]]:
        return [(u >> 1, v >> 1, w) for u, v, w in self.edges()]

    def with_weights(self, weights: Sequence[float]) -> "BipartiteGraph":
        """Same topology, weights replaced in ``edges()`` order."""
        base = self._ordinal_edges()
        if len(weights) != len(base):
            raise ValueError("weight vector length does not match edge count")
        return BipartiteGraph(
            self.upper_names, self.lower_names,
            [(i, j, w) for (i, j, _), w in zip(base, weights)],
            allow_isolated=True,
        )

    def with_edge(self, upper: str, lower: str, weight: float) -> "BipartiteGraph":
        """Copy with one more edge; unknown endpoint names become new vertices."""
        upper_names = list(self.upper_names)
        lower_names = list(self.lower_names)
        idx = self._name_index
        if upper in idx:
            i = idx[upper] >> 1
        else:
            i = len(upper_names)
            upper_names.append(upper)
        if lower in idx:
            j = idx[lower] >> 1
        else:
            j = len(lower_names)
            lower_names.append(lower)
        edges = self._ordinal_edges()
        edges.append((i, j, weight))
        return BipartiteGraph(upper_names, lower_names, edges, allow_isolated=True)

    def without_edge(self, u: int, v: int) -> "BipartiteGraph":
        """Copy minus edge (u, v); endpoints stay as (possibly isolated) vertices."""
        if not self.has_edge(u, v):
            raise KeyError((u, v))
        i, j = u >> 1, v >> 1
        edges = [e for e in self._ordinal_edges() if (e[0], e[1]) != (i, j)]
        return BipartiteGraph(self.upper_names, self.lower_names, edges, allow_isolated=True)

    # -- text ----------------------------------------------------------------

    def to_text(self) -> str:
        lines = [f"{self.name(u)} {self.name(v)} {format_weight(w)}" for u, v, w in self.edges()]
        return "\n".join(lines) + ("\n" if lines else "")

    def __repr__(self) -> str:
        return f"BipartiteGraph(|U|={self.n_upper}, |L|={self.n_lower}, m={self.m})"


# ---------------------------------------------------------------------------
# ingestion


Source = Union[str, bytes, os.PathLike, IO[str], IO[bytes]]


def _iter_lines(source: Source) -> Iterator[str]:
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            for raw in fh:
                yield raw.decode("utf-8")
        return
    if isinstance(source, bytes):
        source = io.BytesIO(source)
    for raw in source:
        yield raw.decode("utf-8") if isinstance(raw, bytes) else raw


def parse_edgelist(lines: Iterable[str]) -> BipartiteGraph:
    """Parse ``u<token> v<token> [weight]`` lines; ``#`` starts a comment line."""
    upper: dict[str, int] = {}
    lower: dict[str, int] = {}
    edges: list[tuple[int, int, float]] = []
    seen: set[tuple[int, int]] = set()
    for lineno, line in enumerate(lines, start=1):
        fields = line.split()
        if not fields or fields[0].startswith("#"):
            continue
        if len(fields) not in (2, 3):
            raise GraphFormatError(f"expected 2 or 3 fields, got {len(fields)}", lineno)
        a, b = fields[0], fields[1]
        la, lb = layer_of_token(a), layer_of_token(b)
        if la is None or lb is None:
            raise GraphFormatError(f"vertex tokens must start with 'u' or 'v': {a!r} {b!r}", lineno)
        if la is lb:
            raise GraphFormatError(f"both endpoints in the same layer: {a} {b}", lineno)
        if la is Layer.LOWER:
            a, b = b, a
        if len(fields) == 3:
            try:
                w = float(fields[2])
            except ValueError:
                raise GraphFormatError(f"bad weight {fields[2]!r}", lineno) from None
            if not math.isfinite(w) or w < 0:
                raise GraphFormatError(f"weight must be finite and non-negative, got {fields[2]}",
                                       lineno)
        else:
            w = 1.0
        i = upper.setdefault(a, len(upper))
        j = lower.setdefault(b, len(lower))
        if (i, j) in seen:
            raise DuplicateEdgeError(f"duplicate edge ({a}, {b})", lineno)
        seen.add((i, j))
        edges.append((i, j, w))
    return BipartiteGraph(list(upper), list(lower), edges)


def load_graph(source: Source) -> BipartiteGraph:
    """Load an edge-list file (path, bytes, or open stream)."""
    return parse_edgelist(_iter_lines(source))


# ---------------------------------------------------------------------------
# synthetic weights


@dataclass(frozen=True)
class Constant:
    c: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.c) or self.c < 0:
            raise ValueError("constant weight must be finite and non-negative")

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.full(size, float(self.c))


@dataclass(frozen=True)
class Uniform:
    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or self.lo >= self.hi:
            raise ValueError("uniform distribution needs finite lo < hi")
        if self.lo < 0:
            raise ValueError("uniform lower bound must be non-negative")

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.uniform(self.lo, self.hi, size)


@dataclass(frozen=True)
class SkewNormal:
    loc: float = 0.0
    scale: float = 1.0
    shape: float = 0.0

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("skew-normal scale must be positive")

    @property
    def skewness(self) -> float:
        return float(sps.skewnorm.stats(self.shape, loc=self.loc, scale=self.scale, moments="s"))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        draws = sps.skewnorm.rvs(self.shape, loc=self.loc, scale=self.scale, size=size,
                                 random_state=rng)
        return np.maximum(draws, 0.0)


Distribution = Union[Constant, Uniform, SkewNormal]


def parse_distribution(spec: str) -> Distribution:
    """``constant:C``, ``uniform:LO,HI`` or ``skewnormal:LOC,SCALE,SHAPE``."""
    kind, _, args = spec.partition(":")
    try:
        params = [float(a) for a in args.split(",")] if args else []
    except ValueError:
        raise ValueError(f"bad distribution parameters in {spec!r}") from None
    kind = kind.strip().lower()
    table = {"constant": (Constant, 1), "uniform": (Uniform, 2), "skewnormal": (SkewNormal, 3)}
    if kind not in table:
        raise ValueError(f"unknown distribution {kind!r}")
    cls, arity = table[kind]
    if len(params) != arity:
        raise ValueError(f"{kind} takes {arity} parameter(s)")
    return cls(*params)


def generate_weights(graph: BipartiteGraph, dist: Distribution, seed: int) -> BipartiteGraph:
    rng = np.random.default_rng(seed)
    return graph.with_weights(dist.sample(rng, graph.m).tolist())


# ---------------------------------------------------------------------------
# statistics


@dataclass(frozen=True)
class GraphStats:
    n_upper: int
    n_lower: int
    m: int
    alpha_max: int
    beta_max: int
    degeneracy: int
    dense_core_size: int
    density: float


def graph_stats(graph: BipartiteGraph) -> GraphStats:
    from .decomp import compute_degeneracy

    if graph.m == 0:
        raise ValueError("graph has no edges")
    deg = np.diff(graph.indptr)
    delta, core = compute_degeneracy(graph)
    return GraphStats(
        n_upper=graph.n_upper,
        n_lower=graph.n_lower,
        m=graph.m,
        alpha_max=int(deg[0::2].max()),
        beta_max=int(deg[1::2].max()),
        degeneracy=delta,
        dense_core_size=len(core),
        density=graph.m / math.sqrt(graph.n_upper * graph.n_lower),
    )


@dataclass(frozen=True)
class CommunityStats:
    n_upper: int
    n_lower: int
    m: int
    min_weight: float
    mean_weight: float
    density: float


def community_stats(edges) -> CommunityStats:
    """Summary of an edge set given as (upper, lower, weight) triples or a Community."""
    edges = list(getattr(edges, "edges", edges))
    if not edges:
        raise ValueError("empty edge set")
    uppers = {e[0] for e in edges}
    lowers = {e[1] for e in edges}
    weights = [e[2] for e in edges]
    return CommunityStats(
        n_upper=len(uppers),
        n_lower=len(lowers),
        m=len(edges),
        min_weight=min(weights),
        mean_weight=math.fsum(weights) / len(weights),
        density=len(edges) / math.sqrt(len(uppers) * len(lowers)),
    )
