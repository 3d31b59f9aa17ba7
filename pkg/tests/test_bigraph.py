import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bicomm.bigraph import (
    BipartiteGraph,
    Constant,
    DuplicateEdgeError,
    GraphFormatError,
    Layer,
    SkewNormal,
    Uniform,
    UnknownVertexError,
    VertexRef,
    community_stats,
    generate_weights,
    graph_stats,
    load_graph,
    parse_distribution,
    parse_edgelist,
)


def test_f1_shape(f1):
    assert (f1.n_upper, f1.n_lower, f1.m) == (3, 3, 7)
    assert f1.degree(f1.vid("u1")) == 3
    assert f1.degree(f1.vid("v3")) == 2
    assert f1.weight(f1.vid("u3"), f1.vid("v2")) == 5.0
    assert [(f1.name(u), f1.name(v), w) for u, v, w in f1.edges()][:3] == [
        ("u1", "v1", 9.0), ("u1", "v2", 8.0), ("u1", "v3", 3.0)]


def test_interleaved_ids_and_refs(f1):
    u2 = f1.vid("u2")
    assert u2 == 2 and f1.vid("v1") == 1
    assert f1.ref(u2) == VertexRef(Layer.UPPER, 1)
    assert f1.vid(VertexRef(Layer.LOWER, 2)) == f1.vid("v3")
    with pytest.raises(UnknownVertexError):
        f1.vid("u9")
    with pytest.raises(UnknownVertexError):
        f1.vid(99)


def test_neighbors_sorted_and_symmetric(f1):
    for x in f1.vertices():
        nbrs = list(f1.neighbors(x))
        assert nbrs == sorted(nbrs)
        for y in nbrs:
            u, v = (y, x) if x & 1 else (x, y)
            assert f1.has_edge(u, v)


def test_parse_comments_default_weight_and_swapped_order():
    g = parse_edgelist(["# header", "", "u1 v1", "v2 u1 2.5", "  # indented comment"])
    assert g.m == 2
    assert g.weight(g.vid("u1"), g.vid("v1")) == 1.0
    assert g.weight(g.vid("u1"), g.vid("v2")) == 2.5


@pytest.mark.parametrize("lines, lineno", [
    (["u1 v1 1", "u1 u2 3"], 2),
    (["u1"], 1),
    (["u1 v1 x"], 1),
    (["u1 v1 -1"], 1),
    (["u1 v1 nan"], 1),
    (["a1 v1 1"], 1),
])
def test_parse_errors_carry_line_numbers(lines, lineno):
    with pytest.raises(GraphFormatError) as err:
        parse_edgelist(lines)
    assert err.value.lineno == lineno


def test_duplicate_edge_rejected():
    with pytest.raises(DuplicateEdgeError):
        parse_edgelist(["u1 v1 1", "v1 u1 2"])
    with pytest.raises(DuplicateEdgeError):
        BipartiteGraph(["u1"], ["v1"], [(0, 0, 1.0), (0, 0, 2.0)])


def test_zero_weight_allowed():
    g = parse_edgelist(["u1 v1 0"])
    assert g.weight(0, 1) == 0.0


def test_isolated_vertex_rejected_unless_allowed():
    with pytest.raises(GraphFormatError):
        BipartiteGraph(["u1", "u2"], ["v1"], [(0, 0, 1.0)])
    g = BipartiteGraph(["u1", "u2"], ["v1"], [(0, 0, 1.0)], allow_isolated=True)
    assert g.degree(2) == 0


def test_load_from_path_bytes_and_stream(f1_path):
    a = load_graph(f1_path)
    b = load_graph(f1_path.read_bytes())
    c = load_graph(io.StringIO(f1_path.read_text()))
    assert a.fingerprint == b.fingerprint == c.fingerprint


def test_text_round_trip(f1):
    assert parse_edgelist(f1.to_text().splitlines()).fingerprint == f1.fingerprint


def test_fingerprint_sensitive_to_weights(f1):
    g = f1.with_weights([1.0] * f1.m)
    assert g.fingerprint != f1.fingerprint
    assert g.fingerprint[:3] == f1.fingerprint[:3]


def test_with_and_without_edge(f1):
    g = f1.with_edge("u2", "v3", 10)
    assert g.m == 8 and g.weight(g.vid("u2"), g.vid("v3")) == 10.0
    h = g.with_edge("u9", "v9", 5)
    assert h.n_upper == 4 and h.n_lower == 4
    assert h.vid("u1") == f1.vid("u1")
    back = g.without_edge(g.vid("u2"), g.vid("v3"))
    assert back.fingerprint == f1.fingerprint
    with pytest.raises(KeyError):
        f1.without_edge(f1.vid("u2"), f1.vid("v3"))


def test_distributions():
    rng = np.random.default_rng(0)
    assert np.all(Constant(1.0).sample(rng, 10) == 1.0)
    u = Uniform(2.0, 3.0).sample(rng, 1000)
    assert u.min() >= 2.0 and u.max() < 3.0
    sk = SkewNormal(3.0, 1.0, 1.02)
    assert sk.sample(rng, 1000).min() >= 0.0
    assert 0 < sk.skewness < 1
    with pytest.raises(ValueError):
        Uniform(3.0, 3.0)
    with pytest.raises(ValueError):
        SkewNormal(0.0, 0.0, 1.0)


@pytest.mark.parametrize("spec, expected", [
    ("constant:1", Constant(1.0)),
    ("uniform:0,1", Uniform(0.0, 1.0)),
    ("skewnormal:3,1,1.02", SkewNormal(3.0, 1.0, 1.02)),
])
def test_parse_distribution(spec, expected):
    assert parse_distribution(spec) == expected


@pytest.mark.parametrize("spec", ["gauss:1", "uniform:1", "constant:x", "constant"])
def test_parse_distribution_errors(spec):
    with pytest.raises(ValueError):
        parse_distribution(spec)


def test_generate_weights_is_seeded(f1):
    d = parse_distribution("uniform:0,10")
    a = generate_weights(f1, d, seed=7)
    b = generate_weights(f1, d, seed=7)
    c = generate_weights(f1, d, seed=8)
    assert a.fingerprint == b.fingerprint != c.fingerprint
    assert [e[:2] for e in a.edges()] == [e[:2] for e in f1.edges()]
    assert all(w == 1.0 for *_, w in generate_weights(f1, Constant(1.0), 0).edges())


def test_graph_stats_f1(f1):
    s = graph_stats(f1)
    assert (s.degeneracy, s.alpha_max, s.beta_max, s.m) == (2, 3, 3, 7)
    assert s.density == pytest.approx(7 / 3)


def test_graph_stats_single_edge_and_biclique():
    s = graph_stats(parse_edgelist(["u1 v1"]))
    assert (s.n_upper, s.n_lower, s.m, s.alpha_max, s.beta_max, s.degeneracy, s.density) == (
        1, 1, 1, 1, 1, 1, 1.0)
    k33 = parse_edgelist([f"u{i} v{j}" for i in range(3) for j in range(3)])
    assert graph_stats(k33).degeneracy == 3


def test_community_stats():
    s = community_stats([(0, 1, 4.0), (0, 3, 6.0), (2, 1, 8.0)])
    assert (s.n_upper, s.n_lower, s.m, s.min_weight) == (2, 2, 3, 4.0)
    assert s.mean_weight == pytest.approx(6.0)
    with pytest.raises(ValueError):
        community_stats([])


@settings(max_examples=50, deadline=None)
@given(st.sets(st.tuples(st.integers(0, 6), st.integers(0, 6)), min_size=1, max_size=30),
       st.randoms(use_true_random=False))
def test_csr_matches_edge_list(pairs, rnd):
    pairs = sorted(pairs)
    lines = [f"u{i} v{j} {i + j}" for i, j in pairs]
    rnd.shuffle(lines)
    g = parse_edgelist(lines)
    got = {(g.name(u), g.name(v)): w for u, v, w in g.edges()}
    assert got == {(f"u{i}", f"v{j}"): float(i + j) for i, j in pairs}
    assert sum(g.degree(x) for x in g.vertices()) == 2 * g.m
    assert math.isclose(graph_stats(g).density, g.m / math.sqrt(g.n_upper * g.n_lower))
