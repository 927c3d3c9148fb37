"""Threshold graphs, connectivity decompositions, and closure rules.

The decompositions are checked against brute-force subset enumeration:
qualification of every vertex subset is decided by definition (removal of
every small vertex set / every small edge set), then reduced to maximal
blocks. That oracle is exponential but exact on small graphs.
"""

import itertools

import pytest
from hypothesis import given, strategies as st

from sievecluster import (
    Cover,
    Graph,
    InputFormatError,
    bk_closure,
    bk_star_closure,
    connected_components,
    max_edge_connected_subgraphs,
    max_vertex_connected_subgraphs,
    read_edge_list,
    reduce_to_maximal,
    refines,
    space_from_graph,
    threshold_graph,
    write_dot,
    write_edge_list,
)
from sievecluster.rng import SplitMix64

from conftest import graph_space


def _labels(n):
    return [f"v{i}" for i in range(n)]


def make_graph(n, edges):
    return Graph(_labels(n), [(f"v{i}", f"v{j}") for i, j in edges])


def _connected_subset(adjsets, verts):
    verts = set(verts)
    if not verts:
        return True
    seen = {next(iter(verts))}
    frontier = list(seen)
    while frontier:
        v = frontier.pop()
        for w in adjsets[v] & verts:
            if w not in seen:
                seen.add(w)
                frontier.append(w)
    return seen == verts


def _adjsets(g):
    out = {v: set() for v in g.vertices}
    for u, v in g.edges:
        out[u].add(v)
        out[v].add(u)
    return out


def brute_vertex_decomposition(g, k):
    """Maximal subsets whose induced subgraph qualifies at level k:
    complete graphs on at most k vertices, or subsets that stay connected
    under removal of every k-1 vertices."""
    adj = _adjsets(g)
    qualifying = []
    verts = list(g.vertices)
    for r in range(1, len(verts) + 1):
        for sub in itertools.combinations(verts, r):
            s = set(sub)
            if r <= k:
                if all(b in adj[a] for a, b in itertools.combinations(sub, 2)):
                    qualifying.append(sub)
                continue
            if not _connected_subset(adj, s):
                continue
            ok = True
            for cut in itertools.combinations(sub, k - 1):
                if not _connected_subset(adj, s - set(cut)):
                    ok = False
                    break
            if ok:
                qualifying.append(sub)
    cover = Cover(g.vertices, [tuple(sorted(s)) for s in qualifying])
    return reduce_to_maximal(cover)


def brute_edge_decomposition(g, k):
    """Maximal subsets whose induced subgraph is k-edge-connected
    (singletons always qualify), plus the partition property."""
    adj = _adjsets(g)
    qualifying = [(v,) for v in g.vertices]
    verts = list(g.vertices)
    for r in range(2, len(verts) + 1):
        for sub in itertools.combinations(verts, r):
            s = set(sub)
            if not _connected_subset(adj, s):
                continue
            edges = [
                (a, b) for a, b in itertools.combinations(sub, 2) if b in adj[a]
            ]
            ok = True
            for cut_size in range(min(k, len(edges) + 1)):
                for cut in itertools.combinations(edges, cut_size):
                    pruned = {v: adj[v] - {w for e in cut for w in e if v in e} for v in s}
                    pruned = {
                        v: {w for w in adj[v] & s if (v, w) not in cut and (w, v) not in cut}
                        for v in s
                    }
                    if not _connected_subset(pruned, s):
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                qualifying.append(sub)
    cover = Cover(g.vertices, [tuple(sorted(s)) for s in qualifying])
    return reduce_to_maximal(cover)


def random_graph(n, seed, p_numerator=1, p_denominator=2):
    rng = SplitMix64(seed)
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.randint(p_denominator) < p_numerator:
                edges.append((i, j))
    return make_graph(n, edges)


def test_graph_rejects_loops_and_unknown_vertices():
    with pytest.raises(ValueError):
        Graph(["a"], [("a", "a")])
    with pytest.raises(ValueError):
        Graph(["a", "b"], [("a", "z")])


def test_threshold_graph_inclusive_boundary(x3):
    g1 = threshold_graph(x3, 1.0)
    assert g1.edge_count == 2 and g1.has_edge("a", "b") and not g1.has_edge("a", "c")
    g2 = threshold_graph(x3, 2.0)
    assert g2.edge_count == 3
    g0 = threshold_graph(x3, 0.5)
    assert g0.edge_count == 0


def test_space_from_graph_roundtrip():
    g = make_graph(4, [(0, 1), (2, 3)])
    x = space_from_graph(g, 1.5)
    assert threshold_graph(x, 1.5).edges == g.edges
    assert x.distance("v0", "v2") == 3.0


def test_connected_components():
    g = make_graph(5, [(0, 1), (1, 2)])
    c = connected_components(g)
    assert c.blocks == (("v0", "v1", "v2"), ("v3",), ("v4",))
    assert c.is_partition()


def test_vl_examples(four_cycle, bowtie):
    g = threshold_graph(four_cycle, 1.0)
    assert max_vertex_connected_subgraphs(g, 2).blocks == (("a", "b", "c", "d"),)
    g = threshold_graph(bowtie, 1.0)
    assert max_vertex_connected_subgraphs(g, 2).blocks == (
        ("1", "2", "3"),
        ("3", "4", "5"),
    )


def test_vl_k1_is_components():
    for seed in range(10):
        g = random_graph(6, 100 + seed)
        assert max_vertex_connected_subgraphs(g, 1) == connected_components(g)


def test_el_examples(bowtie):
    g = threshold_graph(bowtie, 1.0)
    assert max_edge_connected_subgraphs(g, 2).blocks == (("1", "2", "3", "4", "5"),)
    tree = make_graph(5, [(0, 1), (1, 2), (1, 3), (3, 4)])
    assert all(len(b) == 1 for b in max_edge_connected_subgraphs(tree, 2).blocks)
    for seed in range(10):
        g = random_graph(6, 200 + seed)
        assert max_edge_connected_subgraphs(g, 1) == connected_components(g)


def test_el_output_is_partition():
    for seed in range(30):
        g = random_graph(7, 300 + seed)
        for k in (1, 2, 3):
            assert max_edge_connected_subgraphs(g, k).is_partition()


def test_el_clique_exception_adjoins_cliques():
    # a triangle with a pendant edge: standard EL^2 gives {triangle} + 2
    # singletons; the exception variant keeps the pendant edge as a clique
    g = make_graph(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4)])
    std = max_edge_connected_subgraphs(g, 2)
    assert std.blocks == (("v0", "v1", "v2"), ("v3",), ("v4",))
    exc = max_edge_connected_subgraphs(g, 2, clique_exception=True)
    assert exc.blocks == (("v0", "v1", "v2"), ("v2", "v3"), ("v3", "v4"))


@pytest.mark.parametrize("k", [2, 3, 4])
def test_vertex_decomposition_matches_brute_force_random(k):
    for seed in range(25):
        g = random_graph(5 + seed % 4, 400 + 31 * seed + k)
        assert max_vertex_connected_subgraphs(g, k) == brute_vertex_decomposition(
            g, k
        ), f"seed {seed}"


@pytest.mark.parametrize("k", [2, 3, 4])
def test_edge_decomposition_matches_brute_force_random(k):
    for seed in range(25):
        g = random_graph(5 + seed % 3, 500 + 31 * seed + k)
        assert max_edge_connected_subgraphs(g, k) == brute_edge_decomposition(
            g, k
        ), f"seed {seed}"


def test_decompositions_exhaustive_four_vertices():
    pairs = list(itertools.combinations(range(4), 2))
    for mask in range(1 << len(pairs)):
        edges = [p for e, p in enumerate(pairs) if mask >> e & 1]
        g = make_graph(4, edges)
        for k in (2, 3):
            assert max_vertex_connected_subgraphs(g, k) == brute_vertex_decomposition(g, k)
            assert max_edge_connected_subgraphs(g, k) == brute_edge_decomposition(g, k)


def test_vl_chain_refinement():
    for seed in range(15):
        g = random_graph(7, 600 + seed)
        covers = [max_vertex_connected_subgraphs(g, k) for k in (1, 2, 3, 4, 5)]
        for finer, coarser in zip(covers[1:], covers):
            assert refines(finer, coarser)


def test_bk_closure_examples():
    path = make_graph(3, [(0, 1), (1, 2)])
    assert bk_closure(path, 2).edges == path.edges
    assert bk_star_closure(path, 2).edges == path.edges
    cyc = make_graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    assert bk_closure(cyc, 2).edges == cyc.edges
    closed = bk_star_closure(cyc, 2)
    assert closed.edge_count == 6  # K4
    complete = make_graph(4, list(itertools.combinations(range(4), 2)))
    assert bk_closure(complete, 2).edges == complete.edges
    empty = make_graph(3, [])
    assert bk_star_closure(empty, 2).edges == frozenset()


def _randomized_order_closure(g, k, relaxed, seed):
    """Apply the closure rule one randomly chosen applicable pair at a
    time; confluence means the fixed point matches the library's."""
    rng = SplitMix64(seed)
    adj = _adjsets(g)
    verts = list(g.vertices)
    while True:
        applicable = []
        for a, b in itertools.combinations(verts, 2):
            if b in adj[a]:
                continue
            common = adj[a] & adj[b]
            if relaxed:
                if len(common) >= k:
                    applicable.append((a, b))
                continue
            for s in itertools.combinations(sorted(common), k):
                if all(y in adj[x] for x, y in itertools.combinations(s, 2)):
                    applicable.append((a, b))
                    break
        if not applicable:
            break
        a, b = applicable[rng.randint(len(applicable))]
        adj[a].add(b)
        adj[b].add(a)
    return frozenset(frozenset((a, b)) for a in verts for b in adj[a])


@pytest.mark.parametrize("relaxed", [False, True])
def test_closures_match_randomized_order(relaxed):
    close = bk_star_closure if relaxed else bk_closure
    for seed in range(20):
        g = random_graph(4 + seed % 5, 700 + seed)
        for k in (1, 2, 3):
            got = close(g, k)
            expect = _randomized_order_closure(g, k, relaxed, 900 + seed)
            assert frozenset(map(frozenset, got.edges)) == expect


def test_closures_idempotent_and_ordered():
    for seed in range(20):
        g = random_graph(6, 800 + seed)
        for k in (1, 2, 3):
            a = bk_closure(g, k)
            b = bk_star_closure(g, k)
            assert a.edges <= b.edges
            assert bk_closure(a, k).edges == a.edges
            assert bk_star_closure(b, k).edges == b.edges
            assert g.edges <= a.edges


@given(st.integers(0, 2**15 - 1))
def test_threshold_monotone_in_delta(mask):
    pairs = list(itertools.combinations(range(6), 2))
    edges = [p for e, p in enumerate(pairs) if mask >> e & 1]
    x = graph_space(6, edges)
    small = threshold_graph(x, 1.0)
    large = threshold_graph(x, 2.0)
    assert small.edges <= large.edges


def test_dot_output(four_cycle):
    g = threshold_graph(four_cycle, 1.0)
    text = write_dot(g)
    assert text.startswith("graph G {")
    assert '"a" -- "b";' in text
    assert text.count("--") == 4


def test_edge_list_roundtrip():
    g = make_graph(5, [(0, 1), (2, 3)])
    text = write_edge_list(g)
    again = read_edge_list(text)
    assert again.vertices == g.vertices
    assert again.edges == g.edges


def test_edge_list_errors():
    with pytest.raises(InputFormatError):
        read_edge_list("nonsense header\n")
    with pytest.raises(InputFormatError):
        read_edge_list("n 2\na a\n")
    with pytest.raises(InputFormatError):
        read_edge_list("n 3\na b\n")  # declares 3 vertices, names 2
