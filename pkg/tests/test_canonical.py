import random

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tropcanon.canonical import canonical_form, canonize
from tropcanon.errors import SizeLimit
from tropcanon.graphs import CombinatorialCurve

from curves import dumbbell, k4, theta


def relabel(c: CombinatorialCurve, seed: int) -> CombinatorialCurve:
    rng = random.Random(seed)
    vs = list(c.vertices)
    perm = {v: f"w{i}" for v, i in zip(vs, rng.sample(range(len(vs)), len(vs)))}
    es = list(c.edges)
    eperm = {e: f"f{i}" for e, i in zip(es, rng.sample(range(len(es)), len(es)))}
    edges = {}
    for e, (a, b) in c.edges.items():
        ends = (perm[a], perm[b]) if rng.random() < 0.5 else (perm[b], perm[a])
        edges[eperm[e]] = ends
    legs = {f"m{i}": perm[v] for i, (l, v) in enumerate(sorted(c.legs.items()))}
    return CombinatorialCurve({perm[v]: h for v, h in c.vertices.items()}, edges, legs)


def to_nx(c: CombinatorialCurve) -> nx.MultiGraph:
    g = nx.MultiGraph()
    for v, h in c.vertices.items():
        g.add_node(v, h=h, legs=len(c.legs_at(v)))
    for e, (a, b) in c.edges.items():
        g.add_edge(a, b)
    return g


def nx_isomorphic(c1, c2) -> bool:
    return nx.is_isomorphic(
        to_nx(c1),
        to_nx(c2),
        node_match=lambda x, y: (x["h"], x["legs"]) == (y["h"], y["legs"]),
    )


def test_k4_relabelings_equal():
    assert canonical_form(relabel(k4().base, 1)) == canonical_form(relabel(k4().base, 2))


def test_dumbbell_vs_theta_distinct(db, th):
    assert canonical_form(db.base) != canonical_form(th.base)


def test_leg_swap_automorphism():
    left = CombinatorialCurve(
        vertices={"v1": 0, "v2": 0},
        edges={"L1": ("v1", "v1"), "br": ("v1", "v2"), "L2": ("v2", "v2")},
        legs={"l": "v1"},
    )
    right = CombinatorialCurve(
        vertices={"v1": 0, "v2": 0},
        edges={"L1": ("v1", "v1"), "br": ("v1", "v2"), "L2": ("v2", "v2")},
        legs={"l": "v2"},
    )
    assert canonical_form(left) == canonical_form(right)


def test_vertex_colors_break_symmetry(th):
    plain = canonical_form(th.base)
    colored = canonical_form(th.base, vertex_colors={"v1": 0, "v2": 1})
    same = canonical_form(relabel(th.base, 3), vertex_colors=None)
    assert plain == same
    assert plain != colored


def test_edge_end_colors_distinguish():
    # decorate one theta edge asymmetrically vs symmetrically
    a = canonical_form(theta().base, edge_end_colors={("e1", 0): 2, ("e1", 1): -4})
    b = canonical_form(theta().base, edge_end_colors={("e1", 0): -4, ("e1", 1): 2})
    c = canonical_form(theta().base, edge_end_colors={("e1", 0): -1, ("e1", 1): -1})
    assert a == b  # flipping the edge is an isomorphism
    assert a != c


def test_automorphism_counts():
    # K4 has automorphism group S4
    assert canonize(k4().base).automorphisms == 24
    # theta: swap the vertices x permute 3 edges
    assert canonize(theta().base).automorphisms == 12
    # dumbbell: swap sides x flip each loop
    assert canonize(dumbbell().base).automorphisms == 8


def test_size_limit():
    verts = {f"v{i}": 1 for i in range(17)}
    edges = {f"e{i}": (f"v{i}", f"v{i + 1}") for i in range(16)}
    c = CombinatorialCurve(verts, edges)
    with pytest.raises(SizeLimit):
        canonical_form(c)
    assert canonical_form(c, bound=20)


@st.composite
def random_curve(draw):
    n = draw(st.integers(1, 5))
    verts = {f"v{i}": draw(st.integers(0, 2)) for i in range(n)}
    extra = draw(st.integers(0, 4))
    edges = {}
    # spanning tree to keep it connected
    for i in range(1, n):
        j = draw(st.integers(0, i - 1))
        edges[f"e{len(edges)}"] = (f"v{j}", f"v{i}")
    for _ in range(extra):
        a = draw(st.integers(0, n - 1))
        b = draw(st.integers(0, n - 1))
        edges[f"e{len(edges)}"] = (f"v{a}", f"v{b}")
    nlegs = draw(st.integers(0, 3))
    legs = {f"l{i}": f"v{draw(st.integers(0, n - 1))}" for i in range(nlegs)}
    return CombinatorialCurve(verts, edges, legs)


@settings(max_examples=120, deadline=None)
@given(random_curve(), st.integers(0, 10 ** 6))
def test_relabeling_never_changes_encoding(c, seed):
    assert canonical_form(c) == canonical_form(relabel(c, seed))


@settings(max_examples=60, deadline=None)
@given(random_curve(), random_curve())
def test_encoding_agrees_with_networkx(c1, c2):
    same_enc = canonical_form(c1) == canonical_form(c2)
    assert same_enc == nx_isomorphic(c1, c2)
