import random
from fractions import Fraction

import pytest

from tropcanon.errors import InvalidCurve, InvalidQuery
from tropcanon.graphs import (
    NEITHER,
    SEMISTABLE,
    STABLE,
    CombinatorialCurve,
    CurvePoint,
    MetricCurve,
    blocks,
    edge_on_cycle,
    first_betti,
    genus,
    metric,
    simple_cycle_through_edge,
    simple_cycle_through_vertex,
    stability,
    subdivide,
    suppress,
    suppress_with_map,
    vertex_on_cycle,
)

from curves import dumbbell, k4, theta, two_loops


def path_graph():
    return CombinatorialCurve(
        vertices={"a": 1, "b": 0, "c": 1},
        edges={"ab": ("a", "b"), "bc": ("b", "c")},
    )


# -- betti / genus / stability ---------------------------------------------


def test_first_betti_examples(db):
    assert first_betti(db.base) == 2
    assert first_betti(k4().base) == 3
    single = CombinatorialCurve(vertices={"v": 0}, edges={})
    assert first_betti(single) == 0


def test_genus_examples(db):
    assert genus(db.base) == 2
    assert genus(k4().base) == 3
    one_loop_h2 = CombinatorialCurve(vertices={"v": 2}, edges={"e": ("v", "v")})
    assert genus(one_loop_h2) == 3


def test_stability_examples(db):
    assert stability(db.base) == STABLE
    loop = CombinatorialCurve(vertices={"v": 0}, edges={"e": ("v", "v")})
    assert stability(loop) == SEMISTABLE
    pair = CombinatorialCurve(vertices={"a": 0, "b": 0}, edges={"e": ("a", "b")})
    assert stability(pair) == NEITHER


def test_stability_counts_legs():
    c = CombinatorialCurve(
        vertices={"v": 0}, edges={"e": ("v", "v")}, legs={"l": "v"}
    )
    assert stability(c, count_legs=True) == STABLE
    assert stability(c, count_legs=False) == SEMISTABLE


def test_invalid_curves():
    with pytest.raises(InvalidCurve):
        CombinatorialCurve(vertices={"a": 0, "b": 0}, edges={})  # disconnected
    with pytest.raises(InvalidCurve):
        CombinatorialCurve(vertices={"a": 0}, edges={"e": ("a", "zz")})
    with pytest.raises(InvalidCurve):
        MetricCurve(path_graph(), {"ab": Fraction(1)})  # missing length


# -- subdivision and suppression --------------------------------------------


def test_subdivide_bridge_midpoint():
    m = dumbbell(1, 2, 1)
    sub = subdivide(m, [CurvePoint.inside("br", 1)])
    assert len(sub.curve.base.vertices) == 3
    assert len(sub.curve.base.edges) == 4
    segs = sub.segment_ids["br"]
    assert [sub.curve.length[s] for s in segs] == [Fraction(1), Fraction(1)]
    assert sub.curve.total_length() == m.total_length()


def test_subdivide_loop():
    m = two_loops(3, 1)
    sub = subdivide(m, [CurvePoint.inside("a", 1)])
    segs = sub.segment_ids["a"]
    assert [sub.curve.length[s] for s in segs] == [Fraction(1), Fraction(2)]


def test_subdivide_empty_is_identity(db):
    sub = subdivide(db, [])
    assert sub.curve.base.edges == db.base.edges


def test_subdivide_duplicate_points_collapse(db):
    p = CurvePoint.inside("br", Fraction(1, 2))
    sub = subdivide(db, [p, CurvePoint.inside("br", Fraction(1, 2))])
    assert len(sub.curve.base.vertices) == 3


def test_suppress_round_trip(db):
    sub = subdivide(db, [CurvePoint.inside("br", Fraction(1, 2))])
    back = suppress(sub.curve)
    assert genus(back.base) == 2
    assert len(back.base.vertices) == 2
    assert back.total_length() == db.total_length()


def test_suppress_circle_to_loop():
    verts = {f"v{i}": 0 for i in range(4)}
    edges = {f"e{i}": (f"v{i}", f"v{(i + 1) % 4}") for i in range(4)}
    m = metric(CombinatorialCurve(verts, edges), {e: 1 for e in edges})
    out = suppress(m)
    assert len(out.base.vertices) == 1
    assert len(out.base.edges) == 1
    (e,) = out.base.edges
    assert out.base.is_loop(e)
    assert out.length[e] == 4


def test_suppress_already_minimal(db):
    out = suppress(db)
    assert out.base.edges.keys() == db.base.edges.keys()


def test_suppress_point_map_offsets():
    m = dumbbell(1, 4, 1)
    sub = subdivide(m, [CurvePoint.inside("br", 1), CurvePoint.inside("br", 3)])
    sup = suppress_with_map(sub.curve)
    # a point at offset 1/2 inside the middle segment maps to br offset 3/2
    mid = sub.segment_ids["br"][1]
    p = sup.map_point(CurvePoint.inside(mid, Fraction(1, 2)))
    assert not p.is_vertex and p.offset == Fraction(3, 2)
    q = sup.map_point(CurvePoint.at_vertex(sub.cut_vertex["br"][Fraction(3)]))
    assert q.offset == Fraction(3)
    # unmapping goes back
    assert sup.unmap_point(q) == CurvePoint.at_vertex(sub.cut_vertex["br"][Fraction(3)])
    assert sup.unmap_point(p) == CurvePoint.inside(mid, Fraction(1, 2))


def test_genus_invariant_under_subdivision(db):
    random.seed(7)
    pts = [CurvePoint.inside("L1", Fraction(1, 3)), CurvePoint.inside("br", Fraction(2, 5))]
    sub = subdivide(db, pts)
    assert genus(sub.curve.base) == genus(db.base)
    assert genus(suppress(sub.curve).base) == genus(db.base)


# -- blocks, bridges, cycles -------------------------------------------------


def test_blocks_dumbbell(db):
    dec = blocks(db.base)
    assert dec.bridges == frozenset({"br"})
    # removing either vertex leaves the other loop component connected
    assert dec.cut_vertices == frozenset()
    assert sorted(map(set, dec.blocks), key=sorted) == [{"L1"}, {"L2"}, {"br"}]


def test_cut_vertex_on_path():
    dec = blocks(path_graph())
    assert dec.cut_vertices == frozenset({"b"})
    assert dec.bridges == frozenset({"ab", "bc"})


def test_blocks_k4():
    dec = blocks(k4().base)
    assert dec.bridges == frozenset()
    assert len(dec.blocks) == 1 and dec.blocks[0] == frozenset(k4().base.edges)


def test_blocks_loop_not_bridge(db):
    dec = blocks(db.base, keep=lambda v: v == "v1")
    assert dec.bridges == frozenset()
    assert dec.blocks == (frozenset({"L1"}),)


def test_blocks_partition_edges():
    for m in (dumbbell(), theta(), k4(), two_loops()):
        dec = blocks(m.base)
        all_edges = [e for blk in dec.blocks for e in blk]
        assert sorted(all_edges) == sorted(m.base.edges)
        for blk in dec.blocks:
            for e in blk:
                is_single_nonloop = len(blk) == 1 and not m.base.is_loop(e)
                assert (e in dec.bridges) == is_single_nonloop


def test_vertex_on_cycle(db):
    assert vertex_on_cycle(db.base, "v1")
    assert not vertex_on_cycle(path_graph(), "b")
    assert vertex_on_cycle(k4().base, "v3")
    with pytest.raises(InvalidQuery):
        vertex_on_cycle(db.base, "v1", keep=lambda v: v == "v2")


def test_edge_on_cycle(db):
    assert not edge_on_cycle(db.base, "br")
    assert edge_on_cycle(theta().base, "e2")
    assert edge_on_cycle(db.base, "L1")
    with pytest.raises(InvalidQuery):
        edge_on_cycle(db.base, "br", keep=lambda v: v == "v1")


def test_edge_implies_vertex_on_cycle():
    for m in (dumbbell(), theta(), k4()):
        dec = blocks(m.base)
        for e, (a, b) in m.base.edges.items():
            if edge_on_cycle(m.base, e):
                assert vertex_on_cycle(m.base, a)
                assert vertex_on_cycle(m.base, b)


def test_cycle_witnesses():
    cyc = simple_cycle_through_edge(theta().base, "e1")
    assert cyc and "e1" in cyc and len(cyc) == 2
    assert simple_cycle_through_edge(dumbbell().base, "br") is None
    assert simple_cycle_through_edge(dumbbell().base, "L1") == ["L1"]
    assert simple_cycle_through_vertex(dumbbell().base, "v1") == ["L1"]
    v_cyc = simple_cycle_through_vertex(k4().base, "v2")
    assert v_cyc and len(v_cyc) >= 3
