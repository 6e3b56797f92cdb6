"""Combinatorial and metric graph substrate.

Curves are finite connected multigraphs with loops, nonnegative integer
vertex weights and legs (infinite half-edges).  Every edge consists of two
half-edges ``(edge_id, 0)`` and ``(edge_id, 1)``; half-edge ``(e, i)`` sits at
``edges[e][i]``.  A loop contributes two distinct half-edges at the same
vertex and its traversal orientation runs from end 0 to end 1, which makes
interior offsets on loops unambiguous.

All lengths and offsets are ``Fraction``; nothing in this package touches
floating point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional

from .errors import InvalidCurve, InvalidQuery

HalfEdge = tuple[str, int]

STABLE = "stable"
SEMISTABLE = "semistable"
NEITHER = "neither"


@dataclass(frozen=True)
class CurvePoint:
    """A point of the metric realization: a vertex or an edge-interior point."""

    vertex: Optional[str] = None
    edge: Optional[str] = None
    offset: Optional[Fraction] = None

    @staticmethod
    def at_vertex(v: str) -> "CurvePoint":
        return CurvePoint(vertex=v)

    @staticmethod
    def inside(edge: str, offset) -> "CurvePoint":
        off = Fraction(offset)
        if off <= 0:
            raise InvalidCurve(f"interior offset must be positive, got {off}")
        return CurvePoint(edge=edge, offset=off)

    @property
    def is_vertex(self) -> bool:
        return self.vertex is not None

    def __repr__(self) -> str:
        if self.is_vertex:
            return f"Pt({self.vertex})"
        return f"Pt({self.edge}@{self.offset})"


@dataclass(frozen=True)
class CombinatorialCurve:
    """Connected multigraph with genus weights and legs."""

    vertices: Mapping[str, int]            # vertex id -> genus h >= 0
    edges: Mapping[str, tuple[str, str]]   # edge id -> (end0, end1)
    legs: Mapping[str, str] = field(default_factory=dict)  # leg id -> vertex

    def __post_init__(self):
        if not self.vertices:
            raise InvalidCurve("curve needs at least one vertex")
        for v, h in self.vertices.items():
            if h < 0:
                raise InvalidCurve(f"vertex {v} has negative genus")
        for e, (a, b) in self.edges.items():
            if a not in self.vertices or b not in self.vertices:
                raise InvalidCurve(f"edge {e} references unknown vertex")
        for l, v in self.legs.items():
            if v not in self.vertices:
                raise InvalidCurve(f"leg {l} references unknown vertex")
        if set(self.edges) & set(self.legs):
            raise InvalidCurve("edge ids and leg ids must be distinct")
        if not self._connected():
            raise InvalidCurve("curve must be connected")

    def _connected(self) -> bool:
        verts = list(self.vertices)
        seen = {verts[0]}
        stack = [verts[0]]
        adj: dict[str, list[str]] = {v: [] for v in verts}
        for a, b in self.edges.values():
            adj[a].append(b)
            adj[b].append(a)
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(verts)

    # -- basic structure ---------------------------------------------------

    def half_edges_at(self, v: str) -> list[HalfEdge]:
        out = []
        for e, (a, b) in self.edges.items():
            if a == v:
                out.append((e, 0))
            if b == v:
                out.append((e, 1))
        return out

    def legs_at(self, v: str) -> list[str]:
        return [l for l, w in self.legs.items() if w == v]

    def valence(self, v: str, count_legs: bool = False) -> int:
        val = len(self.half_edges_at(v))
        if count_legs:
            val += len(self.legs_at(v))
        return val

    def is_loop(self, e: str) -> bool:
        a, b = self.edges[e]
        return a == b

    def other_end(self, e: str, v: str) -> str:
        a, b = self.edges[e]
        if a == v:
            return b
        if b == v:
            return a
        raise InvalidQuery(f"vertex {v} not on edge {e}")


def first_betti(c: CombinatorialCurve) -> int:
    return len(c.edges) - len(c.vertices) + 1


def genus(c: CombinatorialCurve) -> int:
    return first_betti(c) + sum(c.vertices.values())


def stability(c: CombinatorialCurve, count_legs: bool = True) -> str:
    """Classify as stable / semistable / neither.

    A vertex needs 2h(v) - 2 + |v| > 0 (>= 0 for semistable); loops count
    twice in the valency and legs count once when ``count_legs``.
    """
    worst = None
    for v, h in c.vertices.items():
        excess = 2 * h - 2 + c.valence(v, count_legs=count_legs)
        worst = excess if worst is None else min(worst, excess)
    if worst is None or worst > 0:
        return STABLE
    return SEMISTABLE if worst == 0 else NEITHER


@dataclass(frozen=True)
class MetricCurve:
    base: CombinatorialCurve
    length: Mapping[str, Fraction]  # edge id -> positive length

    def __post_init__(self):
        for e in self.base.edges:
            le = self.length.get(e)
            if le is None or le <= 0:
                raise InvalidCurve(f"edge {e} needs a positive length")

    def point_on(self, p: CurvePoint) -> bool:
        if p.is_vertex:
            return p.vertex in self.base.vertices
        return p.edge in self.base.edges and 0 < p.offset < self.length[p.edge]

    def total_length(self) -> Fraction:
        return sum(self.length.values(), Fraction(0))


def metric(c: CombinatorialCurve, lengths: Mapping[str, object]) -> MetricCurve:
    return MetricCurve(c, {e: Fraction(l) for e, l in lengths.items()})


# -- subdivision ----------------------------------------------------------


def _fresh(base: str, taken: set[str]) -> str:
    name = base
    while name in taken:
        name += "'"
    taken.add(name)
    return name


@dataclass(frozen=True)
class Subdivision:
    """A refinement of ``coarse`` at a set of interior points.

    ``cuts`` maps each coarse edge to its ordered interior offsets; segment i
    of edge e is called ``segment_ids[e][i]`` and runs between consecutive cut
    points (offsets measured from end 0 of e).  ``vertex_point`` maps every
    fine vertex to the coarse point it realizes.
    """

    coarse: MetricCurve
    curve: MetricCurve
    cuts: Mapping[str, tuple[Fraction, ...]]
    cut_vertex: Mapping[str, Mapping[Fraction, str]]
    segment_ids: Mapping[str, tuple[str, ...]]
    vertex_point: Mapping[str, CurvePoint]

    def vertex_at(self, p: CurvePoint) -> str:
        if p.is_vertex:
            return p.vertex
        v = self.cut_vertex.get(p.edge, {}).get(p.offset)
        if v is None:
            raise InvalidQuery(f"{p} is not a subdivision vertex")
        return v

    def locate(self, p: CurvePoint) -> CurvePoint:
        """Express a coarse point in fine coordinates."""
        if p.is_vertex:
            return p
        offs = self.cuts.get(p.edge, ())
        if p.offset in offs:
            return CurvePoint.at_vertex(self.cut_vertex[p.edge][p.offset])
        start = Fraction(0)
        for i, cut in enumerate(offs):
            if p.offset < cut:
                return CurvePoint.inside(self.segment_ids[p.edge][i], p.offset - start)
            start = cut
        return CurvePoint.inside(self.segment_ids[p.edge][len(offs)], p.offset - start)


def subdivide(m: MetricCurve, points: Iterable[CurvePoint]) -> Subdivision:
    """Insert a genus-0 vertex at each listed interior point.

    Duplicate offsets collapse to a single vertex; per-edge lengths are
    preserved.  Vertex points are allowed and ignored.
    """
    by_edge: dict[str, set[Fraction]] = {}
    for p in points:
        if p.is_vertex:
            continue
        if not m.point_on(p):
            raise InvalidQuery(f"{p} is not an interior point of the curve")
        by_edge.setdefault(p.edge, set()).add(p.offset)

    taken = set(m.base.vertices) | set(m.base.edges) | set(m.base.legs)
    vertices = dict(m.base.vertices)
    edges: dict[str, tuple[str, str]] = {}
    lengths: dict[str, Fraction] = {}
    cuts: dict[str, tuple[Fraction, ...]] = {}
    cut_vertex: dict[str, dict[Fraction, str]] = {}
    segment_ids: dict[str, tuple[str, ...]] = {}
    vertex_point: dict[str, CurvePoint] = {v: CurvePoint.at_vertex(v) for v in m.base.vertices}

    for e, (a, b) in m.base.edges.items():
        offs = tuple(sorted(by_edge.get(e, ())))
        if not offs:
            edges[e] = (a, b)
            lengths[e] = m.length[e]
            cuts[e] = ()
            cut_vertex[e] = {}
            segment_ids[e] = (e,)
            continue
        cuts[e] = offs
        cut_vertex[e] = {}
        chain = [a]
        for off in offs:
            name = _fresh(f"{e}@{off.numerator}/{off.denominator}", taken)
            vertices[name] = 0
            cut_vertex[e][off] = name
            vertex_point[name] = CurvePoint.inside(e, off)
            chain.append(name)
        chain.append(b)
        seg_names = []
        bounds = (Fraction(0),) + offs + (m.length[e],)
        for i in range(len(chain) - 1):
            seg = _fresh(f"{e}:{i}", taken)
            seg_names.append(seg)
            edges[seg] = (chain[i], chain[i + 1])
            lengths[seg] = bounds[i + 1] - bounds[i]
        segment_ids[e] = tuple(seg_names)

    fine = MetricCurve(CombinatorialCurve(vertices, edges, dict(m.base.legs)), lengths)
    return Subdivision(m, fine, cuts, cut_vertex, segment_ids, vertex_point)


# -- suppression ----------------------------------------------------------


@dataclass(frozen=True)
class Suppression:
    """Minimal model obtained by removing 2-valent genus-0 leg-free vertices."""

    original: MetricCurve
    curve: MetricCurve
    _point_map: Callable[[CurvePoint], CurvePoint]
    _point_unmap: Callable[[CurvePoint], CurvePoint]

    def map_point(self, p: CurvePoint) -> CurvePoint:
        """Address of an original point on the minimal model."""
        return self._point_map(p)

    def unmap_point(self, p: CurvePoint) -> CurvePoint:
        """Address of a minimal-model point on the original curve."""
        return self._point_unmap(p)


def suppress_with_map(m: MetricCurve) -> Suppression:
    vertices = dict(m.base.vertices)
    edges = dict(m.base.edges)
    lengths = dict(m.length)
    legs = dict(m.base.legs)
    taken = set(vertices) | set(edges) | set(legs)
    # Each step rewrites points; compose the per-step maps.
    steps: list[tuple[str, str, str, str, Fraction, bool, bool]] = []
    # (removed vertex, e1, e2, new edge, len1, flip1, flip2)

    def removable() -> Optional[str]:
        legged = set(legs.values())
        for v in sorted(vertices):
            if vertices[v] != 0 or v in legged:
                continue
            halves = [(e, i) for e, (a, b) in edges.items() for i, x in enumerate((a, b)) if x == v]
            if len(halves) != 2:
                continue
            if halves[0][0] == halves[1][0]:
                continue  # a bare loop vertex stays
            return v
        return None

    while True:
        v = removable()
        if v is None:
            break
        (e1, i1), (e2, i2) = sorted(
            (e, i) for e, (a, b) in edges.items() for i, x in enumerate((a, b)) if x == v
        )
        a = edges[e1][1 - i1]
        b = edges[e2][1 - i2]
        # New edge runs a -> v -> b; flip flags say whether each old edge
        # needs its offsets reversed to follow that direction.
        flip1 = i1 == 0   # e1 oriented v->a means reversed along a->v
        flip2 = i2 == 1
        new_e = _fresh(f"{e1}+{e2}", taken)
        len1, len2 = lengths[e1], lengths[e2]
        steps.append((v, e1, e2, new_e, len1, flip1, flip2))
        del edges[e1], edges[e2], lengths[e1], lengths[e2], vertices[v]
        edges[new_e] = (a, b)
        lengths[new_e] = len1 + len2

    # e2 lengths per step, for offset shifts (the lengths dict was mutated).
    step_len2: dict[tuple[str, str], Fraction] = {}
    replay_len: dict[str, Fraction] = dict(m.length)
    for v, e1, e2, new_e, len1, flip1, flip2 in steps:
        step_len2[(v, new_e)] = replay_len[e2]
        replay_len[new_e] = replay_len[e1] + replay_len[e2]

    def mapper(p: CurvePoint) -> CurvePoint:
        cur = p
        for v, e1, e2, new_e, len1, flip1, flip2 in steps:
            if cur.is_vertex:
                if cur.vertex == v:
                    cur = CurvePoint.inside(new_e, len1)
                continue
            if cur.edge == e1:
                off = (len1 - cur.offset) if flip1 else cur.offset
                cur = CurvePoint.inside(new_e, off)
            elif cur.edge == e2:
                len2 = step_len2[(v, new_e)]
                off = (len2 - cur.offset) if flip2 else cur.offset
                cur = CurvePoint.inside(new_e, len1 + off)
        return cur

    def unmapper(p: CurvePoint) -> CurvePoint:
        cur = p
        for v, e1, e2, new_e, len1, flip1, flip2 in reversed(steps):
            if cur.is_vertex or cur.edge != new_e:
                continue
            len2 = step_len2[(v, new_e)]
            if cur.offset == len1:
                cur = CurvePoint.at_vertex(v)
            elif cur.offset < len1:
                off = (len1 - cur.offset) if flip1 else cur.offset
                cur = CurvePoint.inside(e1, off)
            else:
                off = cur.offset - len1
                cur = CurvePoint.inside(e2, (len2 - off) if flip2 else off)
        return cur

    minimal = MetricCurve(CombinatorialCurve(vertices, edges, legs), lengths)
    return Suppression(m, minimal, mapper, unmapper)


def suppress(m: MetricCurve) -> MetricCurve:
    return suppress_with_map(m).curve


# -- connectivity: bridges, blocks, cut vertices ---------------------------


@dataclass(frozen=True)
class BlockDecomposition:
    bridges: frozenset[str]
    blocks: tuple[frozenset[str], ...]   # partition of the kept edge set
    cut_vertices: frozenset[str]


def blocks(c: CombinatorialCurve, keep: Callable[[str], bool] = lambda v: True) -> BlockDecomposition:
    """Bridges / biconnected blocks / cut vertices of the induced subgraph.

    Only edges with both endpoints kept are considered.  Loops form their own
    single-edge blocks and are never bridges; parallel edges form nontrivial
    blocks as usual.
    """
    kept_vertices = [v for v in c.vertices if keep(v)]
    kept = set(kept_vertices)
    loops: list[str] = []
    adj: dict[str, list[tuple[str, str]]] = {v: [] for v in kept_vertices}
    for e, (a, b) in c.edges.items():
        if a not in kept or b not in kept:
            continue
        if a == b:
            loops.append(e)
            continue
        adj[a].append((e, b))
        adj[b].append((e, a))

    disc: dict[str, int] = {}
    low: dict[str, int] = {}
    bridges: set[str] = set()
    cut: set[str] = set()
    comp_blocks: list[frozenset[str]] = []
    counter = itertools.count()
    estack: list[str] = []

    for root in kept_vertices:
        if root in disc:
            continue
        root_children = 0
        stack: list[tuple[str, Optional[str], int]] = [(root, None, 0)]
        disc[root] = low[root] = next(counter)
        iters: dict[str, int] = {root: 0}
        parents: dict[str, tuple[Optional[str], Optional[str]]] = {root: (None, None)}
        while stack:
            v, via_edge, _ = stack[-1]
            i = iters[v]
            if i < len(adj[v]):
                iters[v] += 1
                e, w = adj[v][i]
                if e == via_edge:
                    continue
                if w not in disc:
                    disc[w] = low[w] = next(counter)
                    iters[w] = 0
                    parents[w] = (v, e)
                    estack.append(e)
                    stack.append((w, e, 0))
                    if v == root:
                        root_children += 1
                elif disc[w] < disc[v]:
                    estack.append(e)
                    low[v] = min(low[v], disc[w])
            else:
                stack.pop()
                pv, pe = parents[v]
                if pv is not None:
                    low[pv] = min(low[pv], low[v])
                    if low[v] >= disc[pv]:
                        if pv != root or root_children > 1:
                            cut.add(pv)
                        block: set[str] = set()
                        while estack:
                            top = estack.pop()
                            block.add(top)
                            if top == pe:
                                break
                        comp_blocks.append(frozenset(block))
                    if low[v] > disc[pv]:
                        bridges.add(pe)
        # leftover edges (shouldn't happen; every tree edge closes a block)
        if estack:
            comp_blocks.append(frozenset(estack))
            estack.clear()

    for e in loops:
        comp_blocks.append(frozenset({e}))
    return BlockDecomposition(frozenset(bridges), tuple(comp_blocks), frozenset(cut))


def vertex_on_cycle(c: CombinatorialCurve, v: str, keep: Callable[[str], bool] = lambda v: True) -> bool:
    """Whether v lies on a simple cycle of the induced subgraph.

    Loops count as 1-cycles.  Equivalent block formulation: some block at v
    is not a single bridge edge.
    """
    if not keep(v):
        raise InvalidQuery(f"vertex {v} is excluded by the predicate")
    dec = blocks(c, keep)
    for e, (a, b) in c.edges.items():
        if a != v and b != v:
            continue
        if not (keep(a) and keep(b)):
            continue
        if a == b or e not in dec.bridges:
            return True
    return False


def edge_on_cycle(c: CombinatorialCurve, e: str, keep: Callable[[str], bool] = lambda v: True) -> bool:
    a, b = c.edges[e]
    if not (keep(a) and keep(b)):
        raise InvalidQuery(f"edge {e} has an excluded endpoint")
    if a == b:
        return True
    return e not in blocks(c, keep).bridges


def simple_cycle_through_edge(
    c: CombinatorialCurve, e: str, keep: Callable[[str], bool] = lambda v: True
) -> Optional[list[str]]:
    """A simple cycle (edge list) through e in the induced subgraph, or None."""
    a, b = c.edges[e]
    if not (keep(a) and keep(b)):
        raise InvalidQuery(f"edge {e} has an excluded endpoint")
    if a == b:
        return [e]
    # BFS from a to b avoiding e itself.
    prev: dict[str, tuple[str, str]] = {}
    seen = {a}
    queue = [a]
    while queue:
        v = queue.pop(0)
        if v == b:
            break
        for e2, (x, y) in c.edges.items():
            if e2 == e or x == y:
                continue
            for s, t in ((x, y), (y, x)):
                if s == v and keep(t) and t not in seen:
                    seen.add(t)
                    prev[t] = (v, e2)
                    queue.append(t)
    if b not in seen:
        return None
    path = []
    v = b
    while v != a:
        v, e2 = prev[v]
        path.append(e2)
    return [e] + path[::-1]


def simple_cycle_through_vertex(
    c: CombinatorialCurve, v: str, keep: Callable[[str], bool] = lambda v: True
) -> Optional[list[str]]:
    if not keep(v):
        raise InvalidQuery(f"vertex {v} is excluded by the predicate")
    dec = blocks(c, keep)
    for e, (a, b) in sorted(c.edges.items()):
        if v not in (a, b) or not (keep(a) and keep(b)):
            continue
        if a == b:
            return [e]
        if e not in dec.bridges:
            return simple_cycle_through_edge(c, e, keep)
    return None
