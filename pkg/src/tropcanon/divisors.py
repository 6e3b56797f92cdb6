"""Divisors, rational functions and the canonical linear system.

A rational function is stored by its values at the vertices of a refinement
model; slopes are integral on every model edge by invariant.  Solving
``K + div(f) = D`` reduces, once the support of D fixes the slope jumps, to a
single exact linear system in the initial slopes (one unknown per edge of the
minimal model): vertex balance plus cycle consistency has trivial kernel, so
the solution, when it exists, is unique and is verified independently by
recomputing orders from the assembled values.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

from . import linalg
from .errors import InvalidCurve, InvalidQuery, NonEffective, NotStable, SlopeBoundExceeded
from .graphs import (
    STABLE,
    CombinatorialCurve,
    CurvePoint,
    MetricCurve,
    Subdivision,
    first_betti,
    genus,
    stability,
    subdivide,
    suppress_with_map,
)


@dataclass(frozen=True)
class Divisor:
    ambient: MetricCurve
    coeffs: Mapping[CurvePoint, int]

    def __post_init__(self):
        clean = {p: c for p, c in self.coeffs.items() if c != 0}
        for p in clean:
            if not self.ambient.point_on(p):
                raise InvalidQuery(f"{p} does not lie on the curve")
        object.__setattr__(self, "coeffs", clean)

    @property
    def degree(self) -> int:
        return sum(self.coeffs.values())

    @property
    def is_effective(self) -> bool:
        return all(c > 0 for c in self.coeffs.values())

    def at(self, p: CurvePoint) -> int:
        return self.coeffs.get(p, 0)

    def __add__(self, other: "Divisor") -> "Divisor":
        coeffs = dict(self.coeffs)
        for p, c in other.coeffs.items():
            coeffs[p] = coeffs.get(p, 0) + c
        return Divisor(self.ambient, coeffs)

    def __repr__(self) -> str:
        terms = " + ".join(f"{c}*{p}" for p, c in sorted(self.coeffs.items(), key=repr))
        return f"Div({terms or '0'})"


def divisor(m: MetricCurve, coeffs: Mapping[CurvePoint, int]) -> Divisor:
    return Divisor(m, dict(coeffs))


def canonical_divisor(m: MetricCurve) -> Divisor:
    """K = sum (2h(v) + |v| - 2) v; loops count twice.  Degree 2g - 2."""
    if m.base.legs:
        raise InvalidCurve("canonical divisor is defined for curves without legs")
    coeffs = {
        CurvePoint.at_vertex(v): 2 * h - 2 + m.base.valence(v)
        for v, h in m.base.vertices.items()
    }
    return Divisor(m, coeffs)


@dataclass(frozen=True)
class DivisorType:
    """Nonincreasing integer tuple with the usual zero/pole counts."""

    entries: tuple[int, ...]

    @staticmethod
    def of(values: Iterable[int]) -> "DivisorType":
        return DivisorType(tuple(sorted(values, reverse=True)))

    @property
    def r(self) -> int:
        return sum(1 for m in self.entries if m > 0)

    @property
    def s(self) -> int:
        return sum(1 for m in self.entries if m == 0)

    @property
    def p(self) -> int:
        return sum(1 for m in self.entries if m < 0)

    @property
    def p1(self) -> int:
        return sum(1 for m in self.entries if m == -1)

    @property
    def pole_sum(self) -> int:
        return sum(-m for m in self.entries if m < 0)

    def __repr__(self) -> str:
        return f"type{self.entries}"


def type_of(D: Divisor, f: Optional["RationalFunction"] = None) -> DivisorType:
    if not D.is_effective:
        raise NonEffective("divisor type is defined for effective divisors")
    return DivisorType.of(D.coeffs.values())


@dataclass(frozen=True)
class RationalFunction:
    """Piecewise affine with integer slopes, stored on a refinement model."""

    ambient: MetricCurve
    sub: Subdivision                 # model = sub.curve, refinement of ambient
    values: Mapping[str, Fraction]   # model vertex -> value

    def __post_init__(self):
        model = self.sub.curve
        for v in model.base.vertices:
            if v not in self.values:
                raise InvalidQuery(f"no value for model vertex {v}")
        for e, (a, b) in model.base.edges.items():
            diff = self.values[b] - self.values[a]
            if diff % model.length[e] != 0:
                raise InvalidQuery(f"non-integer slope on model edge {e}")

    @property
    def model(self) -> MetricCurve:
        return self.sub.curve

    def slope_from(self, e: str, end: int) -> int:
        """Outgoing slope of the model edge e seen from its given end."""
        a, b = self.model.base.edges[e]
        diff = self.values[b] - self.values[a]
        s = diff / self.model.length[e]
        return int(s) if end == 0 else int(-s)

    def value_at(self, p: CurvePoint) -> Fraction:
        if p.is_vertex:
            return self.values[p.vertex]
        loc = self.sub.locate(p)
        if loc.is_vertex:
            return self.values[loc.vertex]
        a, b = self.model.base.edges[loc.edge]
        frac = loc.offset / self.model.length[loc.edge]
        return self.values[a] + (self.values[b] - self.values[a]) * frac

    def order_at(self, p: CurvePoint) -> int:
        """Sum of outgoing slopes at p; zero where f is affine."""
        if not self.ambient.point_on(p):
            raise InvalidQuery(f"{p} does not lie on the curve")
        loc = p if p.is_vertex else self.sub.locate(p)
        if not loc.is_vertex:
            return 0
        v = loc.vertex
        return sum(self.slope_from(e, i) for e, i in self.model.base.half_edges_at(v))

    def orders(self) -> dict[str, int]:
        """Nonzero orders at model vertices."""
        out = {}
        for v in self.model.base.vertices:
            o = sum(self.slope_from(e, i) for e, i in self.model.base.half_edges_at(v))
            if o:
                out[v] = o
        return out

    def normalized(self) -> "RationalFunction":
        top = max(self.values.values())
        return RationalFunction(self.ambient, self.sub, {v: x - top for v, x in self.values.items()})


def divisor_of(f: RationalFunction) -> Divisor:
    coeffs = {f.sub.vertex_point[v]: o for v, o in f.orders().items()}
    return Divisor(f.ambient, coeffs)


def function_from_values(m: MetricCurve, values: Mapping[CurvePoint, object]) -> RationalFunction:
    """Build f from values at all vertices plus any interior breakpoints."""
    interior = [p for p in values if not p.is_vertex]
    sub = subdivide(m, interior)
    vals: dict[str, Fraction] = {}
    for p, x in values.items():
        vals[sub.vertex_at(p)] = Fraction(x)
    return RationalFunction(m, sub, vals)


def constant_function(m: MetricCurve, value=0) -> RationalFunction:
    return function_from_values(
        m, {CurvePoint.at_vertex(v): Fraction(value) for v in m.base.vertices}
    )


def pl_equal(f: RationalFunction, g: RationalFunction) -> bool:
    """Equality of two functions on the same ambient curve."""
    if f.ambient.base.edges.keys() != g.ambient.base.edges.keys():
        return False
    probes: set[CurvePoint] = {CurvePoint.at_vertex(v) for v in f.ambient.base.vertices}
    for fn in (f, g):
        for v, p in fn.sub.vertex_point.items():
            probes.add(p)
    return all(f.value_at(p) == g.value_at(p) for p in probes)


@dataclass(frozen=True)
class NotEquivalent:
    reason: str = ""

    def __bool__(self) -> bool:
        return False


# -- solving K + div(f) = D -------------------------------------------------


@dataclass(frozen=True)
class _EdgeChain:
    """Slope profile along one minimal edge: initial slope + interior jumps."""

    offsets: tuple[Fraction, ...]   # strictly increasing interior offsets
    jumps: tuple[int, ...]          # positive multiplicities at the offsets

    def cumulative(self) -> tuple[int, ...]:
        out = [0]
        for j in self.jumps:
            out.append(out[-1] + j)
        return tuple(out)


def _chains_from_divisor(minimal: MetricCurve, D: Mapping[CurvePoint, int]) -> dict[str, _EdgeChain]:
    per_edge: dict[str, list[tuple[Fraction, int]]] = {e: [] for e in minimal.base.edges}
    for p, c in D.items():
        if not p.is_vertex:
            per_edge[p.edge].append((p.offset, c))
    chains = {}
    for e, pts in per_edge.items():
        pts.sort()
        chains[e] = _EdgeChain(tuple(o for o, _ in pts), tuple(c for _, c in pts))
    return chains


def _spanning_tree(c: CombinatorialCurve) -> tuple[set[str], list[str]]:
    """(tree edge set, chord list) over non-loop edges; loops are chords."""
    root = sorted(c.vertices)[0]
    seen = {root}
    tree: set[str] = set()
    frontier = [root]
    adj: dict[str, list[tuple[str, str]]] = {v: [] for v in c.vertices}
    for e, (a, b) in sorted(c.edges.items()):
        if a != b:
            adj[a].append((e, b))
            adj[b].append((e, a))
    while frontier:
        v = frontier.pop(0)
        for e, w in adj[v]:
            if w not in seen:
                seen.add(w)
                tree.add(e)
                frontier.append(w)
    chords = [e for e in sorted(c.edges) if e not in tree]
    return tree, chords


def _tree_path(c: CombinatorialCurve, tree: set[str], src: str, dst: str) -> list[tuple[str, int]]:
    """Edges (id, +1/-1 forward flag) along the tree path src -> dst."""
    if src == dst:
        return []
    prev: dict[str, tuple[str, str, int]] = {}
    seen = {src}
    queue = [src]
    while queue:
        v = queue.pop(0)
        for e in tree:
            a, b = c.edges[e]
            for s, t, sign in ((a, b, 1), (b, a, -1)):
                if s == v and t not in seen:
                    seen.add(t)
                    prev[t] = (v, e, sign)
                    queue.append(t)
        if dst in seen:
            break
    path = []
    v = dst
    while v != src:
        u, e, sign = prev[v]
        path.append((e, sign))
        v = u
    return path[::-1]


def _integral(minimal: MetricCurve, e: str, t0, chain: _EdgeChain) -> Fraction:
    """Integral of the slope along e traversed end0 -> end1."""
    cum = chain.cumulative()
    bounds = (Fraction(0),) + chain.offsets + (minimal.length[e],)
    total = Fraction(0)
    for i in range(len(bounds) - 1):
        total += (Fraction(t0) + cum[i]) * (bounds[i + 1] - bounds[i])
    return total


def _assemble(minimal: MetricCurve, t0: Mapping[str, int], chains: Mapping[str, _EdgeChain]) -> RationalFunction:
    """Integrate the slope data into a RationalFunction on the minimal model."""
    points = [CurvePoint.inside(e, off) for e, ch in chains.items() for off in ch.offsets]
    sub = subdivide(minimal, points)
    tree, _ = _spanning_tree(minimal.base)
    root = sorted(minimal.base.vertices)[0]
    vals: dict[str, Fraction] = {root: Fraction(0)}
    frontier = [root]
    while frontier:
        v = frontier.pop(0)
        for e in tree:
            a, b = minimal.base.edges[e]
            integ = _integral(minimal, e, t0[e], chains[e])
            if a == v and b not in vals:
                vals[b] = vals[v] + integ
                frontier.append(b)
            elif b == v and a not in vals:
                vals[a] = vals[v] - integ
                frontier.append(a)
    model_vals: dict[str, Fraction] = {v: vals[v] for v in minimal.base.vertices}
    for e, ch in chains.items():
        a, _ = minimal.base.edges[e]
        cum = ch.cumulative()
        bounds = (Fraction(0),) + ch.offsets
        acc = vals[a]
        for i, off in enumerate(ch.offsets):
            acc += (Fraction(t0[e]) + cum[i]) * (bounds[i + 1] - bounds[i])
            model_vals[sub.cut_vertex[e][off]] = acc
    return RationalFunction(minimal, sub, model_vals)


def default_slope_bound(g: int) -> int:
    return max(2 * g - 2, 0)


def solve_function(
    m: MetricCurve, D: Divisor, bound: Optional[int] = None
) -> Union[RationalFunction, NotEquivalent]:
    """Find f with K + div(f) = D, or decide D is not in |K|.

    The answer is normalized to max value 0 and verified by recomputing
    K + div(f) from the assembled vertex values.
    """
    if not D.is_effective:
        raise NonEffective("solve_function expects an effective divisor")
    g = genus(m.base)
    if D.degree != 2 * g - 2:
        return NotEquivalent(f"degree {D.degree} != 2g-2 = {2 * g - 2}")
    B = default_slope_bound(g) if bound is None else bound

    sup = suppress_with_map(m)
    minimal = sup.curve
    dmin: dict[CurvePoint, int] = {}
    for p, c in D.coeffs.items():
        q = sup.map_point(p)
        dmin[q] = dmin.get(q, 0) + c
    chains = _chains_from_divisor(minimal, dmin)

    edges = sorted(minimal.base.edges)
    eidx = {e: i for i, e in enumerate(edges)}
    K = canonical_divisor(minimal)
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []

    # Vertex balance: sum of outgoing slopes = D(v) - K(v).
    for v in sorted(minimal.base.vertices):
        row = [Fraction(0)] * len(edges)
        const = Fraction(0)
        for e, end in minimal.base.half_edges_at(v):
            if end == 0:
                row[eidx[e]] += 1
            else:
                row[eidx[e]] -= 1
                const -= chains[e].cumulative()[-1]
        dv = dmin.get(CurvePoint.at_vertex(v), 0)
        kv = K.at(CurvePoint.at_vertex(v))
        rows.append(row)
        rhs.append(Fraction(dv - kv) - const)

    # Cycle consistency: the integral around every fundamental cycle vanishes.
    tree, chords = _spanning_tree(minimal.base)
    for ch in chords:
        a, b = minimal.base.edges[ch]
        row = [Fraction(0)] * len(edges)
        const = Fraction(0)
        row[eidx[ch]] += minimal.length[ch]
        const += _integral(minimal, ch, 0, chains[ch])
        for e, sign in _tree_path(minimal.base, tree, b, a):
            row[eidx[e]] += sign * minimal.length[e]
            const += sign * _integral(minimal, e, 0, chains[e])
        rows.append(row)
        rhs.append(-const)

    sol = linalg.solve_unique(rows, rhs)
    if sol is None:
        return NotEquivalent("slope system has no solution")
    t0: dict[str, int] = {}
    for e in edges:
        x = sol[eidx[e]]
        if x.denominator != 1:
            return NotEquivalent(f"initial slope on {e} is not an integer ({x})")
        t0[e] = int(x)
    for e in edges:
        for s in (t0[e] + c for c in chains[e].cumulative()):
            if abs(s) > B:
                raise SlopeBoundExceeded(
                    f"slope {s} on edge {e} exceeds the configured bound {B}"
                )

    f_min = _assemble(minimal, t0, chains)

    # Express f on the ambient curve (refined at the divisor's own points).
    interior = [p for p in D.coeffs if not p.is_vertex]
    amb_sub = subdivide(m, interior)
    vals = {
        v: f_min.value_at(sup.map_point(pt))
        for v, pt in amb_sub.vertex_point.items()
    }
    f = RationalFunction(m, amb_sub, vals).normalized()

    check = canonical_divisor(m) + divisor_of(f)
    if dict(check.coeffs) != dict(D.coeffs):  # pragma: no cover - correctness net
        raise AssertionError("solver produced a function whose divisor mismatches")
    return f


# -- the cell census of |K| --------------------------------------------------


@dataclass(frozen=True)
class SystemCell:
    """One combinatorial cell of the canonical linear system.

    ``slopes`` are initial slopes at end 0 of each minimal edge, ``jumps`` the
    interior multiplicity sequences in traversal order; members are exactly
    the effective divisors realizing that profile with interior positions in
    the open order polytope cut by the cycle equations.
    """

    slopes: Mapping[str, int]
    jumps: Mapping[str, tuple[int, ...]]
    vertex_coeffs: Mapping[str, int]
    dimension: int
    sample: RationalFunction
    sample_divisor: Divisor

    @property
    def support_pattern(self) -> dict[str, int]:
        return {e: len(j) for e, j in self.jumps.items()}

    def contains(self, D: Divisor) -> bool:
        """Membership of a divisor on the same (minimal) curve."""
        minimal = self.sample.ambient
        dmap: dict[str, list[tuple[Fraction, int]]] = {e: [] for e in minimal.base.edges}
        for p, c in D.coeffs.items():
            if p.is_vertex:
                continue
            dmap[p.edge].append((p.offset, c))
        for v in minimal.base.vertices:
            if D.at(CurvePoint.at_vertex(v)) != self.vertex_coeffs.get(v, 0):
                return False
        positions: dict[tuple[str, int], Fraction] = {}
        for e in minimal.base.edges:
            pts = sorted(dmap[e])
            if tuple(c for _, c in pts) != self.jumps[e]:
                return False
            for i, (off, _) in enumerate(pts):
                positions[(e, i)] = off
        return _cycle_equations_hold(minimal, self.slopes, self.jumps, positions)


def _cycle_equation_rows(
    minimal: MetricCurve,
    slopes: Mapping[str, int],
    jumps: Mapping[str, tuple[int, ...]],
    var_index: Mapping[tuple[str, int], int],
) -> list[linalg.LinearConstraint]:
    """Cycle equations as linear constraints over interior positions.

    Integral over e (end0 -> end1) equals t_k * len - sum_i mu_i x_i.
    """
    tree, chords = _spanning_tree(minimal.base)
    nvars = len(var_index)
    rows = []
    for ch in chords:
        coeffs = [Fraction(0)] * nvars
        const = Fraction(0)

        def add_edge(e: str, sign: int):
            nonlocal const
            t_end = slopes[e] + sum(jumps[e])
            const += sign * Fraction(t_end) * minimal.length[e]
            for i, mu in enumerate(jumps[e]):
                coeffs[var_index[(e, i)]] -= sign * mu

        a, b = minimal.base.edges[ch]
        add_edge(ch, 1)
        for e, sign in _tree_path(minimal.base, tree, b, a):
            add_edge(e, sign)
        rows.append(linalg.eq(coeffs, const))
    return rows


def _cycle_equations_hold(minimal, slopes, jumps, positions) -> bool:
    var_index = {key: i for i, key in enumerate(sorted(positions))}
    x = [Fraction(0)] * len(var_index)
    for key, i in var_index.items():
        x[i] = positions[key]
    return all(r.holds(x) for r in _cycle_equation_rows(minimal, slopes, jumps, var_index))


def canonical_system_cells(m: MetricCurve, bound: Optional[int] = None) -> list[SystemCell]:
    """All nonempty cells of |K| for the given edge lengths.

    Enumerates slope profiles within the bound, decides nonemptiness of the
    position polytope by exact feasibility, and reports the dimension of each
    cell (free support positions modulo the cycle equations).
    """
    sup = suppress_with_map(m)
    minimal = sup.curve
    g = genus(minimal.base)
    if g < 2:
        raise InvalidQuery("cell census needs genus >= 2")
    if stability(minimal.base, count_legs=False) != STABLE:
        raise NotStable("cell census needs a stable minimal model")
    d = 2 * g - 2
    B = default_slope_bound(g) if bound is None else bound
    K = canonical_divisor(minimal)
    edges = sorted(minimal.base.edges)

    def jump_options(budget: int) -> list[tuple[int, ...]]:
        out: list[tuple[int, ...]] = [()]
        def rec(prefix: list[int], left: int):
            for j in range(1, left + 1):
                prefix.append(j)
                out.append(tuple(prefix))
                rec(prefix, left - j)
                prefix.pop()
        rec([], budget)
        return out

    cells: list[SystemCell] = []
    per_edge_profiles: dict[str, list[tuple[int, tuple[int, ...]]]] = {}
    for e in edges:
        opts = []
        for jumps in jump_options(d):
            total = sum(jumps)
            for t0 in range(-B, B - total + 1):
                opts.append((t0, jumps))
        per_edge_profiles[e] = opts

    def vertex_ord(v: str, slopes: dict[str, int], jumps: dict[str, tuple[int, ...]]) -> int:
        total = 0
        for e, end in minimal.base.half_edges_at(v):
            if end == 0:
                total += slopes[e]
            else:
                total -= slopes[e] + sum(jumps[e])
        return total

    def rec(i: int, slopes: dict[str, int], jumps: dict[str, tuple[int, ...]], interior: int):
        if interior > d:
            return
        if i == len(edges):
            vcoeffs = {}
            for v in minimal.base.vertices:
                dv = K.at(CurvePoint.at_vertex(v)) + vertex_ord(v, slopes, jumps)
                if dv < 0:
                    return
                vcoeffs[v] = dv
            if sum(vcoeffs.values()) + interior != d:
                return
            cell = _finish_cell(minimal, dict(slopes), dict(jumps), vcoeffs)
            if cell is not None:
                cells.append(cell)
            return
        e = edges[i]
        for t0, js in per_edge_profiles[e]:
            slopes[e] = t0
            jumps[e] = js
            # prune: vertices whose incident edges are all decided
            ok = True
            for v in set(minimal.base.edges[e]):
                if all(eidx <= i for eidx in (edges.index(e2) for e2, _ in minimal.base.half_edges_at(v))):
                    if K.at(CurvePoint.at_vertex(v)) + vertex_ord(v, slopes, jumps) < 0:
                        ok = False
                        break
            if ok:
                rec(i + 1, slopes, jumps, interior + sum(js))
            del slopes[e], jumps[e]

    rec(0, {}, {}, 0)
    cells.sort(key=lambda c: (sorted(c.slopes.items()), sorted(c.jumps.items())))
    return cells


def _finish_cell(minimal, slopes, jumps, vcoeffs) -> Optional[SystemCell]:
    var_index = {(e, i): k for k, (e, i) in enumerate(
        sorted((e, i) for e in jumps for i in range(len(jumps[e])))
    )}
    nvars = len(var_index)
    cons = list(_cycle_equation_rows(minimal, slopes, jumps, var_index))
    for (e, i), k in var_index.items():
        lo = [Fraction(0)] * nvars
        lo[k] = Fraction(1)
        if i == 0:
            cons.append(linalg.gt(lo, 0))
        else:
            prev = [Fraction(0)] * nvars
            prev[k] = Fraction(1)
            prev[var_index[(e, i - 1)]] = Fraction(-1)
            cons.append(linalg.gt(prev, 0))
        if i == len(jumps[e]) - 1:
            hi = [Fraction(0)] * nvars
            hi[k] = Fraction(-1)
            cons.append(linalg.gt(hi, minimal.length[e]))
    dim = linalg.solution_dimension(nvars, cons)
    if dim is None:
        return None
    point = linalg.feasible_point(nvars, cons)
    chains = {
        e: _EdgeChain(
            tuple(point[var_index[(e, i)]] for i in range(len(jumps[e]))), jumps[e]
        )
        for e in jumps
    }
    f = _assemble(minimal, slopes, chains).normalized()
    sample_divisor = canonical_divisor(minimal) + divisor_of(f)
    if not sample_divisor.is_effective:  # pragma: no cover - filtered above
        raise AssertionError("cell sample is not effective")
    return SystemCell(
        slopes=slopes,
        jumps=jumps,
        vertex_coeffs=vcoeffs,
        dimension=dim,
        sample=f,
        sample_divisor=sample_divisor,
    )
