"""Canonical forms of colored multigraphs with legs.

Two decorated curves get the same encoding string iff they are isomorphic
respecting vertex genus, vertex colors, per-half-edge colors and the
(unordered) multiset of leg colors per vertex.  The search is the classic
individualization-refinement loop: 1-WL color refinement, branch on the first
non-singleton cell, collect every discrete labeling and keep the minimum
encoding.  The number of labelings achieving the minimum is the automorphism
count.  Intended for the small graphs of the catalogs (default bound 16).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from .errors import SizeLimit
from .graphs import CombinatorialCurve

DEFAULT_BOUND = 16


@dataclass(frozen=True)
class Canonical:
    encoding: str
    automorphisms: int
    labeling: Mapping[str, int]


def canonize(
    c: CombinatorialCurve,
    vertex_colors: Optional[Mapping[str, object]] = None,
    edge_end_colors: Optional[Mapping[tuple[str, int], object]] = None,
    leg_colors: Optional[Mapping[str, object]] = None,
    bound: int = DEFAULT_BOUND,
) -> Canonical:
    verts = sorted(c.vertices)
    n = len(verts)
    if n > bound:
        raise SizeLimit(f"{n} vertices exceeds the canonical-form bound {bound}")
    vertex_colors = vertex_colors or {}
    edge_end_colors = edge_end_colors or {}
    leg_colors = leg_colors or {}

    def raw_vcolor(v: str) -> tuple:
        legs = tuple(sorted(repr(leg_colors.get(l)) for l in c.legs_at(v)))
        return (c.vertices[v], repr(vertex_colors.get(v)), legs)

    def raw_ecolor(e: str, i: int) -> str:
        return repr(edge_end_colors.get((e, i)))

    # Dense integer ids for refinement signatures.
    vcolor_ids = {col: i for i, col in enumerate(sorted({raw_vcolor(v) for v in verts}, key=repr))}
    ecolor_ids = {
        col: i
        for i, col in enumerate(
            sorted({raw_ecolor(e, i) for e in c.edges for i in (0, 1)}, key=repr)
        )
    }
    incident: dict[str, list[tuple[int, int, str]]] = {v: [] for v in verts}
    for e, (a, b) in c.edges.items():
        incident[a].append((ecolor_ids[raw_ecolor(e, 0)], ecolor_ids[raw_ecolor(e, 1)], b))
        incident[b].append((ecolor_ids[raw_ecolor(e, 1)], ecolor_ids[raw_ecolor(e, 0)], a))

    def refine(partition: list[list[str]]) -> list[list[str]]:
        while True:
            index = {v: i for i, cls in enumerate(partition) for v in cls}
            sig = {
                v: (
                    index[v],
                    tuple(sorted((mine, theirs, index[w]) for mine, theirs, w in incident[v])),
                )
                for v in verts
            }
            new: list[list[str]] = []
            for cls in partition:
                groups: dict[tuple, list[str]] = {}
                for v in cls:
                    groups.setdefault(sig[v], []).append(v)
                for key in sorted(groups):
                    new.append(sorted(groups[key]))
            if len(new) == len(partition):
                return new
            partition = new

    def encoding_of(labeling: Mapping[str, int]) -> str:
        vseq = tuple(raw_vcolor(v) for v in sorted(verts, key=lambda v: labeling[v]))
        erecs = []
        for e, (a, b) in c.edges.items():
            ends = sorted([(labeling[a], raw_ecolor(e, 0)), (labeling[b], raw_ecolor(e, 1))])
            erecs.append(tuple(ends))
        return repr((n, vseq, tuple(sorted(erecs))))

    start = [
        sorted(g)
        for _, g in sorted(
            _group_by(verts, lambda v: vcolor_ids[raw_vcolor(v)]).items()
        )
    ]

    best: list[Optional[str]] = [None]
    best_count = [0]
    best_labeling: list[Optional[dict[str, int]]] = [None]

    def descend(partition: list[list[str]]) -> None:
        partition = refine(partition)
        target = next((i for i, cls in enumerate(partition) if len(cls) > 1), None)
        if target is None:
            labeling = {cls[0]: i for i, cls in enumerate(partition)}
            enc = encoding_of(labeling)
            if best[0] is None or enc < best[0]:
                best[0] = enc
                best_count[0] = 1
                best_labeling[0] = labeling
            elif enc == best[0]:
                best_count[0] += 1
            return
        cls = partition[target]
        for v in cls:
            rest = [w for w in cls if w != v]
            descend(partition[:target] + [[v], rest] + partition[target + 1 :])

    descend(start)

    # best_count counted vertex relabelings; automorphisms also permute
    # parallel edges of equal decoration and flip symmetric loops.
    edge_factor = 1
    classes: dict[tuple, int] = {}
    for e, (a, b) in c.edges.items():
        key = tuple(sorted([(a, raw_ecolor(e, 0)), (b, raw_ecolor(e, 1))]))
        classes[key] = classes.get(key, 0) + 1
        if a == b and raw_ecolor(e, 0) == raw_ecolor(e, 1):
            edge_factor *= 2
    for mult in classes.values():
        for i in range(2, mult + 1):
            edge_factor *= i
    return Canonical(best[0], best_count[0] * edge_factor, best_labeling[0])


def _group_by(items, key):
    out: dict = {}
    for x in items:
        out.setdefault(key(x), []).append(x)
    return out


def canonical_form(
    c: CombinatorialCurve,
    vertex_colors: Optional[Mapping[str, object]] = None,
    edge_end_colors: Optional[Mapping[tuple[str, int], object]] = None,
    leg_colors: Optional[Mapping[str, object]] = None,
    bound: int = DEFAULT_BOUND,
) -> str:
    return canonize(c, vertex_colors, edge_end_colors, leg_colors, bound).encoding
