"""Shared example curves for the test suite."""

from tropcanon.graphs import CombinatorialCurve, MetricCurve, metric


def dumbbell(l1=1, lb=1, l2=1) -> MetricCurve:
    c = CombinatorialCurve(
        vertices={"v1": 0, "v2": 0},
        edges={"L1": ("v1", "v1"), "br": ("v1", "v2"), "L2": ("v2", "v2")},
    )
    return metric(c, {"L1": l1, "br": lb, "L2": l2})


def theta(l1=1, l2=1, l3=1) -> MetricCurve:
    c = CombinatorialCurve(
        vertices={"v1": 0, "v2": 0},
        edges={"e1": ("v1", "v2"), "e2": ("v1", "v2"), "e3": ("v1", "v2")},
    )
    return metric(c, {"e1": l1, "e2": l2, "e3": l3})


def k4(lengths=None) -> MetricCurve:
    c = CombinatorialCurve(
        vertices={"v1": 0, "v2": 0, "v3": 0, "v4": 0},
        edges={
            "e1": ("v1", "v2"),
            "e2": ("v2", "v3"),
            "e3": ("v1", "v3"),
            "e4": ("v1", "v4"),
            "e5": ("v2", "v4"),
            "e6": ("v3", "v4"),
        },
    )
    lengths = lengths or {e: 1 for e in c.edges}
    return metric(c, lengths)


def two_loops(l1=1, l2=1) -> MetricCurve:
    c = CombinatorialCurve(vertices={"v": 0}, edges={"a": ("v", "v"), "b": ("v", "v")})
    return metric(c, {"a": l1, "b": l2})
