"""Finite metric spaces over exact scalars.

Distances are ints or Fractions, never floats: every downstream certificate
is an exact comparison, and a single rounded value would poison all of them.
The one non-rational value in the toolkit is INF, the marker for a minimum
taken over an empty set.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import Violation

Scalar = int | Fraction

#: Marker for "no points to measure": distance to the empty set, or the
#: Lebesgue number of a cover with a whole-space member.  A float, but it
#: compares exactly against every int and Fraction, and it never enters
#: arithmetic that lands back in a distance table.
INF = math.inf


def is_scalar(value) -> bool:
    return not isinstance(value, bool) and isinstance(value, (int, Fraction))


def check_scalar(value, name: str = "value") -> Scalar:
    """Reject floats and anything else inexact."""
    if not is_scalar(value):
        raise TypeError(f"{name} must be an int or Fraction, got {value!r}")
    return value


class FiniteMetricSpace:
    """Named points with a dense table of exact pairwise distances.

    The table is stored as given; nothing about the metric axioms is
    assumed at construction time.  Run validate_metric to get the report.
    """

    def __init__(self, points: Sequence[str], dist: Sequence[Sequence[Scalar]],
                 name: str = "space"):
        self.points = tuple(str(p) for p in points)
        if not self.points:
            raise ValueError("a metric space needs at least one point")
        if len(set(self.points)) != len(self.points):
            raise ValueError("point names must be distinct")
        if len(dist) != len(self.points):
            raise ValueError(
                f"distance table has {len(dist)} rows for {len(self.points)} points")
        rows = []
        for i, row in enumerate(dist):
            row = tuple(row)
            if len(row) != len(self.points):
                raise ValueError(f"distance table row {i} has length {len(row)}, "
                                 f"expected {len(self.points)}")
            for j, v in enumerate(row):
                check_scalar(v, f"dist[{i}][{j}]")
            rows.append(row)
        self.dist = tuple(rows)
        self.name = str(name)
        self._index = {p: i for i, p in enumerate(self.points)}

    def __len__(self) -> int:
        return len(self.points)

    def d(self, x: int, y: int) -> Scalar:
        return self.dist[x][y]

    def index(self, point: str) -> int:
        try:
            return self._index[point]
        except KeyError:
            raise KeyError(f"unknown point {point!r} in space {self.name!r}") from None

    def point_set(self, names: Iterable[str]) -> frozenset[int]:
        return frozenset(self.index(p) for p in names)

    def check_point(self, x: int) -> int:
        if not isinstance(x, int) or isinstance(x, bool) or not 0 <= x < len(self.points):
            raise ValueError(f"point index {x!r} out of range for space {self.name!r}")
        return x

    def __eq__(self, other) -> bool:
        # The label is not part of the geometry.
        if not isinstance(other, FiniteMetricSpace):
            return NotImplemented
        return self.points == other.points and self.dist == other.dist

    __hash__ = None  # mutable enough; never used as a dict key

    def __repr__(self) -> str:
        return f"FiniteMetricSpace({self.name!r}, {len(self)} points)"


def validate_metric(m: FiniteMetricSpace) -> list[Violation]:
    """Exhaustive check of the metric axioms; lists every violated pair/triple."""
    out: list[Violation] = []
    n = len(m)
    for i in range(n):
        if m.dist[i][i] != 0:
            out.append(Violation("identity", (i,),
                                 f"d({m.points[i]},{m.points[i]}) = {m.dist[i][i]}, expected 0"))
    for i in range(n):
        for j in range(i + 1, n):
            if m.dist[i][j] != m.dist[j][i]:
                out.append(Violation("symmetry", (i, j),
                                     f"d({m.points[i]},{m.points[j]}) = {m.dist[i][j]} but "
                                     f"d({m.points[j]},{m.points[i]}) = {m.dist[j][i]}"))
            if m.dist[i][j] <= 0:
                out.append(Violation("positivity", (i, j),
                                     f"d({m.points[i]},{m.points[j]}) = {m.dist[i][j]}, "
                                     f"expected > 0 for distinct points"))
    for i in range(n):
        for j in range(n):
            if j == i:
                continue
            for k in range(n):
                if k == i or k == j:
                    continue
                if m.dist[i][k] > m.dist[i][j] + m.dist[j][k]:
                    out.append(Violation(
                        "triangle", (i, j, k),
                        f"d({m.points[i]},{m.points[k]}) = {m.dist[i][k]} > "
                        f"{m.dist[i][j]} + {m.dist[j][k]} via {m.points[j]}"))
    return out


def build_graph_metric(vertices: Sequence[str], edges: Iterable[tuple],
                       weights: Sequence[Scalar] | None = None,
                       name: str = "graph") -> FiniteMetricSpace:
    """Shortest-path metric of an undirected weighted graph, exactly.

    edges are (u, v) pairs of vertex names; weights is an optional parallel
    sequence (unit weights otherwise).  Disconnected input is an error that
    names a specific unreachable pair.
    """
    names = [str(v) for v in vertices]
    if len(set(names)) != len(names):
        raise ValueError("vertex names must be distinct")
    index = {v: i for i, v in enumerate(names)}
    n = len(names)
    if n == 0:
        raise ValueError("a graph metric needs at least one vertex")

    edges = list(edges)
    if weights is not None:
        weights = list(weights)
        if len(weights) != len(edges):
            raise ValueError(f"{len(weights)} weights for {len(edges)} edges")
    dist: list[list] = [[INF] * n for _ in range(n)]
    for i in range(n):
        dist[i][i] = 0
    for pos, edge in enumerate(edges):
        u, v = edge
        if u not in index or v not in index:
            raise ValueError(f"edge ({u!r}, {v!r}) mentions an unknown vertex")
        w = 1 if weights is None else check_scalar(weights[pos], f"weight[{pos}]")
        if w <= 0:
            raise ValueError(f"edge ({u!r}, {v!r}) has nonpositive weight {w}")
        i, j = index[u], index[v]
        if i == j:
            raise ValueError(f"self-loop at {u!r}")
        if w < dist[i][j]:
            dist[i][j] = dist[j][i] = w

    # Floyd-Warshall; sums of ints/Fractions stay exact, INF only ever loses.
    for k in range(n):
        dk = dist[k]
        for i in range(n):
            dik = dist[i][k]
            if dik == INF:
                continue
            di = dist[i]
            for j in range(n):
                alt = dik + dk[j]
                if alt < di[j]:
                    di[j] = alt

    for i in range(n):
        for j in range(n):
            if dist[i][j] == INF:
                raise ValueError(
                    f"graph is disconnected: no path between {names[i]!r} and {names[j]!r}")
    return FiniteMetricSpace(names, dist, name=name)


def ball(m: FiniteMetricSpace, x: int, r: Scalar, mode: str = "closed") -> frozenset[int]:
    """Open or closed ball around a point, as a set of point indices."""
    m.check_point(x)
    check_scalar(r, "radius")
    if mode == "closed":
        return frozenset(y for y in range(len(m)) if m.dist[x][y] <= r)
    if mode == "open":
        return frozenset(y for y in range(len(m)) if m.dist[x][y] < r)
    raise ValueError(f"mode must be 'open' or 'closed', got {mode!r}")


def diameter(m: FiniteMetricSpace, s: Iterable[int]) -> Scalar:
    """Largest pairwise distance within s; the empty set has no diameter."""
    s = sorted({m.check_point(x) for x in s})
    if not s:
        raise ValueError("diameter of the empty set is undefined")
    best: Scalar = 0
    for a_pos, x in enumerate(s):
        for y in s[a_pos + 1:]:
            if m.dist[x][y] > best:
                best = m.dist[x][y]
    return best


def set_distance(m: FiniteMetricSpace, a: Iterable[int], b: Iterable[int]):
    """min d(x, y) over x in a, y in b; INF when either side is empty."""
    a = [m.check_point(x) for x in set(a)]
    b = [m.check_point(y) for y in set(b)]
    if not a or not b:
        return INF
    best = None
    for x in a:
        row = m.dist[x]
        for y in b:
            if best is None or row[y] < best:
                best = row[y]
    return best
