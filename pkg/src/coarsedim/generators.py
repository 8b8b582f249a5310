"""Deterministic instance generators: standard example spaces, their
canonical actions, and seeded random corpora.

Every random construction threads a single random.Random(seed); there is no
other source of randomness in the package, so any generated instance can be
reproduced from its parameters alone.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Mapping, Sequence

from .covers import Cover, Decomposition
from .groups import FiniteGroup, IsometricAction, cyclic_group
from .metric import FiniteMetricSpace, Scalar, build_graph_metric, check_scalar


def path_space(n: int, name: str | None = None) -> FiniteMetricSpace:
    """Path with n vertices and unit edges: d(i, j) = |i - j|."""
    if n < 1:
        raise ValueError("path needs at least one vertex")
    points = [str(i) for i in range(n)]
    dist = [[abs(i - j) for j in range(n)] for i in range(n)]
    return FiniteMetricSpace(points, dist, name=name or f"P{n}")


def cycle_space(n: int, name: str | None = None) -> FiniteMetricSpace:
    """Cycle with n vertices and unit edges: d(i, j) = min(|i-j|, n-|i-j|)."""
    if n < 3:
        raise ValueError("cycle needs at least three vertices")
    points = [str(i) for i in range(n)]
    dist = [[min(abs(i - j), n - abs(i - j)) for j in range(n)] for i in range(n)]
    return FiniteMetricSpace(points, dist, name=name or f"C{n}")


def grid_space(width: int, height: int, name: str | None = None) -> FiniteMetricSpace:
    """width x height grid graph with unit edges (taxicab distances)."""
    if width < 1 or height < 1:
        raise ValueError("grid needs positive dimensions")
    coords = [(i, j) for i in range(width) for j in range(height)]
    points = [f"{i},{j}" for i, j in coords]
    dist = [[abs(a - c) + abs(b - d) for (c, d) in coords] for (a, b) in coords]
    return FiniteMetricSpace(points, dist, name=name or f"grid{width}x{height}")


def path_reflection_action(space: FiniteMetricSpace,
                           name: str | None = None) -> IsometricAction:
    """Order-two action flipping the path end to end."""
    n = len(space)
    group = cyclic_group(2)
    perms = [list(range(n)), [n - 1 - i for i in range(n)]]
    return IsometricAction(group, space, perms, name=name or f"{space.name}_reflect")


def cycle_rotation_action(space: FiniteMetricSpace, shift: int,
                          name: str | None = None) -> IsometricAction:
    """Rotation of the n-cycle by `shift`, as the cyclic group it generates."""
    n = len(space)
    shift %= n
    order = n // gcd(n, shift) if shift else 1
    group = cyclic_group(order)
    perms = [[(i + k * shift) % n for i in range(n)] for k in range(order)]
    return IsometricAction(group, space, perms,
                           name=name or f"{space.name}_rot{shift}")


def cycle_reflection_action(space: FiniteMetricSpace,
                            name: str | None = None) -> IsometricAction:
    """Order-two action i -> -i mod n on the cycle."""
    n = len(space)
    group = cyclic_group(2)
    perms = [list(range(n)), [(n - i) % n for i in range(n)]]
    return IsometricAction(group, space, perms, name=name or f"{space.name}_reflect")


def grid_rotation_action(space: FiniteMetricSpace, width: int, height: int,
                         name: str | None = None) -> IsometricAction:
    """Half-turn of the grid about its center."""
    if len(space) != width * height:
        raise ValueError("grid dimensions do not match the space")
    group = cyclic_group(2)
    flip = [0] * (width * height)
    for i in range(width):
        for j in range(height):
            flip[i * height + j] = (width - 1 - i) * height + (height - 1 - j)
    perms = [list(range(width * height)), flip]
    return IsometricAction(group, space, perms, name=name or f"{space.name}_halfturn")


def cayley_ball_space(n: int, gens: Sequence[int], radius: int,
                      name: str | None = None) -> FiniteMetricSpace:
    """Ball of the given radius around 0 in a circulant Cayley graph of Z/n,
    with the shortest-path metric of the induced subgraph.

    Shortest generator words have in-ball prefixes, so the induced subgraph
    is connected and the construction always yields a metric.
    """
    if n < 1:
        raise ValueError("cyclic order must be >= 1")
    if radius < 0:
        raise ValueError("radius must be >= 0")
    steps = sorted({g % n for g in gens if g % n != 0} |
                   {(-g) % n for g in gens if g % n != 0})
    # BFS word lengths; only the component of 0 matters for a ball around 0
    word = {0: 0}
    frontier = [0]
    while frontier:
        new = []
        for v in frontier:
            for st in steps:
                u = (v + st) % n
                if u not in word:
                    word[u] = word[v] + 1
                    new.append(u)
        frontier = new
    members = sorted(v for v in word if word[v] <= radius)
    vertices = [str(v) for v in members]
    inside = set(members)
    edges = []
    for v in members:
        for st in steps:
            u = (v + st) % n
            if u in inside and v < u:
                edges.append((str(v), str(u)))
    if len(members) == 1:
        return FiniteMetricSpace(vertices, [[0]],
                                 name=name or f"cayley{n}r{radius}")
    return build_graph_metric(vertices, edges,
                              name=name or f"cayley{n}r{radius}")


def random_graph_space(n: int, seed: int, edge_chance: Fraction = Fraction(2, 5),
                       max_weight: int = 3, name: str | None = None
                       ) -> FiniteMetricSpace:
    """Connected random graph metric: a random spanning tree plus extra edges,
    integer weights in 1..max_weight, shortest-path closure."""
    if n < 1:
        raise ValueError("need at least one vertex")
    if not 0 <= edge_chance <= 1:
        raise ValueError("edge_chance must be in [0, 1]")
    if max_weight < 1:
        raise ValueError("max_weight must be >= 1")
    rng = random.Random(seed)
    vertices = [str(i) for i in range(n)]
    edges = []
    weights = []
    for v in range(1, n):
        u = rng.randrange(v)
        edges.append((str(u), str(v)))
        weights.append(rng.randint(1, max_weight))
    present = set(edges)
    num, den = edge_chance.numerator, edge_chance.denominator
    for u in range(n):
        for v in range(u + 1, n):
            if (str(u), str(v)) in present:
                continue
            if rng.randrange(den) < num:
                edges.append((str(u), str(v)))
                weights.append(rng.randint(1, max_weight))
    return build_graph_metric(vertices, edges, weights,
                              name=name or f"random{n}s{seed}")


def random_invariant_instance(group: FiniteGroup, base_size: int, seed: int,
                              max_weight: int = 4, name: str | None = None
                              ) -> tuple[FiniteMetricSpace, IsometricAction]:
    """Random space carrying a free action of the given group.

    Points are (group element, slot) pairs.  Random edge costs are drawn
    subject to c(g, i, j) = c(g^(-1), j, i), which makes the complete-graph
    weight w((g,i),(h,j)) = c(g^(-1)h, i, j) symmetric and invariant under
    left translation; the shortest-path closure is then a genuine invariant
    metric, and left translation is the action.
    """
    if base_size < 1:
        raise ValueError("base_size must be >= 1")
    rng = random.Random(seed)
    k = len(group)
    cost: dict[tuple[int, int, int], int] = {}
    for g in range(k):
        ginv = group.inverse(g)
        for i in range(base_size):
            for j in range(base_size):
                if (g, i, j) in cost:
                    continue
                if g == group.identity and i == j:
                    continue
                w = rng.randint(1, max_weight)
                cost[(g, i, j)] = w
                cost[(ginv, j, i)] = w

    n = k * base_size
    label = name or f"{group.name}xB{base_size}s{seed}"
    points = [f"{group.elements[g]}.{i}" for g in range(k) for i in range(base_size)]
    dist = [[0] * n for _ in range(n)]
    for g in range(k):
        for i in range(base_size):
            a = g * base_size + i
            for h in range(k):
                for j in range(base_size):
                    b = h * base_size + j
                    if a == b:
                        continue
                    dist[a][b] = cost[(group.mul(group.inverse(g), h), i, j)]
    # shortest-path closure keeps the invariance and yields the metric
    for via in range(n):
        dv = dist[via]
        for a in range(n):
            dav = dist[a][via]
            da = dist[a]
            for b in range(n):
                alt = dav + dv[b]
                if alt < da[b]:
                    da[b] = alt
    space = FiniteMetricSpace(points, dist, name=label)
    perms = []
    for g in range(k):
        perm = [0] * n
        for h in range(k):
            gh = group.mul(g, h)
            for i in range(base_size):
                perm[h * base_size + i] = gh * base_size + i
        perms.append(perm)
    action = IsometricAction(group, space, perms, name=f"{label}_translate")
    return space, action


def random_cover(space: FiniteMetricSpace, seed: int,
                 name: str | None = None) -> Cover:
    """Valid random cover: a few random closed balls, then balls around
    uncovered points until everything is covered, deduplicated."""
    rng = random.Random(seed)
    n = len(space)
    radii = sorted({space.dist[i][j] for i in range(n) for j in range(n)})
    members = []
    seen = set()

    def push(center: int, rho):
        b = frozenset(y for y in range(n) if space.dist[center][y] <= rho)
        if b not in seen:
            seen.add(b)
            members.append(b)
        return b

    small = radii[:max(2, len(radii) * 2 // 3)]
    for _ in range(rng.randint(1, 3)):
        push(rng.randrange(n), rng.choice(small))
    covered = set().union(*members)
    while len(covered) < n:
        x = min(set(range(n)) - covered)
        covered |= push(x, rng.choice(small))
    return Cover(space, members, name=name or f"{space.name}_cover_s{seed}")


def random_decomposition(space: FiniteMetricSpace, r: Scalar, seed: int,
                         families: int | None = None,
                         name: str | None = None) -> Decomposition:
    """Valid random decomposition at parameter r, built greedily.

    Points are taken in random order; each tries, in random family order, to
    join an existing piece or start a new one without breaking the family's
    r-disjointness; when nothing fits a fresh family is opened.  With a
    `families` target the result is padded with empty families (never
    truncated: opening a family is always a last resort, so the count only
    exceeds the target when r forces it).
    """
    check_scalar(r, "r")
    rng = random.Random(seed)
    n = len(space)
    fams: list[list[set[int]]] = []
    order = list(range(n))
    rng.shuffle(order)
    for x in order:
        placed = False
        fam_order = list(range(len(fams)))
        rng.shuffle(fam_order)
        for fi in fam_order:
            pieces = fams[fi]
            # joining piece p needs x to stay > r from every other piece
            others_clear = [all(min(space.dist[x][y] for y in q) > r
                                for qi, q in enumerate(pieces) if qi != pi)
                            for pi in range(len(pieces))]
            join_options = [pi for pi, ok in enumerate(others_clear) if ok]
            can_start = all(min(space.dist[x][y] for y in q) > r for q in pieces)
            if join_options and (not can_start or rng.random() < 0.5):
                fams[fi][rng.choice(join_options)].add(x)
                placed = True
                break
            if can_start:
                fams[fi].append({x})
                placed = True
                break
        if not placed:
            fams.append([{x}])
    result = [tuple(frozenset(p) for p in fam) for fam in fams]
    if families is not None:
        while len(result) < families:
            result.append(tuple())
    return Decomposition(space, r, result,
                         name=name or f"{space.name}_decomp_r{r}_s{seed}")


@dataclass(frozen=True)
class GeneratedInstance:
    space: FiniteMetricSpace
    action: IsometricAction | None


def _int_param(params: Mapping[str, str], key: str, default: int | None = None) -> int:
    if key not in params:
        if default is None:
            raise ValueError(f"missing parameter {key!r}")
        return default
    try:
        return int(params[key])
    except ValueError:
        raise ValueError(f"parameter {key!r} must be an integer, got "
                         f"{params[key]!r}") from None


def generate_instance(kind: str, params: Mapping[str, str] | None = None,
                      seed: int = 0) -> GeneratedInstance:
    """One generated space, with its canonical action when the kind has one.

    Kinds and parameters:
      path        n (default 5); reflection action
      cycle       n (default 6), action=rotation|reflection|none,
                  shift (default n//2 if even else 1); rotation action
      grid        w,h (default 3,3); half-turn action
      cayley-ball n, gens (e.g. "1+5"), radius; no action
      random      n (default 8), p (rational, default 2/5), maxw (default 3);
                  no action
    """
    params = dict(params or {})
    if kind == "path":
        n = _int_param(params, "n", 5)
        space = path_space(n)
        return GeneratedInstance(space, path_reflection_action(space))
    if kind == "cycle":
        n = _int_param(params, "n", 6)
        space = cycle_space(n)
        which = params.get("action", "rotation")
        if which == "rotation":
            shift = _int_param(params, "shift", n // 2 if n % 2 == 0 else 1)
            return GeneratedInstance(space, cycle_rotation_action(space, shift))
        if which == "reflection":
            return GeneratedInstance(space, cycle_reflection_action(space))
        if which == "none":
            return GeneratedInstance(space, None)
        raise ValueError(f"unknown cycle action {which!r}")
    if kind == "grid":
        w = _int_param(params, "w", 3)
        h = _int_param(params, "h", 3)
        space = grid_space(w, h)
        return GeneratedInstance(space, grid_rotation_action(space, w, h))
    if kind == "cayley-ball":
        n = _int_param(params, "n")
        radius = _int_param(params, "radius")
        gens_text = params.get("gens")
        if not gens_text:
            raise ValueError("cayley-ball needs gens, e.g. gens=1+5")
        gens = [int(tok) for tok in gens_text.split("+")]
        return GeneratedInstance(cayley_ball_space(n, gens, radius), None)
    if kind == "random":
        n = _int_param(params, "n", 8)
        p = Fraction(params.get("p", "2/5"))
        maxw = _int_param(params, "maxw", 3)
        return GeneratedInstance(random_graph_space(n, seed, p, maxw), None)
    raise ValueError(f"unknown instance kind {kind!r}")
