"""Moving covers across quotient maps, and weighted disjoint unions.

Two directions.  Pushing a cover down to the quotient is cheap and loses
little: mesh and Lebesgue number survive, only the dimension can grow, by
at most a factor of the group order.  Lifting a cover back up is the real
construction: the preimage of each member is split into well-separated
pieces using subgroups generated by small displacements, and the resulting
cover of the total space is invariant under the whole action with no loss
of dimension.  Both directions certify their postconditions by
recomputation and treat any failure as an implementation bug.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .covers import (Cover, CoverCertificate, certify, check_equivariance, dimension,
                     lebesgue_number, mesh, validate_cover, validate_decomposition,
                     Decomposition)
from .errors import InternalInvariantError
from .groups import (FiniteGroup, IsometricAction, QuotientSpace, coset_representatives,
                     generated_subgroup, quotient)
from .metric import (INF, FiniteMetricSpace, Scalar, check_scalar, diameter,
                     set_distance)


def pushforward_cover(a: IsometricAction, q: QuotientSpace,
                      c: Cover) -> tuple[Cover, CoverCertificate]:
    """Image of a cover under the quotient projection, members deduplicated.

    Certified: mesh does not grow, the Lebesgue number does not shrink, and
    the dimension is at most |F|*(n+1) - 1 where n is the input dimension.
    """
    if c.space != a.space or q.source != a.space:
        raise ValueError("pushforward needs a cover and quotient of the action's space")
    issues = validate_cover(c)
    if issues:
        raise ValueError("invalid cover: " + "; ".join(v.message for v in issues))

    members = []
    seen = set()
    for member in c.members:
        image = frozenset(q.orbit_of[x] for x in member)
        if image not in seen:
            seen.add(image)
            members.append(image)
    out = Cover(q.space, members, name=f"{c.name}_pushed")
    cert = certify(out)

    in_mesh = mesh(c)
    in_lebesgue = lebesgue_number(c)
    in_dim = dimension(c)
    bound = len(a.group) * (in_dim + 1) - 1
    if cert.mesh > in_mesh:
        raise InternalInvariantError(
            f"pushforward mesh {cert.mesh} exceeds input mesh {in_mesh}")
    if cert.lebesgue < in_lebesgue:
        raise InternalInvariantError(
            f"pushforward Lebesgue number {cert.lebesgue} below input {in_lebesgue}")
    if cert.dimension > bound:
        raise InternalInvariantError(
            f"pushforward dimension {cert.dimension} exceeds |F|(n+1)-1 = {bound}")
    return out, cert


def displacement_subgroup(a: IsometricAction, x: int, s: Scalar) -> tuple[int, ...]:
    """Subgroup generated by the elements that move x by at most 4s."""
    a.space.check_point(x)
    check_scalar(s, "s")
    gens = [g for g in range(len(a.group))
            if a.space.dist[x][a.perms[g][x]] <= 4 * s]
    return generated_subgroup(a.group, gens)


@dataclass(frozen=True)
class LiftPiece:
    """One piece of a lifted member: the coset representative that produced
    it, the displacement subgroup at its basepoint, and the piece itself."""

    rep: int
    subgroup: tuple[int, ...]
    piece: frozenset[int]


@dataclass(frozen=True)
class LiftMember:
    """How one quotient-cover member was split: its fiber, the chosen
    basepoint (lowest fiber index), and one piece per coset."""

    member_index: int
    member: frozenset[int]
    fiber: frozenset[int]
    basepoint: int
    pieces: tuple[LiftPiece, ...]


@dataclass(frozen=True)
class LiftTrace:
    """Full audit trail of a lift: the effective radius R, the separation
    scale s, and the per-member split data."""

    R: Scalar
    s: Scalar
    entries: tuple[LiftMember, ...]


def lift_equivariant(a: IsometricAction, q: QuotientSpace, c: Cover,
                     R: Scalar | None = None) -> tuple[Cover, LiftTrace, CoverCertificate]:
    """Lift a cover of the quotient to an invariant cover of the space.

    With s = max(mesh(c), R), the preimage of a member U splits into one
    piece per coset of the subgroup generated by elements moving the
    basepoint by at most 4s; a piece is the part of the fiber within s of
    the subgroup's translates of its basepoint (closed balls: the
    separation argument needs <=).  Certified, all by recomputation:

      * the member family is invariant under the whole group,
      * mesh(out) < 4s(|F|+1),
      * dimension(out) <= dimension(c),
      * lebesgue(out) >= R,
      * per member, pieces are pairwise more than 2s apart and their
        union is exactly the fiber.

    R defaults to lebesgue(c) when that is finite, else max(mesh(c), 1).
    These postconditions hold unconditionally for valid input, so any
    failure raises InternalInvariantError.
    """
    if q.source != a.space:
        raise ValueError("quotient does not belong to the action's space")
    if c.space != q.space:
        raise ValueError("cover does not live on the quotient space")
    issues = validate_cover(c)
    if issues:
        raise ValueError("invalid cover: " + "; ".join(v.message for v in issues))

    c_mesh = mesh(c)
    c_lebesgue = lebesgue_number(c)
    if R is None:
        R = c_lebesgue if c_lebesgue != INF else max(c_mesh, 1)
    check_scalar(R, "R")
    if R <= 0:
        raise ValueError(f"R must be positive, got {R}")
    if not c_lebesgue >= R:
        raise ValueError(f"cover has Lebesgue number {c_lebesgue}, below the target {R}")

    group = a.group
    m = a.space
    s = max(c_mesh, R)
    separation = 2 * s

    entries = []
    all_pieces: list[frozenset[int]] = []
    seen: set[frozenset] = set()
    for k, member in enumerate(c.members):
        fiber = q.fiber_of_set(member)
        basepoint = min(fiber)
        base_subgroup = displacement_subgroup(a, basepoint, s)
        reps = coset_representatives(group, base_subgroup)
        pieces = []
        for f in reps:
            x = a.perms[f][basepoint]
            local = displacement_subgroup(a, x, s)
            centers = {a.perms[h][x] for h in local}
            piece = frozenset(y for y in fiber
                              if any(m.dist[y][z] <= s for z in centers))
            pieces.append(LiftPiece(rep=f, subgroup=local, piece=piece))

        union: set[int] = set()
        for p in pieces:
            if not p.piece:
                raise InternalInvariantError(
                    f"lift produced an empty piece for member {k}, coset rep "
                    f"{group.elements[p.rep]}")
            union.update(p.piece)
        if union != set(fiber):
            raise InternalInvariantError(
                f"lift pieces of member {k} do not union to the fiber")
        for i in range(len(pieces)):
            for j in range(i + 1, len(pieces)):
                d = set_distance(m, pieces[i].piece, pieces[j].piece)
                if not d > separation:
                    raise InternalInvariantError(
                        f"lift pieces {i} and {j} of member {k} are {d} apart, "
                        f"need > {separation}")

        entries.append(LiftMember(member_index=k, member=member, fiber=fiber,
                                  basepoint=basepoint, pieces=tuple(pieces)))
        for p in pieces:
            if p.piece not in seen:
                seen.add(p.piece)
                all_pieces.append(p.piece)

    out = Cover(m, all_pieces, name=f"{c.name}_lifted")
    trace = LiftTrace(R=R, s=s, entries=tuple(entries))

    invariant, witness = check_equivariance(a, out)
    if not invariant:
        k, g = witness
        raise InternalInvariantError(
            f"lifted cover not invariant: member {k} under {group.elements[g]}")
    out_mesh = mesh(out)
    mesh_bound = 4 * s * (len(group) + 1)
    if not out_mesh < mesh_bound:
        raise InternalInvariantError(
            f"lifted mesh {out_mesh} not below 4s(|F|+1) = {mesh_bound}")
    out_dim = dimension(out)
    in_dim = dimension(c)
    if out_dim > in_dim:
        raise InternalInvariantError(
            f"lifted dimension {out_dim} exceeds input dimension {in_dim}")
    out_lebesgue = lebesgue_number(out)
    if not out_lebesgue >= R:
        raise InternalInvariantError(
            f"lifted Lebesgue number {out_lebesgue} below target {R}")

    cert = certify(out, action=a)
    return out, trace, cert


class SSpace:
    """Weighted disjoint union of finite metric spaces.

    Within component n the metric is untouched; between components n and m
    the distance is d(x, Y_n) + d(y, Y_m) + max(w_n, w_m) where Y_n is the
    chosen basepoint set of component n.  The weights must be strictly
    increasing and each at least its component's basepoint-set diameter;
    that is exactly what makes the triangle inequality go through whichever
    components the three points sit in.
    """

    def __init__(self, components: Sequence[FiniteMetricSpace],
                 basepoints: Sequence[frozenset[int]], weights: Sequence[Scalar],
                 assembled: FiniteMetricSpace, offsets: tuple[int, ...]):
        self.components = tuple(components)
        self.basepoints = tuple(basepoints)
        self.weights = tuple(weights)
        self.assembled = assembled
        self.offsets = offsets

    def global_index(self, component: int, local: int) -> int:
        return self.offsets[component] + local

    def component_of(self, index: int) -> tuple[int, int]:
        for n in range(len(self.components) - 1, -1, -1):
            if index >= self.offsets[n]:
                return n, index - self.offsets[n]
        raise ValueError(f"index {index} out of range")

    def __repr__(self) -> str:
        return (f"SSpace({self.assembled.name!r}, {len(self.components)} components, "
                f"{len(self.assembled)} points)")


def build_sspace(components: Sequence[FiniteMetricSpace],
                 basepoints: Sequence[Iterable[int]], weights: Sequence[Scalar],
                 name: str = "sspace") -> SSpace:
    components = list(components)
    if not components:
        raise ValueError("a weighted union needs at least one component")
    if not (len(basepoints) == len(weights) == len(components)):
        raise ValueError("components, basepoints and weights must have equal length")

    base_sets = []
    for n, (comp, bp) in enumerate(zip(components, basepoints)):
        bp = frozenset(comp.check_point(x) for x in bp)
        if not bp:
            raise ValueError(f"component {n} has an empty basepoint set")
        base_sets.append(bp)
    for n, w in enumerate(weights):
        check_scalar(w, f"weight[{n}]")
        if w <= 0:
            raise ValueError(f"weight[{n}] must be positive, got {w}")
        d = diameter(components[n], base_sets[n])
        if w < d:
            raise ValueError(
                f"weight[{n}] = {w} is below the basepoint-set diameter {d}")
    for n in range(1, len(weights)):
        if not weights[n] > weights[n - 1]:
            raise ValueError(
                f"weights must be strictly increasing, got {weights[n - 1]} then "
                f"{weights[n]} at position {n}")

    offsets = []
    total = 0
    for comp in components:
        offsets.append(total)
        total += len(comp)
    points = []
    for n, comp in enumerate(components):
        points.extend(f"{n}/{p}" for p in comp.points)

    # distance from each point to its component's basepoint set, once
    to_base = []
    for n, comp in enumerate(components):
        to_base.append([min(comp.dist[x][y] for y in base_sets[n])
                        for x in range(len(comp))])

    dist = [[0] * total for _ in range(total)]
    for n, comp_n in enumerate(components):
        for m_, comp_m in enumerate(components):
            wmax = max(weights[n], weights[m_])
            for i in range(len(comp_n)):
                gi = offsets[n] + i
                for j in range(len(comp_m)):
                    gj = offsets[m_] + j
                    if n == m_:
                        dist[gi][gj] = comp_n.dist[i][j]
                    else:
                        dist[gi][gj] = to_base[n][i] + to_base[m_][j] + wmax

    assembled = FiniteMetricSpace(points, dist, name=name)
    return SSpace(components, base_sets, tuple(weights), assembled, tuple(offsets))


def sub_sspace(s: SSpace, count: int, name: str | None = None) -> SSpace:
    """The weighted union of the first `count` components, same weights."""
    if not 1 <= count <= len(s.components):
        raise ValueError(f"component count {count} out of range")
    return build_sspace(s.components[:count], s.basepoints[:count],
                        s.weights[:count],
                        name=name or f"{s.assembled.name}_head{count}")


def sspace_componentwise_action(s: SSpace,
                                actions: Sequence[IsometricAction],
                                name: str | None = None) -> IsometricAction:
    """One group acting on every component at once, blockwise.

    All actions must share the same group table, act on the matching
    components, and preserve each basepoint set (otherwise the cross-
    component distances would not be invariant).
    """
    if len(actions) != len(s.components):
        raise ValueError(f"{len(actions)} actions for {len(s.components)} components")
    group = actions[0].group
    for n, act in enumerate(actions):
        if act.group != group:
            raise ValueError(f"action {n} uses a different group table")
        if act.space != s.components[n]:
            raise ValueError(f"action {n} does not act on component {n}")
        for g in range(len(group)):
            image = {act.perms[g][y] for y in s.basepoints[n]}
            if image != set(s.basepoints[n]):
                raise ValueError(
                    f"basepoint set of component {n} is not invariant under "
                    f"{group.elements[g]}")
    perms = []
    for g in range(len(group)):
        perm = []
        for n, act in enumerate(actions):
            perm.extend(s.offsets[n] + act.perms[g][x]
                        for x in range(len(s.components[n])))
        perms.append(perm)
    label = name or f"{group.name}_on_{s.assembled.name}"
    return IsometricAction(group, s.assembled, perms, name=label)


@dataclass(frozen=True)
class CommuteWitness:
    """Quotient of the union versus union of the quotients, with the explicit
    matching of points.  mapping[i] is the index, in the assembled space of
    component quotients, of quotient point i of the assembled action."""

    whole_quotient: QuotientSpace
    component_quotients: tuple[QuotientSpace, ...]
    quotient_union: SSpace
    mapping: tuple[int, ...]


def sspace_quotient_commute(s: SSpace, actions: Sequence[IsometricAction],
                            name: str | None = None) -> CommuteWitness:
    """Check that quotienting commutes with the weighted union, exactly.

    Left side: quotient of the assembled space under the blockwise action.
    Right side: weighted union of the component quotients, with the images
    of the basepoint sets and the same weights.  The natural point matching
    must preserve every pairwise distance; a mismatch is an implementation
    bug, not a property of the input.
    """
    assembled_action = sspace_componentwise_action(s, actions)
    whole = quotient(assembled_action)

    comp_quotients = tuple(quotient(act) for act in actions)
    image_basepoints = []
    for n, q in enumerate(comp_quotients):
        image_basepoints.append(frozenset(q.orbit_of[y] for y in s.basepoints[n]))
    union = build_sspace([q.space for q in comp_quotients], image_basepoints,
                         s.weights,
                         name=name or f"{s.assembled.name}_quotients")

    mapping = []
    for fiber in whole.fibers:
        n, local = s.component_of(fiber[0])
        mapping.append(union.global_index(n, comp_quotients[n].orbit_of[local]))
    if sorted(mapping) != list(range(len(union.assembled))):
        raise InternalInvariantError("quotient commutation map is not a bijection")
    for i in range(len(mapping)):
        for j in range(len(mapping)):
            left = whole.space.dist[i][j]
            right = union.assembled.dist[mapping[i]][mapping[j]]
            if left != right:
                raise InternalInvariantError(
                    f"quotient commutation is not isometric at pair ({i}, {j}): "
                    f"{left} != {right}")
    return CommuteWitness(whole_quotient=whole, component_quotients=comp_quotients,
                          quotient_union=union, mapping=tuple(mapping))


def restrict_decomposition(s: SSpace, d: Decomposition) -> list[Decomposition]:
    """Cut a decomposition of the union down to each component.

    Pieces are intersected with the component (empty intersections dropped);
    the family count and r are kept.  Distances within a component agree
    with the union's, so disjointness survives restriction.
    """
    if d.space != s.assembled:
        raise ValueError("decomposition does not live on this union")
    out = []
    for n, comp in enumerate(s.components):
        lo = s.offsets[n]
        hi = lo + len(comp)
        families = []
        for family in d.families:
            pieces = []
            for piece in family:
                local = frozenset(x - lo for x in piece if lo <= x < hi)
                if local:
                    pieces.append(local)
            families.append(pieces)
        out.append(Decomposition(comp, d.r, families,
                                 name=f"{d.name}_component{n}"))
    return out


def merge_decompositions(s: SSpace, head: Decomposition,
                         tails: Sequence[Decomposition], r: Scalar) -> Decomposition:
    """Combine a decomposition of the first components with per-component
    decompositions of the rest.

    The union's cross-component distances are at least the larger weight
    involved, so once the first tail component's weight exceeds r, pieces
    from different components can never violate r-disjointness; within a
    family everything else is inherited.  Family counts must match.
    """
    check_scalar(r, "r")
    n_head = len(s.components) - len(tails)
    if n_head < 1:
        raise ValueError(f"{len(tails)} tail decompositions for "
                         f"{len(s.components)} components leave no head")
    head_space = sub_sspace(s, n_head).assembled
    if head.space != head_space:
        raise ValueError(f"head decomposition does not match the first {n_head} "
                         f"components")
    for i, tail in enumerate(tails):
        if tail.space != s.components[n_head + i]:
            raise ValueError(f"tail {i} does not match component {n_head + i}")
    if head.r < r:
        raise ValueError(f"head is only valid at r = {head.r}, below {r}")
    for i, tail in enumerate(tails):
        if tail.r < r:
            raise ValueError(f"tail {i} is only valid at r = {tail.r}, below {r}")
    issues = validate_decomposition(head)
    for i, tail in enumerate(tails):
        issues.extend(validate_decomposition(tail))
    if issues:
        raise ValueError("invalid input decomposition: "
                         + "; ".join(v.message for v in issues))
    counts = {len(head.families)} | {len(t.families) for t in tails}
    if len(counts) != 1:
        raise ValueError(f"family counts differ: {sorted(counts)}")
    if tails and not s.weights[n_head] > r:
        raise ValueError(
            f"first tail weight {s.weights[n_head]} must exceed r = {r}")

    n_families = len(head.families)
    families: list[list[frozenset[int]]] = [[] for _ in range(n_families)]
    for fi, family in enumerate(head.families):
        # head indices coincide with union indices: components keep their order
        families[fi].extend(family)
    for i, tail in enumerate(tails):
        lo = s.offsets[n_head + i]
        for fi, family in enumerate(tail.families):
            families[fi].extend(frozenset(lo + x for x in piece) for piece in family)

    merged = Decomposition(s.assembled, r, families, name=f"{head.name}_merged")
    issues = validate_decomposition(merged)
    if issues:
        raise InternalInvariantError(
            "merged decomposition invalid: " + "; ".join(v.message for v in issues))
    return merged
