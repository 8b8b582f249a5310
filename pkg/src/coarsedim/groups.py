"""Finite groups as explicit multiplication tables, and their isometric actions.

Everything here works over element indices into a fixed ordering; the orders
involved are tiny (quotient constructions keep |G| in the single digits), so
exhaustive checks and brute-force searches are the honest tool.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Sequence

from .errors import CapExceededError, Violation
from .metric import FiniteMetricSpace


class FiniteGroup:
    """Elements named by strings, multiplication as an index table.

    mul[a][b] is the index of (a * b).  A two-sided identity must exist or
    construction fails; associativity and inverses are validate_group's job,
    so broken tables can still be loaded and reported on.
    """

    def __init__(self, elements: Sequence[str], mul: Sequence[Sequence[int]],
                 name: str = "group"):
        self.elements = tuple(str(e) for e in elements)
        if not self.elements:
            raise ValueError("a group needs at least one element")
        if len(set(self.elements)) != len(self.elements):
            raise ValueError("element names must be distinct")
        n = len(self.elements)
        if len(mul) != n:
            raise ValueError(f"multiplication table has {len(mul)} rows for {n} elements")
        rows = []
        for i, row in enumerate(mul):
            row = tuple(row)
            if len(row) != n:
                raise ValueError(f"multiplication table row {i} has length {len(row)}")
            for v in row:
                if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v < n:
                    raise ValueError(f"table entry {v!r} in row {i} is not an element index")
            rows.append(row)
        self.mul_table = tuple(rows)
        self.name = str(name)
        self._index = {e: i for i, e in enumerate(self.elements)}
        self.identity = self._find_identity()

    def _find_identity(self) -> int:
        for e in range(len(self.elements)):
            row_ok = all(self.mul_table[e][a] == a for a in range(len(self.elements)))
            col_ok = all(self.mul_table[a][e] == a for a in range(len(self.elements)))
            if row_ok and col_ok:
                return e
        raise ValueError(f"group {self.name!r} has no two-sided identity")

    def __len__(self) -> int:
        return len(self.elements)

    def mul(self, a: int, b: int) -> int:
        return self.mul_table[a][b]

    def inverse(self, a: int) -> int:
        for b in range(len(self.elements)):
            if self.mul_table[a][b] == self.identity and self.mul_table[b][a] == self.identity:
                return b
        raise ValueError(f"element {self.elements[a]!r} of {self.name!r} has no inverse")

    def element_order(self, a: int) -> int:
        seen = 1
        cur = a
        while cur != self.identity:
            cur = self.mul_table[cur][a]
            seen += 1
            if seen > len(self.elements):
                raise ValueError(f"element {self.elements[a]!r} generates no finite cycle; "
                                 f"table is not a group")
        return seen

    def index(self, element: str) -> int:
        try:
            return self._index[element]
        except KeyError:
            raise KeyError(f"unknown element {element!r} in group {self.name!r}") from None

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteGroup):
            return NotImplemented
        return self.elements == other.elements and self.mul_table == other.mul_table

    __hash__ = None

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name!r}, order {len(self)})"


def validate_group(g: FiniteGroup) -> list[Violation]:
    """Exhaustive associativity and inverse check."""
    out: list[Violation] = []
    n = len(g)
    for a in range(n):
        for b in range(n):
            for c in range(n):
                left = g.mul(g.mul(a, b), c)
                right = g.mul(a, g.mul(b, c))
                if left != right:
                    out.append(Violation(
                        "associativity", (a, b, c),
                        f"({g.elements[a]}*{g.elements[b]})*{g.elements[c]} = "
                        f"{g.elements[left]} but {g.elements[a]}*({g.elements[b]}*"
                        f"{g.elements[c]}) = {g.elements[right]}"))
    for a in range(n):
        has = any(g.mul(a, b) == g.identity and g.mul(b, a) == g.identity for b in range(n))
        if not has:
            out.append(Violation("inverse", (a,),
                                 f"element {g.elements[a]} has no two-sided inverse"))
    return out


def cyclic_group(n: int, name: str | None = None) -> FiniteGroup:
    if n < 1:
        raise ValueError("cyclic group order must be >= 1")
    mul = [[(a + b) % n for b in range(n)] for a in range(n)]
    return FiniteGroup([str(i) for i in range(n)], mul, name=name or f"Z{n}")


def dihedral_group(n: int, name: str | None = None) -> FiniteGroup:
    """Symmetries of the n-cycle: n rotations r{k}, n reflections s{k}.

    Built from the permutations themselves (x -> x+k and x -> k-x mod n),
    so the table is correct by construction.  Needs n >= 3: on fewer points
    the 2n symmetries are not distinct permutations.
    """
    if n < 3:
        raise ValueError("dihedral parameter must be >= 3")
    perms = []
    names = []
    for k in range(n):
        perms.append(tuple((x + k) % n for x in range(n)))
        names.append(f"r{k}")
    for k in range(n):
        perms.append(tuple((k - x) % n for x in range(n)))
        names.append(f"s{k}")
    lookup = {p: i for i, p in enumerate(perms)}
    mul = []
    for p in perms:
        row = []
        for q in perms:
            composed = tuple(p[q[x]] for x in range(n))
            row.append(lookup[composed])
        mul.append(row)
    return FiniteGroup(names, mul, name=name or f"D{n}")


class IsometricAction:
    """A finite group acting on a finite metric space by point permutations.

    perms[g][x] is the image of point x under group element g.  Construction
    checks shapes and that each row is a permutation; the action law and the
    isometry property are validate_action's job.
    """

    def __init__(self, group: FiniteGroup, space: FiniteMetricSpace,
                 perms: Sequence[Sequence[int]], name: str = "action"):
        self.group = group
        self.space = space
        if len(perms) != len(group):
            raise ValueError(f"{len(perms)} permutations for {len(group)} group elements")
        n = len(space)
        rows = []
        for g, perm in enumerate(perms):
            perm = tuple(perm)
            if len(perm) != n or sorted(perm) != list(range(n)):
                raise ValueError(
                    f"permutation for {group.elements[g]!r} is not a bijection on "
                    f"{n} points")
            rows.append(perm)
        self.perms = tuple(rows)
        self.name = str(name)

    def apply(self, g: int, x: int) -> int:
        return self.perms[g][x]

    def __repr__(self) -> str:
        return (f"IsometricAction({self.name!r}: {self.group.name!r} "
                f"on {self.space.name!r})")


def validate_action(a: IsometricAction) -> list[Violation]:
    """Check identity, the action law g(hx) = (gh)x, and isometry, exhaustively."""
    out: list[Violation] = []
    g, m = a.group, a.space
    n = len(m)
    ident = a.perms[g.identity]
    for x in range(n):
        if ident[x] != x:
            out.append(Violation("identity-action", (x,),
                                 f"identity moves {m.points[x]} to {m.points[ident[x]]}"))
    for h in range(len(g)):
        for k in range(len(g)):
            hk = g.mul(h, k)
            for x in range(n):
                if a.perms[h][a.perms[k][x]] != a.perms[hk][x]:
                    out.append(Violation(
                        "action-law", (h, k, x),
                        f"{g.elements[h]}({g.elements[k]} {m.points[x]}) != "
                        f"({g.elements[h]}{g.elements[k]}) {m.points[x]}"))
    for h in range(len(g)):
        perm = a.perms[h]
        for x in range(n):
            for y in range(x + 1, n):
                if m.dist[perm[x]][perm[y]] != m.dist[x][y]:
                    out.append(Violation(
                        "isometry", (h, x, y),
                        f"{g.elements[h]} changes d({m.points[x]},{m.points[y]}) from "
                        f"{m.dist[x][y]} to {m.dist[perm[x]][perm[y]]}"))
    return out


def orbits(a: IsometricAction) -> list[tuple[int, ...]]:
    """Orbits as sorted index tuples, ordered by their smallest point."""
    seen = set()
    out = []
    for x in range(len(a.space)):
        if x in seen:
            continue
        orb = sorted({a.perms[g][x] for g in range(len(a.group))})
        seen.update(orb)
        out.append(tuple(orb))
    return out


class QuotientSpace:
    """The quotient metric space of an isometric action, with its fiber data.

    space is the quotient itself; orbit_of maps a source point index to its
    quotient point index; fibers[i] lists the source points over quotient
    point i (sorted); representatives[i] is the lowest-index fiber point,
    which also names the quotient point.
    """

    def __init__(self, space: FiniteMetricSpace, source: FiniteMetricSpace,
                 orbit_of: tuple[int, ...], fibers: tuple[tuple[int, ...], ...]):
        self.space = space
        self.source = source
        self.orbit_of = orbit_of
        self.fibers = fibers
        self.representatives = tuple(f[0] for f in fibers)

    def fiber_of_set(self, qpoints: Iterable[int]) -> frozenset[int]:
        """Preimage of a set of quotient points, as source point indices."""
        out: set[int] = set()
        for q in qpoints:
            out.update(self.fibers[q])
        return frozenset(out)

    def __repr__(self) -> str:
        return f"QuotientSpace({self.space.name!r}, {len(self.space)} orbits)"


def quotient(a: IsometricAction, name: str | None = None) -> QuotientSpace:
    """Quotient of the space by the action: points are orbits, and the
    distance between two orbits is the smallest distance between them.

    For a valid isometric action that minimum does not depend on which
    member of either orbit you measure from, and the result is again a
    genuine metric.
    """
    orbs = orbits(a)
    m = a.space
    qname = name if name is not None else f"{m.name}_mod_{a.group.name}"
    qpoints = [m.points[orb[0]] for orb in orbs]
    dist = []
    for oa in orbs:
        row = []
        for ob in orbs:
            if oa is ob:
                row.append(0)
                continue
            best = None
            for x in oa:
                dx = m.dist[x]
                for y in ob:
                    if best is None or dx[y] < best:
                        best = dx[y]
            row.append(best)
        dist.append(row)
    orbit_of = [0] * len(m)
    for qi, orb in enumerate(orbs):
        for x in orb:
            orbit_of[x] = qi
    return QuotientSpace(FiniteMetricSpace(qpoints, dist, name=qname), m,
                         tuple(orbit_of), tuple(orbs))


def generated_subgroup(g: FiniteGroup, generators: Iterable[int]) -> tuple[int, ...]:
    """Smallest subgroup containing the generators, by closure iteration."""
    current = {g.identity}
    for x in generators:
        if not 0 <= x < len(g):
            raise ValueError(f"generator index {x} out of range")
        current.add(x)
        current.add(g.inverse(x))
    while True:
        new = set()
        for a in current:
            for b in current:
                p = g.mul(a, b)
                if p not in current:
                    new.add(p)
        if not new:
            return tuple(sorted(current))
        current |= new


def is_subgroup(g: FiniteGroup, members: Iterable[int]) -> bool:
    members = set(members)
    if g.identity not in members:
        return False
    for a in members:
        if g.inverse(a) not in members:
            return False
        for b in members:
            if g.mul(a, b) not in members:
                return False
    return True


def coset_representatives(g: FiniteGroup, subgroup: Iterable[int]) -> list[int]:
    """Lowest-index representative of each left coset f*H, in index order."""
    sub = sorted(set(subgroup))
    if not is_subgroup(g, sub):
        raise ValueError(f"{[g.elements[x] for x in sub]} is not a subgroup of {g.name!r}")
    assigned = set()
    reps = []
    for f in range(len(g)):
        if f in assigned:
            continue
        reps.append(f)
        assigned.update(g.mul(f, h) for h in sub)
    return reps


def find_isomorphism(g1: FiniteGroup, g2: FiniteGroup,
                     max_order: int = 12) -> dict[int, int] | None:
    """Brute-force isomorphism search, None if the groups are not isomorphic.

    Candidate images are pruned by element order, and the map is grown from a
    small generating set, so the search is comfortable for the orders this
    toolkit works at (the cap is a guardrail, not a tuning knob).
    """
    if len(g1) > max_order or len(g2) > max_order:
        raise CapExceededError(
            f"isomorphism search is capped at order {max_order}, "
            f"got orders {len(g1)} and {len(g2)}")
    if len(g1) != len(g2):
        return None
    if sorted(g1.element_order(a) for a in range(len(g1))) != \
            sorted(g2.element_order(a) for a in range(len(g2))):
        return None

    gens: list[int] = []
    generated = {g1.identity}
    for a in range(len(g1)):
        if a not in generated:
            gens.append(a)
            generated = set(generated_subgroup(g1, gens))
        if len(generated) == len(g1):
            break

    orders1 = [g1.element_order(a) for a in range(len(g1))]
    orders2 = [g2.element_order(a) for a in range(len(g2))]
    candidates = [[b for b in range(len(g2)) if orders2[b] == orders1[a]] for a in gens]

    for images in itertools.product(*candidates):
        phi = _extend_homomorphism(g1, g2, gens, images)
        if phi is not None:
            return phi
    return None


def _extend_homomorphism(g1: FiniteGroup, g2: FiniteGroup,
                         gens: Sequence[int], images: Sequence[int]) -> dict[int, int] | None:
    """Grow generator images to a full map by products; check it is a bijective
    homomorphism; None on any conflict."""
    phi = {g1.identity: g2.identity}
    for a, b in zip(gens, images):
        if phi.get(a, b) != b:
            return None
        phi[a] = b
    frontier = list(phi)
    while frontier:
        new = []
        for x in frontier:
            for a, b in zip(gens, images):
                y = g1.mul(x, a)
                img = g2.mul(phi[x], b)
                if y in phi:
                    if phi[y] != img:
                        return None
                else:
                    phi[y] = img
                    new.append(y)
        frontier = new
    if len(phi) != len(g1) or len(set(phi.values())) != len(g1):
        return None
    for x in range(len(g1)):
        for y in range(len(g1)):
            if phi[g1.mul(x, y)] != g2.mul(phi[x], phi[y]):
                return None
    return phi


class DirectSum:
    """Direct sum of finite groups, with the component injections.

    group is the assembled table; injections[j][a] is the index, in the sum,
    of the tuple that is a in component j and identity elsewhere; project
    splits a sum element back into component indices.
    """

    def __init__(self, components: Sequence[FiniteGroup], name: str | None = None):
        self.components = tuple(components)
        if not self.components:
            raise ValueError("direct sum needs at least one component")
        sizes = [len(g) for g in self.components]
        total = 1
        for s in sizes:
            total *= s
        self._sizes = sizes
        tuples = list(itertools.product(*[range(s) for s in sizes]))
        self._tuple_index = {t: i for i, t in enumerate(tuples)}
        self._tuples = tuples
        names = []
        for t in tuples:
            names.append("(" + ",".join(self.components[j].elements[t[j]]
                                        for j in range(len(sizes))) + ")")
        mul = []
        for t in tuples:
            row = []
            for u in tuples:
                prod = tuple(self.components[j].mul(t[j], u[j]) for j in range(len(sizes)))
                row.append(self._tuple_index[prod])
            mul.append(row)
        label = name or "+".join(g.name for g in self.components)
        self.group = FiniteGroup(names, mul, name=label)
        self.injections = []
        for j, g in enumerate(self.components):
            inj = []
            for a in range(len(g)):
                t = tuple(a if jj == j else self.components[jj].identity
                          for jj in range(len(sizes)))
                inj.append(self._tuple_index[t])
            self.injections.append(tuple(inj))

    def project(self, element: int) -> tuple[int, ...]:
        return self._tuples[element]


def direct_sum(components: Sequence[FiniteGroup], max_order: int = 64,
               name: str | None = None) -> DirectSum:
    total = 1
    for g in components:
        total *= len(g)
    if total > max_order:
        raise CapExceededError(f"direct sum of order {total} exceeds the cap {max_order}")
    return DirectSum(components, name=name)


def extend_action(a: IsometricAction, dsum: DirectSum, component: int,
                  iso: dict[int, int] | None = None,
                  name: str | None = None) -> IsometricAction:
    """Let the full direct sum act on a's space through one of its components.

    Component `component` of the sum acts as a's group does (via iso when the
    tables differ); every other component acts trivially.  This is an action
    because projecting to one component is a homomorphism.
    """
    if not 0 <= component < len(dsum.components):
        raise ValueError(f"component index {component} out of range")
    comp = dsum.components[component]
    if iso is None:
        if comp == a.group:
            iso = {i: i for i in range(len(comp))}
        else:
            iso = find_isomorphism(comp, a.group)
            if iso is None:
                raise ValueError(
                    f"component {comp.name!r} is not isomorphic to the acting "
                    f"group {a.group.name!r}")
    perms = []
    for elt in range(len(dsum.group)):
        part = dsum.project(elt)[component]
        perms.append(a.perms[iso[part]])
    label = name or f"{dsum.group.name}_via_{a.name}"
    return IsometricAction(dsum.group, a.space, perms, name=label)
