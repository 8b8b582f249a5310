"""Covers and decompositions of finite metric spaces, with exact certificates.

The three certified quantities of a cover are its dimension (largest point
multiplicity minus one), its mesh (largest member diameter) and its Lebesgue
number.  The Lebesgue number is computed by the complement-distance formula

    L = min over points x of  max over members U of  d(x, X \\ U)

with d(x, emptyset) = INF, which makes the contract exact: for every R <= L
each open R-ball around any point sits inside some member, and for every
R > L some open R-ball does not.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InternalInvariantError, Violation
from .groups import IsometricAction
from .metric import INF, FiniteMetricSpace, Scalar, check_scalar, diameter, set_distance


class Cover:
    """An ordered list of members (point index sets) over a fixed space.

    Construction checks only that indices are in range; emptiness, coverage
    and duplicates are validate_cover's job so bad input can be reported
    instead of half-rejected.
    """

    def __init__(self, space: FiniteMetricSpace, members: Iterable[Iterable[int]],
                 name: str = "cover"):
        self.space = space
        norm = []
        for k, member in enumerate(members):
            member = frozenset(member)
            for x in member:
                if not isinstance(x, int) or isinstance(x, bool) or not 0 <= x < len(space):
                    raise ValueError(f"member {k} contains {x!r}, not a point index "
                                     f"of {space.name!r}")
            norm.append(member)
        self.members = tuple(norm)
        self.name = str(name)

    def __len__(self) -> int:
        return len(self.members)

    def __repr__(self) -> str:
        return f"Cover({self.name!r}, {len(self.members)} members over {self.space.name!r})"


class Decomposition:
    """Families of pieces witnessing "asymptotic dimension <= n at scale r":
    the pieces of one family must be pairwise more than r apart, and all
    pieces together must cover the space.  Families may be empty.
    """

    def __init__(self, space: FiniteMetricSpace, r: Scalar,
                 families: Iterable[Iterable[Iterable[int]]], name: str = "decomposition"):
        self.space = space
        check_scalar(r, "r")
        if r < 0:
            raise ValueError(f"r must be >= 0, got {r}")
        self.r = r
        fams = []
        for fi, family in enumerate(families):
            pieces = []
            for pi, piece in enumerate(family):
                piece = frozenset(piece)
                for x in piece:
                    if not isinstance(x, int) or isinstance(x, bool) \
                            or not 0 <= x < len(space):
                        raise ValueError(f"family {fi} piece {pi} contains {x!r}, "
                                         f"not a point index of {space.name!r}")
                pieces.append(piece)
            fams.append(tuple(pieces))
        self.families = tuple(fams)
        self.name = str(name)

    def __repr__(self) -> str:
        return (f"Decomposition({self.name!r}, {len(self.families)} families "
                f"at r={self.r} over {self.space.name!r})")


@dataclass(frozen=True)
class CoverCertificate:
    """Certified quantities of a cover.  Every field is recomputable from the
    cover itself, and verify_certificate insists on exact agreement; nothing
    here is ever trusted from a file."""

    dimension: int
    lebesgue: Scalar | float
    mesh: Scalar
    meet_radius: Scalar | None = None
    ball_meet: int | None = None
    equivariant: bool | None = None


def validate_cover(c: Cover) -> list[Violation]:
    out: list[Violation] = []
    seen: dict[frozenset, int] = {}
    for k, member in enumerate(c.members):
        if not member:
            out.append(Violation("empty-member", (k,), f"member {k} is empty"))
        if member in seen:
            out.append(Violation("duplicate-member", (seen[member], k),
                                 f"members {seen[member]} and {k} are the same point set"))
        else:
            seen[member] = k
    covered = frozenset().union(*c.members) if c.members else frozenset()
    missing = sorted(set(range(len(c.space))) - covered)
    if missing:
        out.append(Violation("coverage", tuple(missing),
                             "points not covered: "
                             + ", ".join(c.space.points[x] for x in missing)))
    return out


def dimension(c: Cover) -> int:
    """Largest number of members through one point, minus one."""
    best = 0
    for x in range(len(c.space)):
        count = sum(1 for member in c.members if x in member)
        if count > best:
            best = count
    return best - 1


def mesh(c: Cover) -> Scalar:
    """Largest member diameter."""
    best: Scalar = 0
    for member in c.members:
        d = diameter(c.space, member)
        if d > best:
            best = d
    return best


def lebesgue_number(c: Cover):
    """Complement-distance Lebesgue number; INF when a member is the whole space."""
    if not c.members:
        raise ValueError("Lebesgue number of a cover with no members is undefined")
    m = c.space
    everything = frozenset(range(len(m)))
    complements = [everything - member for member in c.members]
    overall = None
    for x in range(len(m)):
        best_for_x = None
        for comp in complements:
            v = set_distance(m, (x,), comp)
            if best_for_x is None or v > best_for_x:
                best_for_x = v
        if overall is None or best_for_x < overall:
            overall = best_for_x
    return overall


def ball_meet_count(c: Cover, radius: Scalar) -> int:
    """Largest number of members met by one open ball of the given radius."""
    check_scalar(radius, "radius")
    m = c.space
    best = 0
    for x in range(len(m)):
        count = sum(1 for member in c.members if set_distance(m, (x,), member) < radius)
        if count > best:
            best = count
    return best


def is_r_disjoint(space: FiniteMetricSpace, family: Sequence[Iterable[int]],
                  r: Scalar) -> tuple[bool, tuple | None]:
    """Whether the sets are pairwise more than r apart.  On failure the witness
    is (i, j, distance) for the first offending pair in index order; empty sets
    never collide (their distance is INF)."""
    check_scalar(r, "r")
    sets = [frozenset(piece) for piece in family]
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            d = set_distance(space, sets[i], sets[j])
            if not d > r:
                return False, (i, j, d)
    return True, None


def validate_decomposition(d: Decomposition) -> list[Violation]:
    out: list[Violation] = []
    covered: set[int] = set()
    for fi, family in enumerate(d.families):
        ok, witness = is_r_disjoint(d.space, family, d.r)
        if not ok:
            i, j, dist = witness
            out.append(Violation(
                "disjointness", (fi, i, j),
                f"family {fi}: pieces {i} and {j} are {dist} apart, need > {d.r}"))
        for piece in family:
            covered.update(piece)
    missing = sorted(set(range(len(d.space))) - covered)
    if missing:
        out.append(Violation("coverage", tuple(missing),
                             "points not covered: "
                             + ", ".join(d.space.points[x] for x in missing)))
    return out


def decomposition_to_cover(d: Decomposition) -> tuple[Cover, CoverCertificate]:
    """Thicken every piece by a closed r/4-neighborhood and pool the pieces.

    The quarter is what makes both certified bounds unconditional: thickened
    pieces of one family stay disjoint (else the originals were within r/2),
    so the dimension is at most families-1, and every open r/4-ball around a
    point lands inside that point's thickened piece, so the Lebesgue number
    is at least r/4.
    """
    issues = validate_decomposition(d)
    if issues:
        raise ValueError("invalid decomposition: " + "; ".join(v.message for v in issues))
    t = Fraction(d.r) / 4
    m = d.space
    members = []
    seen = set()
    for family in d.families:
        for piece in family:
            if not piece:
                continue
            grown = frozenset(x for x in range(len(m))
                              if set_distance(m, (x,), piece) <= t)
            if grown not in seen:
                seen.add(grown)
                members.append(grown)
    out = Cover(m, members, name=f"{d.name}_thickened")
    cert = certify(out)
    if cert.dimension > len(d.families) - 1:
        raise InternalInvariantError(
            f"thickened cover has dimension {cert.dimension} from "
            f"{len(d.families)} families")
    if not cert.lebesgue >= t:
        raise InternalInvariantError(
            f"thickened cover has Lebesgue number {cert.lebesgue} < {t}")
    return out, cert


def check_equivariance(a: IsometricAction, c: Cover) -> tuple[bool, tuple | None]:
    """Whether the member family is preserved by every group element, as a
    family of sets.  Witness on failure: (member index, group element)."""
    if c.space != a.space:
        raise ValueError("cover and action live on different spaces")
    family = set(c.members)
    for k, member in enumerate(c.members):
        for g in range(len(a.group)):
            image = frozenset(a.perms[g][x] for x in member)
            if image not in family:
                return False, (k, g)
    return True, None


def certify(c: Cover, meet_radius: Scalar | None = None,
            action: IsometricAction | None = None) -> CoverCertificate:
    """Recompute every certified quantity from the raw cover."""
    equivariant = None
    if action is not None:
        equivariant = check_equivariance(action, c)[0]
    meet = None
    if meet_radius is not None:
        check_scalar(meet_radius, "meet_radius")
        meet = ball_meet_count(c, meet_radius)
    return CoverCertificate(
        dimension=dimension(c),
        lebesgue=lebesgue_number(c),
        mesh=mesh(c),
        meet_radius=meet_radius,
        ball_meet=meet,
        equivariant=equivariant,
    )


def verify_certificate(c: Cover, cert: CoverCertificate,
                       action: IsometricAction | None = None) -> list[Violation]:
    """Recompute and compare; any disagreement is a violation."""
    fresh = certify(c, meet_radius=cert.meet_radius, action=action)
    out = []
    for field in ("dimension", "lebesgue", "mesh", "ball_meet", "equivariant"):
        claimed = getattr(cert, field)
        actual = getattr(fresh, field)
        if claimed != actual:
            out.append(Violation("certificate", (field,),
                                 f"{field}: certificate says {claimed}, "
                                 f"recomputed {actual}"))
    return out
