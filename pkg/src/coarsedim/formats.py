"""JSON formats for every object kind, and the named-object workspace.

All scalars are serialized as exact strings ("5", "5/4", "inf"); nothing in
a file is a float.  The writer is canonical (fixed key order, two-space
indentation, trailing newline), so serialize after deserialize reproduces a
written file byte for byte.  Certificates are never trusted on load: their
fields are recomputed from the referenced cover and any disagreement is a
validation failure.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from typing import Sequence

from .constructions import LiftMember, LiftPiece, LiftTrace, SSpace, build_sspace
from .covers import Cover, CoverCertificate, Decomposition, validate_cover, \
    validate_decomposition, verify_certificate
from .errors import ResolutionError, Violation
from .estimation import DimensionProfile, FamilyProfile, GapReport, Infeasible, \
    ProfileEntry
from .groups import FiniteGroup, IsometricAction, validate_action, validate_group
from .metric import INF, FiniteMetricSpace, Scalar, is_scalar, validate_metric

FORMAT_TAG = "coarsedim/1"

KIND_ORDER = {"space": 0, "group": 0, "action": 1, "sspace": 2,
              "cover": 3, "decomposition": 3, "certificate": 4,
              "lift_trace": 4, "profile": 4}


class FormatError(ValueError):
    """Malformed or invalid file content; may carry validator violations."""

    def __init__(self, message: str, violations: Sequence[Violation] = ()):
        super().__init__(message)
        self.violations = list(violations)


def scalar_str(value) -> str:
    if value == INF:
        return "inf"
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    if is_scalar(value):
        return str(value)
    raise TypeError(f"not an exact scalar: {value!r}")


def parse_scalar(text: str):
    if not isinstance(text, str):
        raise FormatError(f"scalar must be a string, got {text!r}")
    if text == "inf":
        return INF
    try:
        if "/" in text:
            return Fraction(text)
        return int(text)
    except (ValueError, ZeroDivisionError):
        raise FormatError(f"bad scalar {text!r}") from None


def _opt_scalar_str(value) -> str | None:
    return None if value is None else scalar_str(value)


def _opt_parse_scalar(text):
    return None if text is None else parse_scalar(text)


def dumps(d: dict) -> str:
    return json.dumps(d, indent=2, ensure_ascii=False) + "\n"


def _require(d: dict, key: str, kind: str):
    if key not in d:
        raise FormatError(f"{kind} file is missing {key!r}")
    return d[key]


# ---------------------------------------------------------------- space

def space_to_dict(m: FiniteMetricSpace) -> dict:
    return {
        "format": FORMAT_TAG,
        "kind": "space",
        "name": m.name,
        "points": list(m.points),
        "dist": [[scalar_str(v) for v in row] for row in m.dist],
    }


def space_from_dict(d: dict) -> FiniteMetricSpace:
    points = _require(d, "points", "space")
    dist = [[parse_scalar(v) for v in row] for row in _require(d, "dist", "space")]
    try:
        return FiniteMetricSpace(points, dist, name=_require(d, "name", "space"))
    except (ValueError, TypeError) as exc:
        raise FormatError(f"bad space: {exc}") from None


# ---------------------------------------------------------------- group

def group_to_dict(g: FiniteGroup) -> dict:
    return {
        "format": FORMAT_TAG,
        "kind": "group",
        "name": g.name,
        "elements": list(g.elements),
        "mul": [list(row) for row in g.mul_table],
    }


def group_from_dict(d: dict) -> FiniteGroup:
    try:
        return FiniteGroup(_require(d, "elements", "group"), _require(d, "mul", "group"),
                           name=_require(d, "name", "group"))
    except (ValueError, TypeError) as exc:
        raise FormatError(f"bad group: {exc}") from None


# ---------------------------------------------------------------- action

def action_to_dict(a: IsometricAction) -> dict:
    return {
        "format": FORMAT_TAG,
        "kind": "action",
        "name": a.name,
        "group": a.group.name,
        "space": a.space.name,
        "perm": {a.group.elements[g]: list(a.perms[g]) for g in range(len(a.group))},
    }


def action_from_dict(d: dict, ws: "Workspace") -> IsometricAction:
    group = ws.get("group", _require(d, "group", "action"))
    space = ws.get("space", _require(d, "space", "action"))
    perm_map = _require(d, "perm", "action")
    perms = []
    for element in group.elements:
        if element not in perm_map:
            raise FormatError(f"action is missing the permutation for {element!r}")
        perms.append(perm_map[element])
    try:
        return IsometricAction(group, space, perms, name=_require(d, "name", "action"))
    except (ValueError, TypeError) as exc:
        raise FormatError(f"bad action: {exc}") from None


# ---------------------------------------------------------------- cover

def cover_to_dict(c: Cover) -> dict:
    return {
        "format": FORMAT_TAG,
        "kind": "cover",
        "name": c.name,
        "space": c.space.name,
        "members": [sorted(member) for member in c.members],
    }


def cover_from_dict(d: dict, ws: "Workspace") -> Cover:
    space = ws.get("space", _require(d, "space", "cover"))
    try:
        return Cover(space, _require(d, "members", "cover"),
                     name=_require(d, "name", "cover"))
    except (ValueError, TypeError) as exc:
        raise FormatError(f"bad cover: {exc}") from None


# ---------------------------------------------------------------- decomposition

def decomposition_to_dict(d: Decomposition) -> dict:
    return {
        "format": FORMAT_TAG,
        "kind": "decomposition",
        "name": d.name,
        "space": d.space.name,
        "r": scalar_str(d.r),
        "families": [[sorted(piece) for piece in family] for family in d.families],
    }


def decomposition_from_dict(d: dict, ws: "Workspace") -> Decomposition:
    space = ws.get("space", _require(d, "space", "decomposition"))
    try:
        return Decomposition(space, parse_scalar(_require(d, "r", "decomposition")),
                             _require(d, "families", "decomposition"),
                             name=_require(d, "name", "decomposition"))
    except (ValueError, TypeError) as exc:
        raise FormatError(f"bad decomposition: {exc}") from None


# ---------------------------------------------------------------- sspace

def sspace_to_dict(s: SSpace, name: str | None = None) -> dict:
    return {
        "format": FORMAT_TAG,
        "kind": "sspace",
        "name": name or s.assembled.name,
        "components": [comp.name for comp in s.components],
        "basepoints": [sorted(bp) for bp in s.basepoints],
        "weights": [scalar_str(w) for w in s.weights],
    }


def sspace_from_dict(d: dict, ws: "Workspace") -> SSpace:
    components = [ws.get("space", cname)
                  for cname in _require(d, "components", "sspace")]
    basepoints = _require(d, "basepoints", "sspace")
    weights = [parse_scalar(w) for w in _require(d, "weights", "sspace")]
    try:
        return build_sspace(components, basepoints, weights,
                            name=_require(d, "name", "sspace"))
    except (ValueError, TypeError) as exc:
        raise FormatError(f"bad sspace: {exc}") from None


# ---------------------------------------------------------------- certificate

def certificate_to_dict(cert: CoverCertificate, cover_name: str, name: str,
                        action_name: str | None = None) -> dict:
    return {
        "format": FORMAT_TAG,
        "kind": "certificate",
        "name": name,
        "cover": cover_name,
        "action": action_name,
        "dimension": cert.dimension,
        "lebesgue": scalar_str(cert.lebesgue),
        "mesh": scalar_str(cert.mesh),
        "meet_radius": _opt_scalar_str(cert.meet_radius),
        "ball_meet": cert.ball_meet,
        "equivariant": cert.equivariant,
    }


def certificate_from_dict(d: dict) -> CoverCertificate:
    """Rebuild the claimed certificate; the caller still has to verify it
    against the referenced cover (load_entry does)."""
    return CoverCertificate(
        dimension=_require(d, "dimension", "certificate"),
        lebesgue=parse_scalar(_require(d, "lebesgue", "certificate")),
        mesh=parse_scalar(_require(d, "mesh", "certificate")),
        meet_radius=_opt_parse_scalar(d.get("meet_radius")),
        ball_meet=d.get("ball_meet"),
        equivariant=d.get("equivariant"),
    )


# ---------------------------------------------------------------- lift trace

def lift_trace_to_dict(trace: LiftTrace, name: str, action_name: str,
                       source_cover: str, lifted_cover: str) -> dict:
    return {
        "format": FORMAT_TAG,
        "kind": "lift_trace",
        "name": name,
        "action": action_name,
        "source_cover": source_cover,
        "cover": lifted_cover,
        "R": scalar_str(trace.R),
        "s": scalar_str(trace.s),
        "members": [
            {
                "member": sorted(entry.member),
                "fiber": sorted(entry.fiber),
                "basepoint": entry.basepoint,
                "pieces": [
                    {
                        "rep": piece.rep,
                        "subgroup": list(piece.subgroup),
                        "piece": sorted(piece.piece),
                    }
                    for piece in entry.pieces
                ],
            }
            for entry in trace.entries
        ],
    }


def lift_trace_from_dict(d: dict) -> LiftTrace:
    entries = []
    for k, entry in enumerate(_require(d, "members", "lift_trace")):
        pieces = tuple(
            LiftPiece(rep=p["rep"], subgroup=tuple(p["subgroup"]),
                      piece=frozenset(p["piece"]))
            for p in entry["pieces"])
        entries.append(LiftMember(member_index=k,
                                  member=frozenset(entry["member"]),
                                  fiber=frozenset(entry["fiber"]),
                                  basepoint=entry["basepoint"],
                                  pieces=pieces))
    return LiftTrace(R=parse_scalar(_require(d, "R", "lift_trace")),
                     s=parse_scalar(_require(d, "s", "lift_trace")),
                     entries=tuple(entries))


# ---------------------------------------------------------------- profile

def _entry_to_dict(entry: ProfileEntry) -> dict:
    cover_name = entry.cover_name
    if cover_name is None and entry.cover is not None:
        cover_name = entry.cover.name
    infeasible = None
    if entry.infeasible is not None:
        infeasible = {"point": entry.infeasible.point,
                      "message": entry.infeasible.message}
    return {
        "scale": scalar_str(entry.scale),
        "mesh_bound": _opt_scalar_str(entry.mesh_bound),
        "method": entry.method,
        "dimension": entry.dimension,
        "mesh": _opt_scalar_str(entry.mesh),
        "cover": cover_name,
        "infeasible": infeasible,
    }


def _entry_from_dict(d: dict) -> ProfileEntry:
    infeasible = None
    if d.get("infeasible") is not None:
        infeasible = Infeasible(point=d["infeasible"]["point"], required=frozenset(),
                                message=d["infeasible"]["message"])
    return ProfileEntry(scale=parse_scalar(d["scale"]),
                        mesh_bound=_opt_parse_scalar(d.get("mesh_bound")),
                        method=d["method"],
                        dimension=d.get("dimension"),
                        mesh=_opt_parse_scalar(d.get("mesh")),
                        cover=None,
                        cover_name=d.get("cover"),
                        infeasible=infeasible)


def profile_to_dict(fp: FamilyProfile, name: str) -> dict:
    quotients = None
    if fp.quotient_profiles is not None:
        quotients = [{"space": p.space_name,
                      "entries": [_entry_to_dict(e) for e in p.entries]}
                     for p in fp.quotient_profiles]
    comparisons = None
    if fp.comparisons is not None:
        comparisons = [{"space": rep.space_name,
                        "scale": scalar_str(rep.scale),
                        "mesh_bound": _opt_scalar_str(rep.mesh_bound),
                        "dimension": rep.dimension,
                        "quotient_dimension": rep.quotient_dimension,
                        "relation": rep.relation}
                       for rep in fp.comparisons]
    return {
        "format": FORMAT_TAG,
        "kind": "profile",
        "name": name,
        "spaces": [{"space": p.space_name,
                    "entries": [_entry_to_dict(e) for e in p.entries]}
                   for p in fp.profiles],
        "family_dimension": list(fp.family_dimension),
        "family_mesh": [_opt_scalar_str(v) for v in fp.family_mesh],
        "quotients": quotients,
        "comparisons": comparisons,
    }


def profile_from_dict(d: dict) -> FamilyProfile:
    profiles = tuple(
        DimensionProfile(space_name=p["space"],
                         entries=tuple(_entry_from_dict(e) for e in p["entries"]))
        for p in _require(d, "spaces", "profile"))
    quotients = None
    if d.get("quotients") is not None:
        quotients = tuple(
            DimensionProfile(space_name=p["space"],
                             entries=tuple(_entry_from_dict(e) for e in p["entries"]))
            for p in d["quotients"])
    comparisons = None
    if d.get("comparisons") is not None:
        comparisons = tuple(
            GapReport(space_name=rep["space"], scale=parse_scalar(rep["scale"]),
                      mesh_bound=_opt_parse_scalar(rep.get("mesh_bound")),
                      dimension=rep.get("dimension"),
                      quotient_dimension=rep.get("quotient_dimension"),
                      relation=rep["relation"])
            for rep in d["comparisons"])
    return FamilyProfile(
        profiles=profiles,
        family_dimension=tuple(_require(d, "family_dimension", "profile")),
        family_mesh=tuple(_opt_parse_scalar(v)
                          for v in _require(d, "family_mesh", "profile")),
        quotient_profiles=quotients,
        comparisons=comparisons)


def profile_to_csv(fp: FamilyProfile) -> str:
    """Flat table: one row per space and scale, quotient columns when known."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["space", "scale", "mesh_bound", "method", "dimension", "mesh",
                     "quotient_dimension", "quotient_mesh", "relation"])
    qmap = {}
    if fp.quotient_profiles is not None:
        for prof, qprof in zip(fp.profiles, fp.quotient_profiles):
            for entry, qentry in zip(prof.entries, qprof.entries):
                qmap[(prof.space_name, entry.scale)] = qentry
    relmap = {}
    if fp.comparisons is not None:
        for rep in fp.comparisons:
            relmap[(rep.space_name, rep.scale)] = rep.relation
    for prof in fp.profiles:
        for entry in prof.entries:
            key = (prof.space_name, entry.scale)
            qentry = qmap.get(key)
            writer.writerow([
                prof.space_name,
                scalar_str(entry.scale),
                "" if entry.mesh_bound is None else scalar_str(entry.mesh_bound),
                entry.method,
                "" if entry.dimension is None else entry.dimension,
                "" if entry.mesh is None else scalar_str(entry.mesh),
                "" if qentry is None or qentry.dimension is None else qentry.dimension,
                "" if qentry is None or qentry.mesh is None else scalar_str(qentry.mesh),
                relmap.get(key, ""),
            ])
    return buf.getvalue()


# ---------------------------------------------------------------- workspace

class Workspace:
    """Named objects of each kind, the unit of reference resolution."""

    def __init__(self):
        self._objects: dict[tuple[str, str], object] = {}

    def add(self, kind: str, name: str, obj) -> None:
        key = (kind, str(name))
        if key in self._objects:
            raise FormatError(f"duplicate {kind} named {name!r}")
        self._objects[key] = obj

    def has(self, kind: str, name: str) -> bool:
        return (kind, str(name)) in self._objects

    def get(self, kind: str, name: str):
        try:
            return self._objects[(kind, str(name))]
        except KeyError:
            raise ResolutionError(f"no {kind} named {name!r} is loaded") from None

    def names(self, kind: str) -> list[str]:
        return sorted(n for (k, n) in self._objects if k == kind)


def object_to_dict(obj, **context) -> dict:
    if isinstance(obj, FiniteMetricSpace):
        return space_to_dict(obj)
    if isinstance(obj, FiniteGroup):
        return group_to_dict(obj)
    if isinstance(obj, IsometricAction):
        return action_to_dict(obj)
    if isinstance(obj, Cover):
        return cover_to_dict(obj)
    if isinstance(obj, Decomposition):
        return decomposition_to_dict(obj)
    if isinstance(obj, SSpace):
        return sspace_to_dict(obj, **context)
    raise TypeError(f"no serializer for {type(obj).__name__}")


def parse_document(text: str) -> dict:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from None
    if not isinstance(d, dict):
        raise FormatError("top level of a document must be an object")
    tag = d.get("format")
    if tag != FORMAT_TAG:
        raise FormatError(f"unsupported format tag {tag!r}, expected {FORMAT_TAG!r}")
    kind = d.get("kind")
    if kind not in KIND_ORDER:
        raise FormatError(f"unknown kind {kind!r}")
    return d


def load_entry(d: dict, ws: Workspace, validate: bool = True) -> tuple[str, str, object, list[Violation]]:
    """Materialize one parsed document into the workspace.

    Returns (kind, name, object, violations).  Structural problems raise
    FormatError; missing references raise ResolutionError; metric/group/
    action/cover/decomposition validators and certificate recomputation
    only fill the violation list, so callers can report instead of abort.
    """
    kind = d["kind"]
    name = _require(d, "name", kind)
    violations: list[Violation] = []
    if kind == "space":
        obj = space_from_dict(d)
        if validate:
            violations = validate_metric(obj)
    elif kind == "group":
        obj = group_from_dict(d)
        if validate:
            violations = validate_group(obj)
    elif kind == "action":
        obj = action_from_dict(d, ws)
        if validate:
            violations = validate_action(obj)
    elif kind == "sspace":
        obj = sspace_from_dict(d, ws)
    elif kind == "cover":
        obj = cover_from_dict(d, ws)
        if validate:
            violations = validate_cover(obj)
    elif kind == "decomposition":
        obj = decomposition_from_dict(d, ws)
        if validate:
            violations = validate_decomposition(obj)
    elif kind == "certificate":
        obj = certificate_from_dict(d)
        cover = ws.get("cover", _require(d, "cover", "certificate"))
        action = None
        if d.get("action") is not None:
            action = ws.get("action", d["action"])
        if validate:
            violations = verify_certificate(cover, obj, action=action)
    elif kind == "lift_trace":
        obj = lift_trace_from_dict(d)
    elif kind == "profile":
        obj = profile_from_dict(d)
    else:
        raise FormatError(f"unknown kind {kind!r}")
    if not violations:
        ws.add(kind, name, obj)
        if kind == "sspace":
            # The assembled space is registered under the same name so that
            # covers and estimates can refer to it.  A plain space document
            # with this name may already be loaded (the CLI writes one);
            # that is fine exactly when it agrees point for point.
            if ws.has("space", name):
                if ws.get("space", name) != obj.assembled:
                    raise FormatError(
                        f"sspace {name!r} disagrees with the loaded space of "
                        f"the same name")
            else:
                ws.add("space", name, obj.assembled)
    return kind, name, obj, violations
