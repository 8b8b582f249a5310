"""Serialization: exact scalars, canonical JSON documents for every kind,
workspace resolution, certificate recomputation on load, CSV export."""

import math
from fractions import Fraction

import pytest

from coarsedim import (Cover, Decomposition, FormatError, ResolutionError,
                       Workspace, build_sspace, certify, dumps, family_profile,
                       lift_equivariant, min_dimension_cover_exact, quotient)
from coarsedim.formats import (action_to_dict, certificate_to_dict,
                               cover_to_dict, decomposition_to_dict,
                               group_to_dict, lift_trace_from_dict,
                               lift_trace_to_dict, load_entry, object_to_dict,
                               parse_document, parse_scalar, profile_from_dict,
                               profile_to_csv, profile_to_dict, scalar_str,
                               space_to_dict, sspace_to_dict)
from coarsedim.generators import (cycle_rotation_action, cycle_space,
                                  path_reflection_action, path_space)
from coarsedim.groups import cyclic_group


def test_scalar_strings():
    assert scalar_str(5) == "5"
    assert scalar_str(-3) == "-3"
    assert scalar_str(Fraction(5, 4)) == "5/4"
    assert scalar_str(Fraction(8, 4)) == "2"
    assert scalar_str(math.inf) == "inf"
    with pytest.raises(TypeError):
        scalar_str(1.5)
    assert parse_scalar("5") == 5
    assert parse_scalar("5/4") == Fraction(5, 4)
    assert parse_scalar("inf") == math.inf
    for bad in ("1.5", "abc", "1/0", "", 5):
        with pytest.raises(FormatError):
            parse_scalar(bad)


def fixtures():
    """One object of every kind, wired together."""
    space = path_space(5)
    group = cyclic_group(2)
    action = path_reflection_action(space)
    cover = Cover(space, [[0, 1, 2], [2, 3, 4]], name="halves")
    decomp = Decomposition(space, 1, [[[0, 1], [3, 4]], [[2]]], name="split")
    union = build_sspace([space, cycle_space(4)], [[2], [0, 2]], [5, 6],
                         name="U")
    cert = certify(cover, meet_radius=1, action=None)
    q = quotient(action)
    qc = min_dimension_cover_exact(q.space, 1, 4)
    lifted, trace, lift_cert = lift_equivariant(action, q, qc, R=1)
    return dict(space=space, group=group, action=action, cover=cover,
                decomp=decomp, union=union, cert=cert, q=q, qc=qc,
                lifted=lifted, trace=trace, lift_cert=lift_cert)


def seeded_workspace(fx) -> Workspace:
    ws = Workspace()
    ws.add("space", fx["space"].name, fx["space"])
    ws.add("space", fx["q"].space.name, fx["q"].space)
    ws.add("group", fx["group"].name, fx["group"])
    ws.add("action", fx["action"].name, fx["action"])
    ws.add("cover", fx["cover"].name, fx["cover"])
    ws.add("cover", fx["qc"].name, fx["qc"])
    return ws


def assert_round_trip(d, rebuild, redump):
    text = dumps(d)
    parsed = parse_document(text)
    obj = rebuild(parsed)
    assert dumps(redump(obj, parsed)) == text
    return obj


def test_space_round_trip_is_byte_identical():
    fx = fixtures()
    ws = Workspace()
    obj = assert_round_trip(
        space_to_dict(fx["space"]),
        lambda d: load_entry(d, ws)[2],
        lambda obj, d: space_to_dict(obj))
    assert obj == fx["space"]
    assert ws.has("space", "P5")


def test_group_round_trip_is_byte_identical():
    fx = fixtures()
    ws = Workspace()
    obj = assert_round_trip(
        group_to_dict(fx["group"]),
        lambda d: load_entry(d, ws)[2],
        lambda obj, d: group_to_dict(obj))
    assert obj.elements == fx["group"].elements
    assert obj.mul_table == fx["group"].mul_table


def test_action_round_trip_is_byte_identical():
    fx = fixtures()
    ws = Workspace()
    ws.add("space", fx["space"].name, fx["space"])
    ws.add("group", fx["group"].name, fx["group"])
    obj = assert_round_trip(
        action_to_dict(fx["action"]),
        lambda d: load_entry(d, ws)[2],
        lambda obj, d: action_to_dict(obj))
    assert obj.perms == fx["action"].perms


def test_cover_round_trip_is_byte_identical():
    fx = fixtures()
    ws = seeded_workspace(fx)
    d = cover_to_dict(fx["cover"])
    d["name"] = "halves2"
    obj = assert_round_trip(
        d,
        lambda parsed: load_entry(parsed, ws)[2],
        lambda obj, parsed: cover_to_dict(obj))
    assert obj.members == fx["cover"].members


def test_decomposition_round_trip_is_byte_identical():
    fx = fixtures()
    ws = seeded_workspace(fx)
    obj = assert_round_trip(
        decomposition_to_dict(fx["decomp"]),
        lambda d: load_entry(d, ws)[2],
        lambda obj, d: decomposition_to_dict(obj))
    assert obj.families == fx["decomp"].families
    assert obj.r == 1


def test_sspace_round_trip_is_byte_identical():
    fx = fixtures()
    ws = seeded_workspace(fx)
    ws.add("space", "C4", cycle_space(4))
    obj = assert_round_trip(
        sspace_to_dict(fx["union"]),
        lambda d: load_entry(d, ws)[2],
        lambda obj, d: sspace_to_dict(obj))
    assert obj.assembled == fx["union"].assembled
    # the assembled space was registered for downstream references
    assert ws.get("space", "U") == fx["union"].assembled


def test_certificate_round_trip_and_recomputation():
    fx = fixtures()
    ws = seeded_workspace(fx)
    d = certificate_to_dict(fx["cert"], "halves", "halves_cert")
    kind, name, obj, violations = load_entry(parse_document(dumps(d)), ws)
    assert violations == []
    assert obj == fx["cert"]
    assert dumps(certificate_to_dict(obj, "halves", "halves_cert")) == dumps(d)


def test_tampered_certificate_is_rejected():
    fx = fixtures()
    ws = seeded_workspace(fx)
    d = certificate_to_dict(fx["cert"], "halves", "bad_cert")
    d["dimension"] = d["dimension"] + 1
    kind, name, obj, violations = load_entry(parse_document(dumps(d)), ws)
    assert any(v.subject == ("dimension",) for v in violations)
    assert not ws.has("certificate", "bad_cert")


def test_equivariant_certificate_needs_its_action():
    fx = fixtures()
    ws = seeded_workspace(fx)
    ws.add("cover", fx["lifted"].name, fx["lifted"])
    d = certificate_to_dict(fx["lift_cert"], fx["lifted"].name, "lc",
                            action_name=fx["action"].name)
    kind, name, obj, violations = load_entry(parse_document(dumps(d)), ws)
    assert violations == []
    assert obj.equivariant is True


def test_lift_trace_round_trip_is_byte_identical():
    fx = fixtures()
    d = lift_trace_to_dict(fx["trace"], "t", fx["action"].name,
                           fx["qc"].name, fx["lifted"].name)
    text = dumps(d)
    parsed = parse_document(text)
    obj = lift_trace_from_dict(parsed)
    assert obj == fx["trace"]
    assert dumps(lift_trace_to_dict(obj, "t", fx["action"].name,
                                    fx["qc"].name, fx["lifted"].name)) == text


def test_profile_round_trip_is_byte_identical():
    spaces = [path_space(5), cycle_space(4)]
    actions = [path_reflection_action(spaces[0]),
               cycle_rotation_action(spaces[1], 2)]
    fp = family_profile(spaces, [1, 5], mesh_bounds=[2, 1], actions=actions)
    d = profile_to_dict(fp, "fam")
    text = dumps(d)
    obj = profile_from_dict(parse_document(text))
    assert dumps(profile_to_dict(obj, "fam")) == text
    # infeasible entries survive (scale 5 with mesh bound 1 is impossible)
    assert obj.profiles[0].entries[1].infeasible is not None
    assert obj.profiles[0].entries[1].dimension is None


def test_profile_csv_shape():
    spaces = [path_space(5)]
    actions = [path_reflection_action(spaces[0])]
    fp = family_profile(spaces, [1, 5], mesh_bounds=[2, 1], actions=actions)
    lines = profile_to_csv(fp).splitlines()
    assert lines[0] == ("space,scale,mesh_bound,method,dimension,mesh,"
                        "quotient_dimension,quotient_mesh,relation")
    assert len(lines) == 3
    first = lines[1].split(",")
    assert first[0] == "P5" and first[1] == "1" and first[4] == "0"
    assert first[8] == "equal"
    second = lines[2].split(",")
    assert second[4] == "" and second[8] == "infeasible"


def test_object_to_dict_dispatch():
    fx = fixtures()
    assert object_to_dict(fx["space"])["kind"] == "space"
    assert object_to_dict(fx["group"])["kind"] == "group"
    assert object_to_dict(fx["action"])["kind"] == "action"
    assert object_to_dict(fx["cover"])["kind"] == "cover"
    assert object_to_dict(fx["decomp"])["kind"] == "decomposition"
    assert object_to_dict(fx["union"])["kind"] == "sspace"
    with pytest.raises(TypeError):
        object_to_dict(object())


def test_parse_document_rejects_malformed_input():
    with pytest.raises(FormatError):
        parse_document("{not json")
    with pytest.raises(FormatError):
        parse_document("[1, 2]")
    with pytest.raises(FormatError):
        parse_document('{"format": "other/9", "kind": "space"}')
    with pytest.raises(FormatError):
        parse_document('{"format": "coarsedim/1", "kind": "widget"}')


def test_load_entry_reports_validator_violations():
    d = {"format": "coarsedim/1", "kind": "space", "name": "bad",
         "points": ["a", "b"], "dist": [["0", "1"], ["2", "0"]]}
    ws = Workspace()
    kind, name, obj, violations = load_entry(parse_document(dumps(d)), ws)
    assert any(v.kind == "symmetry" for v in violations)
    assert not ws.has("space", "bad")
    # validate=False registers it anyway
    load_entry(parse_document(dumps(d)), ws, validate=False)
    assert ws.has("space", "bad")


def test_load_entry_needs_references_loaded_first():
    fx = fixtures()
    d = action_to_dict(fx["action"])
    with pytest.raises(ResolutionError):
        load_entry(d, Workspace())


def test_sspace_tolerates_equal_preloaded_space():
    fx = fixtures()
    ws = Workspace()
    ws.add("space", "P5", fx["space"])
    ws.add("space", "C4", cycle_space(4))
    ws.add("space", "U", fx["union"].assembled)
    kind, name, obj, violations = load_entry(sspace_to_dict(fx["union"]), ws)
    assert violations == []
    # but a disagreeing space of the same name is an error
    ws2 = Workspace()
    ws2.add("space", "P5", fx["space"])
    ws2.add("space", "C4", cycle_space(4))
    ws2.add("space", "U", path_space(9))
    with pytest.raises(FormatError):
        load_entry(sspace_to_dict(fx["union"]), ws2)


def test_workspace_duplicates_and_misses():
    ws = Workspace()
    ws.add("space", "P5", path_space(5))
    with pytest.raises(FormatError):
        ws.add("space", "P5", path_space(5))
    with pytest.raises(ResolutionError) as err:
        ws.get("space", "Q")
    assert "no space named 'Q' is loaded" in str(err.value)
    ws.add("space", "A", path_space(3))
    assert ws.names("space") == ["A", "P5"]
    assert ws.names("group") == []
