"""Covers, decompositions and their certified quantities."""

import random
from fractions import Fraction

import pytest

from coarsedim import (INF, Cover, CoverCertificate, Decomposition,
                       ball_meet_count, certify, check_equivariance,
                       decomposition_to_cover, dimension, is_r_disjoint,
                       lebesgue_number, mesh, validate_cover,
                       validate_decomposition, verify_certificate)
from coarsedim.generators import (cycle_space, path_reflection_action,
                                  path_space, random_cover,
                                  random_decomposition, random_graph_space)

from oracles import lebesgue_direct


def halves_cover():
    return Cover(path_space(5), [[0, 1, 2], [2, 3, 4]], name="halves")


def test_frozen_quantities_on_path_halves():
    c = halves_cover()
    assert dimension(c) == 1
    assert mesh(c) == 2
    assert lebesgue_number(c) == 1


def test_frozen_lebesgue_on_overlapping_windows():
    c = Cover(path_space(5), [[0, 1, 2, 3], [1, 2, 3, 4]], name="windows")
    assert lebesgue_number(c) == 2
    assert dimension(c) == 1
    assert mesh(c) == 3


def test_whole_space_member_gives_infinite_lebesgue():
    c = Cover(path_space(4), [range(4)], name="all")
    assert lebesgue_number(c) == INF
    assert dimension(c) == 0
    with pytest.raises(ValueError):
        lebesgue_number(Cover(path_space(2), [], name="nothing"))


def test_lebesgue_matches_direct_oracle():
    for seed in range(30):
        rng = random.Random(seed)
        m = random_graph_space(rng.randint(2, 8), seed)
        c = random_cover(m, seed)
        assert validate_cover(c) == []
        assert lebesgue_number(c) == lebesgue_direct(m, c.members)


def test_ball_meet_count():
    c = halves_cover()
    assert ball_meet_count(c, 1) == 2       # around point 2
    assert ball_meet_count(c, Fraction(1, 2)) == 2
    # tiny balls around points away from the overlap still meet one member
    assert ball_meet_count(Cover(path_space(5), [[0, 1], [3, 4], [2]], name="s"),
                           Fraction(1, 2)) == 1


def test_validate_cover_reports():
    m = path_space(4)
    ok = Cover(m, [[0, 1], [2, 3]], name="ok")
    assert validate_cover(ok) == []
    gaps = Cover(m, [[0, 1]], name="gaps")
    v = validate_cover(gaps)
    assert [x.kind for x in v] == ["coverage"] and v[0].subject == (2, 3)
    dup = Cover(m, [[0, 1], [1, 0], [2, 3]], name="dup")
    assert "duplicate-member" in {x.kind for x in validate_cover(dup)}
    empty = Cover(m, [[0, 1, 2, 3], []], name="empty")
    assert "empty-member" in {x.kind for x in validate_cover(empty)}


def test_cover_constructor_checks_indices():
    with pytest.raises(ValueError):
        Cover(path_space(3), [[0, 7]])


def test_r_disjointness():
    m = path_space(6)
    ok, witness = is_r_disjoint(m, [[0, 1], [4, 5]], 2)
    assert ok and witness is None
    ok, witness = is_r_disjoint(m, [[0, 1], [3]], 2)
    assert not ok and witness == (0, 1, 2)
    ok, _ = is_r_disjoint(m, [[0], []], 100)  # empty pieces never collide
    assert ok


def test_validate_decomposition():
    m = path_space(6)
    good = Decomposition(m, 1, [[[0, 1], [4, 5]], [[2, 3]]], name="good")
    assert validate_decomposition(good) == []
    bad = Decomposition(m, 2, [[[0, 1], [3]], [[2], [4, 5]]], name="bad")
    kinds = {v.kind for v in validate_decomposition(bad)}
    assert "disjointness" in kinds
    holey = Decomposition(m, 1, [[[0, 1]]], name="holey")
    assert "coverage" in {v.kind for v in validate_decomposition(holey)}


def test_decomposition_to_cover_bounds():
    m = path_space(9)
    d = Decomposition(m, 2, [[[0, 1], [5, 6]], [[2, 3, 4], [7, 8]]], name="two")
    cover, cert = decomposition_to_cover(d)
    assert cert.dimension <= 1
    assert cert.lebesgue >= Fraction(1, 2)
    assert validate_cover(cover) == []
    with pytest.raises(ValueError):
        decomposition_to_cover(Decomposition(m, 2, [[[0, 1], [2, 3]]], name="bad"))


def test_decomposition_to_cover_random():
    for seed in range(12):
        rng = random.Random(seed)
        m = random_graph_space(rng.randint(2, 8), seed)
        r = rng.randint(1, 3)
        d = random_decomposition(m, r, seed)
        assert validate_decomposition(d) == []
        cover, cert = decomposition_to_cover(d)
        assert cert.dimension <= len(d.families) - 1
        assert cert.lebesgue >= Fraction(r, 4)


def test_equivariance_check():
    m = path_space(5)
    a = path_reflection_action(m)
    symmetric = Cover(m, [[0, 1], [3, 4], [1, 2, 3]], name="sym")
    assert check_equivariance(a, symmetric) == (True, None)
    lopsided = Cover(m, [[0, 1, 2], [2, 3], [3, 4]], name="lop")
    ok, witness = check_equivariance(a, lopsided)
    assert not ok and witness == (0, 1)
    with pytest.raises(ValueError):
        check_equivariance(a, Cover(cycle_space(5), [range(5)]))


def test_certify_and_verify_roundtrip():
    c = halves_cover()
    a = path_reflection_action(c.space)
    cert = certify(c, meet_radius=1, action=a)
    assert cert == CoverCertificate(dimension=1, lebesgue=1, mesh=2,
                                    meet_radius=1, ball_meet=2, equivariant=True)
    assert verify_certificate(c, cert, action=a) == []
    tampered = CoverCertificate(dimension=0, lebesgue=1, mesh=2,
                                meet_radius=1, ball_meet=2, equivariant=True)
    bad = verify_certificate(c, tampered, action=a)
    assert [v.subject for v in bad] == [("dimension",)]
