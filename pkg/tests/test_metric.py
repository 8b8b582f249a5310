"""Metric spaces, graph metrics, balls and distances."""

import random
from fractions import Fraction

import pytest

from coarsedim import (INF, FiniteMetricSpace, ball, build_graph_metric,
                       diameter, set_distance, validate_metric)
from coarsedim.generators import path_space, random_graph_space

from oracles import dijkstra_metric


def test_construction_rejects_bad_shapes():
    with pytest.raises(ValueError):
        FiniteMetricSpace([], [])
    with pytest.raises(ValueError):
        FiniteMetricSpace(["a", "a"], [[0, 1], [1, 0]])
    with pytest.raises(ValueError):
        FiniteMetricSpace(["a", "b"], [[0, 1]])
    with pytest.raises(ValueError):
        FiniteMetricSpace(["a", "b"], [[0, 1], [1, 0, 2]])


def test_construction_rejects_floats():
    with pytest.raises(TypeError):
        FiniteMetricSpace(["a", "b"], [[0, 1.0], [1.0, 0]])
    with pytest.raises(TypeError):
        FiniteMetricSpace(["a", "b"], [[0, True], [True, 0]])


def test_fractions_are_welcome():
    half = Fraction(1, 2)
    m = FiniteMetricSpace(["a", "b"], [[0, half], [half, 0]])
    assert validate_metric(m) == []
    assert m.d(0, 1) == Fraction(1, 2)


def test_validate_metric_flags_each_axiom():
    m = FiniteMetricSpace(["a", "b", "c"],
                          [[1, 2, 9],
                           [2, 0, 1],
                           [3, 1, 0]])
    kinds = {v.kind for v in validate_metric(m)}
    assert kinds == {"identity", "symmetry", "triangle"}

    zero = FiniteMetricSpace(["a", "b"], [[0, 0], [0, 0]])
    assert {v.kind for v in validate_metric(zero)} == {"positivity"}


def test_equality_ignores_name():
    a = path_space(4, name="one")
    b = path_space(4, name="two")
    assert a == b
    assert a != path_space(5)


def test_point_lookup():
    m = path_space(4)
    assert m.index("2") == 2
    assert m.point_set(["0", "3"]) == frozenset({0, 3})
    with pytest.raises(KeyError):
        m.index("9")
    with pytest.raises(ValueError):
        m.check_point(7)
    with pytest.raises(ValueError):
        m.check_point(True)


def test_graph_metric_square_with_diagonal():
    m = build_graph_metric(["a", "b", "c", "d"],
                           [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a"),
                            ("a", "c")],
                           weights=[1, 1, 1, 1, 1])
    assert m.d(m.index("a"), m.index("c")) == 1
    assert m.d(m.index("b"), m.index("d")) == 2
    assert validate_metric(m) == []


def test_graph_metric_rejects_bad_input():
    with pytest.raises(ValueError):
        build_graph_metric(["a", "b"], [("a", "a")])
    with pytest.raises(ValueError):
        build_graph_metric(["a", "b"], [("a", "x")])
    with pytest.raises(ValueError):
        build_graph_metric(["a", "b"], [("a", "b")], weights=[0])
    with pytest.raises(ValueError) as err:
        build_graph_metric(["a", "b", "c"], [("a", "b")])
    assert "disconnected" in str(err.value) and "'c'" in str(err.value)


def test_graph_metric_matches_dijkstra_oracle():
    for seed in range(25):
        rng = random.Random(seed)
        n = rng.randint(2, 9)
        vertices = [str(i) for i in range(n)]
        edges = [(str(rng.randrange(v)), str(v)) for v in range(1, n)]
        edges += [(str(rng.randrange(n)), str(rng.randrange(n)))
                  for _ in range(rng.randint(0, 6))]
        edges = [e for e in edges if e[0] != e[1]]
        weights = [rng.randint(1, 5) for _ in edges]
        m = build_graph_metric(vertices, edges, weights)
        table = dijkstra_metric(vertices, edges, weights)
        for u in vertices:
            for v in vertices:
                assert m.d(m.index(u), m.index(v)) == table[u][v]


def test_random_graph_space_is_metric_and_reproducible():
    for seed in range(10):
        m = random_graph_space(7, seed)
        assert validate_metric(m) == []
        assert m == random_graph_space(7, seed)


def test_balls():
    m = path_space(5)
    assert ball(m, 2, 1, "closed") == frozenset({1, 2, 3})
    assert ball(m, 2, 1, "open") == frozenset({2})
    assert ball(m, 0, 10, "closed") == frozenset(range(5))
    with pytest.raises(ValueError):
        ball(m, 2, 1, "half-open")
    with pytest.raises(TypeError):
        ball(m, 2, 1.5)


def test_diameter_and_set_distance():
    m = path_space(6)
    assert diameter(m, [0, 2, 5]) == 5
    assert diameter(m, [3]) == 0
    with pytest.raises(ValueError):
        diameter(m, [])
    assert set_distance(m, [0, 1], [4, 5]) == 3
    assert set_distance(m, [0, 1], [1, 2]) == 0
    assert set_distance(m, [], [1]) == INF
    assert set_distance(m, [1], []) == INF
