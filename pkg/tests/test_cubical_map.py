from __future__ import annotations

import pytest

from cubefold.completion import bouquet_from_words
from cubefold.cube_complex import DirectedEdge, identity_symmetry, validate_complex
from cubefold.cubical_map import (
    InvalidMapError,
    induced_link_map,
    is_covering,
    is_immersion,
    is_local_isometry,
    validate_map,
)
from cubefold.standard import rose, torus, torus_double_cover

from conftest import words

D = DirectedEdge


def identity(Y):
    return validate_map(Y, Y, {v: v for v in Y.vertices}, {e: D(e) for e in Y.edges})


def circle_to_torus():
    Y = torus(2)
    return bouquet_from_words(Y, words(Y, "a"))[1]


def two_a_edges():
    # p -a-> u, p -a-> w over the rose
    Y = rose(2)
    X = validate_complex([0, 1, 2], {0: (0, 1), 1: (0, 2)}, {}, 0)
    return validate_map(X, Y, {0: 0, 1: 0, 2: 0}, {0: D(0), 1: D(0)})


def test_identity_valid_and_covering():
    Y = torus(2)
    f = identity(Y)
    assert f.cube_map == {0: (0, identity_symmetry(2))}
    assert is_immersion(f)[0] and is_local_isometry(f)[0]
    assert is_covering(f) == (True, 1)
    L = induced_link_map(f, 0)
    assert all(a == b for a, b in L.germs.items())


def test_collapsed_edge_rejected():
    Y = rose(1)
    X = validate_complex([0, 1], {0: (0, 1)}, {}, 0)
    with pytest.raises(InvalidMapError, match="not cubical"):
        validate_map(X, Y, {0: 0, 1: 0}, {})


def test_non_commuting_endpoints_rejected():
    Y = torus_double_cover()
    X = validate_complex([0, 1], {0: (0, 1)}, {}, 0)
    with pytest.raises(InvalidMapError, match="endpoints"):
        validate_map(X, Y, {0: 0, 1: 0}, {0: D(0)})


def test_bouquet_to_rose_valid():
    Y = rose(2)
    X, f = bouquet_from_words(Y, words(Y, "a", "b"))
    g = validate_map(X, Y, f.vertex_map, f.edge_map)
    assert is_covering(g) == (True, 1)


def test_wrong_cube_image_rejected():
    Y = torus_double_cover()
    with pytest.raises(InvalidMapError, match="reconciles"):
        validate_map(Y, Y, {0: 0, 1: 1}, {e: D(e) for e in Y.edges}, {0: 1, 1: 0})


def test_symmetry_inferred_for_flipped_square():
    Y = torus(2)
    # the same square read with a and b swapped
    X = validate_complex([0], {0: (0, 0), 1: (0, 0)}, {0: Y.cubes[0].__class__(
        2, (0, 0, 0, 0), (D(1), D(1), D(0), D(0)))}, 0)
    f = validate_map(X, Y, {0: 0}, {0: D(1), 1: D(0)})
    target, sym = f.cube_map[0]
    assert target == 0
    assert f.cube_image(0).transform(sym) == Y.cubes[0]


def test_fold_precondition_link_map():
    f = two_a_edges()
    L = induced_link_map(f, 0)
    assert set(L.germs.values()) == {D(0, True)}
    ok, why = is_immersion(f)
    assert not ok and why.vertex == 0 and why.kind == "germ collision"


def test_circle_to_torus():
    f = circle_to_torus()
    L = induced_link_map(f, 0)
    assert sorted(L.germs.values()) == [D(0, False), D(0, True)]
    assert is_immersion(f)[0]
    assert is_local_isometry(f)[0]
    assert is_covering(f)[0] is False


def test_wedge_to_torus_missing_square():
    Y = torus(2)
    _, f = bouquet_from_words(Y, words(Y, "a", "b"))
    ok, why = is_local_isometry(f)
    assert not ok and why.kind == "missing simplex"
    assert why.target[0] == 0
    assert {f.germ_image(g) for g in why.germs} == {D(0, True), D(1, True)}


def test_double_cover():
    Y = torus(2)
    X = torus_double_cover()
    f = validate_map(X, Y, {0: 0, 1: 0}, {0: D(0), 1: D(0), 2: D(1), 3: D(1)})
    assert is_covering(f) == (True, 2)
    assert is_local_isometry(f)[0] and is_immersion(f)[0]


def test_lift_is_unique():
    Y = torus(2)
    X = torus_double_cover()
    f = validate_map(X, Y, {0: 0, 1: 0}, {0: D(0), 1: D(0), 2: D(1), 3: D(1)})
    path = f.lift([D(0), D(1), D(0)])
    assert [g.edge for g in path] == [0, 3, 1]
    assert f.lift([D(0, False)]) == [D(1, False)]
