from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from cubefold.completion import complete_words
from cubefold.cube_complex import DirectedEdge, validate_complex
from cubefold.geometry import halfspace_system, universal_cover_ball
from cubefold.group_algorithms import (
    NotFinishedError,
    coset_enumeration,
    conjugates_in,
    core_graph,
    cubical_presentation,
    finite_index,
    free_reduce,
    is_normal,
    membership,
    normalized_by,
    power_membership,
    reduced_form,
    reduced_forms,
    spanning_tree,
    word_to_cubical,
    words_equal,
)
from cubefold.oracles import lattice_oracle
from cubefold.standard import rose, subdivided_circle, torus
from cubefold.words import CubicalWord, format_word, parse_word

from conftest import random_word_text, raag, words

D = DirectedEdge


def fmt(Y, ws):
    return sorted(format_word(Y, w) for w in ws)


# -- presentations and words ----------------------------------------------------------

def test_presentations():
    Y = rose(2)
    P = cubical_presentation(Y)
    assert P.generators == (0, 1) and P.relators == ()
    Y = torus(2)
    P = cubical_presentation(Y)
    assert [format_word(Y, r) for r in P.relators] == ["a b a^-1 b^-1"]
    Y = subdivided_circle(2)
    P = cubical_presentation(Y)
    assert P.generators == (0, 1) and len(P.relators) == 1 and len(P.relators[0]) == 1
    assert all(len(r) == 4 for r in cubical_presentation(raag("C4")).relators)


def test_spanning_tree_disconnected_is_partial():
    Y = validate_complex([0, 1], {}, {}, 0)
    T = spanning_tree(Y)
    assert 1 not in T.parent


def two_vertex():
    # t: u -> w is the tree; x is a loop at u, y a loop at w
    return validate_complex([0, 1], {0: (0, 1), 1: (0, 0), 2: (1, 1)}, {}, 0,
                            edge_names={0: "t", 1: "x", 2: "y"})


def test_word_to_cubical_examples():
    Y = torus(2)
    T = spanning_tree(Y)
    w = word_to_cubical(Y, T, [D(0), D(1)])
    assert w.letters == (D(0), D(1))
    Z = two_vertex()
    T = spanning_tree(Z)
    w = word_to_cubical(Z, T, [D(1), D(2)])
    assert format_word(Z, w) == "x t y t^-1"
    e = word_to_cubical(Z, T, [])
    assert e.letters == () and e.start == e.end == 0


def test_reduced_form_examples():
    Y = torus(2)
    assert fmt(Y, reduced_forms(Y, parse_word(Y, "a b a^-1"))) == ["b"]
    assert fmt(Y, reduced_forms(Y, parse_word(Y, "a b"))) == ["a b", "b a"]
    F = rose(2)
    assert fmt(F, reduced_forms(F, parse_word(F, "a b b^-1"))) == ["a"]


def test_words_equal_examples():
    Y, F = torus(2), rose(2)
    assert words_equal(Y, parse_word(Y, "a b"), parse_word(Y, "b a"))
    assert not words_equal(F, parse_word(F, "a b"), parse_word(F, "b a"))
    assert words_equal(F, parse_word(F, "a b"), parse_word(F, "a a^-1 a b b^-1 b"))


@pytest.mark.parametrize("name", ["torus", "torus3", "P3", "C4"])
def test_reduced_forms_hull_agree_with_ball(name):
    Y = {"torus": torus(2), "torus3": torus(3)}.get(name) or raag(name)
    rng = random.Random(5)
    letters = [Y.edge_name(e) for e in Y.edges]
    for _ in range(6):
        w = parse_word(Y, random_word_text(rng, letters, 1, 5))
        hull = fmt(Y, reduced_forms(Y, w))
        ball = fmt(Y, reduced_forms(Y, w, method="ball"))
        assert hull == ball


@pytest.mark.parametrize("name", ["torus", "P3", "C4", "K3+1"])
def test_reduced_forms_properties(name):
    Y = torus(2) if name == "torus" else raag(name)
    rng = random.Random(11)
    letters = [Y.edge_name(e) for e in Y.edges]
    for _ in range(10):
        w = parse_word(Y, random_word_text(rng, letters, 1, 4))
        forms = reduced_forms(Y, w)
        n = len(forms[0])
        B = universal_cover_ball(Y, r=len(w) + 1)
        end = B.lift(w.letters)[-1]
        assert n == len(halfspace_system(B).separating(B.center, end))
        for r in forms:
            assert len(r) == n and words_equal(Y, r, w)


# -- membership --------------------------------------------------------------------------

def test_membership_examples():
    Y = torus(2)
    Z = complete_words(Y, words(Y, "a"))
    assert membership(Z, parse_word(Y, "a^3"))
    assert not membership(Z, parse_word(Y, "b"))
    assert membership(Z, parse_word(Y, "a b a^-1 b^-1"))


def test_membership_requires_finished():
    Y = torus(2)
    Z = complete_words(Y, words(Y, "a b"), budget=50)
    with pytest.raises(NotFinishedError):
        membership(Z, parse_word(Y, "a"))


def test_power_membership_examples():
    F = rose(2)
    Z = complete_words(F, words(F, "a^3"))
    assert power_membership(Z, parse_word(F, "a")) == 3
    assert power_membership(Z, parse_word(F, "b")) is None
    Y = torus(2)
    Z = complete_words(Y, words(Y, "a^2", "b"))
    assert power_membership(Z, parse_word(Y, "a b")) == 2


def test_power_membership_after_leaving_completion():
    # the lift of g = b a b^-1 exits the completion, yet g^2 is in H
    F = rose(2)
    Z = complete_words(F, words(F, "b a^2 b^-1"))
    g = parse_word(F, "b a b^-1")
    assert Z.map.lift(g.letters) is None
    assert power_membership(Z, g) == 2


def _moves(Y, w, rng):
    """Insert a cancelling pair or slide across a square, preserving the element."""
    letters = list(w.letters)
    k = rng.randint(0, len(letters))
    if rng.random() < 0.5 or not Y.cubes:
        d = DirectedEdge(rng.choice(sorted(Y.edges)), rng.random() < 0.5)
        letters[k:k] = [d, d.reversed()]
    else:
        for i in range(len(letters) - 1):
            s, t = letters[i], letters[i + 1]
            for cube in Y.cubes.values():
                if cube.dim != 2:
                    continue
                for b in range(4):
                    g0, g1 = cube.germs(b)
                    if (s, t) == (g0, cube.germ(b ^ 1, 1)):
                        letters[i:i + 2] = [g1, cube.germ(b ^ 2, 0)]
                        return CubicalWord(tuple(letters), w.start, w.end)
    return CubicalWord(tuple(letters), w.start, w.end)


@pytest.mark.parametrize("name,gens", [("torus", ["a^2", "b^3"]), ("torus", ["a"]), ("rose", ["a b", "b a^2"]),
                                       ("P3", ["a^2", "b c b^-1"]), ("C4", ["a c", "b"])])
def test_membership_invariant_under_moves(name, gens):
    Y = {"torus": torus(2), "rose": rose(2)}.get(name) or raag(name)
    Z = complete_words(Y, words(Y, *gens))
    assert Z.finished
    rng = random.Random(2)
    letters = [Y.edge_name(e) for e in Y.edges]
    for _ in range(15):
        g = parse_word(Y, random_word_text(rng, letters, 1, 6))
        ans = membership(Z, g)
        h = g
        for _ in range(3):
            h = _moves(Y, h, rng)
            assert membership(Z, h) == ans


@given(st.integers(0, 10 ** 6))
def test_power_membership_minimal(seed):
    rng = random.Random(seed)
    Y = torus(2)
    gens = [f"a^{rng.randint(1, 4)}", f"b^{rng.randint(1, 4)}"]
    Z = complete_words(Y, words(Y, *gens))
    g = parse_word(Y, random_word_text(rng, ["a", "b"], 1, 4))
    k = power_membership(Z, g)
    oracle = lattice_oracle(["a", "b"], gens).least_power([(Y.edge_name(d.edge), 1 if d.forward else -1)
                                                            for d in g.letters])
    assert k == oracle
    if k is not None:
        assert k <= len(Z.complex.vertices)
        assert membership(Z, g ** k)
        assert not any(membership(Z, g ** j) for j in range(1, k))


# -- normality and index ----------------------------------------------------------------------

def test_normalized_by_examples():
    Y = torus(2)
    Z = complete_words(Y, words(Y, "a"))
    assert normalized_by(Z, parse_word(Y, "b")) is True
    F = rose(2)
    Z = complete_words(F, words(F, "a"))
    assert normalized_by(Z, parse_word(F, "b")) is False
    empty = CubicalWord((), 0, 0)
    for Z in (complete_words(F, words(F, "a b", "b^2")), complete_words(Y, words(Y, "a^2", "b"))):
        assert normalized_by(Z, empty) is True


def test_is_normal_examples():
    Y = torus(2)
    assert is_normal(complete_words(Y, words(Y, "a"))) is True
    F = rose(2)
    assert is_normal(complete_words(F, words(F, "a"))) is False
    Z = complete_words(F, words(F, "a", "b^2", "b a b^-1"))
    assert is_normal(Z) is True and finite_index(Z) == 2


def test_normalized_by_undecided_on_budget():
    Y = torus(2)
    Z = complete_words(Y, words(Y, "a^2", "b"))
    assert normalized_by(Z, parse_word(Y, "a"), budget=3) is None


@pytest.mark.parametrize("name,gens", [("torus", ["a^2", "b"]), ("rose", ["a", "b a b^-1"]),
                                       ("rose", ["a^2", "b", "a b a^-1"]), ("P3", ["a^2", "b c b^-1"]),
                                       ("C4", ["a c", "b"]), ("torus3", ["a", "b^2"])])
def test_normality_criteria_agree(name, gens):
    Y = {"torus": torus(2), "rose": rose(2), "torus3": torus(3)}.get(name) or raag(name)
    Z = complete_words(Y, words(Y, *gens))
    rng = random.Random(4)
    letters = [Y.edge_name(e) for e in Y.edges]
    for _ in range(4):
        g = parse_word(Y, random_word_text(rng, letters, 1, 3))
        r = normalized_by(Z, g)
        assert r is not None and r == conjugates_in(Z, g)


def test_index_examples():
    Y = torus(2)
    assert finite_index(complete_words(Y, words(Y, "a^2", "b"))) == 2
    F = rose(2)
    assert finite_index(complete_words(F, words(F, "a", "b"))) == 1
    assert finite_index(complete_words(Y, words(Y, "a"))) is None


@pytest.mark.parametrize("m,n", [(1, 2), (2, 3), (3, 3)])
def test_index_by_covering_and_cosets_agree(m, n):
    Y = torus(2)
    Z = complete_words(Y, words(Y, f"a^{m}", f"b^{n}"))
    reps = coset_enumeration(Z, 64)
    assert len(reps) == finite_index(Z) == m * n


def test_core_graph_surjective_on_generator_loops():
    Y = torus(2)
    Z = complete_words(Y, words(Y, "a^2", "b a b^-1"))
    C = core_graph(Z)
    assert Z.complex.basepoint in C.vertices
    for s in Z.generators:
        for r in reduced_forms(Y, s):
            lifted = Z.map.lift(r.letters)
            assert lifted is not None and {d.edge for d in lifted} <= C.edges


def test_free_reduce():
    a, b = D(0), D(1)
    assert free_reduce([a, b, b.reversed(), a.reversed()]) == ()
    assert reduced_form(rose(2), CubicalWord((a, a.reversed()), 0, 0)).letters == ()


@pytest.mark.parametrize("name", ["torus", "torus3", "P3", "P4", "C4", "K3+1"])
def test_salvetti_shortcut_matches_hull(name):
    from cubefold.group_algorithms import commutation_table
    Y = {"torus": torus(2), "torus3": torus(3)}.get(name) or raag(name)
    assert commutation_table(Y) is not None
    rng = random.Random(8)
    letters = [Y.edge_name(e) for e in Y.edges]
    for _ in range(25):
        w = parse_word(Y, random_word_text(rng, letters, 0, 8))
        assert reduced_form(Y, w) == reduced_forms(Y, w)[0]


def test_shortcut_not_used_off_salvetti():
    from cubefold.group_algorithms import commutation_table
    from cubefold.standard import torus_double_cover
    assert commutation_table(torus_double_cover()) is None
