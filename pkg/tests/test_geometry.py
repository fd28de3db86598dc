from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from cubefold.cube_complex import DirectedEdge, check_npc
from cubefold.cubical_map import local_failures
from cubefold.geometry import (
    Halfspace,
    HalfspacePoset,
    IncompleteError,
    InconsistentPosetError,
    NotNPCError,
    combinatorial_geodesics,
    convex_hull,
    distances,
    dual_to_ambient,
    halfspace_system,
    halfspaces_meeting,
    sageev_dual,
    universal_cover_ball,
)
from cubefold.oracles import brute_hull
from cubefold.standard import grid, rose, three_squares_corner, torus

from conftest import RAAGS, raag

D = DirectedEdge


def at(coords, p):
    return next(v for v, c in coords.items() if c == p)


# -- balls --------------------------------------------------------------------------

def test_ball_examples():
    B = universal_cover_ball(torus(2), r=1)
    assert (len(B.complex.vertices), len(B.complex.edges), len(B.complex.cubes)) == (5, 4, 0)
    B = universal_cover_ball(rose(2), r=2)
    assert len(B.complex.vertices) == 17 and len(B.complex.edges) == 16
    for Y in (torus(2), rose(3), raag("C4")):
        B = universal_cover_ball(Y, r=0)
        assert B.complex.vertices == (0,) and not B.complex.edges


def test_ball_rejects_non_npc():
    with pytest.raises(NotNPCError):
        universal_cover_ball(three_squares_corner(), r=2)


def test_torus_ball_is_l1_ball():
    B = universal_cover_ball(torus(2), r=4)
    assert len(B.complex.vertices) == 1 + 4 * (1 + 2 + 3 + 4)
    squares = sum(1 for x in range(-4, 4) for y in range(-4, 4)
                  if all(abs(x + i) + abs(y + j) <= 4 for i in (0, 1) for j in (0, 1)))
    assert len(B.complex.cubes) == squares
    assert check_npc(B.complex).npc


@pytest.mark.parametrize("name", ["torus", "torus3"] + list(RAAGS))
def test_ball_projection_local_isometry_inside(name):
    Y = {"torus": torus(2), "torus3": torus(3)}.get(name) or raag(name)
    r = 4 if Y.dimension <= 2 else 3
    B = universal_cover_ball(Y, r=r)
    for v in B.complex.vertices:
        if B.depth[v] <= r - Y.dimension:
            assert local_failures(B.projection, v) == []
        else:
            # boundary links may be incomplete but never collide
            assert all(f.kind == "missing simplex" for f in local_failures(B.projection, v))


@pytest.mark.parametrize("name", ["torus", "torus3"] + list(RAAGS))
def test_ball_distance_is_separation(name):
    Y = {"torus": torus(2), "torus3": torus(3)}.get(name) or raag(name)
    B = universal_cover_ball(Y, r=3)
    sys = halfspace_system(B)
    rng = random.Random(1)
    verts = B.complex.vertices
    for _ in range(40):
        u, v = rng.choice(verts), rng.choice(verts)
        dist = distances(B, u)[v]
        if (B.depth[u] + B.depth[v] + dist) // 2 <= B.radius:
            assert dist == len(sys.separating(u, v))
    assert all(B.depth[v] == distances(B, 0)[v] for v in verts)


def test_ball_words_lift_consistently():
    Y = torus(2)
    B = universal_cover_ball(Y, r=4)
    ab = B.lift([D(0), D(1)])[-1]
    ba = B.lift([D(1), D(0)])[-1]
    assert ab == ba
    assert B.lift(B.word_to(ab))[-1] == ab
    assert B.lift([D(0)] * 5) is None


# -- geodesics -------------------------------------------------------------------------

def test_geodesic_examples():
    X, co = grid((3, 3))
    o, d, r = at(co, (0, 0)), at(co, (1, 1)), at(co, (2, 0))
    paths = combinatorial_geodesics(X, o, d)
    assert len(paths) == 2
    assert len(combinatorial_geodesics(X, o, r)) == 1
    assert combinatorial_geodesics(X, o, o) == [()]


def test_geodesics_in_torus_ball_project_to_ab_ba():
    Y = torus(2)
    B = universal_cover_ball(Y, r=3)
    end = B.lift([D(0), D(1)])[-1]
    words = sorted(B.project(p) for p in combinatorial_geodesics(B, 0, end))
    assert words == [(D(0), D(1)), (D(1), D(0))]


def test_geodesics_near_boundary_reported():
    B = universal_cover_ball(torus(2), r=3)
    u = B.lift([D(0)] * 3)[-1]
    v = B.lift([D(1)] * 3)[-1]
    with pytest.raises(IncompleteError):
        combinatorial_geodesics(B, u, v)


@given(st.lists(st.integers(2, 4), min_size=2, max_size=3), st.data())
def test_geodesics_cross_each_separating_plane_once(shape, data):
    X, _ = grid(shape)
    sys = halfspace_system(X)
    u = data.draw(st.sampled_from(X.vertices))
    v = data.draw(st.sampled_from(X.vertices))
    sep = sys.separating(u, v)
    for p in combinatorial_geodesics(X, u, v):
        crossed = [sys.edge_plane[d.edge] for d in p]
        assert sorted(crossed) == sep


# -- hulls -----------------------------------------------------------------------------------

def test_hull_examples():
    X, co = grid((4, 4))
    H = convex_hull(X, [at(co, (0, 0)), at(co, (2, 1))])
    assert len(H.vertices) == 6 and len(H.cubes) == 2
    v = at(co, (1, 2))
    assert convex_hull(X, [v]).vertices == {v}
    H = convex_hull(X, [at(co, (0, 0)), at(co, (1, 1))])
    assert len(H.vertices) == 4 and len(H.cubes) == 1
    with pytest.raises(ValueError):
        convex_hull(X, [])


@given(st.lists(st.integers(2, 4), min_size=1, max_size=3), st.data())
def test_hull_matches_brute_force_and_is_idempotent(shape, data):
    X, _ = grid(shape)
    S = data.draw(st.lists(st.sampled_from(X.vertices), min_size=1, max_size=4))
    H = convex_hull(X, S)
    assert (H.vertices, H.edges, H.cubes) == brute_hull(X, S)
    assert set(S) <= H.vertices
    assert convex_hull(X, H.vertices).vertices == H.vertices


@pytest.mark.parametrize("name", ["torus", "P3", "C4"])
def test_hull_geodesic_closure_in_balls(name):
    Y = torus(2) if name == "torus" else raag(name)
    B = universal_cover_ball(Y, r=3)
    assert len(B.complex.vertices) <= 500
    rng = random.Random(7)
    S = rng.sample(B.complex.vertices, 3)
    H = convex_hull(B, S)
    for u in H.vertices:
        for v in H.vertices:
            for p in combinatorial_geodesics(B.complex, u, v):
                assert all(B.complex.head(d) in H.vertices for d in p)


# -- halfspaces and the dual ------------------------------------------------------------------

def test_halfspace_sides_partition_and_disconnect():
    X, _ = grid((3, 3, 2))
    sys = halfspace_system(X)
    full = (1 << len(X.vertices)) - 1
    for h in range(len(sys.planes)):
        plus, minus = sys.mask(Halfspace(h, 1)), sys.mask(Halfspace(h, -1))
        assert plus & minus == 0 and plus | minus == full
        for e, (s, t) in X.edges.items():
            if sys.edge_plane[e] != h:
                assert sys.side(h, s) == sys.side(h, t)


def test_dual_one_hyperplane():
    P = HalfspacePoset.from_inclusions([0], [])
    X, orient = sageev_dual(P)
    assert len(X.vertices) == 2 and len(X.edges) == 1


def test_dual_two_transverse():
    X, _ = sageev_dual(HalfspacePoset.from_inclusions([0, 1], []))
    assert (len(X.vertices), len(X.edges), len(X.cubes)) == (4, 4, 1)


def test_dual_nested():
    P = HalfspacePoset.from_inclusions([0, 1], [((0, 1), (1, 1))])
    X, orient = sageev_dual(P)
    assert (len(X.vertices), len(X.edges), len(X.cubes)) == (3, 2, 0)
    assert frozenset({Halfspace(0, 1), Halfspace(1, -1)}) not in orient.values()


def test_dual_rejects_inconsistent_poset():
    P = HalfspacePoset((0, 1), frozenset({(Halfspace(0, 1), Halfspace(1, 1))}))
    assert P.problems()
    with pytest.raises(InconsistentPosetError):
        sageev_dual(P)


def test_poset_partial_order():
    X, _ = grid((4, 3))
    P = halfspaces_meeting(X, X.vertices)
    assert P.problems() == []
    for a in P.halfspaces():
        assert P.leq(a, a)


def test_dual_to_ambient_examples():
    X, co = grid((3, 3))
    square = [at(co, p) for p in [(0, 0), (1, 0), (0, 1), (1, 1)]]
    q = square[0]
    P = halfspaces_meeting(X, square)
    _, orient = sageev_dual(P)
    sys = P.system
    home = frozenset(Halfspace(h, sys.side(h, q)) for h in P.hyperplanes)
    assert dual_to_ambient(P, home, q) == q
    far = frozenset(Halfspace(h, -sys.side(h, q)) for h in P.hyperplanes)
    assert dual_to_ambient(P, far, q) == at(co, (1, 1))
    edge = [at(co, (2, 0)), at(co, (2, 1))]
    P1 = halfspaces_meeting(X, edge)
    _, o1 = sageev_dual(P1)
    assert {co[dual_to_ambient(P1, z, q)] for z in o1.values()} == {(0, 0), (0, 1)}


def _dual_image(X, S):
    P = halfspaces_meeting(X, S)
    D_, orient = sageev_dual(P)
    q = S[0]
    vmap = {z: dual_to_ambient(P, o, q) for z, o in orient.items()}
    edges = set()
    for s, t in D_.edges.values():
        a, b = vmap[s], vmap[t]
        hits = [e for e, st in X.edges.items() if set(st) == {a, b}]
        assert len(hits) == 1
        edges.add(hits[0])
    cubes = set()
    for cube in D_.cubes.values():
        corners = {vmap[x] for x in cube.corners}
        hits = [c for c, q in X.cubes.items() if set(q.corners) == corners]
        assert len(hits) == 1
        cubes.add(hits[0])
    assert len(set(vmap.values())) == len(vmap)
    return set(vmap.values()), edges, cubes


@given(st.lists(st.integers(2, 4), min_size=1, max_size=3), st.data())
def test_sageev_dual_is_hull(shape, data):
    X, _ = grid(shape)
    S = data.draw(st.lists(st.sampled_from(X.vertices), min_size=1, max_size=4))
    H = convex_hull(X, S)
    assert _dual_image(X, S) == (set(H.vertices), set(H.edges), set(H.cubes))
