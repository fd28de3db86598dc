"""Standard complexes used as targets and fixtures."""
from __future__ import annotations

import itertools
import string

import networkx as nx

from .cube_complex import Cube, CubeComplex, DirectedEdge, model_edges, validate_complex


def _letters(n):
    return list(string.ascii_lowercase[:n])


def salvetti(generators, commuting=()) -> CubeComplex:
    """Salvetti complex of the right-angled Artin group with the given
    commutation graph: one vertex, a loop per generator, a k-cube per k-clique."""
    generators = list(generators)
    index = {g: k for k, g in enumerate(generators)}
    graph = nx.Graph()
    graph.add_nodes_from(range(len(generators)))
    graph.add_edges_from((index[a], index[b]) for a, b in commuting)
    edges = {k: (0, 0) for k in range(len(generators))}
    cubes = {}
    for clique in sorted(nx.enumerate_all_cliques(graph), key=lambda c: (len(c), sorted(c))):
        if len(clique) < 2:
            continue
        axes = sorted(clique)
        n = len(axes)
        cubes[len(cubes)] = Cube(n, (0,) * (1 << n),
                                 tuple(DirectedEdge(axes[i], True) for i, _ in model_edges(n)))
    return validate_complex([0], edges, cubes, 0, vertex_names={0: "q"},
                            edge_names=dict(enumerate(generators)))


def rose(n=2, names=None) -> CubeComplex:
    return salvetti(names or _letters(n))


def torus(d=2, names=None) -> CubeComplex:
    names = names or _letters(d)
    return salvetti(names, itertools.combinations(names, 2))


def subdivided_circle(n=2) -> CubeComplex:
    """A cycle of ``n`` edges e1..en through vertices 0..n-1."""
    edges = {k: (k, (k + 1) % n) for k in range(n)}
    return validate_complex(range(n), edges, {}, 0, edge_names={k: f"e{k + 1}" for k in range(n)})


def _cube_on(base, axes, vertex_of, edge_of):
    n = len(axes)

    def corner(b):
        return tuple(x + (b >> axes.index(a) & 1 if a in axes else 0) for a, x in enumerate(base))

    corners = tuple(vertex_of[corner(b)] for b in range(1 << n))
    edges = tuple(DirectedEdge(edge_of[(corner(b), axes[i])], True) for i, b in model_edges(n))
    return Cube(n, corners, edges)


def grid(shape) -> tuple:
    """Finite CAT(0) box: the product of paths with ``shape[i]`` vertices.

    Returns the complex and the coordinates of each vertex.
    """
    shape = tuple(shape)
    points = list(itertools.product(*(range(s) for s in shape)))
    vertex_of = {p: k for k, p in enumerate(points)}
    edges, edge_of = {}, {}
    for p in points:
        for a in range(len(shape)):
            if p[a] + 1 < shape[a]:
                q = p[:a] + (p[a] + 1,) + p[a + 1:]
                edge_of[(p, a)] = len(edges)
                edges[len(edges)] = (vertex_of[p], vertex_of[q])
    cubes = {}
    for k in range(2, len(shape) + 1):
        for axes in itertools.combinations(range(len(shape)), k):
            for p in points:
                if all(p[a] + 1 < shape[a] for a in axes):
                    cubes[len(cubes)] = _cube_on(p, list(axes), vertex_of, edge_of)
    names = {v: "(" + ",".join(map(str, p)) + ")" for p, v in vertex_of.items()}
    X = validate_complex(range(len(points)), edges, cubes, 0, vertex_names=names)
    return X, {v: p for p, v in vertex_of.items()}


def single_cube(n=3) -> CubeComplex:
    X, _ = grid((2,) * n)
    return X


def three_squares_corner() -> CubeComplex:
    """Three faces of a 3-cube meeting at a corner, without the 3-cube."""
    X, coords = grid((2, 2, 2))
    keep = {c for c, q in X.cubes.items() if q.dim == 2 and coords[q.corners[0]] == (0, 0, 0)}
    verts = sorted({v for c in keep for v in X.cubes[c].corners})
    edges = {e: st for e, st in X.edges.items() if st[0] in verts and st[1] in verts}
    cubes = {c: X.cubes[c] for c in keep}
    return validate_complex(verts, edges, cubes, 0, vertex_names=X.vertex_names)


def torus_double_cover() -> CubeComplex:
    """The 2-vertex cover of the torus with a-edges u->w, w->u and b-loops."""
    edges = {0: (0, 1), 1: (1, 0), 2: (0, 0), 3: (1, 1)}
    cubes = {
        0: Cube(2, (0, 1, 0, 1), (DirectedEdge(0), DirectedEdge(0), DirectedEdge(2), DirectedEdge(3))),
        1: Cube(2, (1, 0, 1, 0), (DirectedEdge(1), DirectedEdge(1), DirectedEdge(3), DirectedEdge(2))),
    }
    return validate_complex([0, 1], edges, cubes, 0, vertex_names={0: "u", 1: "w"},
                            edge_names={0: "a1", 1: "a2", 2: "b1", 3: "b2"})
