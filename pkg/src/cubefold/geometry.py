"""Universal-cover balls, combinatorial geodesics, halfspaces, hulls and the
dual cube complex of a finite halfspace poset."""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import NamedTuple

from networkx.utils import UnionFind

from .cube_complex import Cube, CubeComplex, DirectedEdge, check_npc, hyperplanes, identity_symmetry, model_edges
from .cubical_map import CubicalMap


class NotNPCError(ValueError):
    pass


class IncompleteError(ValueError):
    """A query reaches too close to the boundary of a truncated ball."""


class NotCAT0Error(ValueError):
    pass


@dataclass(eq=False)
class CoverBall:
    """Combinatorial ball of radius ``radius`` about a lift of ``center``'s
    image in the universal cover, as the full subcomplex on its vertices."""
    complex: CubeComplex
    center: int
    radius: int
    projection: CubicalMap
    depth: dict
    parent: dict            # vertex -> (previous vertex, base germ) along a geodesic from the center
    adjacency: dict = field(repr=False)   # (vertex, base germ) -> (neighbour, ball directed edge)

    @property
    def base(self) -> CubeComplex:
        return self.projection.codomain

    def word_to(self, x) -> tuple:
        """Base-complex letters of a geodesic from the center to ``x``."""
        out = []
        while self.parent[x] is not None:
            x, g = self.parent[x]
            out.append(g)
        return tuple(reversed(out))

    def lift(self, letters, start=None):
        """Vertices visited by the lift of ``letters``; None if it leaves the ball."""
        x = self.center if start is None else start
        out = [x]
        for d in letters:
            step = self.adjacency.get((x, d))
            if step is None:
                return None
            x = step[0]
            out.append(x)
        return out

    def project(self, path) -> tuple:
        return tuple(self.projection.germ_image(d) for d in path)


def universal_cover_ball(Y: CubeComplex, q=None, r: int = 1, check: bool = True) -> CoverBall:
    """Develop the universal cover of an NPC complex out to radius ``r``.

    Layer k+1 is built from candidate edges (x, g) leaving layer k; two
    candidates reach the same vertex exactly when they are opposite sides of a
    square whose fourth corner lies in layer k-1.
    """
    q = Y.basepoint if q is None else q
    if check and not check_npc(Y):
        raise NotNPCError("universal cover development needs a non-positively curved complex")
    squares = {}
    for c, cube in Y.cubes.items():
        if cube.dim != 2:
            continue
        for b in range(4):
            for i in range(2):
                squares.setdefault((cube.corners[b], cube.germ(b, i)), []).append((c, b, i))
    proj_v = {0: q}
    depth = {0: 0}
    parent = {0: None}
    down = {0: set()}
    adj = {}
    edges, emap = {}, {}
    layer = [0]
    for k in range(r):
        cands = [(x, g) for x in layer for g in Y.germs(proj_v[x]) if g not in down[x]]
        uf = UnionFind(cands)
        cset = set(cands)
        for x in layer:
            for h in down[x]:
                w = adj[(x, h)][0]
                for c, b, ih in squares.get((proj_v[x], h), ()):
                    cube = Y.cubes[c]
                    ig = 1 - ih
                    g = cube.germ(b, ig)
                    if (x, g) not in cset:
                        continue
                    wb = b ^ (1 << ih)
                    step = adj.get((w, cube.germ(wb, ig)))
                    if step is None:
                        continue
                    x2 = step[0]
                    g2 = cube.germ(wb ^ (1 << ig), ih)
                    if (x2, g2) in cset:
                        uf.union((x, g), (x2, g2))
        new_layer = []
        for cls in sorted((sorted(s) for s in uf.to_sets()), key=lambda s: s[0]):
            y = len(proj_v)
            x0, g0 = cls[0]
            proj_v[y] = Y.head(g0)
            depth[y] = k + 1
            parent[y] = (x0, g0)
            down[y] = set()
            for x, g in cls:
                e = len(edges)
                edges[e] = (x, y) if g.forward else (y, x)
                emap[e] = DirectedEdge(g.edge, True)
                adj[(x, g)] = (y, DirectedEdge(e, g.forward))
                adj[(y, g.reversed())] = (x, DirectedEdge(e, not g.forward))
                down[y].add(g.reversed())
            new_layer.append(y)
        layer = new_layer
    cubes, cmap = {}, {}
    for x in range(len(proj_v)):
        for c, b in Y.corners_at(proj_v[x]):
            if b != 0:
                continue
            cube = Y.cubes[c]
            n = cube.dim
            corners = [x] + [None] * ((1 << n) - 1)
            for bb in range(1, 1 << n):
                i = (bb & -bb).bit_length() - 1
                step = adj.get((corners[bb ^ (1 << i)], cube.germ(bb ^ (1 << i), i)))
                if step is None:
                    break
                corners[bb] = step[0]
            else:
                cedges = []
                for i, lo in model_edges(n):
                    nbr, d = adj[(corners[lo], cube.germ(lo, i))]
                    assert nbr == corners[lo | 1 << i], "inconsistent development"
                    cedges.append(d)
                cid = len(cubes)
                cubes[cid] = Cube(n, tuple(corners), tuple(cedges))
                cmap[cid] = (c, identity_symmetry(n))
    X = CubeComplex(tuple(range(len(proj_v))), edges, cubes, 0)
    projection = CubicalMap(X, Y, proj_v, emap, cmap)
    return CoverBall(X, 0, r, projection, depth, parent, adj)


# -- finite complexes: distances and geodesics --------------------------------

def _complex(X):
    return X.complex if isinstance(X, CoverBall) else X


@lru_cache(maxsize=64)
def _neighbours(X: CubeComplex) -> dict:
    out = {v: [] for v in X.vertices}
    for v in X.vertices:
        for g in X.germs(v):
            out[v].append((g, X.head(g)))
    return out


def distances(X, source) -> dict:
    X = _complex(X)
    nbrs = _neighbours(X)
    dist = {source: 0}
    queue = deque([source])
    while queue:
        x = queue.popleft()
        for _, w in nbrs[x]:
            if w not in dist:
                dist[w] = dist[x] + 1
                queue.append(w)
    return dist


def _check_margin(B: CoverBall, u, v, d):
    # a vertex on a geodesic lies within (depth u + depth v + d) / 2 of the center
    if (B.depth[u] + B.depth[v] + d) // 2 > B.radius:
        raise IncompleteError(f"geodesics {u}->{v} may leave the radius-{B.radius} ball")


def combinatorial_geodesics(X, u, v, limit=None) -> list:
    """Every shortest edge path from ``u`` to ``v`` (as directed edges).

    On a CoverBall the answer is certified complete only when every geodesic
    provably stays in the ball; otherwise IncompleteError is raised."""
    C = _complex(X)
    du = distances(C, u)
    if v not in du:
        return []
    dv = distances(C, v)
    d = du[v]
    if isinstance(X, CoverBall):
        _check_margin(X, u, v, d)
    nbrs = _neighbours(C)
    out = []
    stack = [(u, ())]
    while stack:
        x, p = stack.pop()
        if x == v:
            out.append(p)
            if limit is not None and len(out) >= limit:
                break
            continue
        for g, w in reversed(nbrs[x]):
            if du.get(w) == du[x] + 1 and dv.get(w) == dv[x] - 1:
                stack.append((w, p + (g,)))
    return sorted(out)


# -- halfspaces ---------------------------------------------------------------

class HalfspaceSystem:
    """Hyperplanes of a finite CAT(0) complex with per-vertex sides.

    ``sep[v]`` is a bitmask of hyperplanes separating v from ``root``; the
    halfspace (h, +1) is the side of h not containing the root."""

    def __init__(self, X: CubeComplex, root=None):
        self.complex = X
        self.root = X.basepoint if root is None else root
        if self.root is None:
            self.root = X.vertices[0]
        self.planes = hyperplanes(X)
        self.edge_plane = {e: h.id for h in self.planes for e in h.dual_edges}
        nbrs = _neighbours(X)
        sep = {self.root: 0}
        queue = deque([self.root])
        while queue:
            x = queue.popleft()
            for g, w in nbrs[x]:
                if w not in sep:
                    sep[w] = sep[x] ^ (1 << self.edge_plane[g.edge])
                    queue.append(w)
        if len(sep) != len(X.vertices):
            raise NotCAT0Error("complex is not connected")
        for e, (s, t) in X.edges.items():
            if sep[s] ^ sep[t] != 1 << self.edge_plane[e]:
                raise NotCAT0Error(f"hyperplane of edge {e} does not separate")
        self.sep = sep
        self.by_sep = {m: v for v, m in sep.items()}
        if len(self.by_sep) != len(sep):
            raise NotCAT0Error("two vertices are separated by no hyperplane")
        self.index = {v: k for k, v in enumerate(X.vertices)}

    def side(self, h: int, v) -> int:
        return 1 if self.sep[v] >> h & 1 else -1

    def separating(self, u, v) -> list:
        m = self.sep[u] ^ self.sep[v]
        return [h for h in range(len(self.planes)) if m >> h & 1]

    @cached_property
    def plus_masks(self) -> list:
        """Vertex bitset of each halfspace (h, +1)."""
        out = [0] * len(self.planes)
        for v, m in self.sep.items():
            bit = 1 << self.index[v]
            h = 0
            while m:
                if m & 1:
                    out[h] |= bit
                m >>= 1
                h += 1
        return out

    def mask(self, hs) -> int:
        plus = self.plus_masks[hs.hyperplane]
        return plus if hs.side > 0 else ((1 << len(self.index)) - 1) ^ plus


_systems = {}


def halfspace_system(X) -> HalfspaceSystem:
    C = _complex(X)
    root = X.center if isinstance(X, CoverBall) else None
    key = (id(C), root)
    if key not in _systems or _systems[key][0] is not C:
        if len(_systems) > 64:
            _systems.clear()
        _systems[key] = (C, HalfspaceSystem(C, root))
    return _systems[key][1]


@dataclass(frozen=True, eq=False)
class Subcomplex:
    ambient: CubeComplex
    vertices: frozenset
    edges: frozenset
    cubes: frozenset
    complete: bool = True

    def to_complex(self) -> CubeComplex:
        X = self.ambient
        return CubeComplex(tuple(sorted(self.vertices)), {e: X.edges[e] for e in sorted(self.edges)},
                           {c: X.cubes[c] for c in sorted(self.cubes)},
                           X.basepoint if X.basepoint in self.vertices else min(self.vertices),
                           {v: X.vertex_name(v) for v in self.vertices if v in X.vertex_names},
                           {e: X.edge_name(e) for e in self.edges if e in X.edge_names})


def full_subcomplex(X: CubeComplex, verts, complete=True) -> Subcomplex:
    verts = frozenset(verts)
    edges = frozenset(e for e, (s, t) in X.edges.items() if s in verts and t in verts)
    cubes = frozenset(c for c, q in X.cubes.items() if all(v in verts for v in q.corners))
    return Subcomplex(X, verts, edges, cubes, complete)


def convex_hull(X, S) -> Subcomplex:
    """Cubical convex hull: vertices on the S-side of every hyperplane that
    has all of S on one side, with every cell spanned by them.

    On a CoverBall this is the hull intersected with the ball; ``complete`` is
    False when the hull reaches the ball's boundary."""
    S = list(S)
    if not S:
        raise ValueError("convex hull of an empty set")
    sys = halfspace_system(X)
    all_in = ~0
    any_in = 0
    for s in S:
        all_in &= sys.sep[s]
        any_in |= sys.sep[s]
    keep = [v for v, m in sys.sep.items() if m & all_in == all_in and m & ~any_in == 0]
    complete = True
    if isinstance(X, CoverBall):
        complete = max(X.depth[v] for v in keep) < X.radius
    return full_subcomplex(_complex(X), keep, complete)


class Halfspace(NamedTuple):
    hyperplane: int
    side: int

    def complement(self) -> "Halfspace":
        return Halfspace(self.hyperplane, -self.side)


class InconsistentPosetError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class HalfspacePoset:
    """Finite set of halfspaces closed under complement.

    ``below`` holds pairs (A, B) of halfspaces of distinct hyperplanes with A
    strictly inside B.  ``system`` is set when the poset came from a complex."""
    hyperplanes: tuple
    below: frozenset
    system: HalfspaceSystem | None = None

    def halfspaces(self) -> list:
        return [Halfspace(h, s) for h in self.hyperplanes for s in (-1, 1)]

    def leq(self, a: Halfspace, b: Halfspace) -> bool:
        return a == b or (a, b) in self.below

    def problems(self) -> list:
        out = []
        hs = set(self.hyperplanes)
        for a, b in self.below:
            if a.hyperplane not in hs or b.hyperplane not in hs:
                out.append(f"{a}<{b} mentions a foreign hyperplane")
            if a.hyperplane == b.hyperplane:
                out.append(f"{a}<{b} relates the two sides of one hyperplane")
            if (b.complement(), a.complement()) not in self.below:
                out.append(f"complement does not reverse {a}<{b}")
            if (b, a) in self.below:
                out.append(f"{a} and {b} include each other")
        for (a, b), (c, d) in itertools.product(self.below, repeat=2):
            if b == c and a != d and (a, d) not in self.below:
                out.append(f"{a}<{b}<{d} is not transitive")
        return out

    @classmethod
    def from_inclusions(cls, hyperplanes, inclusions) -> "HalfspacePoset":
        """Close a list of strict inclusions under complement and transitivity."""
        below = set()
        for a, b in inclusions:
            a, b = Halfspace(*a), Halfspace(*b)
            below.add((a, b))
            below.add((b.complement(), a.complement()))
        changed = True
        while changed:
            changed = False
            for (a, b), (c, d) in list(itertools.product(below, repeat=2)):
                if b == c and (a, d) not in below and a != d:
                    below.add((a, d))
                    changed = True
        return cls(tuple(hyperplanes), frozenset(below))


def halfspaces_meeting(X, S) -> HalfspacePoset:
    """Both sides of every hyperplane with vertices of S on each side,
    ordered by vertex-set inclusion in X."""
    sys = halfspace_system(X)
    all_in, any_in = ~0, 0
    for s in S:
        all_in &= sys.sep[s]
        any_in |= sys.sep[s]
    planes = tuple(h for h in range(len(sys.planes)) if any_in >> h & 1 and not all_in >> h & 1)
    hs = [Halfspace(h, s) for h in planes for s in (-1, 1)]
    masks = {a: sys.mask(a) for a in hs}
    below = frozenset((a, b) for a in hs for b in hs
                      if a.hyperplane != b.hyperplane and masks[a] & ~masks[b] == 0)
    return HalfspacePoset(planes, below, sys)


def sageev_dual(P: HalfspacePoset) -> tuple:
    """Cube complex of consistent orientations of P.

    Returns the complex and a dict from its vertices to the chosen halfspaces
    (one per hyperplane, in ``P.hyperplanes`` order)."""
    bad = P.problems()
    if bad:
        raise InconsistentPosetError("; ".join(bad[:5]))
    planes = P.hyperplanes
    # a and b cannot both be chosen when a lies inside the complement of b
    clash = {a: {b for b in P.halfspaces() if P.leq(a, b.complement())} for a in P.halfspaces()}
    orientations = []

    def extend(chosen):
        k = len(chosen)
        if k == len(planes):
            orientations.append(tuple(chosen))
            return
        for s in (-1, 1):
            a = Halfspace(planes[k], s)
            if not any(b in clash[a] for b in chosen):
                extend(chosen + [a])

    extend([])
    vid = {o: k for k, o in enumerate(orientations)}

    def flipped(o, ks):
        o = list(o)
        for k in ks:
            o[k] = o[k].complement()
        return tuple(o)

    edges, edge_of = {}, {}
    for o in orientations:
        for k, a in enumerate(o):
            if a.side < 0:
                o2 = flipped(o, [k])
                if o2 in vid:
                    edge_of[(vid[o], k)] = len(edges)
                    edges[len(edges)] = (vid[o], vid[o2])
    cubes = {}
    for o in orientations:
        up = [k for k, a in enumerate(o) if a.side < 0 and (vid[o], k) in edge_of]
        level = [(k,) for k in up]
        while level:
            nxt = []
            for T in level:
                for k in up:
                    T2 = T + (k,)
                    if k > T[-1] and all(flipped(o, sub) in vid for sub in _subsets(T2)):
                        nxt.append(T2)
            for T in nxt:
                n = len(T)
                corners = tuple(vid[flipped(o, [T[i] for i in range(n) if b >> i & 1])] for b in range(1 << n))
                cedges = tuple(DirectedEdge(edge_of[(corners[lo], T[i])], True) for i, lo in model_edges(n))
                cubes[len(cubes)] = Cube(n, corners, cedges)
            level = nxt
    X = CubeComplex(tuple(range(len(orientations))), edges, cubes, 0)
    return X, {k: frozenset(o) for k, o in enumerate(orientations)}


def _subsets(T):
    for r in range(2, len(T) + 1):
        yield from itertools.combinations(T, r)


def dual_to_ambient(P: HalfspacePoset, z, basepoint) -> int:
    """The vertex of P's ambient complex lying in every halfspace chosen by
    ``z`` and on ``basepoint``'s side of every hyperplane outside P."""
    sys = P.system
    if sys is None:
        raise ValueError("poset is not attached to an ambient complex")
    m = sys.sep[basepoint]
    for a in z:
        if a.side > 0:
            m |= 1 << a.hyperplane
        else:
            m &= ~(1 << a.hyperplane)
    if m not in sys.by_sep:
        raise LookupError("no ambient vertex realises this orientation")
    return sys.by_sep[m]
