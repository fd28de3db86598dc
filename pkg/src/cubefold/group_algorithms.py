"""Word problem, membership, power membership, normality and index for
subgroups given by completions."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache

from .completion import CompletionResult, complete, complete_words, interval_from_word
from .cube_complex import CubeComplex, DirectedEdge, check_npc
from .cubical_map import is_covering
from .words import CubicalWord, WordError, path


class NotFinishedError(ValueError):
    pass


@dataclass(frozen=True)
class SpanningTree:
    root: int
    edges: frozenset
    parent: dict     # vertex -> (parent vertex, germ from the parent), None at the root

    def chain(self, v) -> list:
        out = [v]
        while self.parent[v] is not None:
            v = self.parent[v][0]
            out.append(v)
        return out

    def path(self, u, v) -> tuple:
        """The tree path from u to v."""
        up_u, up_v = self.chain(u), self.chain(v)
        common = set(up_v)
        meet = next(x for x in up_u if x in common)
        rise = [self.parent[x][1].reversed() for x in up_u[:up_u.index(meet)]]
        fall = [self.parent[x][1] for x in up_v[:up_v.index(meet)]]
        return tuple(rise) + tuple(reversed(fall))


def spanning_tree(Y: CubeComplex, root=None) -> SpanningTree:
    """Breadth-first spanning tree of the 1-skeleton (least germs first)."""
    root = Y.basepoint if root is None else root
    parent = {root: None}
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for g in Y.germs(x):
            h = Y.head(g)
            if h not in parent:
                parent[h] = (x, g)
                queue.append(h)
    return SpanningTree(root, frozenset(p[1].edge for p in parent.values() if p is not None), parent)


@dataclass(frozen=True)
class CubicalPresentation:
    """Generators are all edges; relators are the spanning-tree edges and
    one boundary word per square."""
    generators: tuple    # edge ids
    relators: tuple      # tuples of directed edges
    tree: SpanningTree

    def format(self, Y: CubeComplex) -> str:
        gens = ", ".join(Y.edge_name(e) for e in self.generators)
        rels = ", ".join(" ".join(Y.format_germ(d) for d in r) for r in self.relators)
        return f"< {gens} | {rels} >"


def cubical_presentation(Y: CubeComplex, T: SpanningTree | None = None) -> CubicalPresentation:
    T = T or spanning_tree(Y)
    rels = [(DirectedEdge(e, True),) for e in sorted(T.edges)]
    for c, cube in sorted(Y.cubes.items()):
        if cube.dim == 2:
            # boundary 0 -> 1 -> 3 -> 2 -> 0
            rels.append((cube.germ(0, 0), cube.germ(1, 1), cube.germ(3, 0), cube.germ(2, 1)))
    return CubicalPresentation(tuple(sorted(Y.edges)), tuple(rels), T)


def word_to_cubical(Y: CubeComplex, T: SpanningTree, letters) -> CubicalWord:
    """Closed cubical word at the root for a word in edges (all edges allowed),
    threading tree paths between consecutive letters."""
    out = []
    v = T.root
    for d in letters:
        d = DirectedEdge(*d)
        out.extend(T.path(v, Y.tail(d)))
        out.append(d)
        v = Y.head(d)
    out.extend(T.path(v, T.root))
    return path(Y, free_reduce(out), T.root)


def free_reduce(letters) -> tuple:
    out = []
    for d in letters:
        if out and out[-1] == d.reversed():
            out.pop()
        else:
            out.append(d)
    return tuple(out)


# -- reduced forms --------------------------------------------------------------

def _path_geodesics(G: CompletionResult, end, limit=None) -> list:
    """Shortest paths in a completed hull from its basepoint to ``end``,
    projected to letters of the target."""
    X, f = G.complex, G.map
    dist = {end: 0}
    queue = deque([end])
    while queue:
        x = queue.popleft()
        for g in X.germs(x):
            h = X.head(g)
            if h not in dist:
                dist[h] = dist[x] + 1
                queue.append(h)
    out = []
    stack = [(X.basepoint, ())]
    while stack:
        x, p = stack.pop()
        if x == end:
            out.append(p)
            if limit is not None and len(out) >= limit:
                break
            continue
        for g in sorted(X.germs(x), key=f.germ_image, reverse=True):
            h = X.head(g)
            if dist.get(h) == dist[x] - 1:
                stack.append((h, p + (f.germ_image(g),)))
    return sorted(out)


@lru_cache(maxsize=512)
def _interval_hull(Y: CubeComplex, letters: tuple, start: int):
    w = CubicalWord(letters, start, Y.head(letters[-1]))
    _, f, n = interval_from_word(Y, w)
    G = complete(f, budget=10 ** 7)
    return G, G.vertex_origin[n]


def reduced_forms(Y: CubeComplex, w: CubicalWord, limit=None, method: str = "hull") -> list:
    """All shortest words representing the same path class as ``w``.

    The default method completes the interval carrying ``w``: its image in
    the universal cover is the convex hull of the lifted path, which holds
    every geodesic between the endpoints.  ``method="ball"`` searches a
    universal-cover ball of radius ``len(w) + 1`` instead."""
    if not w.letters:
        return [w]
    if method == "ball":
        from .geometry import combinatorial_geodesics, universal_cover_ball
        B = universal_cover_ball(Y, w.start, len(w.letters) + 1)
        end = B.lift(w.letters)[-1]
        paths = combinatorial_geodesics(B, B.center, end, limit)
        words = [B.project(p) for p in paths]
    elif not Y.cubes:
        words = [free_reduce(w.letters)]
    else:
        G, end = _interval_hull(Y, w.letters, w.start)
        words = _path_geodesics(G, end, limit)
    return [CubicalWord(p, w.start, w.end) for p in words]


@lru_cache(maxsize=64)
def commutation_table(Y: CubeComplex):
    """For a Salvetti complex (one vertex, every square a commutator of two
    distinct loops, non-positively curved): the set of commuting edge pairs.
    None for any other complex."""
    if len(Y.vertices) != 1:
        return None
    pairs = set()
    for cube in Y.cubes.values():
        if cube.dim != 2:
            continue
        x, x2, y, y2 = cube.edges
        if x != x2 or y != y2 or x.edge == y.edge or not x.forward or not y.forward:
            return None
        pairs.add((x.edge, y.edge))
        pairs.add((y.edge, x.edge))
    return frozenset(pairs) if check_npc(Y) else None


def _trace_reduce(letters, commute) -> tuple:
    """Cancel x ... x^-1 pairs whose middle commutes with x, then take the
    lexicographically least shuffle by commutations."""
    out = []
    for d in letters:
        for k in range(len(out) - 1, -1, -1):
            e = out[k]
            if e.edge == d.edge:
                if e.forward != d.forward:
                    del out[k]
                    break
                out.append(d)
                break
            if (e.edge, d.edge) not in commute:
                out.append(d)
                break
        else:
            out.append(d)
    least = []
    while out:
        best = None
        for k, d in enumerate(out):
            if all(e.edge != d.edge and (e.edge, d.edge) in commute for e in out[:k]):
                if best is None or d < out[best]:
                    best = k
        least.append(out.pop(best))
    return tuple(least)


def reduced_form(Y: CubeComplex, w: CubicalWord) -> CubicalWord:
    """The least reduced form of ``w``."""
    if not Y.cubes:
        return CubicalWord(free_reduce(w.letters), w.start, w.end)
    commute = commutation_table(Y)
    if commute is not None:
        return CubicalWord(_trace_reduce(w.letters, commute), w.start, w.end)
    return reduced_forms(Y, w, limit=1)[0]


def words_equal(Y: CubeComplex, w1: CubicalWord, w2: CubicalWord) -> bool:
    if (w1.start, w1.end) != (w2.start, w2.end):
        return False
    return reduced_form(Y, w1 * w2.inverse()).letters == ()


# -- membership -------------------------------------------------------------------

def _require_finished(Z: CompletionResult):
    if not Z.finished:
        raise NotFinishedError("the completion did not finish; the subgroup may not be convex cocompact")


def _closes(Z: CompletionResult, letters) -> bool:
    lifted = Z.map.lift(letters)
    if lifted is None:
        return False
    end = Z.complex.head(lifted[-1]) if lifted else Z.complex.basepoint
    return end == Z.complex.basepoint


def _closed_at_base(Y: CubeComplex, g: CubicalWord):
    if g.start != Y.basepoint or g.end != Y.basepoint:
        raise WordError("word is not a closed path at the basepoint")


def membership(Z: CompletionResult, g: CubicalWord) -> bool:
    """Is the element ``g`` in the subgroup carried by the completion Z?"""
    _require_finished(Z)
    _closed_at_base(Z.target, g)
    return _closes(Z, reduced_form(Z.target, g).letters)


def power_membership(Z: CompletionResult, g: CubicalWord, L: int | None = None):
    """Least k in 1..L with g^k in the subgroup, or None.  ``L`` defaults to
    the number of vertices of the completion."""
    _require_finished(Z)
    Y = Z.target
    _closed_at_base(Y, g)
    L = len(Z.complex.vertices) if L is None else L
    current = CubicalWord((), Y.basepoint, Y.basepoint)
    for k in range(1, L + 1):
        current = reduced_form(Y, current * g)
        if _closes(Z, current.letters):
            return k
    return None


# -- normality and index ------------------------------------------------------------

@dataclass(frozen=True)
class CoreGraph:
    """Union of the lifts into Z of the reduced generator paths."""
    completion: CompletionResult
    vertices: frozenset
    edges: frozenset


def core_graph(Z: CompletionResult) -> CoreGraph:
    _require_finished(Z)
    Y = Z.target
    verts, edges = {Z.complex.basepoint}, set()
    for s in Z.generators or ():
        for r in reduced_forms(Y, s):
            lifted = Z.map.lift(r.letters) or []
            for d in lifted:
                edges.add(d.edge)
                verts.add(Z.complex.head(d))
    return CoreGraph(Z, frozenset(verts), frozenset(edges))


@lru_cache(maxsize=256)
def _reduced_completion(Y: CubeComplex, words: tuple, budget: int) -> CompletionResult:
    q = Y.basepoint
    reduced = [reduced_form(Y, CubicalWord(w, q, q)) for w in words]
    reduced = [r for r in reduced if r.letters]
    return complete_words(Y, reduced, budget)


def _generators(Z: CompletionResult) -> list:
    if Z.generators is None:
        raise ValueError("completion does not record subgroup generators")
    return list(Z.generators)


def normalized_by(Z: CompletionResult, g: CubicalWord, budget: int = 20000):
    """Does g normalize H?  Compares the completions of the reduced
    generators of H and of g^-1 H g up to basepointed isomorphism over the
    target.  None when either completion exceeds the budget."""
    Y = Z.target
    _closed_at_base(Y, g)
    gens = _generators(Z)
    ref = _reduced_completion(Y, tuple(s.letters for s in gens), budget)
    other = _reduced_completion(Y, tuple((g.inverse() * s * g).letters for s in gens), budget)
    if not (ref.finished and other.finished):
        return None
    return ref.canonical == other.canonical


def conjugates_in(Z: CompletionResult, g: CubicalWord) -> bool:
    """g^-1 H g == H, decided by membership of conjugated generators in both
    directions."""
    _require_finished(Z)
    gens = _generators(Z)
    return all(membership(Z, g.inverse() * s * g) and membership(Z, g * s * g.inverse()) for s in gens)


def group_generators(Y: CubeComplex, T: SpanningTree | None = None) -> list:
    """Closed words for the edges outside a spanning tree."""
    T = T or spanning_tree(Y)
    return [word_to_cubical(Y, T, [DirectedEdge(e, True)]) for e in sorted(Y.edges) if e not in T.edges]


def is_normal(Z: CompletionResult, budget: int = 20000):
    """True/False, or None if some conjugate completion ran over budget."""
    _require_finished(Z)
    unknown = False
    for x in group_generators(Z.target):
        for y in (x, x.inverse()):
            r = normalized_by(Z, y, budget)
            if r is False:
                return False
            unknown |= r is None
    return None if unknown else True


def coset_enumeration(Z: CompletionResult, budget: int = 64):
    """Right coset representatives found by closing under the generators,
    deciding H r = H s by membership of r s^-1.  Returns the list of
    representatives, or None when more than ``budget`` are found."""
    _require_finished(Z)
    Y = Z.target
    gens = group_generators(Y)
    gens = [w for x in gens for w in (x, x.inverse())]
    reps = [CubicalWord((), Y.basepoint, Y.basepoint)]
    k = 0
    while k < len(reps):
        r = reps[k]
        k += 1
        for s in gens:
            t = reduced_form(Y, r * s)
            if any(membership(Z, t * u.inverse()) for u in reps):
                continue
            if len(reps) >= budget:
                return None
            reps.append(t)
    return reps


def finite_index(Z: CompletionResult, coset_budget: int = 64):
    """Index of H when finite and detected, else None.  A completion that is
    a covering has index equal to its basepoint fiber."""
    _require_finished(Z)
    covering, fiber = is_covering(Z.map)
    if covering:
        return fiber
    reps = coset_enumeration(Z, coset_budget)
    return None if reps is None else len(reps)
