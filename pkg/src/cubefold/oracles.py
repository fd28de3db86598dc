"""Brute-force reference implementations for tests.

Nothing here imports the modules under test: graphs are plain edge lists,
words are lists of (letter, exponent) pairs, complexes are read through their
raw vertex/edge/cube tables only.
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from math import prod

_TOKEN = re.compile(r"^([^\s^]+)(?:\^(-?\d+))?$")


def word_letters(text: str) -> list:
    """``"a b^-1 a^2"`` -> [("a", 1), ("b", -1), ("a", 1), ("a", 1)]."""
    out = []
    for tok in text.split():
        m = _TOKEN.match(tok)
        if not m:
            raise ValueError(f"bad token {tok!r}")
        k = int(m.group(2) or 1)
        out.extend([(m.group(1), 1 if k > 0 else -1)] * abs(k))
    return out


def _as_letters(w):
    return word_letters(w) if isinstance(w, str) else list(w)


def free_reduction(w) -> list:
    stack = []
    for x, s in _as_letters(w):
        if stack and stack[-1] == (x, -s):
            stack.pop()
        else:
            stack.append((x, s))
    return stack


# -- Stallings folding --------------------------------------------------------

@dataclass
class StallingsGraph:
    base: int
    vertices: list
    edges: list        # (source, letter, target)

    @property
    def folded(self) -> bool:
        seen = set()
        for u, x, v in self.edges:
            for key in ((u, x, 1), (v, x, -1)):
                if key in seen:
                    return False
                seen.add(key)
        return True

    def _step(self):
        table = {}
        for u, x, v in self.edges:
            table[(u, x, 1)] = v
            table[(v, x, -1)] = u
        return table

    def read(self, w, start=None):
        """End vertex of the path spelling w, or None."""
        table = self._step()
        v = self.base if start is None else start
        for x, s in _as_letters(w):
            v = table.get((v, x, s))
            if v is None:
                return None
        return v

    def accepts(self, w) -> bool:
        return self.read(free_reduction(w)) == self.base

    def trimmed(self) -> "StallingsGraph":
        """Repeatedly delete non-base vertices of valence one."""
        edges = list(self.edges)
        while True:
            deg = {v: 0 for v in self.vertices}
            for u, _, v in edges:
                deg[u] += 1
                deg[v] += 1
            leaves = {v for v, d in deg.items() if d == 1 and v != self.base}
            if not leaves:
                break
            edges = [e for e in edges if e[0] not in leaves and e[2] not in leaves]
        verts = sorted({self.base} | {u for u, _, _ in edges} | {v for _, _, v in edges})
        return StallingsGraph(self.base, verts, edges)

    def rebased(self, v) -> "StallingsGraph":
        return StallingsGraph(v, self.vertices, self.edges)

    def is_covering(self, alphabet) -> bool:
        table = self._step()
        return all((v, x, s) in table for v in self.vertices for x in alphabet for s in (1, -1))


def classic_fold(words) -> StallingsGraph:
    """Wedge of circles spelling ``words``, folded until no vertex has two
    edges with the same label and direction."""
    vertices = [0]
    edges = []
    for w in words:
        letters = _as_letters(w)
        u = 0
        for k, (x, s) in enumerate(letters):
            if k == len(letters) - 1:
                v = 0
            else:
                v = len(vertices)
                vertices.append(v)
            edges.append((u, x, v) if s > 0 else (v, x, u))
            u = v
    rep = {v: v for v in vertices}

    def find(v):
        while rep[v] != v:
            rep[v] = rep[rep[v]]
            v = rep[v]
        return v

    while True:
        edges = sorted({(find(u), x, find(v)) for u, x, v in edges})
        clash = None
        seen = {}
        for u, x, v in edges:
            for key, other in (((u, x, 1), v), ((v, x, -1), u)):
                if key in seen and seen[key] != other:
                    clash = (seen[key], other)
                    break
                seen[key] = other
            if clash:
                break
        if clash is None:
            break
        a, b = sorted(clash)
        rep[b] = a
    verts = sorted({find(v) for v in vertices})
    return StallingsGraph(find(0), verts, edges)


def canonical_labeled_graph(base, edges) -> tuple:
    """Relabel a folded based graph by breadth-first search from the base,
    taking slots in (letter, direction) order.  Equal outputs mean based
    labeled isomorphism."""
    out_of = {}
    for k, (u, x, v) in enumerate(edges):
        out_of.setdefault(u, []).append(((x, 1), v, k))
        out_of.setdefault(v, []).append(((x, -1), u, k))
    num = {base: 0}
    queue = deque([base])
    while queue:
        u = queue.popleft()
        for _, v, _ in sorted(out_of.get(u, []), key=lambda t: (t[0], t[2])):
            if v not in num:
                num[v] = len(num)
                queue.append(v)
    return len(num), tuple(sorted((num[u], x, num[v]) for u, x, v in edges))


def free_index(words, alphabet):
    core = classic_fold(words).trimmed()
    return len(core.vertices) if core.is_covering(alphabet) else None


def free_is_normal(words, alphabet) -> bool:
    core = classic_fold(words).trimmed()
    if not core.edges:
        return True
    if not core.is_covering(alphabet):
        return False
    ref = canonical_labeled_graph(core.base, core.edges)
    return all(canonical_labeled_graph(v, core.edges) == ref for v in core.vertices)


def free_least_power(words, g, bound=None):
    """Least k >= 1 with g^k in H by direct membership, searching k <= bound
    (default: four times the folded graph's size)."""
    G = classic_fold(words)
    bound = bound or 4 * len(G.vertices) + 4
    g = _as_letters(g)
    for k in range(1, bound + 1):
        if G.accepts(g * k):
            return k
    return None


# -- lattices --------------------------------------------------------------------

def _echelon(rows, d) -> list:
    """Integer row echelon form (positive pivots) by Euclid on columns."""
    rows = [list(r) for r in rows if any(r)]
    out = []
    for c in range(d):
        live = [r for r in rows if r[c] != 0]
        rest = [r for r in rows if r[c] == 0]
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[c]))
            p = live[0]
            nxt = [p]
            for r in live[1:]:
                q = r[c] // p[c]
                r = [a - q * b for a, b in zip(r, p)]
                (nxt if r[c] else rest).append(r)
            live = nxt
        if live:
            p = live[0]
            if p[c] < 0:
                p = [-a for a in p]
            out.append(p)
        rows = [r for r in rest if any(r)]
    return out


class LatticeOracle:
    """Subgroups of Z^d by integer row reduction of exponent vectors."""

    def __init__(self, letters, generators):
        self.letters = list(letters)
        self.d = len(self.letters)
        self.basis = _echelon([self.vector(w) for w in generators], self.d)

    def vector(self, w) -> list:
        v = [0] * self.d
        for x, s in _as_letters(w):
            v[self.letters.index(x)] += s
        return v

    def _contains(self, v) -> bool:
        v = list(v)
        for row in self.basis:
            c = next(i for i, a in enumerate(row) if a)
            if any(v[:c]) or v[c] % row[c]:
                return False
            q = v[c] // row[c]
            v = [a - q * b for a, b in zip(v, row)]
        return not any(v)

    def member(self, w) -> bool:
        return self._contains(self.vector(w))

    def index(self):
        if len(self.basis) < self.d:
            return None
        return prod(row[next(i for i, a in enumerate(row) if a)] for row in self.basis)

    def least_power(self, w):
        v = self.vector(w)
        pivots = [row[next(i for i, a in enumerate(row) if a)] for row in self.basis]
        for k in range(1, max(1, prod(pivots)) + 1):
            if self._contains([k * a for a in v]):
                return k
        return None

    def is_normal(self) -> bool:
        return True


def lattice_oracle(letters, generators) -> LatticeOracle:
    return LatticeOracle(letters, generators)


# -- hulls --------------------------------------------------------------------------

def _bfs(adj, s) -> dict:
    dist = {s: 0}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def brute_hull(X, S) -> tuple:
    """Close S under "lies on a geodesic between two members", then take every
    cell spanned.  Returns (vertices, edges, cubes) as frozensets of ids."""
    adj = {v: set() for v in X.vertices}
    for s, t in X.edges.values():
        adj[s].add(t)
        adj[t].add(s)
    dist = {v: _bfs(adj, v) for v in X.vertices}
    hull = set(S)
    while True:
        grown = set(hull)
        for u in hull:
            for v in hull:
                duv = dist[u][v]
                grown.update(w for w in X.vertices if dist[u][w] + dist[w][v] == duv)
        if grown == hull:
            break
        hull = grown
    edges = frozenset(e for e, (s, t) in X.edges.items() if s in hull and t in hull)
    cubes = frozenset(c for c, q in X.cubes.items() if set(q.corners) <= hull)
    return frozenset(hull), edges, cubes
