"""Edge paths in the 1-skeleton of a cube complex."""
from __future__ import annotations

import re
from dataclasses import dataclass

from .cube_complex import CubeComplex, DirectedEdge


class WordError(ValueError):
    pass


@dataclass(frozen=True)
class CubicalWord:
    letters: tuple
    start: int
    end: int

    def __len__(self):
        return len(self.letters)

    @property
    def closed(self) -> bool:
        return self.start == self.end

    def inverse(self) -> "CubicalWord":
        return CubicalWord(tuple(d.reversed() for d in reversed(self.letters)), self.end, self.start)

    def __mul__(self, other: "CubicalWord") -> "CubicalWord":
        if self.end != other.start:
            raise WordError(f"cannot concatenate: path ends at {self.end}, next starts at {other.start}")
        return CubicalWord(self.letters + other.letters, self.start, other.end)

    def __pow__(self, k: int) -> "CubicalWord":
        if k < 0:
            return self.inverse() ** -k
        if k and not self.closed:
            raise WordError("only closed words have powers")
        return CubicalWord(self.letters * k, self.start, self.start if k == 0 else self.end)


def path(Y: CubeComplex, letters, start=None) -> CubicalWord:
    """Word from directed edges, checking they form a path (from ``start``,
    default the basepoint when there are no letters)."""
    letters = tuple(DirectedEdge(*d) for d in letters)
    if not letters:
        s = Y.basepoint if start is None else start
        return CubicalWord((), s, s)
    s = Y.tail(letters[0]) if start is None else start
    v = s
    for k, d in enumerate(letters):
        if Y.tail(d) != v:
            raise WordError(f"letter {k} ({Y.format_germ(d)}) does not start at {Y.vertex_name(v)}")
        v = Y.head(d)
    return CubicalWord(letters, s, v)


def loop(Y: CubeComplex, letters) -> CubicalWord:
    """Closed path at the basepoint."""
    w = path(Y, letters, Y.basepoint)
    if w.end != Y.basepoint:
        raise WordError("word is not a closed path at the basepoint")
    return w


_TOKEN = re.compile(r"^([^\s^,]+)(?:\^(-?\d+))?$")


def parse_letters(Y: CubeComplex, text: str) -> tuple:
    """Tokens ``e``, ``e^-1`` or ``e^k`` separated by whitespace."""
    out = []
    for tok in text.split():
        m = _TOKEN.match(tok)
        if not m:
            raise WordError(f"bad token {tok!r}")
        try:
            e = Y.edge_by_name(m.group(1))
        except KeyError as exc:
            raise WordError(str(exc)) from None
        k = int(m.group(2) or 1)
        out.extend([DirectedEdge(e, k > 0)] * abs(k))
    return tuple(out)


def parse_word(Y: CubeComplex, text: str) -> CubicalWord:
    return path(Y, parse_letters(Y, text), Y.basepoint if not text.split() else None)


def format_word(Y: CubeComplex, w) -> str:
    letters = w.letters if isinstance(w, CubicalWord) else w
    return " ".join(Y.format_germ(d) for d in letters)
