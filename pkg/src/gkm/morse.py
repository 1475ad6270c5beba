"""Generic directions, Morse indices and the weight products at each fixed point."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exactalg import Polynomial, pairing, parse_rational
from .gkmgraph import GkmGraph, NonGenericDirection

__all__ = [
    "IndexNotIncreasing",
    "MorseData",
    "VertexMorse",
    "is_generic",
    "is_index_increasing",
    "morse_data",
    "parse_direction",
]


class IndexNotIncreasing(ValueError):
    def __init__(self, violations: list[tuple[str, str]]):
        self.violations = violations
        edges = ", ".join(f"({a},{b})" for a, b in violations)
        super().__init__(f"index-increasing hypothesis fails on ascending edges {edges}")


def parse_direction(text) -> tuple[Fraction, ...]:
    """``"0,-1,-2"`` or a sequence of numbers/``"a/b"`` strings."""
    parts = text.split(",") if isinstance(text, str) else list(text)
    xi = tuple(parse_rational(p) for p in parts)
    if not any(xi):
        raise ValueError("xi must be nonzero")
    return xi


def is_generic(g: GkmGraph, xi: Sequence) -> tuple[bool, tuple[str, str] | None]:
    """True iff no edge weight pairs to zero with ``xi``; otherwise the first bad edge."""
    if len(xi) != g.n:
        raise ValueError(f"xi has length {len(xi)}, the graph has dim_t = {g.n}")
    for a, b in g.directed_edges():
        if not pairing(g.weight(a, b), xi):
            return False, (a, b)
    return True, None


@dataclass(frozen=True)
class VertexMorse:
    psi: Fraction
    index: int
    # weights of ascending (resp. descending) incoming edges, in neighbor order
    down_weights: tuple[tuple[int, ...], ...]
    up_weights: tuple[tuple[int, ...], ...]
    lambda_minus: Polynomial
    lambda_plus: Polynomial
    lambda_full: Polynomial

    @property
    def all_weights(self) -> tuple[tuple[int, ...], ...]:
        return self.down_weights + self.up_weights


class MorseData:
    """Per-vertex psi, half-index and the products Lambda^-, Lambda^+, Lambda."""

    def __init__(self, g: GkmGraph, xi: Sequence, vertices: dict[str, VertexMorse]):
        self.graph = g
        self.xi = tuple(Fraction(c) for c in xi)
        self._v = vertices

    def __getitem__(self, vid: str) -> VertexMorse:
        return self._v[vid]

    def psi(self, vid: str) -> Fraction:
        return self._v[vid].psi

    def index(self, vid: str) -> int:
        return self._v[vid].index

    def lambda_minus(self, vid: str) -> Polynomial:
        return self._v[vid].lambda_minus

    def lambda_plus(self, vid: str) -> Polynomial:
        return self._v[vid].lambda_plus

    def lambda_full(self, vid: str) -> Polynomial:
        return self._v[vid].lambda_full

    def ids_by_index(self) -> list[str]:
        """Vertex ids sorted by (index, psi, graph order)."""
        g = self.graph
        return sorted(g.ids, key=lambda v: (self.index(v), self.psi(v), g.index(v)))

    def minimum(self) -> str:
        return min(self.graph.ids, key=lambda v: (self.psi(v), self.graph.index(v)))

    def valence(self) -> int:
        return max((len(m.all_weights) for m in self._v.values()), default=0)

    def to_dict(self) -> dict:
        from .exactalg import format_rational

        return {
            "xi": [format_rational(c) for c in self.xi],
            "vertices": [
                {
                    "id": v,
                    "psi": format_rational(self.psi(v)),
                    "lambda": self.index(v),
                    "lambda_minus": str(self.lambda_minus(v)),
                    "lambda_plus": str(self.lambda_plus(v)),
                    "lambda_full": str(self.lambda_full(v)),
                }
                for v in self.graph.ids
            ],
        }


def morse_data(g: GkmGraph, xi: Sequence) -> MorseData:
    ok, bad = is_generic(g, xi)
    if not ok:
        raise NonGenericDirection(bad)
    psi = {v: g.psi(v, xi) for v in g.ids}
    out = {}
    for v in g.ids:
        down, up = [], []
        for r in g.neighbors(v):
            if not g.has_edge(r, v):
                continue
            (down if psi[r] < psi[v] else up).append(g.weight(r, v))
        lm = Polynomial.product_of_linear(g.n, down)
        lp = Polynomial.product_of_linear(g.n, up)
        out[v] = VertexMorse(psi[v], len(down), tuple(down), tuple(up), lm, lp, lm * lp)
    return MorseData(g, xi, out)


def is_index_increasing(g: GkmGraph, xi: Sequence, morse: MorseData | None = None) -> tuple[bool, list[tuple[str, str]]]:
    """Check that every ascending GKM edge strictly increases the index."""
    morse = morse or morse_data(g, xi)
    bad = []
    for a, b in g.geometric_edges():
        if morse.psi(a) > morse.psi(b):
            a, b = b, a
        if morse.index(a) >= morse.index(b):
            bad.append((a, b))
    return not bad, bad
