"""GKM graph data model, validation, stable/unstable sets and (de)serialization."""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .exactalg import format_rational, pairing, parse_rational

__all__ = [
    "GkmGraph",
    "GraphError",
    "NonGenericDirection",
    "Vertex",
    "Violation",
    "ValidationReport",
    "load_graph",
    "dump_graph",
    "validate",
    "stable_set",
    "unstable_set",
    "export_dot",
    "format_weight",
]


class GraphError(ValueError):
    """Schema or consistency problem while building a graph."""


class NonGenericDirection(ValueError):
    def __init__(self, edge, message=None):
        self.edge = edge
        super().__init__(message or f"xi pairs to zero with the weight of edge {edge[0]} -> {edge[1]}")


@dataclass(frozen=True)
class Vertex:
    id: str
    phi: tuple[Fraction, ...]


class GkmGraph:
    """Labelled directed graph; both orientations of every geometric edge are stored.

    ``weight(p, q)`` is eta(p, q), the weight of the isotropy representation on
    the tangent line at ``q`` of the sphere joining ``p`` and ``q``.
    """

    def __init__(self, n: int, vertices: Iterable[Vertex], edges: dict[tuple[str, str], tuple[int, ...]]):
        self.n = n
        self.vertices: tuple[Vertex, ...] = tuple(vertices)
        self._index = {v.id: i for i, v in enumerate(self.vertices)}
        if len(self._index) != len(self.vertices):
            raise GraphError("duplicate vertex ids")
        for v in self.vertices:
            if len(v.phi) != n:
                raise GraphError(f"vertex {v.id} has a moment vector of length {len(v.phi)}, expected {n}")
        self._weights: dict[tuple[str, str], tuple[int, ...]] = {}
        self._adj: dict[str, list[str]] = {v.id: [] for v in self.vertices}
        for (a, b), w in edges.items():
            if a not in self._index or b not in self._index:
                raise GraphError(f"edge {a} -> {b} references an unknown vertex")
            if a == b:
                raise GraphError(f"self loop at {a}")
            if len(w) != n:
                raise GraphError(f"weight on {a} -> {b} has length {len(w)}, expected {n}")
            if not any(w):
                raise GraphError(f"zero weight on {a} -> {b}")
            self._weights[(a, b)] = tuple(int(c) for c in w)
        for a, b in sorted(self._weights, key=lambda e: (self._index[e[0]], self._index[e[1]])):
            self._adj[a].append(b)

    @classmethod
    def from_geometric_edges(cls, n: int, vertices: Iterable[Vertex], edges: Iterable[tuple[str, str, Sequence[int]]]):
        """Build from one orientation per geometric edge; reverses get negated weights."""
        directed: dict[tuple[str, str], tuple[int, ...]] = {}
        for a, b, w in edges:
            w = tuple(int(c) for c in w)
            for key, val in (((a, b), w), ((b, a), tuple(-c for c in w))):
                if key in directed and directed[key] != val:
                    raise GraphError(f"conflicting weights for edge {key[0]} -> {key[1]}")
                directed[key] = val
        return cls(n, vertices, directed)

    # accessors ------------------------------------------------------------
    @property
    def ids(self) -> list[str]:
        return [v.id for v in self.vertices]

    def index(self, vid: str) -> int:
        try:
            return self._index[vid]
        except KeyError:
            raise KeyError(f"unknown vertex {vid!r}") from None

    def phi(self, vid: str) -> tuple[Fraction, ...]:
        return self.vertices[self.index(vid)].phi

    def has_edge(self, a: str, b: str) -> bool:
        return (a, b) in self._weights

    def weight(self, a: str, b: str) -> tuple[int, ...]:
        return self._weights[(a, b)]

    def neighbors(self, vid: str) -> list[str]:
        return list(self._adj[vid])

    def directed_edges(self) -> list[tuple[str, str]]:
        return [(a, b) for a in self.ids for b in self._adj[a]]

    def geometric_edges(self) -> list[tuple[str, str]]:
        """One orientation per geometric edge, the one with the lower vertex index first."""
        seen = set()
        out = []
        for a, b in self.directed_edges():
            key = frozenset((a, b))
            if key not in seen:
                seen.add(key)
                out.append((a, b) if self.index(a) < self.index(b) else (b, a))
        return out

    def valence(self, vid: str) -> int:
        return len(self._adj[vid])

    def psi(self, vid: str, xi: Sequence) -> Fraction:
        return pairing(self.phi(vid), xi)

    def __eq__(self, other):
        if not isinstance(other, GkmGraph):
            return NotImplemented
        return self.n == other.n and self.vertices == other.vertices and self._weights == other._weights

    def __repr__(self):
        return f"GkmGraph(n={self.n}, vertices={len(self.vertices)}, edges={len(self.geometric_edges())})"

    def require_generic(self, xi: Sequence) -> None:
        for a, b in self.directed_edges():
            if not pairing(self.weight(a, b), xi):
                raise NonGenericDirection((a, b))

    def reversed(self) -> "GkmGraph":
        """Reverse every edge and negate its weight (the orientation involution)."""
        return GkmGraph(self.n, self.vertices, {(b, a): tuple(-c for c in w) for (a, b), w in self._weights.items()})


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str
    vertices: tuple[str, ...] = ()


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> list[str]:
        return [v.kind for v in self.violations]

    def to_dict(self) -> dict:
        return {
            "valid": self.ok,
            "violations": [{"kind": v.kind, "detail": v.detail, "vertices": list(v.vertices)} for v in self.violations],
        }


def _positive_multiple(diff: Sequence[Fraction], w: Sequence[int]):
    """Return c > 0 with diff == c * w, or None."""
    k = next(i for i, c in enumerate(w) if c)
    c = Fraction(diff[k]) / w[k]
    if c <= 0:
        return None
    if any(Fraction(d) != c * wi for d, wi in zip(diff, w)):
        return None
    return c


def _parallel(u: Sequence[int], v: Sequence[int]) -> bool:
    n = len(u)
    return all(u[i] * v[j] == u[j] * v[i] for i in range(n) for j in range(i + 1, n))


def validate(g: GkmGraph) -> ValidationReport:
    report = ValidationReport()
    add = report.violations.append
    for a, b in g.directed_edges():
        if not g.has_edge(b, a):
            add(Violation("missing_reverse", f"edge {a} -> {b} has no reverse", (a, b)))
        elif g.weight(b, a) != tuple(-c for c in g.weight(a, b)):
            if g.index(a) < g.index(b):
                add(Violation("reverse_weight", f"eta({b},{a}) is not -eta({a},{b})", (a, b)))
    for a, b in g.geometric_edges():
        bad = []
        for s, t in ((a, b), (b, a)):
            if not g.has_edge(s, t):
                continue
            diff = [q - p for p, q in zip(g.phi(s), g.phi(t))]
            if _positive_multiple(diff, g.weight(s, t)) is None:
                bad.append((s, t))
        if bad:
            s, t = bad[0]
            add(Violation(
                "not_positive_multiple",
                f"Phi({t}) - Phi({s}) is not a positive multiple of eta({s},{t}) = {format_weight(g.weight(s, t))}",
                (s, t),
            ))
    for v in g.ids:
        incident = [g.weight(r, v) for r in g.neighbors(v) if g.has_edge(r, v)]
        nbrs = [r for r in g.neighbors(v) if g.has_edge(r, v)]
        for i in range(len(incident)):
            for j in range(i + 1, len(incident)):
                if _parallel(incident[i], incident[j]):
                    add(Violation(
                        "dependent_weights",
                        f"weights {format_weight(incident[i])} and {format_weight(incident[j])} at {v} are parallel",
                        (v, nbrs[i], nbrs[j]),
                    ))
    valences = {g.valence(v) for v in g.ids}
    if len(valences) > 1:
        counts = {v: g.valence(v) for v in g.ids}
        common = max(sorted(valences), key=lambda d: sum(1 for c in counts.values() if c == d))
        for v, d in counts.items():
            if d != common:
                add(Violation("irregular_valence", f"vertex {v} has valence {d}, most vertices have {common}", (v,)))
    return report


# ---------------------------------------------------------------------------
# stable / unstable sets
# ---------------------------------------------------------------------------

def _reach(g: GkmGraph, xi: Sequence, p: str, ascending: bool) -> set[str]:
    g.require_generic(xi)
    g.index(p)
    return reach_by_psi(g, {v: g.psi(v, xi) for v in g.ids}, p, ascending)


def reach_by_psi(g: GkmGraph, psi: dict, p: str, ascending: bool) -> set[str]:
    """Breadth-first search along edges where ``psi`` does not decrease (or increase)."""
    seen = {p}
    queue = deque([p])
    while queue:
        a = queue.popleft()
        for b in g.neighbors(a):
            ok = psi[b] >= psi[a] if ascending else psi[b] <= psi[a]
            if ok and b not in seen:
                seen.add(b)
                queue.append(b)
    return seen


def stable_set(g: GkmGraph, xi: Sequence, p: str) -> set[str]:
    """Vertices reachable from ``p`` along ascending GKM paths (includes ``p``)."""
    return _reach(g, xi, p, ascending=True)


def unstable_set(g: GkmGraph, xi: Sequence, p: str) -> set[str]:
    """Vertices reachable from ``p`` along descending GKM paths (includes ``p``)."""
    return _reach(g, xi, p, ascending=False)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def format_weight(w: Sequence) -> str:
    from .exactalg import Polynomial

    return str(Polynomial.linear(w))


def graph_to_dict(g: GkmGraph) -> dict:
    return {
        "dim_t": g.n,
        "vertices": [{"id": v.id, "phi": [format_rational(c) for c in v.phi]} for v in g.vertices],
        "edges": [{"from": a, "to": b, "weight": list(g.weight(a, b))} for a, b in g.geometric_edges()],
    }


def dump_graph(g: GkmGraph, **extra) -> str:
    doc = graph_to_dict(g)
    doc.update(extra)
    return json.dumps(doc, indent=2)


def graph_from_dict(doc) -> GkmGraph:
    if not isinstance(doc, dict):
        raise GraphError("graph document must be a JSON object")
    for key in ("dim_t", "vertices", "edges"):
        if key not in doc:
            raise GraphError(f"missing key {key!r}")
    n = doc["dim_t"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise GraphError("dim_t must be a positive integer")
    if not isinstance(doc["vertices"], list) or not isinstance(doc["edges"], list):
        raise GraphError("vertices and edges must be lists")
    vertices = []
    for entry in doc["vertices"]:
        if not isinstance(entry, dict) or not isinstance(entry.get("id"), str) or not isinstance(entry.get("phi"), list):
            raise GraphError(f"malformed vertex entry {entry!r}")
        try:
            phi = tuple(parse_rational(c) for c in entry["phi"])
        except (ValueError, ZeroDivisionError) as exc:
            raise GraphError(f"bad rational in vertex {entry['id']}: {exc}") from None
        vertices.append(Vertex(entry["id"], phi))
    edges = []
    for entry in doc["edges"]:
        if not isinstance(entry, dict) or not {"from", "to", "weight"} <= set(entry):
            raise GraphError(f"malformed edge entry {entry!r}")
        w = entry["weight"]
        if not isinstance(w, list) or not all(isinstance(c, int) and not isinstance(c, bool) for c in w):
            raise GraphError(f"weight of edge {entry['from']} -> {entry['to']} must be a list of integers")
        edges.append((entry["from"], entry["to"], w))
    return GkmGraph.from_geometric_edges(n, vertices, edges)


def load_graph(document, strict: bool = True) -> GkmGraph:
    """Load a graph from JSON text, bytes, or an already-parsed mapping.

    With ``strict`` the valence must be constant; pass ``strict=False`` to
    inspect partially built graphs and let :func:`validate` report it.
    """
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise GraphError(f"invalid JSON: {exc}") from None
    g = graph_from_dict(document)
    if strict and len({g.valence(v) for v in g.ids}) > 1:
        detail = ", ".join(f"{v}:{g.valence(v)}" for v in g.ids)
        raise GraphError(f"valence is not constant ({detail})")
    return g


def export_dot(g: GkmGraph, xi: Sequence | None = None) -> str:
    lines = ["graph GKM {" if xi is None else "digraph GKM {"]
    if xi is not None:
        g.require_generic(xi)
        lines.append("  rankdir=BT;")
        psi = {v: g.psi(v, xi) for v in g.ids}
        levels: dict[Fraction, list[str]] = {}
        for v in g.ids:
            levels.setdefault(psi[v], []).append(v)
        for value in sorted(levels):
            members = " ".join(f'"{v}";' for v in levels[value])
            lines.append(f"  {{ rank=same; {members} }}")
    for v in g.vertices:
        lines.append(f'  "{v.id}" [label="{v.id}"];')
    arrow = "--" if xi is None else "->"
    for a, b in g.geometric_edges():
        if xi is not None and psi[a] > psi[b]:
            a, b = b, a
        lines.append(f'  "{a}" {arrow} "{b}" [label="{format_weight(g.weight(a, b))}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
