"""Built-in GKM graphs for the standard worked examples."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .exactalg import Polynomial
from .gkmgraph import GkmGraph, Vertex, validate
from .morse import morse_data

__all__ = [
    "SpaceSpec",
    "gen_cpn",
    "gen_flag",
    "gen_cp1xcp1_twisted",
    "gen_blowup_cp2",
    "make_space",
    "builtin_spaces",
    "flag_id",
    "product_space",
    "random_space",
    "random_spaces",
]


@dataclass
class SpaceSpec:
    kind: str
    size: int | None
    graph: GkmGraph
    xi: tuple[Fraction, ...]
    # named fixture classes: name -> {vertex id -> Polynomial}
    fixtures: dict[str, dict[str, Polynomial]] = field(default_factory=dict)
    notes: str = ""

    @property
    def label(self) -> str:
        return self.kind if self.size is None else f"{self.kind}:{self.size}"


def gen_cpn(n: int) -> SpaceSpec:
    """CP^n with the standard torus of dimension n+1 (coordinates x1..x_{n+1})."""
    if n < 1:
        raise ValueError("n must be at least 1")
    dim = n + 1
    avg = Fraction(1, dim)
    vertices = []
    for i in range(dim):
        phi = [avg] * dim
        phi[i] -= 1
        vertices.append(Vertex(f"p{i + 1}", tuple(phi)))
    edges = []
    for i, j in itertools.combinations(range(dim), 2):
        w = [0] * dim
        w[i], w[j] = 1, -1
        edges.append((f"p{i + 1}", f"p{j + 1}", w))
    g = GkmGraph.from_geometric_edges(dim, vertices, edges)
    xi = tuple(Fraction(-k) for k in range(dim))
    return SpaceSpec("cpn", n, g, xi)


def flag_id(perm) -> str:
    if len(perm) < 10:
        return "".join(str(k) for k in perm)
    return ",".join(str(k) for k in perm)


def gen_flag(n: int) -> SpaceSpec:
    """Complete flags in C^n: vertices are permutations in one-line notation.

    ``Phi(sigma) = sum_k k * x_{sigma(k)}``; with the decreasing default
    direction the identity is the minimum and the index equals the length.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    perms = list(itertools.permutations(range(1, n + 1)))
    vertices = []
    for perm in perms:
        phi = [Fraction(0)] * n
        for k, value in enumerate(perm, start=1):
            phi[value - 1] = Fraction(k)
        vertices.append(Vertex(flag_id(perm), tuple(phi)))
    edges = []
    seen = set()
    for perm in perms:
        pos = {value: k for k, value in enumerate(perm)}
        for i, j in itertools.combinations(range(1, n + 1), 2):
            other = tuple(j if v == i else i if v == j else v for v in perm)
            key = frozenset((perm, other))
            if key in seen:
                continue
            seen.add(key)
            w = [0] * n
            w[i - 1], w[j - 1] = 1, -1
            if pos[i] > pos[j]:
                w = [-c for c in w]
            edges.append((flag_id(perm), flag_id(other), w))
    g = GkmGraph.from_geometric_edges(n, vertices, edges)
    xi = tuple(Fraction(-k) for k in range(n))
    return SpaceSpec("flag", n, g, xi)


def gen_cp1xcp1_twisted() -> SpaceSpec:
    """CP^1 x CP^1 with the squared action; all weights are 2x1 or 2x2."""
    verts = {"SS": (0, 0), "SN": (0, 2), "NS": (2, 0), "NN": (2, 2)}
    vertices = [Vertex(k, tuple(Fraction(c) for c in v)) for k, v in verts.items()]
    edges = [
        ("SS", "NS", (2, 0)),
        ("SN", "NN", (2, 0)),
        ("SS", "SN", (0, 2)),
        ("NS", "NN", (0, 2)),
    ]
    g = GkmGraph.from_geometric_edges(2, vertices, edges)
    x1x2 = Polynomial.parse("2*x1*x2", 2)
    zero = Polynomial.zero(2)
    beta = {"SS": x1x2, "SN": zero, "NS": zero, "NN": x1x2}
    return SpaceSpec("cp1xcp1_twisted", None, g, (Fraction(1), Fraction(1)), {"beta": beta})


def _primitive(v) -> tuple[int, ...]:
    den = 1
    for c in v:
        den = den * Fraction(c).denominator // gcd(den, Fraction(c).denominator)
    ints = [int(Fraction(c) * den) for c in v]
    g = 0
    for c in ints:
        g = gcd(g, abs(c))
    return tuple(c // g for c in ints)


BLOWUP_GAMMA = {
    "gamma1": {"p1": "1", "p2": "1", "p3": "1", "p4": "1"},
    "gamma2": {"p1": "0", "p2": "x1", "p3": "x1", "p4": "x1 - x2"},
    "gamma3": {"p1": "0", "p2": "0", "p3": "x1 - x2", "p4": "x1 - x2"},
    "gamma4": {"p1": "0", "p2": "0", "p3": "0", "p4": "-x1*x2 + x2^2"},
}


def gen_blowup_cp2(depth: Fraction = Fraction(1, 2)) -> SpaceSpec:
    """CP^2 blown up at [0:0:1] for the action [t1 z1 : t2 z2 : z3].

    The moment polygon is the unit triangle with the corner at the origin cut
    at ``depth``.  Edge directions give the weights; the overall sign of the
    moment map is the one for which the graph validates and Lambda^-(p2)
    equals the printed value gamma2(p2) = x1.
    """
    corners = [(depth, Fraction(0)), (Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)), (Fraction(0), depth)]
    xi = (Fraction(1), Fraction(-1))
    gamma = {name: {v: Polynomial.parse(t, 2) for v, t in table.items()} for name, table in BLOWUP_GAMMA.items()}
    for sign in (1, -1):
        points = [tuple(sign * c for c in pt) for pt in corners]
        order = sorted(range(4), key=lambda k: points[k][0] * xi[0] + points[k][1] * xi[1])
        label = {k: f"p{rank + 1}" for rank, k in enumerate(order)}
        vertices = sorted((Vertex(label[k], points[k]) for k in range(4)), key=lambda v: v.id)
        edges = []
        for k in range(4):
            a, b = k, (k + 1) % 4
            diff = [q - p for p, q in zip(points[a], points[b])]
            edges.append((label[a], label[b], _primitive(diff)))
        g = GkmGraph.from_geometric_edges(2, vertices, edges)
        if not validate(g).ok:
            continue
        m = morse_data(g, xi)
        if m.lambda_minus("p2") == gamma["gamma2"]["p2"]:
            notes = (
                f"moment map sign {sign:+d}: Phi is {sign:+d} times the corners of the unit triangle "
                f"cut at depth {depth}, weights are the primitive edge directions; the opposite sign "
                "also validates but gives Lambda^-(p2) != x1 = gamma2(p2)"
            )
            return SpaceSpec("blowup_cp2", None, g, xi, gamma, notes)
    raise RuntimeError("no sign convention reproduces the printed gamma table")


_GENERATORS = {
    "cpn": gen_cpn,
    "flag": gen_flag,
    "cp1xcp1_twisted": gen_cp1xcp1_twisted,
    "blowup_cp2": gen_blowup_cp2,
}


def make_space(text: str) -> SpaceSpec:
    """Parse ``kind[:n]`` (e.g. ``cpn:3``, ``flag:4``, ``blowup_cp2``)."""
    kind, _, size = text.partition(":")
    if kind not in _GENERATORS:
        raise ValueError(f"unknown space {kind!r}; choose from {', '.join(_GENERATORS)}")
    if kind in ("cpn", "flag"):
        if not size:
            raise ValueError(f"space {kind} needs a size, e.g. {kind}:3")
        return _GENERATORS[kind](int(size))
    if size:
        raise ValueError(f"space {kind} takes no size")
    return _GENERATORS[kind]()


def builtin_spaces(max_cpn: int = 4, max_flag: int = 3) -> list[SpaceSpec]:
    out = [gen_cpn(n) for n in range(1, max_cpn + 1)]
    out += [gen_flag(n) for n in range(2, max_flag + 1)]
    out += [gen_cp1xcp1_twisted(), gen_blowup_cp2()]
    return out


# ---------------------------------------------------------------------------
# products and randomized variants (test corpus)
# ---------------------------------------------------------------------------

def product_space(a: SpaceSpec, b: SpaceSpec) -> SpaceSpec:
    """Cartesian product; the torus is the product torus, coordinates of ``a`` first."""
    ga, gb = a.graph, b.graph
    n = ga.n + gb.n
    vertices = [Vertex(f"{u}.{v}", ga.phi(u) + gb.phi(v)) for u in ga.ids for v in gb.ids]
    edges = []
    for u, u2 in ga.geometric_edges():
        w = tuple(ga.weight(u, u2)) + (0,) * gb.n
        edges += [(f"{u}.{v}", f"{u2}.{v}", w) for v in gb.ids]
    for v, v2 in gb.geometric_edges():
        w = (0,) * ga.n + tuple(gb.weight(v, v2))
        edges += [(f"{u}.{v}", f"{u}.{v2}", w) for u in ga.ids]
    g = GkmGraph.from_geometric_edges(n, vertices, edges)
    return SpaceSpec(f"{a.label}x{b.label}", None, g, a.xi + b.xi)


def _unimodular(n: int, rng) -> list[list[int]]:
    """Random integer matrix of determinant +-1 with small entries."""
    m = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(2 * n):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i == j:
            break
        c = rng.choice((-1, 1))
        m[i] = [x + c * y for x, y in zip(m[i], m[j])]
    perm = list(range(n))
    rng.shuffle(perm)
    return [[rng.choice((-1, 1)) * v for v in m[k]] for k in perm]


def _mat_vec(m, v):
    return tuple(sum(Fraction(a) * b for a, b in zip(row, v)) for row in m)


def _inverse_transpose(m):
    """Exact inverse transpose by Gauss-Jordan over Q."""
    n = len(m)
    aug = [[Fraction(m[j][i]) for j in range(n)] + [Fraction(int(i == k)) for k in range(n)] for i in range(n)]
    for c in range(n):
        piv = next(r for r in range(c, n) if aug[r][c])
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = 1 / aug[c][c]
        aug[c] = [x * inv for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c]:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return [row[n:] for row in aug]


_RANDOM_BASES = ("cpn:1", "cpn:2", "cpn:3", "flag:2", "flag:3", "cp1xcp1_twisted")
_PRODUCT_FACTORS = ("cpn:1", "cpn:2", "flag:2", "cp1xcp1_twisted")


def random_space(rng, max_tries: int = 200) -> SpaceSpec:
    """A valid, index-increasing graph built from a random base by random symmetries.

    The base is a built-in space or a product of two small ones. It is moved by
    a unimodular change of coordinates, a positive rescaling and translation
    of the moment map, and a relabeling of the vertices. Then a random
    generic direction is drawn that keeps the index-increasing property.
    """
    from .morse import is_generic, is_index_increasing

    if rng.random() < 0.3:
        base = product_space(make_space(rng.choice(_PRODUCT_FACTORS)), make_space(rng.choice(_PRODUCT_FACTORS)))
    else:
        base = make_space(rng.choice(_RANDOM_BASES))
    g0 = base.graph
    n = g0.n
    u = _unimodular(n, rng)
    scale = Fraction(rng.randint(1, 5), rng.randint(1, 3))
    shift = tuple(Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(n))
    names = [f"v{k}" for k in range(len(g0.ids))]
    rng.shuffle(names)
    rename = dict(zip(g0.ids, names))
    vertices = [Vertex(rename[v], tuple(scale * c + s for c, s in zip(_mat_vec(u, g0.phi(v)), shift))) for v in g0.ids]
    rng.shuffle(vertices)
    edges = [(rename[a], rename[b], tuple(int(c) for c in _mat_vec(u, g0.weight(a, b)))) for a, b in g0.geometric_edges()]
    g = GkmGraph.from_geometric_edges(n, vertices, edges)
    # default direction transported by the inverse transpose keeps every pairing
    inv_t = _inverse_transpose(u)
    xi = _mat_vec(inv_t, base.xi)
    for _ in range(max_tries):
        cand = tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 3)) for _ in range(n))
        if any(cand) and is_generic(g, cand)[0] and is_index_increasing(g, cand)[0]:
            xi = cand
            break
    return SpaceSpec("random", None, g, xi, notes=f"from {base.label}")


def random_spaces(count: int, seed: int = 0) -> list[SpaceSpec]:
    import random

    rng = random.Random(seed)
    return [random_space(rng) for _ in range(count)]
