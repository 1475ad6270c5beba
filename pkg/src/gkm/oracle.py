"""Independent checks: a linear solve for canonical classes from the axioms alone,
Billey's restriction formula for flag manifolds, and a triangular solve for
structure constants.

Nothing here uses Theta, the canonical graph, or the path sums.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .exactalg import Polynomial
from .gkmgraph import GkmGraph, NonGenericDirection
from .morse import MorseData, is_generic, morse_data

__all__ = [
    "Infeasible",
    "LinearSystem",
    "UniquenessViolation",
    "billey_restrict",
    "build_system",
    "reduced_word",
    "solve_canonical_linear",
    "structure_constants_triangular",
]


class UniquenessViolation(ArithmeticError):
    def __init__(self, owner: str, free: int):
        self.owner = owner
        self.free = free
        super().__init__(f"solution space for the class at {owner} has dimension {free}; expected a unique solution")


def monomials(nvars: int, degree: int) -> list[tuple[int, ...]]:
    out = []
    for combo in itertools.combinations_with_replacement(range(nvars), degree):
        exp = [0] * nvars
        for i in combo:
            exp[i] += 1
        out.append(tuple(exp))
    return sorted(set(out), reverse=True)


def _reduce_mod(p: Polynomial, eta: Sequence[int]) -> Polynomial:
    # eliminate the last variable that eta involves
    k = max(i for i, c in enumerate(eta) if c)
    image = Polynomial.linear([Fraction(0) if i == k else Fraction(-c, eta[k]) for i, c in enumerate(eta)])
    return p.substitute_variable(k, image)


@dataclass
class LinearSystem:
    """Rows ``sum_j a_j u_j = b`` over Q; unknowns are (vertex, monomial) coefficients."""

    owner: str
    degree: int
    unknowns: list[tuple[str, tuple[int, ...]]]
    rows: list[dict[int, Fraction]] = field(default_factory=list)
    rhs: list[Fraction] = field(default_factory=list)
    labels: list[tuple] = field(default_factory=list)


def build_system(g: GkmGraph, morse: MorseData, p: str) -> tuple[LinearSystem, dict[str, Polynomial]]:
    """Linearize GKM compatibility for a degree-index(p) class pinned at p.

    Returns the system and the fixed values (diagonal and forced zeros).
    """
    n = g.n
    d = morse.index(p)
    basis = monomials(n, d)
    free_vertices = [q for q in g.ids if morse.index(q) > d]
    unknowns = [(q, m) for q in free_vertices for m in basis]
    col = {u: j for j, u in enumerate(unknowns)}
    fixed = {q: Polynomial.zero(n) for q in g.ids if q not in free_vertices}
    fixed[p] = morse.lambda_minus(p)
    system = LinearSystem(p, d, unknowns)
    reduced_cache: dict[tuple, Polynomial] = {}

    def reduced(m, eta):
        key = (m, eta)
        if key not in reduced_cache:
            reduced_cache[key] = _reduce_mod(Polynomial(n, {m: 1}), eta)
        return reduced_cache[key]

    for a, b in g.geometric_edges():
        eta = g.weight(a, b)
        # each target monomial gets a linear combination of unknowns and a constant
        lin: dict[tuple[int, ...], dict[int, Fraction]] = {}
        const: dict[tuple[int, ...], Fraction] = {}
        for vertex, sign in ((b, 1), (a, -1)):
            if vertex in fixed:
                red = _reduce_mod(fixed[vertex], eta)
                for m2, c in red.terms.items():
                    const[m2] = const.get(m2, Fraction(0)) + sign * c
            else:
                for m in basis:
                    j = col[(vertex, m)]
                    for m2, c in reduced(m, eta).terms.items():
                        row = lin.setdefault(m2, {})
                        row[j] = row.get(j, Fraction(0)) + sign * c
        for m2 in sorted(set(lin) | set(const), reverse=True):
            row = {j: c for j, c in lin.get(m2, {}).items() if c}
            b_val = -const.get(m2, Fraction(0))
            if not row and not b_val:
                continue
            system.rows.append(row)
            system.rhs.append(b_val)
            system.labels.append(("edge", a, b, m2))
    return system, fixed


@dataclass
class Infeasible:
    """The axioms cannot hold: ``combination`` sums the rows to ``0 = nonzero``."""

    owner: str
    combination: dict[int, Fraction]
    labels: list[tuple]
    value: Fraction

    @property
    def edges(self) -> list[tuple[str, str]]:
        seen = []
        for i in sorted(self.combination):
            _, a, b, _ = self.labels[i]
            if (a, b) not in seen:
                seen.append((a, b))
        return seen

    def verify(self, system: LinearSystem) -> bool:
        """Re-check on a freshly built system: the combination kills every unknown but not the constant."""
        acc: dict[int, Fraction] = {}
        const = Fraction(0)
        for i, y in self.combination.items():
            for j, c in system.rows[i].items():
                acc[j] = acc.get(j, Fraction(0)) + y * c
            const += y * system.rhs[i]
        return all(v == 0 for v in acc.values()) and const != 0

    def to_dict(self) -> dict:
        return {
            "status": "Infeasible",
            "owner": self.owner,
            "edges": [list(e) for e in self.edges],
            "certificate": [
                {"row": i, "edge": list(self.labels[i][1:3]), "monomial": list(self.labels[i][3]), "multiplier": str(y)}
                for i, y in sorted(self.combination.items())
            ],
            "contradiction": f"0 = {self.value}",
        }


def _solve(system: LinearSystem):
    """Sparse Gauss-Jordan elimination over Q with row provenance."""
    pivots: dict[int, tuple[dict[int, Fraction], Fraction, dict[int, Fraction]]] = {}
    for i, (row0, b0) in enumerate(zip(system.rows, system.rhs)):
        row = dict(row0)
        b = b0
        prov = {i: Fraction(1)}
        for j in [j for j in row if j in pivots]:
            c = row.get(j)
            if not c:
                continue
            prow, pb, pprov = pivots[j]
            for k, v in prow.items():
                nv = row.get(k, Fraction(0)) - c * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
            b -= c * pb
            for k, v in pprov.items():
                nv = prov.get(k, Fraction(0)) - c * v
                if nv:
                    prov[k] = nv
                else:
                    prov.pop(k, None)
        if not row:
            if b:
                return None, (prov, b)
            continue
        j = min(row)
        inv = 1 / row[j]
        row = {k: v * inv for k, v in row.items()}
        b *= inv
        prov = {k: v * inv for k, v in prov.items()}
        # keep earlier pivot rows free of the new pivot column
        for pj, (prow, pb, pprov) in list(pivots.items()):
            c = prow.get(j)
            if not c:
                continue
            for k, v in row.items():
                nv = prow.get(k, Fraction(0)) - c * v
                if nv:
                    prow[k] = nv
                else:
                    prow.pop(k, None)
            pb -= c * b
            for k, v in prov.items():
                nv = pprov.get(k, Fraction(0)) - c * v
                if nv:
                    pprov[k] = nv
                else:
                    pprov.pop(k, None)
            pivots[pj] = (prow, pb, pprov)
        pivots[j] = (row, b, prov)
    return pivots, None


def solve_canonical_linear(g: GkmGraph, xi: Sequence, p: str, morse: MorseData | None = None):
    """Find the canonical class at ``p`` directly from its defining conditions.

    Returns a :class:`~gkm.canonical.ClassTable` or :class:`Infeasible`;
    raises :class:`UniquenessViolation` if the solution is not unique.
    """
    from .canonical import ClassTable

    ok, bad = is_generic(g, xi)
    if not ok:
        raise NonGenericDirection(bad)
    morse = morse or morse_data(g, xi)
    system, fixed = build_system(g, morse, p)
    pivots, conflict = _solve(system)
    if conflict is not None:
        prov, value = conflict
        return Infeasible(p, prov, system.labels, value)
    free = len(system.unknowns) - len(pivots)
    if free:
        raise UniquenessViolation(p, free)
    values = dict(fixed)
    coeffs: dict[str, dict] = {}
    for j, (q, m) in enumerate(system.unknowns):
        row, b, _ = pivots[j]
        if len(row) != 1:
            raise UniquenessViolation(p, len(row) - 1)
        coeffs.setdefault(q, {})[m] = b
    for q, terms in coeffs.items():
        values[q] = Polynomial(g.n, terms)
    return ClassTable(p, morse.index(p), {q: values[q] for q in g.ids})


# ---------------------------------------------------------------------------
# Billey's formula
# ---------------------------------------------------------------------------

def _compose(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    """(a o b)(k) = a(b(k)), one-line notation, 1-based values."""
    return tuple(a[b[k] - 1] for k in range(len(b)))


def _simple(n: int, i: int) -> tuple[int, ...]:
    w = list(range(1, n + 1))
    w[i - 1], w[i] = w[i], w[i - 1]
    return tuple(w)


def length(w: Sequence[int]) -> int:
    return sum(1 for i in range(len(w)) for j in range(i + 1, len(w)) if w[i] > w[j])


def reduced_word(w: Sequence[int]) -> list[int]:
    """Indices a_1..a_k with w = s_{a_1} o ... o s_{a_k}."""
    w = tuple(w)
    n = len(w)
    word: list[int] = []
    while any(w[i] > w[i + 1] for i in range(n - 1)):
        i = next(i for i in range(n - 1) if w[i] > w[i + 1])
        word.insert(0, i + 1)
        w = _compose(w, _simple(n, i + 1))
    return word


def billey_restrict(n: int, sigma: Sequence[int], mu: Sequence[int]) -> Polynomial:
    """Restriction of the Schubert class for ``sigma`` to the fixed point ``mu``.

    Fix a reduced word for mu; sum over subwords that are reduced words for
    sigma the product of the roots s_{a_1}...s_{a_{j-1}}(x_{a_j} - x_{a_j+1})
    at the chosen positions.
    """
    sigma, mu = tuple(sigma), tuple(mu)
    if sorted(sigma) != list(range(1, n + 1)) or sorted(mu) != list(range(1, n + 1)):
        raise ValueError("sigma and mu must be permutations of 1..n")
    word = reduced_word(mu)
    target = length(sigma)
    identity = tuple(range(1, n + 1))
    # roots attached to each position of the word
    roots = []
    prefix = identity
    for a in word:
        form = [0] * n
        form[prefix[a - 1] - 1] += 1
        form[prefix[a] - 1] -= 1
        roots.append(Polynomial.linear(form))
        prefix = _compose(prefix, _simple(n, a))
    total = Polynomial.zero(n)
    for positions in itertools.combinations(range(len(word)), target):
        w = identity
        for k in positions:
            w = _compose(w, _simple(n, word[k]))
        if w != sigma:
            continue
        term = Polynomial.one(n)
        for k in positions:
            term = term * roots[k]
        total = total + term
    return total


# ---------------------------------------------------------------------------
# structure constants by triangular solve
# ---------------------------------------------------------------------------

def structure_constants_triangular(
    morse: MorseData, tables: Mapping[str, Mapping[str, Polynomial]], p: str, q: str
) -> dict[str, Polynomial]:
    """Solve alpha_p alpha_q = sum_r c^r alpha_r vertex by vertex in order of index.

    ``tables[r][s]`` is alpha_r(s).  Uses only that alpha_r(s) = 0 for
    index(s) <= index(r), s != r, and alpha_r(r) = Lambda^-_r.
    """
    g = morse.graph
    out: dict[str, Polynomial] = {}
    for r in morse.ids_by_index():
        rest = tables[p][r] * tables[q][r]
        for r2, c in out.items():
            if c:
                rest = rest - c * tables[r2][r]
        for w in morse[r].down_weights:
            rest = rest.divide_linear(w)
        out[r] = rest
    return {r: out[r] for r in g.ids}
