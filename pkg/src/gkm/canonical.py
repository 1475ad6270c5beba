"""Canonical classes on index-increasing GKM graphs.

Pipeline: Morse data -> Theta on every index-one ascending edge (two
independent algorithms, compared) -> one-step restrictions -> path sums for
every pair of fixed points.  Dual classes, localization integrals, structure
constants and the axiom checks live here too.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .exactalg import (
    NotDivisible,
    NotPolynomial,
    Polynomial,
    RationalFunction,
    pairing,
    rho_project,
)
from .gkmgraph import GkmGraph, NonGenericDirection, reach_by_psi, validate
from .morse import IndexNotIncreasing, MorseData, is_generic, is_index_increasing, morse_data

__all__ = [
    "CanonicalGraph",
    "CanonicalResult",
    "ClassTable",
    "NonIntegerTheta",
    "ThetaMismatch",
    "InvalidGraph",
    "RestrictionEngine",
    "abbv_integrate",
    "canonical_table",
    "dual_restrict",
    "dual_tables",
    "enumerate_paths",
    "one_step_restrictions",
    "positivity_report",
    "restrict",
    "robust_divisibility_report",
    "structure_constants",
    "theta_modular",
    "theta_projection",
    "theta_table",
    "verify_canonical",
]


class NonIntegerTheta(ArithmeticError):
    def __init__(self, edge, message):
        self.edge = edge
        super().__init__(f"Theta{edge}: {message}")


class ThetaMismatch(ArithmeticError):
    pass


class InvalidGraph(ValueError):
    def __init__(self, report):
        self.report = report
        super().__init__("graph fails validation: " + "; ".join(v.detail for v in report.violations))


# ---------------------------------------------------------------------------
# Theta
# ---------------------------------------------------------------------------

def _theta_inputs(g: GkmGraph, morse: MorseData, r: str, r2: str):
    if not g.has_edge(r, r2):
        raise ValueError(f"({r},{r2}) is not a GKM edge")
    if morse.index(r2) != morse.index(r) + 1 or morse.psi(r) >= morse.psi(r2):
        raise ValueError(f"({r},{r2}) is not an ascending edge raising the index by one")
    eta = g.weight(r, r2)
    try:
        lower = morse.lambda_minus(r2).divide_linear(eta)
    except NotDivisible:
        raise NonIntegerTheta((r, r2), "eta does not divide Lambda^- at the head") from None
    return eta, morse.lambda_minus(r), lower


def _integer_ratio(edge, top: Polynomial, bottom: Polynomial) -> int:
    if bottom.is_zero():
        raise NonIntegerTheta(edge, "denominator projects to zero (weights not pairwise independent)")
    ratio = top.scalar_ratio(bottom)
    if ratio is None:
        raise NonIntegerTheta(edge, f"quotient ({top})/({bottom}) is not a constant")
    if ratio.denominator != 1:
        raise NonIntegerTheta(edge, f"quotient {ratio} is not an integer")
    if ratio == 0:
        raise NonIntegerTheta(edge, "quotient is zero")
    return int(ratio)


def theta_projection(g: GkmGraph, morse: MorseData, r: str, r2: str) -> int:
    """Theta as rho(Lambda^-_r) / rho(Lambda^-_{r2} / eta) with rho the projection along eta."""
    eta, top, bottom = _theta_inputs(g, morse, r, r2)
    xi = morse.xi
    return _integer_ratio((r, r2), rho_project(top, eta, xi), rho_project(bottom, eta, xi))


def reduce_mod_linear(p: Polynomial, eta: Sequence) -> Polynomial:
    """Image of ``p`` in S/(eta), eliminating the last variable eta involves."""
    k = max(i for i, c in enumerate(eta) if c)
    image = Polynomial.linear([Fraction(0) if i == k else Fraction(-c, eta[k]) for i, c in enumerate(eta)])
    return p.substitute_variable(k, image)


def theta_modular(g: GkmGraph, morse: MorseData, r: str, r2: str) -> int:
    """Theta as the unique integer with (Lambda^-_{r2}/eta) * Theta = Lambda^-_r mod eta."""
    eta, top, bottom = _theta_inputs(g, morse, r, r2)
    return _integer_ratio((r, r2), reduce_mod_linear(top, eta), reduce_mod_linear(bottom, eta))


def index_one_edges(g: GkmGraph, morse: MorseData) -> list[tuple[str, str]]:
    return [
        (a, b)
        for a, b in g.directed_edges()
        if morse.index(b) == morse.index(a) + 1 and morse.psi(a) < morse.psi(b)
    ]


def theta_table(g: GkmGraph, morse: MorseData, method: str = "both") -> dict[tuple[str, str], int]:
    """Theta on every ascending index-one edge.  ``method='both'`` cross-checks."""
    out = {}
    for a, b in index_one_edges(g, morse):
        if method == "projection":
            out[(a, b)] = theta_projection(g, morse, a, b)
        elif method == "modular":
            out[(a, b)] = theta_modular(g, morse, a, b)
        elif method == "both":
            t1 = theta_projection(g, morse, a, b)
            t2 = theta_modular(g, morse, a, b)
            if t1 != t2:
                raise ThetaMismatch(f"Theta({a},{b}): projection gives {t1}, modular gives {t2}")
            out[(a, b)] = t1
        else:
            raise ValueError(f"unknown Theta method {method!r}")
    return out


# ---------------------------------------------------------------------------
# canonical graph and path sums
# ---------------------------------------------------------------------------

@dataclass
class CanonicalGraph:
    """Edges (r, r') with index(r') = index(r) + 1 and nonzero one-step value alpha_r(r')."""

    ids: list[str]
    values: dict[tuple[str, str], Polynomial]
    thetas: dict[tuple[str, str], int] = field(default_factory=dict)
    xi: tuple[Fraction, ...] | None = None

    def successors(self, r: str) -> list[str]:
        return sorted(b for a, b in self.values if a == r)

    def predecessors(self, r: str) -> list[str]:
        return sorted(a for a, b in self.values if b == r)

    @property
    def edges(self) -> list[tuple[str, str]]:
        order = {v: i for i, v in enumerate(self.ids)}
        return sorted(self.values, key=lambda e: (order[e[0]], order[e[1]]))


def one_step_restrictions(g: GkmGraph, morse: MorseData, thetas: Mapping[tuple[str, str], int]) -> CanonicalGraph:
    ok, bad = is_index_increasing(g, morse.xi, morse)
    if not ok:
        raise IndexNotIncreasing(bad)
    values = {}
    for (a, b), theta in thetas.items():
        value = morse.lambda_minus(b).divide_linear(g.weight(a, b)).scale(theta)
        if value:
            values[(a, b)] = value
    return CanonicalGraph(list(g.ids), values, dict(thetas), morse.xi)


def enumerate_paths(cg: CanonicalGraph, p: str, q: str) -> list[tuple[str, ...]]:
    """All paths from p to q in the canonical graph, in lexicographic order of ids."""
    succ = {v: cg.successors(v) for v in cg.ids}
    out: list[tuple[str, ...]] = []

    def walk(path):
        last = path[-1]
        if last == q:
            out.append(tuple(path))
            return
        for nxt in succ[last]:
            path.append(nxt)
            walk(path)
            path.pop()

    walk([p])
    return out


def _diff(a: Sequence, b: Sequence) -> tuple[Fraction, ...]:
    return tuple(Fraction(x) - Fraction(y) for x, y in zip(a, b))


class RestrictionEngine:
    """Evaluates the path sums for alpha_p(q) and the dual classes beta_q(p).

    The sum over paths is organised as a dynamic program over the canonical
    graph, one column (fixed q for alpha, fixed p for beta) at a time; the
    brute-force ``*_by_paths`` methods evaluate the same sum path by path.
    """

    def __init__(self, g: GkmGraph, morse: MorseData, cg: CanonicalGraph):
        self.g = g
        self.morse = morse
        self.cg = cg
        self.n = g.n
        self._alpha_cols: dict[str, dict[str, Polynomial]] = {}
        self._beta_rows: dict[str, dict[str, Polynomial]] = {}
        self._pred = {v: cg.predecessors(v) for v in cg.ids}
        self._succ = {v: cg.successors(v) for v in cg.ids}

    def _phi_diff(self, a: str, b: str) -> tuple[Fraction, ...]:
        """Phi(a) - Phi(b)."""
        return _diff(self.g.phi(a), self.g.phi(b))

    def _step(self, r: str, s: str) -> RationalFunction:
        """(Phi(s) - Phi(r)) * alpha_r(s) / Lambda^-_s, without the path-dependent denominator."""
        num = Polynomial.linear(self._phi_diff(s, r)) * self.cg.values[(r, s)]
        return RationalFunction(num, self.morse[s].down_weights)

    def _nonzero_form(self, form, where: str):
        if not any(form):
            raise ZeroDivisionError(f"Phi difference vanishes along a path ({where})")
        return form

    # alpha -----------------------------------------------------------------
    def alpha_column(self, q: str) -> dict[str, Polynomial]:
        """alpha_p(q) for every p."""
        if q in self._alpha_cols:
            return self._alpha_cols[q]
        reach = {q}
        stack = [q]
        while stack:
            v = stack.pop()
            for u in self._pred[v]:
                if u not in reach:
                    reach.add(u)
                    stack.append(u)
        order = sorted(reach, key=lambda v: -self.morse.index(v))
        acc: dict[str, RationalFunction] = {q: RationalFunction.from_polynomial(Polynomial.one(self.n))}
        for r in order:
            if r == q:
                continue
            total = RationalFunction.from_polynomial(Polynomial.zero(self.n))
            denom = self._nonzero_form(self._phi_diff(q, r), f"{r} -> {q}")
            for s in self._succ[r]:
                if s in acc:
                    total = total + (self._step(r, s) * acc[s])
            acc[r] = total.divide_by_linear(denom)
        lam = self.morse.lambda_minus(q)
        col = {}
        for p in self.g.ids:
            if p in acc:
                try:
                    col[p] = (acc[p] * lam).to_polynomial()
                except NotPolynomial:
                    raise NotPolynomial(f"alpha_{p}({q}) is not a polynomial: {acc[p] * lam}") from None
            else:
                col[p] = Polynomial.zero(self.n)
        self._alpha_cols[q] = col
        return col

    def restrict(self, p: str, q: str) -> Polynomial:
        return self.alpha_column(q)[p]

    def restrict_by_paths(self, p: str, q: str) -> Polynomial:
        total = RationalFunction.from_polynomial(Polynomial.zero(self.n))
        for path in enumerate_paths(self.cg, p, q):
            term = RationalFunction.from_polynomial(Polynomial.one(self.n))
            for a, b in zip(path, path[1:]):
                term = term * self._step(a, b)
                term = term.divide_by_linear(self._nonzero_form(self._phi_diff(q, a), f"{a} -> {q}"))
            total = total + term
        return (total * self.morse.lambda_minus(q)).to_polynomial()

    # beta ------------------------------------------------------------------
    def beta_row(self, p: str) -> dict[str, Polynomial]:
        """beta_q(p) for every q."""
        if p in self._beta_rows:
            return self._beta_rows[p]
        reach = {p}
        stack = [p]
        while stack:
            v = stack.pop()
            for u in self._succ[v]:
                if u not in reach:
                    reach.add(u)
                    stack.append(u)
        order = sorted(reach, key=lambda v: self.morse.index(v))
        acc: dict[str, RationalFunction] = {p: RationalFunction.from_polynomial(Polynomial.one(self.n))}
        for s in order:
            if s == p:
                continue
            total = RationalFunction.from_polynomial(Polynomial.zero(self.n))
            for r in self._pred[s]:
                if r in acc:
                    total = total + acc[r] * self._step(r, s)
            denom = self._nonzero_form(self._phi_diff(p, s), f"{p} -> {s}")
            acc[s] = total.divide_by_linear(denom)
        lam = self.morse.lambda_plus(p)
        row = {}
        for q in self.g.ids:
            if q in acc:
                try:
                    row[q] = (acc[q] * lam).to_polynomial()
                except NotPolynomial:
                    raise NotPolynomial(f"beta_{q}({p}) is not a polynomial: {acc[q] * lam}") from None
            else:
                row[q] = Polynomial.zero(self.n)
        self._beta_rows[p] = row
        return row

    def dual_restrict(self, q: str, p: str) -> Polynomial:
        """beta_q(p)."""
        return self.beta_row(p)[q]

    def dual_by_paths(self, q: str, p: str) -> Polynomial:
        total = RationalFunction.from_polynomial(Polynomial.zero(self.n))
        for path in enumerate_paths(self.cg, p, q):
            term = RationalFunction.from_polynomial(Polynomial.one(self.n))
            for a, b in zip(path, path[1:]):
                term = term * self._step(a, b)
                term = term.divide_by_linear(self._nonzero_form(self._phi_diff(p, b), f"{p} -> {b}"))
            total = total + term
        return (total * self.morse.lambda_plus(p)).to_polynomial()


def restrict(g: GkmGraph, morse: MorseData, cg: CanonicalGraph, p: str, q: str) -> Polynomial:
    """alpha_p(q) by the path sum; for many pairs reuse one :class:`RestrictionEngine`."""
    return RestrictionEngine(g, morse, cg).restrict(p, q)


def dual_restrict(g: GkmGraph, morse: MorseData, cg: CanonicalGraph, q: str, p: str) -> Polynomial:
    """beta_q(p) by the dual path sum."""
    return RestrictionEngine(g, morse, cg).dual_restrict(q, p)


# ---------------------------------------------------------------------------
# class tables
# ---------------------------------------------------------------------------

@dataclass
class ClassTable:
    owner: str
    degree: int
    values: dict[str, Polynomial]

    def __getitem__(self, vid: str) -> Polynomial:
        return self.values[vid]

    def to_dict(self) -> dict:
        return {"owner": self.owner, "degree": self.degree, "values": {k: str(v) for k, v in self.values.items()}}

    @classmethod
    def from_dict(cls, doc: Mapping, nvars: int) -> "ClassTable":
        values = {k: Polynomial.parse(v, nvars) for k, v in doc["values"].items()}
        return cls(doc.get("owner", ""), int(doc.get("degree", 0)), values)


@dataclass
class CanonicalResult:
    graph: GkmGraph
    morse: MorseData
    thetas: dict[tuple[str, str], int]
    cg: CanonicalGraph
    engine: RestrictionEngine
    tables: dict[str, ClassTable]

    @property
    def xi(self):
        return self.morse.xi

    def alpha(self, p: str, q: str) -> Polynomial:
        return self.tables[p].values[q]

    def beta(self, q: str, p: str) -> Polynomial:
        return self.engine.dual_restrict(q, p)


def prepare(g: GkmGraph, xi: Sequence, theta_method: str = "both") -> tuple[MorseData, dict, CanonicalGraph]:
    report = validate(g)
    if not report.ok:
        raise InvalidGraph(report)
    ok, bad = is_generic(g, xi)
    if not ok:
        raise NonGenericDirection(bad)
    morse = morse_data(g, xi)
    ok, violations = is_index_increasing(g, xi, morse)
    if not ok:
        raise IndexNotIncreasing(violations)
    thetas = theta_table(g, morse, theta_method)
    cg = one_step_restrictions(g, morse, thetas)
    return morse, thetas, cg


def canonical_table(g: GkmGraph, xi: Sequence) -> CanonicalResult:
    """Restrictions alpha_p(q) of every canonical class to every fixed point."""
    morse, thetas, cg = prepare(g, xi)
    engine = RestrictionEngine(g, morse, cg)
    cols = {q: engine.alpha_column(q) for q in g.ids}
    tables = {}
    for p in g.ids:
        values = {q: cols[q][p] for q in g.ids}
        for q, v in values.items():
            if not v.has_integer_coefficients():
                raise ArithmeticError(f"alpha_{p}({q}) = {v} is not integral")
        tables[p] = ClassTable(p, morse.index(p), values)
    return CanonicalResult(g, morse, thetas, cg, engine, tables)


def dual_tables(result: CanonicalResult) -> dict[str, ClassTable]:
    """beta_q as tables, degree = valence - index(q)."""
    g, morse, engine = result.graph, result.morse, result.engine
    rows = {p: engine.beta_row(p) for p in g.ids}
    d = morse.valence()
    return {q: ClassTable(q, d - morse.index(q), {p: rows[p][q] for p in g.ids}) for q in g.ids}


# ---------------------------------------------------------------------------
# integration and structure constants
# ---------------------------------------------------------------------------

def abbv_integrate(morse: MorseData, cls: Mapping[str, Polynomial]) -> Polynomial:
    """Sum over fixed points of cls(p) / Lambda_p; must be a polynomial."""
    n = morse.graph.n
    total = RationalFunction.from_polynomial(Polynomial.zero(n))
    for v in morse.graph.ids:
        value = cls[v]
        if value.is_zero():
            continue
        total = total + RationalFunction(value, morse[v].all_weights)
    try:
        return total.to_polynomial()
    except NotPolynomial:
        raise NotPolynomial(f"localization sum is not a polynomial: {total}") from None


class StructureConstantError(ArithmeticError):
    pass


def structure_constants(
    g: GkmGraph, xi: Sequence, p: str, q: str, verify: bool = True, result: CanonicalResult | None = None
) -> dict[str, Polynomial]:
    """c_{pq}^r = integral of alpha_p * alpha_q * beta_r.

    Pass ``result`` (from :func:`canonical_table` on the same graph and
    direction) to reuse the restriction tables across many pairs.
    """
    result = result or canonical_table(g, xi)
    morse = result.morse
    product = {s: result.alpha(p, s) * result.alpha(q, s) for s in g.ids}
    out = {}
    for r in g.ids:
        deg = morse.index(p) + morse.index(q) - morse.index(r)
        if deg < 0:
            out[r] = Polynomial.zero(g.n)
            continue
        beta_r = {s: result.beta(r, s) for s in g.ids}
        c = abbv_integrate(morse, {s: product[s] * beta_r[s] for s in g.ids})
        if c and c.homogeneous_degree() != deg:
            raise StructureConstantError(f"c_{{{p},{q}}}^{r} = {c} is not homogeneous of degree {deg}")
        out[r] = c
    if verify:
        for s in g.ids:
            expansion = Polynomial.zero(g.n)
            for r, c in out.items():
                if c:
                    expansion = expansion + c * result.alpha(r, s)
            if expansion != product[s]:
                raise StructureConstantError(f"expansion of alpha_{p} alpha_{q} fails at {s}")
    return out


# ---------------------------------------------------------------------------
# verification reports
# ---------------------------------------------------------------------------

@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class VerificationReport:
    owner: str
    checks: list[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def names_failed(self) -> set[str]:
        return {c.name for c in self.failed()}

    def to_dict(self) -> dict:
        return {
            "owner": self.owner,
            "ok": self.ok,
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks],
        }


def verify_canonical(g: GkmGraph, xi: Sequence, table: ClassTable, morse: MorseData | None = None) -> VerificationReport:
    """Itemized check of the canonical-class axioms for one table."""
    morse = morse or morse_data(g, xi)
    p = table.owner
    vals = table.values
    rep = VerificationReport(p)
    add = rep.checks.append
    lam_p = morse.index(p)

    diag = vals.get(p, Polynomial.zero(g.n))
    add(Check("diagonal", diag == morse.lambda_minus(p), f"alpha({p}) = {diag}, Lambda^- = {morse.lambda_minus(p)}"))

    bad = [q for q in g.ids if q != p and morse.index(q) <= lam_p and not vals[q].is_zero()]
    add(Check("vanishing_index", not bad, "nonzero at " + ", ".join(bad) if bad else ""))

    bad = [q for q in g.ids if q != p and morse.psi(q) <= morse.psi(p) and not vals[q].is_zero()]
    add(Check("vanishing_psi", not bad, "nonzero at " + ", ".join(bad) if bad else ""))

    bad = []
    for a, b in g.geometric_edges():
        if not (vals[b] - vals[a]).is_divisible_by_linear(g.weight(a, b)):
            bad.append(f"({a},{b})")
    add(Check("gkm_compatible", not bad, "fails on " + ", ".join(bad) if bad else ""))

    bad = [q for q in g.ids if not vals[q].is_zero() and vals[q].homogeneous_degree() != lam_p]
    add(Check("homogeneous", not bad, f"not of degree {lam_p} at " + ", ".join(bad) if bad else ""))

    bad = [q for q in g.ids if not vals[q].has_integer_coefficients()]
    add(Check("integral", not bad, "non-integer coefficients at " + ", ".join(bad) if bad else ""))
    return rep


@dataclass
class RobustEntry:
    vertex: str
    robust_edges: list[tuple[str, str]]
    product: Polynomial
    multiplier: Polynomial | None
    passed: bool

    def to_dict(self) -> dict:
        return {
            "vertex": self.vertex,
            "robust_edges": [list(e) for e in self.robust_edges],
            "product": str(self.product),
            "multiplier": None if self.multiplier is None else str(self.multiplier),
            "passed": self.passed,
        }


def robust_divisibility_report(g: GkmGraph, xi: Sequence, cls: Mapping[str, Polynomial]) -> list[RobustEntry]:
    """At each q, divide cls(q) by the weights of robustly zero incoming edges.

    Only ascending edges are listed: a descending neighbour r has q in its
    unstable set, so it can be robustly zero only when cls(q) = 0 already.
    """
    g.require_generic(xi)
    psi = {v: g.psi(v, xi) for v in g.ids}
    unstable = {v: reach_by_psi(g, psi, v, ascending=False) for v in g.ids}
    out = []
    for q in g.ids:
        edges = []
        for r in g.neighbors(q):
            if psi[r] < psi[q] and all(cls[s].is_zero() for s in unstable[r]):
                edges.append((r, q))
        product = Polynomial.product_of_linear(g.n, [g.weight(r, q) for r, _ in edges])
        multiplier = cls[q]
        try:
            for r, _ in edges:
                multiplier = multiplier.divide_linear(g.weight(r, q))
        except NotDivisible:
            multiplier = None
        passed = multiplier is not None and multiplier.has_integer_coefficients()
        out.append(RobustEntry(q, edges, product, multiplier, passed))
    return out


@dataclass
class PositivityEntry:
    edge: tuple[str, str]
    theta: int | None
    value: Polynomial
    value_at_xi: Fraction

    @property
    def sign(self) -> str:
        return "positive" if self.value_at_xi > 0 else "negative" if self.value_at_xi < 0 else "zero"


@dataclass
class PositivityReport:
    edges: list[PositivityEntry]
    negative_restrictions: list[tuple[str, str]]

    @property
    def all_positive(self) -> bool:
        return all(e.sign == "positive" for e in self.edges) and not self.negative_restrictions

    def negative_edges(self) -> list[tuple[str, str]]:
        return [e.edge for e in self.edges if e.sign != "positive"]

    def to_dict(self) -> dict:
        return {
            "all_positive": self.all_positive,
            "edges": [
                {"from": e.edge[0], "to": e.edge[1], "theta": e.theta, "value": str(e.value), "sign": e.sign}
                for e in self.edges
            ],
            "negative_restrictions": [list(pq) for pq in self.negative_restrictions],
        }


def positivity_report(
    cg: CanonicalGraph, tables: Mapping[str, ClassTable] | None, xi: Sequence | None = None
) -> PositivityReport:
    """Sign of each one-step value evaluated at xi (the sign of Theta), plus any negative alpha_p(q).

    ``xi`` defaults to the direction the canonical graph was built for.
    """
    xi = cg.xi if xi is None else xi
    if xi is None:
        raise ValueError("no direction: pass xi or build the graph with one_step_restrictions")
    entries = [
        PositivityEntry(edge, cg.thetas.get(edge), cg.values[edge], cg.values[edge].evaluate(xi))
        for edge in cg.edges
    ]
    negative = []
    for p, table in (tables or {}).items():
        for q, value in table.values.items():
            if value.evaluate(xi) < 0:
                negative.append((p, q))
    return PositivityReport(entries, negative)
