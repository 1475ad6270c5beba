"""End-to-end acceptance criteria, each with its own wall-clock limit.

Run with pytest, or directly (``python tests/test_acceptance.py``) to get only
the one-line-per-criterion summary.
"""
from __future__ import annotations

import itertools
import random
import time
from fractions import Fraction

import pytest

from gkm.canonical import (
    abbv_integrate,
    canonical_table,
    dual_tables,
    positivity_report,
    robust_divisibility_report,
    structure_constants,
    theta_modular,
    theta_projection,
    index_one_edges,
    verify_canonical,
)
from gkm.exactalg import Polynomial, RationalFunction
from gkm.gkmgraph import validate
from gkm.morse import is_index_increasing, morse_data
from gkm.oracle import Infeasible, billey_restrict, solve_canonical_linear, structure_constants_triangular
from gkm.spaces import (
    builtin_spaces,
    flag_id,
    gen_blowup_cp2,
    gen_cp1xcp1_twisted,
    gen_cpn,
    gen_flag,
    random_spaces,
)

RANDOM_SEED = 20240611
RESULTS: dict[int, tuple[bool, float, float, str]] = {}


def _builtins():
    """Built-in spaces of desk size: CP^1..CP^4, Fl(2..4), twisted CP1xCP1, blown-up CP^2."""
    return builtin_spaces(max_cpn=4, max_flag=4)


def _index_increasing(spaces):
    return [s for s in spaces if is_index_increasing(s.graph, s.xi)[0]]


# ---------------------------------------------------------------------------
# the criteria
# ---------------------------------------------------------------------------

def criterion_1():
    """CP^n closed form for n = 1..6."""
    for n in range(1, 7):
        s = gen_cpn(n)
        res = canonical_table(s.graph, s.xi)
        dim = n + 1
        for i in range(1, dim + 1):
            for j in range(1, dim + 1):
                expected = Polynomial.zero(dim)
                if i <= j:
                    expected = Polynomial.product_of_linear(
                        dim, [[int(k == l) - int(k == j - 1) for k in range(dim)] for l in range(i - 1)]
                    )
                assert res.alpha(f"p{i}", f"p{j}") == expected, (n, i, j)


def criterion_2():
    """Flag manifolds: Theta = 1, agreement with Billey, positivity."""
    for n in (2, 3, 4):
        s = gen_flag(n)
        res = canonical_table(s.graph, s.xi)
        assert set(res.thetas.values()) == {1}
        perms = list(itertools.permutations(range(1, n + 1)))
        for sigma in perms:
            for mu in perms:
                assert billey_restrict(n, sigma, mu) == res.alpha(flag_id(sigma), flag_id(mu)), (sigma, mu)
        assert positivity_report(res.cg, res.tables, s.xi).all_positive


def criterion_3():
    """No canonical class at p2 on the blown-up CP^2."""
    b = gen_blowup_cp2()
    result = solve_canonical_linear(b.graph, b.xi, "p2")
    assert isinstance(result, Infeasible)
    ok, bad = is_index_increasing(b.graph, b.xi)
    assert not ok and ("p2", "p3") in bad


def criterion_4():
    """Both Theta algorithms agree and give nonzero integers."""
    spaces = builtin_spaces(max_cpn=6, max_flag=4) + random_spaces(50, seed=RANDOM_SEED)
    checked = 0
    for s in spaces:
        m = morse_data(s.graph, s.xi)
        for a, b in index_one_edges(s.graph, m):
            t1 = theta_projection(s.graph, m, a, b)
            t2 = theta_modular(s.graph, m, a, b)
            assert t1 == t2 and isinstance(t1, int) and t1 != 0, (s.label, a, b)
            checked += 1
    assert checked > 0


def criterion_5():
    """The linear-algebra oracle reproduces every path-formula table."""
    spaces = [gen_cpn(n) for n in range(1, 5)] + [gen_flag(n) for n in (2, 3)]
    for s in spaces:
        res = canonical_table(s.graph, s.xi)
        for p in s.graph.ids:
            oracle = solve_canonical_linear(s.graph, s.xi, p, res.morse)
            assert not isinstance(oracle, Infeasible)
            assert oracle.values == res.tables[p].values, (s.label, p)


def criterion_6():
    """Canonical classes and their duals integrate to the identity matrix."""
    for s in (gen_cpn(3), gen_flag(3)):
        res = canonical_table(s.graph, s.xi)
        duals = dual_tables(res)
        g = s.graph
        one, zero = Polynomial.one(g.n), Polynomial.zero(g.n)
        for p in g.ids:
            for q in g.ids:
                value = abbv_integrate(res.morse, {v: res.alpha(p, v) * duals[q][v] for v in g.ids})
                assert value == (one if p == q else zero), (s.label, p, q)


def criterion_7():
    """Sum over l of prod_{i != l} 1/(v_i - v_l) vanishes; 200 random instances."""
    rng = random.Random(RANDOM_SEED)
    n = 3
    for trial in range(200):
        k = 2 + trial % 5
        vectors: list[tuple[Fraction, ...]] = []
        while len(vectors) < k:
            v = tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(n))
            if v not in vectors:
                vectors.append(v)
        total = RationalFunction.from_polynomial(Polynomial.zero(n))
        for l, vl in enumerate(vectors):
            dens = [tuple(a - b for a, b in zip(vi, vl)) for i, vi in enumerate(vectors) if i != l]
            total = total + RationalFunction(Polynomial.one(n), dens)
        assert total.is_zero(), vectors


def criterion_8():
    """The path sum from the minimum equals 1 everywhere (index-increasing spaces)."""
    for s in _index_increasing(_builtins()):
        res = canonical_table(s.graph, s.xi)
        lo = res.morse.minimum()
        one = Polynomial.one(s.graph.n)
        for q in s.graph.ids:
            assert res.engine.restrict_by_paths(lo, q) == one, (s.label, q)


def criterion_9():
    """Structure constants on CP^2 and the expansion identity on Fl(3)."""
    s = gen_cpn(2)
    res = canonical_table(s.graph, s.xi)
    c = structure_constants(res.graph, res.xi, "p2", "p2", result=res)
    assert c["p2"] == Polynomial.parse("x1 - x2", 3)
    assert c["p3"] == Polynomial.one(3)
    tables = {p: t.values for p, t in res.tables.items()}
    assert structure_constants_triangular(res.morse, tables, "p2", "p2") == c
    f = gen_flag(3)
    res = canonical_table(f.graph, f.xi)
    tables = {p: t.values for p, t in res.tables.items()}
    for p in f.graph.ids:
        for q in f.graph.ids:
            c = structure_constants(res.graph, res.xi, p, q, verify=False, result=res)
            for v in f.graph.ids:
                expansion = Polynomial.zero(3)
                for r, coeff in c.items():
                    expansion = expansion + coeff * res.alpha(r, v)
                assert expansion == res.alpha(p, v) * res.alpha(q, v), (p, q, v)
            assert c == structure_constants_triangular(res.morse, tables, p, q)


def criterion_10():
    """Robust divisibility: the fixture class and every canonical class pass."""
    tw = gen_cp1xcp1_twisted()
    assert all(e.passed for e in robust_divisibility_report(tw.graph, tw.xi, tw.fixtures["beta"]))
    for s in _index_increasing(_builtins()):
        res = canonical_table(s.graph, s.xi)
        for p, table in res.tables.items():
            entries = robust_divisibility_report(s.graph, s.xi, table.values)
            assert all(e.passed for e in entries), (s.label, p)


def criterion_11():
    """Every table, Morse and canonical-graph invariant on built-in and random spaces."""
    spaces = _index_increasing(_builtins()) + random_spaces(50, seed=RANDOM_SEED + 1)
    for s in spaces:
        g = s.graph
        assert validate(g).ok
        res = canonical_table(g, s.xi)
        m = res.morse
        d = m.valence()
        for v in g.ids:
            assert m.lambda_minus(v).degree() == m.index(v)
            assert m.lambda_plus(v).degree() == d - m.index(v)
            assert m.lambda_full(v) == m.lambda_minus(v) * m.lambda_plus(v)
        for p, table in res.tables.items():
            rep = verify_canonical(g, s.xi, table, m)
            assert rep.ok, (s.label, p, [c.name for c in rep.failed()])
        for a, b in res.cg.edges:
            assert m.psi(a) < m.psi(b) and m.index(b) == m.index(a) + 1


CRITERIA = {
    1: (criterion_1, 5.0),
    2: (criterion_2, 60.0),
    3: (criterion_3, 1.0),
    4: (criterion_4, 10.0),
    5: (criterion_5, 30.0),
    6: (criterion_6, 10.0),
    7: (criterion_7, 2.0),
    8: (criterion_8, 10.0),
    9: (criterion_9, 30.0),
    10: (criterion_10, 10.0),
    11: (criterion_11, 60.0),
}


def run_criterion(number: int) -> tuple[bool, float, str]:
    func, limit = CRITERIA[number]
    start = time.perf_counter()
    detail = ""
    try:
        func()
        ok = True
    except AssertionError as exc:
        ok, detail = False, f"assertion failed {exc}"
    elapsed = time.perf_counter() - start
    if ok and elapsed > limit:
        ok, detail = False, "over time limit"
    RESULTS[number] = (ok, elapsed, limit, detail)
    return ok, elapsed, detail


def summary_line(number: int) -> str:
    ok, elapsed, limit, detail = RESULTS[number]
    doc = (CRITERIA[number][0].__doc__ or "").strip().splitlines()[0]
    status = "PASS" if ok else "FAIL"
    extra = f" [{detail}]" if detail else ""
    return f"criterion {number:2d}: {status}  {elapsed:6.2f}s / {limit:g}s  {doc}{extra}"


@pytest.mark.acceptance
@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    ok, elapsed, detail = run_criterion(number)
    print(summary_line(number))
    assert ok, summary_line(number)


if __name__ == "__main__":
    failures = 0
    for k in sorted(CRITERIA):
        ok, _, _ = run_criterion(k)
        failures += not ok
        print(summary_line(k), flush=True)
    raise SystemExit(1 if failures else 0)
