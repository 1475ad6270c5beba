"""``gkm`` command line front end.

Exit codes: 0 success, 1 I/O / schema / usage error, 2 mathematical refusal
(non-generic xi, index-increasing hypothesis fails, non-integral Theta).
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .canonical import (
    ClassTable,
    InvalidGraph,
    NonIntegerTheta,
    ThetaMismatch,
    canonical_table,
    dual_tables,
    one_step_restrictions,
    positivity_report,
    robust_divisibility_report,
    structure_constants,
    theta_table,
    verify_canonical,
)
from .exactalg import NotPolynomial, format_rational
from .gkmgraph import GraphError, NonGenericDirection, export_dot, load_graph, validate
from .morse import IndexNotIncreasing, is_generic, is_index_increasing, morse_data, parse_direction
from .oracle import Infeasible, UniquenessViolation, billey_restrict, solve_canonical_linear
from .spaces import make_space

NEEDS_XI = {"morse", "theta", "canonical", "duals", "structconsts", "solve", "robust"}


class UsageError(Exception):
    pass


class Refusal(Exception):
    def __init__(self, kind: str, message: str, details=None):
        self.kind = kind
        self.details = details
        super().__init__(message)


class _Parser(argparse.ArgumentParser):
    # usage errors exit 1 so that 2 stays reserved for mathematical refusals
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_source(p: argparse.ArgumentParser, xi: bool):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph", metavar="FILE", help="graph JSON file")
    src.add_argument("--space", metavar="KIND[:N]", help="built-in space: cpn:N, flag:N, cp1xcp1_twisted, blowup_cp2")
    p.add_argument("--xi", required=xi, help="generic direction, comma-separated rationals (a/b allowed)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gkm", description="Canonical equivariant classes on GKM graphs.")
    parser.add_argument("--version", action="version", version=f"gkm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name, help_text, xi=True):
        p = sub.add_parser(name, help=help_text)
        if name != "billey":
            _add_source(p, xi)
        p.add_argument("--output", "-o", metavar="PATH", help="write the report here instead of stdout")
        p.add_argument("--format", choices=("json", "text"), default="json")
        return p

    command("validate", "check the GKM graph axioms", xi=False)
    command("morse", "indices and weight products for a direction")
    p = command("theta", "Theta on index-one ascending edges")
    p.add_argument("--method", choices=("projection", "modular", "both"), default="both")
    command("canonical", "restrictions of all canonical classes")
    command("duals", "restrictions of the dual classes for -psi")
    p = command("structconsts", "structure constants c_pq^r")
    p.add_argument("--p", dest="p_vertex", metavar="VERTEX")
    p.add_argument("--q", dest="q_vertex", metavar="VERTEX")
    p = command("solve", "solve for canonical classes by linear algebra")
    p.add_argument("--vertex", metavar="VERTEX", help="only this fixed point (default: all)")
    p = command("billey", "Billey's restriction formula on the flag manifold")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--sigma", required=True, help="permutation in one-line notation, e.g. 213 or 2,1,3")
    p.add_argument("--mu", required=True)
    p = command("robust", "robust integrality of a class at every vertex")
    p.add_argument("--class", dest="class_file", metavar="FILE", help="class table JSON; default: every canonical class")
    p.add_argument("--fixture", help="named fixture class shipped with a built-in space (e.g. beta)")
    command("dot", "Graphviz export", xi=False)
    return parser


# ---------------------------------------------------------------------------

def _load(args):
    strict = args.command not in ("validate", "theta", "morse", "dot")
    if args.space:
        try:
            space = make_space(args.space)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        return space.graph, space
    try:
        with open(args.graph, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise GraphError(f"cannot read {args.graph}: {exc.strerror}") from None
    return load_graph(text, strict=strict), None


def _xi(args, g):
    if args.xi is None:
        return None
    try:
        xi = parse_direction(args.xi)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad --xi: {exc}") from None
    if len(xi) != g.n:
        raise UsageError(f"--xi has {len(xi)} entries, the graph has dim_t = {g.n}")
    ok, bad = is_generic(g, xi)
    if not ok:
        raise Refusal("non_generic", f"xi is not generic: <eta({bad[0]},{bad[1]}), xi> = 0", {"edge": list(bad)})
    return xi


def _perm(text: str, n: int):
    parts = text.split(",") if "," in text else list(text)
    try:
        perm = tuple(int(c) for c in parts)
    except ValueError:
        raise UsageError(f"bad permutation {text!r}") from None
    if sorted(perm) != list(range(1, n + 1)):
        raise UsageError(f"{text!r} is not a permutation of 1..{n}")
    return perm


def _header(args, xi):
    head = {"source": args.space or args.graph}
    if xi is not None:
        head["xi"] = [format_rational(c) for c in xi]
    return head


def _require_valid(g):
    report = validate(g)
    if not report.ok:
        raise InvalidGraph(report)


def run_command(args) -> tuple[dict | str, list[str]]:
    """Return (report, text lines)."""
    if args.command == "billey":
        sigma, mu = _perm(args.sigma, args.n), _perm(args.mu, args.n)
        value = billey_restrict(args.n, sigma, mu)
        return {"n": args.n, "sigma": list(sigma), "mu": list(mu), "value": str(value)}, [str(value)]

    g, space = _load(args)
    xi = _xi(args, g)
    cmd = args.command

    if cmd == "validate":
        report = validate(g)
        lines = ["valid" if report.ok else "invalid"] + [f"{v.kind}: {v.detail}" for v in report.violations]
        return {**_header(args, xi), **report.to_dict()}, lines

    if cmd == "dot":
        return export_dot(g, xi), []

    if cmd == "morse":
        m = morse_data(g, xi)
        ok, bad = is_index_increasing(g, xi, m)
        doc = {**_header(args, xi), **m.to_dict(), "index_increasing": ok, "violations": [list(e) for e in bad]}
        lines = [f"{v}: psi={format_rational(m.psi(v))} lambda={m.index(v)} Lambda-={m.lambda_minus(v)} Lambda+={m.lambda_plus(v)}" for v in g.ids]
        lines.append("index increasing" if ok else "not index increasing: " + ", ".join(f"({a},{b})" for a, b in bad))
        return doc, lines

    if cmd == "theta":
        m = morse_data(g, xi)
        thetas = theta_table(g, m, args.method)
        edges = [{"from": a, "to": b, "theta": t} for (a, b), t in thetas.items()]
        doc = {**_header(args, xi), "method": args.method, "edges": edges}
        ok, bad = is_index_increasing(g, xi, m)
        if ok:
            cg = one_step_restrictions(g, m, thetas)
            pos = positivity_report(cg, None, xi)
            doc["all_positive"] = pos.all_positive
            doc["negative_edges"] = [list(e) for e in pos.negative_edges()]
        lines = [f"Theta({a},{b}) = {t}" for (a, b), t in thetas.items()]
        return doc, lines

    if cmd in ("canonical", "duals", "structconsts", "robust"):
        _require_valid(g)
        result = canonical_table(g, xi)

    if cmd == "canonical":
        tables = [t.to_dict() for t in result.tables.values()]
        pos = positivity_report(result.cg, result.tables, xi)
        checks = {p: verify_canonical(g, xi, t, result.morse).ok for p, t in result.tables.items()}
        doc = {
            **_header(args, xi),
            "thetas": [{"from": a, "to": b, "theta": t} for (a, b), t in result.thetas.items()],
            "tables": tables,
            "verified": all(checks.values()),
            "all_positive": pos.all_positive,
        }
        lines = [f"alpha_{p}({q}) = {v}" for p, t in result.tables.items() for q, v in t.values.items()]
        return doc, lines

    if cmd == "duals":
        duals = dual_tables(result)
        doc = {**_header(args, xi), "tables": [t.to_dict() for t in duals.values()]}
        lines = [f"beta_{q}({p}) = {v}" for q, t in duals.items() for p, v in t.values.items()]
        return doc, lines

    if cmd == "structconsts":
        ps = [args.p_vertex] if args.p_vertex else g.ids
        qs = [args.q_vertex] if args.q_vertex else g.ids
        for v in ps + qs:
            if v not in g.ids:
                raise UsageError(f"unknown vertex {v!r}")
        rows, lines = [], []
        for p in ps:
            for q in qs:
                for r, c in structure_constants(result.graph, result.xi, p, q, result=result).items():
                    if c:
                        rows.append({"p": p, "q": q, "r": r, "c": str(c)})
                        lines.append(f"c_{{{p},{q}}}^{r} = {c}")
        return {**_header(args, xi), "constants": rows}, lines

    if cmd == "robust":
        if args.class_file and args.fixture:
            raise UsageError("use at most one of --class and --fixture")
        if args.fixture:
            if space is None or args.fixture not in space.fixtures:
                raise UsageError(f"no fixture {args.fixture!r} for this input")
            classes = {args.fixture: space.fixtures[args.fixture]}
        elif args.class_file:
            try:
                with open(args.class_file, encoding="utf-8") as fh:
                    doc = json.load(fh)
            except OSError as exc:
                raise GraphError(f"cannot read {args.class_file}: {exc.strerror}") from None
            except json.JSONDecodeError as exc:
                raise GraphError(f"invalid JSON in {args.class_file}: {exc}") from None
            try:
                table = ClassTable.from_dict(doc, g.n)
            except (KeyError, ValueError) as exc:
                raise GraphError(f"bad class table: {exc}") from None
            classes = {table.owner or "class": table.values}
        else:
            classes = {f"alpha_{p}": t.values for p, t in result.tables.items()}
        out, lines = [], []
        for name, cls in classes.items():
            missing = [v for v in g.ids if v not in cls]
            if missing:
                raise GraphError(f"class {name} has no value at {', '.join(missing)}")
            entries = robust_divisibility_report(g, xi, cls)
            out.append({"class": name, "passed": all(e.passed for e in entries), "vertices": [e.to_dict() for e in entries]})
            lines.append(f"{name}: {'pass' if all(e.passed for e in entries) else 'FAIL'}")
        return {**_header(args, xi), "classes": out}, lines

    if cmd == "solve":
        m = morse_data(g, xi)
        targets = [args.vertex] if args.vertex else g.ids
        results, lines = [], []
        for p in targets:
            if p not in g.ids:
                raise UsageError(f"unknown vertex {p!r}")
            res = solve_canonical_linear(g, xi, p, m)
            if isinstance(res, Infeasible):
                results.append(res.to_dict())
                edges = ", ".join(f"({a},{b})" for a, b in res.edges)
                lines.append(f"{p}: Infeasible; GKM congruences on {edges} reduce to 0 = {res.value}")
            else:
                results.append({"status": "Unique", "owner": p, "table": res.to_dict()})
                lines.append(f"{p}: unique; " + ", ".join(f"{q}: {v}" for q, v in res.values.items()))
        return {**_header(args, xi), "results": results}, lines

    raise UsageError(f"unknown command {cmd}")


def _emit_error(args, code: int, kind: str, message: str, details=None) -> int:
    if getattr(args, "format", "json") == "json":
        payload = {"error": kind, "message": message}
        if details is not None:
            payload["details"] = details
        print(json.dumps(payload), file=sys.stderr)
    else:
        print(f"gkm: {message}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, lines = run_command(args)
    except Refusal as exc:
        return _emit_error(args, 2, exc.kind, str(exc), exc.details)
    except IndexNotIncreasing as exc:
        return _emit_error(args, 2, "index_not_increasing", str(exc), {"violations": [list(e) for e in exc.violations]})
    except NonGenericDirection as exc:
        return _emit_error(args, 2, "non_generic", str(exc), {"edge": list(exc.edge)})
    except NonIntegerTheta as exc:
        return _emit_error(args, 2, "non_integer_theta", str(exc), {"edge": list(exc.edge)})
    except InvalidGraph as exc:
        return _emit_error(args, 1, "invalid_graph", str(exc), exc.report.to_dict())
    except (GraphError, UsageError) as exc:
        return _emit_error(args, 1, "input_error", str(exc))
    except (ThetaMismatch, NotPolynomial, UniquenessViolation, ArithmeticError) as exc:
        return _emit_error(args, 3, "internal_error", str(exc))

    if isinstance(report, str):
        text = report
    elif args.format == "json":
        text = json.dumps(report, indent=2) + "\n"
    else:
        text = "\n".join(lines) + "\n"
    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            return _emit_error(args, 1, "io_error", f"cannot write {args.output}: {exc.strerror}")
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
