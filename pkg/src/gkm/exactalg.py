"""Exact arithmetic in S(t*) and the part of its fraction field we need.

Polynomials are sparse maps from exponent tuples to :class:`fractions.Fraction`
coefficients.  Rational functions keep a polynomial numerator over a multiset
of linear-form denominators; this is closed under every operation the
restriction formulas perform, so no general multivariate gcd is needed.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

__all__ = [
    "DimensionMismatch",
    "NotDivisible",
    "NotPolynomial",
    "Polynomial",
    "RationalFunction",
    "linear_form",
    "normalize_linear",
    "pairing",
    "parse_rational",
    "format_rational",
    "poly_arith",
    "exact_divide_linear",
    "rho_project",
    "ratfun_arith",
    "ratfun_to_polynomial",
]


class DimensionMismatch(ValueError):
    pass


class NotDivisible(ArithmeticError):
    """Raised when a polynomial is not an exact multiple of a linear form."""

    def __init__(self, remainder: "Polynomial"):
        self.remainder = remainder
        lead = remainder.leading_term()
        self.leading = lead
        super().__init__(f"not divisible; remainder leading term {_format_term(*lead, remainder.nvars)}")


class NotPolynomial(ArithmeticError):
    pass


def parse_rational(text) -> Fraction:
    """Parse ``"a/b"``, an integer string, or an int into a reduced Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    return Fraction(str(text).strip())


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def pairing(form: Sequence, vector: Sequence) -> Fraction:
    if len(form) != len(vector):
        raise DimensionMismatch(f"cannot pair length {len(form)} with length {len(vector)}")
    return sum((Fraction(a) * Fraction(b) for a, b in zip(form, vector)), Fraction(0))


def normalize_linear(coeffs: Sequence) -> tuple[Fraction, tuple[Fraction, ...]]:
    """Split a nonzero linear form into ``scale * monic`` with monic first coefficient 1."""
    coeffs = tuple(Fraction(c) for c in coeffs)
    for c in coeffs:
        if c:
            return c, tuple(x / c for x in coeffs)
    raise ZeroDivisionError("zero linear form")


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------

def _grlex_key(exp: tuple[int, ...]):
    return (sum(exp), exp)


def _format_term(exp, coeff, nvars) -> str:
    factors = []
    for i, e in enumerate(exp):
        if e == 1:
            factors.append(f"x{i + 1}")
        elif e > 1:
            factors.append(f"x{i + 1}^{e}")
    mono = "*".join(factors)
    if not mono:
        return format_rational(coeff)
    if coeff == 1:
        return mono
    if coeff == -1:
        return "-" + mono
    return f"{format_rational(coeff)}*{mono}"


class Polynomial:
    """Immutable sparse polynomial in ``x1..xn`` with rational coefficients."""

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[tuple[int, ...], object] | None = None):
        self.nvars = nvars
        clean: dict[tuple[int, ...], Fraction] = {}
        if terms:
            for exp, c in terms.items():
                if len(exp) != nvars:
                    raise DimensionMismatch(f"exponent {exp} does not have {nvars} entries")
                c = Fraction(c)
                if c:
                    clean[tuple(exp)] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, nvars: int, terms: dict) -> "Polynomial":
        # terms must already be clean (no zeros, Fraction coefficients)
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj._terms = terms
        obj._hash = None
        return obj

    # constructors -----------------------------------------------------
    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, nvars: int, value) -> "Polynomial":
        value = Fraction(value)
        return cls._raw(nvars, {(0,) * nvars: value} if value else {})

    @classmethod
    def one(cls, nvars: int) -> "Polynomial":
        return cls.constant(nvars, 1)

    @classmethod
    def variable(cls, nvars: int, index: int) -> "Polynomial":
        exp = [0] * nvars
        exp[index] = 1
        return cls._raw(nvars, {tuple(exp): Fraction(1)})

    @classmethod
    def linear(cls, coeffs: Sequence) -> "Polynomial":
        n = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            c = Fraction(c)
            if c:
                exp = [0] * n
                exp[i] = 1
                terms[tuple(exp)] = c
        return cls._raw(n, terms)

    @classmethod
    def product_of_linear(cls, nvars: int, forms: Iterable[Sequence]) -> "Polynomial":
        out = cls.one(nvars)
        for f in forms:
            out = out * cls.linear(f)
        return out

    @classmethod
    def parse(cls, text: str, nvars: int) -> "Polynomial":
        """Parse the text form produced by ``str``; accepts ``*``, ``^`` and ``**``."""
        src = text.replace("**", "^").replace(" ", "")
        if src in ("", "0"):
            return cls.zero(nvars)
        if src[0] not in "+-":
            src = "+" + src
        out: dict[tuple[int, ...], Fraction] = {}
        for sign, body in re.findall(r"([+-])([^+-]+)", src):
            coeff = Fraction(1)
            exp = [0] * nvars
            for factor in body.split("*"):
                m = re.fullmatch(r"x(\d+)(?:\^(\d+))?", factor)
                if m:
                    idx = int(m.group(1)) - 1
                    if not 0 <= idx < nvars:
                        raise DimensionMismatch(f"variable x{idx + 1} outside x1..x{nvars}")
                    exp[idx] += int(m.group(2) or 1)
                else:
                    try:
                        coeff *= Fraction(factor)
                    except ValueError:
                        raise ValueError(f"cannot parse polynomial factor {factor!r} in {text!r}") from None
            if sign == "-":
                coeff = -coeff
            key = tuple(exp)
            out[key] = out.get(key, Fraction(0)) + coeff
        return cls(nvars, out)

    # basic protocol ---------------------------------------------------
    @property
    def terms(self) -> dict[tuple[int, ...], Fraction]:
        return dict(self._terms)

    def items(self):
        """Terms in descending graded-lex order."""
        return sorted(self._terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == Polynomial.constant(self.nvars, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"Polynomial({str(self)!r}, nvars={self.nvars})"

    def __str__(self):
        items = self.items()
        if not items:
            return "0"
        parts = []
        for k, (exp, c) in enumerate(items):
            s = _format_term(exp, c, self.nvars)
            if k == 0:
                parts.append(s)
            elif s.startswith("-"):
                parts.append("- " + s[1:])
            else:
                parts.append("+ " + s)
        return " ".join(parts)

    # degree bookkeeping ------------------------------------------------
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def homogeneous_degree(self):
        """Common degree of all terms, ``None`` for zero, ``"mixed"`` otherwise."""
        degs = {sum(e) for e in self._terms}
        if not degs:
            return None
        if len(degs) == 1:
            return degs.pop()
        return "mixed"

    def is_homogeneous(self) -> bool:
        return self.homogeneous_degree() != "mixed"

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def constant_value(self) -> Fraction:
        return self._terms.get((0,) * self.nvars, Fraction(0))

    def leading_term(self) -> tuple[tuple[int, ...], Fraction]:
        if not self._terms:
            return ((0,) * self.nvars, Fraction(0))
        exp = max(self._terms, key=_grlex_key)
        return exp, self._terms[exp]

    def has_integer_coefficients(self) -> bool:
        return all(c.denominator == 1 for c in self._terms.values())

    # arithmetic --------------------------------------------------------
    def _check(self, other: "Polynomial"):
        if self.nvars != other.nvars:
            raise DimensionMismatch(f"polynomials in {self.nvars} and {other.nvars} variables")

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.nvars, other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        terms = dict(self._terms)
        for e, c in other._terms.items():
            v = terms.get(e)
            if v is None:
                terms[e] = c
            else:
                v += c
                if v:
                    terms[e] = v
                else:
                    del terms[e]
        return Polynomial._raw(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not self._terms or not other._terms:
            return Polynomial.zero(self.nvars)
        terms: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = terms.get(e)
                terms[e] = c1 * c2 if v is None else v + c1 * c2
        return Polynomial._raw(self.nvars, {e: c for e, c in terms.items() if c})

    __rmul__ = __mul__

    def scale(self, factor) -> "Polynomial":
        factor = Fraction(factor)
        if not factor:
            return Polynomial.zero(self.nvars)
        return Polynomial._raw(self.nvars, {e: c * factor for e, c in self._terms.items()})

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("power must be a non-negative integer")
        out = Polynomial.one(self.nvars)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # substitution ------------------------------------------------------
    def substitute(self, images: Sequence["Polynomial"]) -> "Polynomial":
        """Apply the algebra map sending ``x_i`` to ``images[i]``."""
        if len(images) != self.nvars:
            raise DimensionMismatch("need one image per variable")
        if not self._terms:
            return Polynomial.zero(images[0].nvars if images else 0)
        target = images[0].nvars
        powers: list[dict[int, Polynomial]] = [{0: Polynomial.one(target), 1: img} for img in images]

        def power(i, e):
            cache = powers[i]
            if e not in cache:
                cache[e] = power(i, e - 1) * images[i]
            return cache[e]

        out = Polynomial.zero(target)
        for exp, c in self._terms.items():
            term = Polynomial.constant(target, c)
            for i, e in enumerate(exp):
                if e:
                    term = term * power(i, e)
            out = out + term
        return out

    def substitute_variable(self, index: int, image: "Polynomial") -> "Polynomial":
        images = [Polynomial.variable(self.nvars, i) for i in range(self.nvars)]
        images[index] = image
        return self.substitute(images)

    def evaluate(self, point: Sequence) -> Fraction:
        if len(point) != self.nvars:
            raise DimensionMismatch("point has the wrong length")
        pt = [Fraction(v) for v in point]
        total = Fraction(0)
        for exp, c in self._terms.items():
            term = c
            for v, e in zip(pt, exp):
                if e:
                    term *= v ** e
            total += term
        return total

    # division ------------------------------------------------------------
    def divide_linear(self, form: Sequence) -> "Polynomial":
        """Exact quotient by the linear form ``sum form[i] x_i``.

        Raises :class:`NotDivisible` carrying the remainder otherwise.
        """
        q, r = self._divmod_linear(form)
        if r:
            raise NotDivisible(r)
        return q

    def _divmod_linear(self, form: Sequence):
        if len(form) != self.nvars:
            raise DimensionMismatch("linear form has the wrong length")
        form = [Fraction(c) for c in form]
        k = next((i for i, c in enumerate(form) if c), None)
        if k is None:
            raise ZeroDivisionError("division by the zero linear form")
        lead = form[k]
        # form = lead * (x_k - a)
        a = Polynomial.linear([Fraction(0) if i == k else -c / lead for i, c in enumerate(form)])
        # group by the power of x_k
        slices: dict[int, dict] = {}
        for exp, c in self._terms.items():
            d = exp[k]
            rest = exp[:k] + (0,) + exp[k + 1:]
            slices.setdefault(d, {})[rest] = c
        if not slices:
            return Polynomial.zero(self.nvars), Polynomial.zero(self.nvars)
        top = max(slices)
        coeffs = [Polynomial._raw(self.nvars, slices.get(d, {})) for d in range(top + 1)]
        # synthetic division of sum coeffs[d] x_k^d by (x_k - a)
        quot = [None] * top
        carry = coeffs[top]
        for d in range(top, 0, -1):
            quot[d - 1] = carry
            carry = coeffs[d - 1] + a * carry
        remainder = carry
        # no slice involves x_k, so the quotient is assembled by shifting exponents
        inv = 1 / lead
        terms = {}
        for d, part in enumerate(quot):
            for exp, c in part._terms.items():
                terms[exp[:k] + (d,) + exp[k + 1:]] = c * inv
        return Polynomial._raw(self.nvars, terms), remainder

    def is_divisible_by_linear(self, form: Sequence) -> bool:
        return not self._divmod_linear(form)[1]

    def scalar_ratio(self, other: "Polynomial"):
        """Return ``c`` with ``self == c * other``, or ``None`` if no such rational exists."""
        self._check(other)
        if not other._terms:
            raise ZeroDivisionError("ratio by the zero polynomial")
        if not self._terms:
            return Fraction(0)
        exp, c = other.leading_term()
        mine = self._terms.get(exp)
        if mine is None:
            return None
        ratio = mine / c
        return ratio if self == other.scale(ratio) else None


# ---------------------------------------------------------------------------
# Linear forms
# ---------------------------------------------------------------------------

def linear_form(coeffs: Sequence) -> tuple[Fraction, ...]:
    return tuple(Fraction(c) for c in coeffs)


# ---------------------------------------------------------------------------
# Rational functions
# ---------------------------------------------------------------------------

class RationalFunction:
    """``num / prod(f**m)`` with each ``f`` a monic linear form.

    The invariant is maximal cancellation: no denominator factor divides the
    numerator.  Equality is therefore structural.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Iterable[Sequence] = ()):
        factors: dict[tuple[Fraction, ...], int] = {}
        scale = Fraction(1)
        for form in den:
            if len(form) != num.nvars:
                raise DimensionMismatch("denominator form has the wrong length")
            s, monic = normalize_linear(form)
            scale *= s
            factors[monic] = factors.get(monic, 0) + 1
        self.num, self.den = _cancel(num.scale(1 / scale), factors)

    @classmethod
    def _raw(cls, num: Polynomial, den: tuple):
        obj = cls.__new__(cls)
        obj.num = num
        obj.den = den
        return obj

    @classmethod
    def from_polynomial(cls, p: Polynomial) -> "RationalFunction":
        return cls._raw(p, ())

    @property
    def nvars(self) -> int:
        return self.num.nvars

    def is_polynomial(self) -> bool:
        return not self.den

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            other = RationalFunction.from_polynomial(other)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def cross_equal(self, other: "RationalFunction") -> bool:
        """Equality by cross-multiplication, independent of the normal form."""
        left = self.num
        for f, m in other.den:
            for _ in range(m):
                left = left * Polynomial.linear(f)
        right = other.num
        for f, m in self.den:
            for _ in range(m):
                right = right * Polynomial.linear(f)
        return left == right

    def __repr__(self):
        return f"RationalFunction({str(self)!r})"

    def __str__(self):
        if not self.den:
            return str(self.num)
        parts = []
        for f, m in self.den:
            s = f"({Polynomial.linear(f)})"
            parts.append(s if m == 1 else f"{s}^{m}")
        return f"({self.num}) / ({'*'.join(parts)})"

    def __neg__(self):
        return RationalFunction._raw(-self.num, self.den)

    def __add__(self, other):
        if isinstance(other, Polynomial):
            other = RationalFunction.from_polynomial(other)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        if self.nvars != other.nvars:
            raise DimensionMismatch("rational functions over different dimensions")
        if self.num.is_zero():
            return other
        if other.num.is_zero():
            return self
        da, db = dict(self.den), dict(other.den)
        if da == db:
            return RationalFunction._from_dict(self.num + other.num, da)
        lcm = dict(da)
        for f, m in db.items():
            if lcm.get(f, 0) < m:
                lcm[f] = m
        na = _times_forms(self.num, lcm, da)
        nb = _times_forms(other.num, lcm, db)
        total = na + nb
        # both summands are reduced, so a factor whose multiplicities differ
        # divides exactly one of na, nb and cannot cancel from the sum
        shared = {f: m for f, m in lcm.items() if da.get(f) == db.get(f)}
        num, kept = _cancel(total, shared)
        if num.is_zero():
            return RationalFunction._raw(num, ())
        den = dict(kept)
        den.update((f, m) for f, m in lcm.items() if f not in shared)
        return RationalFunction._raw(num, tuple(sorted(den.items())))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Polynomial):
            other = RationalFunction.from_polynomial(other)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return RationalFunction._raw(self.num.scale(other), self.den if other else ())
        if isinstance(other, Polynomial):
            other = RationalFunction.from_polynomial(other)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        if self.nvars != other.nvars:
            raise DimensionMismatch("rational functions over different dimensions")
        merged = dict(self.den)
        for f, m in other.den:
            merged[f] = merged.get(f, 0) + m
        return RationalFunction._from_dict(self.num * other.num, merged)

    __rmul__ = __mul__

    def divide_by_linear(self, form: Sequence) -> "RationalFunction":
        s, monic = normalize_linear(form)
        merged = dict(self.den)
        merged[monic] = merged.get(monic, 0) + 1
        return RationalFunction._from_dict(self.num.scale(1 / s), merged)

    @classmethod
    def _from_dict(cls, num: Polynomial, factors: dict) -> "RationalFunction":
        num, den = _cancel(num, factors)
        return cls._raw(num, den)

    def to_polynomial(self) -> Polynomial:
        if self.den:
            raise NotPolynomial(f"genuine denominator remains: {self}")
        return self.num


def _times_forms(num: Polynomial, target: dict, have: dict) -> Polynomial:
    for f, m in target.items():
        for _ in range(m - have.get(f, 0)):
            num = num * Polynomial.linear(f)
    return num


def _cancel(num: Polynomial, factors: dict) -> tuple[Polynomial, tuple]:
    if num.is_zero():
        return num, ()
    kept = []
    for f in sorted(factors):
        m = factors[f]
        while m:
            q, r = num._divmod_linear(f)
            if r:
                break
            num = q
            m -= 1
        if m:
            kept.append((f, m))
    return num, tuple(kept)


# ---------------------------------------------------------------------------
# Operation-level entry points
# ---------------------------------------------------------------------------

def poly_arith(a: Polynomial, b: Polynomial, op: str) -> Polynomial:
    a._check(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def exact_divide_linear(p: Polynomial, f: Sequence) -> Polynomial:
    return p.divide_linear(f)


def rho_images(eta: Sequence, xi: Sequence) -> list[Polynomial]:
    """Images of the variables under X -> X - <X,xi>/<eta,xi> * eta."""
    denom = pairing(eta, xi)
    if not denom:
        raise ZeroDivisionError("<eta, xi> = 0")
    n = len(eta)
    eta_poly = Polynomial.linear(eta)
    return [Polynomial.variable(n, i) - eta_poly.scale(Fraction(xi[i]) / denom) for i in range(n)]


def rho_project(p: Polynomial, eta: Sequence, xi: Sequence) -> Polynomial:
    return p.substitute(rho_images(eta, xi))


def ratfun_arith(a: RationalFunction, b: RationalFunction, op: str) -> RationalFunction:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def ratfun_to_polynomial(a: RationalFunction) -> Polynomial:
    return a.to_polynomial()
