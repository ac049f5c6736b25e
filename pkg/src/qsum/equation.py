"""Equation model, text-DSL front end and JSON serialization.

An equation is   sum_{j + delta*|alpha| <= m} a_{j,alpha}(t,z) * S^j Dz^alpha X = F(t,z)
where S is the q-shift (S f)(t,z) = f(q t, z) and Dz^alpha the mixed
z-derivative.  delta is kept as an exact rational so the weighted-order
constraint is decidable without floating-point ties.
"""

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction

from . import dsl
from .errors import NotAUnitError, ParseError, SchemaError
from .series import TruncatedSeries, divide


@dataclass(frozen=True)
class Term:
    j: int
    alpha: tuple
    coeff: TruncatedSeries


@dataclass(frozen=True)
class Equation:
    q: float
    delta: Fraction
    m: int
    d: int
    terms: tuple
    rhs: TruncatedSeries
    R: float = 1.0

    @property
    def Kt(self):
        return self.rhs.Kt

    @property
    def Kz(self):
        return self.rhs.Kz

    def term_map(self):
        return {(t.j, t.alpha): t for t in self.terms}

    def with_rhs(self, rhs):
        return Equation(self.q, self.delta, self.m, self.d, self.terms, rhs, self.R)

    def max_coeff_t_degree(self):
        return max((t.coeff.t_degree() for t in self.terms), default=-1)

    def max_alpha(self):
        return max((sum(t.alpha) for t in self.terms), default=0)


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def __str__(self):
        lines = ["valid" if self.ok else "invalid"]
        lines += ["violation: " + v for v in self.violations]
        lines += ["warning: " + w for w in self.warnings]
        return "\n".join(lines)


def validate(eq):
    """Structural constraint report; empty violations means valid."""
    rep = ValidationReport()
    if not eq.q > 1.0:
        rep.violations.append("q must exceed 1 (got %r)" % eq.q)
    if not eq.delta > 0:
        rep.violations.append("delta must be positive (got %s)" % eq.delta)
    if eq.m < 1:
        rep.violations.append("m must be a positive integer (got %r)" % eq.m)
    if eq.d < 0:
        rep.violations.append("d must be nonnegative (got %r)" % eq.d)
    if not eq.R > 0:
        rep.violations.append("polydisc radius R must be positive")
    seen = set()
    for idx, term in enumerate(eq.terms):
        label = "term %d (j=%d, alpha=%s)" % (idx, term.j, list(term.alpha))
        if term.j < 0:
            rep.violations.append(label + ": shift power j must be nonnegative")
        if len(term.alpha) != eq.d:
            rep.violations.append(label + ": alpha length differs from d")
        if any(a < 0 for a in term.alpha):
            rep.violations.append(label + ": alpha entries must be nonnegative")
        weight = term.j + eq.delta * sum(term.alpha)
        if weight > eq.m:
            rep.violations.append(label + ": weighted order %s exceeds m=%d" % (weight, eq.m))
        if (term.j, term.alpha) in seen:
            rep.violations.append(label + ": duplicate (j, alpha) pair")
        seen.add((term.j, term.alpha))
        if term.coeff.d != eq.d:
            rep.violations.append(label + ": coefficient has wrong z-dimension")
        elif term.coeff.is_zero():
            rep.warnings.append(label + ": coefficient is the zero truncation (order undetermined)")
    if not eq.terms and eq.rhs.is_zero():
        rep.warnings.append("degenerate equation: no terms and zero right-hand side")
    if eq.rhs.d != eq.d:
        rep.violations.append("rhs has wrong z-dimension")
    return rep


# ------------------------------------------------------------------ DSL parsing

def parse_equation(text, Kt=24, Kz=8):
    """Parse the DSL form

        q=<real>; delta=<rational>; m=<int>; d=<int>; eq: <sum> = <expr>

    where each summand is a product of expression factors and exactly one
    operator factor S^j [Dz<k>^<int> ...](X).
    """
    cur = dsl._Cursor(dsl.tokenize(text))

    def header_field(name):
        tok = cur.peek()
        if tok.text != name:
            cur.error("expected header field %r" % name)
        cur.next()
        cur.expect("=")

    header_field("q")
    q = dsl.parse_number(cur)
    cur.expect(";")
    header_field("delta")
    delta = dsl.parse_rational(cur)
    cur.expect(";")
    header_field("m")
    m = dsl.parse_int(cur, "for m")
    cur.expect(";")
    header_field("d")
    d = dsl.parse_int(cur, "for d")
    cur.expect(";")
    tok = cur.peek()
    if tok.text != "eq":
        cur.error("expected 'eq:'")
    cur.next()
    cur.expect(":")

    if q <= 1.0:
        raise ParseError("q must exceed 1 (got %r)" % q, tok.line, tok.col)
    if delta <= 0:
        raise ParseError("delta must be positive (got %s)" % delta, tok.line, tok.col)

    expr = dsl.ExprParser(cur, d, Kt, Kz, q=q)
    merged = {}

    def parse_operator_factor():
        """S^j Dz<k>^<n> ... (X)  ->  (j, alpha)"""
        cur.expect("S")
        cur.expect("^")
        j = dsl.parse_int(cur, "shift power")
        alpha = [0] * d
        while cur.peek().kind == "name" and re.fullmatch(r"Dz\d+", cur.peek().text):
            tok = cur.next()
            axis = int(tok.text[2:])
            if not 1 <= axis <= d:
                raise ParseError("derivative axis z%d out of range for d=%d" % (axis, d), tok.line, tok.col)
            cur.expect("^")
            alpha[axis - 1] += dsl.parse_int(cur, "derivative order")
        cur.expect("(")
        tok = cur.peek()
        if tok.text != "X":
            cur.error("expected the unknown X")
        cur.next()
        cur.expect(")")
        return j, tuple(alpha)

    def looks_like_operator():
        tok = cur.peek()
        return tok.kind == "name" and tok.text == "S"

    sign = 1.0
    while True:
        # one summand: factors joined by '*' or '/', exactly one operator factor
        tok0 = cur.peek()
        while cur.peek().text in ("+", "-"):
            if cur.next().text == "-":
                sign = -sign
        coeff = TruncatedSeries.const(sign, d, Kt, Kz)
        op = None
        pending = "*"
        while True:
            if looks_like_operator():
                if op is not None:
                    cur.error("summand contains two operator factors")
                if pending == "/":
                    cur.error("cannot divide by an operator factor")
                op = parse_operator_factor()
            else:
                tok = cur.peek()
                f = expr.parse_factor()
                if pending == "*":
                    coeff = coeff * f
                else:
                    try:
                        coeff = divide(coeff, f)
                    except NotAUnitError:
                        raise ParseError("division by a series with zero constant term", tok.line, tok.col)
            if cur.peek().text in ("*", "/"):
                pending = cur.next().text
                continue
            break
        if op is None:
            raise ParseError("summand has no operator factor S^j(...)", tok0.line, tok0.col)
        j, alpha = op
        weight = j + delta * sum(alpha)
        if weight > m:
            raise ParseError(
                "weighted order %s of term S^%d alpha=%s exceeds m=%d" % (weight, j, list(alpha), m),
                tok0.line, tok0.col)
        key = (j, alpha)
        merged[key] = merged.get(key, TruncatedSeries.zero(d, Kt, Kz)) + coeff
        nxt = cur.peek().text
        if nxt in ("+", "-"):
            cur.next()
            sign = 1.0 if nxt == "+" else -1.0
            continue
        break

    cur.expect("=")
    rhs = expr.parse_expr()
    tok = cur.peek()
    if tok.kind != "eof":
        raise ParseError("trailing input %r" % tok.text, tok.line, tok.col)

    terms = tuple(Term(j, alpha, coeff) for (j, alpha), coeff in sorted(merged.items()) if not coeff.is_zero())
    eq = Equation(q, delta, m, d, terms, rhs)
    report = validate(eq)
    if not report.ok:
        raise ParseError("; ".join(report.violations))
    return eq


def equation_to_dsl(eq):
    """Canonical DSL emission; parse(equation_to_dsl(eq)) is structurally eq."""
    parts = []
    for term in eq.terms:
        ops = "S^%d" % term.j
        for axis, a in enumerate(term.alpha, start=1):
            if a:
                ops += " Dz%d^%d" % (axis, a)
        parts.append("(%s)*%s(X)" % (dsl.format_series(term.coeff), ops))
    lhs = " + ".join(parts) if parts else "(0)*S^0(X)"
    return "q=%r; delta=%s; m=%d; d=%d; eq: %s = %s" % (
        eq.q,
        "%d/%d" % (eq.delta.numerator, eq.delta.denominator),
        eq.m, eq.d, lhs, dsl.format_series(eq.rhs))


# ------------------------------------------------------------------ JSON

def _series_to_rows(s):
    return [[n, list(beta), c.real, c.imag] for (n, beta), c in s.items()]


def _series_from_rows(rows, d, Kt, Kz, pointer):
    if not isinstance(rows, list):
        raise SchemaError("expected a coefficient array", pointer)
    coeffs = {}
    for i, row in enumerate(rows):
        p = "%s/%d" % (pointer, i)
        if not (isinstance(row, list) and len(row) == 4):
            raise SchemaError("coefficient row must be [n, beta, re, im]", p)
        n, beta, re_, im = row
        if not isinstance(n, int) or n < 0:
            raise SchemaError("t-exponent must be a nonnegative integer", p + "/0")
        if not (isinstance(beta, list) and len(beta) == d and all(isinstance(b, int) and b >= 0 for b in beta)):
            raise SchemaError("beta must be a list of %d nonnegative integers" % d, p + "/1")
        if not all(isinstance(x, (int, float)) for x in (re_, im)):
            raise SchemaError("coefficient parts must be numbers", p + "/2")
        coeffs[(n, tuple(beta))] = complex(re_, im)
    return TruncatedSeries(d, Kt, Kz, coeffs)


def to_json(eq):
    doc = {
        "q": eq.q,
        "delta": {"num": eq.delta.numerator, "den": eq.delta.denominator},
        "m": eq.m,
        "d": eq.d,
        "Kt": eq.Kt,
        "Kz": eq.Kz,
        "R": eq.R,
        "terms": [
            {"j": t.j, "alpha": list(t.alpha), "coeff": _series_to_rows(t.coeff)}
            for t in eq.terms
        ],
        "rhs": _series_to_rows(eq.rhs),
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def _require(doc, key, pointer=""):
    if key not in doc:
        raise SchemaError("required field %r missing" % key, pointer + "/" + key)
    return doc[key]


def from_json(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("invalid JSON: %s" % exc)
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object")
    q = _require(doc, "q")
    if not isinstance(q, (int, float)) or not q > 1.0:
        raise SchemaError("q must be a number greater than 1", "/q")
    delta_doc = _require(doc, "delta")
    if not (isinstance(delta_doc, dict) and isinstance(delta_doc.get("num"), int)
            and isinstance(delta_doc.get("den"), int) and delta_doc["den"] != 0):
        raise SchemaError("delta must be {num, den} with integer entries", "/delta")
    delta = Fraction(delta_doc["num"], delta_doc["den"])
    if delta <= 0:
        raise SchemaError("delta must be positive", "/delta")
    m = _require(doc, "m")
    if not isinstance(m, int) or m < 1:
        raise SchemaError("m must be a positive integer", "/m")
    d = _require(doc, "d")
    if not isinstance(d, int) or d < 0:
        raise SchemaError("d must be a nonnegative integer", "/d")
    Kt = _require(doc, "Kt")
    Kz = _require(doc, "Kz")
    if not (isinstance(Kt, int) and Kt >= 1 and isinstance(Kz, int) and Kz >= 1):
        raise SchemaError("Kt and Kz must be positive integers", "/Kt")
    R = doc.get("R", 1.0)
    if not isinstance(R, (int, float)) or not R > 0:
        raise SchemaError("R must be a positive number", "/R")
    terms_doc = _require(doc, "terms")
    if not isinstance(terms_doc, list):
        raise SchemaError("terms must be an array", "/terms")
    terms = []
    seen = set()
    for i, td in enumerate(terms_doc):
        p = "/terms/%d" % i
        if not isinstance(td, dict):
            raise SchemaError("term must be an object", p)
        j = _require(td, "j", p)
        if not isinstance(j, int) or j < 0:
            raise SchemaError("j must be a nonnegative integer", p + "/j")
        alpha = _require(td, "alpha", p)
        if not (isinstance(alpha, list) and len(alpha) == d
                and all(isinstance(a, int) and a >= 0 for a in alpha)):
            raise SchemaError("alpha must be a list of %d nonnegative integers" % d, p + "/alpha")
        alpha = tuple(alpha)
        if j + delta * sum(alpha) > m:
            raise SchemaError("weighted order exceeds m", p)
        if (j, alpha) in seen:
            raise SchemaError("duplicate (j, alpha) pair", p)
        seen.add((j, alpha))
        coeff = _series_from_rows(_require(td, "coeff", p), d, Kt, Kz, p + "/coeff")
        terms.append(Term(j, alpha, coeff))
    rhs = _series_from_rows(_require(doc, "rhs"), d, Kt, Kz, "/rhs")
    terms.sort(key=lambda t: (t.j, t.alpha))
    return Equation(float(q), delta, m, d, tuple(terms), rhs, float(R))
