"""Text literals for every value the command line accepts.

Grammars::

    steinitz    factor ("*" factor)*          factor: (N | "rest") ["^" (N | "inf")]
    rational    N ["/" N]
    scaled      [rational "*"] steinitz       e.g. "5/4 * 2^inf"
    descriptor  "Fin(" N ")" | "S(inf;" s ")" | "S(" r ";" s ")" | "S+(" r ";" s ")"
                r may also be "sqrt(N)" for S(r; s)
    weights     ["weights:"] rational ("," rational)*
    word        N ":" bits                     (periodic word)
    set         "{" [N ("," N)*] "}"
    matrix      row (";" row)*                 row: rational (" " rational)*
    rule        "default" | term ("*" term)*   term: p ["^" ("i" | Ki | "(" Ki "+" C ")" | C)]

Composite bases are allowed: ``12^inf`` is ``2^inf*3^inf``.  Errors raise
:class:`ParseError` carrying the 0-based character position.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .chains import PowerRule
from .periodic import FiniteSupportSet, PeriodicWord, pw_normalize
from .spectra import Fin, SClosed, SInf, SOpen, sqrt_bound
from .steinitz import INF, ScaledSteinitz, SteinitzNumber, factorize


class ParseError(ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(f"parse error at position {position}: {message}")
        self.position = position
        self.text = text


class _Cursor:
    def __init__(self, text: str, offset: int = 0):
        self.text = text
        self.i = 0
        self.offset = offset

    def ws(self):
        while self.i < len(self.text) and self.text[self.i].isspace():
            self.i += 1

    def peek(self, s: str) -> bool:
        self.ws()
        return self.text.startswith(s, self.i)

    def eat(self, s: str) -> bool:
        if self.peek(s):
            self.i += len(s)
            return True
        return False

    def expect(self, s: str):
        if not self.eat(s):
            self.fail(f"expected {s!r}")

    def fail(self, msg: str):
        raise ParseError(msg, self.offset + self.i, self.text)

    def nat(self) -> int:
        self.ws()
        m = re.compile(r"\d+").match(self.text, self.i)
        if not m:
            self.fail("expected a natural number")
        self.i = m.end()
        return int(m.group())

    def word(self) -> str:
        self.ws()
        m = re.compile(r"[A-Za-z_]+").match(self.text, self.i)
        return m.group() if m else ""

    def done(self):
        self.ws()
        if self.i != len(self.text):
            self.fail(f"unexpected {self.text[self.i]!r}")


def _steinitz(c: _Cursor) -> SteinitzNumber:
    """Listed factors give exceptions (exponents add, inf absorbs); ``rest^e``
    sets the exponent of every unlisted prime."""
    default = None
    exc: dict = {}
    while True:
        start = c.i
        if c.word() == "rest":
            c.eat("rest")
            c.expect("^")
            if default is not None:
                c.i = start
                c.fail("rest given twice")
            default = _exponent(c)
        else:
            n = c.nat()
            if n == 0:
                c.i = start
                c.fail("0 is not a Steinitz factor")
            e = _exponent(c) if c.eat("^") else 1
            if n > 1:
                try:
                    f = factorize(n)
                except ValueError as err:
                    c.i = start
                    c.fail(str(err))
                for p, k in f.items():
                    add = INF if e == INF and k else k * e
                    exc[p] = exc.get(p, 0) + add
        if not c.eat("*"):
            return SteinitzNumber.make(default or 0, exc)


def _exponent(c: _Cursor):
    if c.eat("inf"):
        return INF
    return c.nat()


def _rational(c: _Cursor) -> Fraction:
    a = c.nat()
    if c.eat("/"):
        start = c.i
        b = c.nat()
        if b == 0:
            c.i = start
            c.fail("zero denominator")
        return Fraction(a, b)
    return Fraction(a)


def _run(fn, text: str):
    c = _Cursor(text)
    v = fn(c)
    c.done()
    return v


def parse_steinitz(text: str) -> SteinitzNumber:
    return _run(_steinitz, text)


def parse_rational(text: str) -> Fraction:
    return _run(_rational, text)


def _scaled(c: _Cursor) -> ScaledSteinitz:
    c.ws()
    start = c.i
    m = re.compile(r"\s*(\d+)\s*/\s*(\d+)\s*\*").match(c.text, c.i)
    if m:
        q = _rational(c)
        c.expect("*")
    else:
        q = Fraction(1)
    s = _steinitz(c)
    try:
        return ScaledSteinitz(q, s)
    except ValueError as e:
        c.i = start
        c.fail(str(e))


def parse_scaled(text: str) -> ScaledSteinitz:
    return _run(_scaled, text)


def _descriptor(c: _Cursor):
    c.ws()
    start = c.i
    if c.eat("Fin"):
        c.expect("(")
        n = c.nat()
        c.expect(")")
        return _build(c, start, Fin, n)
    if c.eat("S+"):
        kind = SOpen
    elif c.eat("S"):
        kind = SClosed
    else:
        c.fail("expected Fin(...), S(...) or S+(...)")
    c.expect("(")
    if c.eat("inf"):
        if kind is SOpen:
            c.i = start
            c.fail("S+ needs a rational bound")
        kind, r = SInf, None
    elif c.eat("sqrt"):
        c.expect("(")
        r = sqrt_bound(c.nat())
        c.expect(")")
    else:
        r = _rational(c)
    if not (c.eat(";") or c.eat(",")):
        c.fail("expected ';'")
    s = _steinitz(c)
    c.expect(")")
    return _build(c, start, kind, s) if kind is SInf else _build(c, start, kind, r, s)


def _build(c: _Cursor, start: int, kind, *args):
    try:
        return kind(*args)
    except ValueError as e:
        c.i = start
        c.fail(str(e))


def parse_descriptor(text: str):
    return _run(_descriptor, text)


def parse_weights(text: str) -> list[Fraction]:
    c = _Cursor(text)
    c.eat("weights:")
    out = [_rational(c)]
    while c.eat(","):
        out.append(_rational(c))
    c.done()
    return out


def parse_word(text: str) -> PeriodicWord:
    c = _Cursor(text)
    k = c.nat()
    c.expect(":")
    c.ws()
    m = re.compile(r"[01]+").match(c.text, c.i)
    if not m:
        c.fail("expected a 0/1 string")
    c.i = m.end()
    c.done()
    if k < 1 or len(m.group()) != k:
        raise ParseError(f"bit string must have length {k}", m.start(), text)
    return pw_normalize(k, m.group())


def parse_set(text: str) -> FiniteSupportSet:
    c = _Cursor(text)
    c.expect("{")
    items = []
    if not c.peek("}"):
        items.append(c.nat())
        while c.eat(","):
            items.append(c.nat())
    c.expect("}")
    c.done()
    if 0 in items:
        raise ParseError("elements must be positive", text.index("0"), text)
    return FiniteSupportSet(frozenset(items))


def parse_matrix(text: str):
    from .locmat import RationalMatrix, ShapeError

    rows, pos = [], 0
    for chunk in text.split(";"):
        c = _Cursor(chunk, pos)
        row = []
        c.ws()
        while c.i < len(chunk):
            neg = c.eat("-")
            q = _rational(c)
            row.append(-q if neg else q)
            c.ws()
        if not row:
            c.fail("empty row")
        rows.append(tuple(row))
        pos += len(chunk) + 1
    try:
        return RationalMatrix(tuple(rows))
    except ShapeError as e:
        raise ParseError(str(e), 0, text)


def parse_rule(text: str):
    c = _Cursor(text)
    if c.eat("default"):
        c.done()
        return "default"
    terms = []
    while True:
        start = c.i
        p = c.nat()
        if p < 1:
            c.i = start
            c.fail("rule bases must be positive")
        if not c.eat("^"):
            k, const = 0, 1
        elif c.eat("("):
            k = _coef(c)
            c.expect("+")
            const = c.nat()
            c.expect(")")
        elif c.peek("i"):
            k = _coef(c)
            const = 0
        else:
            n = c.nat()
            if c.peek("i"):
                c.expect("i")
                k, const = n, 0
            else:
                k, const = 0, n
        for q, v in (factorize(p).items() if p > 1 else ()):
            terms.append((q, k * v, const * v))
        if not c.eat("*"):
            break
    c.done()
    merged = {}
    for q, k, const in terms:
        a, b = merged.get(q, (0, 0))
        merged[q] = (a + k, b + const)
    return PowerRule(tuple((q, k, const) for q, (k, const) in sorted(merged.items())))


def _coef(c: _Cursor) -> int:
    c.ws()
    k = c.nat() if c.text[c.i:c.i + 1].isdigit() else 1
    c.expect("i")
    return k


def resolve_rule(rule, s: SteinitzNumber):
    """``"default"`` or ``None`` means the default rule for ``s``."""
    from .chains import default_rule

    if rule is None or rule == "default":
        return default_rule(s)
    return rule


def parse_element(text: str):
    """``stage:bits``, e.g. ``2:0110`` (atom 0 first)."""
    from .chains import ChainElement

    c = _Cursor(text)
    stage = c.nat()
    c.expect(":")
    c.ws()
    m = re.compile(r"[01]*").match(c.text, c.i)
    c.i = m.end()
    c.done()
    mask = sum(1 << i for i, ch in enumerate(m.group()) if ch == "1")
    return ChainElement(stage, mask)


__all__ = [
    "ParseError",
    "parse_descriptor",
    "parse_element",
    "parse_matrix",
    "parse_rational",
    "parse_rule",
    "parse_scaled",
    "parse_set",
    "parse_steinitz",
    "parse_weights",
    "parse_word",
    "resolve_rule",
]
