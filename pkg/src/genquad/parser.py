"""Text formats for field elements and generalized forms.

Element grammar (whitespace-insensitive): R or R+Rs or R-Rs, where R is an
integer or integer/integer and s stands for sqrt(D).  Form grammar: a sum of
signed terms, each an optional coefficient times a degree-two monomial in
atoms z<i> and t(z<i>).  D is always supplied out of band, never in the text.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ParseError
from .field import FieldContext, FieldElement
from .forms import Atom, GeneralizedForm


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self) -> str:
        ch = self.peek()
        if ch:
            self.pos += 1
        return ch

    def expect(self, ch: str) -> None:
        got = self.peek()
        if got != ch:
            shown = got if got else "end of input"
            raise ParseError(f"expected {ch!r}, found {shown!r}", self.pos)
        self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def integer(self) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            found = self.text[start] if start < len(self.text) else "end of input"
            raise ParseError(f"malformed rational: expected digits, found {found!r}", start)
        return int(self.text[start:self.pos])

    def rational(self, allow_sign: bool) -> Fraction:
        self.skip_ws()
        sign = 1
        if allow_sign and self.peek() == "-":
            self.pos += 1
            sign = -1
        num = self.integer()
        if self.peek() == "/":
            self.pos += 1
            den_pos = self.pos
            den = self.integer()
            if den == 0:
                raise ParseError("zero denominator", den_pos)
            return Fraction(sign * num, den)
        return Fraction(sign * num)


def _element_body(sc: _Scanner, d: int) -> FieldElement:
    a = sc.rational(allow_sign=True)
    ch = sc.peek()
    if ch in "+-":
        sc.pos += 1
        b = sc.rational(allow_sign=False)
        if ch == "-":
            b = -b
        sc.expect("s")
        return FieldElement(d, a, b)
    return FieldElement(d, a, Fraction(0))


def parse_element(text: str, ctx: FieldContext) -> FieldElement:
    """Parse an element literal; round-trips with str() on the element."""
    sc = _Scanner(text)
    value = _element_body(sc, ctx.d)
    if not sc.at_end():
        raise ParseError(f"trailing garbage {sc.peek()!r}", sc.pos)
    return value


def format_element(x: FieldElement) -> str:
    return str(x)


def _atom(sc: _Scanner) -> Atom:
    sc.skip_ws()
    pos = sc.pos
    ch = sc.peek()
    if ch == "t":
        sc.pos += 1
        sc.expect("(")
        sc.skip_ws()
        if sc.peek() != "z":
            raise ParseError("expected a variable inside t(...)", sc.pos)
        sc.pos += 1
        idx_pos = sc.pos
        idx = sc.integer()
        if idx == 0:
            raise ParseError("variable index 0 is not allowed", idx_pos)
        sc.expect(")")
        return Atom(idx, True)
    if ch == "z":
        sc.pos += 1
        idx_pos = sc.pos
        idx = sc.integer()
        if idx == 0:
            raise ParseError("variable index 0 is not allowed", idx_pos)
        return Atom(idx, False)
    shown = ch if ch else "end of input"
    raise ParseError(f"unknown token {shown!r}", pos)


def _term(sc: _Scanner, d: int) -> tuple[Atom, Atom, FieldElement]:
    sc.skip_ws()
    ch = sc.peek()
    coeff = FieldElement(d, Fraction(1), Fraction(0))
    if ch == "(":
        sc.pos += 1
        coeff = _element_body(sc, d)
        sc.expect(")")
        sc.expect("*")
    elif ch.isdigit():
        coeff = FieldElement(d, sc.rational(allow_sign=False), Fraction(0))
        sc.expect("*")
    first = _atom(sc)
    nxt = sc.peek()
    if nxt == "^":
        sc.pos += 1
        sc.skip_ws()
        exp_pos = sc.pos
        exp = sc.integer()
        if exp != 2:
            raise ParseError("monomials must be quadratic: only ^2 is allowed", exp_pos)
        second = first
    elif nxt == "*":
        sc.pos += 1
        second = _atom(sc)
    else:
        raise ParseError("monomial of degree one: expected '^2' or '*atom'", sc.pos)
    if sc.peek() == "*":
        raise ParseError("monomial degree exceeds 2", sc.pos)
    return first, second, coeff


def parse_form(text: str, ctx: FieldContext) -> GeneralizedForm:
    """Parse a form literal into a coefficient map with like terms combined."""
    sc = _Scanner(text)
    terms: list[tuple[Atom, Atom, FieldElement]] = []
    max_var = 0
    first = True
    while True:
        sc.skip_ws()
        if sc.at_end():
            if first:
                raise ParseError("empty form", sc.pos)
            break
        sign = 1
        ch = sc.peek()
        if ch == "+":
            sc.pos += 1
        elif ch == "-":
            sc.pos += 1
            sign = -1
        elif not first:
            raise ParseError(f"expected '+' or '-', found {ch!r}", sc.pos)
        x, y, coeff = _term(sc, ctx.d)
        if sign < 0:
            coeff = -coeff
        terms.append((x, y, coeff))
        max_var = max(max_var, x.var, y.var)
        first = False
    return GeneralizedForm.from_terms(ctx, max_var, terms)


def _coeff_prefix(c: FieldElement) -> tuple[str, str]:
    """Term sign and coefficient text for canonical printing."""
    if c.b == 0:
        sign = "-" if c.a < 0 else "+"
        mag = abs(c.a)
        return sign, "" if mag == 1 else f"{mag}*"
    return "+", f"({c})*"


def format_form(g: GeneralizedForm) -> str:
    items = g.sorted_items()
    if not items:
        return f"0*z{g.r}^2"
    pieces: list[str] = []
    for (x, y), c in items:
        sign, coeff_text = _coeff_prefix(c)
        mono = f"{x.text()}^2" if x == y else f"{x.text()}*{y.text()}"
        if not pieces:
            prefix = "-" if sign == "-" else ""
            pieces.append(f"{prefix}{coeff_text}{mono}")
        else:
            pieces.append(f"{sign} {coeff_text}{mono}")
    return " ".join(pieces)
