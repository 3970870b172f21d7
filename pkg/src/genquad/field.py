"""Exact arithmetic in the real quadratic field Q(sqrt(D)) and its ring of integers.

Elements are stored as a + b*sqrt(D) with exact rational a, b, regardless of
whether the integral basis is {1, sqrt(D)} or {1, (1+sqrt(D))/2}.  Every sign
decision (embeddings, total positivity) is made by exact case analysis; no
floating point is used anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Iterable, Literal, Union

from .errors import BudgetExceededError, PreconditionError

Rational = Union[int, Fraction]

#: Default ceiling on the second integral-basis coordinate when searching
#: for the fundamental unit.
DEFAULT_UNIT_CEILING = 10**6

_SQRT_SCALE_BITS = 64


def is_squarefree(n: int) -> bool:
    if n < 1:
        return False
    if n % 4 == 0:
        return False
    p = 3
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 2
    return True


def sqrt_lower(x: Fraction) -> Fraction:
    """A rational lower bound for sqrt(x), x >= 0."""
    if x <= 0:
        return Fraction(0)
    p, q = x.numerator, x.denominator
    return Fraction(isqrt(p * q), q)


def sqrt_upper(x: Fraction) -> Fraction:
    """A rational upper bound for sqrt(x), x >= 0."""
    if x <= 0:
        return Fraction(0)
    p, q = x.numerator, x.denominator
    r = isqrt(p * q)
    if r * r == p * q:
        return Fraction(r, q)
    return Fraction(r + 1, q)


def fraction_sqrt(x: Fraction) -> Fraction | None:
    """The exact rational square root of x, or None if x is not a square."""
    if x < 0:
        return None
    p, q = x.numerator, x.denominator
    rp, rq = isqrt(p), isqrt(q)
    if rp * rp == p and rq * rq == q:
        return Fraction(rp, rq)
    return None


@lru_cache(maxsize=None)
def sqrt_enclosure(d: int) -> tuple[Fraction, Fraction]:
    """A tight rational enclosure (lo, hi) of sqrt(d) with lo <= sqrt(d) <= hi."""
    scale = 1 << _SQRT_SCALE_BITS
    r = isqrt(d * scale * scale)
    return Fraction(r, scale), Fraction(r + 1, scale)


def _sign_a_plus_b_sqrt(a: Fraction, b: Fraction, d: int) -> int:
    # Exact sign of a + b*sqrt(d).  Equality a^2 = d*b^2 is impossible for
    # nonzero b because a squarefree d >= 2 is not a rational square.
    if b == 0:
        return (a > 0) - (a < 0)
    if a == 0:
        return 1 if b > 0 else -1
    sa = 1 if a > 0 else -1
    sb = 1 if b > 0 else -1
    if sa == sb:
        return sa
    return sa if a * a > d * b * b else sb


@dataclass(frozen=True)
class FieldElement:
    """The element a + b*sqrt(d) of Q(sqrt(d)) with exact rational a, b."""

    d: int
    a: Fraction
    b: Fraction

    def __post_init__(self) -> None:
        if not isinstance(self.a, Fraction):
            object.__setattr__(self, "a", Fraction(self.a))
        if not isinstance(self.b, Fraction):
            object.__setattr__(self, "b", Fraction(self.b))

    # -- basic structure -------------------------------------------------

    def _coerce(self, other: object) -> "FieldElement | None":
        if isinstance(other, FieldElement):
            if other.d != self.d:
                raise ValueError(
                    f"cannot mix elements of Q(sqrt({self.d})) and Q(sqrt({other.d}))"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return FieldElement(self.d, Fraction(other), Fraction(0))
        return None

    def conj(self) -> "FieldElement":
        """The image under the nontrivial automorphism a + b*sqrt(d) -> a - b*sqrt(d)."""
        return FieldElement(self.d, self.a, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_rational(self) -> bool:
        return self.b == 0

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other: object) -> "FieldElement":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.d, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other: object) -> "FieldElement":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.d, self.a - o.a, self.b - o.b)

    def __rsub__(self, other: object) -> "FieldElement":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self) -> "FieldElement":
        return FieldElement(self.d, -self.a, -self.b)

    def __mul__(self, other: object) -> "FieldElement":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement(
            self.d,
            self.a * o.a + self.d * self.b * o.b,
            self.a * o.b + self.b * o.a,
        )

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero element")
        return FieldElement(self.d, self.a / n, -self.b / n)

    def __truediv__(self, other: object) -> "FieldElement":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other: object) -> "FieldElement":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, exponent: int) -> "FieldElement":
        if not isinstance(exponent, int):
            return NotImplemented
        base = self
        if exponent < 0:
            base = self.inverse()
            exponent = -exponent
        result = FieldElement(self.d, Fraction(1), Fraction(0))
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    # -- order structure --------------------------------------------------

    def sign_first(self) -> int:
        """Sign under the embedding fixing sqrt(d) to the positive real root."""
        return _sign_a_plus_b_sqrt(self.a, self.b, self.d)

    def sign_second(self) -> int:
        """Sign under the conjugate embedding (sqrt(d) negative)."""
        return _sign_a_plus_b_sqrt(self.a, -self.b, self.d)

    def is_totally_positive(self) -> bool:
        return self.sign_first() > 0 and self.sign_second() > 0

    def is_totally_nonnegative(self) -> bool:
        return self.sign_first() >= 0 and self.sign_second() >= 0

    def is_integral(self) -> bool:
        """Membership in the ring of integers of Q(sqrt(d))."""
        ta, tb = 2 * self.a, 2 * self.b
        if ta.denominator != 1 or tb.denominator != 1:
            return False
        if self.d % 4 == 1:
            return (ta.numerator - tb.numerator) % 2 == 0
        return ta.numerator % 2 == 0 and tb.numerator % 2 == 0

    # -- integral-basis coordinates ----------------------------------------

    def coords(self) -> tuple[Fraction, Fraction]:
        """Coordinates (m, n) in the integral basis {1, w} of the ring of integers."""
        if self.d % 4 == 1:
            return self.a - self.b, 2 * self.b
        return self.a, self.b

    @classmethod
    def from_coords(cls, d: int, m: Rational, n: Rational) -> "FieldElement":
        m, n = Fraction(m), Fraction(n)
        if d % 4 == 1:
            return cls(d, m + n / 2, n / 2)
        return cls(d, m, n)

    # -- rational enclosures of the embeddings ------------------------------

    def emb_bounds(self, first: bool = True) -> tuple[Fraction, Fraction]:
        """A rational interval containing this element's image under one embedding."""
        lo, hi = sqrt_enclosure(self.d)
        b = self.b if first else -self.b
        if b >= 0:
            return self.a + b * lo, self.a + b * hi
        return self.a + b * hi, self.a + b * lo

    # -- text and report formats -------------------------------------------

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        sign = "+" if self.b > 0 else "-"
        return f"{self.a}{sign}{abs(self.b)}s"

    def to_json(self) -> dict[str, str]:
        return {"a": str(self.a), "b": str(self.b)}


def _fundamental_unit_search(d: int, ceiling: int) -> FieldElement:
    # Ascending brute force over the second integral-basis coordinate.  For
    # d = 1 mod 4 solutions of x^2 - d*y^2 = +-4 give units (x + y*sqrt(d))/2;
    # otherwise x^2 - d*y^2 = +-1 gives x + y*sqrt(d).  The first coordinate
    # hit carries the fundamental unit; when both norms admit a solution at
    # the same y (as for d = 5) the smaller x wins.
    half = d % 4 == 1
    target_offsets = (4, -4) if half else (1, -1)
    for y in range(1, ceiling + 1):
        dyy = d * y * y
        best_x: int | None = None
        for off in target_offsets:
            xx = dyy + off
            if xx <= 0:
                continue
            x = isqrt(xx)
            if x * x == xx and (best_x is None or x < best_x):
                best_x = x
        if best_x is not None:
            if half:
                unit = FieldElement(d, Fraction(best_x, 2), Fraction(y, 2))
            else:
                unit = FieldElement(d, Fraction(best_x), Fraction(y))
            assert unit.is_integral()
            assert (unit - 1).sign_first() > 0
            return unit
    raise BudgetExceededError(
        f"no unit of Q(sqrt({d})) found with second coordinate <= {ceiling}"
    )


@dataclass(frozen=True)
class FieldContext:
    """The field Q(sqrt(d)): squarefree d, integral basis kind, fundamental unit."""

    d: int
    basis_kind: Literal["sqrt", "half"]
    fundamental_unit: FieldElement

    @classmethod
    def create(cls, d: int, unit_ceiling: int = DEFAULT_UNIT_CEILING) -> "FieldContext":
        if not isinstance(d, int) or d < 2:
            raise PreconditionError(f"d must be an integer >= 2, got {d!r}")
        if not is_squarefree(d):
            raise PreconditionError(f"d must be squarefree, got {d}")
        basis: Literal["sqrt", "half"] = "half" if d % 4 == 1 else "sqrt"
        unit = _fundamental_unit_search(d, unit_ceiling)
        return cls(d, basis, unit)

    def element(self, a: Rational, b: Rational = 0) -> FieldElement:
        return FieldElement(self.d, Fraction(a), Fraction(b))

    def zero(self) -> FieldElement:
        return self.element(0)

    def one(self) -> FieldElement:
        return self.element(1)

    def sqrt_gen(self) -> FieldElement:
        return self.element(0, 1)

    def basis_gen(self) -> FieldElement:
        """The generator w of the integral basis {1, w}."""
        if self.basis_kind == "half":
            return self.element(Fraction(1, 2), Fraction(1, 2))
        return self.element(0, 1)

    def from_coords(self, m: Rational, n: Rational) -> FieldElement:
        return FieldElement.from_coords(self.d, m, n)


@lru_cache(maxsize=None)
def get_context(d: int, unit_ceiling: int = DEFAULT_UNIT_CEILING) -> FieldContext:
    return FieldContext.create(d, unit_ceiling)


def fundamental_unit(ctx: FieldContext) -> FieldElement:
    """The smallest unit u > 1 of the ring of integers; |N(u)| = 1."""
    return ctx.fundamental_unit


@dataclass(frozen=True)
class TotallyPositiveListing:
    """All totally positive integers with trace up to a bound, sorted by (trace, b)."""

    trace_bound: int
    elements: tuple[FieldElement, ...]


@lru_cache(maxsize=None)
def enumerate_totally_positive(ctx: FieldContext, trace_bound: int) -> TotallyPositiveListing:
    """Exactly the totally positive integers alpha with Tr(alpha) <= trace_bound.

    A totally positive a + b*sqrt(d) has a > 0 and a^2 > d*b^2, so writing
    alpha = (P + Q*sqrt(d))/2 the trace is P and d*Q^2 < P^2 bounds Q.
    """
    if not isinstance(trace_bound, int) or trace_bound < 1:
        raise PreconditionError(f"trace bound must be a positive integer, got {trace_bound!r}")
    d = ctx.d
    half = ctx.basis_kind == "half"
    out: list[FieldElement] = []
    for p in range(1, trace_bound + 1):
        if not half and p % 2 != 0:
            continue
        qmax = isqrt((p * p - 1) // d)
        for q in range(-qmax, qmax + 1):
            if half:
                if (p - q) % 2 != 0:
                    continue
            elif q % 2 != 0:
                continue
            alpha = FieldElement(d, Fraction(p, 2), Fraction(q, 2))
            assert alpha.trace() >= 1
            out.append(alpha)
    return TotallyPositiveListing(trace_bound, tuple(out))


def sqrt_element(x: FieldElement) -> FieldElement | None:
    """An exact square root of x inside Q(sqrt(d)), or None when no root exists there."""
    d = x.d
    if x.is_zero():
        return FieldElement(d, Fraction(0), Fraction(0))
    if x.b == 0:
        s = fraction_sqrt(x.a)
        if s is not None:
            return FieldElement(d, s, Fraction(0))
        t = fraction_sqrt(x.a / d)
        if t is not None:
            return FieldElement(d, Fraction(0), t)
        return None
    # (s + t*sqrt(d))^2 = x forces s^2 to solve u^2 - a*u + d*b^2/4 = 0.
    disc = x.a * x.a - d * x.b * x.b
    root = fraction_sqrt(disc)
    if root is None:
        return None
    for u in ((x.a + root) / 2, (x.a - root) / 2):
        s = fraction_sqrt(u)
        if s is None or s == 0:
            continue
        t = x.b / (2 * s)
        cand = FieldElement(d, s, t)
        if cand * cand == x:
            return cand
    return None


def elements_from_coord_box(
    ctx: FieldContext, coords: Iterable[tuple[int, int]]
) -> list[FieldElement]:
    """Integral elements for the given (m, n) integral-basis coordinates."""
    return [ctx.from_coords(m, n) for m, n in coords]
