"""Rational lower bounds for definite forms and unit scaling of targets.

A delta certificate pins a positive rational delta with Q - delta*(sum of
squared variables) totally positive semidefinite, verified by the exact
elimination test in both embeddings.  Eigenvalues are never computed; delta
is bracketed to within a factor of two by binary search.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import BudgetExceededError, PreconditionError
from .field import FieldContext, FieldElement, sqrt_enclosure
from .forms import (
    Definiteness,
    GeneralizedForm,
    QuadraticForm,
    _is_totally_psd_gram,
    associated_form,
    classify_definiteness,
)

_MAX_BISECTIONS = 64


@dataclass(frozen=True)
class DeltaCertificate:
    """A verified floor: form - delta * (sum of squares) is totally PSD."""

    delta: Fraction
    form: QuadraticForm
    iterations: int

    def to_json(self) -> dict[str, object]:
        return {"delta": str(self.delta), "iterations": self.iterations}


def floor_holds(q: QuadraticForm, delta: Fraction) -> bool:
    """Exact check that q - delta*(x_1^2 + ... + x_n^2) is totally PSD."""
    shift = q.ctx.element(delta)
    m = q.gram()
    for i in range(q.n):
        m[i][i] = m[i][i] - shift
    return _is_totally_psd_gram(m)


def _diagonal_upper_bound(q: QuadraticForm) -> Fraction:
    # A rational upper bound for the smallest diagonal Gram entry over both
    # embeddings; the least eigenvalue never exceeds it in either embedding.
    lo, _ = sqrt_enclosure(q.ctx.d)
    best: Fraction | None = None
    for i in range(1, q.n + 1):
        c = q.coefficient(i, i)
        bound = c.a - abs(c.b) * lo
        if best is None or bound < best:
            best = bound
    assert best is not None
    return best


def delta_lower_bound(q: QuadraticForm) -> DeltaCertificate:
    """A positive rational delta, within a factor two of the best possible."""
    if q.n < 1:
        raise PreconditionError("cannot certify a form with no variables")
    if classify_definiteness(q) is not Definiteness.DEFINITE:
        raise PreconditionError("delta certificates exist only for totally positive definite forms")
    hi = _diagonal_upper_bound(q)
    iterations = 1
    if floor_holds(q, hi):
        return DeltaCertificate(hi, q, iterations)
    lo = Fraction(0)
    for _ in range(_MAX_BISECTIONS):
        mid = (lo + hi) / 2
        iterations += 1
        if floor_holds(q, mid):
            lo = mid
        else:
            hi = mid
        if lo > 0 and hi <= 2 * lo:
            break
    if lo <= 0:
        raise BudgetExceededError("bisection budget exhausted without a positive floor")
    return DeltaCertificate(lo, q, iterations)


def generalized_delta(g: GeneralizedForm) -> DeltaCertificate:
    """The certificate of the associated quadratic form of g.

    For integral points with a nonzero proper variable this floor bounds the
    value of g itself from below by delta, in both embeddings, because the
    squared column pair of that variable contributes a rational trace >= 1.
    """
    assoc = associated_form(g)
    if classify_definiteness(assoc.q) is not Definiteness.DEFINITE:
        raise PreconditionError("generalized form is not totally positive definite")
    return delta_lower_bound(assoc.q)


@dataclass(frozen=True)
class ScaledTarget:
    """alpha scaled by the square of a unit so that beta sits below delta."""

    alpha: FieldElement
    epsilon: FieldElement
    n: int
    beta: FieldElement


def unit_scale_down(
    ctx: FieldContext, alpha: FieldElement, delta: Fraction | int
) -> ScaledTarget:
    """The minimal n >= 0 with u^(-2n) * alpha < delta in the first embedding.

    Termination is guaranteed because the fundamental unit u exceeds 1, so
    u^(-2) shrinks the first embedding strictly.
    """
    delta = Fraction(delta)
    if delta <= 0:
        raise PreconditionError("delta must be positive")
    if alpha.d != ctx.d:
        raise ValueError("alpha belongs to a different field")
    if not alpha.is_totally_positive():
        raise PreconditionError("alpha must be totally positive")
    unit_inv = ctx.fundamental_unit.inverse()
    shrink = unit_inv * unit_inv
    bound = ctx.element(delta)
    beta = alpha
    epsilon = ctx.one()
    n = 0
    while (bound - beta).sign_first() <= 0:
        beta = beta * shrink
        epsilon = epsilon * unit_inv
        n += 1
    return ScaledTarget(alpha, epsilon, n, beta)
