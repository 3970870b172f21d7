"""Decision procedures for representation and universality questions.

The complete search for totally positive definite forms rests on a delta
certificate: every column square of a solution is bounded by target/delta,
which confines the integral-basis coordinates of each variable to a finite
box.  That box shrinks as coordinates are assigned, the last single-atom
variable is solved exactly as a quadratic, and the first witness in
lexicographic coordinate order is reported.  Semidefinite forms get only a
height-bounded search that never claims completeness.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Literal, Sequence, Union

from .analysis import DeltaCertificate
from .errors import ContractFailure, PreconditionError
from .field import (
    FieldContext,
    FieldElement,
    enumerate_totally_positive,
    sqrt_element,
    sqrt_enclosure,
    sqrt_upper,
)
from .forms import (
    Atom,
    Definiteness,
    GeneralizedForm,
    QuadraticForm,
    associated_form,
    classify_generalized,
)

FormLike = Union[QuadraticForm, GeneralizedForm]
CoordBox = tuple[int, int, int, int]


@dataclass(frozen=True)
class RepresentationWitness:
    """An integral assignment together with the value it produces."""

    assignment: tuple[FieldElement, ...]
    value: FieldElement


def make_witness(
    form: GeneralizedForm, assignment: Sequence[FieldElement], expected: FieldElement
) -> RepresentationWitness:
    value = form.evaluate(list(assignment))
    if value != expected:
        raise ContractFailure(
            f"witness evaluates to {value}, expected {expected}"
        )
    return RepresentationWitness(tuple(assignment), value)


@dataclass(frozen=True)
class SearchVerdict:
    status: Literal["found", "none_complete", "none_within_height"]
    witness: RepresentationWitness | None = None
    height: int | None = None
    box: tuple[CoordBox, ...] | None = None

    @property
    def found(self) -> bool:
        return self.status == "found"


@dataclass(frozen=True)
class UniversalityReport:
    trace_bound: int
    checked: int
    failures: tuple[tuple[FieldElement, SearchVerdict], ...]


@dataclass(frozen=True)
class IndecomposableListing:
    trace_bound: int
    elements: tuple[FieldElement, ...]


@dataclass(frozen=True)
class DefiniteStrategy:
    cert: DeltaCertificate


@dataclass(frozen=True)
class BoundedStrategy:
    height: int


Strategy = Union[DefiniteStrategy, BoundedStrategy, Callable[[GeneralizedForm, FieldElement], SearchVerdict]]


def _as_generalized(f: FormLike) -> GeneralizedForm:
    return f.as_generalized() if isinstance(f, QuadraticForm) else f


def _int_coords(x: FieldElement) -> tuple[int, int]:
    m, n = x.coords()
    return int(m), int(n)


def _integral_candidates(
    ctx: FieldContext, cap: FieldElement, plain: bool, conj: bool
) -> list[tuple[int, int, FieldElement]]:
    """Exactly the integral z with z^2 below cap for each required flag.

    A plain occurrence requires z^2 <= cap (totally); a conjugated occurrence
    is equivalent to z^2 <= conj(cap).  Rational enclosures only accelerate
    the enumeration; membership is decided exactly, so the returned set does
    not depend on enclosure precision.
    """
    d = ctx.d
    constraints = []
    if plain:
        constraints.append(cap)
    if conj:
        constraints.append(cap.conj())
    for limit in constraints:
        if not limit.is_totally_nonnegative():
            return []
    u1 = min(limit.emb_bounds(True)[1] for limit in constraints)
    u2 = min(limit.emb_bounds(False)[1] for limit in constraints)
    s1 = sqrt_upper(u1) if u1 > 0 else Fraction(0)
    s2 = sqrt_upper(u2) if u2 > 0 else Fraction(0)
    lo_d, hi_d = sqrt_enclosure(d)
    q_bound = math.floor((s1 + s2) / lo_d)

    # Integer filter data: with limit = (A + B*sqrt(d)) / (4L), candidate
    # z = (P + Q*sqrt(d))/2 passes iff A - L(P^2+dQ^2) + (B - 2LPQ)sqrt(d) >= 0
    # in both embeddings.
    filters: list[tuple[int, int, int]] = []
    for limit in constraints:
        scale = math.lcm(limit.a.denominator, limit.b.denominator)
        filters.append(
            (int(limit.a * 4 * scale), int(limit.b * 4 * scale), scale)
        )

    sqrt_basis = ctx.basis_kind == "sqrt"
    out: list[tuple[int, int, FieldElement]] = []
    for q in range(-q_bound, q_bound + 1):
        if sqrt_basis and q % 2 != 0:
            continue
        mul_pos = lo_d if q >= 0 else hi_d
        mul_neg = hi_d if q >= 0 else lo_d
        p_hi = math.floor(min(2 * s1 - q * mul_pos, 2 * s2 + q * mul_neg))
        p_lo = math.ceil(max(-2 * s1 - q * mul_neg, -2 * s2 + q * mul_pos))
        parity = 0 if sqrt_basis else q % 2
        p = p_lo if p_lo % 2 == parity % 2 else p_lo + 1
        while p <= p_hi:
            ok = True
            for a_num, b_num, scale in filters:
                x = a_num - scale * (p * p + d * q * q)
                y = b_num - 2 * scale * p * q
                if x < 0 or (y != 0 and x * x < d * y * y):
                    ok = False
                    break
            if ok:
                if sqrt_basis:
                    m, n = p // 2, q // 2
                else:
                    m, n = (p - q) // 2, q
                out.append((m, n, FieldElement(d, Fraction(p, 2), Fraction(q, 2))))
            p += 2
    out.sort(key=lambda item: (item[0], item[1]))
    return out


def _box_of(cands: list[tuple[int, int, FieldElement]]) -> CoordBox:
    if not cands:
        return (0, -1, 0, -1)
    ms = [c[0] for c in cands]
    ns = [c[1] for c in cands]
    return (min(ms), max(ms), min(ns), max(ns))


class _CompleteSearch:
    """Depth-first certified search over one definite generalized form."""

    def __init__(self, g: GeneralizedForm, alpha: FieldElement, delta: Fraction):
        self.g = g
        self.ctx = g.ctx
        self.alpha = alpha
        self.delta = delta
        r = g.r
        self.plain = [False] * (r + 1)
        self.conj = [False] * (r + 1)
        for atom in g.atoms():
            if atom.conj:
                self.conj[atom.var] = True
            else:
                self.plain[atom.var] = True
        self.buckets: list[list[tuple[Atom, Atom, FieldElement]]] = [[] for _ in range(r + 1)]
        for (x, y), c in g.coeffs.items():
            self.buckets[max(x.var, y.var)].append((x, y, c))
        self.values: list[FieldElement | None] = [None] * (r + 1)
        self.conj_values: list[FieldElement | None] = [None] * (r + 1)
        self.cap0 = alpha / delta

    def _candidates(self, k: int, colsq: FieldElement) -> list[tuple[int, int, FieldElement]]:
        if not self.plain[k] and not self.conj[k]:
            return [(0, 0, self.ctx.zero())]
        return _integral_candidates(self.ctx, self.cap0 - colsq, self.plain[k], self.conj[k])

    def initial_box(self) -> tuple[CoordBox, ...]:
        zero = self.ctx.zero()
        return tuple(_box_of(self._candidates(k, zero)) for k in range(1, self.g.r + 1))

    def _atom_value(self, atom: Atom, k: int, z: FieldElement, zc: FieldElement) -> FieldElement:
        if atom.var == k:
            return zc if atom.conj else z
        stored = self.conj_values[atom.var] if atom.conj else self.values[atom.var]
        assert stored is not None
        return stored

    def _solve_last(self, k: int, const: FieldElement) -> bool:
        # Single-atom final variable: the remaining equation is an honest
        # quadratic over the field, solved exactly instead of enumerated.
        atom = Atom(k, self.conj[k])
        c2 = self.ctx.zero()
        lin = self.ctx.zero()
        for x, y, c in self.buckets[k]:
            if x.var == k and y.var == k:
                c2 = c2 + c
            elif x.var == k:
                lin = lin + c * self._atom_value(y, k, self.ctx.zero(), self.ctx.zero())
            else:
                lin = lin + c * self._atom_value(x, k, self.ctx.zero(), self.ctx.zero())
        if c2.is_zero():
            return self._enumerate_level(k, const, self._final_colsq_unused())
        disc = lin * lin - c2 * (const - self.alpha) * 4
        root = sqrt_element(disc)
        if root is None:
            return False
        denom = c2 * 2
        roots = {(-lin + root) / denom, (-lin - root) / denom}
        zs = []
        for t in roots:
            z = t.conj() if atom.conj else t
            if z.is_integral():
                zs.append(z)
        zs.sort(key=_int_coords)
        for z in zs:
            zc = z.conj()
            t = zc if atom.conj else z
            if c2 * t * t + lin * t + const == self.alpha:
                self.values[k], self.conj_values[k] = z, zc
                return True
        return False

    def _final_colsq_unused(self) -> FieldElement:
        # Placeholder colsq for the degenerate fallback; a missing square
        # coefficient cannot occur for definite forms, where every appearing
        # atom carries a positive diagonal entry.
        return self.ctx.zero()

    def _enumerate_level(self, k: int, const: FieldElement, colsq: FieldElement) -> bool:
        for _, _, z in self._candidates(k, colsq):
            zc = z.conj()
            total = const
            for x, y, c in self.buckets[k]:
                total = total + c * self._atom_value(x, k, z, zc) * self._atom_value(y, k, z, zc)
            new_colsq = colsq
            if self.plain[k]:
                new_colsq = new_colsq + z * z
            if self.conj[k]:
                new_colsq = new_colsq + zc * zc
            self.values[k], self.conj_values[k] = z, zc
            if self._descend(k + 1, total, new_colsq):
                return True
        return False

    def _descend(self, k: int, const: FieldElement, colsq: FieldElement) -> bool:
        if k > self.g.r:
            return const == self.alpha
        if (
            k == self.g.r
            and self.plain[k] != self.conj[k]
            and any(x.var == k and y.var == k for x, y, _ in self.buckets[k])
        ):
            return self._solve_last(k, const)
        return self._enumerate_level(k, const, colsq)

    def run(self) -> tuple[list[FieldElement] | None, tuple[CoordBox, ...]]:
        box = self.initial_box()
        zero = self.ctx.zero()
        if self._descend(1, zero, zero):
            found = [v for v in self.values[1:]]
            assert all(v is not None for v in found)
            return found, box  # type: ignore[return-value]
        return None, box


def represent_definite(
    f: FormLike, alpha: FieldElement, cert: DeltaCertificate
) -> SearchVerdict:
    """Complete representation decision for a totally positive definite form."""
    g = _as_generalized(f)
    if not g.is_integral():
        raise PreconditionError("form must be integral")
    if not (alpha.is_integral() and alpha.is_totally_positive()):
        raise PreconditionError("target must be a totally positive integer")
    if classify_generalized(g) is not Definiteness.DEFINITE:
        raise PreconditionError("form is not totally positive definite; use the bounded search")
    if cert.form != associated_form(g).q:
        raise PreconditionError("certificate was issued for a different form")
    engine = _CompleteSearch(g, alpha, cert.delta)
    assignment, box = engine.run()
    if assignment is None:
        return SearchVerdict("none_complete", box=box)
    witness = make_witness(g, assignment, alpha)
    return SearchVerdict("found", witness=witness, box=box)


class _EmbMinMax:
    """Extremes of a value list under each embedding, kept as field elements."""

    def __init__(self, values: list[FieldElement]):
        first = values[0]
        self.lo1 = self.hi1 = first
        self.lo2 = self.hi2 = first
        for v in values[1:]:
            if (v - self.lo1).sign_first() < 0:
                self.lo1 = v
            if (v - self.hi1).sign_first() > 0:
                self.hi1 = v
            if (v - self.lo2).sign_second() < 0:
                self.lo2 = v
            if (v - self.hi2).sign_second() > 0:
                self.hi2 = v


def represent_bounded(f: FormLike, alpha: FieldElement, height: int) -> SearchVerdict:
    """Exhaustive search over integral-basis coordinates of absolute value <= height.

    Applicable to semidefinite forms, which admit no a priori bounding box;
    the verdict therefore never claims completeness.
    """
    g = _as_generalized(f)
    if not isinstance(height, int) or height < 1:
        raise PreconditionError("height must be a positive integer")
    if not g.is_integral():
        raise PreconditionError("form must be integral")
    if not (alpha.is_integral() and alpha.is_totally_positive()):
        raise PreconditionError("target must be a totally positive integer")
    if classify_generalized(g) is Definiteness.INDEFINITE:
        raise PreconditionError("form is not totally positive semidefinite")
    ctx = g.ctx
    r = g.r
    cands = [
        ctx.from_coords(m, n)
        for m in range(-height, height + 1)
        for n in range(-height, height + 1)
    ]
    conj_cands = [z.conj() for z in cands]
    separable = all(x.var == y.var for x, y in g.coeffs)

    buckets: list[list[tuple[Atom, Atom, FieldElement]]] = [[] for _ in range(r + 1)]
    for (x, y), c in g.coeffs.items():
        buckets[max(x.var, y.var)].append((x, y, c))

    values: list[FieldElement | None] = [None] * (r + 1)
    conj_values: list[FieldElement | None] = [None] * (r + 1)

    def atom_value(atom: Atom, k: int, z: FieldElement, zc: FieldElement) -> FieldElement:
        if atom.var == k:
            return zc if atom.conj else z
        stored = conj_values[atom.var] if atom.conj else values[atom.var]
        assert stored is not None
        return stored

    contrib: list[list[FieldElement]] = []
    suffix: list[_EmbMinMax | None] = [None] * (r + 2)
    if separable:
        zero = ctx.zero()
        for k in range(1, r + 1):
            per_var = []
            for z, zc in zip(cands, conj_cands):
                total = zero
                for x, y, c in buckets[k]:
                    total = total + c * atom_value(x, k, z, zc) * atom_value(y, k, z, zc)
                per_var.append(total)
            contrib.append(per_var)
        lo1 = hi1 = lo2 = hi2 = zero
        sums: list[tuple[FieldElement, FieldElement, FieldElement, FieldElement]] = [
            (zero, zero, zero, zero)
        ]
        for k in range(r, 0, -1):
            ext = _EmbMinMax(contrib[k - 1])
            lo1, hi1, lo2, hi2 = sums[-1]
            sums.append((lo1 + ext.lo1, hi1 + ext.hi1, lo2 + ext.lo2, hi2 + ext.hi2))
        sums.reverse()
        # sums[k-1] covers variables k..r; sums[r] is the empty tail.
        tail = sums
    else:
        tail = []

    def descend(k: int, const: FieldElement) -> bool:
        if k > r:
            return const == alpha
        if separable:
            lo1, hi1, lo2, hi2 = tail[k - 1]
            rem = alpha - const
            if (rem - lo1).sign_first() < 0 or (hi1 - rem).sign_first() < 0:
                return False
            if (rem - lo2).sign_second() < 0 or (hi2 - rem).sign_second() < 0:
                return False
        for idx, z in enumerate(cands):
            zc = conj_cands[idx]
            if separable:
                total = const + contrib[k - 1][idx]
            else:
                total = const
                for x, y, c in buckets[k]:
                    total = total + c * atom_value(x, k, z, zc) * atom_value(y, k, z, zc)
            values[k], conj_values[k] = z, zc
            if descend(k + 1, total):
                return True
        return False

    if descend(1, ctx.zero()):
        assignment = [v for v in values[1:]]
        witness = make_witness(g, assignment, alpha)  # type: ignore[arg-type]
        return SearchVerdict("found", witness=witness, height=height)
    return SearchVerdict("none_within_height", height=height)


def _strategy_verdict(
    g: GeneralizedForm, strategy: Strategy, alpha: FieldElement
) -> SearchVerdict:
    if isinstance(strategy, DefiniteStrategy):
        return represent_definite(g, alpha, strategy.cert)
    if isinstance(strategy, BoundedStrategy):
        return represent_bounded(g, alpha, strategy.height)
    return strategy(g, alpha)


def _universality_chunk(
    args: tuple[GeneralizedForm, Strategy, tuple[FieldElement, ...]]
) -> list[tuple[FieldElement, SearchVerdict]]:
    g, strategy, chunk = args
    return [(alpha, _strategy_verdict(g, strategy, alpha)) for alpha in chunk]


def universality_report(
    f: FormLike,
    trace_bound: int,
    strategy: Strategy,
    parallel: int = 1,
) -> UniversalityReport:
    """Run the chosen representation procedure over the trace-bounded universe.

    With parallel > 1 the target list is split across worker processes; the
    report is assembled in (trace, b) order either way, so the outcome is
    independent of scheduling.
    """
    g = _as_generalized(f)
    if not g.is_integral():
        raise PreconditionError("form must be integral")
    if classify_generalized(g) is Definiteness.INDEFINITE:
        raise PreconditionError("form is not totally positive semidefinite")
    targets = enumerate_totally_positive(g.ctx, trace_bound).elements
    picklable = isinstance(strategy, (DefiniteStrategy, BoundedStrategy))
    if parallel > 1 and picklable and len(targets) > 1:
        workers = min(parallel, len(targets))
        chunks = [targets[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_universality_chunk, [(g, strategy, c) for c in chunks]))
        merged = [pair for part in parts for pair in part]
        merged.sort(key=lambda pair: (pair[0].trace(), pair[0].b))
        results = merged
    else:
        results = [(alpha, _strategy_verdict(g, strategy, alpha)) for alpha in targets]
    failures = tuple((alpha, v) for alpha, v in results if not v.found)
    return UniversalityReport(trace_bound, len(targets), failures)


@lru_cache(maxsize=None)
def _indecomposables_cached(ctx: FieldContext, trace_bound: int) -> tuple[FieldElement, ...]:
    universe = enumerate_totally_positive(ctx, trace_bound).elements
    out = []
    for alpha in universe:
        t = alpha.trace()
        splits = False
        for beta in universe:
            if 2 * beta.trace() > t:
                break
            if (alpha - beta).is_totally_positive():
                splits = True
                break
        if not splits:
            out.append(alpha)
    return tuple(out)


def indecomposables_up_to(ctx: FieldContext, trace_bound: int) -> IndecomposableListing:
    """All indecomposable totally positive integers with trace up to the bound.

    Brute force straight from the definition: alpha is indecomposable when no
    totally positive beta of smaller trace leaves alpha - beta totally
    positive.  Scanning beta up to half the trace suffices by symmetry.
    """
    if not isinstance(trace_bound, int) or trace_bound < 1:
        raise PreconditionError("trace bound must be a positive integer")
    return IndecomposableListing(trace_bound, _indecomposables_cached(ctx, trace_bound))


def decompose(ctx: FieldContext, alpha: FieldElement) -> list[FieldElement]:
    """Greedy split of alpha into indecomposable summands.

    Each step subtracts the admissible indecomposable of largest trace, ties
    broken by larger irrational part; the trace strictly decreases, so the
    loop terminates.  The parts are re-summed as a final check.
    """
    if not (alpha.is_integral() and alpha.is_totally_positive()):
        raise PreconditionError("argument must be a totally positive integer")
    parts: list[FieldElement] = []
    rem = alpha
    while not rem.is_zero():
        pool = _indecomposables_cached(ctx, int(rem.trace()))
        best: FieldElement | None = None
        for eta in pool:
            diff = rem - eta
            if diff.is_zero() or diff.is_totally_positive():
                if best is None or (eta.trace(), eta.b) > (best.trace(), best.b):
                    best = eta
        if best is None:
            raise ContractFailure(f"no indecomposable part below {rem}")
        parts.append(best)
        rem = rem - best
    total = ctx.zero()
    for part in parts:
        total = total + part
    if total != alpha:
        raise ContractFailure("decomposition does not re-sum to the input")
    return parts
