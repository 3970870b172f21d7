"""Quadratic and generalized quadratic forms over a real quadratic field.

A generalized form mixes each variable z with its conjugate t(z); treating
every atom that actually appears as an independent column yields the
associated quadratic form, which carries the definiteness notion.  All
classification runs in exact arithmetic under both real embeddings.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import PreconditionError
from .field import FieldContext, FieldElement


class Atom(NamedTuple):
    """One occurrence slot of a variable: plain z_i or conjugated t(z_i)."""

    var: int
    conj: bool

    def text(self) -> str:
        return f"t(z{self.var})" if self.conj else f"z{self.var}"


AtomPair = tuple[Atom, Atom]


def _canonical_pair(x: Atom, y: Atom) -> AtomPair:
    return (x, y) if x <= y else (y, x)


class Definiteness(Enum):
    DEFINITE = "totally_positive_definite"
    SEMIDEFINITE_ONLY = "totally_positive_semidefinite_only"
    INDEFINITE = "not_semidefinite"


@dataclass(frozen=True, eq=True)
class QuadraticForm:
    """sum of a_ij x_i x_j over 1 <= i <= j <= n; absent pairs mean zero."""

    ctx: FieldContext
    n: int
    coeffs: Mapping[tuple[int, int], FieldElement]

    @classmethod
    def from_coeffs(
        cls,
        ctx: FieldContext,
        n: int,
        coeffs: Mapping[tuple[int, int], FieldElement] | Iterable[tuple[tuple[int, int], FieldElement]],
    ) -> "QuadraticForm":
        if n < 0:
            raise PreconditionError("variable count must be nonnegative")
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        out: dict[tuple[int, int], FieldElement] = {}
        for (i, j), c in items:
            if not (1 <= i <= j <= n):
                raise PreconditionError(f"index pair ({i}, {j}) out of range for n={n}")
            if c.d != ctx.d:
                raise ValueError("coefficient from a different field")
            if c.is_zero():
                continue
            key = (i, j)
            out[key] = out[key] + c if key in out else c
            if out[key].is_zero():
                del out[key]
        return cls(ctx, n, out)

    def coefficient(self, i: int, j: int) -> FieldElement:
        key = (i, j) if i <= j else (j, i)
        return self.coeffs.get(key, self.ctx.zero())

    def is_integral(self) -> bool:
        return all(c.is_integral() for c in self.coeffs.values())

    def evaluate(self, x: Sequence[FieldElement]) -> FieldElement:
        if len(x) != self.n:
            raise PreconditionError(f"expected {self.n} arguments, got {len(x)}")
        acc = self.ctx.zero()
        for (i, j), c in self.coeffs.items():
            acc = acc + c * x[i - 1] * x[j - 1]
        return acc

    def gram(self) -> list[list[FieldElement]]:
        """Symmetric matrix with a_ii on the diagonal and a_ij/2 off it."""
        half = Fraction(1, 2)
        m = [[self.ctx.zero() for _ in range(self.n)] for _ in range(self.n)]
        for (i, j), c in self.coeffs.items():
            if i == j:
                m[i - 1][i - 1] = c
            else:
                m[i - 1][j - 1] = c * half
                m[j - 1][i - 1] = c * half
        return m

    def scaled(self, factor: Fraction | int) -> "QuadraticForm":
        f = self.ctx.element(Fraction(factor))
        return QuadraticForm.from_coeffs(
            self.ctx, self.n, {k: c * f for k, c in self.coeffs.items()}
        )

    def as_generalized(self) -> "GeneralizedForm":
        terms = {
            _canonical_pair(Atom(i, False), Atom(j, False)): c
            for (i, j), c in self.coeffs.items()
        }
        return GeneralizedForm(self.ctx, self.n, terms)

    def sorted_items(self) -> list[tuple[tuple[int, int], FieldElement]]:
        return sorted(self.coeffs.items())


@dataclass(frozen=True, eq=True)
class GeneralizedForm:
    """Coefficient map over unordered atom pairs; zero coefficients never stored."""

    ctx: FieldContext
    r: int
    coeffs: Mapping[AtomPair, FieldElement]

    @classmethod
    def from_terms(
        cls,
        ctx: FieldContext,
        r: int,
        terms: Iterable[tuple[Atom, Atom, FieldElement]],
    ) -> "GeneralizedForm":
        if r < 1:
            raise PreconditionError("a generalized form needs at least one variable")
        out: dict[AtomPair, FieldElement] = {}
        for x, y, c in terms:
            for atom in (x, y):
                if not (1 <= atom.var <= r):
                    raise PreconditionError(f"variable index {atom.var} out of range for r={r}")
            if c.d != ctx.d:
                raise ValueError("coefficient from a different field")
            key = _canonical_pair(x, y)
            out[key] = out[key] + c if key in out else c
        return cls(ctx, r, {k: v for k, v in out.items() if not v.is_zero()})

    def is_integral(self) -> bool:
        return all(c.is_integral() for c in self.coeffs.values())

    def atoms(self) -> list[Atom]:
        seen = {a for pair in self.coeffs for a in pair}
        return sorted(seen)

    def evaluate(self, z: Sequence[FieldElement]) -> FieldElement:
        if len(z) != self.r:
            raise PreconditionError(f"expected {self.r} arguments, got {len(z)}")
        conj = [v.conj() for v in z]

        def val(atom: Atom) -> FieldElement:
            return conj[atom.var - 1] if atom.conj else z[atom.var - 1]

        acc = self.ctx.zero()
        for (x, y), c in self.coeffs.items():
            acc = acc + c * val(x) * val(y)
        return acc

    def sorted_items(self) -> list[tuple[AtomPair, FieldElement]]:
        return sorted(self.coeffs.items())


def proper_variables(g: GeneralizedForm) -> frozenset[int]:
    """Indices whose plain and conjugated atoms both appear in the form."""
    plain: set[int] = set()
    conj: set[int] = set()
    for atom in g.atoms():
        (conj if atom.conj else plain).add(atom.var)
    return frozenset(plain & conj)


def is_quadratic(g: GeneralizedForm) -> bool:
    return not proper_variables(g)


@dataclass(frozen=True)
class AssociatedForm:
    """The quadratic form on the atoms of a generalized form that actually appear.

    Proper variables contribute two columns, all other appearing variables one.
    """

    q: QuadraticForm
    column_map: tuple[Atom, ...]
    nonproper_count: int

    @property
    def columns(self) -> int:
        return len(self.column_map)

    def expand_point(self, z: Sequence[FieldElement]) -> list[FieldElement]:
        """Column values for a point of the source form."""
        return [
            z[a.var - 1].conj() if a.conj else z[a.var - 1] for a in self.column_map
        ]


def associated_form(g: GeneralizedForm) -> AssociatedForm:
    cols = g.atoms()
    index = {atom: k + 1 for k, atom in enumerate(cols)}
    coeffs: dict[tuple[int, int], FieldElement] = {}
    for (x, y), c in g.coeffs.items():
        i, j = sorted((index[x], index[y]))
        coeffs[(i, j)] = c
    per_var: dict[int, int] = {}
    for atom in cols:
        per_var[atom.var] = per_var.get(atom.var, 0) + 1
    nonproper = sum(1 for count in per_var.values() if count == 1)
    q = QuadraticForm.from_coeffs(g.ctx, len(cols), coeffs)
    return AssociatedForm(q, tuple(cols), nonproper)


def subform(g: GeneralizedForm, keep: Iterable[int]) -> GeneralizedForm:
    """The form obtained by setting every variable outside `keep` to zero.

    Kept variables are renumbered 1..k preserving their original order.
    """
    kept = sorted(set(keep))
    if not kept:
        raise PreconditionError("a subform must keep at least one variable")
    for v in kept:
        if not (1 <= v <= g.r):
            raise PreconditionError(f"variable index {v} out of range for r={g.r}")
    renum = {old: new + 1 for new, old in enumerate(kept)}
    terms = []
    for (x, y), c in g.coeffs.items():
        if x.var in renum and y.var in renum:
            terms.append((Atom(renum[x.var], x.conj), Atom(renum[y.var], y.conj), c))
    return GeneralizedForm.from_terms(g.ctx, len(kept), terms)


def subform_index_map(keep: Iterable[int]) -> dict[int, int]:
    """Map from a subform's variable indices back to the source form's."""
    return {new + 1: old for new, old in enumerate(sorted(set(keep)))}


def direct_sum(left: GeneralizedForm, right: GeneralizedForm) -> GeneralizedForm:
    if left.ctx.d != right.ctx.d:
        raise ValueError("cannot sum forms over different fields")
    terms = [(x, y, c) for (x, y), c in left.coeffs.items()]
    for (x, y), c in right.coeffs.items():
        terms.append((Atom(x.var + left.r, x.conj), Atom(y.var + left.r, y.conj), c))
    return GeneralizedForm.from_terms(left.ctx, left.r + right.r, terms)


def _is_totally_positive_definite_gram(m: list[list[FieldElement]]) -> bool:
    # Symmetric elimination without pivoting: all pivots totally positive is
    # equivalent, per embedding, to Sylvester's criterion on leading minors.
    n = len(m)
    work = [row[:] for row in m]
    for k in range(n):
        pivot = work[k][k]
        if not pivot.is_totally_positive():
            return False
        for i in range(k + 1, n):
            factor = work[k][i] / pivot
            for j in range(i, n):
                work[i][j] = work[i][j] - factor * work[k][j]
                work[j][i] = work[i][j]
    return True


def _is_totally_psd_gram(m: list[list[FieldElement]]) -> bool:
    # Cholesky-style elimination with the zero-pivot rule: a zero diagonal
    # entry forces its whole row to vanish, otherwise some 2x2 principal
    # minor is negative.  Pivot choices coincide in both embeddings because
    # a field element is zero in one embedding iff it is zero.
    n = len(m)
    work = [row[:] for row in m]
    active = list(range(n))
    while active:
        i = active.pop(0)
        pivot = work[i][i]
        if pivot.is_zero():
            if any(not work[i][j].is_zero() for j in active):
                return False
            continue
        if not pivot.is_totally_nonnegative():
            return False
        for r in active:
            factor = work[i][r] / pivot
            for c in active:
                if c < r:
                    continue
                work[r][c] = work[r][c] - factor * work[i][c]
                work[c][r] = work[r][c]
    return True


def classify_definiteness(q: QuadraticForm) -> Definiteness:
    """Exact classification of the Gram matrix under both embeddings."""
    m = q.gram()
    if q.n > 0 and _is_totally_positive_definite_gram(m):
        return Definiteness.DEFINITE
    if q.n == 0:
        return Definiteness.DEFINITE
    if _is_totally_psd_gram(m):
        return Definiteness.SEMIDEFINITE_ONLY
    return Definiteness.INDEFINITE


def classify_generalized(g: GeneralizedForm) -> Definiteness:
    """Definiteness of a generalized form, read off its associated quadratic form."""
    return classify_definiteness(associated_form(g).q)
