"""Shared generators and independent oracles for the test suite.

Oracles here deliberately avoid the library's search and classification
paths: enumeration by plain grid filters, definiteness by explicit principal
minors, and representation by exhaustive scans over inflated boxes.
"""

from __future__ import annotations

import random
from fractions import Fraction

import numpy as np

from genquad import (
    Atom,
    FieldContext,
    FieldElement,
    GeneralizedForm,
    QuadraticForm,
)

# ---------------------------------------------------------------------------
# random inputs


def random_element(rng: random.Random, ctx: FieldContext, height: int) -> FieldElement:
    return ctx.from_coords(rng.randint(-height, height), rng.randint(-height, height))


def random_generalized(
    rng: random.Random, ctx: FieldContext, max_r: int, height: int
) -> GeneralizedForm:
    r = rng.randint(1, max_r)
    atoms = [Atom(v, c) for v in range(1, r + 1) for c in (False, True)]
    terms = []
    for _ in range(rng.randint(1, 2 * r + 2)):
        x, y = rng.choice(atoms), rng.choice(atoms)
        coeff = random_element(rng, ctx, height)
        terms.append((x, y, coeff))
    return GeneralizedForm.from_terms(ctx, r, terms)


def random_definite_generalized(
    rng: random.Random, ctx: FieldContext, columns: int, proper_vars: int
) -> GeneralizedForm:
    """A totally positive definite generalized form with the requested shape.

    The Gram matrix is B^T B + I over the chosen atom set, which is positive
    definite in both embeddings for any integral B.
    """
    plain_vars = columns - 2 * proper_vars
    assert plain_vars >= 0
    atoms = [Atom(v, False) for v in range(1, plain_vars + 1)]
    for v in range(plain_vars + 1, plain_vars + proper_vars + 1):
        atoms.append(Atom(v, False))
        atoms.append(Atom(v, True))
    k = len(atoms)
    b = [[random_element(rng, ctx, 1) for _ in range(k)] for _ in range(k)]
    gram = [[ctx.zero() for _ in range(k)] for _ in range(k)]
    for i in range(k):
        for j in range(k):
            acc = ctx.zero()
            for t in range(k):
                acc = acc + b[t][i] * b[t][j]
            gram[i][j] = acc
        gram[i][i] = gram[i][i] + ctx.one()
    terms = []
    for i in range(k):
        terms.append((atoms[i], atoms[i], gram[i][i]))
        for j in range(i + 1, k):
            terms.append((atoms[i], atoms[j], gram[i][j] * 2))
    r = plain_vars + proper_vars
    return GeneralizedForm.from_terms(ctx, max(r, 1), terms)


def random_definite_ternary(rng: random.Random, ctx: FieldContext) -> QuadraticForm:
    """A near-identity definite ternary form, small enough for box oracles."""
    gram = [[ctx.zero() for _ in range(3)] for _ in range(3)]
    for i in range(3):
        gram[i][i] = ctx.element(rng.randint(1, 2))
    i, j = sorted(rng.sample(range(3), 2))
    bump = random_element(rng, ctx, 1)
    # B = I + E_ij * bump gives B^T B with one coupled pair.
    gram[j][j] = gram[j][j] + bump * bump
    gram[i][j] = bump
    gram[j][i] = bump
    coeffs = {}
    for i in range(3):
        coeffs[(i + 1, i + 1)] = gram[i][i]
        for j in range(i + 1, 3):
            c = gram[i][j] * 2
            if not c.is_zero():
                coeffs[(i + 1, j + 1)] = c
    return QuadraticForm.from_coeffs(ctx, 3, coeffs)


# ---------------------------------------------------------------------------
# independent oracles


def grid_filter_listing(ctx: FieldContext, trace_bound: int) -> list[FieldElement]:
    """Totally positive integers with bounded trace, by brute grid filtering."""
    d = ctx.d
    out = []
    for m in range(-trace_bound, trace_bound + 1):
        for n in range(-2 * trace_bound, 2 * trace_bound + 1):
            x = ctx.from_coords(m, n)
            a, b = x.a, x.b
            if 2 * a > trace_bound or a <= 0:
                continue
            if a * a <= d * b * b:
                continue
            out.append(x)
    out.sort(key=lambda e: (e.trace(), e.b))
    return out


def laplace_det(m: list[list[FieldElement]], ctx: FieldContext) -> FieldElement:
    n = len(m)
    if n == 0:
        return ctx.one()
    if n == 1:
        return m[0][0]
    total = ctx.zero()
    sign = 1
    for col in range(n):
        minor = [row[:col] + row[col + 1 :] for row in m[1:]]
        term = m[0][col] * laplace_det(minor, ctx)
        total = total + (term if sign > 0 else -term)
        sign = -sign
    return total


def minors_classification(q: QuadraticForm) -> str:
    """Classification by explicit principal minors, for small n only."""
    gram = q.gram()
    n = q.n
    leading_ok = True
    for k in range(1, n + 1):
        sub = [row[:k] for row in gram[:k]]
        if not laplace_det(sub, q.ctx).is_totally_positive():
            leading_ok = False
            break
    if leading_ok and n > 0:
        return "totally_positive_definite"
    for mask in range(1, 1 << n):
        idx = [i for i in range(n) if mask >> i & 1]
        sub = [[gram[i][j] for j in idx] for i in idx]
        if not laplace_det(sub, q.ctx).is_totally_nonnegative():
            return "not_semidefinite"
    return "totally_positive_semidefinite_only"


def oracle_box_search(
    q: QuadraticForm,
    alpha: FieldElement,
    box: tuple[tuple[int, int, int, int], ...],
    inflate: int = 2,
) -> list[tuple[int, int]] | None:
    """Exhaustive lexicographic scan of an inflated coordinate box.

    Returns the first solution's integral-basis coordinates, or None.  All
    arithmetic runs in scaled integers, so the check is exact.
    """
    assert q.n == len(box)
    ctx = q.ctx
    d = ctx.d
    half = ctx.basis_kind == "half"

    def pq(m: np.ndarray | int, n: np.ndarray | int) -> tuple:
        return (2 * m + n, n) if half else (2 * m, 2 * n)

    coeffs = []
    for (i, j), c in q.coeffs.items():
        coeffs.append((i - 1, j - 1, int(c.a * 2), int(c.b * 2)))
    target_a, target_b = int(alpha.a * 4), int(alpha.b * 4)

    ranges = [
        (
            np.arange(mlo - inflate, mhi + inflate + 1, dtype=np.int64),
            np.arange(nlo - inflate, nhi + inflate + 1, dtype=np.int64),
        )
        for (mlo, mhi, nlo, nhi) in box
    ]
    inner_axes = []
    for m_axis, n_axis in ranges[1:]:
        inner_axes.extend([m_axis, n_axis])
    grids = np.meshgrid(*inner_axes, indexing="ij") if inner_axes else []
    inner = [g.ravel() for g in grids]

    m0_axis, n0_axis = ranges[0]
    for m0 in m0_axis:
        for n0 in n0_axis:
            coords = [(int(m0), int(n0))]
            ps, qs = [], []
            p0, q0 = pq(int(m0), int(n0))
            size = inner[0].size if inner else 1
            ps.append(np.full(size, p0, dtype=np.int64))
            qs.append(np.full(size, q0, dtype=np.int64))
            for v in range(1, q.n):
                pv, qv = pq(inner[2 * (v - 1)], inner[2 * (v - 1) + 1])
                ps.append(pv)
                qs.append(qv)
            va = np.zeros(size, dtype=np.int64)
            vb = np.zeros(size, dtype=np.int64)
            for i, j, ca, cb in coeffs:
                ta = ps[i] * ps[j] + d * qs[i] * qs[j]
                tb = ps[i] * qs[j] + ps[j] * qs[i]
                va = va + ca * ta + d * cb * tb
                vb = vb + ca * tb + cb * ta
            hits = np.nonzero((va == 8 * target_a) & (vb == 8 * target_b))[0]
            if hits.size:
                first = int(hits[0])
                for v in range(1, q.n):
                    coords.append(
                        (int(inner[2 * (v - 1)][first]), int(inner[2 * (v - 1) + 1][first]))
                    )
                return coords
    return None


def split_oracle_indecomposables(
    ctx: FieldContext, trace_bound: int
) -> list[FieldElement]:
    """Indecomposables by scanning all ordered pairs of the grid listing."""
    universe = grid_filter_listing(ctx, trace_bound)
    sums = set()
    for x in universe:
        for y in universe:
            s = x + y
            if s.trace() <= trace_bound:
                sums.add((s.a, s.b))
    return [x for x in universe if (x.a, x.b) not in sums]
