"""Additive subgroups of GF(p^n) as GF(p)-subspaces in canonical form.

An additive subgroup of a characteristic-p field is closed under
GF(p)-scalars, so it is exactly an F_p-subspace of the level seen as
F_p^n.  A Subspace stores the reduced-echelon basis, making structural
equality coincide with mathematical equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

from . import linalg

ENUMERATION_GUARD = 10 ** 7


@dataclass(frozen=True)
class Subspace:
    p: int
    n: int
    level_index: int
    basis: tuple  # reduced-echelon rows, each a coordinate tuple

    def __post_init__(self):
        object.__setattr__(self, "basis", tuple(tuple(r) for r in self.basis))

    @property
    def dim(self):
        return len(self.basis)


def span(p, n, vectors, level_index=0):
    return Subspace(p, n, level_index, linalg.rref(list(vectors), p, n))


def span_elements(tower, elements, level_index=None):
    """Span of tower elements (all at a common level)."""
    elements = list(elements)
    if level_index is None:
        if not elements:
            raise ValueError("level index required for an empty span")
        level_index = elements[0].level_index
    if any(e.level_index != level_index for e in elements):
        raise ValueError("elements live at different levels")
    n = tower.degree(level_index)
    return span(tower.p, n, [e.coeffs for e in elements], level_index)


def zero_subspace(p, n, level_index=0):
    return Subspace(p, n, level_index, ())


def full_subspace(p, n, level_index=0):
    rows = [tuple(1 if j == i else 0 for j in range(n)) for i in range(n)]
    return Subspace(p, n, level_index, rows)


def _common(u, v):
    if (u.p, u.n, u.level_index) != (v.p, v.n, v.level_index):
        raise ValueError("subspaces live at different levels")


def sum_(u, v):
    _common(u, v)
    return Subspace(u.p, u.n, u.level_index, linalg.sum_spaces(u.basis, v.basis, u.p, u.n))


def intersect(u, v):
    _common(u, v)
    return Subspace(u.p, u.n, u.level_index, linalg.intersect_spaces(u.basis, v.basis, u.p, u.n))


def contains(u, x):
    """Membership of a coordinate vector or tower element."""
    vec = x.coeffs if hasattr(x, "coeffs") else tuple(x)
    return linalg.in_span(vec, u.basis, u.p)


def equals(u, v):
    _common(u, v)
    return u.basis == v.basis


def dim(u):
    return u.dim


def is_subspace(u, v):
    """u <= v"""
    _common(u, v)
    return all(linalg.in_span(row, v.basis, u.p) for row in u.basis)


def elements(u):
    """All p^dim points (coordinate tuples) of the subspace."""
    return linalg.enumerate_span(u.basis, u.p, u.n)


def intersect_subfield(tower, g, m):
    """g  intersected with GF(p^m), the fixed space of Frobenius^m."""
    n = tower.degree(g.level_index)
    if g.n != n:
        raise ValueError("subspace ambient dimension does not match its level")
    if n % m != 0:
        raise ValueError(f"{m} does not divide level degree {n}")
    sub = Subspace(g.p, n, g.level_index, tower.subfield_rows(g.level_index, m))
    return intersect(g, sub)


def lift(tower, u, target_level):
    """Image of the subspace under the chain embedding, re-canonicalised."""
    if target_level < u.level_index:
        raise ValueError("cannot lift downwards")
    if target_level == u.level_index:
        return u
    n_t = tower.degree(target_level)
    rows = []
    for row in u.basis:
        e = tower.element(u.level_index, row)
        rows.append(tower.embed(e, target_level).coeffs)
    out = Subspace(u.p, n_t, target_level, linalg.rref(rows, u.p, n_t))
    if out.dim != u.dim:
        raise ArithmeticError("embedding lost dimension")
    return out


def modular_law_check(a, b, c):
    """A cap (B + C) == A cap [B + C cap (A + B)] for subgroups."""
    _common(a, b)
    _common(a, c)
    lhs = intersect(a, sum_(b, c))
    rhs = intersect(a, sum_(b, intersect(c, sum_(a, b))))
    return equals(lhs, rhs)


def gaussian_binomial(n, k, p):
    """Number of k-dimensional subspaces of F_p^n."""
    num = den = 1
    for i in range(k):
        num *= p ** (n - i) - 1
        den *= p ** (i + 1) - 1
    return num // den


def count_subspaces(p, n):
    return sum(gaussian_binomial(n, k, p) for k in range(n + 1))


def enumerate_subspaces(p, n, level_index=0, guard=ENUMERATION_GUARD):
    """All subspaces of F_p^n, by dimension then by canonical basis read
    as a base-p integer sequence.  Each subspace appears exactly once
    (one reduced-echelon basis per subspace)."""
    total = count_subspaces(p, n)
    if total > guard:
        raise ValueError(f"{total} subspaces exceed the enumeration guard {guard}")
    yield zero_subspace(p, n, level_index)
    for k in range(1, n + 1):
        bucket = []
        for pivots in combinations(range(n), k):
            free_slots = []
            for r, piv in enumerate(pivots):
                for col in range(piv + 1, n):
                    if col not in pivots:
                        free_slots.append((r, col))
            for values in product(range(p), repeat=len(free_slots)):
                rows = [[0] * n for _ in range(k)]
                for r, piv in enumerate(pivots):
                    rows[r][piv] = 1
                for (r, col), val in zip(free_slots, values):
                    rows[r][col] = val
                basis = tuple(tuple(r) for r in rows)
                key = tuple(sum(c * p ** i for i, c in enumerate(row)) for row in basis)
                bucket.append((key, basis))
        bucket.sort(key=lambda t: t[0])
        for _, basis in bucket:
            yield Subspace(p, n, level_index, basis)


def random_subspace(p, n, rng, level_index=0, max_dim=None):
    """Seeded random subspace: uniform dimension bound, random rows."""
    if max_dim is None:
        max_dim = n
    k = rng.randrange(max_dim + 1)
    rows = [tuple(rng.randrange(p) for _ in range(n)) for _ in range(k)]
    return span(p, n, rows, level_index)
