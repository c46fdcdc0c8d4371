"""Exact linear algebra over GF(p).

Vectors are tuples of ints in [0, p).  Bases are kept in reduced row
echelon form (pivot = leftmost nonzero coordinate, normalised to 1,
eliminated above and below), rows sorted by pivot column.  For p == 2 a
packed-int fast path is used internally: a vector of length n becomes an
int whose bit i is coordinate i.
"""

from __future__ import annotations

from itertools import product


def vec_to_int(vec):
    r = 0
    for i, c in enumerate(vec):
        if c:
            r |= 1 << i
    return r


def int_to_vec(x, n):
    return tuple((x >> i) & 1 for i in range(n))


def _pivot2(row):
    # lowest set bit = leftmost coordinate
    return (row & -row).bit_length() - 1


def _rref2(rows):
    """Reduced echelon basis for a list of packed GF(2) rows.

    Kept fully reduced: every stored row has exactly one pivot-column bit
    (its own), so one elimination pass per incoming row suffices.
    """
    basis = {}  # pivot -> row
    for row in rows:
        for q in sorted(basis):
            if (row >> q) & 1:
                row ^= basis[q]
        if not row:
            continue
        piv = _pivot2(row)
        for q, r in basis.items():
            if (r >> piv) & 1:
                basis[q] = r ^ row
        basis[piv] = row
    return [basis[piv] for piv in sorted(basis)]


def _reduce2(row, basis_rows):
    for b in basis_rows:
        if row == 0:
            break
        piv = _pivot2(b)
        if (row >> piv) & 1:
            row ^= b
    return row


def _rref_generic(rows, p, n):
    basis = []  # list of (pivot, row-list), sorted by pivot
    for row in rows:
        row = list(row)
        for piv, b in basis:
            c = row[piv]
            if c:
                row = [(x - c * y) % p for x, y in zip(row, b)]
        piv = next((i for i, c in enumerate(row) if c), None)
        if piv is None:
            continue
        inv = pow(row[piv], p - 2, p)
        row = [(x * inv) % p for x in row]
        for j, (q, b) in enumerate(basis):
            c = b[piv]
            if c:
                basis[j] = (q, [(x - c * y) % p for x, y in zip(b, row)])
        basis.append((piv, row))
        basis.sort(key=lambda t: t[0])
    return [tuple(b) for _, b in basis]


def rref(rows, p, n):
    """Canonical reduced-echelon basis (tuple of coordinate tuples)."""
    if p == 2:
        return tuple(int_to_vec(r, n) for r in _rref2([vec_to_int(v) for v in rows]))
    return tuple(_rref_generic(rows, p, n))


def reduce_vector(vec, basis, p):
    """Residue of vec modulo the span of an echelon basis."""
    if p == 2:
        r = _reduce2(vec_to_int(vec), [vec_to_int(b) for b in basis])
        return int_to_vec(r, len(vec))
    row = list(vec)
    for b in basis:
        piv = next(i for i, c in enumerate(b) if c)
        c = row[piv]
        if c:
            row = [(x - c * y) % p for x, y in zip(row, b)]
    return tuple(row)


def in_span(vec, basis, p):
    return not any(reduce_vector(vec, basis, p))


def span_dim(rows, p, n):
    return len(rref(rows, p, n))


def sum_spaces(basis_a, basis_b, p, n):
    return rref(list(basis_a) + list(basis_b), p, n)


def intersect_spaces(basis_a, basis_b, p, n):
    """Intersection via the double-elimination (Zassenhaus) method.

    Rows [a | a] for a in A and [b | 0] for b in B are echelonised; rows
    whose left half vanished carry the intersection in the right half.
    """
    rows = []
    zero = (0,) * n
    for a in basis_a:
        rows.append(tuple(a) + tuple(a))
    for b in basis_b:
        rows.append(tuple(b) + zero)
    ech = rref(rows, p, 2 * n)
    out = [row[n:] for row in ech if not any(row[:n])]
    return rref(out, p, n)


def kernel(matrix, p, n_cols):
    """Basis of the right kernel of a matrix (rows of length n_cols)."""
    ech = rref(matrix, p, n_cols)
    pivots = [next(i for i, c in enumerate(row) if c) for row in ech]
    free = [j for j in range(n_cols) if j not in pivots]
    out = []
    for j in free:
        v = [0] * n_cols
        v[j] = 1
        for row, piv in zip(ech, pivots):
            v[piv] = (-row[j]) % p
        out.append(tuple(v))
    return rref(out, p, n_cols)


def solve_affine(matrix, rhs, p):
    """One solution x of matrix @ x = rhs over GF(p), or None.

    matrix is given as a list of rows; x has len(matrix[0]) coordinates.
    """
    if not matrix:
        return None
    n = len(matrix[0])
    aug = [tuple(row) + (r,) for row, r in zip(matrix, rhs)]
    ech = rref(aug, p, n + 1)
    x = [0] * n
    for row in ech:
        piv = next(i for i, c in enumerate(row) if c)
        if piv == n:
            return None  # inconsistent
        x[piv] = row[n]
    return tuple(x)


def enumerate_span(basis, p, n):
    """All p^dim points of the span, ordered by coefficient counters."""
    if not basis:
        yield (0,) * n
        return
    for coeffs in product(range(p), repeat=len(basis)):
        v = [0] * n
        for c, row in zip(coeffs, basis):
            if c:
                v = [(x + c * y) % p for x, y in zip(v, row)]
        yield tuple(v)


def make_independence_checker(basis_rows, p, n):
    """Closure testing whether vectors jointly extend the span of
    basis_rows independently.  The base elimination state is built once;
    each call works on a copy."""
    if p == 2:
        base = {}
        for row in basis_rows:
            r = vec_to_int(row)
            while r:
                piv = _pivot2(r)
                if piv in base:
                    r ^= base[piv]
                else:
                    base[piv] = r
                    break

        def check2(vectors):
            cur = dict(base)
            for v in vectors:
                r = vec_to_int(v) if not isinstance(v, int) else v
                while True:
                    if r == 0:
                        return False
                    piv = _pivot2(r)
                    if piv in cur:
                        r ^= cur[piv]
                    else:
                        cur[piv] = r
                        break
            return True

        return check2

    base = {}

    def _insert(state, row):
        row = list(row)
        while True:
            piv = next((i for i, c in enumerate(row) if c), None)
            if piv is None:
                return False
            if piv in state:
                b = state[piv]
                c = (row[piv] * pow(b[piv], p - 2, p)) % p
                row = [(x - c * y) % p for x, y in zip(row, b)]
            else:
                state[piv] = tuple(row)
                return True

    for row in basis_rows:
        _insert(base, row)

    def check(vectors):
        cur = dict(base)
        for v in vectors:
            if not _insert(cur, v):
                return False
        return True

    return check


def spaces_equal(basis_a, basis_b):
    return tuple(map(tuple, basis_a)) == tuple(map(tuple, basis_b))


def is_subspace_of(basis_a, basis_b, p):
    return all(in_span(a, basis_b, p) for a in basis_a)
