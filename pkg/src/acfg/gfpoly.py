"""Univariate polynomial arithmetic over GF(p), coefficient-list based.

A polynomial c0 + c1 X + ... + cd X^d is the tuple (c0, c1, ..., cd) with
cd != 0; the zero polynomial is the empty tuple.  These routines back the
field-tower construction: irreducibility testing, the canonical choice of
the smallest monic irreducible of a given degree, and modular
exponentiation.  Polynomials are ordered by reading the coefficient
vector as a base-p integer (constant term least significant), which is
the ordering used everywhere a "least" polynomial or root is required.
"""

from __future__ import annotations

from functools import lru_cache


def trim(coeffs):
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def degree(f):
    return len(f) - 1  # -1 for the zero polynomial


def add(f, g, p):
    n = max(len(f), len(g))
    f = tuple(f) + (0,) * (n - len(f))
    g = tuple(g) + (0,) * (n - len(g))
    return trim((a + b) % p for a, b in zip(f, g))


def sub(f, g, p):
    n = max(len(f), len(g))
    f = tuple(f) + (0,) * (n - len(f))
    g = tuple(g) + (0,) * (n - len(g))
    return trim((a - b) % p for a, b in zip(f, g))


def mul(f, g, p):
    if not f or not g:
        return ()
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] = (out[i + j] + a * b) % p
    return trim(out)


def divmod_poly(f, g, p):
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    f = list(f)
    dg = degree(g)
    inv_lead = pow(g[-1], p - 2, p)
    q = [0] * max(len(f) - dg, 0)
    while len(f) - 1 >= dg and any(f):
        while f and f[-1] == 0:
            f.pop()
        d = len(f) - 1
        if d < dg:
            break
        c = (f[-1] * inv_lead) % p
        q[d - dg] = c
        for i, b in enumerate(g):
            f[d - dg + i] = (f[d - dg + i] - c * b) % p
    return trim(q), trim(f)


def mod(f, g, p):
    return divmod_poly(f, g, p)[1]


def gcd(f, g, p):
    while g:
        f, g = g, mod(f, g, p)
    if f:
        inv = pow(f[-1], p - 2, p)
        f = trim((c * inv) % p for c in f)
    return f


def powmod(base, e, modulus, p):
    result = (1,)
    base = mod(base, modulus, p)
    while e:
        if e & 1:
            result = mod(mul(result, base, p), modulus, p)
        base = mod(mul(base, base, p), modulus, p)
        e >>= 1
    return result


def poly_to_int(f, p):
    r = 0
    for c in reversed(f):
        r = r * p + c
    return r


def int_to_poly(k, p):
    out = []
    while k:
        out.append(k % p)
        k //= p
    return tuple(out)


# ---------------------------------------------------------------------------
# GF(2) packed representation: polynomial <-> int, bit i = coeff of X^i.

def mul2(a, b):
    r = 0
    while a:
        low = a & -a
        r ^= b << (low.bit_length() - 1)
        a ^= low
    return r


def mod2(a, f):
    df = f.bit_length() - 1
    while a.bit_length() - 1 >= df and a:
        a ^= f << (a.bit_length() - 1 - df)
    return a


def divmod2(a, b):
    q = 0
    db = b.bit_length() - 1
    while a and a.bit_length() - 1 >= db:
        sh = a.bit_length() - 1 - db
        a ^= b << sh
        q |= 1 << sh
    return q, a


def mulmod2(a, b, f):
    return mod2(mul2(a, b), f)


def gcd2(a, b):
    while b:
        a, b = b, mod2(a, b)
    return a


_SPREAD = tuple(
    sum(((byte >> j) & 1) << (2 * j) for j in range(8)) for byte in range(256)
)


def square2(a):
    # interleave zero bits: (sum a_i X^i)^2 = sum a_i X^{2i} in char 2
    r = 0
    shift = 0
    while a:
        r |= _SPREAD[a & 0xFF] << shift
        a >>= 8
        shift += 16
    return r


def _frobenius_chain2(f, upto):
    """Yield X^(2^k) mod f for k = 1..upto (packed ints)."""
    t = 2  # X
    for _ in range(upto):
        t = mod2(square2(t), f)
        yield t


def _is_irreducible2(f):
    n = f.bit_length() - 1
    if n <= 0:
        return False
    if n == 1:
        return True
    if not (f & 1):  # divisible by X
        return False
    divisor_checks = {d: None for d in range(1, n) if n % d == 0}
    for k, t in enumerate(_frobenius_chain2(f, n), start=1):
        if k in divisor_checks and gcd2(t ^ 2, f).bit_length() - 1 > 0:
            return False
        if k == n:
            return t == 2  # X^(2^n) == X mod f
    return False


def _is_irreducible_generic(f, p):
    n = degree(f)
    if n <= 0:
        return False
    if n == 1:
        return True
    x = (0, 1)
    t = x
    for k in range(1, n + 1):
        t = powmod(t, p, f, p)
        if k < n and n % k == 0:
            g = gcd(sub(t, x, p), f, p)
            if degree(g) > 0:
                return False
        if k == n:
            return t == x
    return False


def is_irreducible(f, p):
    """Exact irreducibility test: gcd(X^(p^d) - X, f) over proper divisors."""
    f = trim(f)
    if p == 2:
        return _is_irreducible2(poly_to_int(f, 2))
    return _is_irreducible_generic(f, p)


@lru_cache(maxsize=None)
def least_irreducible(p, n):
    """The monic irreducible of degree n over GF(p) whose coefficient
    vector, read as a base-p integer, is smallest."""
    if n == 1:
        return (0, 1)  # X
    lead = p ** n
    for k in range(p ** n):
        if p == 2:
            f = lead + k
            if k & 1 and _is_irreducible2(f):
                return int_to_poly(f, 2)
        else:
            f = int_to_poly(k, p) + (0,) * (n - len(int_to_poly(k, p))) + (1,)
            if f[0] != 0 and is_irreducible(f, p):
                return f
    raise ArithmeticError(f"no irreducible of degree {n} over GF({p})")
