"""Chains of finite fields GF(p^n0) < GF(p^n1) < ... with stored embeddings.

Each level is GF(p)[X]/(f) for a canonical modulus f: the monic
irreducible whose coefficient vector, read base-p, is smallest.  Degrees
divide along the chain and the embedding of level i into level i+1 is the
smallest root of f_i in level i+1 (elements ordered by coefficient vector
read as a base-p integer), so two towers grown from the same config are
bit-identical.

Elements are immutable (level index, coefficient tuple) pairs; all
arithmetic goes through the owning Tower, which keeps per-level caches
(packed moduli, Frobenius images, subfield bases).  For p == 2 the level
arithmetic runs on packed ints.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import gfpoly, linalg

DEFAULT_SEARCH_BUDGET = 2 ** 24
MAX_CHARACTERISTIC = 17
_ROOT_SCAN_LIMIT = 2 ** 12


def _is_prime(p):
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class TowerConfig:
    p: int
    n0: int
    search_budget: int = DEFAULT_SEARCH_BUDGET

    def validate(self):
        if not _is_prime(self.p):
            raise ValueError(f"characteristic {self.p} is not prime")
        if self.p > MAX_CHARACTERISTIC:
            raise ValueError(f"characteristic capped at {MAX_CHARACTERISTIC}")
        if self.n0 < 1:
            raise ValueError("initial degree must be >= 1")
        if self.search_budget <= self.p ** self.n0:
            raise ValueError("search budget must exceed the base field size")


@dataclass(frozen=True)
class TowerElement:
    level_index: int
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))


class _Level:
    """Arithmetic engine for one level GF(p)[X]/(modulus)."""

    def __init__(self, p, modulus):
        self.p = p
        self.modulus = tuple(modulus)
        self.n = len(modulus) - 1
        self.size = p ** self.n
        if p == 2:
            self._fmask = gfpoly.poly_to_int(modulus, 2)
        self._frob_images = None  # coeff tuples of (X^j)^p
        self._subfield_bases = {}

    # raw representation: int (p == 2) or zero-padded tuple (p > 2)

    def pack(self, coeffs):
        if self.p == 2:
            return linalg.vec_to_int(coeffs)
        return tuple(coeffs) + (0,) * (self.n - len(coeffs))

    def unpack(self, raw):
        if self.p == 2:
            return linalg.int_to_vec(raw, self.n)
        return tuple(raw) + (0,) * (self.n - len(raw))

    def zero(self):
        return 0 if self.p == 2 else (0,) * self.n

    def one(self):
        if self.p == 2:
            return gfpoly.mod2(1, self._fmask)
        return self.pack(gfpoly.mod((1,), self.modulus, self.p))

    def gen(self):
        if self.p == 2:
            return gfpoly.mod2(2, self._fmask)
        return self.pack(gfpoly.mod((0, 1), self.modulus, self.p))

    def from_int(self, k):
        k %= self.p
        out = self.zero()
        for _ in range(k):
            out = self.add(out, self.one())
        return out

    def add(self, a, b):
        if self.p == 2:
            return a ^ b
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def neg(self, a):
        if self.p == 2:
            return a
        return tuple((-x) % self.p for x in a)

    def scalar(self, c, a):
        c %= self.p
        if self.p == 2:
            return a if c else 0
        return tuple((c * x) % self.p for x in a)

    def mul(self, a, b):
        if self.p == 2:
            return gfpoly.mulmod2(a, b, self._fmask)
        prod = gfpoly.mul(gfpoly.trim(a), gfpoly.trim(b), self.p)
        return self.pack(gfpoly.mod(prod, self.modulus, self.p))

    def square(self, a):
        if self.p == 2:
            return gfpoly.mod2(gfpoly.square2(a), self._fmask)
        return self.mul(a, a)

    def inv(self, a):
        if not self.nonzero(a):
            raise ZeroDivisionError("inversion of zero")
        if self.p == 2:
            # extended Euclid on packed GF(2)[X]
            r0, r1 = self._fmask, a
            t0, t1 = 0, 1
            while r1:
                q, r = gfpoly.divmod2(r0, r1)
                r0, r1 = r1, r
                t0, t1 = t1, t0 ^ gfpoly.mul2(q, t1)
            return gfpoly.mod2(t0, self._fmask)
        # extended Euclid on coefficient tuples
        r0, r1 = self.modulus, gfpoly.trim(a)
        t0, t1 = (), (1,)
        while r1:
            q, r = gfpoly.divmod_poly(r0, r1, self.p)
            r0, r1 = r1, r
            t0, t1 = t1, gfpoly.sub(t0, gfpoly.mul(q, t1, self.p), self.p)
        lead_inv = pow(r0[-1], self.p - 2, self.p)
        t0 = tuple((c * lead_inv) % self.p for c in t0)
        return self.pack(gfpoly.mod(t0, self.modulus, self.p))

    def pow(self, a, e):
        if e < 0:
            return self.pow(self.inv(a), -e)
        out = self.one()
        base = a
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.square(base)
            e >>= 1
        return out

    def frob(self, a, e=1):
        # a^(p^e)
        for _ in range(e):
            if self.p == 2:
                a = self.square(a)
            else:
                a = self.pow(a, self.p)
        return a

    def nonzero(self, a):
        return a != 0 if self.p == 2 else any(a)

    def index(self, raw):
        if self.p == 2:
            return raw
        return gfpoly.poly_to_int(raw, self.p)

    def from_index(self, k):
        if self.p == 2:
            return k
        return self.pack(gfpoly.int_to_poly(k, self.p))

    def frob_images(self):
        """Coefficient tuples of (X^j)^p for j < n (the Frobenius as an
        F_p-linear map in the power basis)."""
        if self._frob_images is None:
            imgs = []
            xp = self.frob(self.gen())
            acc = self.one()
            for _ in range(self.n):
                imgs.append(self.unpack(acc))
                acc = self.mul(acc, xp)
            self._frob_images = tuple(imgs)
        return self._frob_images

    def subfield_basis(self, m):
        """Echelon basis (coefficient tuples) of the fixed field of
        Frobenius^m, i.e. GF(p^m) inside this level."""
        if m not in self._subfield_bases:
            if self.n % m != 0:
                raise ValueError(f"{m} does not divide level degree {self.n}")
            imgs = [self.pack(v) for v in self.frob_images()]
            for _ in range(m - 1):
                imgs = [self.frob(v) for v in imgs]
            cols = [self.unpack(v) for v in imgs]
            rows = []
            for i in range(self.n):
                row = []
                for j in range(self.n):
                    c = cols[j][i] - (1 if i == j else 0)
                    row.append(c % self.p)
                rows.append(tuple(row))
            basis = linalg.kernel(rows, self.p, self.n)
            if len(basis) != m:
                raise ArithmeticError("subfield dimension mismatch")
            self._subfield_bases[m] = basis
        return self._subfield_bases[m]


class Tower:
    """Immutable-by-convention chain of levels; growth returns a new Tower."""

    def __init__(self, config, levels, embeddings, _engines=None):
        self.config = config
        self.levels = tuple(levels)          # (degree, modulus tuple) pairs
        self.embeddings = tuple(embeddings)  # generator image coeffs, level i -> i+1
        self._engines = list(_engines) if _engines else [
            _Level(config.p, mod) for _, mod in self.levels
        ]
        self._embed_pows = {}

    @property
    def p(self):
        return self.config.p

    def degree(self, level_index):
        return self.levels[level_index][0]

    def level_count(self):
        return len(self.levels)

    def engine(self, level_index):
        return self._engines[level_index]

    def level_with_degree(self, n):
        for i, (deg, _) in enumerate(self.levels):
            if deg == n:
                return i
        raise ValueError(f"no level of degree {n} in the chain")

    # -- element constructors ------------------------------------------------

    def element(self, level_index, coeffs):
        n = self.degree(level_index)
        coeffs = tuple(c % self.p for c in coeffs)
        if len(coeffs) > n:
            raise ValueError("coefficient vector longer than level degree")
        return TowerElement(level_index, coeffs + (0,) * (n - len(coeffs)))

    def zero(self, level_index):
        return self.element(level_index, ())

    def one(self, level_index):
        eng = self.engine(level_index)
        return TowerElement(level_index, eng.unpack(eng.one()))

    def gen(self, level_index):
        eng = self.engine(level_index)
        return TowerElement(level_index, eng.unpack(eng.gen()))

    def from_int(self, level_index, k):
        eng = self.engine(level_index)
        return TowerElement(level_index, eng.unpack(eng.from_int(k)))

    def element_from_index(self, level_index, k):
        eng = self.engine(level_index)
        if not 0 <= k < eng.size:
            raise ValueError("element index out of range")
        return TowerElement(level_index, eng.unpack(eng.from_index(k)))

    def index_of(self, x):
        eng = self.engine(x.level_index)
        return eng.index(eng.pack(x.coeffs))

    # -- field operations ----------------------------------------------------

    def _pair(self, a, b):
        if a.level_index != b.level_index:
            raise ValueError("operands live at different levels")
        return self.engine(a.level_index)

    def add(self, a, b):
        eng = self._pair(a, b)
        raw = eng.add(eng.pack(a.coeffs), eng.pack(b.coeffs))
        return TowerElement(a.level_index, eng.unpack(raw))

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def neg(self, a):
        eng = self.engine(a.level_index)
        return TowerElement(a.level_index, eng.unpack(eng.neg(eng.pack(a.coeffs))))

    def mul(self, a, b):
        eng = self._pair(a, b)
        raw = eng.mul(eng.pack(a.coeffs), eng.pack(b.coeffs))
        return TowerElement(a.level_index, eng.unpack(raw))

    def inv(self, a):
        eng = self.engine(a.level_index)
        return TowerElement(a.level_index, eng.unpack(eng.inv(eng.pack(a.coeffs))))

    def pow(self, a, e):
        eng = self.engine(a.level_index)
        return TowerElement(a.level_index, eng.unpack(eng.pow(eng.pack(a.coeffs), e)))

    def is_zero(self, a):
        return not any(a.coeffs)

    def frobenius(self, x, e=1):
        if e < 0:
            raise ValueError("Frobenius exponent must be >= 0")
        eng = self.engine(x.level_index)
        return TowerElement(x.level_index, eng.unpack(eng.frob(eng.pack(x.coeffs), e)))

    def in_subfield(self, x, m):
        n = self.degree(x.level_index)
        if n % m != 0:
            raise ValueError(f"{m} does not divide level degree {n}")
        return self.frobenius(x, m) == x

    # -- embeddings ----------------------------------------------------------

    def _gen_powers(self, i):
        """Powers r^0..r^{n_i - 1} of the level-i generator image inside
        level i+1, as raw values of level i+1."""
        if i not in self._embed_pows:
            eng_hi = self.engine(i + 1)
            r = eng_hi.pack(self.embeddings[i])
            pows = [eng_hi.one()]
            for _ in range(self.degree(i) - 1):
                pows.append(eng_hi.mul(pows[-1], r))
            self._embed_pows[i] = pows
        return self._embed_pows[i]

    def _embed_step(self, x):
        i = x.level_index
        eng_hi = self.engine(i + 1)
        pows = self._gen_powers(i)
        acc = eng_hi.zero()
        for c, pw in zip(x.coeffs, pows):
            if c:
                acc = eng_hi.add(acc, eng_hi.scalar(c, pw))
        return TowerElement(i + 1, eng_hi.unpack(acc))

    def embed(self, x, target_level):
        if target_level < x.level_index:
            raise ValueError("cannot embed downwards")
        while x.level_index < target_level:
            x = self._embed_step(x)
        return x

    # -- independence --------------------------------------------------------

    def subfield_rows(self, level_index, m):
        return self.engine(level_index).subfield_basis(m)

    def fp_independent_over(self, elements, m):
        """True iff no nontrivial GF(p)-combination of the tuple lies in
        GF(p^m): rank condition in the quotient by the subfield span."""
        elements = list(elements)
        if not elements:
            return True
        lvl = elements[0].level_index
        if any(e.level_index != lvl for e in elements):
            raise ValueError("tuple entries live at different levels")
        n = self.degree(lvl)
        if n % m != 0:
            raise ValueError(f"{m} does not divide level degree {n}")
        sub = self.subfield_rows(lvl, m)
        rows = list(sub) + [e.coeffs for e in elements]
        return linalg.span_dim(rows, self.p, n) == m + len(elements)

    def independent_over_rows(self, elements, avoid_rows):
        """Independence of a tuple modulo an arbitrary GF(p)-subspace."""
        elements = list(elements)
        if not elements:
            return True
        n = self.degree(elements[0].level_index)
        base = linalg.rref(avoid_rows, self.p, n)
        rows = list(base) + [e.coeffs for e in elements]
        return linalg.span_dim(rows, self.p, n) == len(base) + len(elements)

    # -- serialization -------------------------------------------------------

    def to_dict(self):
        return {
            "p": self.p,
            "levels": [{"n": n, "poly": list(mod)} for n, mod in self.levels],
            "embeddings": [list(e) for e in self.embeddings],
        }

    @classmethod
    def from_dict(cls, data, search_budget=DEFAULT_SEARCH_BUDGET):
        levels = [(lvl["n"], tuple(lvl["poly"])) for lvl in data["levels"]]
        config = TowerConfig(data["p"], levels[0][0], search_budget)
        tower = cls(config, levels, [tuple(e) for e in data["embeddings"]])
        tower.validate()
        return tower

    def validate(self):
        """Re-check chain invariants: divisibility, irreducibility, and that
        each stored embedding image is a root of the previous modulus."""
        self.config.validate()
        if len(self.embeddings) != len(self.levels) - 1:
            raise ValueError("one embedding per consecutive level pair required")
        for i, (n, mod) in enumerate(self.levels):
            if len(mod) != n + 1 or mod[-1] != 1:
                raise ValueError(f"level {i}: modulus is not monic of degree {n}")
            if not gfpoly.is_irreducible(mod, self.p):
                raise ValueError(f"level {i}: modulus is reducible")
            if i > 0:
                prev_n = self.levels[i - 1][0]
                if n % prev_n != 0 or n <= prev_n:
                    raise ValueError(f"level {i}: degree {n} breaks the chain")
                img = self.element(i, self.embeddings[i - 1])
                if not self.is_zero(self._eval_fp_poly(self.levels[i - 1][1], img)):
                    raise ValueError(f"level {i}: stored root fails the old modulus")

    def _eval_fp_poly(self, poly, x):
        eng = self.engine(x.level_index)
        acc = eng.zero()
        xr = eng.pack(x.coeffs)
        for c in reversed(poly):
            acc = eng.mul(acc, xr)
            if c:
                acc = eng.add(acc, eng.scalar(c, eng.one()))
        return TowerElement(x.level_index, eng.unpack(acc))


def create_tower(config):
    config.validate()
    f0 = gfpoly.least_irreducible(config.p, config.n0)
    return Tower(config, [(config.n0, f0)], [])


def grow(tower, multiplier):
    """Append a level of degree n_last * multiplier with the canonical
    modulus; the stored embedding is the smallest root of the previous
    modulus in the new level."""
    if multiplier < 2:
        raise ValueError("growth multiplier must be >= 2")
    n_new = tower.levels[-1][0] * multiplier
    if tower.p ** n_new > tower.config.search_budget:
        raise ValueError(
            f"budget exceeded: p^{n_new} > search budget {tower.config.search_budget}"
        )
    f_new = gfpoly.least_irreducible(tower.p, n_new)
    eng_new = _Level(tower.p, f_new)
    root = _least_root(tower.levels[-1][1], eng_new)
    new = Tower(
        tower.config,
        list(tower.levels) + [(n_new, f_new)],
        list(tower.embeddings) + [eng_new.unpack(root)],
        _engines=list(tower._engines) + [eng_new],
    )
    return new


# ---------------------------------------------------------------------------
# Root extraction in a level, used when growing the chain.

_root_cache = {}


def _least_root(f, eng):
    key = (eng.p, tuple(f), eng.modulus)
    if key not in _root_cache:
        roots = _roots_of_fp_poly(f, eng)
        if not roots:
            raise ArithmeticError("modulus has no root in the new level")
        _root_cache[key] = min(roots, key=eng.index)
    return _root_cache[key]


def _roots_of_fp_poly(f, eng):
    """All roots in the level of an irreducible f over GF(p) whose degree
    divides the level degree."""
    d = gfpoly.degree(f)
    if d == 1:
        return [eng.neg(eng.scalar(f[0], eng.one()))]
    if eng.size <= _ROOT_SCAN_LIMIT:
        out = []
        for k in range(eng.size):
            x = eng.from_index(k)
            if not eng.nonzero(_eval_fp_poly_raw(f, x, eng)):
                out.append(x)
        return out
    r = _one_root_split(f, eng)
    orbit = {r}
    x = r
    for _ in range(d - 1):
        x = eng.frob(x)
        orbit.add(x)
    return sorted(orbit, key=eng.index)


def _eval_fp_poly_raw(f, x, eng):
    acc = eng.zero()
    for c in reversed(f):
        acc = eng.mul(acc, x)
        if c:
            acc = eng.add(acc, eng.scalar(c, eng.one()))
    return acc


# polynomials over a level: lists of raw coefficients, low degree first

def _ltrim(g, eng):
    while g and not eng.nonzero(g[-1]):
        g.pop()
    return g


def _lmod(a, g, eng):
    a = list(a)
    dg = len(g) - 1
    inv_lead = eng.inv(g[-1])
    while len(a) - 1 >= dg:
        _ltrim(a, eng)
        if len(a) - 1 < dg:
            break
        c = eng.mul(a[-1], inv_lead)
        shift = len(a) - 1 - dg
        for i, b in enumerate(g):
            a[shift + i] = eng.add(a[shift + i], eng.neg(eng.mul(c, b)))
        a.pop()
        _ltrim(a, eng)
    return a


def _lmul(a, b, eng):
    if not a or not b:
        return []
    out = [eng.zero()] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if eng.nonzero(x):
            for j, y in enumerate(b):
                out[i + j] = eng.add(out[i + j], eng.mul(x, y))
    return _ltrim(out, eng)


def _lgcd(a, b, eng):
    a, b = list(a), list(b)
    while _ltrim(b, eng):
        a, b = b, _lmod(a, b, eng)
    return _ltrim(a, eng)


def _lift_fp_poly(f, eng):
    return _ltrim([eng.scalar(c, eng.one()) for c in f], eng)


def _one_root_split(f, eng):
    """One root of f (irreducible over GF(p), splitting in the level) by
    deterministic gcd splitting; trace maps in characteristic 2,
    an exponent-(q-1)/2 power map otherwise.

    In characteristic 2 every trace polynomial is computed modulo f
    itself, whose GF(2) coefficients make the squaring steps pure XOR
    work; the result is then reduced modulo the current factor."""
    g = _lift_fp_poly(f, eng)
    attempt = 2
    while len(g) - 1 > 1:
        u = eng.from_index(attempt)
        attempt += 1
        if not eng.nonzero(u):
            continue
        if eng.p == 2:
            acc = _trace_poly_f2(f, u, eng)
            if len(g) - 1 < len(f) - 1:
                acc = _lmod(acc, g, eng)
            acc = _ltrim(list(acc), eng)
            d = _lgcd(list(g), acc, eng)
            if not 0 < len(d) - 1 < len(g) - 1:
                continue
            d = _lmonic(d, eng)
        else:
            d = _power_split(g, u, eng)
            if d is None:
                continue
        if 2 * (len(d) - 1) <= len(g) - 1:
            g = d
        else:
            g = _ldiv_exact(g, d, eng)
    # monic linear: X + a0 -> root -a0
    lead_inv = eng.inv(g[1])
    return eng.neg(eng.mul(g[0], lead_inv))


def _trace_poly_f2(f, u, eng):
    """Absolute-trace polynomial Tr(u X) reduced mod f, computed with the
    GF(2) reduction rows of f (char 2 only)."""
    fI = gfpoly.poly_to_int(f, 2)
    dg = len(f) - 1
    rows = {k: gfpoly.mod2(1 << k, fI) for k in range(dg, 2 * dg - 1)}
    t = [eng.zero()] * dg
    t[1] = u  # u*X mod f (dg >= 2 here)
    acc = list(t)
    for _ in range(eng.n - 1):
        new = [eng.zero()] * dg
        for i, c in enumerate(t):
            if not eng.nonzero(c):
                continue
            sq = eng.square(c)
            e = 2 * i
            if e < dg:
                new[e] = eng.add(new[e], sq)
            else:
                row = rows[e]
                j = 0
                while row:
                    if row & 1:
                        new[j] = eng.add(new[j], sq)
                    row >>= 1
                    j += 1
        t = new
        acc = [eng.add(x, y) for x, y in zip(acc, t)]
    return acc


def _ldiv_exact(a, b, eng):
    a = list(a)
    dg = len(b) - 1
    inv_lead = eng.inv(b[-1])
    out = [eng.zero()] * max(len(a) - dg, 0)
    while True:
        _ltrim(a, eng)
        if len(a) - 1 < dg:
            break
        c = eng.mul(a[-1], inv_lead)
        shift = len(a) - 1 - dg
        out[shift] = c
        for i, y in enumerate(b):
            a[shift + i] = eng.add(a[shift + i], eng.neg(eng.mul(c, y)))
    return _ltrim(out, eng)


def _ladd(a, b, eng):
    n = max(len(a), len(b))
    a = list(a) + [eng.zero()] * (n - len(a))
    b = list(b) + [eng.zero()] * (n - len(b))
    return _ltrim([eng.add(x, y) for x, y in zip(a, b)], eng)


def _lmonic(g, eng):
    inv = eng.inv(g[-1])
    return [eng.mul(c, inv) for c in g]


def _power_split(g, u, eng):
    """gcd(g, (X+u)^((q-1)/2) - 1); odd characteristic."""
    e = (eng.size - 1) // 2
    base = _lmod([u, eng.one()], g, eng)
    acc = [eng.one()]
    while e:
        if e & 1:
            acc = _lmod(_lmul(acc, base, eng), g, eng)
        base = _lmod(_lmul(base, base, eng), g, eng)
        e >>= 1
    acc = _ladd(acc, [eng.neg(eng.one())], eng)
    d = _lgcd(list(g), acc, eng)
    if 0 < len(d) - 1 < len(g) - 1:
        return _lmonic(d, eng)
    return None


def _trace_split_generic(g, u, eng):
    """gcd(g, Tr(u X)) for arbitrary level coefficients; char 2."""
    t = _lmod([eng.zero(), u], g, eng)
    acc = list(t)
    for _ in range(eng.n - 1):
        t = _lmod(_lmul(t, t, eng), g, eng)
        acc = _ladd(acc, t, eng)
    d = _lgcd(list(g), _ltrim(list(acc), eng), eng)
    if 0 < len(d) - 1 < len(g) - 1:
        return _lmonic(d, eng)
    return None


def level_poly_roots(eng, coeffs, max_degree=32):
    """All roots in the level of a univariate polynomial with level
    coefficients (low degree first).  Exact: restrict to the gcd with
    X^q - X, then split deterministically."""
    g = _ltrim(list(coeffs), eng)
    if not g:
        raise ValueError("zero polynomial has every element as a root")
    if len(g) - 1 == 0:
        return []
    if len(g) - 1 > max_degree:
        raise ValueError(f"degree {len(g) - 1} exceeds the root-finding bound")
    g = _lmonic(g, eng)
    # X^q mod g by iterated p-th powers
    t = _lmod([eng.zero(), eng.one()], g, eng)
    for _ in range(eng.n):
        if eng.p == 2:
            t = _lmod(_lmul(t, t, eng), g, eng)
        else:
            acc, base, e = [eng.one()], t, eng.p
            while e:
                if e & 1:
                    acc = _lmod(_lmul(acc, base, eng), g, eng)
                base = _lmod(_lmul(base, base, eng), g, eng)
                e >>= 1
            t = acc
    diff = _ladd(t, [eng.zero(), eng.neg(eng.one())], eng)
    h = _lgcd(list(g), diff, eng)
    if len(h) - 1 <= 0:
        return []
    roots = []
    stack = [_lmonic(h, eng)]
    while stack:
        f = stack.pop()
        d = len(f) - 1
        if d == 1:
            roots.append(eng.neg(eng.mul(f[0], eng.inv(f[1]))))
            continue
        attempt, found = 1, None
        while found is None:
            if attempt > 64 * max(eng.n, 4):
                raise ArithmeticError("root splitting failed to converge")
            idx = attempt if attempt < eng.size else 1 + attempt % (eng.size - 1)
            u = eng.from_index(idx)
            attempt += 1
            if not eng.nonzero(u):
                continue
            if eng.p == 2:
                found = _trace_split_generic(f, u, eng)
            else:
                found = _power_split(f, u, eng)
        stack.append(found)
        stack.append(_lmonic(_ldiv_exact(f, found, eng), eng))
    return sorted(roots, key=eng.index)
