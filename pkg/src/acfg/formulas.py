"""Polynomial formulas over the tower: parsing, evaluation, exhaustive and
guided solving, witness searches with linear-independence side conditions,
and the linear-factor flatness decision.

Formula grammar (quantifier-free conjunctions):

    literal   := expr | expr '=' expr | expr '!=' expr     (bare expr means = 0)
    expr      := ['-'] term (('+'|'-') term)*
    term      := factor ('*' factor)*
    factor    := integer | variable ['^' integer]
    variable  := x<k> or y<k>, 1-based

Coefficients are reduced mod p; literals are joined by '&'.  Witness
variables are the x's, parameters the y's.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import product

from . import linalg
from .tower import TowerElement, grow, level_poly_roots


class FormulaError(ValueError):
    pass


class BudgetError(RuntimeError):
    """A bounded search ran out of its declared budget."""


# ---------------------------------------------------------------------------
# Symbolic polynomials over GF(p) in x- and y-variables.

@dataclass(frozen=True)
class Poly:
    p: int
    nx: int
    ny: int
    terms: tuple  # sorted ((exps tuple of len nx+ny), coeff) pairs, coeff != 0

    @staticmethod
    def from_dict(p, nx, ny, mono):
        terms = tuple(sorted((e, c % p) for e, c in mono.items() if c % p))
        return Poly(p, nx, ny, terms)

    def is_zero(self):
        return not self.terms

    def with_arity(self, nx, ny):
        if nx < self.nx or ny < self.ny:
            raise FormulaError("cannot shrink polynomial arity")
        terms = {}
        for exps, c in self.terms:
            ex, ey = exps[: self.nx], exps[self.nx:]
            new = ex + (0,) * (nx - self.nx) + ey + (0,) * (ny - self.ny)
            terms[new] = c
        return Poly.from_dict(self.p, nx, ny, terms)

    def var_name(self, i):
        return f"x{i + 1}" if i < self.nx else f"y{i - self.nx + 1}"

    def text(self):
        if not self.terms:
            return "0"
        parts = []
        for exps, c in self.terms:
            factors = []
            if c != 1 or not any(exps):
                factors.append(str(c))
            for i, e in enumerate(exps):
                if e == 1:
                    factors.append(self.var_name(i))
                elif e > 1:
                    factors.append(f"{self.var_name(i)}^{e}")
            parts.append("*".join(factors))
        return " + ".join(parts)


_TOKEN = re.compile(r"\s*(?:(?P<int>[0-9]+)|(?P<var>[xy][0-9]+)|(?P<op>\^|\*|\+|-|!=|=|&)|(?P<bad>\S))")


def _tokenize(text):
    out = []
    for m in _TOKEN.finditer(text):
        if m.lastgroup == "bad":
            raise FormulaError(f"unexpected character {m.group('bad')!r}")
        out.append((m.lastgroup, m.group(m.lastgroup)))
    return out


def _parse_expr(tokens, pos, p):
    """Returns (monomial dict keyed by (x-exps dict, y-exps dict), new pos)."""
    mono = {}
    sign = 1
    first = True
    while pos < len(tokens):
        kind, val = tokens[pos]
        if kind == "op" and val in "+-":
            sign = 1 if val == "+" else -1
            pos += 1
        elif not first:
            break
        # parse one term
        coeff = sign
        powers = {}
        saw_factor = False
        while pos < len(tokens):
            kind, val = tokens[pos]
            if kind == "int":
                coeff *= int(val)
                pos += 1
                saw_factor = True
            elif kind == "var":
                var = val
                pos += 1
                e = 1
                if pos < len(tokens) and tokens[pos] == ("op", "^"):
                    pos += 1
                    if pos >= len(tokens) or tokens[pos][0] != "int":
                        raise FormulaError("exponent expected after '^'")
                    e = int(tokens[pos][1])
                    pos += 1
                powers[var] = powers.get(var, 0) + e
                saw_factor = True
            elif kind == "op" and val == "*":
                pos += 1
                continue
            else:
                break
        if not saw_factor:
            raise FormulaError("empty term in expression")
        key = tuple(sorted(powers.items()))
        mono[key] = mono.get(key, 0) + coeff
        sign = 1
        first = False
        if pos < len(tokens) and tokens[pos][0] == "op" and tokens[pos][1] in "+-":
            continue
        break
    return mono, pos


def _mono_to_poly(mono, p):
    nx = ny = 0
    for key in mono:
        for var, _ in key:
            idx = int(var[1:])
            if idx < 1:
                raise FormulaError(f"unknown variable {var!r}")
            if var[0] == "x":
                nx = max(nx, idx)
            else:
                ny = max(ny, idx)
    out = {}
    for key, c in mono.items():
        exps = [0] * (nx + ny)
        for var, e in key:
            idx = int(var[1:]) - 1
            exps[idx if var[0] == "x" else nx + idx] = e
        out[tuple(exps)] = out.get(tuple(exps), 0) + c
    return Poly.from_dict(p, nx, ny, out)


def parse_poly(text, p, allow_params=True):
    tokens = _tokenize(text)
    mono, pos = _parse_expr(tokens, 0, p)
    if pos != len(tokens):
        raise FormulaError(f"trailing input near token {tokens[pos]}")
    poly = _mono_to_poly(mono, p)
    if not allow_params and poly.ny:
        raise FormulaError("parameter variables y<k> are not allowed here")
    return poly


@dataclass(frozen=True)
class QFConjunction:
    p: int
    nx: int
    ny: int
    equations: tuple
    inequations: tuple
    witness_split: int = 0
    parameter_split: int = 0

    def __post_init__(self):
        if not self.equations and not self.inequations:
            raise FormulaError("a conjunction needs at least one literal")
        if not 0 <= self.witness_split <= self.nx:
            raise FormulaError("witness split out of range")
        if not 0 <= self.parameter_split <= self.ny:
            raise FormulaError("parameter split out of range")

    def text(self):
        lits = [f"{e.text()} = 0" for e in self.equations]
        lits += [f"{q.text()} != 0" for q in self.inequations]
        return " & ".join(lits)


def parse_conjunction(text, p, witness_split=0, parameter_split=0):
    eqs, ineqs = [], []
    for chunk in text.split("&"):
        chunk = chunk.strip()
        if not chunk:
            raise FormulaError("empty literal")
        tokens = _tokenize(chunk)
        lhs, pos = _parse_expr(tokens, 0, p)
        op = "="
        if pos < len(tokens):
            kind, val = tokens[pos]
            if kind != "op" or val not in ("=", "!="):
                raise FormulaError(f"expected '=' or '!=' near {val!r}")
            op = val
            rhs, pos = _parse_expr(tokens, pos + 1, p)
            if pos != len(tokens):
                raise FormulaError("trailing input after literal")
            for key, c in rhs.items():
                lhs[key] = lhs.get(key, 0) - c
        poly = _mono_to_poly(lhs, p)
        (eqs if op == "=" else ineqs).append(poly)
    nx = max((q.nx for q in eqs + ineqs), default=0)
    ny = max((q.ny for q in eqs + ineqs), default=0)
    eqs = tuple(q.with_arity(nx, ny) for q in eqs)
    ineqs = tuple(q.with_arity(nx, ny) for q in ineqs)
    return QFConjunction(p, nx, ny, eqs, ineqs, witness_split, parameter_split)


# ---------------------------------------------------------------------------
# Level polynomials: coefficients are raw level values, variables x only.

class LevelPoly:
    __slots__ = ("eng", "arity", "mono")

    def __init__(self, eng, arity, mono):
        self.eng = eng
        self.arity = arity
        self.mono = {e: c for e, c in mono.items() if eng.nonzero(c)}

    def is_constant(self):
        return all(not any(e) for e in self.mono)

    def constant_value(self):
        return self.mono.get((0,) * self.arity, self.eng.zero())

    def substitute(self, var, value):
        out = {}
        eng = self.eng
        pow_cache = {0: eng.one()}
        for exps, c in self.mono.items():
            e = exps[var]
            if e:
                if e not in pow_cache:
                    pow_cache[e] = eng.pow(value, e)
                c = eng.mul(c, pow_cache[e])
                exps = exps[:var] + (0,) + exps[var + 1:]
            out[exps] = eng.add(out.get(exps, eng.zero()), c)
        return LevelPoly(eng, self.arity, out)

    def eval(self, values):
        acc = self.eng.zero()
        for exps, c in self.mono.items():
            t = c
            for v, e in zip(values, exps):
                if e:
                    t = self.eng.mul(t, self.eng.pow(v, e))
            acc = self.eng.add(acc, t)
        return acc

    def univariate_var(self):
        """Index of the single variable appearing, or None."""
        seen = None
        for exps in self.mono:
            for i, e in enumerate(exps):
                if e:
                    if seen is None:
                        seen = i
                    elif seen != i:
                        return None
        return seen

    def univariate_coeffs(self, var):
        deg = max((e[var] for e in self.mono), default=0)
        out = [self.eng.zero()] * (deg + 1)
        for exps, c in self.mono.items():
            out[exps[var]] = self.eng.add(out[exps[var]], c)
        return out

    def add(self, other):
        out = dict(self.mono)
        for e, c in other.mono.items():
            out[e] = self.eng.add(out.get(e, self.eng.zero()), c)
        return LevelPoly(self.eng, self.arity, out)

    def mul(self, other):
        out = {}
        eng = self.eng
        for e1, c1 in self.mono.items():
            for e2, c2 in other.mono.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = eng.add(out.get(e, eng.zero()), eng.mul(c1, c2))
        return LevelPoly(eng, self.arity, out)

    def scale(self, c):
        return LevelPoly(self.eng, self.arity,
                         {e: self.eng.mul(c, v) for e, v in self.mono.items()})

    def neg(self):
        return LevelPoly(self.eng, self.arity,
                         {e: self.eng.neg(v) for e, v in self.mono.items()})

    def total_degree(self):
        return max((sum(e) for e in self.mono), default=0)

    def key(self):
        return tuple(sorted((e, self.eng.unpack(c)) for e, c in self.mono.items()))


def poly_to_level(tower, poly, level_index, params=None):
    """Instantiate a Poly at a level: y-variables replaced by the given
    parameter elements (embedded up), coefficients become level values."""
    eng = tower.engine(level_index)
    params = list(params or [])
    if len(params) != poly.ny:
        raise FormulaError(f"expected {poly.ny} parameters, got {len(params)}")
    vals = []
    for b in params:
        if b.level_index > level_index:
            raise FormulaError("parameter lives above the target level")
        vals.append(eng.pack(tower.embed(b, level_index).coeffs))
    out = {}
    for exps, c in poly.terms:
        ex, ey = exps[: poly.nx], exps[poly.nx:]
        raw = eng.scalar(c, eng.one())
        for v, e in zip(vals, ey):
            if e:
                raw = eng.mul(raw, eng.pow(v, e))
        out[ex] = eng.add(out.get(ex, eng.zero()), raw)
    return LevelPoly(eng, poly.nx, out)


def conjunction_to_level(tower, conj, b, level_index):
    eqs = [poly_to_level(tower, q, level_index, b) for q in conj.equations]
    ineqs = [poly_to_level(tower, q, level_index, b) for q in conj.inequations]
    return eqs, ineqs


def eval_poly(tower, poly, assignment):
    """Exact evaluation; assignment maps variable names to TowerElements
    at a common level."""
    names = [f"x{i+1}" for i in range(poly.nx)] + [f"y{j+1}" for j in range(poly.ny)]
    missing = [v for v in names if v not in assignment]
    if missing:
        raise FormulaError(f"missing variables: {', '.join(missing)}")
    if not names:
        raise FormulaError("cannot evaluate a variable-free polynomial without a level")
    levels = {assignment[v].level_index for v in names}
    if len(levels) > 1:
        raise FormulaError("assignment mixes levels")
    return _eval_poly_at(tower, poly, [assignment[v] for v in names], levels.pop())


def _eval_poly_at(tower, poly, values, level_index):
    eng = tower.engine(level_index)
    raws = [eng.pack(v.coeffs) for v in values]
    acc = eng.zero()
    for exps, c in poly.terms:
        t = eng.scalar(c, eng.one())
        for v, e in zip(raws, exps):
            if e:
                t = eng.mul(t, eng.pow(v, e))
        acc = eng.add(acc, t)
    return TowerElement(level_index, eng.unpack(acc))


# ---------------------------------------------------------------------------
# Exhaustive solving.

DEFAULT_SOLVE_BUDGET = 2 ** 20


def satisfies(tower, conj, witness, b):
    """Re-evaluate every literal of the conjunction at a witness tuple."""
    lvl = witness[0].level_index if witness else b[0].level_index
    eqs, ineqs = conjunction_to_level(tower, conj, b, lvl)
    eng = tower.engine(lvl)
    raws = [eng.pack(tower.embed(w, lvl).coeffs) for w in witness]
    return all(not eng.nonzero(q.eval(raws)) for q in eqs) and all(
        eng.nonzero(q.eval(raws)) for q in ineqs
    )


def solve(tower, conj, b, level_index, budget=DEFAULT_SOLVE_BUDGET):
    """All witness tuples at a level, by exhaustive enumeration in
    base-p counter order (first coordinate slowest)."""
    eng = tower.engine(level_index)
    total = eng.size ** conj.nx
    if total > budget:
        raise BudgetError(
            f"{total} assignments exceed the solve budget {budget}")
    eqs, ineqs = conjunction_to_level(tower, conj, b, level_index)
    out = []
    for idx in product(range(eng.size), repeat=conj.nx):
        raws = [eng.from_index(k) for k in idx]
        if all(not eng.nonzero(q.eval(raws)) for q in eqs) and all(
            eng.nonzero(q.eval(raws)) for q in ineqs
        ):
            out.append(tuple(TowerElement(level_index, eng.unpack(r)) for r in raws))
    return out


# ---------------------------------------------------------------------------
# Guided witness search with independence side conditions.

@dataclass
class SearchBudgets:
    max_degree: int = 512
    free_cap: int = 4096          # candidates per free variable at large levels
    root_scan_cap: int = 2 ** 16  # field size allowing exhaustive root scans
    node_cap: int = 200_000       # DFS nodes per level
    full_enum_cap: int = 2 ** 16  # field size allowing full free enumeration


@dataclass
class ThetaOutcome:
    status: str                   # found | not_found | budget_exceeded
    witness: tuple = ()
    level_index: int = -1
    searched_degrees: tuple = ()
    incomplete_degrees: tuple = ()

    @property
    def found(self):
        return self.status == "found"


class _DFS:
    def __init__(self, eng, eqs, ineqs, nx, predicate, budgets):
        self.eng = eng
        self.nx = nx
        self.predicate = predicate
        self.budgets = budgets
        self.incomplete = False
        self.nodes = 0
        self.result = None
        self._run([None] * nx, eqs, ineqs)

    def _run(self, assign, eqs, ineqs):
        if self.result is not None:
            return
        self.nodes += 1
        if self.nodes > self.budgets.node_cap:
            self.incomplete = True
            return
        eng = self.eng
        live_eqs, live_ineqs = [], []
        for q in eqs:
            if q.is_constant():
                if eng.nonzero(q.constant_value()):
                    return
            else:
                live_eqs.append(q)
        for q in ineqs:
            if q.is_constant():
                if not eng.nonzero(q.constant_value()):
                    return
            else:
                live_ineqs.append(q)
        free = [i for i, v in enumerate(assign) if v is None]
        if not free:
            wit = tuple(assign)
            if self.predicate(wit):
                self.result = wit
            return
        var, candidates, complete = self._choose(free, live_eqs)
        if not complete:
            self.incomplete = True
        for val in candidates:
            nxt = list(assign)
            nxt[var] = val
            self._run(
                nxt,
                [q.substitute(var, val) for q in live_eqs],
                [q.substitute(var, val) for q in live_ineqs],
            )
            if self.result is not None:
                return

    def _choose(self, free, eqs):
        eng = self.eng
        linear, pinned = None, None
        for q in eqs:
            v = q.univariate_var()
            if v is None or v not in free:
                continue
            coeffs = q.univariate_coeffs(v)
            deg = len(coeffs) - 1
            if deg == 1:
                if linear is None or v < linear[0]:
                    linear = (v, coeffs)
            elif deg >= 2 and deg <= self.budgets.pin_degree_cap:
                if pinned is None or v < pinned[0]:
                    pinned = (v, coeffs)
        if linear is not None:
            v, coeffs = linear
            root = eng.mul(eng.neg(coeffs[0]), eng.inv(coeffs[1]))
            return v, [root], True
        if pinned is not None:
            v, coeffs = pinned
            return v, level_poly_roots(eng, coeffs, self.budgets.pin_degree_cap), True
        v = free[0]
        if eng.size <= self.budgets.full_enum_cap:
            return v, (eng.from_index(k) for k in range(eng.size)), True
        cap = min(eng.size, self.budgets.free_cap)
        return v, (eng.from_index(k) for k in range(cap)), False


def search_witness_at_level(tower, conj, b, level_index, avoid_rows, budgets):
    """First witness (in guided deterministic order) of the conjunction at
    a level whose tuple is GF(p)-independent over the span of avoid_rows.
    Returns (witness | None, search_was_complete)."""
    eng = tower.engine(level_index)
    n = tower.degree(level_index)
    base = linalg.rref(avoid_rows, tower.p, n)
    if len(base) + conj.nx > n:
        return None, True  # no room in the quotient: conclusively empty
    checker = linalg.make_independence_checker(base, tower.p, n)
    eqs, ineqs = conjunction_to_level(tower, conj, b, level_index)

    def predicate(raws):
        return checker([eng.unpack(r) for r in raws])

    dfs = _DFS(eng, eqs, ineqs, conj.nx, predicate, budgets)
    if dfs.result is not None:
        wit = tuple(TowerElement(level_index, eng.unpack(r)) for r in dfs.result)
        return wit, True
    return None, not dfs.incomplete


def theta_search(tower, conj, b, base_degree, budgets=None, avoid_elements=()):
    """Scan chain levels above base_degree (growing the tower as needed)
    for a witness tuple independent over GF(p^base_degree) together with
    any extra avoid elements.  A Found outcome is sound; not_found only
    means "not within the declared bounds".  Returns (outcome, tower)."""
    budgets = budgets or SearchBudgets()
    searched, incomplete = [], []
    level = 0
    while True:
        while level < tower.level_count():
            deg = tower.degree(level)
            if deg > base_degree:
                rows = list(tower.subfield_rows(level, base_degree))
                for e in avoid_elements:
                    rows.append(tower.embed(e, level).coeffs)
                wit, complete = search_witness_at_level(
                    tower, conj, b, level, rows, budgets)
                searched.append(deg)
                if wit is not None:
                    return (
                        ThetaOutcome("found", wit, level,
                                     tuple(searched), tuple(incomplete)),
                        tower,
                    )
                if not complete:
                    incomplete.append(deg)
            level += 1
        next_deg = tower.degree(tower.level_count() - 1) * 2
        if next_deg > budgets.max_degree:
            status = "budget_exceeded" if incomplete else "not_found"
            return (
                ThetaOutcome(status, (), -1, tuple(searched), tuple(incomplete)),
                tower,
            )
        if tower.p ** next_deg > tower.config.search_budget:
            return (
                ThetaOutcome("budget_exceeded", (), -1,
                             tuple(searched), tuple(incomplete)),
                tower,
            )
        tower = grow(tower, 2)


def find_joint_independent_solutions(tower, conj, b, count, base_degree,
                                     budgets=None):
    """`count` witness tuples whose concatenated entries are jointly
    independent over GF(p^base_degree): each search avoids the subfield
    plus all previously found entries.  Returns (tower, level_index,
    matrix) with every row embedded at the final level."""
    budgets = budgets or SearchBudgets()
    rows, avoid = [], []
    level = -1
    for _ in range(count):
        outcome, tower = theta_search(
            tower, conj, b, base_degree, budgets, avoid_elements=avoid)
        if not outcome.found:
            raise BudgetError(
                f"witness search exhausted ({outcome.status}) after "
                f"{len(rows)} of {count} solutions")
        rows.append(outcome.witness)
        avoid.extend(outcome.witness)
        level = max(level, outcome.level_index)
    if count == 0:
        return tower, tower.level_count() - 1, []
    matrix = [tuple(tower.embed(w, level) for w in row) for row in rows]
    return tower, level, matrix


# ---------------------------------------------------------------------------
# Flatness: is every irreducible factor a GF(p)-linear form minus a constant?

@dataclass(frozen=True)
class FlatnessVerdict:
    flat: bool
    factors: tuple = ()        # (lambda tuple, constant TowerElement, multiplicity)
    constant: object = None    # leading TowerElement when flat
    reason: str = ""
    residual: object = None    # unfactored LevelPoly when not flat

    def factor_payload(self):
        out = []
        for lam, b, mult in self.factors:
            out.append({"lambda": list(lam), "b": list(b.coeffs), "multiplicity": mult})
        return out


def _normalized_lambdas(p, n):
    """Nonzero vectors of F_p^n with first nonzero coordinate 1, ordered
    by the coefficient vector read as a base-p integer."""
    out = []
    for idx in product(*[range(p)] * n):
        lam = tuple(idx)
        pivot = next((i for i, c in enumerate(lam) if c), None)
        if pivot is None or lam[pivot] != 1:
            continue
        key = sum(c * p ** i for i, c in enumerate(lam))
        out.append((key, lam, pivot))
    out.sort()
    return [(lam, pivot) for _, lam, pivot in out]


def _divmod_linear(q, lam, pivot, b_raw):
    """Division of q by the linear form sum(lam_i X_i) - b with
    lam[pivot] == 1: substitute X_pivot <- b - sum(других lam_i X_i) via
    Horner.  Returns (quotient, remainder)."""
    eng = q.eng
    arity = q.arity
    sub = {(0,) * arity: b_raw}
    for i, c in enumerate(lam):
        if i != pivot and c:
            e = tuple(1 if j == i else 0 for j in range(arity))
            sub[e] = eng.scalar(-c % eng.p, eng.one())
    line = LevelPoly(eng, arity, sub)
    deg = max((e[pivot] for e in q.mono), default=0)
    coeffs = [LevelPoly(eng, arity, {}) for _ in range(deg + 1)]
    for exps, c in q.mono.items():
        e = exps[pivot]
        rest = exps[:pivot] + (0,) + exps[pivot + 1:]
        coeffs[e] = coeffs[e].add(LevelPoly(eng, arity, {rest: c}))
    quot = LevelPoly(eng, arity, {})
    acc = LevelPoly(eng, arity, {})
    for j in range(deg, 0, -1):
        acc = acc.add(coeffs[j])
        e_piv = tuple(j - 1 if i == pivot else 0 for i in range(arity))
        quot = quot.add(acc.mul(LevelPoly(eng, arity, {e_piv: eng.one()})))
        acc = acc.mul(line)
    rem = acc.add(coeffs[0])
    return quot, rem


def is_fp_flat(tower, poly, level_index, budget=DEFAULT_SOLVE_BUDGET):
    """Decide whether the polynomial is a constant times a product of
    GF(p)-linear forms minus constants at the declared level.

    For each pivot-normalised nonzero lambda the pivot variable is
    eliminated with a symbolic constant; common roots of the resulting
    coefficient polynomials (exhaustive scan over the level) are the
    admissible constants, and each linear factor is divided out to full
    multiplicity.  Flat iff a nonzero constant remains.
    """
    if poly.ny:
        raise FormulaError("flatness applies to witness-variable polynomials")
    q = poly_to_level(tower, poly, level_index, [])
    return is_fp_flat_level(tower, q, level_index, budget)


def is_fp_flat_level(tower, q, level_index, budget=DEFAULT_SOLVE_BUDGET):
    eng = tower.engine(level_index)
    nvars = q.arity
    if not q.mono:
        return FlatnessVerdict(False, reason="zero-polynomial")
    if q.is_constant():
        c = TowerElement(level_index, eng.unpack(q.constant_value()))
        return FlatnessVerdict(True, (), c, reason="nonzero-constant")
    if eng.size > budget:
        raise BudgetError(
            f"root scan over {eng.size} elements exceeds the budget {budget}")
    factors = []
    for lam, pivot in _normalized_lambdas(tower.p, nvars):
        if q.is_constant():
            break
        # symbolic constant: extra variable at index nvars
        wide = LevelPoly(eng, nvars + 1, {e + (0,): c for e, c in q.mono.items()})
        sub = {tuple(0 if i != nvars else 1 for i in range(nvars + 1)): eng.one()}
        for i, c in enumerate(lam):
            if i != pivot and c:
                e = tuple(1 if j == i else 0 for j in range(nvars + 1))
                sub[e] = eng.scalar(-c % eng.p, eng.one())
        # substitute X_pivot <- line directly via Horner on the widened poly
        line = LevelPoly(eng, nvars + 1, sub)
        deg = max((e[pivot] for e in wide.mono), default=0)
        coeffs = [LevelPoly(eng, nvars + 1, {}) for _ in range(deg + 1)]
        for exps, c in wide.mono.items():
            e = exps[pivot]
            rest = exps[:pivot] + (0,) + exps[pivot + 1:]
            coeffs[e] = coeffs[e].add(LevelPoly(eng, nvars + 1, {rest: c}))
        rem = coeffs[deg]
        for j in range(deg - 1, -1, -1):
            rem = rem.mul(line).add(coeffs[j])
        # group by the x-monomials; coefficients are univariate in b
        by_x = {}
        for exps, c in rem.mono.items():
            xpart, bexp = exps[:nvars], exps[nvars]
            by_x.setdefault(xpart, {})[bexp] = c
        coeff_polys = []
        for xpart, bpoly in sorted(by_x.items()):
            d = max(bpoly)
            coeff_polys.append([bpoly.get(i, eng.zero()) for i in range(d + 1)])
        roots = []
        for k in range(eng.size):
            x = eng.from_index(k)
            ok = True
            for cp in coeff_polys:
                acc = eng.zero()
                for c in reversed(cp):
                    acc = eng.add(eng.mul(acc, x), c)
                if eng.nonzero(acc):
                    ok = False
                    break
            if ok:
                roots.append(x)
        for b_raw in roots:
            mult = 0
            while True:
                quot, rem2 = _divmod_linear(q, lam, pivot, b_raw)
                if rem2.mono:
                    break
                q = quot
                mult += 1
            if mult:
                b_el = TowerElement(level_index, eng.unpack(b_raw))
                factors.append((lam, b_el, mult))
    if q.is_constant() and eng.nonzero(q.constant_value()):
        c = TowerElement(level_index, eng.unpack(q.constant_value()))
        return FlatnessVerdict(True, tuple(factors), c)
    return FlatnessVerdict(
        False,
        tuple(factors),
        reason="residual factor with no linear factor at this level",
        residual=q,
    )


def flatness_reconstruct(tower, verdict, level_index, nvars):
    """Expand constant * prod (lambda . X - b)^mult back into a LevelPoly."""
    eng = tower.engine(level_index)
    acc = LevelPoly(eng, nvars, {(0,) * nvars: eng.pack(verdict.constant.coeffs)})
    for lam, b, mult in verdict.factors:
        mono = {(0,) * nvars: eng.neg(eng.pack(b.coeffs))}
        for i, c in enumerate(lam):
            if c:
                e = tuple(1 if j == i else 0 for j in range(nvars))
                mono[e] = eng.scalar(c, eng.one())
        lin = LevelPoly(eng, nvars, mono)
        for _ in range(mult):
            acc = acc.mul(lin)
    return acc
