"""Exact sparse polynomial algebra over the jet-space symbol universe.

Symbols are plain tuples tagged by a kind string:

    ('x', nu)                    coordinate x_nu
    ('A', a, sigma)              gauge potential A_{a sigma}
    ('u', a, sigma, lam)         jet variable for d_lam A_{a sigma}
    ('H', kappa)                 coordinate component of a generator
    ('dH', kappa, lam)           d_lam H_kappa
    ('dHdA', kappa, n, alpha)    dH_kappa / dA_{n alpha}
    ('Phi', a, kappa)            field component of a generator
    ('dPhi', a, kappa, lam)      d_lam Phi_{a kappa}
    ('dPhidA', a, kappa, n, al)  dPhi_{a kappa} / dA_{n alpha}
    ('S', n, lam, alpha)         symmetric jet combination, lam <= alpha,
                                 standing for d_lam A_{n alpha} + d_alpha A_{n lam}
    ('T', n, i)                  i-th independent antisymmetric jet combination
    ('par', name)                free named parameter

A Monomial is a tuple of (symbol, positive exponent) pairs sorted by
symbol; the empty tuple is the unit monomial.  An Expression maps
monomials to nonzero Fraction coefficients, so equal polynomials have
identical dict contents regardless of how they were assembled.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .tensors import check_gauge, check_spacetime

UNIT = ()

KINDS = ("x", "A", "u", "H", "dH", "dHdA", "Phi", "dPhi", "dPhidA", "S", "T", "par")

UNKNOWN_KINDS = frozenset(("H", "dH", "dHdA", "Phi", "dPhi", "dPhidA"))

JET_BASIS_KINDS = frozenset(("S", "T"))


class UnknownSymbolKind(ValueError):
    """A symbol tuple carries a kind outside the declared universe."""


def coord(nu):
    check_spacetime(nu)
    return ("x", nu)


def field(a, sigma):
    check_spacetime(sigma)
    return ("A", a, sigma)


def jet(a, sigma, lam):
    check_spacetime(sigma, lam)
    return ("u", a, sigma, lam)


def h_val(kappa):
    check_spacetime(kappa)
    return ("H", kappa)


def h_dx(kappa, lam):
    check_spacetime(kappa, lam)
    return ("dH", kappa, lam)


def h_dA(kappa, n, alpha):
    check_spacetime(kappa, alpha)
    return ("dHdA", kappa, n, alpha)


def phi_val(a, kappa):
    check_spacetime(kappa)
    return ("Phi", a, kappa)


def phi_dx(a, kappa, lam):
    check_spacetime(kappa, lam)
    return ("dPhi", a, kappa, lam)


def phi_dA(a, kappa, n, alpha):
    check_spacetime(kappa, alpha)
    return ("dPhidA", a, kappa, n, alpha)


def sym_jet(n, lam, alpha):
    check_spacetime(lam, alpha)
    if lam > alpha:
        lam, alpha = alpha, lam
    return ("S", n, lam, alpha)


def anti_jet(n, i):
    if i not in (1, 2, 3):
        raise UnknownSymbolKind(f"antisymmetric basis label {i} outside 1..3")
    return ("T", n, i)


def param(name):
    return ("par", str(name))


def mono(symbol, exp=1):
    return ((symbol, exp),)


def mono_mul(m1, m2):
    if not m1:
        return m2
    if not m2:
        return m1
    merged = dict(m1)
    for s, e in m2:
        merged[s] = merged.get(s, 0) + e
    return tuple(sorted(merged.items()))


def mono_degree(m, kinds=None):
    if kinds is None:
        return sum(e for _, e in m)
    return sum(e for s, e in m if s[0] in kinds)


def _acc(out, monomial, coefficient):
    v = out.get(monomial)
    if v is None:
        if coefficient:
            out[monomial] = coefficient
    else:
        v = v + coefficient
        if v:
            out[monomial] = v
        else:
            del out[monomial]


def _coerce(value):
    if isinstance(value, Expression):
        return value
    return Expression.const(value)


class Expression:
    """Sparse multivariate polynomial with exact rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = terms if terms is not None else {}

    @staticmethod
    def zero():
        return Expression({})

    @classmethod
    def const(cls, value):
        value = value if isinstance(value, Fraction) else Fraction(value)
        return cls({UNIT: value} if value else {})

    @classmethod
    def symbol(cls, sym, exp=1, coefficient=1):
        coefficient = Fraction(coefficient)
        if not coefficient:
            return cls.zero()
        return cls({mono(sym, exp): coefficient})

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, Expression):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == Expression.const(other).terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        other = _coerce(other)
        if len(self.terms) < len(other.terms):
            self, other = other, self
        out = dict(self.terms)
        for m, c in other.terms.items():
            _acc(out, m, c)
        return Expression(out)

    __radd__ = __add__

    def __neg__(self):
        return Expression({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            if not other:
                return Expression.zero()
            return Expression({m: c * other for m, c in self.terms.items()})
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                _acc(out, mono_mul(m1, m2), c1 * c2)
        return Expression(out)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers are defined")
        result = Expression.const(1)
        for _ in range(k):
            result = result * self
        return result

    def scale(self, r):
        return self * Fraction(r)

    def degree(self, kinds=None):
        if not self.terms:
            return 0
        return max(mono_degree(m, kinds) for m in self.terms)

    def symbols(self):
        seen = set()
        for m in self.terms:
            for s, _ in m:
                seen.add(s)
        return seen

    def has_kind(self, kinds):
        return any(s[0] in kinds for m in self.terms for s, _ in m)

    def drop_kinds(self, kinds):
        """Remove every term containing a symbol of the given kinds."""
        return Expression(
            {m: c for m, c in self.terms.items() if not any(s[0] in kinds for s, _ in m)}
        )

    def diff(self, sym):
        out = {}
        for m, c in self.terms.items():
            for i, (s, e) in enumerate(m):
                if s == sym:
                    if e == 1:
                        reduced = m[:i] + m[i + 1 :]
                    else:
                        reduced = m[:i] + ((s, e - 1),) + m[i + 1 :]
                    _acc(out, reduced, c * e)
                    break
        return Expression(out)

    def subs(self, mapping):
        """Substitute expressions (or numbers) for symbols."""
        out = {}
        for m, c in self.terms.items():
            kept = []
            factors = []
            for s, e in m:
                rep = mapping.get(s)
                if rep is None:
                    kept.append((s, e))
                else:
                    factors.append((rep, e))
            if not factors:
                _acc(out, m, c)
                continue
            prod = Expression({tuple(kept): c})
            for rep, e in factors:
                prod = prod * (_coerce(rep) ** e)
            for m2, c2 in prod.terms.items():
                _acc(out, m2, c2)
        return Expression(out)

    def evalf(self, values):
        """Evaluate numerically; ``values`` maps every present symbol to a float."""
        total = 0.0
        for m, c in self.terms.items():
            term = float(c)
            for s, e in m:
                term *= values[s] ** e
            total += term
        return total

    def max_abs_coefficient(self):
        return max((abs(float(c)) for c in self.terms.values()), default=0.0)

    def text(self):
        """Deterministic debug form, terms sorted by monomial order."""
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms):
            c = self.terms[m]
            factors = [_sym_text(s) if e == 1 else f"{_sym_text(s)}^{e}" for s, e in m]
            body = "*".join(factors)
            coeff = str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
            if body:
                if c == 1:
                    parts.append(body)
                elif c == -1:
                    parts.append(f"-{body}")
                else:
                    parts.append(f"{coeff}*{body}")
            else:
                parts.append(coeff)
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    def __repr__(self):
        return f"Expression({self.text()})"


def _sym_text(s):
    kind = s[0]
    if kind == "x":
        return f"x{s[1]}"
    if kind == "A":
        return f"A[{s[1]},{s[2]}]"
    if kind == "u":
        return f"u[{s[1]},{s[2]};{s[3]}]"
    if kind == "H":
        return f"H[{s[1]}]"
    if kind == "dH":
        return f"dH[{s[1]};{s[2]}]"
    if kind == "dHdA":
        return f"dHdA[{s[1]};{s[2]},{s[3]}]"
    if kind == "Phi":
        return f"Phi[{s[1]},{s[2]}]"
    if kind == "dPhi":
        return f"dPhi[{s[1]},{s[2]};{s[3]}]"
    if kind == "dPhidA":
        return f"dPhidA[{s[1]},{s[2]};{s[3]},{s[4]}]"
    if kind == "S":
        return f"S[{s[1]};{s[2]}{s[3]}]"
    if kind == "T":
        return f"T[{s[1]};{s[2]}]"
    if kind == "par":
        return s[1]
    raise UnknownSymbolKind(f"symbol kind {kind!r} is not in the universe")


def expr_sum(items):
    out = {}
    for e in items:
        for m, c in _coerce(e).terms.items():
            _acc(out, m, c)
    return Expression(out)


# ---------------------------------------------------------------------------
# On-shell jet substitution.
#
# The field equations fix three of the six antisymmetric first-derivative
# combinations W_{n[lam al]} = d_lam A_{n al} - d_al A_{n lam} in terms of
# the others plus quadratic potential terms:
#
#   W_{n[23]} = W_{n[01]} + C_nbc (A_b0 A_c1 + A_b3 A_c2)
#   W_{n[31]} = W_{n[02]} + C_nbc (A_b0 A_c2 + A_b1 A_c3)
#   W_{n[12]} = W_{n[03]} + C_nbc (A_b0 A_c3 + A_b2 A_c1)
#
# With independent="time" the basis keeps the (0,i) pairs (T_{n,i} means
# W_{n[0i]}); with independent="space" it keeps the spatial pairs instead
# (T_{n,i} means W of the i-th spatial pair) and the (0,i) combinations
# become dependent.  Symmetric combinations S are untouched either way.
# ---------------------------------------------------------------------------

_QUAD_PAIRS = {1: ((0, 1), (3, 2)), 2: ((0, 2), (1, 3)), 3: ((0, 3), (2, 1))}

_SPATIAL_PAIR = {1: (2, 3), 2: (3, 1), 3: (1, 2)}


def _quad_term(n, i, g):
    terms = []
    (r1, s1), (r2, s2) = _QUAD_PAIRS[i]
    for b, c, v in g.by_first[n]:
        terms.append(Expression({mono_mul(mono(field(b, r1)), mono(field(c, s1))): v}))
        terms.append(Expression({mono_mul(mono(field(b, r2)), mono(field(c, s2))): v}))
    return expr_sum(terms)


@lru_cache(maxsize=8)
def _jet_substitution(g, independent):
    """Map each jet symbol to its on-shell basis expression."""
    if independent not in ("time", "space"):
        raise ValueError(f"unknown basis choice {independent!r}")
    table = {}
    for n in range(g.dim):
        w = {}
        for i in (1, 2, 3):
            t = Expression.symbol(anti_jet(n, i))
            q = _quad_term(n, i, g)
            if independent == "time":
                w[(0, i)] = t
                w[_SPATIAL_PAIR[i]] = t + q
            else:
                w[_SPATIAL_PAIR[i]] = t
                w[(0, i)] = t - q
        for lam in range(4):
            for sigma in range(4):
                # jet(n, sigma, lam) = d_lam A_{n sigma} = (S + W_{n[lam sigma]}) / 2
                s_part = Expression.symbol(sym_jet(n, lam, sigma))
                if lam == sigma:
                    rep = s_part * Fraction(1, 2)
                elif (lam, sigma) in w:
                    rep = (s_part + w[(lam, sigma)]) * Fraction(1, 2)
                else:
                    rep = (s_part - w[(sigma, lam)]) * Fraction(1, 2)
                table[jet(n, sigma, lam)] = rep
    return table


def substitute_sdym(e, g, independent="time"):
    """Rewrite jet symbols in the on-shell basis; idempotent."""
    for s in e.symbols():
        if s[0] not in KINDS:
            raise UnknownSymbolKind(f"symbol kind {s[0]!r} is not in the universe")
    table = _jet_substitution(g, independent)
    out = {}
    for m, c in e.terms.items():
        jets = [(s, e2) for s, e2 in m if s[0] == "u"]
        if not jets:
            _acc(out, m, c)
            continue
        rest = tuple((s, e2) for s, e2 in m if s[0] != "u")
        prod = Expression({rest: c})
        for s, e2 in jets:
            check_gauge(s[1], g.dim)
            rep = table[s]
            for _ in range(e2):
                prod = prod * rep
        for m2, c2 in prod.terms.items():
            _acc(out, m2, c2)
    return Expression(out)


def collect_jet(e):
    """Partition by monomial in the S/T basis symbols.

    Returns {jet-monomial: coefficient Expression}; summing
    jet-monomial * coefficient over the map reproduces ``e`` exactly.
    The key for jet-free terms is the unit monomial.
    """
    groups = {}
    for m, c in e.terms.items():
        jet_part = tuple((s, e2) for s, e2 in m if s[0] in JET_BASIS_KINDS)
        rest = tuple((s, e2) for s, e2 in m if s[0] not in JET_BASIS_KINDS)
        _acc(groups.setdefault(jet_part, {}), rest, c)
    return {k: Expression(v) for k, v in groups.items() if v}
