"""Symmetry generators: closed-form solution, verification, ansatz nullspaces.

A generator acts as H_l(x) d/dx_l + Phi_{ak}(x, A) d/dA_{ak} with Phi affine
in the potentials.  The closed-form solution combines conformal motions of
Euclidean 4-space with local gauge transformations:

    H_l   = -1/2 c_l x.x + c_al x_l x_al + b_{l al} x_al + d x_l + a_l
    Phi_ak = (-c_k x_al + c_al x_k + b_{k al}) A_{a al}
             - (d + c.x) A_{ak} + C_abd chi_d A_{bk} + d_k chi_a

``verify_generator`` substitutes a candidate into every extracted condition
and demands identically vanishing residuals.  ``solve_ansatz`` instead
treats all polynomial coefficients of (H, Phi) as unknowns, imposes the
conditions coefficient-by-coefficient and returns the exact nullspace, so
the closed form above can be re-derived rather than assumed.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dfield
from fractions import Fraction
from itertools import product

import numpy as np

from . import linalg
from .expressions import (
    Expression,
    UNKNOWN_KINDS,
    coord,
    field,
    h_dA,
    h_dx,
    h_val,
    mono,
    mono_mul,
    param,
    phi_dA,
    phi_dx,
    phi_val,
)
from .prolongation import extract_determining_system
from .tensors import levi_civita

MAX_X_DEGREE = 3

NUMERIC_TOL = 1e-10


class ShapeMismatch(ValueError):
    """Container shapes disagree with the algebra dimension."""


class DegreeOverflow(ValueError):
    """A polynomial exceeds the supported x-degree."""


class AnsatzTooLarge(ValueError):
    """The requested ansatz has more unknowns than the configured cap."""


def _as_expr(v):
    return v if isinstance(v, Expression) else Expression.const(v)


def _xdeg(e):
    return e.degree(kinds=("x",))


@dataclass(frozen=True)
class SymmetryGenerator:
    """h: 4 x-polynomials; phi_linear[(a,k,n,al)] and phi_inhom[(a,k)] x-polynomials."""

    dim: int
    h: tuple
    phi_linear: dict
    phi_inhom: dict

    def __post_init__(self):
        if len(self.h) != 4:
            raise ShapeMismatch("h must have four components")
        for e in self.h:
            if _xdeg(e) > MAX_X_DEGREE:
                raise DegreeOverflow("h component exceeds cubic degree")
        for (a, k, n, al), e in self.phi_linear.items():
            if not (0 <= a < self.dim and 0 <= n < self.dim):
                raise ShapeMismatch("phi_linear gauge index outside algebra")
            if _xdeg(e) > MAX_X_DEGREE:
                raise DegreeOverflow("phi_linear coefficient exceeds cubic degree")
        for (a, k), e in self.phi_inhom.items():
            if not 0 <= a < self.dim:
                raise ShapeMismatch("phi_inhom gauge index outside algebra")
            if _xdeg(e) > MAX_X_DEGREE:
                raise DegreeOverflow("phi_inhom component exceeds cubic degree")

    def phi_expression(self, a, k):
        parts = [self.phi_inhom.get((a, k), Expression.zero())]
        for n in range(self.dim):
            for al in range(4):
                c = self.phi_linear.get((a, k, n, al))
                if c:
                    parts.append(c * Expression.symbol(field(n, al)))
        total = Expression.zero()
        for p in parts:
            total = total + p
        return total

    def is_zero(self):
        return (
            all(e.is_zero() for e in self.h)
            and all(e.is_zero() for e in self.phi_linear.values())
            and all(e.is_zero() for e in self.phi_inhom.values())
        )

    def scaled(self, r):
        r = Fraction(r)
        return SymmetryGenerator(
            self.dim,
            tuple(e * r for e in self.h),
            {k: e * r for k, e in self.phi_linear.items()},
            {k: e * r for k, e in self.phi_inhom.items()},
        )

    def plus(self, other):
        if other.dim != self.dim:
            raise ShapeMismatch("cannot add generators over different algebras")
        lin = dict(self.phi_linear)
        for k, e in other.phi_linear.items():
            lin[k] = lin.get(k, Expression.zero()) + e
        inh = dict(self.phi_inhom)
        for k, e in other.phi_inhom.items():
            inh[k] = inh.get(k, Expression.zero()) + e
        return SymmetryGenerator(
            self.dim,
            tuple(a + b for a, b in zip(self.h, other.h)),
            {k: e for k, e in lin.items() if e},
            {k: e for k, e in inh.items() if e},
        )


def zero_generator(dim):
    return SymmetryGenerator(dim, (Expression.zero(),) * 4, {}, {})


@dataclass(frozen=True)
class ConformalGaugeParams:
    """a: translations, b: antisymmetric rotations, c: accelerations, d: dilatation,
    chi: per gauge index an x-polynomial gauge function."""

    a: tuple
    b: dict  # (lam, al) with lam < al -> value
    c: tuple
    d: object
    chi: tuple

    def __post_init__(self):
        if len(self.a) != 4 or len(self.c) != 4:
            raise ShapeMismatch("a and c must have four components")
        for lam, al in self.b:
            if not (0 <= lam < al < 4):
                raise ValueError("b entries must use index pairs lam < al")

    def b_at(self, lam, al):
        if lam == al:
            return Expression.zero()
        if lam < al:
            return _as_expr(self.b.get((lam, al), 0))
        return -_as_expr(self.b.get((al, lam), 0))


def conformal_gauge_generator(params, g):
    """Instantiate the closed-form general solution for the given algebra."""
    if len(params.chi) != g.dim:
        raise ShapeMismatch(
            f"chi has {len(params.chi)} components for a dim-{g.dim} algebra"
        )
    a = [_as_expr(v) for v in params.a]
    c = [_as_expr(v) for v in params.c]
    d = _as_expr(params.d)
    chi = [_as_expr(v) for v in params.chi]
    x = [Expression.symbol(coord(i)) for i in range(4)]
    xx = Expression.zero()
    for i in range(4):
        xx = xx + x[i] * x[i]
    cx = Expression.zero()
    for i in range(4):
        cx = cx + c[i] * x[i]

    h = []
    for lam in range(4):
        e = c[lam] * xx * Fraction(-1, 2) + cx * x[lam] + d * x[lam] + a[lam]
        for al in range(4):
            e = e + params.b_at(lam, al) * x[al]
        h.append(e)

    phi_linear = {}
    phi_inhom = {}
    for ga in range(g.dim):
        for k in range(4):
            for al in range(4):
                e = -c[k] * x[al] + c[al] * x[k] + params.b_at(k, al)
                if k == al:
                    e = e - d - cx
                if e:
                    phi_linear[(ga, k, ga, al)] = (
                        phi_linear.get((ga, k, ga, al), Expression.zero()) + e
                    )
            for b_, d_, v in g.by_first[ga]:
                contrib = chi[d_] * v
                if contrib:
                    key = (ga, k, b_, k)
                    phi_linear[key] = phi_linear.get(key, Expression.zero()) + contrib
            grad = chi[ga].diff(coord(k))
            if grad:
                phi_inhom[(ga, k)] = grad
    phi_linear = {k: e for k, e in phi_linear.items() if e}
    return SymmetryGenerator(g.dim, tuple(h), phi_linear, phi_inhom)


def general_solution_family(g, chi_degree=0):
    """Unit-parameter instances of the closed-form solution (basis of the family)."""
    zero4 = (0, 0, 0, 0)
    zchi = (Expression.zero(),) * g.dim
    family = []
    for mu in range(4):
        av = tuple(Fraction(i == mu) for i in range(4))
        family.append(
            conformal_gauge_generator(
                ConformalGaugeParams(av, {}, zero4, 0, zchi), g
            )
        )
    for lam in range(4):
        for al in range(lam + 1, 4):
            family.append(
                conformal_gauge_generator(
                    ConformalGaugeParams(zero4, {(lam, al): 1}, zero4, 0, zchi), g
                )
            )
    for mu in range(4):
        cv = tuple(Fraction(i == mu) for i in range(4))
        family.append(
            conformal_gauge_generator(
                ConformalGaugeParams(zero4, {}, cv, 0, zchi), g
            )
        )
    family.append(
        conformal_gauge_generator(ConformalGaugeParams(zero4, {}, zero4, 1, zchi), g)
    )
    for ga in range(g.dim):
        for m in x_monomials(chi_degree):
            chi = tuple(
                _x_monomial_expr(m) if i == ga else Expression.zero()
                for i in range(g.dim)
            )
            family.append(
                conformal_gauge_generator(
                    ConformalGaugeParams(zero4, {}, zero4, 0, chi), g
                )
            )
    return family


def x_monomials(max_degree):
    """Exponent 4-tuples of total degree <= max_degree (empty if negative)."""
    if max_degree < 0:
        return []
    out = []
    for e0 in range(max_degree + 1):
        for e1 in range(max_degree + 1 - e0):
            for e2 in range(max_degree + 1 - e0 - e1):
                for e3 in range(max_degree + 1 - e0 - e1 - e2):
                    out.append((e0, e1, e2, e3))
    return sorted(out)


def _x_monomial_expr(expts):
    m = tuple((coord(i), e) for i, e in enumerate(expts) if e)
    return Expression({m: Fraction(1)})


def _x_mono(expts):
    return tuple((coord(i), e) for i, e in enumerate(expts) if e)


# ---------------------------------------------------------------------------
# Verification by exact substitution.
# ---------------------------------------------------------------------------


@dataclass
class VerificationReport:
    status: str
    conditions_checked: int
    failures: list
    max_residual: float

    @property
    def passed(self):
        return self.status == "pass"

    def to_dict(self):
        return {
            "status": self.status,
            "conditions_checked": self.conditions_checked,
            "failures": [
                {"group": grp, "indices": list(idx), "residual_text": txt}
                for grp, idx, txt in self.failures
            ],
        }


def _substitution_map(gen, g):
    mapping = {}
    zero = Expression.zero()
    for k in range(4):
        mapping[h_val(k)] = gen.h[k]
        for lam in range(4):
            mapping[h_dx(k, lam)] = gen.h[k].diff(coord(lam))
        for n in range(g.dim):
            for al in range(4):
                mapping[h_dA(k, n, al)] = zero
    for a in range(g.dim):
        for k in range(4):
            phi = gen.phi_expression(a, k)
            mapping[phi_val(a, k)] = phi
            for lam in range(4):
                mapping[phi_dx(a, k, lam)] = phi.diff(coord(lam))
            for n in range(g.dim):
                for al in range(4):
                    mapping[phi_dA(a, k, n, al)] = gen.phi_linear.get(
                        (a, k, n, al), zero
                    )
    return mapping


def verify_generator(gen, sys, g, tol=None):
    """Substitute a generator into every condition; report nonzero residuals.

    For exact algebras residuals must vanish identically; for
    checked-numeric algebras coefficients below ``tol`` (default 1e-10)
    count as zero.
    """
    if tol is None:
        tol = 0.0 if g.exact else NUMERIC_TOL
    mapping = _substitution_map(gen, g)
    failures = []
    max_resid = 0.0
    checked = 0
    for cond in sys.conditions:
        checked += 1
        residual = cond.expr.subs(mapping)
        size = residual.max_abs_coefficient()
        max_resid = max(max_resid, size)
        if size > tol:
            failures.append(
                (cond.group, (cond.mu, cond.nu, cond.a, cond.jet_key), residual.text())
            )
    status = "pass" if not failures else "fail"
    return VerificationReport(status, checked, failures, max_resid)


# ---------------------------------------------------------------------------
# Polynomial ansatz nullspace.
# ---------------------------------------------------------------------------


@dataclass
class AnsatzResult:
    dimension: int
    basis: list  # SymmetryGenerator list (exact algebras) or None
    columns: int
    h_degree: int
    chi_degree: int


def _ansatz_caps(h_degree, chi_degree):
    lin_cap = max(h_degree - 1, chi_degree)
    inhom_cap = chi_degree - 1
    return lin_cap, inhom_cap


def _ansatz_columns(g, h_degree, chi_degree):
    lin_cap, inhom_cap = _ansatz_caps(h_degree, chi_degree)
    cols = []
    for lam in range(4):
        for m in x_monomials(h_degree):
            cols.append(("H", lam, m))
    for a in range(g.dim):
        for k in range(4):
            for n in range(g.dim):
                for al in range(4):
                    for m in x_monomials(lin_cap):
                        cols.append(("L", a, k, n, al, m))
    for a in range(g.dim):
        for k in range(4):
            for m in x_monomials(inhom_cap):
                cols.append(("P", a, k, m))
    return cols


def _replacement_table(g, h_degree, chi_degree):
    """unknown symbol -> [(column, extra monomial, coefficient)]."""
    lin_cap, inhom_cap = _ansatz_caps(h_degree, chi_degree)
    h_mons = x_monomials(h_degree)
    l_mons = x_monomials(lin_cap)
    p_mons = x_monomials(inhom_cap)
    table = {}

    def d_mono(m, lam):
        if m[lam] == 0:
            return None, 0
        lowered = tuple(e - (i == lam) for i, e in enumerate(m))
        return lowered, m[lam]

    for k in range(4):
        table[h_val(k)] = [(("H", k, m), _x_mono(m), Fraction(1)) for m in h_mons]
        for lam in range(4):
            entries = []
            for m in h_mons:
                low, f = d_mono(m, lam)
                if f:
                    entries.append((("H", k, m), _x_mono(low), Fraction(f)))
            table[h_dx(k, lam)] = entries
        for n in range(g.dim):
            for al in range(4):
                table[h_dA(k, n, al)] = []
    for a in range(g.dim):
        for k in range(4):
            val = []
            for n in range(g.dim):
                for al in range(4):
                    amono = mono(field(n, al))
                    for m in l_mons:
                        val.append(
                            (("L", a, k, n, al, m), mono_mul(_x_mono(m), amono), Fraction(1))
                        )
            for m in p_mons:
                val.append((("P", a, k, m), _x_mono(m), Fraction(1)))
            table[phi_val(a, k)] = val
            for lam in range(4):
                entries = []
                for n in range(g.dim):
                    for al in range(4):
                        amono = mono(field(n, al))
                        for m in l_mons:
                            low, f = d_mono(m, lam)
                            if f:
                                entries.append(
                                    (
                                        ("L", a, k, n, al, m),
                                        mono_mul(_x_mono(low), amono),
                                        Fraction(f),
                                    )
                                )
                for m in p_mons:
                    low, f = d_mono(m, lam)
                    if f:
                        entries.append((("P", a, k, m), _x_mono(low), Fraction(f)))
                table[phi_dx(a, k, lam)] = entries
            for n in range(g.dim):
                for al in range(4):
                    table[phi_dA(a, k, n, al)] = [
                        (("L", a, k, n, al, m), _x_mono(m), Fraction(1)) for m in l_mons
                    ]
    return table


def _split_unknown(monomial):
    unknown = None
    base = []
    for s, e in monomial:
        if s[0] in UNKNOWN_KINDS:
            if unknown is not None or e != 1:
                raise AssertionError("condition not linear in unknown symbols")
            unknown = s
        else:
            base.append((s, e))
    return unknown, tuple(base)


def assemble_ansatz_rows(sys, g, h_degree, chi_degree):
    table = _replacement_table(g, h_degree, chi_degree)
    rows = []
    seen = set()
    for cond in sys.linear + sys.zeroth:
        rowmap = {}
        for monomial, coef in cond.expr.terms.items():
            unknown, base = _split_unknown(monomial)
            if unknown is None:
                raise AssertionError("determining condition has an unknown-free term")
            for column, extra, f in table[unknown]:
                key = mono_mul(base, extra)
                bucket = rowmap.setdefault(key, {})
                v = bucket.get(column, Fraction(0)) + coef * f
                if v:
                    bucket[column] = v
                else:
                    del bucket[column]
        for bucket in rowmap.values():
            if not bucket:
                continue
            k = linalg.row_key(bucket)
            if k not in seen:
                seen.add(k)
                rows.append(bucket)
    return rows


def solve_ansatz(h_degree, chi_degree, g, sys=None, cap=20000):
    """Exact nullspace of the determining system on a polynomial ansatz.

    H is an x-polynomial of degree <= h_degree (potentials never enter it);
    the linear-in-A coefficients of Phi carry x-degree up to
    max(h_degree - 1, chi_degree) and the inhomogeneous part up to
    chi_degree - 1, the degrees the closed-form solution populates.  The
    two appearances of a gauge function are deliberately left uncoupled so
    the determining conditions must reproduce their gradient relation.
    """
    if not 0 <= h_degree <= MAX_X_DEGREE:
        raise DegreeOverflow(f"h_degree {h_degree} outside 0..{MAX_X_DEGREE}")
    if sys is None:
        sys = extract_determining_system(g)
    columns = _ansatz_columns(g, h_degree, chi_degree)
    if len(columns) > cap:
        raise AnsatzTooLarge(f"{len(columns)} unknowns exceed the cap {cap}")
    rows = assemble_ansatz_rows(sys, g, h_degree, chi_degree)
    if g.exact:
        vectors = linalg.exact_nullspace(rows, columns)
        basis = [_vector_to_generator(v, g) for v in vectors]
        return AnsatzResult(len(vectors), basis, len(columns), h_degree, chi_degree)
    nullity = linalg.float_nullity(rows, columns)
    return AnsatzResult(nullity, None, len(columns), h_degree, chi_degree)


def _vector_to_generator(vec, g):
    h = [Expression.zero() for _ in range(4)]
    lin = {}
    inh = {}
    for column, value in vec.items():
        kind = column[0]
        if kind == "H":
            _, lam, m = column
            h[lam] = h[lam] + _x_monomial_expr(m) * value
        elif kind == "L":
            _, a, k, n, al, m = column
            key = (a, k, n, al)
            lin[key] = lin.get(key, Expression.zero()) + _x_monomial_expr(m) * value
        else:
            _, a, k, m = column
            key = (a, k)
            inh[key] = inh.get(key, Expression.zero()) + _x_monomial_expr(m) * value
    return SymmetryGenerator(
        g.dim,
        tuple(h),
        {k: e for k, e in lin.items() if e},
        {k: e for k, e in inh.items() if e},
    )


def generator_vector(gen):
    """Flatten a parameter-free generator into ansatz coordinates."""
    vec = {}

    def mono_to_expts(m):
        expts = [0, 0, 0, 0]
        for s, e in m:
            if s[0] != "x":
                raise ValueError("generator has non-coordinate symbols")
            expts[s[1]] = e
        return tuple(expts)

    for lam in range(4):
        for m, c in gen.h[lam].terms.items():
            vec[("H", lam, mono_to_expts(m))] = c
    for (a, k, n, al), e in gen.phi_linear.items():
        for m, c in e.terms.items():
            vec[("L", a, k, n, al, mono_to_expts(m))] = c
    for (a, k), e in gen.phi_inhom.items():
        for m, c in e.terms.items():
            vec[("P", a, k, mono_to_expts(m))] = c
    return vec


def generators_span_equal(gens_a, gens_b):
    rows_a = [generator_vector(gv) for gv in gens_a]
    rows_b = [generator_vector(gv) for gv in gens_b]
    return linalg.spans_equal(rows_a, rows_b)


def family_within_caps(g, h_degree, chi_degree):
    """Closed-form family members that fit inside the given ansatz caps."""
    lin_cap, inhom_cap = _ansatz_caps(h_degree, chi_degree)
    out = []
    for gen in general_solution_family(g, chi_degree=max(chi_degree, 0)):
        if max(_xdeg(e) for e in gen.h) > h_degree:
            continue
        if any(_xdeg(e) > lin_cap for e in gen.phi_linear.values()):
            continue
        if gen.phi_inhom and (
            inhom_cap < 0 or any(_xdeg(e) > inhom_cap for e in gen.phi_inhom.values())
        ):
            continue
        out.append(gen)
    return out


# ---------------------------------------------------------------------------
# Commutators and closure.
# ---------------------------------------------------------------------------


def bracket(g1, g2, g):
    """Commutator of two generators on (x, A) space."""
    if g1.dim != g.dim or g2.dim != g.dim:
        raise ShapeMismatch("generator dimensions disagree with the algebra")
    h = []
    for lam in range(4):
        e = Expression.zero()
        for beta in range(4):
            e = e + g1.h[beta] * g2.h[lam].diff(coord(beta))
            e = e - g2.h[beta] * g1.h[lam].diff(coord(beta))
        h.append(e)

    def transported(ga, gb):
        """Linear and inhomogeneous parts of v_a(Phi_b)."""
        lin = {}
        inh = {}
        for (a, k, n, al), coeff in gb.phi_linear.items():
            acc = Expression.zero()
            for beta in range(4):
                acc = acc + ga.h[beta] * coeff.diff(coord(beta))
            if acc:
                lin[(a, k, n, al)] = acc
        for (a, k), coeff in gb.phi_inhom.items():
            acc = Expression.zero()
            for beta in range(4):
                acc = acc + ga.h[beta] * coeff.diff(coord(beta))
            if acc:
                inh[(a, k)] = acc
        for (a, k, n, al), l2 in gb.phi_linear.items():
            for (n2, al2, m, rho), l1 in ga.phi_linear.items():
                if (n2, al2) == (n, al):
                    key = (a, k, m, rho)
                    lin[key] = lin.get(key, Expression.zero()) + l2 * l1
            p1 = ga.phi_inhom.get((n, al))
            if p1:
                inh[(a, k)] = inh.get((a, k), Expression.zero()) + l2 * p1
        return lin, inh

    lin12, inh12 = transported(g1, g2)
    lin21, inh21 = transported(g2, g1)
    lin = dict(lin12)
    for k, e in lin21.items():
        lin[k] = lin.get(k, Expression.zero()) - e
    inh = dict(inh12)
    for k, e in inh21.items():
        inh[k] = inh.get(k, Expression.zero()) - e
    return SymmetryGenerator(
        g.dim,
        tuple(h),
        {k: e for k, e in lin.items() if e},
        {k: e for k, e in inh.items() if e},
    )


@dataclass
class ClosureResult:
    closed: bool
    table: dict  # (i, j) -> {k: Fraction} for i < j
    escapes: list  # (i, j) pairs whose bracket leaves the span

    def constant(self, i, j, k):
        if i == j:
            return Fraction(0)
        if i < j:
            return self.table.get((i, j), {}).get(k, Fraction(0))
        return -self.table.get((j, i), {}).get(k, Fraction(0))


def closure_check(basis, g):
    """Expand every pairwise bracket in the basis; report escapes."""
    vectors = [generator_vector(gen) for gen in basis]
    solver = linalg.SpanSolver(vectors)
    if solver.rank != len(basis):
        raise ValueError("closure basis is linearly dependent")
    table = {}
    escapes = []
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            br = bracket(basis[i], basis[j], g)
            coeffs = solver.express(generator_vector(br))
            if coeffs is None:
                escapes.append((i, j))
            else:
                table[(i, j)] = coeffs
    return ClosureResult(closed=not escapes, table=table, escapes=escapes)


def closure_table_is_lie(result, size):
    """Antisymmetry is structural; check the Jacobi identity of the table.

    The Jacobi expression is totally antisymmetric in the three generator
    slots, so sorted triples cover all cases.
    """
    for a in range(size):
        for b in range(a + 1, size):
            for c in range(b + 1, size):
                for k in range(size):
                    total = Fraction(0)
                    for m in range(size):
                        total += result.constant(a, b, m) * result.constant(m, c, k)
                        total += result.constant(b, c, m) * result.constant(m, a, k)
                        total += result.constant(c, a, m) * result.constant(m, b, k)
                    if total:
                        return False
    return True


# ---------------------------------------------------------------------------
# Replays of the two reduction steps with finite linear algebra.
# ---------------------------------------------------------------------------


def mixing_nullspace(g):
    """Solve the algebraic system coupling the gauge-mixing matrix h_an and G.

        C_abn h_nc - C_acn h_nb - C_nbc h_an + C_abc G = 0  for all a, b, c

    Returns (dimension, basis, matches_family): the solution family should
    be h = -G delta + C . chi, of dimension 1 + dim.
    """
    cols = [("h", a, n) for a in range(g.dim) for n in range(g.dim)] + [("G",)]
    rows = []
    for a, b, c in product(range(g.dim), repeat=3):
        row = {}
        for n in range(g.dim):
            for col, val in (
                (("h", n, c), g.c(a, b, n)),
                (("h", n, b), -g.c(a, c, n)),
                (("h", a, n), -g.c(n, b, c)),
            ):
                if val:
                    row[col] = row.get(col, Fraction(0)) + val
        if g.c(a, b, c):
            row[("G",)] = row.get(("G",), Fraction(0)) + g.c(a, b, c)
        row = {k: v for k, v in row.items() if v}
        if row:
            rows.append(row)

    candidates = []
    ident = {("h", a, a): Fraction(-1) for a in range(g.dim)}
    ident[("G",)] = Fraction(1)
    candidates.append(ident)
    for c0 in range(g.dim):
        cand = {}
        for a, n in product(range(g.dim), repeat=2):
            v = g.c(a, n, c0)
            if v:
                cand[("h", a, n)] = v
        candidates.append(cand)

    if g.exact:
        basis = linalg.exact_nullspace(rows, cols)
        matches = linalg.spans_equal(basis, candidates)
        return len(basis), basis, matches
    mat = np.zeros((len(rows), len(cols)))
    pos = {c: i for i, c in enumerate(cols)}
    for i, row in enumerate(rows):
        for cc, v in row.items():
            mat[i, pos[cc]] = float(v)
    sv = np.linalg.svd(mat, compute_uv=False)
    rank = int(np.sum(sv > 1e-10 * sv[0])) if sv.size else 0
    dim = len(cols) - rank
    resid = 0.0
    for cand in candidates:
        vec = np.zeros(len(cols))
        for cc, v in cand.items():
            vec[pos[cc]] = float(v)
        resid = max(resid, float(np.max(np.abs(mat @ vec))) if len(rows) else 0.0)
    return dim, candidates, resid < 1e-10


def _pair_sum_equations():
    """Eliminate the gradient source from the rotation-coefficient system.

    The 12 first-order conditions tie a common gradient to divergence-like
    combinations of the antisymmetric matrix f; differencing them per first
    index leaves 8 conditions that only involve the three dual-pair sums
      p = f10 + f23,  q = f20 + f31,  r = f30 + f12.
    Returns rows over ('dp'|'dq'|'dr', direction) coordinates.
    """
    pair_syms = [(i, j) for i in range(4) for j in range(i + 1, 4)]

    def df(i, j, direction):
        # derivative of f_{ij} resolved to the canonical i < j component
        if i == j:
            return {}
        if i < j:
            return {("df", i, j, direction): Fraction(1)}
        return {("df", j, i, direction): Fraction(-1)}

    def add_into(acc, other, scale=1):
        for k, v in other.items():
            nv = acc.get(k, Fraction(0)) + v * scale
            if nv:
                acc[k] = nv
            else:
                acc.pop(k, None)

    def rhs(mu, nuh):
        acc = {}
        add_into(acc, df(mu, nuh, nuh))
        for lam in range(4):
            for al in range(4):
                eps = levi_civita(mu, nuh, lam, al)
                if eps:
                    add_into(acc, df(al, nuh, lam), eps)
        return acc

    combos = {}
    for direction in range(4):
        for name, parts in (
            ("dp", ((1, 0, 1), (2, 3, 1))),
            ("dq", ((2, 0, 1), (3, 1, 1))),
            ("dr", ((3, 0, 1), (1, 2, 1))),
        ):
            acc = {}
            for i, j, s in parts:
                add_into(acc, df(i, j, direction), s)
            combos[(name, direction)] = acc

    solver = linalg.SpanSolver(list(combos.values()))
    combo_keys = list(combos.keys())

    equations = []
    for mu in range(4):
        others = [nu for nu in range(4) if nu != mu]
        base = rhs(mu, others[0])
        for nuh in others[1:]:
            diff_row = dict(base)
            add_into(diff_row, rhs(mu, nuh), -1)
            coeffs = solver.express(diff_row)
            if coeffs is None:
                raise AssertionError("difference row leaves the dual-pair span")
            eq = {}
            for idx, val in coeffs.items():
                if val:
                    eq[combo_keys[idx]] = val
            equations.append(eq)
    return equations


def dual_pair_nullspace(degree):
    """Impose the 8 dual-pair-sum conditions on polynomials of the given degree."""
    if degree > MAX_X_DEGREE:
        raise DegreeOverflow(f"degree {degree} outside 0..{MAX_X_DEGREE}")
    equations = _pair_sum_equations()
    mons = x_monomials(degree)
    names = ("p", "q", "r")
    cols = [(n, m) for n in names for m in mons]
    rows = []
    for eq in equations:
        rowmap = {}
        for (dname, direction), coef in eq.items():
            base = dname[1]
            for m in mons:
                if m[direction] == 0:
                    continue
                lowered = tuple(e - (i == direction) for i, e in enumerate(m))
                bucket = rowmap.setdefault(lowered, {})
                col = (base, m)
                v = bucket.get(col, Fraction(0)) + coef * m[direction]
                if v:
                    bucket[col] = v
                else:
                    del bucket[col]
        rows.extend(b for b in rowmap.values() if b)
    basis = linalg.exact_nullspace(rows, cols)
    triples = []
    for vec in basis:
        triple = {n: Expression.zero() for n in names}
        for (n, m), v in vec.items():
            triple[n] = triple[n] + _x_monomial_expr(m) * v
        triples.append((triple["p"], triple["q"], triple["r"]))
    return len(basis), triples


def dual_pair_closed_family():
    """The ten-parameter closed-form family of dual-pair sums (degree two)."""
    t, x, y, z = (Expression.symbol(coord(i)) for i in range(4))
    one = Expression.const(1)
    zero = Expression.zero()
    two = Fraction(2)
    fam = [
        (one, zero, zero),
        (zero, one, zero),
        (zero, zero, one),
        (t, -z, y),  # e0
        (x, y, z),  # e1
        (y, -x, -t),  # e2
        (z, t, -x),  # e3
        (
            t * t + x * x - y * y - z * z,
            (x * y - t * z) * two,
            (x * z + t * y) * two,
        ),  # e00
        (
            (x * y + t * z) * two,
            t * t - x * x + y * y - z * z,
            (y * z - t * x) * two,
        ),  # e12
        (
            (x * z - t * y) * two,
            (t * x + y * z) * two,
            t * t - x * x - y * y + z * z,
        ),  # e13
    ]
    return fam


def triples_span_equal(triples_a, triples_b):
    def vec(triple):
        out = {}
        for name, e in zip(("p", "q", "r"), triple):
            for m, c in e.terms.items():
                expts = [0, 0, 0, 0]
                for s, ee in m:
                    expts[s[1]] = ee
                out[(name, tuple(expts))] = c
        return out

    return linalg.spans_equal([vec(t) for t in triples_a], [vec(t) for t in triples_b])
