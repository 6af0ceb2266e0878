"""Constant spacetime tensors and gauge-algebra structure constants.

Conventions: spacetime indices run 0..3, the totally antisymmetric symbol
has eps(0,1,2,3) = +1, and structure constants C_abc are totally
antisymmetric with all indices down (orthonormal basis of a compact
semisimple algebra).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from pathlib import Path

SPACETIME_DIM = 4

JACOBI_TOL = 1e-12


class IndexOutOfRange(ValueError):
    """An index lies outside its declared range."""


class AntisymmetryViolation(ValueError):
    """A structure-constant table is not totally antisymmetric."""


class JacobiViolation(ValueError):
    """A structure-constant table fails the Jacobi identity."""


def check_spacetime(*indices):
    for i in indices:
        if not isinstance(i, int) or isinstance(i, bool) or not 0 <= i < SPACETIME_DIM:
            raise IndexOutOfRange(f"spacetime index {i!r} outside 0..3")


def check_gauge(i, dim):
    if not isinstance(i, int) or isinstance(i, bool) or not 0 <= i < dim:
        raise IndexOutOfRange(f"gauge index {i!r} outside 0..{dim - 1}")


def kronecker(mu, rho):
    check_spacetime(mu, rho)
    return 1 if mu == rho else 0


def levi_civita(mu, nu, rho, sigma):
    check_spacetime(mu, nu, rho, sigma)
    seq = (mu, nu, rho, sigma)
    if len(set(seq)) < 4:
        return 0
    inversions = sum(seq[i] > seq[j] for i in range(4) for j in range(i + 1, 4))
    return -1 if inversions % 2 else 1


def z_component(mu, lam, nu, kap):
    """delta_{mu lam} delta_{nu kap} - delta_{mu kap} delta_{nu lam} - eps_{mu nu lam kap}."""
    return (
        kronecker(mu, lam) * kronecker(nu, kap)
        - kronecker(mu, kap) * kronecker(nu, lam)
        - levi_civita(mu, nu, lam, kap)
    )


@dataclass(frozen=True)
class GaugeAlgebra:
    """A validated structure-constant table C_abc.

    ``exact`` is True when every entry is a rational supplied exactly;
    tables loaded from decimal values keep exact binary Fractions of the
    floats but are flagged for tolerance-based downstream checks.
    """

    dim: int
    exact: bool
    table: tuple  # dim x dim x dim nested tuple of Fraction
    nonzero: tuple  # ((a, b, c, Fraction), ...) every nonzero entry
    by_first: tuple  # indexed by a: ((b, c, Fraction), ...)

    def c(self, a, b, c):
        return self.table[a][b][c]

    def jacobi_residual(self, a, b, c, d):
        t = self.table
        return sum(
            t[a][d][e] * t[b][c][e] + t[b][d][e] * t[c][a][e] + t[c][d][e] * t[a][b][e]
            for e in range(self.dim)
        )


def _validate(dim, table, exact):
    for a, b, c in product(range(dim), repeat=3):
        v = table[a][b][c]
        if table[b][a][c] != -v or table[a][c][b] != -v:
            raise AntisymmetryViolation(
                f"structure constants not totally antisymmetric at triple ({a},{b},{c})"
            )
    tol = 0 if exact else Fraction(JACOBI_TOL).limit_denominator(10**18)
    for a, b, c, d in product(range(dim), repeat=4):
        r = sum(
            table[a][d][e] * table[b][c][e]
            + table[b][d][e] * table[c][a][e]
            + table[c][d][e] * table[a][b][e]
            for e in range(dim)
        )
        if abs(r) > tol:
            raise JacobiViolation(
                f"Jacobi identity fails at quadruple ({a},{b},{c},{d}): residual {float(r):g}"
            )


def gauge_algebra(dim, entries, exact=True):
    """Build and validate an algebra from entries {(a,b,c): value}.

    The table is completed by total antisymmetry; conflicting assignments
    raise AntisymmetryViolation.
    """
    if dim < 1:
        raise IndexOutOfRange(f"algebra dimension {dim} must be positive")
    full = {}
    for (a, b, c), value in entries.items():
        check_gauge(a, dim)
        check_gauge(b, dim)
        check_gauge(c, dim)
        value = value if isinstance(value, Fraction) else Fraction(value)
        if value == 0:
            continue
        for perm in permutations(((a, 0), (b, 1), (c, 2))):
            idx = tuple(p[0] for p in perm)
            inversions = sum(
                perm[i][1] > perm[j][1] for i in range(3) for j in range(i + 1, 3)
            )
            signed = -value if inversions % 2 else value
            if idx in full and full[idx] != signed:
                raise AntisymmetryViolation(
                    f"inconsistent assignment for C at triple {idx}"
                )
            full[idx] = signed
    zero = Fraction(0)
    table = tuple(
        tuple(
            tuple(full.get((a, b, c), zero) for c in range(dim)) for b in range(dim)
        )
        for a in range(dim)
    )
    _validate(dim, table, exact)
    nonzero = tuple(
        (a, b, c, table[a][b][c])
        for a, b, c in product(range(dim), repeat=3)
        if table[a][b][c] != 0
    )
    by_first = tuple(
        tuple((b, c, v) for (a2, b, c, v) in nonzero if a2 == a) for a in range(dim)
    )
    return GaugeAlgebra(dim=dim, exact=exact, table=table, nonzero=nonzero, by_first=by_first)


def su2_algebra():
    """dim-3 algebra with C_abc = eps_abc."""
    return gauge_algebra(3, {(0, 1, 2): Fraction(1)})


def _parse_value(raw):
    """Return (Fraction, exact_flag) for a JSON entry value."""
    if isinstance(raw, str):
        if "." in raw or "e" in raw.lower():
            return Fraction(float(raw)), False
        return Fraction(raw), True
    if isinstance(raw, int):
        return Fraction(raw), True
    if isinstance(raw, float):
        return Fraction(raw), raw == int(raw)
    raise ValueError(f"cannot parse structure-constant value {raw!r}")


def load_gauge_algebra(source):
    """Load an algebra from a JSON file path or an already-parsed dict.

    Format: {"dim": N, "entries": [[a, b, c, value], ...]} where value is a
    rational string "p/q" (exact mode) or a decimal (checked-numeric mode).
    Entries list nonzero C_abc with a < b; the rest follows by antisymmetry.
    """
    if isinstance(source, (str, Path)):
        with open(source) as fh:
            source = json.load(fh)
    dim = source["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise IndexOutOfRange(f"algebra dimension {dim!r} must be a positive integer")
    entries = {}
    exact = True
    for item in source["entries"]:
        a, b, c, raw = item
        value, value_exact = _parse_value(raw)
        exact = exact and value_exact
        key = (a, b, c)
        if key in entries and entries[key] != value:
            raise AntisymmetryViolation(f"duplicate conflicting entry at triple {key}")
        entries[key] = value
    return gauge_algebra(dim, entries, exact=exact)


def algebra_to_dict(g):
    """Serialize back to the on-disk format (entries with a < b)."""
    entries = []
    for a, b, c, v in g.nonzero:
        if a < b:
            if g.exact:
                value = str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
            else:
                value = repr(float(v))
            entries.append([a, b, c, value])
    return {"dim": g.dim, "entries": entries}
