"""Sparse exact linear algebra over the rationals, plus float-tolerance twins.

Rows are dicts {column: coefficient}.  The exact paths keep integer rows
normalized by their gcd, so elimination is fraction-free; Fractions appear
only when converting nullspace vectors back out.  The float paths exist
for structure constants that are only known to double precision, where
exact rank would be meaningless: they use the same presolve plus an SVD
rank with an explicit tolerance.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

import numpy as np


def _intify(row):
    """Scale a rational row to coprime integers with a positive leading entry."""
    if not row:
        return {}
    denlcm = 1
    for c in row.values():
        c = Fraction(c)
        denlcm = denlcm * c.denominator // gcd(denlcm, c.denominator)
    ints = {k: int(Fraction(c) * denlcm) for k, c in row.items()}
    g = 0
    for v in ints.values():
        g = gcd(g, v)
    if g > 1:
        ints = {k: v // g for k, v in ints.items()}
    lead = ints[min(ints)]
    if lead < 0:
        ints = {k: -v for k, v in ints.items()}
    return ints


def row_key(row):
    """Canonical hashable form of a row up to rational scale."""
    return tuple(sorted(_intify(row).items()))


class RationalRREF:
    """Incremental Gauss-Jordan reduced form with integer fraction-free rows."""

    def __init__(self):
        self.pivots = {}  # pivot column -> integer row dict

    @property
    def rank(self):
        return len(self.pivots)

    def _combine(self, row, pivot_col):
        piv = self.pivots[pivot_col]
        a = piv[pivot_col]
        b = row[pivot_col]
        out = {k: a * v for k, v in row.items()}
        for k, v in piv.items():
            nv = out.get(k, 0) - b * v
            if nv:
                out[k] = nv
            else:
                out.pop(k, None)
        return out

    def reduce(self, row):
        row = _intify(row)
        while row:
            hit = None
            for col in row:
                if col in self.pivots:
                    hit = col
                    break
            if hit is None:
                break
            row = self._combine(row, hit)
            if row:
                g = 0
                for v in row.values():
                    g = gcd(g, v)
                if g > 1:
                    row = {k: v // g for k, v in row.items()}
        return row

    def insert(self, row):
        """Reduce and, if independent, add as a new pivot row; returns pivot col."""
        row = self.reduce(row)
        if not row:
            return None
        col = min(row)
        if row[col] < 0:
            row = {k: -v for k, v in row.items()}
        for pcol, prow in list(self.pivots.items()):
            if col in prow:
                a = row[col]
                b = prow[col]
                merged = {k: a * v for k, v in prow.items()}
                for k, v in row.items():
                    nv = merged.get(k, 0) - b * v
                    if nv:
                        merged[k] = nv
                    else:
                        merged.pop(k, None)
                g = 0
                for v in merged.values():
                    g = gcd(g, v)
                if g > 1:
                    merged = {k: v // g for k, v in merged.items()}
                if merged[pcol] < 0:
                    merged = {k: -v for k, v in merged.items()}
                self.pivots[pcol] = merged
        self.pivots[col] = row
        return col

    def contains(self, row):
        return not self.reduce(row)


def rref_basis(rows):
    rref = RationalRREF()
    for row in sorted(rows, key=len):
        rref.insert(row)
    return rref


def exact_rank(rows):
    return rref_basis(rows).rank


def span_contains_all(base_rows, probe_rows):
    rref = rref_basis(base_rows)
    return all(rref.contains(r) for r in probe_rows)


def spans_equal(rows_a, rows_b):
    return span_contains_all(rows_a, rows_b) and span_contains_all(rows_b, rows_a)


class SpanSolver:
    """Echelonized span of rational vectors with expansion-coefficient tracking."""

    def __init__(self, vectors):
        self.pivots = []  # (pivot col, row dict, combo dict idx -> Fraction), echelon order
        for i, v in enumerate(vectors):
            self._insert({k: Fraction(c) for k, c in v.items() if c}, {i: Fraction(1)})

    def _reduce(self, row, combo):
        for pcol, prow, pcombo in self.pivots:
            c = row.get(pcol)
            if not c:
                continue
            f = c / prow[pcol]
            for k, v in prow.items():
                nv = row.get(k, Fraction(0)) - f * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
            for k, v in pcombo.items():
                nv = combo.get(k, Fraction(0)) - f * v
                if nv:
                    combo[k] = nv
                else:
                    combo.pop(k, None)
        return row, combo

    def _insert(self, row, combo):
        row, combo = self._reduce(row, combo)
        if not row:
            return False
        pcol = min(row)
        self.pivots.append((pcol, row, combo))
        self.pivots.sort(key=lambda t: t[0])
        return True

    @property
    def rank(self):
        return len(self.pivots)

    def express(self, v):
        """Coefficients {i: c} with v = sum c_i * vectors[i], or None if outside."""
        row = {k: Fraction(c) for k, c in v.items() if c}
        combo = {}
        row, combo = self._reduce(row, combo)
        if row:
            return None
        return {k: -c for k, c in combo.items()}


# ---------------------------------------------------------------------------
# Homogeneous nullspace with a structural presolve.
#
# Singleton rows pin a variable to zero; two-term rows express one variable
# as a rational multiple of another.  Iterating those two rules to a fixed
# point shrinks the ansatz systems by an order of magnitude before the
# generic elimination runs.
# ---------------------------------------------------------------------------


class _Presolve:
    def __init__(self):
        self.parent = {}  # col -> (col2, Fraction ratio), meaning col = ratio * col2
        self.zero = set()

    def find(self, col):
        """Resolve to (root, ratio) with col = ratio * root, or (None, 0) if pinned."""
        chain = []
        ratio = Fraction(1)
        cur = col
        while True:
            if cur in self.zero:
                for c in chain:
                    self.zero.add(c)
                return None, Fraction(0)
            nxt = self.parent.get(cur)
            if nxt is None:
                break
            chain.append(cur)
            cur, ratio = nxt[0], ratio * nxt[1]
        for c in chain:
            r = Fraction(1)
            node = c
            while node != cur:
                step = self.parent[node]
                r *= step[1]
                node = step[0]
            self.parent[c] = (cur, r)
        return cur, ratio

    def resolve_row(self, row):
        out = {}
        for col, coef in row.items():
            root, ratio = self.find(col)
            if root is None:
                continue
            v = out.get(root, Fraction(0)) + Fraction(coef) * ratio
            if v:
                out[root] = v
            else:
                out.pop(root, None)
        return out


def _presolve_rows(rows):
    pre = _Presolve()
    pending = [dict(r) for r in rows]
    core = []
    while True:
        progress = False
        nxt = []
        for row in pending:
            row = pre.resolve_row(row)
            if not row:
                continue
            if len(row) == 1:
                (col,) = row
                pre.zero.add(col)
                progress = True
            elif len(row) == 2:
                (c1, v1), (c2, v2) = row.items()
                pre.parent[c1] = (c2, -Fraction(v2) / Fraction(v1))
                progress = True
            else:
                nxt.append(row)
        if not progress:
            core = nxt
            break
        pending = nxt
    # one final resolve so core rows reference roots only
    core = [r for r in (pre.resolve_row(row) for row in core) if r]
    return pre, core


def exact_nullspace(rows, columns, presolve=True):
    """Nullspace basis of homogeneous rows over the given column list.

    Returns a list of {column: Fraction} vectors.  Columns absent from all
    rows are free.
    """
    columns = list(columns)
    if presolve:
        pre, core = _presolve_rows(rows)
    else:
        pre, core = _Presolve(), [dict(r) for r in rows]

    seen = set()
    unique_core = []
    for r in core:
        k = row_key(r)
        if k not in seen:
            seen.add(k)
            unique_core.append(r)
    rref = rref_basis(unique_core)

    pivot_cols = set(rref.pivots)
    core_cols = set()
    for r in rref.pivots.values():
        core_cols.update(r)

    basis_core = []
    for free in sorted(core_cols - pivot_cols):
        vec = {free: Fraction(1)}
        for pcol, prow in rref.pivots.items():
            if free in prow:
                vec[pcol] = -Fraction(prow[free], prow[pcol])
        basis_core.append(vec)

    # roots never constrained by the core are fully free directions
    roots_loose = []
    for col in columns:
        root, _ = pre.find(col)
        if root is not None and root not in core_cols and root == col:
            roots_loose.append(col)
    for col in roots_loose:
        basis_core.append({col: Fraction(1)})

    basis = []
    for vec in basis_core:
        full = {}
        for col in columns:
            root, ratio = pre.find(col)
            if root is None:
                continue
            v = vec.get(root)
            if v:
                value = ratio * v
                if value:
                    full[col] = value
        if full:
            basis.append(full)
    return basis


def exact_nullity(rows, columns, presolve=True):
    return len(exact_nullspace(rows, columns, presolve=presolve))


# ---------------------------------------------------------------------------
# Float path (checked-numeric structure constants).
# ---------------------------------------------------------------------------


def _resolve_float(row, parent, zeroed, atol):
    out = {}
    for col, coef in row.items():
        ratio = 1.0
        while col in parent and col not in zeroed:
            col, r = parent[col][0], parent[col][1]
            ratio *= r
        if col in zeroed:
            continue
        out[col] = out.get(col, 0.0) + float(coef) * ratio
    return {k: v for k, v in out.items() if abs(v) > atol}


def float_nullity(rows, columns, tol=1e-9, atol_rel=1e-8, presolve=True):
    """Nullity via SVD rank with tolerance, after a conservative presolve.

    Entries below ``atol_rel`` times the largest input coefficient are
    treated as exact-cancellation noise and dropped; without that floor a
    row that is mathematically zero would masquerade as a constraint.
    """
    columns = list(columns)
    parent, zeroed = {}, set()
    pending = [{k: float(v) for k, v in r.items()} for r in rows]
    core = []
    scale = max((abs(v) for r in pending for v in r.values()), default=0.0)
    atol = atol_rel * scale
    if presolve:
        while True:
            progress = False
            nxt = []
            for row in pending:
                row = _resolve_float(row, parent, zeroed, atol)
                if not row:
                    continue
                if len(row) == 1:
                    zeroed.add(next(iter(row)))
                    progress = True
                elif len(row) == 2:
                    (c1, v1), (c2, v2) = row.items()
                    parent[c1] = (c2, -v2 / v1)
                    progress = True
                else:
                    nxt.append(row)
            if not progress:
                core = nxt
                break
            pending = nxt
        core = [r for r in (_resolve_float(row, parent, zeroed, atol) for row in core) if r]
    else:
        core = [{k: v for k, v in r.items() if abs(v) > atol} for r in pending]
        core = [r for r in core if r]

    core_cols = sorted({c for r in core for c in r})
    col_pos = {c: i for i, c in enumerate(core_cols)}
    if core:
        mat = np.zeros((len(core), len(core_cols)))
        for i, r in enumerate(core):
            for c, v in r.items():
                mat[i, col_pos[c]] = v
        sv = np.linalg.svd(mat, compute_uv=False)
        rank = int(np.sum(sv > tol * sv[0])) if sv.size else 0
    else:
        rank = 0
    core_nullity = len(core_cols) - rank

    loose = 0
    for col in columns:
        cur, dead = col, False
        while cur in parent and cur not in zeroed:
            cur = parent[cur][0]
        if cur in zeroed:
            dead = True
        if not dead and cur not in col_pos and cur == col:
            loose += 1
    return core_nullity + loose
