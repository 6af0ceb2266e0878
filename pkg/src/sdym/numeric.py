"""Floating-point validation against an explicit self-dual gauge field.

The fixture is the standard one-instanton su(2) potential in regular gauge,

    A_{a mu}(x) = 2 eta_{a mu nu} (x - x0)_nu / (|x - x0|^2 + rho^2),

with the symbol convention pinned empirically so its residual in the
explicit equation families vanishes under eps_{0123} = 1 and C = epsilon:
the spatial block of eta is the 3d epsilon and the time components are
eta_{a,0,i} = +delta_{a,i-1}, eta_{a,i,0} = -delta_{a,i-1} (the self-dual
variant), overall field sign +1.  The anti-self-dual variant is kept for
the test that demonstrates the pinning.

Symmetry flows are validated through the evolutionary direction
Q = Phi(x, A) - H . dA: adding eps * Q to an exact solution must leave a
residual of order eps^2, while a generic direction scales like eps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .expressions import coord
from .tensors import su2_algebra

SELF_DUAL = "self-dual"
ANTI_SELF_DUAL = "anti-self-dual"

DEFAULT_CONVENTION = {"variant": SELF_DUAL, "sign": 1.0}

EPS_FLOOR = 1e-6


class InvalidScale(ValueError):
    """Instanton size must be positive."""


class NotASolution(RuntimeError):
    """Flow scaling demands an exact solution as the base field."""


@dataclass
class FieldEvaluator:
    """Analytic gauge-field sample.

    a_at(x) -> (dim, 4) potentials; da_at(x) -> (dim, 4, 4) with
    [a][sigma][lam] = d_lam A_{a sigma}; d2a_at optionally supplies
    [a][sigma][lam][rho] = d_rho d_lam A_{a sigma}, needed to transport
    derivatives along coordinate parts of a flow.
    """

    dim: int
    a_at: object
    da_at: object
    d2a_at: object = None


def _eps3(i, j, k):
    return (i - j) * (j - k) * (k - i) // 2


def thooft_symbol(variant=SELF_DUAL):
    """eta[a][mu][nu] for gauge a in 0..2 and spacetime mu, nu in 0..3."""
    s = -1.0 if variant == SELF_DUAL else 1.0
    eta = np.zeros((3, 4, 4))
    for a in range(3):
        for i in range(1, 4):
            for j in range(1, 4):
                eta[a][i][j] = _eps3(a, i - 1, j - 1)
            eta[a][i][0] = s * (a == i - 1)
            eta[a][0][i] = -s * (a == i - 1)
    return eta


def bpst_instanton(rho, center=(0.0, 0.0, 0.0, 0.0), variant=SELF_DUAL, sign=1.0):
    """One-instanton field with closed-form first and second derivatives."""
    if not rho > 0:
        raise InvalidScale(f"instanton size must be positive, got {rho}")
    eta = thooft_symbol(variant)
    center = np.asarray(center, dtype=float)
    rho2 = float(rho) ** 2

    def a_at(x):
        y = np.asarray(x, dtype=float) - center
        d = y @ y + rho2
        return sign * 2.0 * np.einsum("amn,n->am", eta, y) / d

    def da_at(x):
        y = np.asarray(x, dtype=float) - center
        d = y @ y + rho2
        return sign * (
            2.0 * eta / d
            - 4.0 * np.einsum("amn,n,l->aml", eta, y, y) / d**2
        )

    def d2a_at(x):
        y = np.asarray(x, dtype=float) - center
        d = y @ y + rho2
        ident = np.eye(4)
        ey = np.einsum("amn,n->am", eta, y)
        out = (
            -4.0 * np.einsum("aml,r->amlr", eta, y) / d**2
            - 4.0 * np.einsum("amr,l->amlr", eta, y) / d**2
            - 4.0 * np.einsum("am,lr->amlr", ey, ident) / d**2
            + 16.0 * np.einsum("am,l,r->amlr", ey, y, y) / d**3
        )
        return sign * out

    return FieldEvaluator(dim=3, a_at=a_at, da_at=da_at, d2a_at=d2a_at)


_FAMILIES = (
    ((2, 3), (0, 1), ((0, 1), (3, 2))),
    ((3, 1), (0, 2), ((0, 2), (1, 3))),
    ((1, 2), (0, 3), ((0, 3), (2, 1))),
)


def sdym_residual_values(a, da, g):
    """Residuals of the three explicit equation families from raw arrays."""
    res = np.zeros((3, g.dim))
    for fi, ((l1, l2), (r1, r2), quads) in enumerate(_FAMILIES):
        for n in range(g.dim):
            lhs = da[n][l2][l1] - da[n][l1][l2]
            rhs = da[n][r2][r1] - da[n][r1][r2]
            quad = 0.0
            for b, c, v in g.by_first[n]:
                fv = float(v)
                for p1, p2 in quads:
                    quad += fv * a[b][p1] * a[c][p2]
            res[fi][n] = lhs - rhs - quad
    return res


def sdym_residual_numeric(f, x, g=None):
    g = g if g is not None else su2_algebra()
    return sdym_residual_values(f.a_at(x), f.da_at(x), g)


def _polynomial_evaluators(gen):
    """Compile the generator's polynomials into plain float functions."""

    def compile_expr(e):
        terms = [
            (float(c), tuple((s[1], k) for s, k in m)) for m, c in e.terms.items()
        ]

        def call(x):
            total = 0.0
            for c, powers in terms:
                v = c
                for idx, k in powers:
                    v *= x[idx] ** k
                total += v
            return total

        return call

    h = [compile_expr(e) for e in gen.h]
    dh = [[compile_expr(e.diff(coord(lam))) for lam in range(4)] for e in gen.h]
    lin = {k: compile_expr(e) for k, e in gen.phi_linear.items()}
    dlin = {
        k: [compile_expr(e.diff(coord(lam))) for lam in range(4)]
        for k, e in gen.phi_linear.items()
    }
    inh = {k: compile_expr(e) for k, e in gen.phi_inhom.items()}
    dinh = {
        k: [compile_expr(e.diff(coord(lam))) for lam in range(4)]
        for k, e in gen.phi_inhom.items()
    }
    return h, dh, lin, dlin, inh, dinh


def evolutionary_rep(gen, f, g=None):
    """Evolutionary direction Q = Phi(x, A(x)) - H . dA(x) of a generator.

    Needs second derivatives of the base field whenever the generator moves
    coordinates (H != 0); the instanton fixture supplies them analytically.
    """
    g = g if g is not None else su2_algebra()
    if any(s[0] == "par" for e in gen.h for s in e.symbols()):
        raise ValueError("numeric flow requires a parameter-free generator")
    h, dh, lin, dlin, inh, dinh = _polynomial_evaluators(gen)
    has_h = any(e for e in gen.h)
    if has_h and f.d2a_at is None:
        raise ValueError("field evaluator lacks second derivatives for a moving flow")

    def q_at(x):
        a = f.a_at(x)
        da = f.da_at(x)
        q = np.zeros((g.dim, 4))
        for (ga, k, n, al), fn in lin.items():
            q[ga][k] += fn(x) * a[n][al]
        for (ga, k), fn in inh.items():
            q[ga][k] += fn(x)
        hv = [fn(x) for fn in h]
        for ga in range(g.dim):
            for k in range(4):
                for beta in range(4):
                    q[ga][k] -= hv[beta] * da[ga][k][beta]
        return q

    def dq_at(x):
        a = f.a_at(x)
        da = f.da_at(x)
        d2a = f.d2a_at(x) if f.d2a_at is not None else None
        dq = np.zeros((g.dim, 4, 4))
        for (ga, k, n, al), fns in dlin.items():
            fn_val = lin[(ga, k, n, al)](x)
            for lam in range(4):
                dq[ga][k][lam] += fns[lam](x) * a[n][al]
                dq[ga][k][lam] += fn_val * da[n][al][lam]
        for (ga, k), fns in dinh.items():
            for lam in range(4):
                dq[ga][k][lam] += fns[lam](x)
        hv = [fn(x) for fn in h]
        dhv = [[fn(x) for fn in row] for row in dh]
        for ga in range(g.dim):
            for k in range(4):
                for lam in range(4):
                    for beta in range(4):
                        dq[ga][k][lam] -= dhv[beta][lam] * da[ga][k][beta]
                        if d2a is not None:
                            dq[ga][k][lam] -= hv[beta] * d2a[ga][k][beta][lam]
        return dq

    return FieldEvaluator(dim=g.dim, a_at=q_at, da_at=dq_at)


def random_direction(g, seed=0, degree=1):
    """Seeded polynomial field direction, a control that is not a symmetry."""
    rng = np.random.default_rng(seed)
    coeffs = rng.integers(-3, 4, size=(g.dim, 4, 5)).astype(float)

    def a_at(x):
        x = np.asarray(x, dtype=float)
        basis = np.concatenate(([1.0], x[:4])) if degree >= 1 else np.array([1.0])
        return np.einsum("akc,c->ak", coeffs[:, :, : basis.size], basis)

    def da_at(x):
        out = np.zeros((g.dim, 4, 4))
        if degree >= 1:
            for lam in range(4):
                out[:, :, lam] = coeffs[:, :, 1 + lam]
        return out

    def d2a_at(x):
        return np.zeros((g.dim, 4, 4, 4))

    return FieldEvaluator(dim=g.dim, a_at=a_at, da_at=da_at, d2a_at=d2a_at)


def halton_points(count, seed=0, low=-2.0, high=2.0, exclude=(), radius=0.1):
    """Low-discrepancy sample of [low, high]^4; ``seed`` offsets the sequence."""
    primes = (2, 3, 5, 7)
    pts = []
    index = 1 + int(seed)
    while len(pts) < count:
        p = []
        for base in primes:
            i, fr, val = index, 1.0, 0.0
            while i > 0:
                fr /= base
                val += fr * (i % base)
                i //= base
            p.append(val)
        x = low + (high - low) * np.array(p)
        index += 1
        if any(np.linalg.norm(x - np.asarray(c)) < radius for c in exclude):
            continue
        pts.append(x)
    return np.array(pts)


@dataclass
class FlowResult:
    eps_values: list
    residual_norms: list
    fitted_slope: float


def flow_residual_scaling(f, gen, eps_list, g=None, points=None):
    """Max-norm residual of A + eps Q over samples, with a log-log slope fit."""
    g = g if g is not None else su2_algebra()
    eps_list = [float(e) for e in eps_list]
    if len(eps_list) < 3:
        raise ValueError("need at least three eps values for a slope fit")
    if any(not EPS_FLOOR < e < 1.0 for e in eps_list):
        raise ValueError(f"eps values must lie in ({EPS_FLOOR}, 1)")
    if points is None:
        points = halton_points(100)
    base = max(
        float(np.max(np.abs(sdym_residual_values(f.a_at(x), f.da_at(x), g))))
        for x in points
    )
    if base > 1e-10:
        raise NotASolution(f"base field residual {base:.3e} exceeds 1e-10")
    q = gen if isinstance(gen, FieldEvaluator) else evolutionary_rep(gen, f, g)
    samples = [(x, f.a_at(x), f.da_at(x), q.a_at(x), q.da_at(x)) for x in points]
    norms = []
    for eps in eps_list:
        worst = 0.0
        for x, a, da, qa, qda in samples:
            res = sdym_residual_values(a + eps * qa, da + eps * qda, g)
            worst = max(worst, float(np.max(np.abs(res))))
        norms.append(worst)
    slope = float(np.polyfit(np.log(eps_list), np.log(norms), 1)[0])
    return FlowResult(eps_values=eps_list, residual_norms=norms, fitted_slope=slope)
