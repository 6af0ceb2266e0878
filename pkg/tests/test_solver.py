from fractions import Fraction
from itertools import product
from math import comb

import pytest

from sdym.expressions import Expression, coord, field, param
from sdym.solver import (
    AnsatzTooLarge,
    ConformalGaugeParams,
    DegreeOverflow,
    ShapeMismatch,
    SymmetryGenerator,
    bracket,
    closure_check,
    closure_table_is_lie,
    conformal_gauge_generator,
    dual_pair_closed_family,
    dual_pair_nullspace,
    family_within_caps,
    general_solution_family,
    generator_vector,
    generators_span_equal,
    mixing_nullspace,
    solve_ansatz,
    verify_generator,
    x_monomials,
    zero_generator,
)

ZERO4 = (0, 0, 0, 0)


def sym(name):
    return Expression.symbol(param(name))


def zchi(dim):
    return (Expression.zero(),) * dim


def symbolic_params(dim, chi_degree=1):
    chi = []
    for a in range(dim):
        e = sym(f"chi{a}")
        if chi_degree >= 1:
            for i in range(4):
                e = e + sym(f"chi{a}_{i}") * Expression.symbol(coord(i))
        chi.append(e)
    return ConformalGaugeParams(
        a=tuple(sym(f"a{m}") for m in range(4)),
        b={(l, m): sym(f"b{l}{m}") for l in range(4) for m in range(l + 1, 4)},
        c=tuple(sym(f"c{m}") for m in range(4)),
        d=sym("d"),
        chi=tuple(chi),
    )


# --- closed-form instantiation ----------------------------------------------


def test_translation_instance(su2):
    gen = conformal_gauge_generator(
        ConformalGaugeParams((1, 0, 0, 0), {}, ZERO4, 0, zchi(3)), su2
    )
    assert gen.h[0] == Expression.const(1)
    assert all(gen.h[i].is_zero() for i in (1, 2, 3))
    assert not gen.phi_linear and not gen.phi_inhom


def test_dilatation_instance(su2):
    gen = conformal_gauge_generator(
        ConformalGaugeParams(ZERO4, {}, ZERO4, 1, zchi(3)), su2
    )
    for lam in range(4):
        assert gen.h[lam] == Expression.symbol(coord(lam))
    for a in range(3):
        for k in range(4):
            assert gen.phi_linear[(a, k, a, k)] == Expression.const(-1)
    assert not gen.phi_inhom


def test_constant_gauge_instance(su2):
    gamma = Fraction(1)
    chi = (Expression.const(gamma), Expression.zero(), Expression.zero())
    gen = conformal_gauge_generator(
        ConformalGaugeParams(ZERO4, {}, ZERO4, 0, chi), su2
    )
    assert all(e.is_zero() for e in gen.h)
    # Phi_{a k} = C_{a b 0} gamma A_{b k}: only the epsilon entries survive
    for k in range(4):
        assert gen.phi_linear[(1, k, 2, k)] == Expression.const(1)
        assert gen.phi_linear[(2, k, 1, k)] == Expression.const(-1)
    assert all((0, k, n, k) not in gen.phi_linear for k in range(4) for n in range(3))


def test_chi_shape_mismatch(su2):
    with pytest.raises(ShapeMismatch):
        conformal_gauge_generator(
            ConformalGaugeParams(ZERO4, {}, ZERO4, 0, zchi(2)), su2
        )


def test_param_shapes():
    with pytest.raises(ShapeMismatch):
        ConformalGaugeParams((0, 0, 0), {}, ZERO4, 0, ())
    with pytest.raises(ValueError):
        ConformalGaugeParams(ZERO4, {(1, 0): 1}, ZERO4, 0, ())


# --- verification ------------------------------------------------------------


def test_symbolic_solution_verifies(su2, su2_system):
    gen = conformal_gauge_generator(symbolic_params(3, chi_degree=1), su2)
    report = verify_generator(gen, su2_system, su2)
    assert report.passed and report.max_residual == 0.0
    assert report.conditions_checked == len(su2_system.conditions)


def test_zero_generator_verifies(su2, su2_system):
    assert verify_generator(zero_generator(3), su2_system, su2).passed


def test_sheared_h_fails(su2, su2_system):
    gen = SymmetryGenerator(
        3,
        (Expression.symbol(coord(1)), Expression.zero(), Expression.zero(), Expression.zero()),
        {},
        {},
    )
    report = verify_generator(gen, su2_system, su2)
    assert not report.passed
    assert any(group == "linear" for group, _, _ in report.failures)


def test_report_dict_shape(su2, su2_system):
    report = verify_generator(zero_generator(3), su2_system, su2)
    blob = report.to_dict()
    assert blob["status"] == "pass"
    assert blob["conditions_checked"] > 0
    assert blob["failures"] == []


# --- ansatz nullspace ---------------------------------------------------------


def test_ansatz_dimensions_small(su2, su2_system):
    assert solve_ansatz(2, 0, su2, su2_system).dimension == 18
    assert solve_ansatz(0, 0, su2, su2_system).dimension == 7
    assert solve_ansatz(2, 1, su2, su2_system).dimension == 30


def test_ansatz_dimension_formula(su2, su2_system):
    for d in (0, 1):
        res = solve_ansatz(2, d, su2, su2_system)
        assert res.dimension == 15 + 3 * comb(d + 4, 4)


def test_ansatz_basis_members_verify(su2, su2_system):
    res = solve_ansatz(2, 0, su2, su2_system)
    assert len(res.basis) == 18
    for gen in res.basis:
        assert verify_generator(gen, su2_system, su2).passed


def test_ansatz_spans_closed_form(su2, su2_system):
    res = solve_ansatz(2, 0, su2, su2_system)
    family = family_within_caps(su2, 2, 0)
    assert len(family) == 18
    assert generators_span_equal(res.basis, family)


def test_degenerate_ansatz_is_translations_plus_constant_gauge(su2, su2_system):
    res = solve_ansatz(0, 0, su2, su2_system)
    family = family_within_caps(su2, 0, 0)
    assert len(family) == 7
    assert generators_span_equal(res.basis, family)


def test_cubic_ansatz_h_stays_quadratic(su2, su2_system):
    res = solve_ansatz(3, 0, su2, su2_system)
    assert res.dimension == 18
    for gen in res.basis:
        assert max(e.degree(kinds=("x",)) for e in gen.h) <= 2


def test_ansatz_cap(su2, su2_system):
    with pytest.raises(AnsatzTooLarge):
        solve_ansatz(3, 0, su2, su2_system, cap=100)
    with pytest.raises(DegreeOverflow):
        solve_ansatz(4, 0, su2, su2_system)


# --- brackets and closure -----------------------------------------------------


def _family_slices(g):
    fam = general_solution_family(g, chi_degree=0)
    return {
        "translations": fam[:4],
        "rotations": fam[4:10],
        "accelerations": fam[10:14],
        "dilatation": fam[14],
        "gauge": fam[15:],
        "all": fam,
    }


def test_translations_commute(su2):
    f = _family_slices(su2)
    for i, j in product(range(4), repeat=2):
        br = bracket(f["translations"][i], f["translations"][j], su2)
        assert br.is_zero()


def test_dilatation_translation_bracket(su2):
    f = _family_slices(su2)
    for mu in range(4):
        br = bracket(f["dilatation"], f["translations"][mu], su2)
        assert generator_vector(br) == generator_vector(
            f["translations"][mu].scaled(-1)
        )


def test_rotation_translation_bracket(su2):
    # rotation with unit coefficient on the (0,1) plane moves translations
    # into each other; the sign follows this instantiation's H = b x form
    f = _family_slices(su2)
    rot01 = f["rotations"][0]
    br = bracket(rot01, f["translations"][0], su2)
    assert generator_vector(br) == generator_vector(f["translations"][1])
    br = bracket(rot01, f["translations"][1], su2)
    assert generator_vector(br) == generator_vector(f["translations"][0].scaled(-1))


def test_bracket_degree_overflow(su2):
    x = Expression.symbol(coord(0))
    cubic = SymmetryGenerator(3, (x * x * x, Expression.zero(), Expression.zero(), Expression.zero()), {}, {})
    quadratic = SymmetryGenerator(3, (x * x, Expression.zero(), Expression.zero(), Expression.zero()), {}, {})
    with pytest.raises(DegreeOverflow):
        bracket(cubic, quadratic, su2)


def test_conformal_closure(su2):
    fam = _family_slices(su2)["all"][:15]
    result = closure_check(fam, su2)
    assert result.closed and not result.escapes
    assert closure_table_is_lie(result, 15)
    # antisymmetry of the expansion table, spot-checked through the accessor
    for i, j in ((0, 5), (3, 14), (7, 11)):
        for k in range(15):
            assert result.constant(i, j, k) == -result.constant(j, i, k)


def test_full_family_closure_and_gauge_sector(su2):
    f = _family_slices(su2)
    result = closure_check(f["all"], su2)
    assert result.closed
    # constant gauge transformations commute with every conformal motion
    for i in range(15):
        for j in range(15, 18):
            assert not result.table.get((i, j))
    # gauge-gauge brackets reproduce the structure constants
    for i in range(3):
        for j in range(3):
            if i >= j:
                continue
            coeffs = result.table[(15 + i, 15 + j)]
            assert set(coeffs) <= {15, 16, 17}


def test_non_symmetry_escapes_closure(su2):
    fam = _family_slices(su2)["all"][:15]
    rogue = SymmetryGenerator(
        3,
        (Expression.symbol(coord(1)) * Expression.symbol(coord(2)), Expression.zero(), Expression.zero(), Expression.zero()),
        {},
        {},
    )
    result = closure_check(fam + [rogue], su2)
    assert not result.closed and result.escapes


# --- replays ------------------------------------------------------------------


def test_mixing_nullspace_su2(su2):
    dim, basis, matches = mixing_nullspace(su2)
    assert dim == 4 and matches


def test_mixing_member_term_by_term(su2):
    # h = -delta, G = 1 satisfies every (a, b, c) relation through pairwise
    # cancellation of the four terms
    for a, b, c in product(range(3), repeat=3):
        total = Fraction(0)
        for n in range(3):
            total += su2.c(a, b, n) * (-Fraction(n == c))
            total -= su2.c(a, c, n) * (-Fraction(n == b))
            total -= su2.c(n, b, c) * (-Fraction(a == n))
        total += su2.c(a, b, c)
        assert total == 0


def test_mixing_nullspace_su3(su3):
    dim, _, matches = mixing_nullspace(su3)
    assert dim == 9 and matches


def test_dual_pair_dimensions():
    assert dual_pair_nullspace(2)[0] == 10
    assert dual_pair_nullspace(3)[0] == 10
    assert dual_pair_nullspace(1)[0] == 7


def test_dual_pair_matches_closed_family():
    from sdym.solver import triples_span_equal

    for degree in (2, 3):
        _, triples = dual_pair_nullspace(degree)
        assert triples_span_equal(triples, dual_pair_closed_family())


def test_closed_family_satisfies_equations():
    from sdym.solver import _pair_sum_equations

    eqs = _pair_sum_equations()
    assert len(eqs) == 8
    for p, q, r in dual_pair_closed_family():
        lookup = {"dp": p, "dq": q, "dr": r}
        for eq in eqs:
            total = Expression.zero()
            for (name, direction), coef in eq.items():
                total = total + lookup[name].diff(coord(direction)) * coef
            assert total.is_zero()


def test_x_monomials_counts():
    assert len(x_monomials(0)) == 1
    assert len(x_monomials(1)) == 5
    assert len(x_monomials(2)) == 15
    assert len(x_monomials(3)) == 35
    assert x_monomials(-1) == []


def test_bracket_antisymmetry_and_jacobi_on_generators(su2):
    f = _family_slices(su2)
    probe = [f["translations"][0], f["rotations"][0], f["dilatation"], f["accelerations"][2], f["gauge"][1]]
    for v1, v2 in product(probe, repeat=2):
        lhs = bracket(v1, v2, su2)
        rhs = bracket(v2, v1, su2).scaled(-1)
        assert generator_vector(lhs) == generator_vector(rhs)
    for v1, v2, v3 in [(probe[0], probe[1], probe[2]), (probe[1], probe[3], probe[4]), (probe[0], probe[3], probe[2])]:
        total = bracket(bracket(v1, v2, su2), v3, su2)
        total = total.plus(bracket(bracket(v2, v3, su2), v1, su2))
        total = total.plus(bracket(bracket(v3, v1, su2), v2, su2))
        assert total.is_zero()


def test_solution_space_is_normalization_independent(su2_system):
    """Rescaling the structure constants rescales potentials but leaves the
    symmetry count alone."""
    from sdym.prolongation import extract_determining_system
    from sdym.tensors import gauge_algebra

    scaled = gauge_algebra(3, {(0, 1, 2): Fraction(2)})
    sys = extract_determining_system(scaled)
    assert solve_ansatz(2, 0, scaled, sys).dimension == 18
