import json
from fractions import Fraction
from itertools import permutations, product

import pytest

from sdym.tensors import (
    AntisymmetryViolation,
    IndexOutOfRange,
    JacobiViolation,
    algebra_to_dict,
    gauge_algebra,
    kronecker,
    levi_civita,
    load_gauge_algebra,
    su2_algebra,
    z_component,
)


def test_kronecker_examples():
    assert kronecker(0, 0) == 1
    assert kronecker(0, 1) == 0
    assert kronecker(3, 3) == 1


def test_kronecker_range_checked():
    with pytest.raises(IndexOutOfRange):
        kronecker(4, 0)
    with pytest.raises(IndexOutOfRange):
        kronecker(0, -1)


def test_levi_civita_examples():
    assert levi_civita(0, 1, 2, 3) == 1
    assert levi_civita(1, 0, 2, 3) == -1
    assert levi_civita(0, 0, 2, 3) == 0


def _parity(seq):
    # independent oracle: count explicit transpositions via selection sort
    seq = list(seq)
    swaps = 0
    for i in range(len(seq)):
        j = seq.index(min(seq[i:]), i)
        if j != i:
            seq[i], seq[j] = seq[j], seq[i]
            swaps += 1
    return -1 if swaps % 2 else 1


def test_levi_civita_matches_permutation_parity():
    for perm in permutations(range(4)):
        assert levi_civita(*perm) == _parity(perm)


def test_levi_civita_vanishes_iff_repeated():
    for idx in product(range(4), repeat=4):
        if len(set(idx)) < 4:
            assert levi_civita(*idx) == 0
        else:
            assert levi_civita(*idx) != 0


def test_z_component_examples():
    assert z_component(0, 0, 1, 1) == 1
    assert z_component(0, 2, 1, 3) == -1
    assert z_component(0, 1, 1, 0) == -1


def test_z_antisymmetries_brute_force():
    for mu, lam, nu, kap in product(range(4), repeat=4):
        z = z_component(mu, lam, nu, kap)
        assert z == -z_component(mu, kap, nu, lam)
        assert z == -z_component(nu, lam, mu, kap)


def test_z_anti_self_duality_brute_force():
    for mu, lam, nu, kap in product(range(4), repeat=4):
        dual = Fraction(0)
        for al, be in product(range(4), repeat=2):
            dual += Fraction(levi_civita(mu, nu, al, be) * z_component(al, lam, be, kap), 2)
        assert dual == -z_component(mu, lam, nu, kap)


def test_su2_accepted():
    g = su2_algebra()
    assert g.dim == 3 and g.exact
    assert g.c(0, 1, 2) == 1
    assert g.c(1, 0, 2) == -1
    assert g.c(2, 0, 1) == 1


def test_repeated_index_entry_rejected():
    with pytest.raises(AntisymmetryViolation):
        gauge_algebra(3, {(0, 0, 1): Fraction(1)})


def test_inconsistent_entries_rejected():
    with pytest.raises(AntisymmetryViolation):
        gauge_algebra(3, {(0, 1, 2): Fraction(1), (1, 0, 2): Fraction(1)})


def test_jacobi_violation_rejected():
    with pytest.raises(JacobiViolation) as err:
        gauge_algebra(
            6, {(0, 1, 2): Fraction(1), (0, 3, 4): Fraction(1), (1, 3, 5): Fraction(1)}
        )
    assert "quadruple" in str(err.value)


def test_entry_index_out_of_range():
    with pytest.raises(IndexOutOfRange):
        gauge_algebra(3, {(0, 1, 3): Fraction(1)})


def test_su3_accepted_with_brute_force_jacobi(su3):
    assert su3.dim == 8 and not su3.exact
    tol = 1e-12
    for a, b, c, d in product(range(8), repeat=4):
        assert abs(float(su3.jacobi_residual(a, b, c, d))) < tol
    # total antisymmetry of the loaded table
    for a, b, c in product(range(8), repeat=3):
        v = su3.c(a, b, c)
        assert su3.c(b, a, c) == -v and su3.c(a, c, b) == -v


def test_serialization_round_trip(tmp_path, su3):
    for g in (su2_algebra(), su3):
        blob = algebra_to_dict(g)
        path = tmp_path / "alg.json"
        path.write_text(json.dumps(blob))
        g2 = load_gauge_algebra(path)
        assert g2.dim == g.dim
        assert g2.exact == g.exact
        assert g2.table == g.table


def test_loader_rejects_bad_dim():
    with pytest.raises(IndexOutOfRange):
        load_gauge_algebra({"dim": 0, "entries": []})
