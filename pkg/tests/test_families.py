from fractions import Fraction

import pytest

from mghankel.blockops import BlockMatrix, build_moment_matrix
from mghankel.factorize import lu_factorize
from mghankel.families import (
    LinearForm,
    MatrixPolynomial,
    associated_minus,
    associated_plus,
    check_biorthogonality,
    check_connection_formulas,
    check_matrix_notation,
    check_modified_orthogonality,
    dual_associated_minus,
    dual_associated_plus,
    dual_family,
    eval_form,
    eval_poly,
    form_against_monomial,
    pair_poly_form,
    poly_against_weight,
    poly_residual,
    primary_family,
)
from mghankel.numerics import mat_eye, mat_zeros
from mghankel.weights import BaseMeasure, SeedWeight, hankel_family

F = Fraction


def coeffs_of(p):
    return [c[0][0] for c in p.coeffs]


def test_primary_family_hilbert(hilbert_bundle):
    _, _, factors = hilbert_bundle
    polys = primary_family(factors)
    assert coeffs_of(polys[0]) == [1]
    assert coeffs_of(polys[1]) == [F(-1, 2), 1]
    assert all(p.is_monic() for p in polys)


def test_primary_family_identity_moments():
    factors = lu_factorize(BlockMatrix.identity(2, 4))
    for level, p in enumerate(primary_family(factors)):
        assert p.degree() == level
        assert eval_poly(p, F(1, 3)) == [[F(1, 3) ** level, 0], [0, F(1, 3) ** level]]


def test_primary_family_monic_hermite(hermite_bundle):
    _, _, factors = hermite_bundle
    p2 = primary_family(factors)[2]
    assert abs(p2.coeffs[0][0][0] + 0.5) < 1e-12
    assert abs(p2.coeffs[1][0][0]) < 1e-12


def test_dual_family_identity_moments(legendre_family):
    factors = lu_factorize(BlockMatrix.identity(1, 4))
    forms = dual_family(factors)
    x = F(2, 7)
    for level, form in enumerate(forms):
        assert eval_form(form, legendre_family, x) == [[x**level]]


def test_dual_family_hilbert(hilbert_bundle, legendre_family):
    _, _, factors = hilbert_bundle
    forms = dual_family(factors)
    assert [d[0][0] for d in forms[1].coeffs] == [-6, 12]
    assert eval_form(forms[1], legendre_family, F(1, 2)) == [[0]]
    assert eval_form(forms[1], legendre_family, F(1, 4)) == [[-3]]


def test_families_biorthogonal(hilbert_bundle):
    _, g, factors = hilbert_bundle
    polys, forms = primary_family(factors), dual_family(factors)
    for i in range(g.nrows):
        for j in range(g.ncols):
            expected = mat_eye(1) if i == j else mat_zeros(1, 1)
            assert pair_poly_form(g, polys[i], forms[j]) == expected
    assert check_biorthogonality(g, factors).passed


def test_eval_poly_examples():
    p = MatrixPolynomial.of(1, [[[F(-1, 2)]], [[F(1)]]])
    assert eval_poly(p, F(1, 2)) == [[0]]
    q = MatrixPolynomial.of(1, [[[F(-1, 2)]], [[0]], [[1]]])
    assert eval_poly(q, 0) == [[F(-1, 2)]]
    const = MatrixPolynomial.of(2, [[[1, 2], [3, 4]]])
    assert eval_poly(const, F(7, 3)) == [[1, 2], [3, 4]]


def test_eval_form_zero(legendre_family):
    zero = LinearForm.of(1, [mat_zeros(1, 1)])
    assert eval_form(zero, legendre_family, F(1, 3)) == [[0]]


def test_associated_plus_is_family_at_zero(hilbert_bundle):
    _, g, factors = hilbert_bundle
    polys = primary_family(factors)
    for level in range(3):
        assert poly_residual(associated_plus(g, level, 0), polys[level]) == 0


def test_associated_plus_hilbert():
    g = build_moment_matrix(hankel_family(SeedWeight.of([1], BaseMeasure.finite_interval(0, 1))), 4)
    p = associated_plus(g, 1, 1)
    assert coeffs_of(p) == [F(-1, 3), 0, 1]
    assert p.is_monic() and p.degree() == 2
    assert poly_against_weight(g, p, 0) == [[0]]


def test_associated_plus_empty_constraints(hilbert_bundle):
    _, g, _ = hilbert_bundle
    p = associated_plus(g, 0, 2)
    assert coeffs_of(p) == [0, 0, 1]


def test_associated_minus_scaled_family(hilbert_bundle):
    _, g, factors = hilbert_bundle
    polys = primary_family(factors)
    for level in range(3):
        direct = associated_minus(g, level, 0)
        h = factors.normalization(level)[0][0]
        assert [h * c for c in coeffs_of(direct)] == coeffs_of(polys[level])


def test_associated_minus_hilbert(hilbert_bundle):
    _, g, _ = hilbert_bundle
    p = associated_minus(g, 1, 1)
    assert coeffs_of(p) == [4, -6]
    assert poly_against_weight(g, p, 0) == [[1]]
    assert poly_against_weight(g, p, 1) == [[0]]


def test_associated_minus_identity_moments():
    g = BlockMatrix.identity(1, 5)
    for level in range(4):
        for j in range(level + 1):
            p = associated_minus(g, level, j)
            assert coeffs_of(p) == [1 if k == level - j else 0 for k in range(level + 1)]
            # exact degree can drop below the level bound (recorded, not forced)
            assert p.degree() == level - j <= level


def test_associated_minus_rejects_large_j(hilbert_bundle):
    _, g, _ = hilbert_bundle
    with pytest.raises(ValueError):
        associated_minus(g, 1, 2)


def test_dual_associated_minus_is_dual_family(hilbert_bundle):
    _, g, factors = hilbert_bundle
    forms = dual_family(factors)
    for level in range(3):
        direct = dual_associated_minus(g, level, 0)
        assert [d[0][0] for d in direct.coeffs] == [d[0][0] for d in forms[level].coeffs]


def test_dual_associated_minus_hilbert(hilbert_bundle, legendre_family):
    _, g, _ = hilbert_bundle
    f = dual_associated_minus(g, 1, 1)
    assert [d[0][0] for d in f.coeffs] == [4, -6]
    assert form_against_monomial(g, 0, f) == [[1]]
    assert form_against_monomial(g, 1, f) == [[0]]
    assert eval_form(f, legendre_family, F(1, 2)) == [[1]]


def test_dual_associated_identity_moments():
    g = BlockMatrix.identity(1, 5)
    f = dual_associated_minus(g, 3, 2)
    assert [d[0][0] for d in f.coeffs] == [0, 1, 0, 0]


def test_dual_associated_plus_annihilates(hilbert_bundle):
    _, g, _ = hilbert_bundle
    f = dual_associated_plus(g, 1, 1)
    assert [d[0][0] for d in f.coeffs] == [F(-1, 3), 0, 1]
    assert form_against_monomial(g, 0, f) == [[0]]


def test_connection_identity_at_zero(hilbert_bundle):
    _, g, factors = hilbert_bundle
    outcome = check_connection_formulas(g, factors, 2, 0)
    assert outcome.passed and outcome.residual == 0


def test_connection_reads_lower_inverse(hilbert_bundle):
    _, g, factors = hilbert_bundle
    polys = primary_family(factors)
    direct = associated_plus(g, 1, 1)
    mix = factors.lower_inv.block(2, 1)[0][0]
    assert mix == 1
    combined = [
        polys[2].coeffs[k][0][0] + mix * (polys[1].coeffs[k][0][0] if k < 2 else 0)
        for k in range(3)
    ]
    assert coeffs_of(direct) == combined
    assert check_connection_formulas(g, factors, 1, 1).residual == 0


def test_connection_identity_moments():
    g = BlockMatrix.identity(1, 5)
    factors = lu_factorize(g)
    for level in range(1, 3):
        for j in range(level + 1):
            assert check_connection_formulas(g, factors, level, j).residual == 0


def test_corrected_minus_pairing(legendre_bundle):
    # pairing the minus family against the duals reads off a row of the
    # inverse upper factor at index level - j
    _, g, factors = legendre_bundle
    forms = dual_family(factors)
    level, j = 3, 2
    minus = associated_minus(g, level, j)
    for k in range(level + 1):
        expected = factors.upper_inv.block(level - j, k)
        assert pair_poly_form(g, minus, forms[k]) == [list(r) for r in expected]


def test_modified_orthogonality_examples(hilbert_bundle):
    _, g, _ = hilbert_bundle
    assert check_modified_orthogonality(g, 1, 1).residual == 0
    assert check_modified_orthogonality(g, 0, 0).passed  # vacuous plus constraints
    with pytest.raises(ValueError):
        check_modified_orthogonality(g, 0, 2)  # minus family undefined for j > l


def test_matrix_notation_agreement(mg12_bundle):
    _, g, factors = mg12_bundle
    for level in range(1, 6):
        outcome = check_matrix_notation(g, factors, level)
        assert outcome.passed and outcome.residual == 0


def test_plus_family_monic_of_stated_degree(mgn2_bundle):
    _, g, _ = mgn2_bundle
    for level in range(3):
        for j in range(3):
            p = associated_plus(g, level, j)
            assert p.is_monic() and p.degree() == level + j
