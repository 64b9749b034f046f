from fractions import Fraction

import pytest

from mghankel.cdkernel import KernelEvaluator, classical_cd, diag_power
from mghankel.factorize import lu_factorize
from mghankel.families import (
    MatrixPolynomial,
    eval_poly,
    form_residual,
    poly_residual,
    primary_family,
    dual_family,
)
from mghankel.numerics import SingularLocusError, mat_add, matrix_residual_norm
from mghankel.weights import BaseMeasure, SeedWeight

from conftest import interval_seed

F = Fraction


def hilbert_kernel_value(x, y):
    return 12 * x * y - 6 * x - 6 * y + 4


@pytest.fixture(scope="module")
def hilbert_ev(hilbert_bundle):
    fam, g, factors = hilbert_bundle
    return KernelEvaluator(fam, g, factors, 2)


def test_kernel_empty_sum(hilbert_bundle):
    fam, g, factors = hilbert_bundle
    ev = KernelEvaluator(fam, g, factors, 0)
    assert ev.kernel_sum(F(1, 3), F(1, 5)) == [[0]]
    assert ev.kernel_abc(F(1, 3), F(1, 5)) == [[0]]
    assert ev.cd_lhs(F(1, 3), F(1, 5)) == [[0]]
    assert ev.cd_rhs_schur(F(1, 3), F(1, 5)) == [[0]]


def test_kernel_single_term(hilbert_bundle):
    fam, g, factors = hilbert_bundle
    ev = KernelEvaluator(fam, g, factors, 1)
    assert ev.kernel_sum(F(1, 3), F(2, 3)) == [[1]]
    assert ev.kernel_abc(F(1, 3), F(2, 3)) == [[1]]


def test_kernel_level_two_closed_form(hilbert_ev, rational_grid):
    for x in rational_grid:
        for y in rational_grid:
            expected = hilbert_kernel_value(x, y)
            assert hilbert_ev.kernel_sum(x, y) == [[expected]]
            assert hilbert_ev.kernel_abc(x, y) == [[expected]]


def test_kernel_abc_at_origin(hilbert_ev):
    assert hilbert_ev.kernel_abc(F(0), F(0)) == [[4]]


def test_budget_guard(hilbert_bundle):
    fam, g, factors = hilbert_bundle
    with pytest.raises(ValueError):
        KernelEvaluator(fam, g, factors, 4)


def test_projection_fixes_span(hilbert_ev, hilbert_bundle):
    _, _, factors = hilbert_bundle
    polys = primary_family(factors)
    assert poly_residual(hilbert_ev.project_poly(polys[0]), polys[0]) == 0
    assert poly_residual(hilbert_ev.project_poly(polys[1]), polys[1]) == 0


def test_projection_annihilates_tail(hilbert_ev, hilbert_bundle):
    _, _, factors = hilbert_bundle
    polys = primary_family(factors)
    projected = hilbert_ev.project_poly(polys[2])
    assert all(matrix_residual_norm(c) == 0 for c in projected.coeffs)


def test_projection_linearity(hilbert_bundle):
    fam, g, factors = hilbert_bundle
    ev = KernelEvaluator(fam, g, factors, 1)
    polys = primary_family(factors)
    combined = MatrixPolynomial.of(
        1, [mat_add(polys[0].coeffs[0], polys[1].coeffs[0]), polys[1].coeffs[1]]
    )
    assert poly_residual(ev.project_poly(combined), polys[0]) == 0


def test_dual_projection(hilbert_ev, hilbert_bundle):
    _, _, factors = hilbert_bundle
    forms = dual_family(factors)
    assert form_residual(hilbert_ev.project_form(forms[1]), forms[1]) == 0
    killed = hilbert_ev.project_form(forms[3])
    assert all(matrix_residual_norm(c) == 0 for c in killed.coeffs)


def test_reproducing_property(hilbert_bundle, rational_grid):
    fam, g, factors = hilbert_bundle
    for level in (0, 1, 2):
        ev = KernelEvaluator(fam, g, factors, level)
        for x in rational_grid[:3]:
            for y in rational_grid[:3]:
                assert ev.reproducing_residual(x, y) == 0


def test_cd_lhs_vanishes_on_diagonal(hilbert_ev):
    assert hilbert_ev.cd_lhs(F(2, 7), F(2, 7)) == [[0]]


def test_cd_lhs_closed_form(hilbert_ev, rational_grid):
    for x in rational_grid[:3]:
        y = rational_grid[4]
        expected = (x - y) * hilbert_kernel_value(x, y)
        assert hilbert_ev.cd_lhs(x, y) == [[expected]]


def test_diag_power_mixes_components():
    d = diag_power(F(1, 2), (1, 3))
    assert d == [[F(1, 2), 0], [0, F(1, 8)]]


def test_schur_form_matches_lhs(mg12_bundle, rational_grid):
    fam, g, factors = mg12_bundle
    for level in (1, 2, 3):
        ev = KernelEvaluator(fam, g, factors, level)
        for x in rational_grid:
            for y in rational_grid:
                assert ev.cd_lhs(x, y) == ev.cd_rhs_schur(x, y)


def test_associated_form_matches_lhs(mg12_bundle, rational_grid):
    fam, g, factors = mg12_bundle
    for level in (2, 3, 4):
        ev = KernelEvaluator(fam, g, factors, level)
        for x in rational_grid:
            for y in rational_grid:
                assert ev.cd_lhs(x, y) == ev.cd_rhs_associated(x, y)


def test_associated_form_two_components(mgn2_bundle, rational_grid):
    fam, g, factors = mgn2_bundle
    pts = [(rational_grid[0], rational_grid[3]), (rational_grid[2], rational_grid[1])]
    for level in (2, 3, 4):
        ev = KernelEvaluator(fam, g, factors, level)
        for x, y in pts:
            assert ev.cd_lhs(x, y) == ev.cd_rhs_associated(x, y)


def test_associated_form_needs_dominating_level(mg12_bundle):
    fam, g, factors = mg12_bundle
    ev = KernelEvaluator(fam, g, factors, 1)
    with pytest.raises(ValueError):
        ev.cd_rhs_associated(F(1, 7), F(2, 7))


def test_hankel_collapse_of_associated_form(legendre_bundle, rational_grid):
    # With unit shifts the bilinear form reduces to the classical two-term
    # numerator, so it must equal (x - y) K(x, y).
    fam, g, factors = legendre_bundle
    for level in (1, 2, 3):
        ev = KernelEvaluator(fam, g, factors, level)
        x, y = rational_grid[0], rational_grid[3]
        assert ev.cd_rhs_associated(x, y) == ev.cd_lhs(x, y)


def test_corollary_entry_hilbert(hilbert_ev):
    assert hilbert_ev.cd_entry_quotient(0, 0, F(1), F(0)) == -2
    assert hilbert_ev.kernel_sum(F(1), F(0)) == [[-2]]


def test_corollary_singular_locus(hilbert_ev):
    with pytest.raises(SingularLocusError):
        hilbert_ev.cd_entry_quotient(0, 0, F(1, 3), F(1, 3))


def test_corollary_matches_kernel(mg12_bundle, rational_grid):
    fam, g, factors = mg12_bundle
    ev = KernelEvaluator(fam, g, factors, 2)
    for x in rational_grid:
        for y in rational_grid:
            if x == y:
                continue
            assert ev.cd_entry_quotient(0, 0, x, y) == ev.kernel_sum(x, y)[0][0]


def test_kernel_matches_classical_sum(legendre_bundle):
    # With unit shifts and a flat density the kernel is the classical sum
    # of squared monic polynomials over the level normalizations.
    fam, g, factors = legendre_bundle
    polys = primary_family(factors)
    norms = [factors.normalization(k)[0][0] for k in range(3)]
    ev = KernelEvaluator(fam, g, factors, 3)
    x, y = F(1, 7), F(3, 7)
    expected = sum(
        eval_poly(polys[k], x)[0][0] * eval_poly(polys[k], y)[0][0] / norms[k]
        for k in range(3)
    )
    assert ev.kernel_sum(x, y) == [[expected]]


def test_classical_legendre_value():
    r = classical_cd(interval_seed(1), 2, F(0), F(1))
    assert r.lhs == ((F(-2),),) and r.rhs == ((F(-2),),)
    assert r.residual == 0


def test_classical_single_term():
    r = classical_cd(interval_seed(1), 1, F(1, 4), F(3, 4))
    assert r.lhs == ((1,),)
    assert r.residual == 0


def test_classical_hermite_float():
    seed = SeedWeight.of([1], BaseMeasure.gaussian())
    r = classical_cd(seed, 3, 0.7, -0.2, backend="float")
    assert r.residual <= 1e-9


def test_classical_rejects_diagonal():
    with pytest.raises(SingularLocusError):
        classical_cd(interval_seed(1), 2, F(1, 2), F(1, 2))


def test_kernel_routes_are_independent(hilbert_bundle):
    # feeding the evaluator factors of a different matrix must break the
    # agreement between the sum route and the solve route
    from mghankel.blockops import BlockMatrix

    fam, g, _ = hilbert_bundle
    skewed = lu_factorize(BlockMatrix.identity(1, 4))
    ev = KernelEvaluator(fam, g, skewed, 2)
    assert ev.kernel_sum(F(1, 7), F(2, 7)) != ev.kernel_abc(F(1, 7), F(2, 7))
