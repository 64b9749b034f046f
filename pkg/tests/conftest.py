"""Shared fixtures: the recurring families, moment matrices and factors."""

from fractions import Fraction

import pytest

from mghankel.blockops import build_moment_matrix
from mghankel.factorize import lu_factorize
from mghankel.harness import builtin_config
from mghankel.weights import BaseMeasure, SeedWeight, WeightFamily, hankel_family

UNIT_INTERVAL = BaseMeasure.finite_interval(0, 1)


def interval_seed(*coeffs) -> SeedWeight:
    return SeedWeight.of(list(coeffs), UNIT_INTERVAL)


@pytest.fixture(scope="session")
def legendre_family():
    return hankel_family(interval_seed(1))


@pytest.fixture(scope="session")
def hilbert_bundle(legendre_family):
    """(family, g, factors) for the unit-interval Hankel family at L=4."""
    g = build_moment_matrix(legendre_family, 4)
    return legendre_family, g, lu_factorize(g)


@pytest.fixture(scope="session")
def legendre_bundle(legendre_family):
    g = build_moment_matrix(legendre_family, 10)
    return legendre_family, g, lu_factorize(g)


@pytest.fixture(scope="session")
def spec_mg_family():
    """The degenerate two-seed example family: densities 1 and x^2."""
    return WeightFamily(
        (1,), (2,), [[[interval_seed(1), interval_seed(0, 0, 1)]]]
    )


@pytest.fixture(scope="session")
def mg12_bundle():
    fam = builtin_config("multigraded-12").family()
    g = build_moment_matrix(fam, 10)
    return fam, g, lu_factorize(g)


@pytest.fixture(scope="session")
def mgn2_bundle():
    fam = builtin_config("multigraded-n2").family()
    g = build_moment_matrix(fam, 10)
    return fam, g, lu_factorize(g)


@pytest.fixture(scope="session")
def hermite_bundle():
    fam = builtin_config("hermite").family()
    g = build_moment_matrix(fam, 10)
    return fam, g, lu_factorize(g)


@pytest.fixture(scope="session")
def rational_grid():
    return [Fraction(k, 7) for k in (1, 2, 3, 5, 6)]
