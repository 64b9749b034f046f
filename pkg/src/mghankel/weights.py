"""Weight families generated from seeds by a periodicity rule.

A family holds, for every entry (a, b), the seed weights
rho_{0,ab}, ..., rho_{m_b-1,ab}; the rest of the sequence is generated by

    rho_{j+m_b, ab}(x) = x^{n_a} * rho_{j, ab}(x).

Seeds are polynomial densities against one of three base measures
(Lebesgue on a finite interval, exp(-x^2) on R, exp(-x) on [0, inf)),
so every moment integral x^i * rho_j has a closed form and no quadrature
enters the verification path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .numerics import (
    EXACT,
    BACKENDS,
    Scalar,
    as_backend,
    gaussian_moment,
    parse_rational,
)

FINITE_INTERVAL = "finite_interval"
GAUSSIAN = "gaussian"
LAGUERRE = "laguerre"
MEASURE_KINDS = (FINITE_INTERVAL, GAUSSIAN, LAGUERRE)


class SupportError(ValueError):
    """Pointwise evaluation requested outside a measure's support."""


class MeasureBackendError(ValueError):
    """Measure/backend combination with no exact representation."""


@dataclass(frozen=True)
class BaseMeasure:
    """One of the three admissible base measures."""

    kind: str
    a: Fraction | None = None
    b: Fraction | None = None

    @classmethod
    def finite_interval(cls, a, b) -> "BaseMeasure":
        a, b = parse_rational(a), parse_rational(b)
        if not a < b:
            raise ValueError("finite interval needs a < b, got [%s, %s]" % (a, b))
        return cls(FINITE_INTERVAL, a, b)

    @classmethod
    def gaussian(cls) -> "BaseMeasure":
        return cls(GAUSSIAN)

    @classmethod
    def laguerre(cls) -> "BaseMeasure":
        return cls(LAGUERRE)

    def moment(self, k: int, backend: str) -> Scalar:
        """Closed-form k-th moment of the bare measure."""
        if self.kind == FINITE_INTERVAL:
            value = (self.b ** (k + 1) - self.a ** (k + 1)) / Fraction(k + 1)
            return as_backend(value, backend)
        if self.kind == LAGUERRE:
            return as_backend(Fraction(math.factorial(k)), backend)
        if self.kind == GAUSSIAN:
            if backend == EXACT:
                raise MeasureBackendError("gaussian moments are irrational; use the float backend")
            return gaussian_moment(k)
        raise ValueError("unknown measure kind %r" % self.kind)

    def density_at(self, x: Scalar, backend: str) -> Scalar:
        if self.kind == FINITE_INTERVAL:
            return as_backend(Fraction(1), backend)
        if backend == EXACT:
            raise MeasureBackendError(
                "%s density has no exact value at a generic point" % self.kind
            )
        if self.kind == GAUSSIAN:
            return math.exp(-float(x) * float(x))
        return math.exp(-float(x))

    def in_support(self, x) -> bool:
        # Interval boundaries count as in-support.
        if self.kind == FINITE_INTERVAL:
            return self.a <= x <= self.b
        if self.kind == LAGUERRE:
            return x >= 0
        return True

    def exact_compatible(self) -> bool:
        return self.kind in (FINITE_INTERVAL, LAGUERRE)

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == FINITE_INTERVAL:
            d["a"] = str(self.a)
            d["b"] = str(self.b)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "BaseMeasure":
        kind = d.get("kind")
        if kind == FINITE_INTERVAL:
            return cls.finite_interval(d["a"], d["b"])
        if kind == GAUSSIAN:
            return cls.gaussian()
        if kind == LAGUERRE:
            return cls.laguerre()
        raise ValueError("unknown measure kind %r" % kind)


@dataclass(frozen=True)
class SeedWeight:
    """One scalar weight: polynomial density times a base measure density."""

    coeffs: tuple  # ascending powers, rational
    measure: BaseMeasure

    @classmethod
    def of(cls, coeffs, measure: BaseMeasure) -> "SeedWeight":
        parsed = tuple(parse_rational(c) for c in coeffs)
        if not parsed:
            parsed = (Fraction(0),)
        return cls(parsed, measure)

    def density_at(self, x: Scalar) -> Scalar:
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc

    def moment(self, k: int, backend: str) -> Scalar:
        """Integral of x^k times this weight against its measure."""
        total = 0
        for t, c in enumerate(self.coeffs):
            if c:
                total += as_backend(c, backend) * self.measure.moment(k + t, backend)
        return total if total != 0 else as_backend(Fraction(0), backend)

    def value_at(self, x: Scalar, backend: str) -> Scalar:
        # x is already backend-typed; Fraction coefficients promote cleanly.
        return self.density_at(x) * self.measure.density_at(x, backend)


def as_multi_index(components) -> tuple:
    t = tuple(int(c) for c in components)
    if not t:
        raise ValueError("multi-index must be nonempty")
    if any(c < 1 for c in t):
        raise ValueError("multi-index components must be >= 1, got %r" % (t,))
    return t


@dataclass(frozen=True)
class FamilyValidation:
    ok: bool
    problems: tuple = ()

    def first_problem(self) -> str | None:
        return self.problems[0] if self.problems else None


class WeightFamily:
    """Seed weights plus the two shift multi-indices generating all rho_j.

    Immutable after construction; evaluation and moments are pure.  The
    seed table may be ragged or otherwise ill-formed at construction time;
    `validate_family` is the reporting gate.
    """

    def __init__(self, nvec, mvec, seeds, backend: str = EXACT):
        if backend not in BACKENDS:
            raise ValueError("unknown backend %r" % backend)
        self.nvec = as_multi_index(nvec)
        self.mvec = as_multi_index(mvec)
        if len(self.nvec) != len(self.mvec):
            raise ValueError("multi-indices must have equal length")
        self.size = len(self.nvec)
        self.backend = backend
        self.seeds = tuple(
            tuple(tuple(entry) for entry in row) for row in seeds
        )
        if len(self.seeds) != self.size or any(len(row) != self.size for row in self.seeds):
            raise ValueError("seed table must be %d x %d" % (self.size, self.size))

    def max_shift(self) -> int:
        return max(max(self.nvec), max(self.mvec))

    def seed(self, a: int, b: int, r: int) -> SeedWeight:
        return self.seeds[a][b][r]

    def _split(self, j: int, b: int) -> tuple:
        q, r = divmod(j, self.mvec[b])
        return q, r

    def eval_weight(self, j: int, x) -> list:
        """Value of rho_j at x as an N x N matrix (measure density included)."""
        x = as_backend(x, self.backend)
        out = []
        for a in range(self.size):
            row = []
            for b in range(self.size):
                q, r = self._split(j, b)
                seed = self.seeds[a][b][r]
                if self.backend == EXACT and not seed.measure.in_support(x):
                    raise SupportError(
                        "x=%s outside the support of seed (%d,%d)" % (x, a, b)
                    )
                row.append(x ** (q * self.nvec[a]) * seed.value_at(x, self.backend))
            out.append(row)
        return out

    def moment(self, i: int, j: int) -> list:
        """Closed-form integral of x^i rho_j as an N x N matrix."""
        out = []
        for a in range(self.size):
            row = []
            for b in range(self.size):
                q, r = self._split(j, b)
                seed = self.seeds[a][b][r]
                row.append(seed.moment(i + q * self.nvec[a], self.backend))
            out.append(row)
        return out


def validate_family(fam: WeightFamily, truncation: int) -> FamilyValidation:
    """Check seed counts, backend compatibility and moment availability.

    Moment availability is probed up to order truncation + max(nvec), the
    highest order any level-(truncation-1) computation can request.
    """
    problems = []
    for a in range(fam.size):
        for b in range(fam.size):
            entry = fam.seeds[a][b]
            if len(entry) != fam.mvec[b]:
                problems.append(
                    "seed count: entry (%d,%d) has %d seeds, expected m_b=%d"
                    % (a, b, len(entry), fam.mvec[b])
                )
                continue
            for r, seed in enumerate(entry):
                if fam.backend == EXACT and not seed.measure.exact_compatible():
                    problems.append(
                        "backend: seed %d of entry (%d,%d) has irrational moments in exact mode"
                        % (r, a, b)
                    )
    if not problems:
        top = truncation + max(fam.nvec)
        for a in range(fam.size):
            for b in range(fam.size):
                for r, seed in enumerate(fam.seeds[a][b]):
                    try:
                        seed.moment(top, fam.backend)
                    except (MeasureBackendError, OverflowError) as exc:
                        problems.append(
                            "moment: order %d of seed %d at (%d,%d): %s"
                            % (top, r, a, b, exc)
                        )
    return FamilyValidation(not problems, tuple(problems))


def hankel_family(seed: SeedWeight, backend: str = EXACT) -> WeightFamily:
    """Scalar Hankel special case: N=1, n=m=(1), a single seed weight."""
    return WeightFamily((1,), (1,), [[[seed]]], backend=backend)
