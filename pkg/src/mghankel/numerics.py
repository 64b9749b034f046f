"""Scalar arithmetic contract shared by all modules.

Two backends, selected per run and never mixed inside one computation:
exact rationals (`fractions.Fraction`) and 64-bit floats.  Exact values are
compared bit-exactly; every float comparison goes through `Tolerance`.

Dense matrices are plain nested sequences of scalars.  The helpers below
are backend-agnostic and never introduce a float into an exact
computation: exact inputs are coerced to `Fraction` before any division.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

EXACT = "exact"
FLOAT = "float"
BACKENDS = (EXACT, FLOAT)

# A scalar is a Fraction (exact), a float, or an int (exact, embeds in both).
Scalar = Fraction | float | int


class SingularMatrixError(ArithmeticError):
    """A dense linear solve met a (numerically) singular matrix."""


class SingularLeadingMinorError(SingularMatrixError):
    """Block elimination hit a singular pivot block at ``level``."""

    def __init__(self, level: int, message: str | None = None):
        self.level = level
        super().__init__(message or "singular leading block minor at level %d" % level)


class SingularLocusError(ZeroDivisionError):
    """Entrywise quotient requested where x^{n_a} == y^{n_b}."""


@dataclass(frozen=True)
class Tolerance:
    """Comparison policy for the float backend.

    approx_zero(x, scale) holds iff |x| <= abs_tol + rel_tol * scale, where
    scale is a caller-supplied magnitude reference (typically the max-norm
    of the largest operand).
    """

    abs_tol: float = 1e-9
    rel_tol: float = 1e-9

    def __post_init__(self):
        if self.abs_tol < 0 or self.rel_tol < 0:
            raise ValueError("tolerances must be nonnegative")


DEFAULT_TOLERANCE = Tolerance()

# Pivot blocks whose smallest eliminated diagonal entry falls below this
# fraction of the block max-norm are treated as singular in float mode.
SINGULAR_PIVOT_RTOL = 1e-12


def is_exact(x: Scalar) -> bool:
    """True for scalars of the exact backend (Fraction or int)."""
    return isinstance(x, (Fraction, int))


def approx_zero(x: Scalar, scale: Scalar, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Backend-aware zero test; exact scalars ignore the tolerance."""
    if is_exact(x):
        return x == 0
    return abs(x) <= tol.abs_tol + tol.rel_tol * scale


def parse_rational(value) -> Fraction:
    """Parse a rational from an int or a 'p/q' / 'p' string."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise ValueError("not a rational: %r (use ints or 'p/q' strings)" % (value,))


def as_backend(x, backend: str) -> Scalar:
    """Coerce a rational (or float, in float mode) onto the given backend."""
    if backend == EXACT:
        if isinstance(x, float):
            raise TypeError("exact backend requires rational values, got %r" % x)
        return x if isinstance(x, Fraction) else Fraction(x)
    if backend == FLOAT:
        return float(x)
    raise ValueError("unknown backend %r" % backend)


def scalar_str(x: Scalar) -> str:
    """Decimal rendering for reports; exact zero renders as '0'."""
    if is_exact(x):
        return "0" if x == 0 else repr(float(x))
    return repr(x)


# ---------------------------------------------------------------------------
# Dense matrices: lists (or tuples) of rows of scalars.
# ---------------------------------------------------------------------------


def mat_zeros(rows: int, cols: int, backend: str = EXACT) -> list:
    zero = Fraction(0) if backend == EXACT else 0.0
    return [[zero] * cols for _ in range(rows)]


def mat_eye(n: int, backend: str = EXACT) -> list:
    one = Fraction(1) if backend == EXACT else 1.0
    m = mat_zeros(n, n, backend)
    for i in range(n):
        m[i][i] = one
    return m


def mat_add(a, b) -> list:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a, b) -> list:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(c: Scalar, a) -> list:
    return [[c * x for x in row] for row in a]


def mat_mul(a, b) -> list:
    cols = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in cols] for row in a]


def mat_transpose(a) -> list:
    return [list(col) for col in zip(*a)]


def matrix_residual_norm(a) -> Scalar:
    """Max-norm over entries; the residual metric used in every check."""
    best: Scalar = 0
    for row in a:
        for x in row:
            if abs(x) > best:
                best = abs(x)
    return best


def _coerce_rows(rows, exact: bool) -> list:
    if exact:
        return [[v if isinstance(v, Fraction) else Fraction(v) for v in row] for row in rows]
    return [[float(v) for v in row] for row in rows]


def solve_dense(a, b) -> list:
    """Solve A X = B for dense square A by Gaussian elimination.

    Pivots on the first nonzero entry in exact mode and on the largest
    magnitude in float mode; raises SingularMatrixError when no usable
    pivot remains.
    """
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("matrix is not square")
    if len(b) != n:
        raise ValueError("right-hand side has %d rows, expected %d" % (len(b), n))
    exact = all(is_exact(v) for row in a for v in row) and all(
        is_exact(v) for row in b for v in row
    )
    m = _coerce_rows(a, exact)
    rhs = _coerce_rows(b, exact)
    scale = matrix_residual_norm(m)
    width = len(rhs[0]) if rhs else 0

    for col in range(n):
        if exact:
            pivot_row = next((r for r in range(col, n) if m[r][col] != 0), None)
        else:
            pivot_row = max(range(col, n), key=lambda r: abs(m[r][col]))
            if abs(m[pivot_row][col]) <= SINGULAR_PIVOT_RTOL * scale:
                pivot_row = None
        if pivot_row is None:
            raise SingularMatrixError("singular matrix (no pivot in column %d)" % col)
        if pivot_row != col:
            m[col], m[pivot_row] = m[pivot_row], m[col]
            rhs[col], rhs[pivot_row] = rhs[pivot_row], rhs[col]
        inv = 1 / m[col][col] if not exact else Fraction(1) / m[col][col]
        m[col] = [v * inv for v in m[col]]
        rhs[col] = [v * inv for v in rhs[col]]
        for r in range(n):
            if r == col:
                continue
            factor = m[r][col]
            if factor == 0:
                continue
            m[r] = [v - factor * w for v, w in zip(m[r], m[col])]
            rhs[r] = [v - factor * w for v, w in zip(rhs[r], rhs[col])]
    return [row[:width] for row in rhs]


def invert_dense(a) -> list:
    backend = EXACT if all(is_exact(v) for row in a for v in row) else FLOAT
    return solve_dense(a, mat_eye(len(a), backend))


@dataclass(frozen=True)
class CheckOutcome:
    """Result of one identity check: verdict, max residual, worst location."""

    passed: bool
    residual: Scalar
    worst: str | None = None
    notes: tuple = ()

    def residual_str(self) -> str:
        return scalar_str(self.residual)


def residual_outcome(
    residual: Scalar,
    scale: Scalar,
    tol: Tolerance = DEFAULT_TOLERANCE,
    worst: str | None = None,
    notes: tuple = (),
) -> CheckOutcome:
    return CheckOutcome(approx_zero(residual, scale, tol), residual, worst, notes)


def gaussian_moment(k: int) -> float:
    """Integral of x^k exp(-x^2) over the real line (float backend only)."""
    if k % 2:
        return 0.0
    m = k // 2
    # Gamma(m + 1/2) = (2m-1)!! sqrt(pi) / 2^m
    odd = 1
    for i in range(1, 2 * m, 2):
        odd *= i
    return math.sqrt(math.pi) * odd / 2**m
