"""Block Gaussian factorization of a square block matrix.

Splits g into a unit block-lower factor and a block-upper factor so that
``lower_inv @ upper == g`` with ``lower_inv`` unit block-lower triangular.
No pivoting takes place at the block level: a permuted factorization would
scramble the triangular structure the biorthogonal families are read from.
A singular pivot block is a reported failure, not a recoverable path.
"""

from __future__ import annotations

from dataclasses import dataclass

from .blockops import BlockMatrix
from .numerics import (
    EXACT,
    FLOAT,
    SingularLeadingMinorError,
    SingularMatrixError,
    invert_dense,
    is_exact,
    mat_add,
    mat_eye,
    mat_mul,
    mat_scale,
    mat_sub,
    mat_zeros,
    matrix_residual_norm,
)

LOWER = "lower"
UPPER = "upper"


@dataclass(frozen=True)
class GaussFactors:
    """Triangular factors of g and their cached inverses.

    lower is unit block-lower triangular, upper is block-upper triangular,
    and ``lower_inv @ upper`` reproduces g.  Rows of ``lower`` carry the
    coefficients of the polynomial family; columns of ``upper_inv`` carry
    the coefficients of the dual family; ``upper`` diagonal blocks are the
    level normalizations.
    """

    lower: BlockMatrix
    lower_inv: BlockMatrix
    upper: BlockMatrix
    upper_inv: BlockMatrix

    @property
    def nlevels(self) -> int:
        return self.lower.nrows

    def normalization(self, level: int):
        return self.upper.block(level, level)


def _backend_of(g: BlockMatrix) -> str:
    for row in g.blocks:
        for blk in row:
            for r in blk:
                for v in r:
                    return EXACT if is_exact(v) else FLOAT
    return EXACT


def lu_factorize(g: BlockMatrix) -> GaussFactors:
    """Block Doolittle elimination without block pivoting.

    Raises SingularLeadingMinorError(level) when the pivot block at an
    elimination step cannot be inverted (exactly singular, or beyond the
    relative threshold in float mode).
    """
    if g.nrows != g.ncols:
        raise ValueError("factorization needs a square block matrix")
    n, levels = g.n, g.nrows
    backend = _backend_of(g)
    low = [[mat_zeros(n, n, backend) for _ in range(levels)] for _ in range(levels)]
    up = [[mat_zeros(n, n, backend) for _ in range(levels)] for _ in range(levels)]
    pivot_invs = []
    for i in range(levels):
        for j in range(i):
            acc = [list(r) for r in g.block(i, j)]
            for k in range(j):
                acc = mat_sub(acc, mat_mul(low[i][k], up[k][j]))
            low[i][j] = mat_mul(acc, pivot_invs[j])
        low[i][i] = mat_eye(n, backend)
        for j in range(i, levels):
            acc = [list(r) for r in g.block(i, j)]
            for k in range(i):
                acc = mat_sub(acc, mat_mul(low[i][k], up[k][j]))
            up[i][j] = acc
        try:
            pivot_invs.append(_invert_pivot(up[i][i]))
        except SingularMatrixError as exc:
            raise SingularLeadingMinorError(i) from exc
    lower_inv = BlockMatrix(n, low)
    upper = BlockMatrix(n, up)
    return GaussFactors(
        lower=invert_block_triangular(lower_inv, LOWER),
        lower_inv=lower_inv,
        upper=upper,
        upper_inv=invert_block_triangular(upper, UPPER),
    )


def _invert_pivot(block):
    norm = matrix_residual_norm(block)
    if norm == 0:
        raise SingularMatrixError("zero pivot block")
    return invert_dense(block)


def invert_block_triangular(t: BlockMatrix, orientation: str) -> BlockMatrix:
    """Invert a block-triangular matrix by block substitution.

    The inverse shares the orientation.  A singular diagonal block raises
    SingularLeadingMinorError with its index.
    """
    if orientation not in (LOWER, UPPER):
        raise ValueError("orientation must be %r or %r" % (LOWER, UPPER))
    if t.nrows != t.ncols:
        raise ValueError("inversion needs a square block matrix")
    if orientation == UPPER:
        return invert_block_triangular(t.transpose(), LOWER).transpose()
    n, levels = t.n, t.nrows
    inv = [[mat_zeros(n, n) for _ in range(levels)] for _ in range(levels)]
    diag_invs = []
    for i in range(levels):
        try:
            diag_invs.append(_invert_pivot(t.block(i, i)))
        except SingularMatrixError as exc:
            raise SingularLeadingMinorError(i) from exc
    for i in range(levels):
        inv[i][i] = diag_invs[i]
        for j in range(i - 1, -1, -1):
            acc = mat_mul(t.block(i, j), inv[j][j])
            for k in range(j + 1, i):
                acc = mat_add(acc, mat_mul(t.block(i, k), inv[k][j]))
            inv[i][j] = mat_mul(mat_scale(-1, diag_invs[i]), acc)
    return BlockMatrix(n, inv)


def factorization_residual(g: BlockMatrix, factors: GaussFactors):
    """Max-norm of lower_inv @ upper - g."""
    return factors.lower_inv.matmul(factors.upper).sub(g).maxnorm()


def nested_truncation_residual(g: BlockMatrix, factors: GaussFactors):
    """Worst residual of (lower_inv^{[l]}) @ (upper^{[l]}) - g^{[l]} with the
    leading truncations re-inverted from scratch, over l = 1..L."""
    worst = 0
    worst_level = None
    for level in range(1, g.nrows + 1):
        rows = range(level)
        li = factors.lower.slice(rows, rows)
        ui = factors.upper.slice(rows, rows)
        gi = g.slice(rows, rows)
        res = invert_block_triangular(li, LOWER).matmul(ui).sub(gi).maxnorm()
        if res > worst:
            worst, worst_level = res, level
    return worst, worst_level
