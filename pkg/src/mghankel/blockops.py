"""Truncated semi-infinite block matrices.

Everything downstream (moment matrix, shift powers, triangular factors)
lives in one dense container of N x N scalar blocks.  Sizes are desk-scale
by design, so storage is dense and operations are written for clarity.
"""

from __future__ import annotations

from dataclasses import dataclass

from .numerics import (
    CheckOutcome,
    DEFAULT_TOLERANCE,
    EXACT,
    Tolerance,
    approx_zero,
    mat_add,
    mat_mul,
    mat_sub,
    mat_transpose,
    mat_zeros,
    mat_eye,
    matrix_residual_norm,
)
from .weights import WeightFamily, validate_family


def _freeze(rows) -> tuple:
    return tuple(tuple(row) for row in rows)


class BlockMatrix:
    """Immutable grid of N x N scalar blocks, 0-based block indices."""

    __slots__ = ("n", "blocks")

    def __init__(self, n: int, blocks):
        self.n = n
        self.blocks = tuple(tuple(_freeze(blk) for blk in row) for row in blocks)
        for row in self.blocks:
            for blk in row:
                if len(blk) != n or any(len(r) != n for r in blk):
                    raise ValueError("every block must be %d x %d" % (n, n))

    @property
    def nrows(self) -> int:
        return len(self.blocks)

    @property
    def ncols(self) -> int:
        return len(self.blocks[0]) if self.blocks else 0

    def block(self, i: int, j: int):
        return self.blocks[i][j]

    def entry(self, i: int, j: int, a: int, b: int):
        return self.blocks[i][j][a][b]

    @classmethod
    def zeros(cls, n: int, nrows: int, ncols: int, backend: str = EXACT) -> "BlockMatrix":
        return cls(n, [[mat_zeros(n, n, backend) for _ in range(ncols)] for _ in range(nrows)])

    @classmethod
    def identity(cls, n: int, nblocks: int, backend: str = EXACT) -> "BlockMatrix":
        blocks = [
            [mat_eye(n, backend) if i == j else mat_zeros(n, n, backend) for j in range(nblocks)]
            for i in range(nblocks)
        ]
        return cls(n, blocks)

    def matmul(self, other: "BlockMatrix") -> "BlockMatrix":
        if self.ncols != other.nrows or self.n != other.n:
            raise ValueError("incompatible block shapes")
        out = []
        for i in range(self.nrows):
            row = []
            for j in range(other.ncols):
                acc = mat_mul(self.blocks[i][0], other.blocks[0][j])
                for k in range(1, self.ncols):
                    acc = mat_add(acc, mat_mul(self.blocks[i][k], other.blocks[k][j]))
                row.append(acc)
            out.append(row)
        return BlockMatrix(self.n, out)

    def sub(self, other: "BlockMatrix") -> "BlockMatrix":
        if (self.nrows, self.ncols, self.n) != (other.nrows, other.ncols, other.n):
            raise ValueError("incompatible block shapes")
        return BlockMatrix(
            self.n,
            [
                [mat_sub(self.blocks[i][j], other.blocks[i][j]) for j in range(self.ncols)]
                for i in range(self.nrows)
            ],
        )

    def transpose(self) -> "BlockMatrix":
        return BlockMatrix(
            self.n,
            [
                [mat_transpose(self.blocks[i][j]) for i in range(self.nrows)]
                for j in range(self.ncols)
            ],
        )

    def slice(self, rows: range, cols: range) -> "BlockMatrix":
        return BlockMatrix(self.n, [[self.blocks[i][j] for j in cols] for i in rows])

    def to_dense(self) -> list:
        dense = []
        for i in range(self.nrows):
            for r in range(self.n):
                dense.append(
                    [x for j in range(self.ncols) for x in self.blocks[i][j][r]]
                )
        return dense

    @classmethod
    def from_dense(cls, n: int, dense) -> "BlockMatrix":
        rows, cols = len(dense), (len(dense[0]) if dense else 0)
        if rows % n or cols % n:
            raise ValueError("dense shape %dx%d not divisible by block size %d" % (rows, cols, n))
        blocks = [
            [
                [[dense[i * n + r][j * n + c] for c in range(n)] for r in range(n)]
                for j in range(cols // n)
            ]
            for i in range(rows // n)
        ]
        return cls(n, blocks)

    def maxnorm(self):
        best = 0
        for row in self.blocks:
            for blk in row:
                v = matrix_residual_norm(blk)
                if v > best:
                    best = v
        return best

    def __eq__(self, other):
        return (
            isinstance(other, BlockMatrix)
            and self.n == other.n
            and self.blocks == other.blocks
        )

    def __hash__(self):
        return hash((self.n, self.blocks))

    def __repr__(self):
        return "BlockMatrix(n=%d, %dx%d blocks)" % (self.n, self.nrows, self.ncols)


@dataclass(frozen=True)
class BlockPartition:
    """The four tiles of a matrix split at block level l."""

    level: int
    tl: BlockMatrix
    tr: BlockMatrix
    bl: BlockMatrix
    br: BlockMatrix


def partition(g: BlockMatrix, level: int) -> BlockPartition:
    if not 0 <= level <= min(g.nrows, g.ncols):
        raise ValueError("partition level %d out of range" % level)
    rows, cols = g.nrows, g.ncols
    return BlockPartition(
        level,
        g.slice(range(level), range(level)),
        g.slice(range(level), range(level, cols)),
        g.slice(range(level, rows), range(level)),
        g.slice(range(level, rows), range(level, cols)),
    )


def matrix_unit(n: int, a: int) -> list:
    """E_aa: 1 at (a, a), zero elsewhere."""
    m = [[0] * n for _ in range(n)]
    m[a][a] = 1
    return m


def unit_column(n: int, nblocks: int, j: int) -> BlockMatrix:
    """Block column e_j with the identity block in row j."""
    blocks = [[mat_eye(n) if i == j else mat_zeros(n, n)] for i in range(nblocks)]
    return BlockMatrix(n, blocks)


def shift_power(nvec, truncation: int) -> BlockMatrix:
    """Truncation of the componentwise shift power: block (i, j) is the sum
    of E_aa over components a with j == i + n_a."""
    n = len(nvec)
    blocks = [
        [[[0] * n for _ in range(n)] for _ in range(truncation)] for _ in range(truncation)
    ]
    for i in range(truncation):
        for a, na in enumerate(nvec):
            if i + na < truncation:
                blocks[i][i + na][a][a] = 1
    return BlockMatrix(n, blocks)


def build_moment_matrix(fam: WeightFamily, truncation: int) -> BlockMatrix:
    """Moment matrix with block (i, j) equal to the integral of x^i rho_j."""
    report = validate_family(fam, truncation)
    if not report.ok:
        raise ValueError("invalid weight family: %s" % report.first_problem())
    return BlockMatrix(
        fam.size,
        [[fam.moment(i, j) for j in range(truncation)] for i in range(truncation)],
    )


def check_multigraded_symmetry(
    g: BlockMatrix, nvec, mvec, tol: Tolerance = DEFAULT_TOLERANCE
) -> CheckOutcome:
    """Entrywise check of g[i+n_a, j, ab] == g[i, j+m_b, ab] on the overlap
    where both sides fall inside the truncation."""
    if g.nrows != g.ncols:
        raise ValueError("symmetry check needs a square block matrix")
    size = g.n
    if len(nvec) != size or len(mvec) != size:
        raise ValueError("multi-index length must match block size")
    scale = g.maxnorm()
    worst = None
    first = None
    residual = 0
    passed = True
    for a in range(size):
        for b in range(size):
            na, mb = nvec[a], mvec[b]
            for i in range(g.nrows - na):
                for j in range(g.ncols - mb):
                    diff = abs(g.entry(i + na, j, a, b) - g.entry(i, j + mb, a, b))
                    if diff > residual:
                        residual = diff
                        worst = "(i=%d, j=%d, a=%d, b=%d)" % (i, j, a, b)
                    if not approx_zero(diff, scale, tol):
                        passed = False
                        if first is None:
                            first = "(i=%d, j=%d, a=%d, b=%d)" % (i, j, a, b)
    notes = ("first violation at %s" % first,) if first else ()
    return CheckOutcome(passed, residual, worst, notes)
