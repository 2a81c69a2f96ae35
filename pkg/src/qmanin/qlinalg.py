"""q-linear algebra over noncommutative rings: multi-indices, epsilon
symbols, the q-determinant and q-minors, expansions, the adjoint matrix, the
q-characteristic polynomial, and the twisted *_q product with its q-powers.

Multi-indices and matrix positions follow the 1-based convention of the
underlying formulas; Python-level grids are 0-based internally.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from typing import Iterable, Optional, Sequence

from .algebras import AlgebraHandle, is_q_manin, manin_relation_polys
from .freealg import NCPoly
from .scalars import LaurentQ, RatQ, sgn


def inv_count(seq: Sequence[int]) -> int:
    """Number of inversions: pairs i < j with seq[i] > seq[j]."""
    n = len(seq)
    return sum(1 for i in range(n) for j in range(i + 1, n) if seq[i] > seq[j])


@dataclass(frozen=True)
class Permutation:
    """One-line notation on {1..m} with a cached inversion number."""
    one_line: tuple

    def __post_init__(self):
        m = len(self.one_line)
        if sorted(self.one_line) != list(range(1, m + 1)):
            raise ValueError("not a permutation of 1..m")

    @property
    def inv(self) -> int:
        return inv_count(self.one_line)

    @property
    def sign(self) -> int:
        return -1 if self.inv % 2 else 1

    def __call__(self, i: int) -> int:
        return self.one_line[i - 1]

    def __len__(self):
        return len(self.one_line)


def all_permutations(m: int) -> list:
    return [Permutation(p) for p in permutations(range(1, m + 1))]


@dataclass(frozen=True)
class MultiIndex:
    """Sequence of 1-based indices."""
    entries: tuple

    @property
    def is_increasing(self) -> bool:
        return all(a < b for a, b in zip(self.entries, self.entries[1:]))

    def concat(self, other: "MultiIndex") -> "MultiIndex":
        return MultiIndex(self.entries + other.entries)

    def complement(self, n: int) -> "MultiIndex":
        drop = set(self.entries)
        return MultiIndex(tuple(i for i in range(1, n + 1) if i not in drop))

    def __len__(self):
        return len(self.entries)


def complement(indices: Sequence[int], n: int) -> tuple:
    drop = set(indices)
    return tuple(i for i in range(1, n + 1) if i not in drop)


def neg_q_pow(k: int) -> LaurentQ:
    """(-q)^k as an exact Laurent monomial."""
    return LaurentQ.q(k, -1 if k % 2 else 1)


def eps_q(indices: Sequence[int], variant: str = "q") -> LaurentQ:
    """q-epsilon symbol: zero on repeated indices, (-q)^(-inv) on
    permutations of the sorted base (or (-q)^(+inv) for the q_inverse
    variant)."""
    idx = tuple(indices)
    if len(set(idx)) != len(idx):
        return LaurentQ.zero()
    inv = inv_count(idx)
    if variant == "q":
        return neg_q_pow(-inv)
    if variant == "q_inverse":
        return neg_q_pow(inv)
    raise ValueError("variant must be 'q' or 'q_inverse'")


def eps_split(I: Sequence[int], n: int) -> tuple:
    """The pair (eps^q over I + complement, eps^q over complement + I) for a
    strictly increasing multi-index I inside 1..n."""
    idx = tuple(I)
    if any(a >= b for a, b in zip(idx, idx[1:])):
        raise ValueError("I must be strictly increasing")
    m = len(idx)
    first = neg_q_pow(-sum(i - (l + 1) for l, i in enumerate(idx)))
    second = neg_q_pow(sum(idx) - sum(range(n - m + 1, n + 1)))
    return first, second


# ---------------------------------------------------------------------------
# NCMatrix
# ---------------------------------------------------------------------------

class NCMatrix:
    """Rectangular matrix of NCPoly entries bound to a presented algebra."""

    __slots__ = ("algebra", "rows", "cols", "entries")

    def __init__(self, algebra: AlgebraHandle, entries: Sequence[Sequence[NCPoly]]):
        self.algebra = algebra
        self.entries = tuple(tuple(algebra.coerce(e) for e in row) for row in entries)
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.rows else 0
        if any(len(row) != self.cols for row in self.entries):
            raise ValueError("ragged matrix")

    # -- constructors --------------------------------------------------------

    @staticmethod
    def generic(algebra: AlgebraHandle, rows: int, cols: int,
                offset: int = 0) -> "NCMatrix":
        """Matrix of consecutive algebra generators, row-major from offset."""
        ent = [[algebra.gen(offset + i * cols + j) for j in range(cols)]
               for i in range(rows)]
        return NCMatrix(algebra, ent)

    @staticmethod
    def identity(algebra: AlgebraHandle, n: int) -> "NCMatrix":
        one, zero = algebra.one(), algebra.zero()
        return NCMatrix(algebra, [[one if i == j else zero for j in range(n)]
                                  for i in range(n)])

    @staticmethod
    def from_scalars(algebra: AlgebraHandle, grid) -> "NCMatrix":
        return NCMatrix(algebra, [[algebra.scalar(c) for c in row] for row in grid])

    # -- access --------------------------------------------------------------

    def entry(self, i: int, j: int) -> NCPoly:
        """1-based entry access."""
        return self.entries[i - 1][j - 1]

    def submatrix(self, I: Sequence[int], J: Sequence[int]) -> "NCMatrix":
        """Rows I and columns J (1-based multi-indices, in the given order)."""
        return NCMatrix(self.algebra,
                        [[self.entries[i - 1][j - 1] for j in J] for i in I])

    def delete(self, r: int, s: int) -> "NCMatrix":
        """Remove row r and column s (1-based)."""
        I = [i for i in range(1, self.rows + 1) if i != r]
        J = [j for j in range(1, self.cols + 1) if j != s]
        return self.submatrix(I, J)

    def grid(self) -> list:
        return [list(row) for row in self.entries]

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: "NCMatrix") -> "NCMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return NCMatrix(self.algebra,
                        [[a + b for a, b in zip(r1, r2)]
                         for r1, r2 in zip(self.entries, other.entries)])

    def __sub__(self, other: "NCMatrix") -> "NCMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return NCMatrix(self.algebra,
                        [[a - b for a, b in zip(r1, r2)]
                         for r1, r2 in zip(self.entries, other.entries)])

    def __mul__(self, other: "NCMatrix") -> "NCMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = self.algebra.zero()
                for k in range(self.cols):
                    acc = acc + self.entries[i][k] * other.entries[k][j]
                row.append(acc)
            out.append(row)
        return NCMatrix(self.algebra, out)

    def scale(self, c) -> "NCMatrix":
        return NCMatrix(self.algebra,
                        [[e.scale(c) for e in row] for row in self.entries])

    def transpose(self) -> "NCMatrix":
        return NCMatrix(self.algebra,
                        [[self.entries[j][i] for j in range(self.rows)]
                         for i in range(self.cols)])

    def trace(self) -> NCPoly:
        if self.rows != self.cols:
            raise ValueError("trace of a non-square matrix")
        acc = self.algebra.zero()
        for i in range(self.rows):
            acc = acc + self.entries[i][i]
        return acc


def flip(M: NCMatrix) -> NCMatrix:
    """Entry reversal: result[i][j] = M[n-i+1][m-j+1]."""
    return NCMatrix(M.algebra,
                    [[M.entries[M.rows - 1 - i][M.cols - 1 - j]
                      for j in range(M.cols)] for i in range(M.rows)])


# ---------------------------------------------------------------------------
# q-determinant and friends
# ---------------------------------------------------------------------------

def det_q_grid(grid, one, qexp: int = 1):
    """Column-ordered q-determinant of a grid over any associative ring.

    Entries need +, * and .scale(LaurentQ).  Factors are multiplied in
    strictly ascending column order; qexp=-1 computes the q^(-1)-determinant.
    """
    n = len(grid)
    if any(len(row) != n for row in grid):
        raise ValueError("q-determinant of a non-square matrix")
    if n == 0:
        return one
    acc = None
    for tau in permutations(range(n)):
        inv = inv_count(tau)
        prod = None
        for col in range(n):
            e = grid[tau[col]][col]
            prod = e if prod is None else prod * e
        term = prod.scale(neg_q_pow(-inv * qexp))
        acc = term if acc is None else acc + term
    return acc


def det_q(M: NCMatrix, qexp: int = 1) -> NCPoly:
    """det_q of a square NCMatrix (qexp=-1 for the q^(-1)-determinant)."""
    return det_q_grid(M.grid(), M.algebra.one(), qexp=qexp)


def minor(M: NCMatrix, I: Sequence[int], J: Sequence[int], qexp: int = 1) -> NCPoly:
    """q-minor: det_q of the submatrix with rows I, columns J as given."""
    if len(I) != len(J):
        raise ValueError("row and column multi-indices must have equal length")
    return det_q(M.submatrix(I, J), qexp=qexp)


def column_expand(M: NCMatrix, s: int, side: str = "left") -> NCPoly:
    """Expansion of det_q along column s (1-based).

    side='left' places the entry on the left of the complementary minor,
    side='right' on the right.  For an arbitrary matrix only (s=1, left) and
    (s=n, right) reproduce det_q; with the cross commutation relations any
    column works on either side.
    """
    n = M.rows
    if not 1 <= s <= n:
        raise ValueError("column index out of range")
    acc = M.algebra.zero()
    for r in range(1, n + 1):
        sub = det_q(M.delete(r, s))
        if side == "left":
            acc = acc + (M.entry(r, s) * sub).scale(neg_q_pow(s - r))
        elif side == "right":
            acc = acc + (sub * M.entry(r, s)).scale(neg_q_pow(r - s))
        else:
            raise ValueError("side must be 'left' or 'right'")
    return acc


def laplace_rhs(M: NCMatrix, blocks: Sequence[Sequence[int]]) -> NCPoly:
    """Right-hand side of the multi-block Laplace expansion.

    blocks are column multi-indices I_1..I_r with sizes summing to n; the sum
    runs over increasing row multi-indices K_j of matching sizes weighted by
    the q-epsilon symbol of their concatenation.  The identity itself states
    eps^q(I_1 + ... + I_r) * det_q M equals this value.
    """
    n = M.rows
    sizes = [len(b) for b in blocks]
    if sum(sizes) != n:
        raise ValueError("block sizes must sum to the matrix size")
    acc = M.algebra.zero()

    def rec(j: int, chosen: tuple, prod: Optional[NCPoly]):
        nonlocal acc
        if j == len(blocks):
            eps = eps_q(chosen)
            if eps:
                acc = acc + prod.scale(eps)
            return
        for K in combinations(range(1, n + 1), sizes[j]):
            if set(K) & set(chosen):
                continue
            d = minor(M, K, blocks[j])
            rec(j + 1, chosen + K, d if prod is None else prod * d)

    rec(0, (), None)
    return acc


def laplace_lhs(M: NCMatrix, blocks: Sequence[Sequence[int]]) -> NCPoly:
    flat = tuple(i for b in blocks for i in b)
    return det_q(M).scale(eps_q(flat))


def adjoint(M: NCMatrix) -> NCMatrix:
    """Left adjoint matrix: entry (s, r) is (-q)^(r-s) det_q of M with row r
    and column s deleted; satisfies adj(M) * M = det_q(M) * 1 for q-Manin M."""
    n = M.rows
    if n != M.cols:
        raise ValueError("adjoint of a non-square matrix")
    ent = []
    for s in range(1, n + 1):
        row = []
        for r in range(1, n + 1):
            row.append(det_q(M.delete(r, s)).scale(neg_q_pow(r - s)))
        ent.append(row)
    return NCMatrix(M.algebra, ent)


def char_q(M: NCMatrix) -> list:
    """Coefficients e_0..e_n of the q-characteristic polynomial: e_0 = 1 and
    e_m is the sum of the principal m x m q-minors."""
    n = M.rows
    if n != M.cols:
        raise ValueError("characteristic polynomial of a non-square matrix")
    out = [M.algebra.one()]
    for m in range(1, n + 1):
        acc = M.algebra.zero()
        for I in combinations(range(1, n + 1), m):
            acc = acc + minor(M, I, I)
        out.append(acc)
    return out


def star_q(A: NCMatrix, B: NCMatrix) -> NCMatrix:
    """Twisted product: (A *_q B)_ik = sum_j q^(sgn(j-i)) A_ij B_jk."""
    if A.cols != B.rows or A.rows != A.cols or B.rows != B.cols:
        raise ValueError("*_q needs conformable square matrices")
    n = A.rows
    out = []
    for i in range(n):
        row = []
        for k in range(n):
            acc = A.algebra.zero()
            for j in range(n):
                term = A.entries[i][j] * B.entries[j][k]
                acc = acc + term.scale(LaurentQ.q(sgn(j - i)))
            row.append(acc)
        out.append(row)
    return NCMatrix(A.algebra, out)


def q_power(M: NCMatrix, m: int) -> NCMatrix:
    """Left-nested q-power: M^[0] = 1, M^[m] = M^[m-1] *_q M."""
    if m < 0:
        raise ValueError("q-power exponent must be nonnegative")
    out = NCMatrix.identity(M.algebra, M.rows)
    for _ in range(m):
        out = star_q(out, M)
    return out


__all__ = [
    "MultiIndex",
    "NCMatrix",
    "Permutation",
    "adjoint",
    "all_permutations",
    "char_q",
    "column_expand",
    "complement",
    "det_q",
    "det_q_grid",
    "eps_q",
    "eps_split",
    "flip",
    "inv_count",
    "is_q_manin",
    "laplace_lhs",
    "laplace_rhs",
    "manin_relation_polys",
    "minor",
    "neg_q_pow",
    "q_power",
    "star_q",
]
