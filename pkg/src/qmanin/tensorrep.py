"""Leningrad-notation tensor calculus: the q-permutation operator, higher
q-(anti)symmetrizers, the symmetric-group representation behind them,
component extraction against q-minors, and the trigonometric R-matrix.

Tensors act on m-fold tensor powers of an n-dimensional space; indices are
0-based tuples internally.  Entries are RatQ, RatZW or NCPoly values,
homogeneous per tensor, with scalars lifted automatically when tensors of
different entry kinds are combined.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations, product
from typing import Callable, Optional, Sequence

from .freealg import NCPoly
from .qlinalg import inv_count, neg_q_pow
from .scalars import LaurentQ, RatQ, RatZW, sgn


def _unify(a, b):
    """Lift two tensor entries into a common ring."""
    if type(a) is type(b):
        return a, b
    if isinstance(a, RatQ):
        if isinstance(b, RatZW):
            return RatZW.from_ratq(a), b
        if isinstance(b, NCPoly):
            return NCPoly.scalar(b.alphabet, a), b
    if isinstance(b, RatQ):
        if isinstance(a, RatZW):
            return a, RatZW.from_ratq(b)
        if isinstance(a, NCPoly):
            return a, NCPoly.scalar(a.alphabet, b)
    raise TypeError(f"incompatible tensor entries: {type(a)} and {type(b)}")


class Tensor:
    """Sparse operator on (C^n)^(x m) with exact entries."""

    __slots__ = ("n", "m", "entries")

    def __init__(self, n: int, m: int, entries: dict | None = None):
        self.n = n
        self.m = m
        e = {}
        if entries:
            for (r, c), v in entries.items():
                if v:
                    e[(tuple(r), tuple(c))] = v
        self.entries = e

    # -- constructors --------------------------------------------------------

    @staticmethod
    def zero(n: int, m: int) -> "Tensor":
        return Tensor(n, m)

    @staticmethod
    def identity(n: int, m: int, one=None) -> "Tensor":
        one = one if one is not None else RatQ.one()
        ent = {}
        for idx in product(range(n), repeat=m):
            ent[(idx, idx)] = one
        return Tensor(n, m, ent)

    def copy_shape_zero(self) -> "Tensor":
        return Tensor(self.n, self.m)

    # -- structure -----------------------------------------------------------

    def __bool__(self):
        return bool(self.entries)

    def __eq__(self, other):
        return (isinstance(other, Tensor) and self.n == other.n
                and self.m == other.m and self.entries == other.entries)

    def get(self, row, col):
        return self.entries.get((tuple(row), tuple(col)))

    def shape_check(self, other: "Tensor"):
        if self.n != other.n or self.m != other.m:
            raise ValueError("tensor arity mismatch")

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: "Tensor") -> "Tensor":
        self.shape_check(other)
        e = dict(self.entries)
        for k, v in other.entries.items():
            s = e.get(k)
            if s is None:
                e[k] = v
            else:
                a, b = _unify(s, v)
                s = a + b
                if s:
                    e[k] = s
                else:
                    del e[k]
        out = Tensor(self.n, self.m)
        out.entries = e
        return out

    def __neg__(self) -> "Tensor":
        out = Tensor(self.n, self.m)
        out.entries = {k: -v for k, v in self.entries.items()}
        return out

    def __sub__(self, other: "Tensor") -> "Tensor":
        return self + (-other)

    def __mul__(self, other: "Tensor") -> "Tensor":
        """Operator composition: self applied after other on the right,
        (self * other)(v) = self(other(v))."""
        self.shape_check(other)
        by_row: dict = {}
        for (r, c), v in other.entries.items():
            by_row.setdefault(r, []).append((c, v))
        out: dict = {}
        for (r, k), va in self.entries.items():
            for c, vb in by_row.get(k, ()):
                key = (r, c)
                a, b = _unify(va, vb)
                term = a * b
                s = out.get(key)
                if s is None:
                    if term:
                        out[key] = term
                else:
                    s2, t2 = _unify(s, term)
                    s2 = s2 + t2
                    if s2:
                        out[key] = s2
                    else:
                        del out[key]
        t = Tensor(self.n, self.m)
        t.entries = out
        return t

    def scale(self, c) -> "Tensor":
        out = Tensor(self.n, self.m)
        out.entries = {}
        for k, v in self.entries.items():
            nv = v.scale(c)
            if nv:
                out.entries[k] = nv
        return out

    def scale_entry(self, c) -> "Tensor":
        """Multiply every entry by a ring element from the left."""
        out = Tensor(self.n, self.m)
        for k, v in self.entries.items():
            a, b = _unify(c, v)
            nv = a * b
            if nv:
                out.entries[k] = nv
        return out

    def scale_entry_right(self, c) -> "Tensor":
        out = Tensor(self.n, self.m)
        for k, v in self.entries.items():
            a, b = _unify(v, c)
            nv = a * b
            if nv:
                out.entries[k] = nv
        return out

    def map_entries(self, f: Callable) -> "Tensor":
        out = Tensor(self.n, self.m)
        for k, v in self.entries.items():
            nv = f(v)
            if nv:
                out.entries[k] = nv
        return out

    # -- tensor structure ----------------------------------------------------

    def embed(self, positions: Sequence[int], total: int) -> "Tensor":
        """Leningrad embedding C^(k_1..k_m) into `total` factors (1-based
        positions, distinct, possibly out of order)."""
        pos = tuple(p - 1 for p in positions)
        if len(pos) != self.m or len(set(pos)) != len(pos):
            raise ValueError("positions must be distinct and match the arity")
        if any(p < 0 or p >= total for p in pos):
            raise ValueError("position out of range")
        rest = [i for i in range(total) if i not in pos]
        out: dict = {}
        for (r, c), v in self.entries.items():
            base_r = [0] * total
            base_c = [0] * total
            for p, rr, cc in zip(pos, r, c):
                base_r[p] = rr
                base_c[p] = cc
            for fill in product(range(self.n), repeat=len(rest)):
                R = list(base_r)
                C = list(base_c)
                for p, d in zip(rest, fill):
                    R[p] = d
                    C[p] = d
                out[(tuple(R), tuple(C))] = v
        t = Tensor(self.n, total)
        t.entries = out
        return t

    def partial_trace(self, factors: Sequence[int]) -> "Tensor":
        """Trace over the given (1-based) factor positions."""
        pos = sorted(p - 1 for p in factors)
        if any(p < 0 or p >= self.m for p in pos):
            raise ValueError("factor out of range")
        keep = [i for i in range(self.m) if i not in pos]
        out: dict = {}
        for (r, c), v in self.entries.items():
            if any(r[p] != c[p] for p in pos):
                continue
            key = (tuple(r[i] for i in keep), tuple(c[i] for i in keep))
            s = out.get(key)
            if s is None:
                out[key] = v
            else:
                a, b = _unify(s, v)
                s = a + b
                if s:
                    out[key] = s
                else:
                    del out[key]
        t = Tensor(self.n, len(keep))
        t.entries = out
        return t

    def trace_all(self):
        """Trace over every factor; returns a ring element (or None if 0)."""
        acc = None
        for (r, c), v in self.entries.items():
            if r == c:
                if acc is None:
                    acc = v
                else:
                    a, b = _unify(acc, v)
                    acc = a + b
        return acc

    def dense(self) -> list:
        """Dense matrix [row][col] with None for structural zeros, in
        lexicographic multi-index order."""
        idx = list(product(range(self.n), repeat=self.m))
        pos = {t: i for i, t in enumerate(idx)}
        N = len(idx)
        out = [[None] * N for _ in range(N)]
        for (r, c), v in self.entries.items():
            out[pos[r]][pos[c]] = v
        return out

    def __repr__(self):
        return f"Tensor(n={self.n}, m={self.m}, nnz={len(self.entries)})"


# ---------------------------------------------------------------------------
# q-permutation, (anti)symmetrizers, pi_q
# ---------------------------------------------------------------------------

def perm_q(n: int, qexp: int = 1) -> Tensor:
    """P^q on C^n x C^n (qexp=-1 builds P^(q^-1)); satisfies (P^q)^2 = 1."""
    ent = {}
    for i in range(n):
        for j in range(n):
            ent[((i, j), (j, i))] = RatQ.q(sgn(i - j) * qexp)
    return Tensor(n, 2, ent)


_PI_CACHE: dict = {}


def pi_q(n: int, m: int, tau: Sequence[int], qexp: int = 1) -> Tensor:
    """Representation of the symmetric group sending the adjacent
    transposition s_k to P^q embedded in factors (k, k+1).

    tau is one-line notation on 1..m.
    """
    tau = tuple(tau)
    key = (n, m, tau, qexp)
    cached = _PI_CACHE.get(key)
    if cached is not None:
        return cached
    if tau == tuple(range(1, m + 1)):
        out = Tensor.identity(n, m)
    else:
        # peel one adjacent transposition: find k with tau = tau' o s_k,
        # inv(tau') = inv(tau) - 1
        lst = list(tau)
        k = next(i for i in range(m - 1) if lst[i] > lst[i + 1])
        lst[k], lst[k + 1] = lst[k + 1], lst[k]
        parent = pi_q(n, m, tuple(lst), qexp)
        pk = perm_q(n, qexp).embed((k + 1, k + 2), m)
        # tau = tau' o s_k acts as pi(tau') * pi(s_k)
        out = parent * pk
    _PI_CACHE[key] = out
    return out


def antisym_q(n: int, m: int, qexp: int = 1) -> Tensor:
    """A^q_m = (1/m!) sum over tau of (-1)^tau pi_q(tau)."""
    acc = Tensor.zero(n, m)
    for tau in permutations(range(1, m + 1)):
        t = pi_q(n, m, tau, qexp)
        s = Fraction(-1 if inv_count(tau) % 2 else 1, _factorial(m))
        acc = acc + t.scale(s)
    return acc


def sym_q(n: int, m: int, qexp: int = 1) -> Tensor:
    """S^q_m = (1/m!) sum over tau of pi_q(tau)."""
    acc = Tensor.zero(n, m)
    for tau in permutations(range(1, m + 1)):
        acc = acc + pi_q(n, m, tau, qexp).scale(Fraction(1, _factorial(m)))
    return acc


def _factorial(m: int) -> int:
    out = 1
    for i in range(2, m + 1):
        out *= i
    return out


def tensor_rank(T: Tensor) -> int:
    """Exact rank of a scalar (RatQ) tensor by Gaussian elimination."""
    dense = T.dense()
    N = len(dense)
    rows = [[c if c is not None else RatQ.zero() for c in row] for row in dense]
    rank = 0
    col = 0
    for col in range(N):
        piv = next((r for r in range(rank, N) if rows[r][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = rows[rank][col].inverse()
        rows[rank] = [v * inv for v in rows[rank]]
        for r in range(N):
            if r != rank and rows[r][col]:
                f = rows[r][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def tensor_inverse(T: Tensor) -> Tensor:
    """Exact inverse of a tensor whose entries form a field (RatQ/RatZW)."""
    idx = list(product(range(T.n), repeat=T.m))
    N = len(idx)
    some = next(iter(T.entries.values()))
    if isinstance(some, RatZW):
        zero, one = RatZW.zero(), RatZW.one()
    else:
        zero, one = RatQ.zero(), RatQ.one()
    A = [[zero] * N for _ in range(N)]
    pos = {t: i for i, t in enumerate(idx)}
    for (r, c), v in T.entries.items():
        A[pos[r]][pos[c]] = v
    B = [[one if i == j else zero for j in range(N)] for i in range(N)]
    for col in range(N):
        piv = next((r for r in range(col, N) if A[r][col]), None)
        if piv is None:
            raise ZeroDivisionError("tensor is not invertible")
        A[col], A[piv] = A[piv], A[col]
        B[col], B[piv] = B[piv], B[col]
        inv = A[col][col].inverse()
        A[col] = [v * inv for v in A[col]]
        B[col] = [v * inv for v in B[col]]
        for r in range(N):
            if r != col and A[r][col]:
                f = A[r][col]
                A[r] = [a - f * b for a, b in zip(A[r], A[col])]
                B[r] = [a - f * b for a, b in zip(B[r], B[col])]
    ent = {}
    for i in range(N):
        for j in range(N):
            if B[i][j]:
                ent[(idx[i], idx[j])] = B[i][j]
    return Tensor(T.n, T.m, ent)


# ---------------------------------------------------------------------------
# matrices embedded in tensor legs
# ---------------------------------------------------------------------------

def matrix_leg(grid, position: int, total: int, n: int) -> Tensor:
    """Embed an n x n grid of ring entries as sum_ij grid[i][j] E_ij acting in
    one factor (1-based position) of an m-fold power."""
    ent = {}
    for i in range(n):
        for j in range(n):
            v = grid[i][j]
            if v:
                ent[((i,), (j,))] = v
    return Tensor(n, 1, ent).embed((position,), total)


def matrix_product_legs(grid, m: int, n: int) -> Tensor:
    """M^(1) M^(2) ... M^(m) for one n x n grid."""
    acc = None
    for p in range(1, m + 1):
        t = matrix_leg(grid, p, m, n)
        acc = t if acc is None else acc * t
    return acc


# ---------------------------------------------------------------------------
# Pyatov residuals and invariance residuals
# ---------------------------------------------------------------------------

def pyatov_residuals(grid, n: int, qexp: int = 1) -> list:
    """The four equivalent left-minus-right tensors whose vanishing
    characterizes q-Manin matrices (qexp=-1 for the q^(-1) forms on the
    reversed factor order)."""
    P = perm_q(n, qexp)
    A = antisym_q(n, 2, qexp)
    S = sym_q(n, 2, qexp)
    one = Tensor.identity(n, 2)
    if qexp == 1:
        MM = matrix_product_legs(grid, 2, n)
    else:
        # reversed order M^(2) M^(1)
        MM = matrix_leg(grid, 2, 2, n) * matrix_leg(grid, 1, 2, n)
    r1 = (MM - P * MM * P) - (P * MM - MM * P)
    r2 = A * MM * A - A * MM
    r3 = S * MM * S - MM * S
    r4 = (one - P) * MM * (one + P)
    return [r1, r2, r3, r4]


def transpose_manin_residuals(grid, n: int) -> list:
    """Residuals whose vanishing says the transpose is q-Manin: the
    q^(-1)-forms on M^(1) M^(2)."""
    Pinv = perm_q(n, -1)
    Ainv = antisym_q(n, 2, -1)
    Sinv = sym_q(n, 2, -1)
    MM = matrix_product_legs(grid, 2, n)
    r1 = (MM - Pinv * MM * Pinv) - (MM * Pinv - Pinv * MM)
    r2 = Ainv * MM * Ainv - MM * Ainv
    r3 = Sinv * MM * Sinv - Sinv * MM
    r4 = Sinv * MM * Ainv
    return [r1, r2, r3, r4]


def antisym_invariance_residual(grid, n: int, m: int) -> Tensor:
    """A^q_m M^(1)..M^(m) (1 - A^q_m); zero for q-Manin matrices."""
    A = antisym_q(n, m)
    MM = matrix_product_legs(grid, m, n)
    one = Tensor.identity(n, m)
    return A * MM * (one - A)


def sym_invariance_residual(grid, n: int, m: int) -> Tensor:
    """(1 - S^q_m) M^(1)..M^(m) S^q_m; zero for q-Manin matrices."""
    S = sym_q(n, m)
    MM = matrix_product_legs(grid, m, n)
    one = Tensor.identity(n, m)
    return (one - S) * MM * S


# ---------------------------------------------------------------------------
# trigonometric R-matrix
# ---------------------------------------------------------------------------

def r_matrix(n: int, u: RatZW, v: RatZW) -> Tensor:
    """Trigonometric R-matrix R(u/v) on C^n x C^n with exact rational-function
    entries; R(z) is r_matrix(n, z, 1)."""
    if n < 2:
        raise ValueError("the R-matrix needs n >= 2")
    diff = u - v
    if not diff:
        raise ZeroDivisionError("R-matrix pole: coinciding spectral arguments")
    qq = RatZW.q(1)
    qqi = RatZW.q(-1)
    diag = (u * qq - v * qqi) / diff
    hop = qq - qqi
    upper = hop * u / diff
    lower = hop * v / diff
    ent = {}
    for i in range(n):
        ent[((i, i), (i, i))] = diag
        for j in range(n):
            if i != j:
                ent[((i, j), (i, j))] = RatZW.one()
        for j in range(i + 1, n):
            ent[((i, j), (j, i))] = upper
            ent[((j, i), (i, j))] = lower
    return Tensor(n, 2, ent)


def r_matrix_z(n: int) -> Tensor:
    """R(z) with its single spectral parameter bound to the variable z."""
    return r_matrix(n, RatZW.var("z"), RatZW.one())


def big_r(n: int, points: Sequence[RatZW], ordering: str = "rows") -> Tensor:
    """Ordered product of R^(i,j)(z_i / z_j) over 1 <= i < j <= m at the given
    spectral points.

    ordering='rows' groups factors as (R^(1,2) R^(1,3)...R^(1,m))...(R^(m-1,m));
    ordering='cols' as (R^(1,2))(R^(1,3) R^(2,3))...; their agreement is itself
    a Yang-Baxter consequence checked by the verify layer.
    """
    m = len(points)
    pairs = []
    if ordering == "rows":
        for i in range(1, m):
            for j in range(i + 1, m + 1):
                pairs.append((i, j))
    elif ordering == "cols":
        for j in range(2, m + 1):
            for i in range(1, j):
                pairs.append((i, j))
    else:
        raise ValueError("ordering must be 'rows' or 'cols'")
    acc = Tensor.identity(n, m, one=RatZW.one())
    for i, j in pairs:
        acc = acc * r_matrix(n, points[i - 1], points[j - 1]).embed((i, j), m)
    return acc


def big_r_fused(n: int, m: int) -> Tensor:
    """R_m at the fusion point (z, q^2 z, ..., q^(2(m-1)) z); arguments reduce
    to constant powers of q so the result has RatQ-valued structure kept as
    RatZW entries."""
    z = RatZW.var("z")
    points = [z.scale(RatQ.q(2 * i)) for i in range(m)]
    return big_r(n, points)


def big_r_kl(n: int, k: int, l: int) -> Tensor:
    """R_{k,l}(z, w): ascending product over rows i = 1..k of descending
    products over columns j = k+l..k+1 of R^(i,j)(q^(2(i-j+k)) z / w)."""
    m = k + l
    z = RatZW.var("z")
    w = RatZW.var("w")
    acc = Tensor.identity(n, m, one=RatZW.one())
    for i in range(1, k + 1):
        for j in range(m, k, -1):
            u = z.scale(RatQ.q(2 * (i - j + k)))
            acc = acc * r_matrix(n, u, w).embed((i, j), m)
    return acc


def big_r_kl_inverse(n: int, k: int, l: int) -> Tensor:
    """Inverse of R_{k,l}(z, w) as the reversed product of factor inverses."""
    m = k + l
    z = RatZW.var("z")
    w = RatZW.var("w")
    acc = Tensor.identity(n, m, one=RatZW.one())
    factors = []
    for i in range(1, k + 1):
        for j in range(m, k, -1):
            u = z.scale(RatQ.q(2 * (i - j + k)))
            factors.append(r_matrix(n, u, w).embed((i, j), m))
    for f in reversed(factors):
        acc = acc * tensor_inverse(f)
    return acc


def antisym_kl(n: int, k: int, l: int) -> Tensor:
    """A^q_{k,l}: antisymmetrizers on the first k and the last l factors."""
    m = k + l
    A1 = antisym_q(n, k).embed(tuple(range(1, k + 1)), m)
    A2 = antisym_q(n, l).embed(tuple(range(k + 1, m + 1)), m)
    return A1 * A2


__all__ = [
    "Tensor",
    "antisym_invariance_residual",
    "antisym_kl",
    "antisym_q",
    "big_r",
    "big_r_fused",
    "big_r_kl",
    "big_r_kl_inverse",
    "matrix_leg",
    "matrix_product_legs",
    "perm_q",
    "pi_q",
    "pyatov_residuals",
    "r_matrix",
    "r_matrix_z",
    "sym_invariance_residual",
    "sym_q",
    "tensor_inverse",
    "tensor_rank",
    "transpose_manin_residuals",
]
