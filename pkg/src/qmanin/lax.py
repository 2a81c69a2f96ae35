"""q-difference-operator ring and concrete L-operators built from R-matrix
evaluation factors: RLL verification, quantum determinants, the commuting
families t_k(z) and I_k(z), and quantum powers of L.

The quantum space is concrete and finite-dimensional, V = (C^n)^(x N), so
every identity here is an exact rational-function matrix identity.  All
internal arithmetic keeps a single cleared scalar denominator per tensor
(the R-matrix is polynomial over (u - v)), which makes the residual checks
pure polynomial computations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from typing import Optional, Sequence

from .qlinalg import det_q_grid, inv_count, neg_q_pow
from .scalars import LaurentQ, RatQ, RatZW, sgn
from .tensorrep import Tensor, antisym_q, perm_q, r_matrix


def _lift_scalar_tensor(T: Tensor) -> Tensor:
    """RatQ-entried tensor -> RatZW-entried tensor."""
    return T.map_entries(lambda e: RatZW.from_ratq(e) if isinstance(e, RatQ) else e)


class FracTensor:
    """A tensor of polynomial RatZW entries over one scalar polynomial
    denominator.  Sums and products never need polynomial gcds; zero tests
    are exact on the numerator."""

    __slots__ = ("num", "den")

    def __init__(self, num: Tensor, den: RatZW):
        if not den:
            raise ZeroDivisionError("zero denominator")
        self.num = num
        self.den = den

    # -- constructors --------------------------------------------------------

    @staticmethod
    def from_scalar_tensor(T: Tensor) -> "FracTensor":
        return FracTensor(_lift_scalar_tensor(T), RatZW.one())

    @staticmethod
    def identity(n: int, m: int) -> "FracTensor":
        return FracTensor(Tensor.identity(n, m, one=RatZW.one()), RatZW.one())

    @staticmethod
    def zero(n: int, m: int) -> "FracTensor":
        return FracTensor(Tensor.zero(n, m), RatZW.one())

    # -- structure -----------------------------------------------------------

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, other):
        if not isinstance(other, FracTensor):
            return NotImplemented
        if self.den == other.den:
            return self.num == other.num
        return not (self - other)

    def to_tensor(self) -> Tensor:
        """Reduced rational-function tensor (divides out the denominator)."""
        d = self.den
        return self.num.map_entries(lambda e: e / d)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: "FracTensor") -> "FracTensor":
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == other.den:
            return FracTensor(self.num + other.num, self.den)
        a = self.num.map_entries(lambda e: e * other.den)
        b = other.num.map_entries(lambda e: e * self.den)
        return FracTensor(a + b, self.den * other.den)

    def __neg__(self) -> "FracTensor":
        return FracTensor(-self.num, self.den)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "FracTensor") -> "FracTensor":
        return FracTensor(self.num * other.num, self.den * other.den)

    def scale(self, c) -> "FracTensor":
        return FracTensor(self.num.scale(c), self.den)

    # -- tensor structure ----------------------------------------------------

    def embed(self, positions, total) -> "FracTensor":
        return FracTensor(self.num.embed(positions, total), self.den)

    def partial_trace(self, factors) -> "FracTensor":
        return FracTensor(self.num.partial_trace(factors), self.den)

    def shift_z(self, steps: int) -> "FracTensor":
        if steps == 0:
            return self
        return FracTensor(self.num.map_entries(lambda e: e.shift("z", steps)),
                          self.den.shift("z", steps))

    def swap_zw(self) -> "FracTensor":
        return FracTensor(self.num.map_entries(lambda e: e.swap_zw()),
                          self.den.swap_zw())


def r_frac(n: int, u: RatZW, v: RatZW) -> FracTensor:
    """R(u/v) with the scalar pole u - v cleared."""
    R = r_matrix(n, u, v)
    d = u - v
    return FracTensor(R.map_entries(lambda e: e * d), d)


class QDiffOp:
    """Finite sum of T_k sigma^k where sigma shifts z to q^2 z; coefficients
    are cleared-denominator tensors on the quantum space.

    The product rule (f sigma^a)(g sigma^b) = f g(q^(2a) z) sigma^(a+b)
    holds exactly.
    """

    __slots__ = ("n", "sites", "terms")

    def __init__(self, n: int, sites: int, terms: dict | None = None):
        self.n = n
        self.sites = sites
        t = {}
        if terms:
            for k, T in terms.items():
                if T:
                    t[k] = T
        self.terms = t

    # -- constructors --------------------------------------------------------

    @staticmethod
    def from_frac(T: FracTensor, shift: int, n: int, sites: int) -> "QDiffOp":
        return QDiffOp(n, sites, {shift: T})

    @staticmethod
    def zero(n: int, sites: int) -> "QDiffOp":
        return QDiffOp(n, sites)

    @staticmethod
    def one(n: int, sites: int) -> "QDiffOp":
        return QDiffOp(n, sites, {0: FracTensor.identity(n, sites)})

    def lift_ratq(self, c: RatQ) -> "QDiffOp":
        T = Tensor.identity(self.n, self.sites, one=RatZW.from_ratq(c))
        return QDiffOp(self.n, self.sites, {0: FracTensor(T, RatZW.one())})

    # -- structure -----------------------------------------------------------

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, QDiffOp):
            return NotImplemented
        if self.terms.keys() != other.terms.keys():
            return False
        return all(self.terms[k] == other.terms[k] for k in self.terms)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: "QDiffOp") -> "QDiffOp":
        t = dict(self.terms)
        for k, T in other.terms.items():
            s = t.get(k)
            s = T if s is None else s + T
            if s:
                t[k] = s
            elif k in t:
                del t[k]
        return QDiffOp(self.n, self.sites, t)

    def __neg__(self) -> "QDiffOp":
        return QDiffOp(self.n, self.sites, {k: -T for k, T in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "QDiffOp") -> "QDiffOp":
        acc: dict = {}
        for a, Ta in self.terms.items():
            for b, Tb in other.terms.items():
                T = Ta * Tb.shift_z(a)
                k = a + b
                s = acc.get(k)
                s = T if s is None else s + T
                if s:
                    acc[k] = s
                elif k in acc:
                    del acc[k]
        return QDiffOp(self.n, self.sites, acc)

    def scale(self, c) -> "QDiffOp":
        out = {}
        for k, T in self.terms.items():
            nT = T.scale(c)
            if nT:
                out[k] = nT
        return QDiffOp(self.n, self.sites, out)

    def __repr__(self):
        return f"QDiffOp(shifts={sorted(self.terms)})"


# ---------------------------------------------------------------------------
# Lax matrices
# ---------------------------------------------------------------------------

@dataclass
class LaxMatrix:
    """n x n matrix over functions of z with values in End(V), V = (C^n)^N,
    satisfying the RLL exchange relation exactly.

    Entries are kept as one polynomial-entry grid over a common scalar
    denominator; entry(i, j) returns the reduced rational-function tensor.
    """
    n: int
    sites: int
    inhomogeneities: tuple
    num_entries: list     # n x n grid of Tensor with polynomial RatZW entries
    den: RatZW            # common scalar denominator

    def entry(self, i: int, j: int) -> Tensor:
        """Reduced L_ij(z) (0-based indices)."""
        d = self.den
        return self.num_entries[i][j].map_entries(lambda e: e / d)

    def frac_entry(self, i: int, j: int, shift: int = 0) -> FracTensor:
        out = FracTensor(self.num_entries[i][j], self.den)
        return out.shift_z(shift) if shift else out

    def entry_grid(self, shift: int = 0) -> list:
        return [[self.frac_entry(i, j, shift) for j in range(self.n)]
                for i in range(self.n)]

    def block(self, shift: int = 0) -> FracTensor:
        """L(q^(2 shift) z) on 1 + sites legs: auxiliary leg first."""
        ent = {}
        for i in range(self.n):
            for j in range(self.n):
                for (r, c), v in self.num_entries[i][j].entries.items():
                    ent[((i,) + r, (j,) + c)] = v
        T = FracTensor(Tensor(self.n, 1 + self.sites, ent), self.den)
        return T.shift_z(shift) if shift else T


def lax_from_r(n: int, inhomogeneities: Sequence, verify: bool = True) -> LaxMatrix:
    """Concrete L-operator L(z) = R^(01)(z/a_1) ... R^(0N)(z/a_N).

    The Yang-Baxter equation makes it satisfy the RLL relation; with
    verify=True the residual is checked exactly on construction.
    """
    a = []
    for v in inhomogeneities:
        if isinstance(v, (int, Fraction)):
            v = RatQ.const(v)
        elif isinstance(v, LaurentQ):
            v = RatQ.from_laurent(v)
        if not v:
            raise ValueError("inhomogeneities must be nonzero")
        a.append(v)
    N = len(a)
    if N < 1:
        raise ValueError("need at least one site")
    window = 2 * (n + N)
    for i in range(N):
        for j in range(N):
            if i != j:
                for s in range(-window, window + 1):
                    if a[i] == a[j] * RatQ.q(2 * s):
                        raise ValueError(
                            "pole collision among inhomogeneities: "
                            f"a_{i + 1} = q^{2 * s} a_{j + 1}")
    z = RatZW.var("z")
    total = 1 + N
    full = FracTensor.identity(n, total)
    for k in range(N):
        Rk = r_frac(n, z, RatZW.from_ratq(a[k]))
        full = full * Rk.embed((1, k + 2), total)
    grids: list = [[dict() for _ in range(n)] for _ in range(n)]
    for (r, c), v in full.num.entries.items():
        grids[r[0]][c[0]][(r[1:], c[1:])] = v
    nums = [[Tensor(n, N, grids[i][j]) for j in range(n)] for i in range(n)]
    L = LaxMatrix(n, N, tuple(a), nums, full.den)
    if verify:
        if rll_residual(L):
            raise AssertionError("RLL residual is nonzero for constructed L")
    return L


def lax_transpose(L: LaxMatrix) -> LaxMatrix:
    ent = [[L.num_entries[j][i] for j in range(L.n)] for i in range(L.n)]
    return LaxMatrix(L.n, L.sites, L.inhomogeneities, ent, L.den)


def rll_residual(L: LaxMatrix) -> FracTensor:
    """R(z/w) L1(z) L2(w) - L2(w) L1(z) R(z/w) on aux x aux x V, exact."""
    n, N = L.n, L.sites
    total = 2 + N
    quantum = tuple(range(3, total + 1))
    R12 = r_frac(n, RatZW.var("z"), RatZW.var("w")).embed((1, 2), total)
    L1 = L.block(0).embed((1,) + quantum, total)
    L2 = L.block(0).swap_zw().embed((2,) + quantum, total)
    return R12 * L1 * L2 - L2 * L1 * R12


def manin_from_lax(L: LaxMatrix, transpose: bool = False) -> list:
    """M = L(z) sigma as a grid of q-difference operators (or the transpose
    variant M~ = L(z)^T sigma^(-1))."""
    n, N = L.n, L.sites
    if transpose:
        return [[QDiffOp.from_frac(L.frac_entry(j, i), -1, n, N)
                 for j in range(n)] for i in range(n)]
    return [[QDiffOp.from_frac(L.frac_entry(i, j), 1, n, N)
             for j in range(n)] for i in range(n)]


def _qdiff_matrix_leg(M: list, position: int, total: int, n: int,
                      sites: int) -> dict:
    """Grid of QDiffOp embedded at one auxiliary leg: returns dict mapping
    (auxrow, auxcol) multi-indices to QDiffOp entries."""
    out: dict = {}
    from itertools import product as iproduct
    rest = [p for p in range(total) if p != position - 1]
    for i in range(n):
        for j in range(n):
            v = M[i][j]
            if not v:
                continue
            for fill in iproduct(range(n), repeat=len(rest)):
                R = [0] * total
                C = [0] * total
                R[position - 1] = i
                C[position - 1] = j
                for p, d in zip(rest, fill):
                    R[p] = d
                    C[p] = d
                out[(tuple(R), tuple(C))] = v
    return out


class QDiffTensor:
    """Tensor on auxiliary legs whose entries are QDiffOp values."""

    __slots__ = ("n", "m", "entries")

    def __init__(self, n: int, m: int, entries: dict):
        self.n = n
        self.m = m
        self.entries = {k: v for k, v in entries.items() if v}

    @staticmethod
    def from_qdiff_grid(M: list, position: int, total: int, n: int,
                        sites: int) -> "QDiffTensor":
        return QDiffTensor(n, total, _qdiff_matrix_leg(M, position, total, n, sites))

    @staticmethod
    def from_scalar(T: Tensor, n: int, sites: int) -> "QDiffTensor":
        """Lift a RatQ-entried auxiliary tensor to QDiffOp entries."""
        ent = {}
        proto = QDiffOp.zero(n, sites)
        for k, v in T.entries.items():
            ent[k] = proto.lift_ratq(v)
        return QDiffTensor(n, T.m, ent)

    def __bool__(self):
        return bool(self.entries)

    def __add__(self, other: "QDiffTensor") -> "QDiffTensor":
        e = dict(self.entries)
        for k, v in other.entries.items():
            s = e.get(k)
            s = v if s is None else s + v
            if s:
                e[k] = s
            elif k in e:
                del e[k]
        return QDiffTensor(self.n, self.m, e)

    def __neg__(self):
        return QDiffTensor(self.n, self.m,
                           {k: -v for k, v in self.entries.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "QDiffTensor") -> "QDiffTensor":
        by_row: dict = {}
        for (r, c), v in other.entries.items():
            by_row.setdefault(r, []).append((c, v))
        out: dict = {}
        for (r, k), va in self.entries.items():
            for c, vb in by_row.get(k, ()):
                term = va * vb
                key = (r, c)
                s = out.get(key)
                s = term if s is None else s + term
                if s:
                    out[key] = s
                elif key in out:
                    del out[key]
        return QDiffTensor(self.n, self.m, out)


def manin_operator_residuals(M: list, n: int, sites: int) -> list:
    """Exact q-Manin residuals for a grid of q-difference operators:
    A^q M1 M2 (1 + P^q) together with two equivalent Pyatov forms."""
    P = QDiffTensor.from_scalar(perm_q(n), n, sites)
    A = QDiffTensor.from_scalar(antisym_q(n, 2), n, sites)
    one = QDiffTensor.from_scalar(Tensor.identity(n, 2), n, sites)
    M1 = QDiffTensor.from_qdiff_grid(M, 1, 2, n, sites)
    M2 = QDiffTensor.from_qdiff_grid(M, 2, 2, n, sites)
    MM = M1 * M2
    return [
        A * MM * (one + P),
        (MM - P * MM * P) - (P * MM - MM * P),
        A * MM * A - A * MM,
    ]


def qdet_lax(L: LaxMatrix) -> FracTensor:
    """Quantum determinant: column-ordered sum with arguments advancing by
    q^2 per column; an End(V)-valued function of z."""
    n = L.n
    acc: Optional[FracTensor] = None
    for tau in permutations(range(n)):
        inv = inv_count(tau)
        prod: Optional[FracTensor] = None
        for col in range(n):
            T = L.frac_entry(tau[col], col, shift=col)
            prod = T if prod is None else prod * T
        term = prod.scale(neg_q_pow(-inv))
        acc = term if acc is None else acc + term
    return acc


def qdet_vs_detq_residual(L: LaxMatrix) -> QDiffOp:
    """det_q(L(z) sigma) - qdet L(z) sigma^n, exactly."""
    n, N = L.n, L.sites
    M = manin_from_lax(L)
    det_M = det_q_grid(M, QDiffOp.one(n, N))
    return det_M - QDiffOp.from_frac(qdet_lax(L), n, n, N)


def antisym_qdet_residual(L: LaxMatrix) -> FracTensor:
    """A^q_n L^(1)(z) ... L^(n)(q^(2(n-1)) z) - A^q_n qdet L(z)."""
    n, N = L.n, L.sites
    total = n + N
    quantum = tuple(range(n + 1, total + 1))
    A = FracTensor.from_scalar_tensor(antisym_q(n, n)).embed(
        tuple(range(1, n + 1)), total)
    prod = A
    for i in range(1, n + 1):
        prod = prod * L.block(i - 1).embed((i,) + quantum, total)
    qd = qdet_lax(L).embed(quantum, total)
    return prod - A * qd


def t_k(L: LaxMatrix, k: int) -> FracTensor:
    """t_k(z) = tr_(1..k) A^q_k L^(1)(z) L^(2)(q^2 z) ... L^(k)(q^(2(k-1)) z);
    an End(V)-valued function of z."""
    n, N = L.n, L.sites
    if k == 0:
        return FracTensor.identity(n, N)
    total = k + N
    quantum = tuple(range(k + 1, total + 1))
    acc = FracTensor.from_scalar_tensor(antisym_q(n, k)).embed(
        tuple(range(1, k + 1)), total)
    for i in range(1, k + 1):
        acc = acc * L.block(i - 1).embed((i,) + quantum, total)
    return acc.partial_trace(tuple(range(1, k + 1)))


def tk_commuting_residual(L: LaxMatrix, k: int, l: int) -> FracTensor:
    """t_k(z) t_l(w) - t_l(w) t_k(z) as a bivariate rational-function matrix."""
    tk = t_k(L, k)
    tlw = t_k(L, l).swap_zw()
    return tk * tlw - tlw * tk


def star_q_grid(A: list, B: list, n: int) -> list:
    """(A *_q B)_ik = sum_j q^(sgn(j - i)) A_ij B_jk for grids of tensors."""
    out = []
    for i in range(n):
        row = []
        for kk in range(n):
            acc = None
            for j in range(n):
                term = (A[i][j] * B[j][kk]).scale(LaurentQ.q(sgn(j - i)))
                acc = term if acc is None else acc + term
            row.append(acc)
        out.append(row)
    return out


def l_power(L: LaxMatrix, m: int) -> list:
    """L^[m](z): iterated *_q products with arguments advancing by q^2."""
    n = L.n
    out = [[FracTensor.identity(n, L.sites) if i == j
            else FracTensor.zero(n, L.sites) for j in range(n)]
           for i in range(n)]
    for step in range(m):
        out = star_q_grid(out, L.entry_grid(shift=step), n)
    return out


def i_k(L: LaxMatrix, k: int) -> FracTensor:
    """I_k(z) = tr L^[k](z), an End(V)-valued generating function."""
    P = l_power(L, k)
    acc = None
    for i in range(L.n):
        acc = P[i][i] if acc is None else acc + P[i][i]
    return acc


def lax_cayley_hamilton_residual(L: LaxMatrix) -> list:
    """sum_m (-1)^m t_m(z) L^[n-m](q^(2m) z) as a grid; zero exactly."""
    n = L.n
    res = [[FracTensor.zero(n, L.sites) for _ in range(n)] for _ in range(n)]
    for m in range(n + 1):
        tm = t_k(L, m)
        power = l_power(L, n - m)
        sign = Fraction(-1 if m % 2 else 1)
        for i in range(n):
            for j in range(n):
                term = (tm * power[i][j].shift_z(m)).scale(sign)
                res[i][j] = res[i][j] + term
    return res


def lax_newton_residual(L: LaxMatrix, m: int) -> FracTensor:
    """m t_m(z) - sum_k (-1)^(m+k+1) t_k(z) I_(m-k)(q^(2k) z), exactly zero."""
    acc = t_k(L, m).scale(Fraction(m))
    for k in range(m):
        sign = Fraction(-1 if (m + k + 1) % 2 else 1)
        term = (t_k(L, k) * i_k(L, m - k).shift_z(k)).scale(sign)
        acc = acc - term
    return acc


def ik_commuting_residual(L: LaxMatrix, k: int, l: int) -> FracTensor:
    ik = i_k(L, k)
    ilw = i_k(L, l).swap_zw()
    return ik * ilw - ilw * ik


def ik_tk_commuting_residual(L: LaxMatrix, k: int, l: int) -> FracTensor:
    ik = i_k(L, k)
    tlw = t_k(L, l).swap_zw()
    return ik * tlw - tlw * ik


def tk_minor_consistency_residual(L: LaxMatrix, k: int) -> QDiffOp:
    """Sum of principal k x k q-minors of M = L(z) sigma minus t_k(z) sigma^k."""
    n, N = L.n, L.sites
    M = manin_from_lax(L)
    acc = QDiffOp.zero(n, N)
    for I in combinations(range(n), k):
        sub = [[M[i][j] for j in I] for i in I]
        acc = acc + det_q_grid(sub, QDiffOp.one(n, N))
    return acc - QDiffOp.from_frac(t_k(L, k), k, n, N)
