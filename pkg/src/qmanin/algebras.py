"""Finitely presented algebras: right-quantum (q-Manin) algebras, the quantum
matrix algebra, q-polynomial and q-Grassmann algebras, tensor products,
localizations, and the truncated quantum-plane operator representation used
to witness non-identities.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .freealg import (
    Alphabet,
    MonomialOrder,
    NCPoly,
    ProofResult,
    RuleSet,
    cache_key,
    complete,
    is_zero_mod,
)
from .scalars import LaurentQ, RatQ

CACHE_ENV = "QMANIN_CACHE_DIR"


@dataclass
class Presentation:
    alphabet: Alphabet
    relations: tuple
    order: MonomialOrder

    def __post_init__(self):
        if any(not r for r in self.relations):
            raise ValueError("relations must be nonzero")

    def hash_key(self, degree: int) -> str:
        return cache_key(self.relations, self.order, degree)

    def to_json(self) -> dict:
        return {
            "gens": list(self.alphabet.names),
            "relations": [r.to_json() for r in self.relations],
            "order": self.order.to_json(),
        }


class LocalizationCollapsed(RuntimeError):
    """A localization forced 1 = 0; reductions in it prove nothing."""


class AlgebraHandle:
    """A presentation together with a cache of completed rule sets."""

    def __init__(self, presentation: Presentation):
        self.presentation = presentation
        self._rulesets: dict[int, RuleSet] = {}

    # -- element constructors ------------------------------------------------

    @property
    def alphabet(self) -> Alphabet:
        return self.presentation.alphabet

    @property
    def ngens(self) -> int:
        return len(self.presentation.alphabet)

    def gen(self, name_or_index) -> NCPoly:
        i = (name_or_index if isinstance(name_or_index, int)
             else self.alphabet.index(name_or_index))
        return NCPoly.gen(self.alphabet, i)

    def gens(self) -> list:
        return [NCPoly.gen(self.alphabet, i) for i in range(self.ngens)]

    def one(self) -> NCPoly:
        return NCPoly.one(self.alphabet)

    def zero(self) -> NCPoly:
        return NCPoly.zero(self.alphabet)

    def scalar(self, c) -> NCPoly:
        return NCPoly.scalar(self.alphabet, c)

    def coerce(self, p: NCPoly) -> NCPoly:
        return p.with_alphabet(self.alphabet)

    # -- proof engine --------------------------------------------------------

    def ruleset(self, degree: int) -> RuleSet:
        rs = self._rulesets.get(degree)
        if rs is not None:
            return rs
        cache_dir = os.environ.get(CACHE_ENV)
        key = self.presentation.hash_key(degree)
        if cache_dir:
            path = os.path.join(cache_dir, key + ".json")
            if os.path.exists(path):
                with open(path, "r", encoding="utf-8") as fh:
                    rs = RuleSet.from_json(json.load(fh))
                self._rulesets[degree] = rs
                return rs
        rs = complete(list(self.presentation.relations), self.presentation.order,
                      degree, alphabet=self.alphabet)
        rs.source_hash = key
        self._rulesets[degree] = rs
        if cache_dir:
            os.makedirs(cache_dir, exist_ok=True)
            path = os.path.join(cache_dir, key + ".json")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(rs.serialize())
        return rs

    def reduce(self, p: NCPoly, degree: int) -> NCPoly:
        from .freealg import reduce as _reduce
        return _reduce(self.coerce(p), self.ruleset(degree))

    def is_zero(self, p: NCPoly, degree: int) -> ProofResult:
        rs = self.ruleset(degree)
        if rs.inconsistent:
            raise LocalizationCollapsed(
                "1 reduces to 0: the localized presentation is inconsistent")
        return is_zero_mod(self.coerce(p), rs)

    def check_not_collapsed(self, degree: int):
        if self.ruleset(degree).inconsistent:
            raise LocalizationCollapsed(
                "1 reduces to 0: the localized presentation is inconsistent")


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

def _grid_names(prefix: str, rows: int, cols: int) -> list:
    sep = "_" if max(rows, cols) > 9 else ""
    return [[f"{prefix}{i + 1}{sep}{j + 1}" for j in range(cols)]
            for i in range(rows)]


def free_algebra(names: Sequence[str]) -> AlgebraHandle:
    alphabet = Alphabet(tuple(names))
    return AlgebraHandle(Presentation(alphabet, (), MonomialOrder.deglex(len(names))))


def _manin_polys_for_grid(alphabet: Alphabet, grid, qexp: int) -> list:
    """Defining relation polynomials for a grid of NCPoly entries.

    qexp=+1 gives the q-Manin relations, qexp=-1 the q^(-1)-Manin ones:
    column entries q-commute downward and the 2x2 cross commutators match.
    """
    n = len(grid)
    m = len(grid[0]) if n else 0
    qi = RatQ.q(-qexp)   # q^(-1) in the chosen convention
    qp = RatQ.q(qexp)
    out = []
    for j in range(m):
        for i in range(n):
            for k in range(i + 1, n):
                p = grid[i][j] * grid[k][j] - (grid[k][j] * grid[i][j]).scale(qi)
                out.append(p)
    for i in range(n):
        for k in range(i + 1, n):
            for j in range(m):
                for l in range(j + 1, m):
                    p = (grid[i][j] * grid[k][l] - grid[k][l] * grid[i][j]
                         - (grid[k][j] * grid[i][l]).scale(qi)
                         + (grid[i][l] * grid[k][j]).scale(qp))
                    out.append(p)
    return out


def right_quantum(rows: int, cols: int, prefix: str = "M",
                  names: Optional[Sequence[str]] = None) -> AlgebraHandle:
    """Universal algebra of a generic rows x cols q-Manin matrix."""
    if rows < 1 or cols < 1:
        raise ValueError("matrix dimensions must be positive")
    if names is None:
        name_grid = _grid_names(prefix, rows, cols)
    else:
        if len(names) != rows * cols:
            raise ValueError("need one name per entry, row-major")
        name_grid = [list(names[i * cols:(i + 1) * cols]) for i in range(rows)]
    flat = tuple(n for row in name_grid for n in row)
    alphabet = Alphabet(flat)
    grid = [[NCPoly.gen(alphabet, i * cols + j) for j in range(cols)]
            for i in range(rows)]
    rels = _manin_polys_for_grid(alphabet, grid, +1)
    return AlgebraHandle(Presentation(alphabet, tuple(rels),
                                      MonomialOrder.deglex(len(flat))))


def quantum_matrices(n: int, prefix: str = "T",
                     names: Optional[Sequence[str]] = None) -> AlgebraHandle:
    """Quantum matrix algebra: both T and its transpose are q-Manin."""
    if n < 1:
        raise ValueError("n must be positive")
    if names is None:
        name_grid = _grid_names(prefix, n, n)
        flat = tuple(x for row in name_grid for x in row)
    else:
        flat = tuple(names)
    alphabet = Alphabet(flat)
    T = [[NCPoly.gen(alphabet, i * n + j) for j in range(n)] for i in range(n)]
    qi = RatQ.q(-1)
    q1 = RatQ.q(1)
    rels = []
    # columns and rows q-commute
    for j in range(n):
        for i in range(n):
            for k in range(i + 1, n):
                rels.append(T[i][j] * T[k][j] - (T[k][j] * T[i][j]).scale(qi))
    for i in range(n):
        for j in range(n):
            for l in range(j + 1, n):
                rels.append(T[i][j] * T[i][l] - (T[i][l] * T[i][j]).scale(qi))
    for i in range(n):
        for k in range(i + 1, n):
            for j in range(n):
                for l in range(j + 1, n):
                    # ad - da = q^-1 cb - q bc ; bc = cb
                    rels.append(T[i][j] * T[k][l] - T[k][l] * T[i][j]
                                - (T[k][j] * T[i][l]).scale(qi)
                                + (T[i][l] * T[k][j]).scale(q1))
                    rels.append(T[i][l] * T[k][j] - T[k][j] * T[i][l])
    return AlgebraHandle(Presentation(alphabet, tuple(rels),
                                      MonomialOrder.deglex(len(flat))))


def quantum_affine(m: int, prefix: str = "x") -> AlgebraHandle:
    """q-polynomial algebra: x_i x_j = q^(-1) x_j x_i for i < j."""
    names = tuple(f"{prefix}{i + 1}" for i in range(m))
    alphabet = Alphabet(names)
    x = [NCPoly.gen(alphabet, i) for i in range(m)]
    qi = RatQ.q(-1)
    rels = [x[i] * x[j] - (x[j] * x[i]).scale(qi)
            for i in range(m) for j in range(i + 1, m)]
    return AlgebraHandle(Presentation(alphabet, tuple(rels),
                                      MonomialOrder.deglex(m)))


def q_grassmann(n: int, prefix: str = "psi") -> AlgebraHandle:
    """q-Grassmann algebra: psi_i^2 = 0, psi_i psi_j = -q psi_j psi_i (i<j)."""
    names = tuple(f"{prefix}{i + 1}" for i in range(n))
    alphabet = Alphabet(names)
    p = [NCPoly.gen(alphabet, i) for i in range(n)]
    q1 = RatQ.q(1)
    rels = [p[i] * p[i] for i in range(n)]
    rels += [p[i] * p[j] + (p[j] * p[i]).scale(q1)
             for i in range(n) for j in range(i + 1, n)]
    return AlgebraHandle(Presentation(alphabet, tuple(rels),
                                      MonomialOrder.deglex(n)))


def _shift_poly(p: NCPoly, alphabet: Alphabet, offset: int) -> NCPoly:
    return NCPoly(alphabet, {tuple(g + offset for g in w): c
                             for w, c in p.terms.items()})


def tensor_product(a: AlgebraHandle, b: AlgebraHandle) -> AlgebraHandle:
    """Tensor product: union of relations plus commuting cross relations.

    Clashing generator names from the second factor get a deterministic
    numeric suffix.
    """
    a_names = list(a.alphabet.names)
    names = list(a_names)
    for nm in b.alphabet.names:
        new = nm
        k = 2
        while new in names:
            new = f"{nm}_{k}"
            k += 1
        names.append(new)
    alphabet = Alphabet(tuple(names))
    off = len(a_names)
    rels = [r.with_alphabet(alphabet) for r in a.presentation.relations]
    rels += [_shift_poly(r, alphabet, off) for r in b.presentation.relations]
    for i in range(off):
        for j in range(off, len(names)):
            gi = NCPoly.gen(alphabet, i)
            gj = NCPoly.gen(alphabet, j)
            rels.append(gj * gi - gi * gj)
    return AlgebraHandle(Presentation(alphabet, tuple(rels),
                                      MonomialOrder.deglex(len(names))))


def localize(a: AlgebraHandle, elements: Sequence[NCPoly],
             names: Sequence[str]) -> AlgebraHandle:
    """Adjoin a two-sided inverse u_e for each listed element.

    Consistency is the caller's concern: an inconsistent localization shows
    up as 1 reducing to 0, which the proof harness detects and reports.
    """
    if len(elements) != len(names):
        raise ValueError("need one name per inverted element")
    if any(not e for e in elements):
        raise ValueError("cannot invert the zero element")
    alphabet = Alphabet(a.alphabet.names + tuple(names))
    rels = [r.with_alphabet(alphabet) for r in a.presentation.relations]
    one = NCPoly.one(alphabet)
    for i, e in enumerate(elements):
        u = NCPoly.gen(alphabet, len(a.alphabet.names) + i)
        e = e.with_alphabet(alphabet)
        rels.append(u * e - one)
        rels.append(e * u - one)
    return AlgebraHandle(Presentation(alphabet, tuple(rels),
                                      MonomialOrder.deglex(len(alphabet.names))))


def localize_matrix_inverse(a: AlgebraHandle, grid, prefix: str = "Minv",
                            sides: str = "both") -> tuple:
    """Adjoin an n x n matrix inverse for a square grid of entries.

    sides: 'both' adjoins the two-sided unit relations, 'right' only
    grid * inv = 1, 'left' only inv * grid = 1.  Returns (algebra, inv_grid).
    """
    n = len(grid)
    if any(len(row) != n for row in grid):
        raise ValueError("matrix inverse localization needs a square grid")
    name_grid = _grid_names(prefix, n, n)
    flat = tuple(x for row in name_grid for x in row)
    alphabet = Alphabet(a.alphabet.names + flat)
    off = len(a.alphabet.names)
    inv = [[NCPoly.gen(alphabet, off + i * n + j) for j in range(n)]
           for i in range(n)]
    g = [[e.with_alphabet(alphabet) for e in row] for row in grid]
    one = NCPoly.one(alphabet)
    zero = NCPoly.zero(alphabet)
    rels = [r.with_alphabet(alphabet) for r in a.presentation.relations]
    for i in range(n):
        for j in range(n):
            delta = one if i == j else zero
            if sides in ("both", "left"):
                s = zero
                for k in range(n):
                    s = s + inv[i][k] * g[k][j]
                rels.append(s - delta)
            if sides in ("both", "right"):
                s = zero
                for k in range(n):
                    s = s + g[i][k] * inv[k][j]
                rels.append(s - delta)
    handle = AlgebraHandle(Presentation(alphabet, tuple(rels),
                                        MonomialOrder.deglex(len(alphabet.names))))
    return handle, inv


def manin_relation_polys(grid, q_inverse: bool = False) -> list:
    """Residual polynomials whose vanishing says the grid is a q-Manin matrix
    (or q^(-1)-Manin when q_inverse is set)."""
    if not grid or not grid[0]:
        return []
    alphabet = grid[0][0].alphabet
    return [p for p in _manin_polys_for_grid(alphabet, grid,
                                             -1 if q_inverse else +1) if p]


def is_q_manin(grid, algebra: AlgebraHandle, degree: int,
               q_inverse: bool = False) -> ProofResult:
    """Proved iff every 2x2-submatrix relation reduces to 0.

    Inconclusive never claims failure; pair with a concrete representation
    witness to refute.
    """
    polys = manin_relation_polys([[algebra.coerce(e) for e in row] for row in grid],
                                 q_inverse=q_inverse)
    worst = None
    for p in polys:
        res = algebra.is_zero(p, degree)
        if not res.proved:
            worst = res
    if worst is not None:
        return worst
    return ProofResult("Proved", degree)


# ---------------------------------------------------------------------------
# truncated quantum-plane representation
# ---------------------------------------------------------------------------

class SparseOp:
    """Sparse exact operator matrix over RatQ on the truncated plane basis."""

    __slots__ = ("dim", "entries")

    def __init__(self, dim: int, entries: dict | None = None):
        self.dim = dim
        e = {}
        if entries:
            for k, v in entries.items():
                if v:
                    e[k] = v
        self.entries = e

    @staticmethod
    def identity(dim: int) -> "SparseOp":
        return SparseOp(dim, {(i, i): RatQ.one() for i in range(dim)})

    def __bool__(self):
        return bool(self.entries)

    def __eq__(self, other):
        return isinstance(other, SparseOp) and self.dim == other.dim \
            and self.entries == other.entries

    def __add__(self, other: "SparseOp") -> "SparseOp":
        e = dict(self.entries)
        for k, v in other.entries.items():
            s = e.get(k)
            s = v if s is None else s + v
            if s:
                e[k] = s
            elif k in e:
                del e[k]
        return SparseOp(self.dim, e)

    def __neg__(self) -> "SparseOp":
        return SparseOp(self.dim, {k: -v for k, v in self.entries.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "SparseOp") -> "SparseOp":
        by_col: dict = {}
        for (r, c), v in self.entries.items():
            by_col.setdefault(c, []).append((r, v))
        out: dict = {}
        for (k, c), vb in other.entries.items():
            for r, va in by_col.get(k, ()):
                key = (r, c)
                s = out.get(key)
                s = va * vb if s is None else s + va * vb
                if s:
                    out[key] = s
                elif key in out:
                    del out[key]
        return SparseOp(self.dim, out)

    def scale(self, c) -> "SparseOp":
        if isinstance(c, (int, Fraction)):
            c = RatQ.const(c)
        elif isinstance(c, LaurentQ):
            c = RatQ.from_laurent(c)
        if not c:
            return SparseOp(self.dim)
        return SparseOp(self.dim, {k: v * c for k, v in self.entries.items()})

    def column(self, j: int) -> dict:
        return {r: v for (r, c), v in self.entries.items() if c == j}


class QuantumPlaneRep:
    """Operators on C[x, y] with yx = q xy, truncated to total degree <= N.

    Basis monomials are x^a y^b with a + b <= N.  The multiplication
    operators x, y raise total degree by one, so an operator word containing
    r raising letters is exact on the sub-basis a + b <= N - r.
    """

    def __init__(self, truncation: int = 8):
        self.N = truncation
        self.basis = [(a, b) for t in range(truncation + 1)
                      for a in range(t, -1, -1) for b in [t - a]]
        self.index = {m: i for i, m in enumerate(self.basis)}
        d = len(self.basis)
        self.dim = d

        def build(img) -> SparseOp:
            entries = {}
            for j, (a, b) in enumerate(self.basis):
                out = img(a, b)
                if out is None:
                    continue
                (na, nb), coeff = out
                if not coeff:
                    continue
                if na + nb <= truncation:
                    entries[(self.index[(na, nb)], j)] = coeff
            return SparseOp(d, entries)

        self.x = build(lambda a, b: ((a + 1, b), RatQ.one()))
        self.y = build(lambda a, b: ((a, b + 1), RatQ.q(a)))
        self.dx = build(lambda a, b: ((a - 1, b), RatQ.const(a)) if a else None)
        self.dy = build(lambda a, b: ((a, b - 1), RatQ.q(-a, b)) if b else None)
        self.q2ydy = build(lambda a, b: ((a, b), RatQ.q(2 * b)))
        self.q2ydy_inv = build(lambda a, b: ((a, b), RatQ.q(-2 * b)))
        self._raise = {"x": 1, "y": 1, "dx": 0, "dy": 0,
                       "q2ydy": 0, "q2ydy_inv": 0}
        self._ops = {"x": self.x, "y": self.y, "dx": self.dx, "dy": self.dy,
                     "q2ydy": self.q2ydy, "q2ydy_inv": self.q2ydy_inv}

    def operator(self, name: str) -> SparseOp:
        return self._ops[name]

    def raise_amount(self, name: str) -> int:
        return self._raise[name]

    def monomial_index(self, a: int, b: int) -> int:
        return self.index[(a, b)]

    def safe_degree(self, raising: int) -> int:
        return self.N - raising

    def paper_matrix(self) -> list:
        """The 2x2 q-difference-operator q-Manin matrix from the running
        example: rows (x, q^-1 s dy; y, s dx) with s = q^(-2 y dy)."""
        m12 = (self.q2ydy_inv * self.dy).scale(RatQ.q(-1))
        m22 = self.q2ydy_inv * self.dx
        return [[self.x, m12], [self.y, m22]]

    def paper_matrix_raises(self) -> list:
        return [[1, 0], [1, 0]]


@dataclass
class RepValue:
    """eval_in_rep result: exact on basis columns of total degree <= safe."""
    op: SparseOp
    safe: int
    rep: QuantumPlaneRep

    def _safe_cols(self):
        return [j for j, (a, b) in enumerate(self.rep.basis)
                if a + b <= self.safe]

    def equals_on_safe(self, other: "RepValue") -> bool:
        safe = min(self.safe, other.safe)
        if safe < 0:
            raise ValueError("truncation overflow: no safe sub-basis left")
        cols = {j for j, (a, b) in enumerate(self.rep.basis) if a + b <= safe}
        diff = self.op - other.op
        return all(c not in cols for (_, c) in diff.entries)

    def is_zero_on_safe(self) -> bool:
        if self.safe < 0:
            raise ValueError("truncation overflow: no safe sub-basis left")
        cols = {j for j, (a, b) in enumerate(self.rep.basis)
                if a + b <= self.safe}
        return all(c not in cols for (_, c) in self.op.entries)

    def nonzero_witness(self):
        """A matrix entry (input monomial, output monomial, value) that is
        exact and nonzero, or None."""
        if self.safe < 0:
            raise ValueError("truncation overflow: no safe sub-basis left")
        best = None
        for (r, c), v in sorted(self.op.entries.items()):
            a, b = self.rep.basis[c]
            if a + b <= self.safe:
                if best is None or (a + b, c) < best[0]:
                    best = ((a + b, c), (r, c, v))
        if best is None:
            return None
        r, c, v = best[1]
        return {"in_monomial": list(self.rep.basis[c]),
                "out_monomial": list(self.rep.basis[r]),
                "value": v.to_json(),
                "value_str": repr(v)}


def eval_in_rep(p: NCPoly, rep: QuantumPlaneRep, assignment: dict) -> RepValue:
    """Exact operator image of a noncommutative polynomial.

    assignment maps generator name (or id) -> (SparseOp, raising amount).
    Evaluation is restricted to the sub-basis on which no intermediate
    monomial overflows the truncation.
    """
    names = p.alphabet.names

    def lookup(g: int):
        if g in assignment:
            return assignment[g]
        return assignment[names[g]]

    total = SparseOp(rep.dim)
    max_raising = 0
    for w, c in p.terms.items():
        op = SparseOp.identity(rep.dim)
        raising = 0
        for g in w:
            o, r = lookup(g)
            op = op * o
            raising += r
        max_raising = max(max_raising, raising)
        total = total + op.scale(c)
    return RepValue(total, rep.safe_degree(max_raising), rep)


def paper_assignment(rep: QuantumPlaneRep, algebra: AlgebraHandle) -> dict:
    """Bind a 2x2 right-quantum algebra's generators to the paper's operator
    example (row-major)."""
    M = rep.paper_matrix()
    raises = rep.paper_matrix_raises()
    names = algebra.alphabet.names
    if len(names) < 4:
        raise ValueError("expected a 2x2 matrix algebra")
    return {names[0]: (M[0][0], raises[0][0]),
            names[1]: (M[0][1], raises[0][1]),
            names[2]: (M[1][0], raises[1][0]),
            names[3]: (M[1][1], raises[1][1])}
