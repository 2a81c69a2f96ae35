"""Exact coefficient tower: rationals, Laurent polynomials in q, the field
Q(q), and rational functions in the spectral variables z, w over Q(q).

q is a formal parameter throughout; nothing is ever evaluated in floating
point.  All types are immutable value objects in canonical form, so equality
is structural and ``a - b == 0`` iff ``a == b``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Union

Rational = Fraction

_F0 = Fraction(0)
_F1 = Fraction(1)


def sgn(k: int) -> int:
    """Three-valued sign: +1, 0 or -1."""
    if k > 0:
        return 1
    if k < 0:
        return -1
    return 0


class PoleError(ZeroDivisionError):
    """Specialization or division hit a vanishing denominator."""


# ---------------------------------------------------------------------------
# dense polynomials over Fraction (internal, used for gcd in Q[q])
# ---------------------------------------------------------------------------

def _qp_trim(a: list[Fraction]) -> list[Fraction]:
    while a and not a[-1]:
        a.pop()
    return a


def _qp_divmod(a: list[Fraction], b: list[Fraction]):
    q = [_F0] * max(0, len(a) - len(b) + 1)
    r = list(a)
    lb = b[-1]
    while len(r) >= len(b):
        c = r[-1] / lb
        d = len(r) - len(b)
        q[d] = c
        for i, bc in enumerate(b):
            r[i + d] -= c * bc
        _qp_trim(r)
        if not r:
            break
    return _qp_trim(q), r


def _qp_gcd(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a, b = list(a), list(b)
    while b:
        _, a = _qp_divmod(a, b)
        a, b = b, a
    if a:
        lc = a[-1]
        a = [c / lc for c in a]
    return a


def _qp_mul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    if not a or not b:
        return []
    out = [_F0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                if cb:
                    out[i + j] += ca * cb
    return _qp_trim(out)


# ---------------------------------------------------------------------------
# LaurentQ
# ---------------------------------------------------------------------------

class LaurentQ:
    """Sparse Laurent polynomial in q with rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[int, Fraction] | None = None):
        t = {}
        if terms:
            for e, c in terms.items():
                if c:
                    t[e] = Fraction(c)
        self.terms = t

    # -- constructors -------------------------------------------------------

    @staticmethod
    def const(c) -> "LaurentQ":
        c = Fraction(c)
        return LaurentQ({0: c} if c else {})

    @staticmethod
    def q(exp: int = 1, coeff=1) -> "LaurentQ":
        return LaurentQ({exp: Fraction(coeff)})

    @staticmethod
    def zero() -> "LaurentQ":
        return LaurentQ()

    @staticmethod
    def one() -> "LaurentQ":
        return LaurentQ({0: _F1})

    # -- structure ----------------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentQ):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def min_exp(self) -> int:
        return min(self.terms)

    def max_exp(self) -> int:
        return max(self.terms)

    def is_const(self) -> bool:
        return not self.terms or self.terms.keys() == {0}

    def const_value(self) -> Fraction:
        if not self.terms:
            return _F0
        if self.terms.keys() != {0}:
            raise ValueError("not a constant Laurent polynomial")
        return self.terms[0]

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "LaurentQ") -> "LaurentQ":
        t = dict(self.terms)
        for e, c in other.terms.items():
            s = t.get(e)
            if s is None:
                t[e] = c
            else:
                s = s + c
                if s:
                    t[e] = s
                else:
                    del t[e]
        out = LaurentQ.__new__(LaurentQ)
        out.terms = t
        return out

    def __neg__(self) -> "LaurentQ":
        out = LaurentQ.__new__(LaurentQ)
        out.terms = {e: -c for e, c in self.terms.items()}
        return out

    def __sub__(self, other: "LaurentQ") -> "LaurentQ":
        return self + (-other)

    def __mul__(self, other: "LaurentQ") -> "LaurentQ":
        t: dict[int, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                s = t.get(e)
                if s is None:
                    t[e] = c1 * c2
                else:
                    s = s + c1 * c2
                    if s:
                        t[e] = s
                    else:
                        del t[e]
        out = LaurentQ.__new__(LaurentQ)
        out.terms = t
        return out

    def scale(self, c) -> "LaurentQ":
        c = Fraction(c)
        if not c:
            return LaurentQ()
        out = LaurentQ.__new__(LaurentQ)
        out.terms = {e: v * c for e, v in self.terms.items()}
        return out

    def __pow__(self, n: int) -> "LaurentQ":
        if len(self.terms) == 1:
            ((e, c),) = self.terms.items()
            return LaurentQ({e * n: c**n})
        if n < 0:
            raise ValueError("negative power of a non-monomial Laurent polynomial")
        out = LaurentQ.one()
        for _ in range(n):
            out = out * self
        return out

    # -- conversions --------------------------------------------------------

    def as_poly(self) -> tuple[int, list[Fraction]]:
        """Return (shift, dense coefficients) with the constant term nonzero."""
        if not self.terms:
            return 0, []
        lo = self.min_exp()
        hi = self.max_exp()
        dense = [_F0] * (hi - lo + 1)
        for e, c in self.terms.items():
            dense[e - lo] = c
        return lo, dense

    @staticmethod
    def from_poly(shift: int, dense: list[Fraction]) -> "LaurentQ":
        return LaurentQ({shift + i: c for i, c in enumerate(dense) if c})

    def subs_q(self, value: Fraction) -> Fraction:
        value = Fraction(value)
        if value == 0 and self.terms and self.min_exp() < 0:
            raise PoleError("q -> 0 hits a negative power of q")
        acc = _F0
        for e, c in self.terms.items():
            acc += c * value**e
        return acc

    # -- display ------------------------------------------------------------

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms):
            c = self.terms[e]
            if e == 0:
                parts.append(str(c))
            elif e == 1:
                parts.append(f"{c}*q" if c != 1 else "q")
            else:
                parts.append(f"{c}*q^{e}" if c != 1 else f"q^{e}")
        return " + ".join(parts)

    def to_json(self) -> list:
        return [[e, self.terms[e].numerator, self.terms[e].denominator]
                for e in sorted(self.terms)]

    @staticmethod
    def from_json(data: Iterable) -> "LaurentQ":
        return LaurentQ({int(e): Fraction(int(n), int(d)) for e, n, d in data})


# ---------------------------------------------------------------------------
# RatQ = fraction field of LaurentQ, i.e. Q(q)
# ---------------------------------------------------------------------------

class RatQ:
    """Element of Q(q) as a canonical fraction of Laurent polynomials.

    Canonical form: the denominator is an honest polynomial in q with nonzero
    constant term and leading coefficient 1; numerator and denominator have
    trivial polynomial gcd once the numerator's Laurent shift is cleared.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: LaurentQ, den: LaurentQ):
        if not den:
            raise ZeroDivisionError("zero denominator in Q(q)")
        if not num:
            self.num = LaurentQ()
            self.den = LaurentQ.one()
            return
        if len(den.terms) == 1:
            # monomial denominator: fold it into the numerator
            ((e, c),) = den.terms.items()
            out = LaurentQ.__new__(LaurentQ)
            out.terms = {k - e: v / c for k, v in num.terms.items()}
            self.num = out
            self.den = LaurentQ.one()
            return
        a, n = num.as_poly()
        b, d = den.as_poly()
        g = _qp_gcd(n, d)
        if len(g) > 1:
            n, _ = _qp_divmod(n, g)
            d, _ = _qp_divmod(d, g)
        lc = d[-1]
        if lc != 1:
            n = [c / lc for c in n]
            d = [c / lc for c in d]
        self.num = LaurentQ.from_poly(a - b, n)
        self.den = LaurentQ.from_poly(0, d)

    # -- constructors -------------------------------------------------------

    @staticmethod
    def from_laurent(p: LaurentQ) -> "RatQ":
        out = RatQ.__new__(RatQ)
        out.num = p
        out.den = LaurentQ.one()
        return out

    @staticmethod
    def const(c) -> "RatQ":
        return RatQ.from_laurent(LaurentQ.const(c))

    @staticmethod
    def q(exp: int = 1, coeff=1) -> "RatQ":
        return RatQ.from_laurent(LaurentQ.q(exp, coeff))

    @staticmethod
    def zero() -> "RatQ":
        return RatQ.from_laurent(LaurentQ.zero())

    @staticmethod
    def one() -> "RatQ":
        return RatQ.from_laurent(LaurentQ.one())

    # -- structure ----------------------------------------------------------

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, other):
        if not isinstance(other, RatQ):
            if isinstance(other, (int, Fraction)):
                other = RatQ.const(other)
            else:
                return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def is_one(self) -> bool:
        return self.den.is_const() and self.num.terms == {0: _F1}

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "RatQ") -> "RatQ":
        if not isinstance(other, RatQ):
            return NotImplemented
        if self.den == other.den:
            return RatQ(self.num + other.num, self.den)
        return RatQ(self.num * other.den + other.num * self.den,
                    self.den * other.den)

    def __sub__(self, other: "RatQ") -> "RatQ":
        return self + (-other)

    def __neg__(self) -> "RatQ":
        out = RatQ.__new__(RatQ)
        out.num = -self.num
        out.den = self.den
        return out

    def __mul__(self, other: "RatQ") -> "RatQ":
        if not isinstance(other, RatQ):
            return NotImplemented
        if self.den.is_const() and other.den.is_const():
            out = RatQ.__new__(RatQ)
            out.num = self.num * other.num
            out.den = LaurentQ.one()
            return out
        return RatQ(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "RatQ") -> "RatQ":
        if not other:
            raise ZeroDivisionError("division by the zero scalar")
        return RatQ(self.num * other.den, self.den * other.num)

    def inverse(self) -> "RatQ":
        if not self:
            raise ZeroDivisionError("division by the zero scalar")
        return RatQ(self.den, self.num)

    def __pow__(self, n: int) -> "RatQ":
        base = self if n >= 0 else self.inverse()
        out = RatQ.one()
        for _ in range(abs(n)):
            out = out * base
        return out

    def scale(self, c) -> "RatQ":
        if isinstance(c, LaurentQ):
            return self * RatQ.from_laurent(c)
        if isinstance(c, RatQ):
            return self * c
        out = RatQ.__new__(RatQ)
        out.num = self.num.scale(c)
        out.den = self.den if out.num else LaurentQ.one()
        return out

    # -- specialization -----------------------------------------------------

    def subs_q(self, value) -> Fraction:
        value = Fraction(value)
        if value == 0:
            raise PoleError("q must be specialized to a nonzero rational")
        d = self.den.subs_q(value)
        if d == 0:
            raise PoleError(f"denominator vanishes at q = {value}")
        return self.num.subs_q(value) / d

    # -- display ------------------------------------------------------------

    def __repr__(self):
        if self.den.is_const():
            return repr(self.num)
        return f"({self.num!r})/({self.den!r})"

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @staticmethod
    def from_json(data: dict) -> "RatQ":
        out = RatQ.__new__(RatQ)
        out.num = LaurentQ.from_json(data["num"])
        out.den = LaurentQ.from_json(data["den"])
        return out


# ---------------------------------------------------------------------------
# bivariate polynomials in z, w over RatQ (internal to RatZW)
# ---------------------------------------------------------------------------

PolyZW = dict  # (ez, ew) -> RatQ


def pzw_const(c: RatQ) -> PolyZW:
    return {(0, 0): c} if c else {}


def pzw_add(a: PolyZW, b: PolyZW) -> PolyZW:
    out = dict(a)
    for k, c in b.items():
        s = out.get(k)
        if s is None:
            out[k] = c
        else:
            s = s + c
            if s:
                out[k] = s
            else:
                del out[k]
    return out


def pzw_neg(a: PolyZW) -> PolyZW:
    return {k: -c for k, c in a.items()}


def pzw_mul(a: PolyZW, b: PolyZW) -> PolyZW:
    out: PolyZW = {}
    for (e1, f1), c1 in a.items():
        for (e2, f2), c2 in b.items():
            k = (e1 + e2, f1 + f2)
            s = out.get(k)
            if s is None:
                out[k] = c1 * c2
            else:
                s = s + c1 * c2
                if s:
                    out[k] = s
                else:
                    del out[k]
    return out


def pzw_scale(a: PolyZW, c: RatQ) -> PolyZW:
    if not c:
        return {}
    return {k: v * c for k, v in a.items()}


def _pzw_lead_key(a: PolyZW):
    return max(a, key=lambda k: (k[0] + k[1], k[0]))


# dense z-polynomials over the field RatQ

def _zp_trim(a):
    while a and not a[-1]:
        a.pop()
    return a


def _zp_divmod(a, b):
    q = [RatQ.zero()] * max(0, len(a) - len(b) + 1)
    r = list(a)
    lb = b[-1]
    while len(r) >= len(b):
        c = r[-1] / lb
        d = len(r) - len(b)
        q[d] = c
        for i, bc in enumerate(b):
            r[i + d] = r[i + d] - c * bc
        _zp_trim(r)
        if not r:
            break
    return _zp_trim(q), r


def _zp_gcd(a, b):
    a, b = list(a), list(b)
    while b:
        _, a = _zp_divmod(a, b)
        a, b = b, a
    if a:
        lc = a[-1]
        a = [c / lc for c in a]
    return a


def _zp_mul(a, b):
    if not a or not b:
        return []
    out = [RatQ.zero()] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                if cb:
                    out[i + j] = out[i + j] + ca * cb
    return _zp_trim(out)


def _zp_scale(a, c):
    return _zp_trim([x * c for x in a])


def _to_wz(a: PolyZW):
    """PolyZW -> dense list over w of dense z-polys."""
    if not a:
        return []
    dw = max(k[1] for k in a)
    dz = max(k[0] for k in a)
    out = [[RatQ.zero()] * (dz + 1) for _ in range(dw + 1)]
    for (ez, ew), c in a.items():
        out[ew][ez] = c
    return [_zp_trim(p) for p in out]


def _from_wz(rows) -> PolyZW:
    out: PolyZW = {}
    for ew, p in enumerate(rows):
        for ez, c in enumerate(p):
            if c:
                out[(ez, ew)] = c
    return out


def _wz_trim(rows):
    while rows and not rows[-1]:
        rows.pop()
    return rows


def _wz_content(rows):
    g: list = []
    for p in rows:
        if p:
            g = _zp_gcd(g, p) if g else [c / p[-1] for c in p]
            if len(g) == 1:
                return g
    return g


def _wz_primitive(rows):
    g = _wz_content(rows)
    if len(g) <= 1:
        return [list(p) for p in rows], g
    return [_zp_divmod(p, g)[0] if p else [] for p in rows], g


def _wz_scale_zp(rows, g):
    return [_zp_mul(p, g) if p else [] for p in rows]


def _wz_pseudo_rem(a, b):
    """Pseudo-remainder of a by b as polynomials in w over RatQ[z]."""
    r = [list(p) for p in a]
    lb = b[-1]
    while len(r) >= len(b):
        lr = r[-1]
        # r <- lb * r - lr * w^(dr-db) * b
        d = len(r) - len(b)
        r = _wz_scale_zp(r, lb)
        for i, bp in enumerate(b):
            sub = _zp_mul(lr, bp)
            row = r[i + d]
            m = max(len(row), len(sub))
            row = row + [RatQ.zero()] * (m - len(row))
            for j, c in enumerate(sub):
                row[j] = row[j] - c
            r[i + d] = _zp_trim(row)
        _wz_trim(r)
        if not r:
            break
    return r


def pzw_gcd(a: PolyZW, b: PolyZW) -> PolyZW:
    """gcd in Q(q)[z, w], normalized monic at the graded-lex leading term."""
    if a and b:
        # constants and disjoint variable supports force a trivial gcd
        if len(a) == 1 and (0, 0) in a or len(b) == 1 and (0, 0) in b:
            return pzw_const(RatQ.one())
        az = any(k[0] for k in a)
        aw = any(k[1] for k in a)
        bz = any(k[0] for k in b)
        bw = any(k[1] for k in b)
        if not ((az and bz) or (aw and bw)):
            return pzw_const(RatQ.one())
    if not a:
        g = dict(b)
    elif not b:
        g = dict(a)
    else:
        ra, rb = _to_wz(a), _to_wz(b)
        if len(ra) == 1 and len(rb) == 1:
            # both univariate in z
            g = _from_wz([_zp_gcd(ra[0], rb[0])])
        else:
            pa, ca = _wz_primitive(ra)
            pb, cb = _wz_primitive(rb)
            gc = _zp_gcd(ca, cb) if (len(ca) > 1 or len(cb) > 1) else [RatQ.one()]
            if len(pa) < len(pb):
                pa, pb = pb, pa
            while pb:
                r = _wz_pseudo_rem(pa, pb)
                r, _ = _wz_primitive(r) if r else (r, [])
                pa, pb = pb, r
            g = _from_wz(_wz_scale_zp(pa, gc))
    if not g:
        return g
    lc = g[_pzw_lead_key(g)]
    if not lc.is_one():
        g = pzw_scale(g, lc.inverse())
    return g


def pzw_divexact(a: PolyZW, b: PolyZW) -> PolyZW:
    """Exact division a / b in Q(q)[z, w]; b must divide a."""
    if not a:
        return {}
    ra, rb = _to_wz(a), _to_wz(b)
    if len(rb) == 1:
        out = []
        for p in ra:
            qt, rem = _zp_divmod(p, rb[0]) if p else ([], [])
            if rem:
                raise ArithmeticError("inexact polynomial division")
            out.append(qt)
        return _from_wz(out)
    # division in (RatQ[z])[w]; exactness guaranteed by the caller
    quot = [[] for _ in range(len(ra) - len(rb) + 1)]
    r = [list(p) for p in ra]
    lb = rb[-1]
    while r and len(r) >= len(rb):
        d = len(r) - len(rb)
        qz, rem = _zp_divmod(r[-1], lb)
        if rem:
            raise ArithmeticError("inexact polynomial division")
        quot[d] = qz
        for i, bp in enumerate(rb):
            sub = _zp_mul(qz, bp)
            row = r[i + d]
            m = max(len(row), len(sub))
            row = row + [RatQ.zero()] * (m - len(row))
            for j, c in enumerate(sub):
                row[j] = row[j] - c
            r[i + d] = _zp_trim(row)
        _wz_trim(r)
    if r:
        raise ArithmeticError("inexact polynomial division")
    return _from_wz(quot)


# ---------------------------------------------------------------------------
# RatZW
# ---------------------------------------------------------------------------

def _pzw_is_one(p: PolyZW) -> bool:
    if len(p) != 1:
        return False
    c = p.get((0, 0))
    return c is not None and c.is_one()


class RatZW:
    """Rational function in the spectral variables z, w over Q(q).

    Canonical form: gcd(num, den) = 1 and den is monic at its graded-lex
    leading term.  Arithmetic uses cross-cancellation so the expensive
    bivariate gcds stay on small operands.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: PolyZW, den: PolyZW):
        if not den:
            raise ZeroDivisionError("zero denominator in Q(q)(z, w)")
        if not num:
            self.num = {}
            self.den = pzw_const(RatQ.one())
            return
        if len(den) == 1 and (0, 0) in den:
            c = den[(0, 0)]
            if not c.is_one():
                num = pzw_scale(num, c.inverse())
            self.num = num
            self.den = pzw_const(RatQ.one())
            return
        g = pzw_gcd(num, den)
        if len(g) > 1 or (g and _pzw_lead_key(g) != (0, 0)):
            num = pzw_divexact(num, g)
            den = pzw_divexact(den, g)
        lc = den[_pzw_lead_key(den)]
        if not lc.is_one():
            inv = lc.inverse()
            num = pzw_scale(num, inv)
            den = pzw_scale(den, inv)
        self.num = num
        self.den = den

    @staticmethod
    def _trusted(num: PolyZW, den: PolyZW) -> "RatZW":
        """Build from a fraction already known reduced; only renormalizes the
        denominator to be monic (or folds a constant denominator away)."""
        out = RatZW.__new__(RatZW)
        if not num:
            out.num = {}
            out.den = pzw_const(RatQ.one())
            return out
        if len(den) == 1 and (0, 0) in den:
            c = den[(0, 0)]
            if not c.is_one():
                num = pzw_scale(num, c.inverse())
            out.num = num
            out.den = pzw_const(RatQ.one())
            return out
        lc = den[_pzw_lead_key(den)]
        if not lc.is_one():
            inv = lc.inverse()
            num = pzw_scale(num, inv)
            den = pzw_scale(den, inv)
        out.num = num
        out.den = den
        return out

    # -- constructors -------------------------------------------------------

    @staticmethod
    def from_ratq(c: RatQ) -> "RatZW":
        out = RatZW.__new__(RatZW)
        out.num = pzw_const(c)
        out.den = pzw_const(RatQ.one())
        return out

    @staticmethod
    def const(c) -> "RatZW":
        return RatZW.from_ratq(RatQ.const(c))

    @staticmethod
    def zero() -> "RatZW":
        return RatZW.from_ratq(RatQ.zero())

    @staticmethod
    def one() -> "RatZW":
        return RatZW.from_ratq(RatQ.one())

    @staticmethod
    def q(exp: int = 1, coeff=1) -> "RatZW":
        return RatZW.from_ratq(RatQ.q(exp, coeff))

    @staticmethod
    def var(name: str, coeff: RatQ | None = None) -> "RatZW":
        if name not in ("z", "w"):
            raise ValueError("spectral variable must be z or w")
        c = coeff if coeff is not None else RatQ.one()
        out = RatZW.__new__(RatZW)
        out.num = {(1, 0) if name == "z" else (0, 1): c} if c else {}
        out.den = pzw_const(RatQ.one())
        return out

    # -- structure ----------------------------------------------------------

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, other):
        if not isinstance(other, RatZW):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((frozenset(self.num.items()), frozenset(self.den.items())))

    def is_one(self) -> bool:
        return self.num == {(0, 0): RatQ.one()} and self.den == {(0, 0): RatQ.one()}

    def as_ratq(self) -> RatQ:
        if any(k != (0, 0) for k in self.num) or any(k != (0, 0) for k in self.den):
            raise ValueError("not free of z and w")
        n = self.num.get((0, 0), RatQ.zero())
        d = self.den[(0, 0)]
        return n / d

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "RatZW") -> "RatZW":
        if not isinstance(other, RatZW):
            return NotImplemented
        if not self.num:
            return other
        if not other.num:
            return self
        d1_triv = _pzw_is_one(self.den)
        d2_triv = _pzw_is_one(other.den)
        if d1_triv and d2_triv:
            return RatZW._trusted(pzw_add(self.num, other.num),
                                  pzw_const(RatQ.one()))
        if self.den == other.den:
            num = pzw_add(self.num, other.num)
            if not num:
                return RatZW._trusted({}, pzw_const(RatQ.one()))
            g = pzw_gcd(num, self.den)
            if len(g) > 1 or (g and _pzw_lead_key(g) != (0, 0)):
                return RatZW._trusted(pzw_divexact(num, g),
                                      pzw_divexact(self.den, g))
            return RatZW._trusted(num, self.den)
        # Henrici: cancel only against g = gcd(d1, d2)
        g = pzw_gcd(self.den, other.den)
        if _pzw_is_one(g):
            num = pzw_add(pzw_mul(self.num, other.den),
                          pzw_mul(other.num, self.den))
            return RatZW._trusted(num, pzw_mul(self.den, other.den))
        d1g = pzw_divexact(self.den, g)
        d2g = pzw_divexact(other.den, g)
        t = pzw_add(pzw_mul(self.num, d2g), pzw_mul(other.num, d1g))
        if not t:
            return RatZW._trusted({}, pzw_const(RatQ.one()))
        h = pzw_gcd(t, g)
        if _pzw_is_one(h):
            return RatZW._trusted(t, pzw_mul(pzw_mul(d1g, g), d2g))
        return RatZW._trusted(pzw_divexact(t, h),
                              pzw_mul(pzw_mul(d1g, pzw_divexact(g, h)), d2g))

    def __sub__(self, other: "RatZW") -> "RatZW":
        return self + (-other)

    def __neg__(self) -> "RatZW":
        out = RatZW.__new__(RatZW)
        out.num = pzw_neg(self.num)
        out.den = self.den
        return out

    def __mul__(self, other: "RatZW") -> "RatZW":
        if not isinstance(other, RatZW):
            return NotImplemented
        if not self.num or not other.num:
            return RatZW._trusted({}, pzw_const(RatQ.one()))
        n1, d1 = self.num, self.den
        n2, d2 = other.num, other.den
        if not _pzw_is_one(d2):
            g = pzw_gcd(n1, d2)
            if not _pzw_is_one(g):
                n1 = pzw_divexact(n1, g)
                d2 = pzw_divexact(d2, g)
        if not _pzw_is_one(d1):
            g = pzw_gcd(n2, d1)
            if not _pzw_is_one(g):
                n2 = pzw_divexact(n2, g)
                d1 = pzw_divexact(d1, g)
        return RatZW._trusted(pzw_mul(n1, n2), pzw_mul(d1, d2))

    def __truediv__(self, other: "RatZW") -> "RatZW":
        if not other:
            raise ZeroDivisionError("division by the zero scalar")
        return self * other.inverse()

    def inverse(self) -> "RatZW":
        if not self:
            raise ZeroDivisionError("division by the zero scalar")
        return RatZW._trusted(self.den, self.num)

    def scale(self, c) -> "RatZW":
        if isinstance(c, (int, Fraction)):
            c = RatQ.const(c)
        elif isinstance(c, LaurentQ):
            c = RatQ.from_laurent(c)
        elif isinstance(c, RatZW):
            return self * c
        out = RatZW.__new__(RatZW)
        out.num = pzw_scale(self.num, c)
        out.den = self.den if out.num else pzw_const(RatQ.one())
        return out

    # -- substitutions ------------------------------------------------------

    def shift(self, variable: str, steps: int) -> "RatZW":
        """Replace z by q^(2*steps) z (resp. w), exactly.

        This is a ring automorphism, so the reduced fraction stays reduced.
        """
        if steps == 0:
            return self
        idx = 0 if variable == "z" else 1
        qs = RatQ.q(2 * steps)

        def sub(p: PolyZW) -> PolyZW:
            return {k: c * qs**k[idx] for k, c in p.items()}

        return RatZW._trusted(sub(self.num), sub(self.den))

    def subs_var(self, variable: str, value: RatQ) -> "RatZW":
        """Substitute a Q(q) value for z or w; raises on a pole."""
        idx = 0 if variable == "z" else 1

        def sub(p: PolyZW) -> PolyZW:
            out: PolyZW = {}
            for k, c in p.items():
                nk = (0, k[1]) if idx == 0 else (k[0], 0)
                v = c * value**k[idx]
                s = out.get(nk)
                s = v if s is None else s + v
                if s:
                    out[nk] = s
                elif nk in out:
                    del out[nk]
            return out

        den = sub(self.den)
        if not den:
            raise PoleError(f"pole at {variable} = {value!r}")
        return RatZW(sub(self.num), den)

    def swap_zw(self) -> "RatZW":
        """Exchange the two spectral variables (a ring automorphism)."""

        def sub(p: PolyZW) -> PolyZW:
            return {(k[1], k[0]): c for k, c in p.items()}

        return RatZW._trusted(sub(self.num), sub(self.den))

    def subs_q(self, value) -> "RatZW":
        value = Fraction(value)

        def sub(p: PolyZW) -> PolyZW:
            out: PolyZW = {}
            for k, c in p.items():
                v = RatQ.const(c.subs_q(value))
                if v:
                    out[k] = v
            return out

        den = sub(self.den)
        if not den:
            raise PoleError(f"denominator vanishes at q = {value}")
        return RatZW(sub(self.num), den)

    # -- display ------------------------------------------------------------

    def __repr__(self):
        def fmt(p: PolyZW) -> str:
            if not p:
                return "0"
            parts = []
            for k in sorted(p, key=lambda k: (k[0] + k[1], k[0])):
                c = p[k]
                mon = ""
                if k[0] > 0:
                    mon += f"z^{k[0]}" if k[0] > 1 else "z"
                if k[1] > 0:
                    mon += ("*" if mon else "") + (f"w^{k[1]}" if k[1] > 1 else "w")
                cs = f"({c!r})"
                parts.append(cs + ("*" + mon if mon else ""))
            return " + ".join(parts)

        if self.den == {(0, 0): RatQ.one()}:
            return fmt(self.num)
        return f"[{fmt(self.num)}] / [{fmt(self.den)}]"

    def to_json(self) -> dict:
        def enc(p: PolyZW):
            return [[k[0], k[1], p[k].to_json()]
                    for k in sorted(p, key=lambda k: (k[0] + k[1], k[0], k[1]))]
        return {"num": enc(self.num), "den": enc(self.den)}

    @staticmethod
    def from_json(data: dict) -> "RatZW":
        def dec(items) -> PolyZW:
            return {(int(ez), int(ew)): RatQ.from_json(c) for ez, ew, c in items}
        out = RatZW.__new__(RatZW)
        out.num = dec(data["num"])
        out.den = dec(data["den"])
        return out


Scalar = Union[Fraction, LaurentQ, RatQ, RatZW]

_LEVEL = {Fraction: 0, int: 0, LaurentQ: 1, RatQ: 2, RatZW: 3}


def lift(x: Scalar, level: int) -> Scalar:
    """Coerce upward along Rational -> LaurentQ -> RatQ -> RatZW."""
    cur = _LEVEL[type(x)]
    if cur > level:
        raise TypeError("cannot coerce a scalar downward")
    if cur == 0 and level >= 1:
        x = LaurentQ.const(x)
        cur = 1
    if cur == 1 and level >= 2:
        x = RatQ.from_laurent(x)
        cur = 2
    if cur == 2 and level >= 3:
        x = RatZW.from_ratq(x)
    return x


def scalar_arith(a: Scalar, b: Scalar, op: str) -> Scalar:
    """Exact arithmetic with automatic upward coercion in the tower."""
    level = max(_LEVEL[type(a)], _LEVEL[type(b)])
    if op == "div" and level < 2:
        level = 2
    a = lift(a, level)
    b = lift(b, level)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def substitute_q(x: Scalar, value) -> Union[Fraction, RatZW]:
    """Specialize the formal parameter q to a nonzero rational, exactly."""
    value = Fraction(value)
    if value == 0:
        raise PoleError("q must be specialized to a nonzero rational")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, LaurentQ):
        return x.subs_q(value)
    if isinstance(x, RatQ):
        return x.subs_q(value)
    if isinstance(x, RatZW):
        return x.subs_q(value)
    raise TypeError(f"not a scalar: {x!r}")


def shift_z(f: RatZW, variable: str, steps: int) -> RatZW:
    """z -> q^(2k) z (or w -> q^(2k) w) throughout, canonicalized."""
    if variable not in ("z", "w"):
        raise ValueError("spectral variable must be z or w")
    return f.shift(variable, steps)
