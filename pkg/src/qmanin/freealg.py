"""Free associative algebra over Q(q) with degree-truncated completion.

Words are tuples of generator ids into an alphabet table.  Rewriting is
deterministic (order-largest reducible word first, leftmost occurrence) and
reduction to zero by oriented consequences of the relations is a sound proof
of ideal membership at any truncation degree; failure to reduce is only ever
reported as inconclusive.
"""

from __future__ import annotations

import hashlib
import heapq
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .scalars import LaurentQ, RatQ

Word = tuple  # tuple[int, ...]

DEFAULT_MONOMIAL_CAP = 10_000_000


class AlphabetMismatch(ValueError):
    pass


class ResourceBudgetExceeded(RuntimeError):
    """Completion exceeded its monomial budget."""


@dataclass(frozen=True)
class Alphabet:
    names: tuple

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ValueError("generator names must be unique")

    def __len__(self):
        return len(self.names)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def extends(self, other: "Alphabet") -> bool:
        return self.names[: len(other.names)] == other.names

    def word_str(self, w: Word) -> str:
        return "*".join(self.names[g] for g in w) if w else "1"


def _check_same(a: Alphabet, b: Alphabet):
    if a.names != b.names:
        raise AlphabetMismatch(f"alphabet mismatch: {a.names} vs {b.names}")


class NCPoly:
    """Sparse linear combination of words with RatQ coefficients."""

    __slots__ = ("alphabet", "terms")

    def __init__(self, alphabet: Alphabet, terms: dict | None = None):
        self.alphabet = alphabet
        t = {}
        if terms:
            for w, c in terms.items():
                if c:
                    t[tuple(w)] = c
        self.terms = t

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero(alphabet: Alphabet) -> "NCPoly":
        return NCPoly(alphabet)

    @staticmethod
    def one(alphabet: Alphabet) -> "NCPoly":
        return NCPoly(alphabet, {(): RatQ.one()})

    @staticmethod
    def gen(alphabet: Alphabet, i: int) -> "NCPoly":
        return NCPoly(alphabet, {(i,): RatQ.one()})

    @staticmethod
    def scalar(alphabet: Alphabet, c) -> "NCPoly":
        if isinstance(c, (int, Fraction)):
            c = RatQ.const(c)
        elif isinstance(c, LaurentQ):
            c = RatQ.from_laurent(c)
        return NCPoly(alphabet, {(): c})

    def with_alphabet(self, alphabet: Alphabet) -> "NCPoly":
        """Reinterpret in a larger alphabet that extends this one."""
        if alphabet.names == self.alphabet.names:
            return self
        if not alphabet.extends(self.alphabet):
            raise AlphabetMismatch("target alphabet does not extend the source")
        out = NCPoly.__new__(NCPoly)
        out.alphabet = alphabet
        out.terms = dict(self.terms)
        return out

    # -- structure ----------------------------------------------------------

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, NCPoly):
            return NotImplemented
        return self.alphabet.names == other.alphabet.names and self.terms == other.terms

    def __hash__(self):
        return hash((self.alphabet.names, frozenset(self.terms.items())))

    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def lead(self, order: "MonomialOrder") -> Word:
        return max(self.terms, key=order.key)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "NCPoly") -> "NCPoly":
        _check_same(self.alphabet, other.alphabet)
        t = dict(self.terms)
        for w, c in other.terms.items():
            s = t.get(w)
            if s is None:
                t[w] = c
            else:
                s = s + c
                if s:
                    t[w] = s
                else:
                    del t[w]
        out = NCPoly.__new__(NCPoly)
        out.alphabet = self.alphabet
        out.terms = t
        return out

    def __neg__(self) -> "NCPoly":
        out = NCPoly.__new__(NCPoly)
        out.alphabet = self.alphabet
        out.terms = {w: -c for w, c in self.terms.items()}
        return out

    def __sub__(self, other: "NCPoly") -> "NCPoly":
        return self + (-other)

    def __mul__(self, other: "NCPoly") -> "NCPoly":
        _check_same(self.alphabet, other.alphabet)
        t: dict = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                s = t.get(w)
                if s is None:
                    t[w] = c1 * c2
                else:
                    s = s + c1 * c2
                    if s:
                        t[w] = s
                    else:
                        del t[w]
        out = NCPoly.__new__(NCPoly)
        out.alphabet = self.alphabet
        out.terms = t
        return out

    def scale(self, c) -> "NCPoly":
        if isinstance(c, (int, Fraction)):
            c = RatQ.const(c)
        elif isinstance(c, LaurentQ):
            c = RatQ.from_laurent(c)
        if not c:
            return NCPoly(self.alphabet)
        out = NCPoly.__new__(NCPoly)
        out.alphabet = self.alphabet
        out.terms = {w: v * c for w, v in self.terms.items()}
        return out

    # -- display / serialization --------------------------------------------

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for w in sorted(self.terms, key=lambda w: (len(w), w)):
            c = self.terms[w]
            ws = self.alphabet.word_str(w)
            parts.append(f"({c!r})*{ws}")
        return " + ".join(parts)

    def to_json(self) -> list:
        items = sorted(self.terms.items(), key=lambda kv: (len(kv[0]), kv[0]))
        return [[c.to_json(), list(w)] for w, c in items]

    @staticmethod
    def from_json(alphabet: Alphabet, data: list) -> "NCPoly":
        return NCPoly(alphabet,
                      {tuple(int(g) for g in w): RatQ.from_json(c) for c, w in data})


def nc_mul(a: NCPoly, b: NCPoly) -> NCPoly:
    """Distributive concatenation product in the free algebra."""
    return a * b


class MonomialOrder:
    """Degree-lexicographic order given by a precedence permutation."""

    __slots__ = ("precedence", "_rank")

    def __init__(self, precedence: Sequence[int]):
        self.precedence = tuple(precedence)
        if sorted(self.precedence) != list(range(len(self.precedence))):
            raise ValueError("precedence must be a permutation of the alphabet")
        rank = [0] * len(self.precedence)
        for r, g in enumerate(self.precedence):
            rank[g] = r
        self._rank = tuple(rank)

    @staticmethod
    def deglex(n: int) -> "MonomialOrder":
        return MonomialOrder(range(n))

    def key(self, w: Word):
        rank = self._rank
        return (len(w), tuple(rank[g] for g in w))

    def less(self, a: Word, b: Word) -> bool:
        return self.key(a) < self.key(b)

    def to_json(self) -> dict:
        return {"kind": "deglex", "precedence": list(self.precedence)}

    @staticmethod
    def from_json(data: dict) -> "MonomialOrder":
        if data.get("kind") != "deglex":
            raise ValueError("only deglex orders are supported")
        return MonomialOrder(data["precedence"])

    def __eq__(self, other):
        return isinstance(other, MonomialOrder) and self.precedence == other.precedence


@dataclass
class RewriteRule:
    lead: Word
    tail: NCPoly  # strictly smaller than lead under the order


class RuleSet:
    """Inter-reduced oriented rewrite rules, the product of truncated completion."""

    def __init__(self, alphabet: Alphabet, order: MonomialOrder,
                 rules: list, completion_degree: int, source_hash: str = ""):
        self.alphabet = alphabet
        self.order = order
        self.rules = sorted(rules, key=lambda r: order.key(r.lead))
        self.completion_degree = completion_degree
        self.source_hash = source_hash
        self._index: dict = {}
        self._unit_rule = None
        for i, r in enumerate(self.rules):
            if not r.lead:
                self._unit_rule = i
                continue
            self._index.setdefault(r.lead[0], []).append((r.lead, i))

    def __len__(self):
        return len(self.rules)

    @property
    def inconsistent(self) -> bool:
        """True when completion derived 1 = 0 (collapsed localization)."""
        return self._unit_rule is not None

    def find_match(self, word: Word):
        """Leftmost (position, rule index) whose lead is a factor of word."""
        if self._unit_rule is not None:
            return 0, self._unit_rule
        idx = self._index
        n = len(word)
        for pos in range(n):
            cands = idx.get(word[pos])
            if not cands:
                continue
            for lead, i in cands:
                L = len(lead)
                if pos + L <= n and word[pos:pos + L] == lead:
                    return pos, i
        return None

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "alphabet": list(self.alphabet.names),
            "order": self.order.to_json(),
            "completion_degree": self.completion_degree,
            "source_hash": self.source_hash,
            "rules": [{"lead": list(r.lead), "tail": r.tail.to_json()}
                      for r in self.rules],
        }

    def serialize(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @staticmethod
    def from_json(data: dict) -> "RuleSet":
        if data.get("schema_version") != 1:
            raise ValueError("unsupported rule-set schema version")
        alphabet = Alphabet(tuple(data["alphabet"]))
        order = MonomialOrder.from_json(data["order"])
        rules = [RewriteRule(tuple(int(g) for g in r["lead"]),
                             NCPoly.from_json(alphabet, r["tail"]))
                 for r in data["rules"]]
        return RuleSet(alphabet, order, rules, int(data["completion_degree"]),
                       data.get("source_hash", ""))


def cache_key(relations: Iterable[NCPoly], order: MonomialOrder, degree: int) -> str:
    payload = {
        "relations": sorted(json.dumps(r.to_json(), sort_keys=True)
                            for r in relations),
        "order": order.to_json(),
        "degree": degree,
    }
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


# ---------------------------------------------------------------------------
# reduction
# ---------------------------------------------------------------------------

def reduce(p: NCPoly, rules: RuleSet, trace: Optional[list] = None,
           _budget: Optional[list] = None) -> NCPoly:
    """Normal form of p: no surviving word contains any rule lead as a factor.

    Deterministic strategy: rewrite the order-largest reducible word at its
    leftmost reducible position.  Terminates because deglex is well-founded.
    """
    order = rules.order
    terms = dict(p.terms)
    heap: list = []
    matches: dict = {}

    def consider(w):
        if w in matches:
            return
        m = rules.find_match(w)
        matches[w] = m
        if m is not None:
            k = order.key(w)
            heapq.heappush(heap, ((-k[0], tuple(-r for r in k[1])), w))

    for w in terms:
        consider(w)

    while heap:
        _, w = heapq.heappop(heap)
        c = terms.get(w)
        if not c:
            continue
        pos, ridx = matches[w]
        rule = rules.rules[ridx]
        if trace is not None:
            trace.append((w, pos, ridx))
        del terms[w]
        u, v = w[:pos], w[pos + len(rule.lead):]
        if _budget is not None:
            _budget[0] -= len(rule.tail.terms)
            if _budget[0] < 0:
                raise ResourceBudgetExceeded(
                    "completion exceeded its stored-monomial budget")
        for tw, tc in rule.tail.terms.items():
            nw = u + tw + v
            s = terms.get(nw)
            s = c * tc if s is None else s + c * tc
            if s:
                terms[nw] = s
                consider(nw)
            elif nw in terms:
                del terms[nw]

    out = NCPoly.__new__(NCPoly)
    out.alphabet = p.alphabet
    out.terms = terms
    return out


def replay_trace(p: NCPoly, rules: RuleSet, trace: list) -> bool:
    """Re-apply a recorded reduction step-by-step and confirm it ends at 0."""
    cur = p
    for w, pos, ridx in trace:
        w = tuple(w)
        rule = rules.rules[ridx]
        if w[pos:pos + len(rule.lead)] != rule.lead:
            return False
        c = cur.terms.get(w)
        if not c:
            return False
        u, v = w[:pos], w[pos + len(rule.lead):]
        lead_poly = NCPoly(cur.alphabet, {w: c})
        repl = NCPoly(cur.alphabet,
                      {u + tw + v: c * tc for tw, tc in rule.tail.terms.items()})
        cur = cur - lead_poly + repl
    return not cur


# ---------------------------------------------------------------------------
# truncated completion
# ---------------------------------------------------------------------------

def _make_rule(p: NCPoly, order: MonomialOrder) -> RewriteRule:
    lead = p.lead(order)
    lc = p.terms[lead]
    tail_terms = {w: -(c / lc) for w, c in p.terms.items() if w != lead}
    return RewriteRule(lead, NCPoly(p.alphabet, tail_terms))


def _rule_poly(r: RewriteRule) -> NCPoly:
    p = NCPoly(r.tail.alphabet, dict(r.tail.terms))
    return NCPoly(p.alphabet, {**{w: -c for w, c in p.terms.items()},
                               r.lead: RatQ.one()})


def _contains_factor(word: Word, factor: Word) -> bool:
    if not factor:
        return True
    n, m = len(word), len(factor)
    first = factor[0]
    for i in range(n - m + 1):
        if word[i] == first and word[i:i + m] == factor:
            return True
    return False


def complete(relations: Sequence[NCPoly], order: MonomialOrder, max_degree: int,
             monomial_cap: int = DEFAULT_MONOMIAL_CAP,
             alphabet: Optional[Alphabet] = None) -> RuleSet:
    """Truncated completion: resolve every overlap critical pair whose
    superposition word has degree <= max_degree.

    The returned set is inter-reduced (containment pairs therefore never
    survive) and deterministic: pairs are processed smallest superposition
    first, and the final set is sorted.  Exceeding the monomial budget raises
    ResourceBudgetExceeded instead of silently truncating.
    """
    relations = [r for r in relations if r]
    if not relations:
        return RuleSet(alphabet if alphabet is not None else Alphabet(()),
                       order, [], max_degree)
    if alphabet is None:
        alphabet = relations[0].alphabet
    for r in relations:
        _check_same(alphabet, r.alphabet)
        if r.degree() > max_degree:
            raise ValueError("max_degree below the degree of a relation")

    budget = [monomial_cap]
    pending: list = []
    seq = 0

    def push(key_word: Word, p: NCPoly):
        nonlocal seq
        k = order.key(key_word)
        heapq.heappush(pending, ((k[0], k[1]), seq, p))
        seq += 1

    for r in sorted(relations, key=lambda p: order.key(p.lead(order))):
        push(r.lead(order), r)

    rules: list = []          # grows; deleted entries become None
    active: list = []         # indices into rules

    def overlaps(i: int, j: int):
        """Push S-polynomials for overlaps of rule i's lead over rule j's lead."""
        L1 = rules[i].lead
        L2 = rules[j].lead
        nonlocal seq
        for k in range(1, min(len(L1), len(L2))):
            if L1[len(L1) - k:] == L2[:k]:
                sup = L1 + L2[k:]
                if len(sup) > max_degree:
                    continue
                s1 = rules[i].tail * NCPoly(alphabet, {L2[k:]: RatQ.one()})
                s2 = NCPoly(alphabet, {L1[:len(L1) - k]: RatQ.one()}) * rules[j].tail
                push(sup, s1 - s2)

    live = RuleSet(alphabet, order, [], max_degree)

    def current_ruleset() -> RuleSet:
        return RuleSet(alphabet, order, [rules[i] for i in active], max_degree)

    while pending:
        _, _, p = heapq.heappop(pending)
        p = reduce(p, live, _budget=budget)
        if not p:
            continue
        lead = p.lead(order)
        if not lead:
            # nonzero scalar in the ideal: the presented algebra collapses
            unit = RewriteRule((), NCPoly.zero(alphabet))
            return RuleSet(alphabet, order, [unit], max_degree)
        new_idx = len(rules)
        rules.append(_make_rule(p, order))
        removed = [i for i in active
                   if _contains_factor(rules[i].lead, lead)]
        for i in removed:
            active.remove(i)
            push(rules[i].lead, _rule_poly(rules[i]))
        active.append(new_idx)
        live = current_ruleset()
        for i in list(active):
            overlaps(i, new_idx)
            if i != new_idx:
                overlaps(new_idx, i)

    # final pass: normalize every tail against the full set
    final = []
    for i in active:
        r = rules[i]
        final.append(RewriteRule(r.lead, reduce(r.tail, live, _budget=budget)))
    return RuleSet(alphabet, order, final, max_degree,
                   source_hash=cache_key(relations, order, max_degree))


# ---------------------------------------------------------------------------
# proof interface
# ---------------------------------------------------------------------------

@dataclass
class ProofResult:
    status: str                 # "Proved" | "Inconclusive"
    completion_degree: int
    trace: list = field(default_factory=list)
    normal_form: Optional[NCPoly] = None

    @property
    def proved(self) -> bool:
        return self.status == "Proved"


def is_zero_mod(p: NCPoly, rules: RuleSet) -> ProofResult:
    """Sound ideal-membership test: Proved iff the normal form is 0.

    A nonzero normal form is reported as Inconclusive carrying the completion
    degree; non-membership is never claimed.
    """
    trace: list = []
    nf = reduce(p.with_alphabet(rules.alphabet), rules, trace=trace)
    if not nf:
        return ProofResult("Proved", rules.completion_degree, trace)
    return ProofResult("Inconclusive", rules.completion_degree, [], nf)
