"""Noncommutative polynomials and quadratic rewrite systems.

Words are tuples of generator names.  A :class:`RewriteSystem` rewrites a
descending adjacent pair ``YX`` (``Y > X`` in the generator order) into a
combination of smaller words in the degree-lexicographic order, so every
reduction sequence terminates.  For such systems confluence is decided by the
overlaps of length three.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .errors import ContextMismatch, InvalidInput, InvalidRule
from .scalar import DEFAULT, Context, MultiPoly, RationalFunction

__all__ = [
    "NCPoly",
    "RewriteSystem",
    "normal_form",
    "resolve_ambiguity",
    "ambiguity_defect",
    "overlap_words",
    "is_confluent",
    "count_normal_monomials",
    "system_from_relations",
    "tilde_system",
    "tilde_system_derived",
    "original_system",
    "TILDE_ORDER",
    "ORIGINAL_ORDER",
]

Word = tuple


class NCPoly:
    """Finite sum of words with commutative rational-function coefficients."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: Context, terms: Mapping[Word, RationalFunction] | None = None):
        self.ctx = ctx
        self.terms = {tuple(w): c for w, c in (terms or {}).items() if not c.is_zero()}

    @classmethod
    def gen(cls, name: str, ctx: Context = DEFAULT) -> NCPoly:
        return cls(ctx, {(name,): ctx.one()})

    @classmethod
    def gens(cls, names: Iterable[str], ctx: Context = DEFAULT) -> tuple[NCPoly, ...]:
        return tuple(cls.gen(n, ctx) for n in names)

    @classmethod
    def scalar(cls, c, ctx: Context = DEFAULT) -> NCPoly:
        c = c if isinstance(c, RationalFunction) else ctx.const(0)._coerce(c)
        return cls(ctx, {(): c})

    @classmethod
    def word(cls, w: Sequence[str], coeff=1, ctx: Context = DEFAULT) -> NCPoly:
        c = coeff if isinstance(coeff, RationalFunction) else ctx.const(0)._coerce(coeff)
        return cls(ctx, {tuple(w): c})

    def _like(self, terms) -> NCPoly:
        out = NCPoly.__new__(NCPoly)
        out.ctx, out.terms = self.ctx, terms
        return out

    def _coerce(self, other) -> NCPoly:
        if isinstance(other, NCPoly):
            if other.ctx != self.ctx:
                raise ContextMismatch("NCPoly values over different contexts")
            return other
        if isinstance(other, (int, Fraction, MultiPoly, RationalFunction)):
            c = other if isinstance(other, RationalFunction) else self.ctx.const(0)._coerce(other)
            return self._like({(): c} if not c.is_zero() else {})
        raise TypeError(f"cannot combine NCPoly with {type(other).__name__}")

    # structure
    def is_zero(self) -> bool:
        return not self.terms

    def is_scalar(self) -> bool:
        return all(not w for w in self.terms)

    def scalar_part(self) -> RationalFunction:
        return self.terms.get((), self.ctx.zero())

    def coeff(self, word: Sequence[str]) -> RationalFunction:
        return self.terms.get(tuple(word), self.ctx.zero())

    def words(self) -> list[Word]:
        return list(self.terms)

    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=-1)

    def letters(self) -> set[str]:
        return {s for w in self.terms for s in w}

    def denominators(self):
        return [c.den for c in self.terms.values()]

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self.terms == other.terms

    __hash__ = None

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for w in sorted(self.terms, key=lambda w: (len(w), w)):
            c = self.terms[w]
            body = "*".join(w) if w else "1"
            parts.append(f"({c})*{body}" if w else f"({c})")
        return " + ".join(parts)

    # arithmetic
    def __neg__(self):
        return self._like({w: -c for w, c in self.terms.items()})

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self.terms)
        for w, c in other.terms.items():
            s = out[w] + c if w in out else c
            if s.is_zero():
                out.pop(w, None)
            else:
                out[w] = s
        return self._like(out)

    __radd__ = __add__

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, s) -> NCPoly:
        if isinstance(s, (int, Fraction)):
            if s == 0:
                return self._like({})
            return self._like({w: c * s for w, c in self.terms.items()})
        s = self.ctx.const(0)._coerce(s)
        if s.is_zero():
            return self._like({})
        return self._like({w: s * c for w, c in self.terms.items() if not (s * c).is_zero()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, MultiPoly, RationalFunction)):
            return self.scale(other)
        if not isinstance(other, NCPoly):
            return NotImplemented
        other = self._coerce(other)
        out: dict[Word, RationalFunction] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                t = c1 * c2
                out[w] = out[w] + t if w in out else t
        return self._like({w: c for w, c in out.items() if not c.is_zero()})

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, MultiPoly, RationalFunction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int):
        out = self._coerce(1)
        for _ in range(n):
            out = out * self
        return out

    def commutator(self, other) -> NCPoly:
        other = self._coerce(other)
        return self * other - other * self

    def anticommutator(self, other) -> NCPoly:
        other = self._coerce(other)
        return self * other + other * self

    # coefficient maps
    def map_coeffs(self, fn) -> NCPoly:
        out = {}
        for w, c in self.terms.items():
            c2 = fn(c)
            if not c2.is_zero():
                out[w] = c2
        return self._like(out)

    def subs(self, name: str, expr) -> NCPoly:
        return self.map_coeffs(lambda c: c.subs(name, expr))

    def subs_values(self, assignment) -> NCPoly:
        return self.map_coeffs(lambda c: c.subs_values(assignment))

    def substitute_generators(self, images: Mapping[str, NCPoly]) -> NCPoly:
        """Algebra map sending each generator to ``images[name]`` (others fixed)."""
        out = self._like({})
        for w, c in self.terms.items():
            acc = self._coerce(c)
            for s in w:
                acc = acc * (images[s] if s in images else NCPoly.gen(s, self.ctx))
            out = out + acc
        return out

    def to_json(self) -> list:
        return [{"word": list(w), "coeff": c.to_json()} for w, c in sorted(self.terms.items())]

    @classmethod
    def from_json(cls, data, ctx: Context = DEFAULT) -> NCPoly:
        return cls(ctx, {tuple(t["word"]): RationalFunction.from_json(t["coeff"], ctx) for t in data})


@dataclass(frozen=True, eq=False)
class RewriteSystem:
    order: tuple
    rules: Mapping[Word, NCPoly]
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(self.order))
        object.__setattr__(self, "rules", {tuple(k): v for k, v in self.rules.items()})
        if len(set(self.order)) != len(self.order):
            raise InvalidRule("generator order has repeated symbols")
        rank = self.rank
        for lhs, rhs in self.rules.items():
            if len(lhs) != 2 or any(s not in rank for s in lhs):
                raise InvalidRule(f"rule left side {lhs} is not a pair of declared generators")
            if rank[lhs[0]] <= rank[lhs[1]]:
                raise InvalidRule(f"rule left side {lhs} is not descending")
            for w in rhs.terms:
                if any(s not in rank for s in w):
                    raise InvalidRule(f"rule {lhs} produces undeclared symbols in {w}")
                if self.key(w) >= self.key(lhs):
                    raise InvalidRule(f"rule {lhs} -> ... contains {w}, which is not smaller")

    @property
    def rank(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.order)}

    def key(self, w: Sequence[str]):
        rank = self.rank
        return (len(w), tuple(rank[s] for s in w))

    @property
    def ctx(self) -> Context:
        for rhs in self.rules.values():
            return rhs.ctx
        return DEFAULT

    def is_complete(self) -> bool:
        """Every descending pair has a rule."""
        n = len(self.order)
        return all((self.order[j], self.order[i]) in self.rules for i in range(n) for j in range(i + 1, n))

    def to_json(self) -> dict:
        return {
            "order": list(self.order),
            "rules": [{"lhs": list(k), "rhs": v.to_json()} for k, v in sorted(self.rules.items())],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, data: Mapping, ctx: Context = DEFAULT) -> RewriteSystem:
        try:
            order = data["order"]
            rules = {tuple(r["lhs"]): NCPoly.from_json(r["rhs"], ctx) for r in data["rules"]}
        except (KeyError, TypeError) as exc:
            raise InvalidRule(f"malformed rule system: {exc}") from None
        return cls(tuple(order), rules)


def _redex(word: Word, rs: RewriteSystem, strategy: str) -> int:
    idx = range(len(word) - 1) if strategy == "leftmost" else range(len(word) - 2, -1, -1)
    for i in idx:
        if word[i : i + 2] in rs.rules:
            return i
    return -1


def _nf_word(word: Word, rs: RewriteSystem, strategy: str) -> NCPoly:
    cache = rs._cache.setdefault(strategy, {})
    hit = cache.get(word)
    if hit is not None:
        return hit
    i = _redex(word, rs, strategy)
    ctx = rs.ctx
    if i < 0:
        out = NCPoly.word(word, 1, ctx)
    else:
        pre, post = word[:i], word[i + 2 :]
        out = NCPoly(ctx)
        for w, c in rs.rules[word[i : i + 2]].terms.items():
            out = out + _nf_word(pre + w + post, rs, strategy).scale(c)
    cache[word] = out
    return out


def normal_form(p: NCPoly, rs: RewriteSystem, strategy: str = "leftmost") -> NCPoly:
    if strategy not in ("leftmost", "rightmost"):
        raise InvalidInput(f"unknown strategy {strategy!r}")
    out = NCPoly(p.ctx)
    for w, c in p.terms.items():
        out = out + _nf_word(w, rs, strategy).scale(c)
    return out


def overlap_words(rs: RewriteSystem) -> list[Word]:
    """All ``XYZ`` with both ``XY`` and ``YZ`` rule left sides."""
    return sorted(
        (x, y, z) for (x, y) in rs.rules for (y2, z) in rs.rules if y2 == y
    )


def ambiguity_defect(word: Sequence[str], rs: RewriteSystem) -> NCPoly:
    word = tuple(word)
    if len(word) != 3 or word[:2] not in rs.rules or word[1:] not in rs.rules:
        raise InvalidInput(f"{word} is not an overlap of two rules")
    ctx = rs.ctx
    left = NCPoly(ctx, {w + word[2:]: c for w, c in rs.rules[word[:2]].terms.items()})
    right = NCPoly(ctx, {word[:1] + w: c for w, c in rs.rules[word[1:]].terms.items()})
    return normal_form(left, rs) - normal_form(right, rs)


def resolve_ambiguity(word: Sequence[str], rs: RewriteSystem) -> bool:
    return ambiguity_defect(word, rs).is_zero()


def is_confluent(rs: RewriteSystem) -> bool:
    return all(resolve_ambiguity(w, rs) for w in overlap_words(rs))


def count_normal_monomials(rs: RewriteSystem, n: int, check: bool = True) -> int:
    """Number of length-``n`` words avoiding every rule left side."""
    if n < 0:
        raise InvalidInput("degree must be non-negative")
    if check and not is_confluent(rs):
        raise InvalidRule("rule system is not confluent; normal words do not form a basis")
    if n == 0:
        return 1
    ends = {s: 1 for s in rs.order}
    for _ in range(n - 1):
        ends = {t: sum(k for s, k in ends.items() if (s, t) not in rs.rules) for t in rs.order}
    return sum(ends.values())


def system_from_relations(order: Sequence[str], relations: Iterable[NCPoly]) -> RewriteSystem:
    """Orient each relation ``r = 0`` by its largest word."""
    probe = RewriteSystem(tuple(order), {})
    rules = {}
    for r in relations:
        if r.is_zero():
            continue
        lead = max(r.terms, key=probe.key)
        c = r.terms[lead]
        rhs = -(r - NCPoly.word(lead, c, r.ctx)).scale(c.inverse())
        if lead in rules:
            raise InvalidRule(f"two relations share the leading word {lead}")
        rules[lead] = rhs
    raw = RewriteSystem(tuple(order), rules)
    return RewriteSystem(raw.order, {k: normal_form(v, raw) for k, v in raw.rules.items()})


TILDE_ORDER = ("A1~", "A0~", "B0~", "C0~")
ORIGINAL_ORDER = ("A1", "A0", "B0", "C0")


def _consts(ctx: Context):
    return ctx.var("alpha"), ctx.var("beta"), ctx.var("gamma"), ctx.var("delta")


@lru_cache(maxsize=None)
def tilde_system(ctx: Context = DEFAULT) -> RewriteSystem:
    """The six shifted-generator rules with symbolic alpha, beta, gamma, delta."""
    al, be, ga, de = _consts(ctx)
    T1, T0, TB, TC = NCPoly.gens(TILDE_ORDER, ctx)
    one = NCPoly.scalar(1, ctx)
    rules = {
        ("A0~", "A1~"): T1 * T0 - TB.scale(ga) + TC.scale(be),
        ("B0~", "A1~"): T1 * TB + TB.scale(2 * al) - T0.scale(2 * be),
        ("C0~", "A1~"): T1 * TC - TC.scale(2 * al) + T0.scale(2 * ga),
        ("B0~", "A0~"): T0 * TB + (T1 * TB).scale(2) + TB.scale(2 * al) - T0.scale(2 * be) - one.scale(2 * be * de),
        ("C0~", "A0~"): T0 * TC - (T1 * TC).scale(2) + TC.scale(2 * al) - T0.scale(2 * ga) + one.scale(2 * ga * de),
        ("C0~", "B0~"): TB * TC + (T1 * T0).scale(4) - TB.scale(2 * ga) + TC.scale(2 * be) - one.scale(4 * al * de),
    }
    return RewriteSystem(TILDE_ORDER, rules)


def _abstract_data(ctx: Context, names: Sequence[str]):
    from .rank1 import Rank1Data

    al, be, ga, de = _consts(ctx)
    g = NCPoly.gens(names, ctx)
    return Rank1Data(*g, al, be, ga, de), g


def tilde_system_derived(ctx: Context = DEFAULT) -> RewriteSystem:
    """Same system obtained by changing basis in the six original relations."""
    from .rank1 import Rank1Data, relations_residual

    al, be, ga, de = _consts(ctx)
    T1, T0, TB, TC = NCPoly.gens(TILDE_ORDER, ctx)
    data = Rank1Data(T1 + al, T0 + T1, TB - be / 4, TC - ga / 4, al, be, ga, de)
    return system_from_relations(TILDE_ORDER, relations_residual(data))


@lru_cache(maxsize=None)
def original_system(ctx: Context = DEFAULT) -> RewriteSystem:
    """The six original relations oriented along ``A1 < A0 < B0 < C0``."""
    from .rank1 import relations_residual

    data, _ = _abstract_data(ctx, ORIGINAL_ORDER)
    return system_from_relations(ORIGINAL_ORDER, relations_residual(data))
