"""The formal pair algebra.

Elements are finite sums ``c * U(a) * V(b)`` where ``U`` and ``V`` are words
in named maps.  The product of two pair-terms composes the left slots and the
right slots independently::

    (c1 * U1(a) * V1(b)) (x) (c2 * U2(a) * V2(b)) = c1*c2 * U1U2(a) * V1V2(b)

and extends bilinearly.  The unit is ``1 * I(a) * I(b)``, i.e. the plain
product ``ab``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import comb
from typing import Iterable, Iterator, NamedTuple, Union

IDENTITY = "I"

Scalar = Fraction
Word = tuple[str, ...]
Key = tuple[Word, Word]
Number = Union[int, Fraction]


class NonCommutingWord(ValueError):
    """A word holds two symbols that are not declared to commute."""


def binomial(n: int, k: int) -> Fraction:
    if n < 0 or k < 0:
        raise ValueError("binomial arguments must be non-negative")
    return Fraction(comb(n, k))


def check_symbol(name: str) -> str:
    if not isinstance(name, str) or not name.isidentifier():
        raise ValueError(f"invalid map symbol {name!r}")
    return name


def word(symbols: Iterable[str] = ()) -> Word:
    """Build a word, dropping identity symbols.

    ``word(["g1", "g2"])`` denotes g1 o g2, so g2 acts first.
    """
    return tuple(check_symbol(s) for s in symbols if s != IDENTITY)


def word_compose(u: Word, v: Word) -> Word:
    return u + v


def format_word(w: Word) -> str:
    return ".".join(w) if w else IDENTITY


def parse_word(text: str) -> Word:
    return word(text.split("."))


class PairTerm(NamedTuple):
    coeff: Fraction
    a_word: Word
    b_word: Word

    def otimes(self, other: "PairTerm") -> "PairTerm":
        return PairTerm(
            self.coeff * other.coeff,
            self.a_word + other.a_word,
            self.b_word + other.b_word,
        )


class CommutationHypotheses:
    """Unordered pairs of map symbols declared to commute.

    The identity commutes with everything and every symbol commutes with
    itself; neither fact is stored.
    """

    __slots__ = ("_pairs",)

    def __init__(self, pairs: Iterable[Iterable[str]] = ()):
        stored = set()
        for pair in pairs:
            s, t = pair
            check_symbol(s)
            check_symbol(t)
            if s == t or IDENTITY in (s, t):
                continue
            stored.add(frozenset((s, t)))
        self._pairs = frozenset(stored)

    @classmethod
    def of(cls, *pairs: tuple[str, str]) -> "CommutationHypotheses":
        return cls(pairs)

    @property
    def pairs(self) -> frozenset:
        return self._pairs

    def commute(self, s: str, t: str) -> bool:
        return s == t or IDENTITY in (s, t) or frozenset((s, t)) in self._pairs

    def union(self, other: "CommutationHypotheses") -> "CommutationHypotheses":
        new = CommutationHypotheses()
        new._pairs = self._pairs | other._pairs
        return new

    def sorted_pairs(self) -> list[tuple[str, str]]:
        return sorted(tuple(sorted(p)) for p in self._pairs)

    def __iter__(self) -> Iterator[tuple[str, str]]:
        return iter(self.sorted_pairs())

    def __len__(self) -> int:
        return len(self._pairs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CommutationHypotheses):
            return NotImplemented
        return self._pairs == other._pairs

    def __hash__(self) -> int:
        return hash(self._pairs)

    def __repr__(self) -> str:
        return f"CommutationHypotheses({self.sorted_pairs()!r})"


class PairPoly:
    """Exact formal sum of pair-terms, with like terms collected.

    Instances are immutable.  ``*`` is the pair product, ``**`` its powers,
    and an int or Fraction on either side of ``*`` scales.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: dict[Key, Fraction] | None = None):
        # callers hand over ownership of ``terms``; zeros are dropped here
        self._terms = {k: c for k, c in (terms or {}).items() if c != 0}
        self._hash = None

    @classmethod
    def from_terms(cls, terms: Iterable[PairTerm | tuple]) -> "PairPoly":
        acc: dict[Key, Fraction] = {}
        for c, u, v in terms:
            key = (tuple(u), tuple(v))
            acc[key] = acc.get(key, 0) + Fraction(c)
        return cls(acc)

    @classmethod
    def term(cls, coeff: Number, a_word: Iterable[str] = (), b_word: Iterable[str] = ()) -> "PairPoly":
        return cls({(word(a_word), word(b_word)): Fraction(coeff)})

    @classmethod
    def zero(cls) -> "PairPoly":
        return cls()

    @classmethod
    def one(cls) -> "PairPoly":
        return cls({((), ()): Fraction(1)})

    def unit(self) -> "PairPoly":
        return PairPoly.one()

    def terms(self) -> list[PairTerm]:
        """Terms in canonical order: by left word, then right word."""
        return [PairTerm(self._terms[k], *k) for k in sorted(self._terms)]

    def coeff(self, a_word: Iterable[str] = (), b_word: Iterable[str] = ()) -> Fraction:
        return self._terms.get((word(a_word), word(b_word)), Fraction(0))

    def coefficient_sum(self) -> Fraction:
        return sum(self._terms.values(), Fraction(0))

    def keys(self) -> set[Key]:
        return set(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __iter__(self) -> Iterator[PairTerm]:
        return iter(self.terms())

    def __eq__(self, other: object) -> bool:
        if isinstance(other, PairPoly):
            return self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other: "PairPoly") -> "PairPoly":
        if not isinstance(other, PairPoly):
            return NotImplemented
        acc = dict(self._terms)
        for k, c in other._terms.items():
            acc[k] = acc.get(k, 0) + c
        return PairPoly(acc)

    def __neg__(self) -> "PairPoly":
        return PairPoly({k: -c for k, c in self._terms.items()})

    def __sub__(self, other: "PairPoly") -> "PairPoly":
        if not isinstance(other, PairPoly):
            return NotImplemented
        return self + (-other)

    def scale(self, c: Number) -> "PairPoly":
        c = Fraction(c)
        if c == 0:
            return PairPoly()
        return PairPoly({k: c * v for k, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, PairPoly):
            return pair_otimes(self, other)
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int) -> "PairPoly":
        return otimes_pow(self, n)

    def __str__(self) -> str:
        return format_pairpoly(self)

    def __repr__(self) -> str:
        inner = " + ".join(
            f"{t.coeff}*{format_word(t.a_word)}(a)*{format_word(t.b_word)}(b)" for t in self.terms()
        )
        return f"PairPoly({inner or '0'})"


def otimes_identity() -> PairPoly:
    return PairPoly.one()


def pair_add(p: PairPoly, q: PairPoly) -> PairPoly:
    return p + q


def scalar_mul(c: Number, p: PairPoly) -> PairPoly:
    return p.scale(c)


def pair_otimes(p: PairPoly, q: PairPoly) -> PairPoly:
    acc: dict[Key, Fraction] = {}
    qs = list(q._terms.items())
    for (u1, v1), c1 in p._terms.items():
        for (u2, v2), c2 in qs:
            key = (u1 + u2, v1 + v2)
            acc[key] = acc.get(key, 0) + c1 * c2
    return PairPoly(acc)


def otimes_pow(p: PairPoly, n: int) -> PairPoly:
    if n < 0:
        raise ValueError("power must be non-negative")
    result = PairPoly.one()
    for _ in range(n):
        result = pair_otimes(result, p)
    return result


def _sort_word(w: Word, hyp: CommutationHypotheses) -> Word:
    distinct = sorted(set(w))
    for i, s in enumerate(distinct):
        for t in distinct[i + 1:]:
            if not hyp.commute(s, t):
                raise NonCommutingWord(
                    f"symbols {s!r} and {t!r} in word {format_word(w)!r} are not declared to commute"
                )
    return tuple(sorted(w))


def normalize_commutative(p: PairPoly, hyp: CommutationHypotheses) -> PairPoly:
    """Sort every word by symbol name and collect like terms.

    Only words whose symbols pairwise commute can be sorted; partial
    commutation is not rewritten.
    """
    acc: dict[Key, Fraction] = {}
    for (u, v), c in p._terms.items():
        key = (_sort_word(u, hyp), _sort_word(v, hyp))
        acc[key] = acc.get(key, 0) + c
    return PairPoly(acc)


def format_pairpoly(p: PairPoly) -> str:
    """Canonical text form, one term per line; the zero sum prints as ``0``."""
    if not p:
        return "0"
    return "\n".join(
        f"{t.coeff} * {format_word(t.a_word)}(a) * {format_word(t.b_word)}(b)" for t in p.terms()
    )


_LINE = re.compile(
    r"^\s*(?P<c>-?\d+(?:/\d+)?)\s*\*\s*(?P<u>[^\s(]+)\(a\)\s*\*\s*(?P<v>[^\s(]+)\(b\)\s*$"
)


def parse_pairpoly(text: str) -> PairPoly:
    """Inverse of :func:`format_pairpoly`.  Blank lines and ``#`` lines are skipped."""
    terms = []
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#") or stripped == "0":
            continue
        m = _LINE.match(stripped)
        if m is None:
            raise ValueError(f"line {lineno}: cannot parse pair-term {stripped!r}")
        terms.append((Fraction(m["c"]), parse_word(m["u"]), parse_word(m["v"])))
    return PairPoly.from_terms(terms)
