"""Power formulas for (g1, h1, g2, h2)-derivations.

A map ``f`` with ``f(ab) = g1(a)h1(b) + g2(a)h2(b)`` has ``f(ab) = X1 + X2``
in the pair algebra, where ``Xi = gi(a)hi(b)``, and ``f^n(ab) = (X1 + X2)^n``.
This module computes that power three ways:

* :func:`iterate_expand` distributes all ``2^n`` products (the reference);
* :func:`leibniz_commutative` is the binomial sum valid when ``g1, g2`` and
  ``h1, h2`` commute;
* :func:`general_leibniz_noncommutative` uses the inner generalized
  derivation ``delta_{X1+X2, X2}`` and needs no commutation at all.

The delta helpers work over any unital ring whose elements support ``+``,
``-``, ``*`` and ``unit()``: pair polynomials, matrices, truncated
polynomials.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterator

from .op_algebra import (
    IDENTITY,
    CommutationHypotheses,
    PairPoly,
    PairTerm,
    binomial,
    check_symbol,
    normalize_commutative,
    word,
)


class MissingHypothesis(ValueError):
    """A closed form needs commuting pairs the spec does not declare."""


@dataclass(frozen=True)
class DerivationSpec:
    """``f(ab) = g1(a)h1(b) + g2(a)h2(b)`` plus declared commuting pairs."""

    f_name: str
    summands: tuple[tuple[str, str], tuple[str, str]]
    hyp: CommutationHypotheses = field(default_factory=CommutationHypotheses)

    def __post_init__(self):
        summands = tuple(tuple(s) for s in self.summands)
        if len(summands) != 2 or any(len(s) != 2 for s in summands):
            raise ValueError("a derivation spec needs exactly two (g, h) summands")
        check_symbol(self.f_name)
        for g, h in summands:
            check_symbol(g)
            check_symbol(h)
        object.__setattr__(self, "summands", summands)

    @classmethod
    def generic(cls, f: str = "f", hyp: CommutationHypotheses | None = None) -> "DerivationSpec":
        return cls(f, (("g1", "h1"), ("g2", "h2")), hyp or CommutationHypotheses())

    @property
    def g1(self) -> str:
        return self.summands[0][0]

    @property
    def h1(self) -> str:
        return self.summands[0][1]

    @property
    def g2(self) -> str:
        return self.summands[1][0]

    @property
    def h2(self) -> str:
        return self.summands[1][1]

    def x1(self) -> PairPoly:
        return PairPoly.term(1, [self.g1], [self.h1])

    def x2(self) -> PairPoly:
        return PairPoly.term(1, [self.g2], [self.h2])

    def symbols(self) -> set[str]:
        return {self.f_name, self.g1, self.h1, self.g2, self.h2} - {IDENTITY}

    def with_hyp(self, hyp: CommutationHypotheses) -> "DerivationSpec":
        return DerivationSpec(self.f_name, self.summands, hyp)

    def missing_hypotheses(self) -> list[tuple[str, str]]:
        """Pairs the commutative closed form needs but the spec lacks."""
        return [
            (s, t)
            for s, t in ((self.g1, self.g2), (self.h1, self.h2))
            if not self.hyp.commute(s, t)
        ]


@dataclass(frozen=True)
class Expansion:
    poly: PairPoly
    raw_terms: int


def iterate_expand_raw(spec: DerivationSpec, n: int) -> Iterator[PairTerm]:
    """Every uncollected term of ``(X1 + X2)^n``, ``2^n`` of them.

    The k-th symbol of each word comes from the k-th application of f.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    pairs = [(word([g]), word([h])) for g, h in spec.summands]
    one = Fraction(1)
    for choice in itertools.product(pairs, repeat=n):
        a_word: tuple[str, ...] = ()
        b_word: tuple[str, ...] = ()
        for u, v in choice:
            a_word += u
            b_word += v
        yield PairTerm(one, a_word, b_word)


def iterate_expand(spec: DerivationSpec, n: int) -> Expansion:
    raw = 0
    acc: dict = {}
    for c, u, v in iterate_expand_raw(spec, n):
        raw += 1
        acc[(u, v)] = acc.get((u, v), 0) + c
    return Expansion(PairPoly(acc), raw)


def require_commuting(spec: DerivationSpec) -> None:
    missing = spec.missing_hypotheses()
    if missing:
        pairs = ", ".join(f"[{s}, {t}] = 0" for s, t in missing)
        raise MissingHypothesis(f"commutative Leibniz rule for {spec.f_name} needs {pairs}")


def leibniz_commutative(spec: DerivationSpec, n: int, canonical: bool = True) -> PairPoly:
    """``sum_k C(n,k) g1^(n-k) g2^k (a) h1^(n-k) h2^k (b)``.

    With ``canonical`` the words are sorted by symbol name (legal under the
    hypotheses), so the result compares directly with normalized
    expansions; otherwise they keep the ``g1...g1 g2...g2`` shape.
    """
    require_commuting(spec)
    if n < 0:
        raise ValueError("n must be non-negative")
    terms = [
        (
            binomial(n, k),
            word([spec.g1] * (n - k) + [spec.g2] * k),
            word([spec.h1] * (n - k) + [spec.h2] * k),
        )
        for k in range(n + 1)
    ]
    poly = PairPoly.from_terms(terms)
    if canonical:
        poly = normalize_commutative(poly, spec.hyp)
    return poly


def sigma_tau_spec(d: str, sigma: str, tau: str, hyp: CommutationHypotheses | None = None) -> DerivationSpec:
    """``d(ab) = d(a)sigma(b) + tau(a)d(b)``."""
    return DerivationSpec(d, ((d, sigma), (tau, d)), hyp or CommutationHypotheses())


def generalized_sigma_tau_spec(
    delta: str, d: str, sigma: str, tau: str, hyp: CommutationHypotheses | None = None
) -> DerivationSpec:
    """``Delta(ab) = Delta(a)sigma(b) + tau(a)d(b)``."""
    return DerivationSpec(delta, ((delta, sigma), (tau, d)), hyp or CommutationHypotheses())


def ternary_spec(d1: str, d2: str, d3: str, hyp: CommutationHypotheses | None = None) -> DerivationSpec:
    """``d1(ab) = d2(a)b + a d3(b)``."""
    return DerivationSpec(d1, ((d2, IDENTITY), (IDENTITY, d3)), hyp or CommutationHypotheses())


def sigma_tau_leibniz(
    d: str, sigma: str, tau: str, n: int, hyp: CommutationHypotheses, canonical: bool = True
) -> PairPoly:
    """Power of a (sigma, tau)-derivation; needs ``[tau, d] = [sigma, d] = 0`` in ``hyp``."""
    return leibniz_commutative(sigma_tau_spec(d, sigma, tau, hyp), n, canonical)


def generalized_sigma_tau_leibniz(
    delta: str, d: str, sigma: str, tau: str, n: int, hyp: CommutationHypotheses, canonical: bool = True
) -> PairPoly:
    """Power of a generalized (sigma, tau)-derivation; needs ``[tau, Delta] = [sigma, d] = 0``."""
    return leibniz_commutative(generalized_sigma_tau_spec(delta, d, sigma, tau, hyp), n, canonical)


def ternary_leibniz(d1: str, d2: str, d3: str, n: int) -> PairPoly:
    # the identity summands make the hypotheses hold vacuously
    return leibniz_commutative(ternary_spec(d1, d2, d3), n)


def ring_pow(x: Any, n: int) -> Any:
    if n < 0:
        raise ValueError("power must be non-negative")
    result = x.unit()
    for _ in range(n):
        result = result * x
    return result


@dataclass(frozen=True)
class DeltaOperator:
    """Inner generalized derivation ``x -> left*x - x*right``."""

    left: Any
    right: Any

    def __call__(self, x: Any) -> Any:
        return self.left * x - x * self.right


def delta_apply(delta: DeltaOperator, x: Any) -> Any:
    return delta(x)


def delta_power_iterated(delta: DeltaOperator, x: Any, n: int) -> Any:
    if n < 0:
        raise ValueError("power must be non-negative")
    for _ in range(n):
        x = delta(x)
    return x


def delta_power_closed(delta: DeltaOperator, x: Any, n: int) -> Any:
    """``sum_k (-1)^k C(n,k) left^(n-k) x right^k``."""
    if n < 0:
        raise ValueError("power must be non-negative")
    left_pows = [x.unit()]
    right_pows = [x.unit()]
    for _ in range(n):
        left_pows.append(left_pows[-1] * delta.left)
        right_pows.append(right_pows[-1] * delta.right)
    total = None
    for k in range(n + 1):
        term = (left_pows[n - k] * x * right_pows[k]) * ((-1) ** k * binomial(n, k))
        total = term if total is None else total + term
    return total


def delta_powers(delta: DeltaOperator, x: Any, n: int) -> list[Any]:
    """``[x, delta(x), ..., delta^n(x)]`` by repeated application."""
    out = [x]
    for _ in range(n):
        out.append(delta(out[-1]))
    return out


def power_via_delta(a: Any, b: Any, n: int) -> Any:
    """``sum_k C(n,k) delta_{a,b}^(n-k)(1) b^k``, which equals ``a^n``."""
    if n < 0:
        raise ValueError("power must be non-negative")
    one = a.unit()
    deltas = delta_powers(DeltaOperator(a, b), one, n)
    b_pow = one
    total = None
    for k in range(n + 1):
        term = (deltas[n - k] * b_pow) * binomial(n, k)
        total = term if total is None else total + term
        b_pow = b_pow * b
    return total


def noncomm_binomial(a: Any, b: Any, c: Any, n: int) -> Any:
    """``sum_k sum_j C(n,k) C(n-k,j) (-1)^j (a+b)^(n-k-j) c^(j+k)``.

    Equals ``(a+b)^n`` for every ``c``; ``c^0`` is the unit even for ``c = 0``.
    """
    if n < 0:
        raise ValueError("power must be non-negative")
    s = a + b
    s_pows = [s.unit()]
    c_pows = [c.unit()]
    for _ in range(n):
        s_pows.append(s_pows[-1] * s)
        c_pows.append(c_pows[-1] * c)
    total = None
    for k in range(n + 1):
        for j in range(n - k + 1):
            coeff = binomial(n, k) * binomial(n - k, j) * (-1) ** j
            term = (s_pows[n - k - j] * c_pows[j + k]) * coeff
            total = term if total is None else total + term
    return total


def noncomm_binomial_delta(a: Any, b: Any, c: Any, n: int) -> Any:
    """``sum_k C(n,k) delta_{a+b,c}^(n-k)(1) c^k``, the single-sum form."""
    return power_via_delta(a + b, c, n)


def general_leibniz_noncommutative(spec: DerivationSpec, n: int) -> PairPoly:
    """``f^n(ab) = sum_k C(n,k) delta_{X1+X2, X2}^(n-k)(1) (x) X2^k`` in the pair algebra.

    No commutation hypotheses are used.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    x2 = spec.x2()
    delta = DeltaOperator(spec.x1() + x2, x2)
    deltas = delta_powers(delta, PairPoly.one(), n)
    total = PairPoly()
    x2_pow = PairPoly.one()
    for k in range(n + 1):
        total = total + (deltas[n - k] * x2_pow).scale(binomial(n, k))
        x2_pow = x2_pow * x2
    return total


def general_leibniz_double_sum(spec: DerivationSpec, n: int) -> PairPoly:
    """The same power through the explicit double sum in ``X1 + X2`` and ``X2``."""
    return noncomm_binomial(spec.x1(), spec.x2(), spec.x2(), n)
