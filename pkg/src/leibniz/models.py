"""Concrete exact algebras used as numeric oracles.

Two ring families are provided: rational ``dim x dim`` matrices and
``Q[x]/(x^m)``.  Maps on them are small linear-map objects (``LeftMul``,
``InnerDer``, ``ConjEndo`` ...) bound to symbols in a :class:`MapEnv`.  Formal
pair polynomials can then be evaluated and compared against applying the
concrete ``f`` ``n`` times.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union

from .expansions import (
    DerivationSpec,
    general_leibniz_noncommutative,
    iterate_expand,
    leibniz_commutative,
)
from .op_algebra import IDENTITY, CommutationHypotheses, PairPoly, Word

Number = Union[int, Fraction]


def fstr(x: Number) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _norm(x):
    # integral entries are kept as int: exact, and much faster than Fraction
    if type(x) is int:
        return x
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else x


# ---------------------------------------------------------------------------
# ring elements


class Matrix:
    """Immutable square matrix over the rationals."""

    __slots__ = ("rows", "dim")

    def __init__(self, rows: Iterable[Iterable[Number]]):
        self.rows = tuple(tuple(_norm(x) for x in row) for row in rows)
        self.dim = len(self.rows)
        if self.dim == 0 or any(len(r) != self.dim for r in self.rows):
            raise ValueError("matrix must be square and non-empty")

    @classmethod
    def identity(cls, dim: int) -> "Matrix":
        return cls([[int(i == j) for j in range(dim)] for i in range(dim)])

    @classmethod
    def zeros(cls, dim: int) -> "Matrix":
        return cls([[0] * dim for _ in range(dim)])

    def unit(self) -> "Matrix":
        return Matrix.identity(self.dim)

    def zero_like(self) -> "Matrix":
        return Matrix.zeros(self.dim)

    def _check(self, other: "Matrix") -> None:
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        self._check(other)
        return Matrix([[x + y for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        self._check(other)
        return Matrix([[x - y for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self):
        return Matrix([[-x for x in r] for r in self.rows])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Matrix([[x * other for x in r] for r in self.rows])
        if not isinstance(other, Matrix):
            return NotImplemented
        self._check(other)
        cols = list(zip(*other.rows))
        return Matrix([[sum(x * y for x, y in zip(r, c) if x and y) for c in cols] for r in self.rows])

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def inverse(self) -> "Matrix":
        """Gauss-Jordan inverse; raises ValueError when singular."""
        n = self.dim
        aug = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(self.rows)]
        for col in range(n):
            pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
            if pivot is None:
                raise ValueError("matrix is not invertible")
            aug[col], aug[pivot] = aug[pivot], aug[col]
            p = aug[col][col]
            aug[col] = [x / p for x in aug[col]]
            for r in range(n):
                if r != col and aug[r][col] != 0:
                    factor = aug[r][col]
                    aug[r] = [x - factor * y for x, y in zip(aug[r], aug[col])]
        return Matrix([row[n:] for row in aug])

    def __str__(self):
        return "[" + ",".join("[" + ",".join(fstr(x) for x in r) + "]" for r in self.rows) + "]"

    def __repr__(self):
        return f"Matrix({self})"


class TruncPoly:
    """Element of ``Q[x]/(x^m)``, coefficients lowest degree first."""

    __slots__ = ("coeffs", "modulus")

    def __init__(self, coeffs: Iterable[Number], modulus: int):
        coeffs = [_norm(c) for c in coeffs]
        if modulus < 1:
            raise ValueError("modulus degree must be positive")
        if any(c != 0 for c in coeffs[modulus:]):
            raise ValueError(f"polynomial has terms of degree >= {modulus}")
        coeffs = coeffs[:modulus] + [0] * (modulus - len(coeffs))
        self.coeffs = tuple(coeffs)
        self.modulus = modulus

    @classmethod
    def monomial(cls, degree: int, modulus: int, coeff: Number = 1) -> "TruncPoly":
        c = [0] * modulus
        if degree < modulus:
            c[degree] = coeff
        return cls(c, modulus)

    def unit(self) -> "TruncPoly":
        return TruncPoly.monomial(0, self.modulus)

    def zero_like(self) -> "TruncPoly":
        return TruncPoly([], self.modulus)

    def degree(self) -> int:
        """Degree, with -1 for zero."""
        for i in range(self.modulus - 1, -1, -1):
            if self.coeffs[i] != 0:
                return i
        return -1

    def _check(self, other: "TruncPoly") -> None:
        if other.modulus != self.modulus:
            raise ValueError(f"modulus mismatch: {self.modulus} vs {other.modulus}")

    def __add__(self, other):
        if not isinstance(other, TruncPoly):
            return NotImplemented
        self._check(other)
        return TruncPoly([x + y for x, y in zip(self.coeffs, other.coeffs)], self.modulus)

    def __sub__(self, other):
        if not isinstance(other, TruncPoly):
            return NotImplemented
        self._check(other)
        return TruncPoly([x - y for x, y in zip(self.coeffs, other.coeffs)], self.modulus)

    def __neg__(self):
        return TruncPoly([-x for x in self.coeffs], self.modulus)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return TruncPoly([x * other for x in self.coeffs], self.modulus)
        if not isinstance(other, TruncPoly):
            return NotImplemented
        self._check(other)
        m = self.modulus
        out = [0] * m
        for i, x in enumerate(self.coeffs):
            if x:
                for j in range(m - i):
                    y = other.coeffs[j]
                    if y:
                        out[i + j] += x * y
        return TruncPoly(out, m)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, TruncPoly):
            return NotImplemented
        return self.modulus == other.modulus and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.coeffs, self.modulus))

    def inverse(self) -> "TruncPoly":
        c0 = Fraction(self.coeffs[0])
        if c0 == 0:
            raise ValueError("truncated polynomial with zero constant term is not invertible")
        m = self.modulus
        inv = [Fraction(0)] * m
        inv[0] = 1 / c0
        for k in range(1, m):
            s = sum(self.coeffs[i] * inv[k - i] for i in range(1, k + 1))
            inv[k] = -s / c0
        return TruncPoly(inv, m)

    def derivative(self) -> "TruncPoly":
        return TruncPoly([i * self.coeffs[i] for i in range(1, self.modulus)], self.modulus)

    def __str__(self):
        return "[" + ",".join(fstr(x) for x in self.coeffs) + "]"

    def __repr__(self):
        return f"TruncPoly({self}, mod x^{self.modulus})"


RingElement = Union[Matrix, TruncPoly]


# ---------------------------------------------------------------------------
# rings


@dataclass(frozen=True)
class RationalMatrixRing:
    dim: int

    kind = "matrix"

    def __post_init__(self):
        if not 1 <= self.dim <= 6:
            raise ValueError("matrix dimension must be between 1 and 6")

    def one(self) -> Matrix:
        return Matrix.identity(self.dim)

    def zero(self) -> Matrix:
        return Matrix.zeros(self.dim)

    def element(self, data) -> Matrix:
        m = Matrix(data)
        if m.dim != self.dim:
            raise ValueError(f"expected a {self.dim}x{self.dim} matrix")
        return m

    def random_element(self, rng: random.Random, bound: int = 3, density: float = 1.0) -> Matrix:
        return Matrix(
            [
                [rng.randint(-bound, bound) if rng.random() < density else 0 for _ in range(self.dim)]
                for _ in range(self.dim)
            ]
        )

    def random_pair(self, rng: random.Random, bound: int = 3, density: float = 1.0):
        return self.random_element(rng, bound, density), self.random_element(rng, bound, density)

    def basis(self) -> list[Matrix]:
        n = self.dim
        return [Matrix([[int((r, c) == (i, j)) for c in range(n)] for r in range(n)]) for i in range(n) for j in range(n)]

    def basis_pairs(self) -> list[tuple[Matrix, Matrix]]:
        b = self.basis()
        return [(x, y) for x in b for y in b]

    def describe(self) -> str:
        return f"matrix {self.dim}"


@dataclass(frozen=True)
class TruncatedPolyRing:
    """``Q[x]/(x^m)``.

    ``d/dx`` does not preserve the ideal ``(x^m)``, so it only behaves as a
    derivation on products that do not wrap.  :meth:`random_pair` and
    :meth:`basis_pairs` therefore keep ``deg a + deg b < m``.
    """

    modulus: int

    kind = "polytrunc"

    def __post_init__(self):
        if not 2 <= self.modulus <= 12:
            raise ValueError("modulus degree must be between 2 and 12")

    def one(self) -> TruncPoly:
        return TruncPoly.monomial(0, self.modulus)

    def zero(self) -> TruncPoly:
        return TruncPoly([], self.modulus)

    def element(self, data) -> TruncPoly:
        if not isinstance(data, list) or any(isinstance(x, list) for x in data):
            raise ValueError("expected a flat coefficient list")
        return TruncPoly(data, self.modulus)

    def _random_poly(self, rng, max_degree, bound, density):
        return TruncPoly(
            [rng.randint(-bound, bound) if rng.random() < density else 0 for _ in range(max_degree + 1)],
            self.modulus,
        )

    def random_element(self, rng: random.Random, bound: int = 3, density: float = 1.0) -> TruncPoly:
        return self._random_poly(rng, self.modulus - 1, bound, density)

    def random_pair(self, rng: random.Random, bound: int = 3, density: float = 1.0):
        da = rng.randint(0, self.modulus - 1)
        db = self.modulus - 1 - da
        return self._random_poly(rng, da, bound, density), self._random_poly(rng, db, bound, density)

    def basis(self) -> list[TruncPoly]:
        return [TruncPoly.monomial(i, self.modulus) for i in range(self.modulus)]

    def basis_pairs(self) -> list[tuple[TruncPoly, TruncPoly]]:
        m = self.modulus
        return [
            (TruncPoly.monomial(i, m), TruncPoly.monomial(j, m)) for i in range(m) for j in range(m - i)
        ]

    def describe(self) -> str:
        return f"polytrunc {self.modulus}"


ConcreteRing = Union[RationalMatrixRing, TruncatedPolyRing]


# ---------------------------------------------------------------------------
# maps


@dataclass(frozen=True)
class Identity:
    def __call__(self, x):
        return x


@dataclass(frozen=True)
class LeftMul:
    c: RingElement

    def __call__(self, x):
        return self.c * x


@dataclass(frozen=True)
class RightMul:
    c: RingElement

    def __call__(self, x):
        return x * self.c


@dataclass(frozen=True)
class InnerDer:
    """``x -> cx - xc``."""

    c: RingElement

    def __call__(self, x):
        return self.c * x - x * self.c


@dataclass(frozen=True)
class InnerGenDer:
    """``x -> b1 x - x b2``."""

    b1: RingElement
    b2: RingElement

    def __call__(self, x):
        return self.b1 * x - x * self.b2


@dataclass(frozen=True)
class ConjEndo:
    """``x -> u x u^-1``; the inverse is computed and checked on construction."""

    u: RingElement
    u_inv: RingElement = field(default=None)

    def __post_init__(self):
        inv = self.u.inverse() if self.u_inv is None else self.u_inv
        if self.u * inv != self.u.unit() or inv * self.u != self.u.unit():
            raise ValueError("conjugation element is not invertible with the given inverse")
        object.__setattr__(self, "u_inv", inv)

    def __call__(self, x):
        return self.u * x * self.u_inv


@dataclass(frozen=True)
class FormalDiff:
    def __call__(self, x):
        if not isinstance(x, TruncPoly):
            raise TypeError("formal derivative is only defined on truncated polynomials")
        return x.derivative()


@dataclass(frozen=True)
class Compose:
    """``Compose([m1, m2])`` is ``m1 o m2``: m2 acts first."""

    maps: tuple

    def __init__(self, maps: Sequence):
        object.__setattr__(self, "maps", tuple(maps))

    def __call__(self, x):
        for m in reversed(self.maps):
            x = m(x)
        return x


ConcreteMap = Union[Identity, LeftMul, RightMul, InnerDer, InnerGenDer, ConjEndo, FormalDiff, Compose]


class UnboundSymbol(LookupError):
    """A word mentions a symbol the environment does not assign."""


@dataclass
class MapEnv:
    ring: ConcreteRing
    assignments: dict[str, ConcreteMap]
    f_realization: ConcreteMap

    def __post_init__(self):
        self.assignments = dict(self.assignments)
        if IDENTITY in self.assignments and not isinstance(self.assignments[IDENTITY], Identity):
            raise ValueError("the symbol I is reserved for the identity map")
        self.assignments[IDENTITY] = Identity()

    def lookup(self, symbol: str) -> ConcreteMap:
        try:
            return self.assignments[symbol]
        except KeyError:
            raise UnboundSymbol(f"symbol {symbol!r} has no concrete map") from None

    def unbound(self, symbols: Iterable[str]) -> list[str]:
        return sorted(s for s in set(symbols) if s not in self.assignments)


def eval_word(w: Word, env: MapEnv, x):
    for symbol in reversed(w):
        x = env.lookup(symbol)(x)
    return x


class WordEvaluator:
    """Applies words to one fixed element, memoizing every suffix.

    Expansions of successive powers share suffixes, so reusing one evaluator
    across ``n`` turns ``2^n`` words of length ``n`` into about ``2^(n+1)``
    single map applications.
    """

    def __init__(self, env: MapEnv, x):
        self.env = env
        self.cache = {(): x}

    def __call__(self, w: Word):
        hit = self.cache.get(w)
        if hit is None:
            hit = self.env.lookup(w[0])(self(w[1:]))
            self.cache[w] = hit
        return hit


def eval_pairpoly(p: PairPoly, env: MapEnv, a, b, evaluators: tuple | None = None):
    """``sum coeff * U(a) * V(b)`` over the terms of ``p``."""
    eval_a, eval_b = evaluators or (WordEvaluator(env, a), WordEvaluator(env, b))
    total = env.ring.zero()
    for coeff, u, v in p.terms():
        total = total + eval_a(u) * eval_b(v) * coeff
    return total


def brute_force_power(env: MapEnv, n: int, a, b):
    x = a * b
    for _ in range(n):
        x = env.f_realization(x)
    return x


# ---------------------------------------------------------------------------
# validation


@dataclass
class CheckResult:
    name: str
    passed: bool
    checks: int
    counterexample: str | None = None
    skipped: str | None = None

    def render(self) -> str:
        if self.skipped:
            return f"SKIP {self.name}: {self.skipped}"
        plural = "" if self.checks == 1 else "s"
        line = f"{'PASS' if self.passed else 'FAIL'} {self.name} ({self.checks} check{plural})"
        if self.counterexample:
            line += "\n  counterexample: " + self.counterexample.replace("\n", "\n  ")
        return line


def _sample_pairs(ring: ConcreteRing, trials: int, seed, exhaustive: bool) -> Iterator[tuple]:
    if exhaustive:
        yield from ring.basis_pairs()
        return
    rng = random.Random(seed)
    for _ in range(trials):
        yield ring.random_pair(rng)


def validate_spec(spec: DerivationSpec, env: MapEnv, trials: int = 100, seed=0, exhaustive: bool = False) -> CheckResult:
    """Check ``f(ab) = g1(a)h1(b) + g2(a)h2(b)`` on sampled pairs."""
    name = f"defining identity of {spec.f_name}"
    missing = env.unbound(spec.symbols() - {spec.f_name})
    if missing:
        return CheckResult(name, False, 0, f"unbound symbols {', '.join(missing)}")
    rhs_poly = iterate_expand(spec, 1).poly
    count = 0
    for a, b in _sample_pairs(env.ring, trials, seed, exhaustive):
        count += 1
        lhs = env.f_realization(a * b)
        rhs = eval_pairpoly(rhs_poly, env, a, b)
        if lhs != rhs:
            return CheckResult(name, False, count, f"a = {a}, b = {b}\nf(ab) = {lhs}\nsum = {rhs}")
    return CheckResult(name, True, count)


def validate_commutation(
    hyp: CommutationHypotheses, env: MapEnv, trials: int = 100, seed=0, exhaustive: bool = False
) -> CheckResult:
    """Check ``S(T(x)) = T(S(x))`` for each declared pair on sampled ``x``."""
    pairs = hyp.sorted_pairs()
    name = "commutation " + (" ".join(f"[{s},{t}]" for s, t in pairs) or "(none declared)")
    missing = env.unbound(s for p in pairs for s in p)
    if missing:
        return CheckResult(name, False, 0, f"unbound symbols {', '.join(missing)}")
    if exhaustive:
        xs = env.ring.basis()
    else:
        rng = random.Random(seed)
        xs = [env.ring.random_element(rng) for _ in range(trials)]
    count = 0
    for s, t in pairs:
        ms, mt = env.lookup(s), env.lookup(t)
        for x in xs:
            count += 1
            st, ts = ms(mt(x)), mt(ms(x))
            if st != ts:
                return CheckResult(name, False, count, f"x = {x}\n{s}({t}(x)) = {st}\n{t}({s}(x)) = {ts}")
    return CheckResult(name, True, count)


def soundness_bridge(
    spec: DerivationSpec, env: MapEnv, n_max: int = 6, trials: int = 25, seed=0, commutative: bool = False
) -> list[CheckResult]:
    """Evaluate the symbolic expansions of ``f^n(ab)`` and compare with applying ``f`` n times.

    ``commutative`` adds the commutative closed form; only pass it when the
    hypotheses were validated on ``env``.
    """
    forms = [
        ("iterate", lambda n: iterate_expand(spec, n).poly),
        ("noncommutative", lambda n: general_leibniz_noncommutative(spec, n)),
    ]
    if commutative:
        forms.append(("commutative", lambda n: leibniz_commutative(spec, n)))
    rng = random.Random(seed)
    pairs = [env.ring.random_pair(rng) for _ in range(trials)]
    evaluators = [(WordEvaluator(env, a), WordEvaluator(env, b)) for a, b in pairs]
    powers = []
    for a, b in pairs:
        seq = [a * b]
        for _ in range(n_max):
            seq.append(env.f_realization(seq[-1]))
        powers.append(seq)
    results = []
    for label, build in forms:
        name = f"soundness {label} n<={n_max}"
        result = CheckResult(name, True, 0)
        for n in range(n_max + 1):
            poly = build(n)
            for (a, b), ev, seq in zip(pairs, evaluators, powers):
                result.checks += 1
                lhs = seq[n]
                rhs = eval_pairpoly(poly, env, a, b, ev)
                if lhs != rhs:
                    result.passed = False
                    result.counterexample = f"n = {n}, a = {a}, b = {b}\nf^n(ab) = {lhs}\nexpansion = {rhs}"
                    break
            if not result.passed:
                break
        results.append(result)
    return results


# ---------------------------------------------------------------------------
# catalog


@dataclass
class CatalogEntry:
    key: str
    title: str
    spec: DerivationSpec
    env: MapEnv


def _shift(dim: int) -> Matrix:
    return Matrix([[int(j == i + 1) for j in range(dim)] for i in range(dim)])


def builtin_model_catalog() -> list[CatalogEntry]:
    """Five ready-made (spec, env) pairs, one per derivation notion."""
    m3 = RationalMatrixRing(3)
    entries = []

    # (i) inner derivation d_c on 3x3 matrices
    c = Matrix([[1, 2, 0], [0, -1, 1], [3, 0, 2]])
    d = InnerDer(c)
    spec = DerivationSpec("d", (("d", IDENTITY), (IDENTITY, "d")))
    entries.append(CatalogEntry("i", "inner derivation", spec, MapEnv(m3, {"d": d}, d)))

    # (ii) sigma-derivation d = d_c o sigma, sigma = conjugation by u with uc = cu
    c = _shift(3)
    u = Matrix.identity(3) * 2 + c
    sigma = ConjEndo(u)
    d = Compose([InnerDer(c), sigma])
    hyp = CommutationHypotheses.of(("d", "s"))
    spec = DerivationSpec("d", (("d", "s"), ("s", "d")), hyp)
    entries.append(CatalogEntry("ii", "sigma-derivation", spec, MapEnv(m3, {"d": d, "s": sigma}, d)))

    # (iii) inner generalized derivation delta_{b1,b2}(ab) = delta(a) b + a d_{b2}(b)
    b1 = Matrix([[0, 1, 0], [0, 0, 0], [1, 0, 0]])
    b2 = Matrix([[1, 0, 0], [0, 0, 2], [0, -1, 0]])
    delta = InnerGenDer(b1, b2)
    spec = DerivationSpec("D", (("D", IDENTITY), (IDENTITY, "e")))
    entries.append(
        CatalogEntry("iii", "generalized inner derivation", spec, MapEnv(m3, {"D": delta, "e": InnerDer(b2)}, delta))
    )

    # (iv) ternary derivation (delta_{b1,b2}, d_{b1}, delta_{b1,b2})
    spec = DerivationSpec("D", (("E", IDENTITY), (IDENTITY, "D")))
    entries.append(
        CatalogEntry("iv", "ternary derivation", spec, MapEnv(m3, {"D": delta, "E": InnerDer(b1)}, delta))
    )

    # (v) d/dx on Q[x]/(x^6)
    ring = TruncatedPolyRing(6)
    dx = FormalDiff()
    spec = DerivationSpec("D", (("D", IDENTITY), (IDENTITY, "D")))
    entries.append(CatalogEntry("v", "formal derivative", spec, MapEnv(ring, {"D": dx}, dx)))
    return entries


def catalog_entry(key: str) -> CatalogEntry:
    for entry in builtin_model_catalog():
        if entry.key == key:
            return entry
    raise KeyError(f"no catalog entry {key!r}")
