"""Seeded identity suites shared by ``verify`` and ``selftest``."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .expansions import (
    DeltaOperator,
    DerivationSpec,
    generalized_sigma_tau_leibniz,
    generalized_sigma_tau_spec,
    general_leibniz_noncommutative,
    iterate_expand,
    leibniz_commutative,
    delta_power_closed,
    delta_power_iterated,
    noncomm_binomial,
    power_via_delta,
    ring_pow,
    sigma_tau_leibniz,
    sigma_tau_spec,
    ternary_leibniz,
    ternary_spec,
)
from .models import (
    CheckResult,
    MapEnv,
    RationalMatrixRing,
    TruncatedPolyRing,
    TruncPoly,
    builtin_model_catalog,
    brute_force_power,
    soundness_bridge,
    validate_commutation,
    validate_spec,
)
from .op_algebra import (
    IDENTITY,
    CommutationHypotheses,
    PairPoly,
    binomial,
    normalize_commutative,
    otimes_pow,
)

DEFAULT_SYMBOLIC_N = 10
DEFAULT_CONCRETE_N = 6
ALPHABET = ("p", "q", "r", "s")


@dataclass
class Suite:
    name: str
    results: list[CheckResult] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)


@dataclass
class Report:
    title: str
    suites: list[Suite] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.suites)

    def add(self, name: str, run: Callable[[], Iterable[CheckResult] | CheckResult]) -> Suite:
        start = time.perf_counter()
        out = run()
        results = [out] if isinstance(out, CheckResult) else list(out)
        suite = Suite(name, results, time.perf_counter() - start)
        self.suites.append(suite)
        return suite

    def render(self) -> str:
        """Deterministic text; timings are deliberately left out."""
        lines = [self.title]
        for suite in self.suites:
            lines.append(f"[{suite.name}]")
            lines.extend("  " + r.render().replace("\n", "\n  ") for r in suite.results)
        failed = sum(1 for s in self.suites for r in s.results if not r.passed)
        total = sum(len(s.results) for s in self.suites)
        lines.append(f"{'OK' if failed == 0 else 'FAILED'}: {total - failed}/{total} checks passed")
        return "\n".join(lines)

    def render_timings(self) -> str:
        return "\n".join(f"{s.seconds:8.3f}s  {s.name}" for s in self.suites)


def compare(name: str, cases: Iterable[tuple]) -> CheckResult:
    """Each case is ``(lhs, rhs, context)``; stops at the first mismatch."""
    result = CheckResult(name, True, 0)
    for lhs, rhs, context in cases:
        result.checks += 1
        if lhs != rhs:
            result.passed = False
            result.counterexample = f"{context}\nlhs = {lhs!r}\nrhs = {rhs!r}"
            break
    return result


def sub_rng(seed, label: str) -> random.Random:
    return random.Random(f"{seed}:{label}")


# ---------------------------------------------------------------------------
# random symbolic inputs


def random_word(rng: random.Random, alphabet=ALPHABET, max_len: int = 4) -> tuple:
    return tuple(rng.choice(alphabet) for _ in range(rng.randint(0, max_len)))


def random_pairpoly(rng: random.Random, alphabet=ALPHABET, max_terms: int = 6, max_len: int = 4) -> PairPoly:
    return PairPoly.from_terms(
        (rng.choice([-3, -2, -1, 1, 2, 3]), random_word(rng, alphabet, max_len), random_word(rng, alphabet, max_len))
        for _ in range(rng.randint(0, max_terms))
    )


def random_spec(rng: random.Random, commuting: bool = False, distinct: bool = False) -> DerivationSpec:
    """A spec over 2-4 symbols (plus I).

    ``distinct`` forces ``(g1,h1) != (g2,h2)``; ``commuting`` declares the
    hypotheses of the commutative closed form.
    """
    alphabet = ALPHABET[: rng.randint(2, 4)] + (IDENTITY,)
    while True:
        g1, h1, g2, h2 = (rng.choice(alphabet) for _ in range(4))
        if not distinct or (g1, h1) != (g2, h2):
            break
    hyp = CommutationHypotheses([(g1, g2), (h1, h2)]) if commuting else CommutationHypotheses()
    return DerivationSpec("f", ((g1, h1), (g2, h2)), hyp)


def random_commuting_poly(rng: random.Random) -> tuple[PairPoly, CommutationHypotheses]:
    # left words over {p, q}, right words over {r, s}, all declared commuting
    hyp = CommutationHypotheses.of(("p", "q"), ("r", "s"))
    p = PairPoly.from_terms(
        (rng.choice([-2, -1, 1, 2]), random_word(rng, ("p", "q")), random_word(rng, ("r", "s")))
        for _ in range(rng.randint(0, 6))
    )
    return p, hyp


# ---------------------------------------------------------------------------
# symbolic suites


def check_ring_laws(seed, trials: int = 40) -> list[CheckResult]:
    rng = sub_rng(seed, "ring-laws")
    triples = [(random_pairpoly(rng), random_pairpoly(rng), random_pairpoly(rng)) for _ in range(trials)]
    one = PairPoly.one()
    return [
        compare("associativity", ((p * (q * r), (p * q) * r, f"p={p!r}, q={q!r}, r={r!r}") for p, q, r in triples)),
        compare("left distributivity", (((p + q) * r, p * r + q * r, f"p={p!r}, q={q!r}, r={r!r}") for p, q, r in triples)),
        compare("right distributivity", ((p * (q + r), p * q + p * r, f"p={p!r}, q={q!r}, r={r!r}") for p, q, r in triples)),
        compare("two-sided unit", ((one * p, p * one, f"p={p!r}") for p, _, _ in triples)),
        compare("unit is neutral", ((one * p, p, f"p={p!r}") for p, _, _ in triples)),
    ]


def check_power_additivity(seed, n_max: int = 5, trials: int = 4) -> CheckResult:
    rng = sub_rng(seed, "pow-add")
    polys = [random_pairpoly(rng, max_terms=2, max_len=2) for _ in range(trials)]
    top = min(5, n_max)
    return compare(
        f"p^(m+n) = p^m p^n, m,n<={top}",
        (
            (otimes_pow(p, m + n), otimes_pow(p, m) * otimes_pow(p, n), f"p={p!r}, m={m}, n={n}")
            for p in polys
            for m in range(top + 1)
            for n in range(top + 1)
        ),
    )


def check_pascal(n_max: int = 40) -> CheckResult:
    return compare(
        f"Pascal identity n<={n_max}",
        (
            (binomial(n, k) + binomial(n, k - 1), binomial(n + 1, k), f"n={n}, k={k}")
            for n in range(1, n_max + 1)
            for k in range(1, n + 1)
        ),
    )


def check_normalize(seed, trials: int = 40) -> list[CheckResult]:
    rng = sub_rng(seed, "normalize")
    cases = [random_commuting_poly(rng) for _ in range(trials)]
    return [
        compare(
            "normalize is idempotent",
            (
                (normalize_commutative(normalize_commutative(p, h), h), normalize_commutative(p, h), f"p={p!r}")
                for p, h in cases
            ),
        ),
        compare(
            "normalize preserves coefficient sum",
            ((normalize_commutative(p, h).coefficient_sum(), p.coefficient_sum(), f"p={p!r}") for p, h in cases),
        ),
    ]


def check_oracle_equivalence(seed, specs: int = 10, n_max: int = DEFAULT_SYMBOLIC_N) -> CheckResult:
    rng = sub_rng(seed, "oracle")
    sample = [random_spec(rng) for _ in range(specs)]
    return compare(
        f"noncommutative closed form = iterated expansion, {specs} specs, n<={n_max}",
        (
            (general_leibniz_noncommutative(s, n), iterate_expand(s, n).poly, f"spec={s.summands}, n={n}")
            for s in sample
            for n in range(n_max + 1)
        ),
    )


def _binomial_coefficients_hold(spec: DerivationSpec, n: int) -> bool:
    poly = leibniz_commutative(spec, n)
    for k in range(n + 1):
        a = tuple(sorted([spec.g1] * (n - k) + [spec.g2] * k))
        b = tuple(sorted([spec.h1] * (n - k) + [spec.h2] * k))
        a = tuple(s for s in a if s != IDENTITY)
        b = tuple(s for s in b if s != IDENTITY)
        if poly.coeff(a, b) != binomial(n, k):
            return False
    return len(poly) == n + 1


def check_commutative_collapse(seed, specs: int = 10, n_max: int = DEFAULT_SYMBOLIC_N) -> list[CheckResult]:
    rng = sub_rng(seed, "collapse")
    sample = [random_spec(rng, commuting=True, distinct=True) for _ in range(specs)]
    return [
        compare(
            f"normalized expansion = commutative closed form, {specs} specs, n<={n_max}",
            (
                (normalize_commutative(iterate_expand(s, n).poly, s.hyp), leibniz_commutative(s, n), f"spec={s.summands}, n={n}")
                for s in sample
                for n in range(n_max + 1)
            ),
        ),
        compare(
            f"commutative coefficients are C(n,k), n<={n_max}",
            ((_binomial_coefficients_hold(s, n), True, f"spec={s.summands}, n={n}") for s in sample for n in range(n_max + 1)),
        ),
    ]


def check_term_count(seed, specs: int = 5, n_max: int = DEFAULT_SYMBOLIC_N) -> list[CheckResult]:
    rng = sub_rng(seed, "term-count")
    sample = [random_spec(rng) for _ in range(specs)]
    expansions = [(s, n, iterate_expand(s, n)) for s in sample for n in range(n_max + 1)]
    return [
        compare("raw term count is 2^n", ((e.raw_terms, 2**n, f"spec={s.summands}, n={n}") for s, n, e in expansions)),
        compare(
            "collected coefficient sum is 2^n",
            ((e.poly.coefficient_sum(), 2**n, f"spec={s.summands}, n={n}") for s, n, e in expansions),
        ),
    ]


def check_classical(n_max: int = 12) -> CheckResult:
    spec = DerivationSpec("d", (("d", IDENTITY), (IDENTITY, "d")))

    def cases():
        for n in range(n_max + 1):
            poly = leibniz_commutative(spec, n)
            for k in range(n + 1):
                yield poly.coeff(["d"] * (n - k), ["d"] * k), binomial(n, k), f"n={n}, k={k}"

    return compare(f"classical Leibniz coefficients n<={n_max}", cases())


def check_wrappers(n_max: int = 6) -> list[CheckResult]:
    st_hyp = CommutationHypotheses.of(("t", "d"), ("s", "d"))
    gst_hyp = CommutationHypotheses.of(("t", "D"), ("s", "d"))
    ns = range(n_max + 1)
    return [
        compare(
            "sigma-tau wrapper",
            ((sigma_tau_leibniz("d", "s", "t", n, st_hyp), leibniz_commutative(sigma_tau_spec("d", "s", "t", st_hyp), n), f"n={n}") for n in ns),
        ),
        compare(
            "generalized sigma-tau wrapper",
            (
                (
                    generalized_sigma_tau_leibniz("D", "d", "s", "t", n, gst_hyp),
                    leibniz_commutative(generalized_sigma_tau_spec("D", "d", "s", "t", gst_hyp), n),
                    f"n={n}",
                )
                for n in ns
            ),
        ),
        compare(
            "generalized reduces to sigma-tau when Delta = d",
            ((generalized_sigma_tau_leibniz("d", "d", "s", "t", n, st_hyp), sigma_tau_leibniz("d", "s", "t", n, st_hyp), f"n={n}") for n in ns),
        ),
        compare(
            "ternary wrapper",
            ((ternary_leibniz("d1", "d2", "d3", n), leibniz_commutative(ternary_spec("d1", "d2", "d3"), n), f"n={n}") for n in ns),
        ),
    ]


# ---------------------------------------------------------------------------
# ring identity suites


def random_rings(rng: random.Random, count: int) -> list:
    rings = []
    for _ in range(count):
        if rng.random() < 0.75:
            rings.append(RationalMatrixRing(rng.randint(2, 4)))
        else:
            rings.append(TruncatedPolyRing(rng.randint(2, 8)))
    return rings


def check_delta_closed(ring, rng, trials: int, n_max: int, label: str) -> CheckResult:
    triples = [(ring.random_element(rng), ring.random_element(rng), ring.random_element(rng)) for _ in range(trials)]
    return compare(
        f"delta closed form = iterated delta, {label}, n<={n_max}",
        (
            (delta_power_closed(DeltaOperator(b1, b2), x, n), delta_power_iterated(DeltaOperator(b1, b2), x, n), f"b1={b1}, b2={b2}, x={x}, n={n}")
            for b1, b2, x in triples
            for n in range(n_max + 1)
        ),
    )


def check_delta_pair_algebra(seed, trials: int = 10, n_max: int = 6) -> CheckResult:
    rng = sub_rng(seed, "delta-pair")
    triples = [
        (random_pairpoly(rng, max_terms=2, max_len=1), random_pairpoly(rng, max_terms=2, max_len=1), random_pairpoly(rng, max_terms=3, max_len=2))
        for _ in range(trials)
    ]
    return compare(
        f"delta closed form = iterated delta, pair algebra, n<={n_max}",
        (
            (delta_power_closed(DeltaOperator(b1, b2), x, n), delta_power_iterated(DeltaOperator(b1, b2), x, n), f"b1={b1!r}, b2={b2!r}, x={x!r}, n={n}")
            for b1, b2, x in triples
            for n in range(n_max + 1)
        ),
    )


def check_power_identity(ring, rng, trials: int, n_max: int, label: str) -> CheckResult:
    pairs = [(ring.random_element(rng), ring.random_element(rng)) for _ in range(trials)]
    return compare(
        f"a^n via delta_(a,b) = a^n, {label}, n<={n_max}",
        ((power_via_delta(a, b, n), ring_pow(a, n), f"a={a}, b={b}, n={n}") for a, b in pairs for n in range(n_max + 1)),
    )


def check_binomial(ring, rng, trials: int, n_max: int, label: str, cs_per_pair: int = 5) -> CheckResult:
    def cases():
        for _ in range(trials):
            a, b = ring.random_element(rng), ring.random_element(rng)
            cs = [ring.random_element(rng) for _ in range(cs_per_pair)] + [ring.zero(), a + b]
            for n in range(n_max + 1):
                expected = ring_pow(a + b, n)
                for c in cs:
                    yield noncomm_binomial(a, b, c, n), expected, f"a={a}, b={b}, c={c}, n={n}"

    return compare(f"noncommutative binomial independent of c, {label}, n<={n_max}", cases())


def concrete_identity_suites(report: Report, ring, seed, trials: int, n_max: int, label: str) -> None:
    rng = sub_rng(seed, f"identities:{label}")
    report.add(f"delta closed form ({label})", lambda: check_delta_closed(ring, rng, trials, n_max, label))
    report.add(f"power identity ({label})", lambda: check_power_identity(ring, rng, trials, n_max, label))
    report.add(f"noncommutative binomial ({label})", lambda: check_binomial(ring, rng, trials, n_max, label))


# ---------------------------------------------------------------------------
# model suites


def model_suites(
    report: Report,
    spec: DerivationSpec,
    env: MapEnv,
    n_max: int,
    trials: int,
    seed,
    extra_hyp: CommutationHypotheses | None = None,
    label: str = "",
    exhaustive: bool = False,
) -> None:
    prefix = f"{label}: " if label else ""
    defining = report.add(
        f"{prefix}defining identity", lambda: validate_spec(spec, env, trials, f"{seed}:spec", exhaustive)
    ).passed
    hyp = spec.hyp.union(extra_hyp) if extra_hyp else spec.hyp
    commuting = False
    if len(hyp):
        commuting = report.add(
            f"{prefix}commutation hypotheses",
            lambda: validate_commutation(hyp, env, trials, f"{seed}:commute", exhaustive),
        ).passed
    # with nothing declared the closed form may still apply vacuously (I slots)
    use_commutative = not spec.missing_hypotheses() and (commuting or not len(hyp))

    def bridge():
        if not defining:
            return CheckResult("soundness bridge", False, 0, skipped="defining identity failed")
        return soundness_bridge(spec, env, n_max, trials, f"{seed}:bridge", commutative=use_commutative)

    report.add(f"{prefix}soundness bridge", bridge)


def run_verify(spec: DerivationSpec, env: MapEnv, model_hyp: CommutationHypotheses, n_max: int, trials: int, seed, exhaustive: bool = False) -> Report:
    report = Report(f"verify {spec.f_name} on {env.ring.describe()} (n_max={n_max}, trials={trials}, seed={seed})")
    model_suites(report, spec, env, n_max, trials, seed, model_hyp, exhaustive=exhaustive)
    concrete_identity_suites(report, env.ring, seed, trials, n_max, env.ring.describe())
    return report


def run_selftest(seed=0, n_max: int | None = None) -> Report:
    n_sym = DEFAULT_SYMBOLIC_N if n_max is None else n_max
    n_con = min(DEFAULT_CONCRETE_N, n_sym)
    report = Report(f"selftest (seed={seed}, symbolic n<={n_sym}, concrete n<={n_con})")

    report.add("pair algebra ring laws", lambda: check_ring_laws(seed))
    report.add("power additivity", lambda: check_power_additivity(seed, n_sym))
    report.add("Pascal identity", lambda: check_pascal(40))
    report.add("commutative normalization", lambda: check_normalize(seed))
    report.add("noncommutative Leibniz", lambda: check_oracle_equivalence(seed, 10, n_sym))
    report.add("commutative Leibniz", lambda: check_commutative_collapse(seed, 10, n_sym))
    report.add("term count", lambda: check_term_count(seed, 5, n_sym))
    report.add("classical Leibniz", lambda: check_classical(min(12, n_sym)))
    report.add("wrappers", lambda: check_wrappers(min(6, n_sym)))
    report.add("delta closed form (pair algebra)", lambda: check_delta_pair_algebra(seed, 10, n_con))

    rng = sub_rng(seed, "rings")
    rings = random_rings(rng, 3) + [RationalMatrixRing(2), TruncatedPolyRing(6)]
    for i, ring in enumerate(rings, 1):
        concrete_identity_suites(report, ring, seed, 5, n_con, f"ring {i}: {ring.describe()}")

    for entry in builtin_model_catalog():
        model_suites(report, entry.spec, entry.env, n_con, 25, seed, label=f"catalog {entry.key} ({entry.title})")

    def fixture():
        env = builtin_model_catalog()[4].env
        a, b = TruncPoly.monomial(2, 6), TruncPoly.monomial(3, 6)
        return compare(
            "d^2/dx^2 (x^2 x^3) = 20 x^3",
            [(brute_force_power(env, 2, a, b), TruncPoly.monomial(3, 6, 20), "Q[x]/x^6")],
        )

    if n_con >= 2:
        report.add("formal derivative fixture", fixture)
    return report
