from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import pair_polys
from oracle import pascal
from leibniz.op_algebra import (
    CommutationHypotheses,
    NonCommutingWord,
    PairPoly,
    binomial,
    format_pairpoly,
    normalize_commutative,
    otimes_identity,
    otimes_pow,
    pair_add,
    pair_otimes,
    parse_pairpoly,
    scalar_mul,
    word,
    word_compose,
)

ONE = otimes_identity()


def T(c, a, b):
    return PairPoly.term(c, a, b)


@pytest.mark.parametrize("n,k,expected", [(4, 2, 6), (0, 0, 1), (7, 0, 1), (3, 5, 0)])
def test_binomial_small(n, k, expected):
    assert binomial(n, k) == expected


def test_binomial_30_15_against_pascal_table():
    table = pascal(30)
    assert table[30][15] == 155117520
    assert binomial(30, 15) == table[30][15]
    assert all(binomial(n, k) == table[n][k] for n in range(31) for k in range(n + 1))


def test_binomial_is_exact_rational():
    assert isinstance(binomial(60, 30), Fraction)
    assert binomial(60, 30) == 118264581564861424


def test_pascal_identity_up_to_40():
    for n in range(1, 41):
        for k in range(1, n + 1):
            assert binomial(n, k) + binomial(n, k - 1) == binomial(n + 1, k)


def test_word_strips_identity():
    assert word(["I", "g1", "I"]) == ("g1",)
    assert word(["I"]) == ()
    with pytest.raises(ValueError):
        word(["not a name"])


def test_word_compose():
    assert word_compose(("g1",), ("g2",)) == ("g1", "g2")
    assert word_compose((), ("d", "d")) == ("d", "d")
    assert word_compose(("g1", "g2"), ("g1",)) == ("g1", "g2", "g1")


def test_pair_otimes_composes_each_slot():
    assert pair_otimes(T(1, ["g1"], ["h1"]), T(1, ["g2"], ["h2"])) == T(1, ["g1", "g2"], ["h1", "h2"])
    assert pair_otimes(T(1, ["d"], ["s"]), T(1, ["t"], ["d"])) == T(1, ["d", "t"], ["s", "d"])


def test_pair_otimes_is_not_commutative():
    x, y = T(1, ["g1"], ["h1"]), T(1, ["g2"], ["h2"])
    assert x * y != y * x


def test_identity_element():
    assert ONE == T(1, [], [])
    assert pair_otimes(ONE, ONE) == ONE
    assert otimes_pow(ONE, 5) == ONE
    p = T(3, ["g1"], []) + T(-2, [], ["h1", "h2"])
    assert ONE * p == p == p * ONE


def test_otimes_pow():
    assert otimes_pow(T(1, ["g1"], ["h1"]), 3) == T(1, ["g1"] * 3, ["h1"] * 3)
    assert otimes_pow(T(5, ["g1"], ["h1"]), 0) == ONE
    # (2 * I(a) h2(b)) (x) (2 * I(a) h2(b)) = 4 * I(a) h2h2(b)
    assert otimes_pow(T(2, [], ["h2"]), 2) == T(4, [], ["h2", "h2"])


def test_add_and_scale():
    p = T(1, ["g1"], ["h1"]) + T(2, ["g2"], [])
    assert pair_add(p, -p) == PairPoly()
    assert scalar_mul(0, p) == PairPoly()
    x1 = T(1, ["g1"], ["h1"])
    assert pair_add(x1, x1) == T(2, ["g1"], ["h1"])
    assert len(PairPoly.from_terms([(1, (), ()), (-1, (), ())])) == 0


def test_normalize_commutative():
    hyp = CommutationHypotheses.of(("g1", "g2"), ("h1", "h2"))
    assert normalize_commutative(T(1, ["g2", "g1"], ["h2", "h1"]), hyp) == T(1, ["g1", "g2"], ["h1", "h2"])
    p = T(1, ["g1", "g2"], ["h1"]) + T(3, [], ["h2", "h2"])
    assert normalize_commutative(p, hyp) == p
    with pytest.raises(NonCommutingWord):
        normalize_commutative(T(1, ["g2", "g1"], []), CommutationHypotheses())


def test_normalize_collects():
    hyp = CommutationHypotheses.of(("g1", "g2"), ("h1", "h2"))
    p = T(1, ["g1", "g2"], ["h1", "h2"]) + T(1, ["g2", "g1"], ["h2", "h1"])
    assert normalize_commutative(p, hyp) == T(2, ["g1", "g2"], ["h1", "h2"])


def test_hypotheses_ignore_identity_and_self_pairs():
    hyp = CommutationHypotheses([("I", "g"), ("g", "g"), ("h", "g")])
    assert hyp.sorted_pairs() == [("g", "h")]
    assert hyp.commute("I", "anything")
    assert hyp.commute("g", "h") and hyp.commute("h", "g")
    assert not hyp.commute("g", "k")


def test_format_canonical_order():
    p = T(1, ["g2", "g2"], ["h2", "h2"]) + T(1, ["g1", "g2"], ["h1", "h2"]) + T(-1, [], ["x"]) + T(Fraction(1, 2), ["g1"], [])
    assert format_pairpoly(p) == "\n".join(
        [
            "-1 * I(a) * x(b)",
            "1/2 * g1(a) * I(b)",
            "1 * g1.g2(a) * h1.h2(b)",
            "1 * g2.g2(a) * h2.h2(b)",
        ]
    )
    assert format_pairpoly(PairPoly()) == "0"
    assert format_pairpoly(ONE) == "1 * I(a) * I(b)"


def test_parse_rejects_garbage():
    with pytest.raises(ValueError, match="line 2"):
        parse_pairpoly("1 * I(a) * I(b)\nnonsense")


@given(pair_polys, pair_polys, pair_polys)
def test_otimes_associative(p, q, r):
    assert p * (q * r) == (p * q) * r


@given(pair_polys, pair_polys, pair_polys)
def test_otimes_distributes(p, q, r):
    assert (p + q) * r == p * r + q * r
    assert p * (q + r) == p * q + p * r


@given(pair_polys)
def test_unit_two_sided(p):
    assert ONE * p == p
    assert p * ONE == p


@settings(max_examples=30)
@given(
    st.lists(st.tuples(st.integers(-2, 2).filter(bool), st.lists(st.sampled_from("pq"), max_size=2).map(tuple), st.lists(st.sampled_from("rs"), max_size=2).map(tuple)), max_size=2).map(PairPoly.from_terms),
    st.integers(0, 5),
    st.integers(0, 5),
)
def test_power_additivity(p, m, n):
    assert otimes_pow(p, m + n) == pair_otimes(otimes_pow(p, m), otimes_pow(p, n))


@given(pair_polys)
def test_format_parse_round_trip(p):
    text = format_pairpoly(p)
    assert parse_pairpoly(text) == p
    assert format_pairpoly(parse_pairpoly(text)) == text


@given(pair_polys)
def test_display_is_deterministic(p):
    rebuilt = PairPoly.from_terms(reversed(p.terms()))
    assert format_pairpoly(rebuilt) == format_pairpoly(p)


commuting_polys = st.lists(
    st.tuples(
        st.integers(-3, 3).filter(bool),
        st.lists(st.sampled_from("pq"), max_size=4).map(tuple),
        st.lists(st.sampled_from("rs"), max_size=4).map(tuple),
    ),
    max_size=6,
).map(PairPoly.from_terms)


@given(commuting_polys)
def test_normalize_idempotent_and_sum_preserving(p):
    hyp = CommutationHypotheses.of(("p", "q"), ("r", "s"))
    once = normalize_commutative(p, hyp)
    assert normalize_commutative(once, hyp) == once
    assert once.coefficient_sum() == p.coefficient_sum()
