"""Exact n-th powers of generalized derivations in a formal pair algebra."""

from .expansions import (
    DeltaOperator,
    DerivationSpec,
    Expansion,
    MissingHypothesis,
    delta_apply,
    delta_power_closed,
    delta_power_iterated,
    general_leibniz_double_sum,
    general_leibniz_noncommutative,
    generalized_sigma_tau_leibniz,
    iterate_expand,
    iterate_expand_raw,
    leibniz_commutative,
    noncomm_binomial,
    power_via_delta,
    sigma_tau_leibniz,
    ternary_leibniz,
)
from .op_algebra import (
    CommutationHypotheses,
    NonCommutingWord,
    PairPoly,
    PairTerm,
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

__version__ = "0.1.0"
