from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qfamily.algebra import (
    CBIT,
    COBIT,
    EBIT,
    AlgebraError,
    EntropicExpr,
    Gen,
    HALF,
    H_A,
    H_B,
    H_E,
    I_AB,
    I_AE,
    I_COH,
    LinearityError,
    NOISY_CHANNEL,
    NOISY_STATE,
    QUBIT_CHANNEL,
    ResourceKind,
    ResourceTag,
    ResourceVector,
    SymbolError,
    canonicalize,
    dual,
    noisy_state,
    vec,
    vec_add,
    vec_scale,
)
from qfamily.derivation import standard_registry

RAW_SYMBOLS = [
    "1", "H(A)", "H(B)", "H(E)", "H(AB)", "H(AE)", "H(BE)", "H(ABE)",
    "I(A:B)", "I(A:E)", "Ic(A>B)",
]

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=12)
raw_exprs = st.dictionaries(st.sampled_from(RAW_SYMBOLS), rationals, max_size=6)


# -- canonicalization -------------------------------------------------------


def test_half_sum_of_mutual_informations_is_marginal_entropy():
    assert canonicalize({"I(A:B)": HALF, "I(A:E)": HALF}) == H_A


def test_global_entropy_vanishes():
    assert canonicalize({"H(ABE)": 1}).is_zero


def test_coherent_information_plus_half_environment_information():
    lhs = canonicalize({"Ic(A>B)": 1, "I(A:E)": HALF})
    expected = EntropicExpr((
        (Gen.H_A, Fraction(1, 2)),
        (Gen.H_B, Fraction(1, 2)),
        (Gen.H_E, Fraction(-1, 2)),
    ))
    assert lhs == expected
    assert lhs == I_AB * HALF


def test_two_party_entropies_collapse_by_purity():
    assert canonicalize({"H(AB)": 1}) == H_E
    assert canonicalize({"H(AE)": 1}) == H_B
    assert canonicalize({"H(BE)": 1}) == H_A


def test_unknown_symbol_is_named_in_the_error():
    with pytest.raises(SymbolError, match="H\\(Q\\)"):
        canonicalize({"H(Q)": 1})


def test_float_coefficients_rejected():
    with pytest.raises(AlgebraError):
        canonicalize({"H(A)": 0.5})


@settings(derandomize=True, max_examples=80)
@given(raw_exprs)
def test_canonicalize_idempotent(raw):
    once = canonicalize(raw)
    assert canonicalize(once) == once


@settings(derandomize=True, max_examples=80)
@given(raw_exprs, raw_exprs)
def test_canonicalize_additive(a, b):
    merged = dict(a)
    for key, value in b.items():
        merged[key] = merged.get(key, Fraction(0)) + value
    assert canonicalize(merged) == canonicalize(a) + canonicalize(b)


def test_nonlinear_product_rejected():
    with pytest.raises(LinearityError):
        _ = H_A * H_B
    assert H_A * EntropicExpr.constant(3) == H_A * 3


# -- vectors ----------------------------------------------------------------


def test_vec_add_merges_and_drops_zeros():
    assert vec_add(vec(1, EBIT), vec(1, EBIT)) == vec(2, EBIT)
    assert vec_add(vec(1, EBIT), vec(-1, EBIT)).is_empty


def test_vec_add_canonicalizes_entropic_sum():
    total = vec_add(vec(I_AE * HALF, QUBIT_CHANNEL), vec(I_AB * HALF, QUBIT_CHANNEL))
    assert total == vec(H_A, QUBIT_CHANNEL)


def test_scaling_teleportation_inputs():
    tp = standard_registry()["tp"]
    scaled = vec_scale(tp.lhs, I_AB * HALF)
    assert scaled.coeff(CBIT) == I_AB
    assert scaled.coeff(EBIT) == I_AB * HALF


def test_scale_by_zero_empties():
    assert vec_scale(vec(3, CBIT) + vec(H_A, EBIT), 0).is_empty


def test_scale_ebit_by_coherent_information():
    assert vec_scale(vec(1, EBIT), I_COH) == vec(H_B - H_E, EBIT)


def test_noisy_copies_cannot_scale_entropically():
    with pytest.raises(AlgebraError):
        vec_scale(vec(1, NOISY_STATE), H_A)
    assert vec_scale(vec(2, NOISY_STATE), 2) == vec(4, NOISY_STATE)


def test_noisy_coefficients_must_be_whole_nonnegative():
    with pytest.raises(AlgebraError, match="qq"):
        vec(Fraction(1, 2), NOISY_STATE)
    with pytest.raises(AlgebraError):
        vec(-1, NOISY_CHANNEL)


def test_handles_only_on_noisy_kinds():
    assert noisy_state("bell").token == "{qq:bell}"
    with pytest.raises(AlgebraError):
        ResourceKind(ResourceTag.EBIT, "bell")


# -- duality ----------------------------------------------------------------


def test_dual_mapping_on_kinds():
    assert dual(EBIT) == QUBIT_CHANNEL
    assert dual(QUBIT_CHANNEL) == EBIT
    assert dual(NOISY_STATE) == NOISY_CHANNEL
    assert dual(CBIT) == CBIT
    assert dual(COBIT) == COBIT


def test_dual_of_mother_is_father():
    registry = standard_registry()
    assert dual(registry["mother"]).same_statement(registry["father"])
    assert dual(registry["father"]).same_statement(registry["mother"])


noiseless_kinds = st.sampled_from([CBIT, QUBIT_CHANNEL, EBIT, COBIT])
vectors = st.builds(
    lambda noiseless, state_copies, channel_copies: ResourceVector.of(
        [(kind, canonicalize(expr)) for kind, expr in noiseless.items()]
        + [(NOISY_STATE, state_copies), (NOISY_CHANNEL, channel_copies)]
    ),
    st.dictionaries(noiseless_kinds, raw_exprs, max_size=4),
    st.integers(min_value=0, max_value=3),
    st.integers(min_value=0, max_value=3),
)


@settings(derandomize=True, max_examples=80)
@given(vectors)
def test_dual_involution_on_vectors(vector):
    assert dual(dual(vector)) == vector


@settings(derandomize=True, max_examples=80)
@given(vectors, vectors)
def test_dual_commutes_with_addition(a, b):
    assert dual(a + b) == dual(a) + dual(b)


# -- module laws ------------------------------------------------------------

noiseless_vectors = st.builds(
    lambda noiseless: ResourceVector.of(
        [(kind, canonicalize(expr)) for kind, expr in noiseless.items()]
    ),
    st.dictionaries(noiseless_kinds, raw_exprs, max_size=4),
)


@settings(derandomize=True, max_examples=60)
@given(noiseless_vectors, rationals, rationals)
def test_noiseless_vectors_form_a_module_over_constants(v, r, s):
    assert vec_scale(vec_scale(v, r), s) == vec_scale(v, r * s)
    assert vec_scale(v, r) + vec_scale(v, s) == vec_scale(v, r + s)


@settings(derandomize=True, max_examples=60)
@given(vectors, st.integers(min_value=0, max_value=4))
def test_whole_copy_scaling_keeps_noisy_counts_integral(v, n):
    scaled = vec_scale(v, n)
    for kind, coeff in scaled.terms:
        if kind.is_noisy:
            assert coeff.as_constant().denominator == 1
