import math

import numpy as np
import pytest

from qfamily.algebra import HALF, H_A, canonicalize
from qfamily.entropy import (
    DensityOp,
    QuantumChannel,
    TripartitePureState,
    ValidationError,
    channel_state,
    entropy,
    evaluate,
    evaluate_raw,
    maximally_entangled,
    purify,
    random_tripartite_state,
    reduced,
    stinespring,
)
from qfamily.channels import (
    amplitude_damping_channel,
    dephasing_channel,
    depolarizing_channel,
    erasure_channel,
    identity_channel,
)
from qfamily.rng import SplitMix64, random_density, random_pure, random_unitary

BELL = maximally_entangled(2)

# scalar oracle: -sum(l * log2 l) over the known eigenvalue list
WERNER_HALF_ENTROPY = 1.5487949406953985
assert abs(
    WERNER_HALF_ENTROPY - (-(0.625 * math.log2(0.625) + 3 * 0.125 * math.log2(0.125)))
) < 1e-15


def binary_entropy(p: float) -> float:
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


# -- validation --------------------------------------------------------------


def test_density_invariants_enforced():
    with pytest.raises(ValidationError, match="Hermitian"):
        DensityOp(np.array([[0.5, 0.5], [-0.5, 0.5]]))
    with pytest.raises(ValidationError, match="trace"):
        DensityOp(np.eye(2))
    with pytest.raises(ValidationError, match="eigenvalue"):
        DensityOp(np.diag([1.5, -0.5]))


def test_state_norm_enforced():
    with pytest.raises(ValidationError, match="norm"):
        TripartitePureState((2, 2, 1), np.array([1.0, 0, 0, 1.0]))


def test_channel_trace_preservation_enforced():
    with pytest.raises(ValidationError, match="trace preserving"):
        QuantumChannel((np.array([[1.0, 0.0], [0.0, 0.5]]),))


# -- entropy -----------------------------------------------------------------


def test_entropy_of_pure_and_maximally_mixed():
    assert entropy(DensityOp(np.diag([1.0, 0.0]))) == 0.0
    assert abs(entropy(DensityOp(np.eye(2) / 2)) - 1.0) < 1e-12


def test_entropy_of_werner_spectrum():
    rho = DensityOp(np.diag([0.625, 0.125, 0.125, 0.125]))
    assert abs(entropy(rho) - WERNER_HALF_ENTROPY) < 1e-12


def test_entropy_unitary_invariance():
    rng = SplitMix64(11)
    for _ in range(5):
        rho = random_density(rng, 4)
        u = random_unitary(rng, 4)
        rotated = u @ rho @ u.conj().T
        assert abs(entropy(DensityOp(rho)) - entropy(DensityOp(rotated))) < 1e-9


def test_entropy_additive_on_products():
    rng = SplitMix64(12)
    for _ in range(5):
        a = random_density(rng, 2)
        b = random_density(rng, 3)
        total = entropy(DensityOp(np.kron(a, b)))
        assert abs(total - entropy(DensityOp(a)) - entropy(DensityOp(b))) < 1e-9


# -- purification ------------------------------------------------------------


def test_purify_pure_state_needs_no_environment():
    rho = DensityOp(np.outer(BELL, BELL.conj()))
    psi = purify(rho, (2, 2))
    assert psi.dims == (2, 2, 1)
    assert abs(abs(np.vdot(psi.amplitudes, np.kron(BELL, [1.0]))) - 1.0) < 1e-9


def test_purify_maximally_mixed_two_qubits():
    psi = purify(DensityOp(np.eye(4) / 4), (2, 2))
    assert psi.dims[2] == 4
    h = {s: entropy(reduced(psi, s)) for s in ("A", "B", "E")}
    assert abs(h["A"] - 1.0) < 1e-9
    assert abs(h["B"] - 1.0) < 1e-9
    assert abs(h["E"] - 2.0) < 1e-9


def test_purify_werner_mixture_environment_entropy():
    rho = 0.5 * np.outer(BELL, BELL.conj()) + 0.5 * np.eye(4) / 4
    psi = purify(DensityOp(rho), (2, 2))
    assert abs(entropy(reduced(psi, "E")) - WERNER_HALF_ENTROPY) < 1e-9


def test_purify_then_trace_recovers_input():
    rng = SplitMix64(13)
    for _ in range(5):
        rho = random_density(rng, 6)
        psi = purify(DensityOp(rho), (2, 3))
        back = reduced(psi, "AB")
        assert np.max(np.abs(back.matrix - rho)) < 1e-9


def test_purify_split_must_factor_dimension():
    with pytest.raises(ValidationError, match="split"):
        purify(DensityOp(np.eye(4) / 4), (3, 2))


# -- dilation ----------------------------------------------------------------


def test_identity_dilation_is_trivial():
    u = stinespring(identity_channel(2))
    assert u.shape == (2, 2)
    assert np.max(np.abs(u - np.eye(2))) < 1e-12


def test_dilation_is_isometric_and_reproduces_kraus_action():
    rng = SplitMix64(14)
    for channel in (erasure_channel(0.3), depolarizing_channel(0.7),
                    amplitude_damping_channel(0.4)):
        u = stinespring(channel)
        d_env = channel.d_env
        assert u.shape == (channel.d_out * d_env, channel.d_in)
        assert np.max(np.abs(u.conj().T @ u - np.eye(channel.d_in))) < 1e-9
        for i in range(channel.d_in):
            for j in range(channel.d_in):
                basis_op = np.zeros((channel.d_in, channel.d_in), dtype=complex)
                basis_op[i, j] = 1.0
                dilated = u @ basis_op @ u.conj().T
                dilated = dilated.reshape(channel.d_out, d_env, channel.d_out, d_env)
                traced = np.trace(dilated, axis1=1, axis2=3)
                assert np.max(np.abs(traced - channel.apply(basis_op))) < 1e-9
    _ = rng


def test_fully_depolarizing_output_is_maximally_mixed():
    rng = SplitMix64(15)
    channel = depolarizing_channel(1.0)
    for _ in range(5):
        phi = random_pure(rng, 2)
        psi = channel_state(channel, phi, d_a=1)
        assert abs(entropy(reduced(psi, "B")) - 1.0) < 1e-9


# -- channel states ----------------------------------------------------------


def test_identity_channel_on_half_a_bell_pair():
    psi = channel_state(identity_channel(2))
    assert abs(evaluate_raw("H(A)", psi) - 1.0) < 1e-9
    assert evaluate_raw("H(E)", psi) < 1e-9
    assert abs(evaluate_raw("I(A:B)", psi) - 2.0) < 1e-9


@pytest.mark.parametrize("p", [0.0, 0.25, 0.5, 0.9])
def test_erasure_channel_state_marginals(p):
    psi = channel_state(erasure_channel(p))
    assert abs(evaluate_raw("H(B)", psi) - ((1 - p) + binary_entropy(p))) < 1e-9
    assert abs(evaluate_raw("H(E)", psi) - (p + binary_entropy(p))) < 1e-9
    assert abs(evaluate_raw("Ic(A>B)", psi) - (1 - 2 * p)) < 1e-9


def test_dephasing_at_zero_matches_identity():
    psi = channel_state(dephasing_channel(0.0))
    assert abs(evaluate_raw("I(A:B)", psi) - 2.0) < 1e-9
    assert abs(evaluate_raw("Ic(A>B)", psi) - 1.0) < 1e-9


def test_channel_state_dimension_mismatch_rejected():
    with pytest.raises(ValidationError):
        channel_state(erasure_channel(0.5), np.ones(6) / np.sqrt(6), d_a=2)


# -- reduced states and evaluation -------------------------------------------


def test_reduced_of_bell_is_maximally_mixed():
    psi = TripartitePureState((2, 2, 1), BELL)
    assert np.max(np.abs(reduced(psi, "A").matrix - np.eye(2) / 2)) < 1e-12


def test_reduced_of_product_state_is_pure():
    psi = TripartitePureState((2, 2, 1), np.kron([1.0, 0.0], np.kron([0.0, 1.0], [1.0])))
    assert entropy(reduced(psi, "A")) < 1e-12


def test_purity_symmetry_on_random_states():
    rng = SplitMix64(16)
    for _ in range(20):
        psi = random_tripartite_state(rng, rng.randint(2, 4), rng.randint(2, 4))
        for pair, solo in (("AB", "E"), ("AE", "B"), ("BE", "A")):
            gap = abs(entropy(reduced(psi, pair)) - entropy(reduced(psi, solo)))
            assert gap < 1e-9


def test_evaluate_mutual_information_on_bell():
    psi = TripartitePureState((2, 2, 1), BELL)
    assert abs(evaluate(canonicalize({"I(A:B)": 1}), psi) - 2.0) < 1e-12


def test_displayed_identity_vanishes_numerically():
    rng = SplitMix64(17)
    expr = canonicalize({"I(A:B)": HALF, "I(A:E)": HALF}) - H_A
    assert expr.is_zero
    for _ in range(10):
        psi = random_tripartite_state(rng, 3, 3)
        raw = (
            0.5 * evaluate_raw("I(A:B)", psi)
            + 0.5 * evaluate_raw("I(A:E)", psi)
            - evaluate_raw("H(A)", psi)
        )
        assert abs(raw) < 1e-9


def test_raw_symbols_match_canonical_numerically():
    rng = SplitMix64(18)
    symbols = ["H(A)", "H(B)", "H(E)", "H(AB)", "H(AE)", "H(BE)", "H(ABE)",
               "I(A:B)", "I(A:E)", "Ic(A>B)"]
    states = [
        random_tripartite_state(rng, rng.randint(2, 4), rng.randint(2, 4))
        for _ in range(100)
    ]
    for symbol in symbols:
        expr = canonicalize({symbol: 1})
        for psi in states:
            assert abs(evaluate_raw(symbol, psi) - evaluate(expr, psi)) < 1e-9
