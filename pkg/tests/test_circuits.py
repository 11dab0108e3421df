import itertools

import numpy as np
import pytest

from qfamily.algebra import COBIT, EBIT, QUBIT_CHANNEL
from qfamily.circuits import (
    BELL,
    PLUS,
    LocalityError,
    Party,
    Register,
    demo_rule_I_on_teleportation,
    demo_rule_O_on_superdense,
    run_cobit_checks,
    run_coherent_superdense,
    run_coherent_teleportation,
    run_entanglement_distribution,
    run_superdense,
    run_teleportation,
    state_fidelity,
    verify_all,
    verify_cobit_equivalence,
)
from qfamily.derivation import COHERENT_SD, COHERENT_TP, standard_registry
from qfamily.rng import SplitMix64, random_pure

REGISTRY = standard_registry()


# -- register discipline -------------------------------------------------------


def test_gates_cannot_span_parties():
    reg = Register()
    a = reg.add_qubit(Party.ALICE)
    b = reg.add_qubit(Party.BOB)
    with pytest.raises(LocalityError):
        reg.cnot(a, b)
    with pytest.raises(LocalityError):
        reg.cz(a, b)


def test_cobit_source_must_be_alices():
    reg = Register()
    q = reg.add_qubit(Party.BOB)
    with pytest.raises(LocalityError, match="Alice"):
        reg.cobit(q)


def test_send_books_a_channel_use():
    reg = Register()
    q = reg.add_qubit(Party.ALICE)
    reg.send(q, Party.BOB)
    assert reg.ledger.consumed[QUBIT_CHANNEL] == 1
    assert reg.owners[q] is Party.BOB


def test_measurement_branches_and_norms():
    reg = Register()
    q = reg.add_qubit(Party.ALICE, PLUS)
    branches = reg.measure([q])
    assert [b.outcome for b in branches] == [(0,), (1,)]
    for branch in branches:
        assert branch.probability == pytest.approx(0.5, abs=1e-12)
        assert np.linalg.norm(branch.register.amps) == pytest.approx(1.0, abs=1e-12)


# -- teleportation ---------------------------------------------------------------


@pytest.mark.parametrize("amplitudes", [(1, 0), (0, 1), PLUS])
def test_teleportation_exact_on_fixed_inputs(amplitudes):
    run = run_teleportation(amplitudes)
    assert len(run.branch_fidelities) == 4
    assert run.min_fidelity >= 1 - 1e-10


def test_teleportation_on_random_inputs():
    rng = SplitMix64(21)
    worst = min(run_teleportation(random_pure(rng, 2)).min_fidelity for _ in range(50))
    assert worst >= 1 - 1e-10


def test_teleportation_ledger_matches_its_inequality():
    assert run_teleportation(PLUS).ledger.matches(REGISTRY["tp"])


def test_no_signalling_before_the_classical_bits():
    run = run_teleportation((0.6, 0.8))
    assert np.max(np.abs(run.bob_premeasurement_dm - np.eye(2) / 2)) < 1e-12


# -- superdense coding ------------------------------------------------------------


def test_superdense_decodes_all_messages():
    for bits in itertools.product((0, 1), repeat=2):
        run = run_superdense(bits)
        assert run.decoded == bits
        assert run.ledger.matches(REGISTRY["sd"])


# -- entanglement distribution ----------------------------------------------------


def test_entanglement_distribution():
    run = run_entanglement_distribution()
    assert run.fidelity >= 1 - 1e-12
    assert abs(run.bob_entropy - 1.0) < 1e-9
    assert run.ledger.matches(REGISTRY["qe"])


def test_three_rounds_give_three_bell_pairs():
    reg = Register()
    for _ in range(3):
        q0 = reg.add_qubit(Party.ALICE)
        q1 = reg.add_qubit(Party.ALICE)
        reg.h(q0)
        reg.cnot(q0, q1)
        reg.send(q1, Party.BOB)
    target = np.kron(np.kron(BELL, BELL), BELL)
    assert state_fidelity(reg.amps, target) >= 1 - 1e-12
    assert reg.ledger.consumed[QUBIT_CHANNEL] == 3


# -- the cobit channel --------------------------------------------------------------


def test_cobit_copies_basis_states():
    run = run_cobit_checks()
    assert min(run.basis_fidelities) >= 1 - 1e-12


def test_cobit_creates_entanglement_from_plus():
    run = run_cobit_checks()
    assert run.plus_bell_fidelity >= 1 - 1e-12
    assert abs(run.bob_entropy_on_plus - 1.0) < 1e-9


def test_cobit_applied_twice_copies_twice():
    reg = Register()
    src = reg.add_qubit(Party.ALICE, (0, 1))
    reg.cobit(src)
    reg.cobit(src)
    want = np.zeros(8, dtype=complex)
    want[7] = 1.0
    assert state_fidelity(reg.amps, want) >= 1 - 1e-12
    assert reg.ledger.consumed[COBIT] == 2


# -- coherent protocols ---------------------------------------------------------------


def test_coherent_superdense_on_basis_message():
    message = np.zeros(4)
    message[2] = 1.0  # |10>
    run = run_coherent_superdense(message)
    assert run.fidelity >= 1 - 1e-10
    assert run.ledger.matches(COHERENT_SD)


def test_coherent_superdense_on_uniform_message_makes_two_ebits():
    run = run_coherent_superdense(np.full(4, 0.5))
    assert run.fidelity >= 1 - 1e-10
    # across the (message, copy) pairing the state is exactly two EPR pairs
    paired = np.zeros((2, 2, 2, 2), dtype=complex)
    for z in (0, 1):
        for x in (0, 1):
            paired[z, x, z, x] = 0.5
    assert state_fidelity(run.final_state, paired.reshape(-1)) >= 1 - 1e-10


def test_coherent_superdense_product_message_stays_product():
    run = run_coherent_superdense((1, 0, 0, 0))
    want = np.zeros(16, dtype=complex)
    want[0] = 1.0
    assert state_fidelity(run.final_state, want) >= 1 - 1e-12


def test_coherent_teleportation_fixed_input():
    run = run_coherent_teleportation((0, 1))
    assert run.output_fidelity >= 1 - 1e-10
    assert run.residual_fidelity >= 1 - 1e-10
    assert run.ledger.matches(COHERENT_TP)


def test_coherent_teleportation_random_inputs():
    rng = SplitMix64(22)
    for _ in range(50):
        run = run_coherent_teleportation(random_pure(rng, 2))
        assert min(run.output_fidelity, run.residual_fidelity) >= 1 - 1e-10


def test_coherent_teleportation_net_is_the_catalytic_identity():
    run = run_coherent_teleportation(PLUS)
    assert run.ledger.net() == {COBIT: -2, QUBIT_CHANNEL: 1, EBIT: 1}


def test_cobit_equivalence_composes_to_zero():
    report = verify_cobit_equivalence()
    assert report.passed
    assert report.forward.net() == {COBIT: 2, QUBIT_CHANNEL: -1, EBIT: -1}
    assert report.reverse.net() == {COBIT: -2, QUBIT_CHANNEL: 1, EBIT: 1}
    assert all(v == 0 for v in report.net.values())


# -- rule demonstrations -----------------------------------------------------------------


def test_rule_I_demo_uniform_and_decoupled():
    demo = demo_rule_I_on_teleportation()
    assert demo.passed
    assert sorted(demo.outcome_probabilities) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    for p in demo.outcome_probabilities.values():
        assert abs(p - 0.25) <= 1e-12
    assert demo.min_pairwise_overlap >= 1 - 1e-12
    assert demo.coherent_fidelity >= 1 - 1e-12


def test_rule_O_demo_residual_is_message_independent():
    demo = demo_rule_O_on_superdense()
    assert demo.passed
    assert demo.all_decoded
    assert min(demo.residual_bell_fidelities.values()) >= 1 - 1e-12
    assert demo.min_pairwise_residual_overlap >= 1 - 1e-12


# -- suite -------------------------------------------------------------------------------


def test_verify_all_reports_seven_protocols_and_two_demos():
    report = verify_all(trials=10, seed=3)
    names = [entry["name"] for entry in report["protocols"]]
    assert names == [
        "teleportation",
        "superdense",
        "entanglement_distribution",
        "cobit",
        "coherent_superdense",
        "coherent_teleportation",
        "cobit_equivalence",
    ]
    assert all(entry["pass"] for entry in report["protocols"])
    assert [d["name"] for d in report["rule_demos"]] == [
        "rule_I_on_teleportation",
        "rule_O_on_superdense",
    ]
    assert report["pass"]
