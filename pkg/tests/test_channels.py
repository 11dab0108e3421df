import json
import math

import numpy as np
import pytest

from qfamily.channels import (
    RegisteredChannel,
    builtin_objects,
    erasure_channel,
    family_channel,
    identity_channel,
    load_registry,
    rate_table,
    registry_entry_json,
    sweep,
    sweep_csv,
)
from qfamily.derivation import derive_family
from qfamily.entropy import ValidationError, channel_state, entropy, reduced


def erasure_marginal_entropies(p: float) -> tuple[float, float]:
    """Independent oracle: the reduced spectra are known in closed form."""

    def h(eigenvalues):
        return -sum(l * math.log2(l) for l in eigenvalues if l > 1e-12)

    return h([(1 - p) / 2, (1 - p) / 2, p]), h([p / 2, p / 2, 1 - p])


@pytest.mark.parametrize("p", [0.0, 0.1, 0.35, 0.5, 0.8, 1.0])
def test_erasure_reduced_spectra_against_closed_form(p):
    psi = channel_state(erasure_channel(p))
    h_b, h_e = erasure_marginal_entropies(p)
    assert abs(entropy(reduced(psi, "B")) - h_b) < 1e-9
    assert abs(entropy(reduced(psi, "E")) - h_e) < 1e-9


def test_erasure_sweep_matches_linear_formulas():
    params = [i / 4 for i in range(5)]
    rows = sweep("erasure", params)
    ic_column = [row[6] for row in rows]
    assert ic_column == pytest.approx([1, 0.5, 0, -0.5, -1], abs=1e-9)
    for row in rows:
        p = row[0]
        assert abs(row[4] - (2 - 2 * p)) < 1e-9       # I_AB
        assert abs(row[4] + row[5] - 2 * row[1]) < 1e-9  # I_AB + I_AE = 2 H_A


def test_any_family_at_zero_is_the_identity_channel():
    for family in ("erasure", "depolarizing", "dephasing", "amplitude_damping"):
        psi = channel_state(family_channel(family, 0.0))
        h = {s: entropy(reduced(psi, s)) for s in ("A", "B", "E")}
        assert abs((h["A"] + h["B"] - h["E"]) - 2.0) < 1e-9   # I(A:B) = 2
        assert abs((h["B"] - h["E"]) - 1.0) < 1e-9            # Ic = 1


def test_sweep_csv_shape_and_precision():
    text = sweep_csv("erasure", [0, 0.25, 0.5, 0.75, 1])
    lines = text.strip().split("\n")
    assert lines[0] == "param,H_A,H_B,H_E,I_AB,I_AE,Ic"
    assert len(lines) == 6
    assert lines[3].startswith("0.5,")


def test_out_of_domain_parameter_rejected():
    with pytest.raises(ValidationError):
        family_channel("erasure", 1.5)
    with pytest.raises(ValidationError, match="unknown channel family"):
        family_channel("teleporter", 0.5)


# -- rate tables --------------------------------------------------------------


@pytest.fixture(scope="module")
def family():
    return derive_family()


@pytest.fixture(scope="module")
def objects():
    return builtin_objects()


def test_eq5_rate_on_identity_channel(family, objects):
    table = rate_table(family["eq5"], objects["identity"])
    assert table.rhs[0].kind_token == "[q->q]"
    assert abs(table.rhs[0].rate - 1.0) < 1e-9
    assert table.lhs[0].copies == 1


def test_eq5_rate_on_quarter_erasure(family, objects):
    table = rate_table(family["eq5"], objects["erasure_p25"])
    assert abs(table.rhs[0].rate - 0.5) < 1e-9


def test_eq4_rate_on_fully_depolarizing_channel(family):
    useless = RegisteredChannel("depolarizing_p100", family_channel("depolarizing", 1.0))
    table = rate_table(family["eq4"], useless)
    assert abs(table.rhs[0].rate) < 1e-9


def test_parents_are_trivial_on_noiseless_objects(family, objects):
    table = rate_table(family["mother"], objects["bell"])
    rates = {e.kind_token: e.rate for e in table.lhs if e.rate is not None}
    assert abs(rates["[q->q]"]) < 1e-9
    assert abs(table.rhs[0].rate - 1.0) < 1e-9


def test_rate_table_values_equal_direct_evaluation(family, objects):
    from qfamily.entropy import evaluate

    ri = family["eq2"]
    obj = objects["erasure_state_p25"]
    psi = obj.tripartite()
    table = rate_table(ri, obj)
    for side_vec, side_entries in ((ri.lhs, table.lhs), (ri.rhs, table.rhs)):
        for (kind, coeff), entry in zip(side_vec.terms, side_entries):
            if entry.rate is not None:
                assert entry.rate == evaluate(coeff, psi)


def test_rate_table_rejects_wrong_object_kind(family, objects):
    with pytest.raises(ValidationError, match="needs a state"):
        rate_table(family["mother"], objects["identity"])
    with pytest.raises(ValidationError, match="needs a channel"):
        rate_table(family["father"], objects["bell"])


def test_rate_table_respects_handle_pinning(objects):
    from qfamily.algebra import EBIT, ResourceInequality, noisy_state, vec

    pinned = ResourceInequality(
        name="pinned", lhs=vec(1, noisy_state("werner")), rhs=vec(1, EBIT)
    )
    with pytest.raises(ValidationError, match="pinned"):
        rate_table(pinned, objects["bell"])


# -- registry ------------------------------------------------------------------


def test_registry_json_round_trip(tmp_path, objects):
    entries = [registry_entry_json(obj) for obj in objects.values()]
    path = tmp_path / "registry.json"
    path.write_text(json.dumps(entries))
    loaded = load_registry(path)
    assert set(loaded) == set(objects)
    bell = loaded["bell"]
    assert bell.kind == "state"
    assert np.max(np.abs(bell.rho.matrix - objects["bell"].rho.matrix)) < 1e-12
    erasure = loaded["erasure_p25"]
    assert erasure.kind == "channel"
    for ours, theirs in zip(erasure.channel.kraus, objects["erasure_p25"].channel.kraus):
        assert np.max(np.abs(ours - theirs)) < 1e-12


def test_registry_rejects_malformed_entries(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps([{"name": "x", "kind": "spin", "dims": [2], "data": []}]))
    with pytest.raises(ValidationError, match="unknown kind"):
        load_registry(path)


def test_identity_channel_arbitrary_dimension():
    psi = channel_state(identity_channel(3))
    assert abs(entropy(reduced(psi, "A")) - math.log2(3)) < 1e-9
