"""Concrete channel families, the named-object registry, and numeric rate
reporting for resource inequalities.

Families (all on one qubit in): erasure (output qubit + flag, d_out=3),
depolarizing, dephasing (off-diagonals scaled by 1-p), amplitude_damping,
identity.  Rates are always evaluated on the tripartite pure state built
from the object: a purification for states, the dilated channel output on
half of a maximally entangled input for channels (unless another input is
supplied).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np

from .algebra import ResourceInequality, ResourceTag, ResourceVector
from .entropy import (
    DensityOp,
    QuantumChannel,
    TripartitePureState,
    ValidationError,
    channel_state,
    evaluate,
    maximally_entangled,
    purify,
    reduced,
)

_QUBIT_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def identity_channel(dim: int = 2) -> QuantumChannel:
    return QuantumChannel((np.eye(dim, dtype=complex),))


def erasure_channel(p: float) -> QuantumChannel:
    """With probability p the qubit is replaced by a flag state |2>."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"erasure parameter {p} outside [0, 1]")
    keep = np.zeros((3, 2), dtype=complex)
    keep[0, 0] = keep[1, 1] = math.sqrt(1.0 - p)
    erase0 = np.zeros((3, 2), dtype=complex)
    erase0[2, 0] = math.sqrt(p)
    erase1 = np.zeros((3, 2), dtype=complex)
    erase1[2, 1] = math.sqrt(p)
    return QuantumChannel((keep, erase0, erase1))


def depolarizing_channel(p: float) -> QuantumChannel:
    """rho -> (1-p) rho + p I/2 (fully depolarizing at p=1)."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"depolarizing parameter {p} outside [0, 1]")
    weights = {"I": 1.0 - 3.0 * p / 4.0, "X": p / 4.0, "Y": p / 4.0, "Z": p / 4.0}
    return QuantumChannel(tuple(
        math.sqrt(w) * _QUBIT_PAULI[name] for name, w in weights.items()
    ))


def dephasing_channel(p: float) -> QuantumChannel:
    """Off-diagonal terms scaled by 1-p (complete dephasing at p=1)."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"dephasing parameter {p} outside [0, 1]")
    return QuantumChannel((
        math.sqrt(1.0 - p / 2.0) * _QUBIT_PAULI["I"],
        math.sqrt(p / 2.0) * _QUBIT_PAULI["Z"],
    ))


def amplitude_damping_channel(p: float) -> QuantumChannel:
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"amplitude damping parameter {p} outside [0, 1]")
    k0 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - p)]], dtype=complex)
    k1 = np.array([[0.0, math.sqrt(p)], [0.0, 0.0]], dtype=complex)
    return QuantumChannel((k0, k1))


CHANNEL_FAMILIES: dict[str, Callable[[float], QuantumChannel]] = {
    "identity": lambda p: identity_channel(2),
    "erasure": erasure_channel,
    "depolarizing": depolarizing_channel,
    "dephasing": dephasing_channel,
    "amplitude_damping": amplitude_damping_channel,
}


def family_channel(name: str, p: float = 0.0) -> QuantumChannel:
    if name not in CHANNEL_FAMILIES:
        raise ValidationError(
            f"unknown channel family {name!r}; known: {sorted(CHANNEL_FAMILIES)}"
        )
    return CHANNEL_FAMILIES[name](p)


# ---------------------------------------------------------------------------
# Registered objects (named states and channels)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RegisteredState:
    name: str
    rho: DensityOp
    split: tuple[int, int]

    kind = "state"

    def tripartite(self, phi=None) -> TripartitePureState:
        return purify(self.rho, self.split)


@dataclass(frozen=True)
class RegisteredChannel:
    name: str
    channel: QuantumChannel

    kind = "channel"

    def tripartite(self, phi=None) -> TripartitePureState:
        return channel_state(self.channel, phi)


RegisteredObject = RegisteredState | RegisteredChannel


def bell_state() -> RegisteredState:
    phi = maximally_entangled(2)
    return RegisteredState("bell", DensityOp(np.outer(phi, phi.conj())), (2, 2))


def state_from_channel(name: str, channel: QuantumChannel) -> RegisteredState:
    """The bipartite state left by sending half of |Phi_+> through a channel."""
    psi = channel_state(channel)
    return RegisteredState(
        name, reduced(psi, "AB"), (psi.dims[0], psi.dims[1])
    )


def builtin_objects() -> dict[str, RegisteredObject]:
    """Example registry used by docs, the CLI and cross-layer checks."""
    objects: list[RegisteredObject] = [
        bell_state(),
        state_from_channel("erasure_state_p25", erasure_channel(0.25)),
        state_from_channel("depolarizing_state_p50", depolarizing_channel(0.5)),
        RegisteredChannel("identity", identity_channel(2)),
        RegisteredChannel("erasure_p25", erasure_channel(0.25)),
        RegisteredChannel("dephasing_p30", dephasing_channel(0.3)),
        RegisteredChannel("amplitude_damping_p40", amplitude_damping_channel(0.4)),
    ]
    return {obj.name: obj for obj in objects}


def _complex_array(pairs: Sequence, count: int, what: str) -> np.ndarray:
    if len(pairs) != count:
        raise ValidationError(f"{what}: expected {count} complex pairs, got {len(pairs)}")
    return np.array([complex(re, im) for re, im in pairs])


def load_registry(path) -> dict[str, RegisteredObject]:
    """Load named objects from JSON: a list (or single object) of entries
    {name, kind: "state"|"channel", dims, data} with data as row-major
    [re, im] pairs — the full density matrix for states (dims [dA, dB]),
    concatenated Kraus operators for channels (dims [d_in, d_out, n_kraus]).
    """
    with open(path) as fh:
        raw = json.load(fh)
    entries = raw if isinstance(raw, list) else [raw]
    registry: dict[str, RegisteredObject] = {}
    for entry in entries:
        name, kind, dims = entry["name"], entry["kind"], entry["dims"]
        if kind == "state":
            d_a, d_b = dims
            dim = d_a * d_b
            data = _complex_array(entry["data"], dim * dim, name)
            registry[name] = RegisteredState(name, DensityOp(data.reshape(dim, dim)), (d_a, d_b))
        elif kind == "channel":
            d_in, d_out, n_kraus = dims
            data = _complex_array(entry["data"], d_in * d_out * n_kraus, name)
            kraus = tuple(data.reshape(n_kraus, d_out, d_in))
            registry[name] = RegisteredChannel(name, QuantumChannel(kraus))
        else:
            raise ValidationError(f"entry {name!r} has unknown kind {kind!r}")
    return registry


def registry_entry_json(obj: RegisteredObject) -> dict:
    if isinstance(obj, RegisteredState):
        flat = obj.rho.matrix.reshape(-1)
        return {
            "name": obj.name,
            "kind": "state",
            "dims": list(obj.split),
            "data": [[z.real, z.imag] for z in flat],
        }
    flat = np.concatenate([k.reshape(-1) for k in obj.channel.kraus])
    return {
        "name": obj.name,
        "kind": "channel",
        "dims": [obj.channel.d_in, obj.channel.d_out, obj.channel.d_env],
        "data": [[z.real, z.imag] for z in flat],
    }


# ---------------------------------------------------------------------------
# Rate tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RateEntry:
    kind_token: str
    rate: float | None       # evaluated coefficient for noiseless resources
    copies: int | None       # whole copies for noisy resources

    def render(self) -> str:
        if self.copies is not None:
            noun = "copy" if self.copies == 1 else "copies"
            return f"{self.copies} {noun} of {self.kind_token}"
        return f"{self.rate:.12g} {self.kind_token}"


@dataclass(frozen=True)
class RateTable:
    ri_name: str
    mode: str
    object_name: str
    lhs: tuple[RateEntry, ...]
    rhs: tuple[RateEntry, ...]

    def render(self) -> str:
        lines = [f"{self.ri_name} [{self.mode}] on {self.object_name}"]
        lines.append("  inputs:  " + (" + ".join(e.render() for e in self.lhs) or "0"))
        lines.append("  outputs: " + (" + ".join(e.render() for e in self.rhs) or "0"))
        return "\n".join(lines)


def _side_entries(side: ResourceVector, obj: RegisteredObject,
                  psi: TripartitePureState) -> tuple[RateEntry, ...]:
    entries = []
    for kind, coeff in side.terms:
        if kind.is_noisy:
            wanted = "state" if kind.tag is ResourceTag.NOISY_STATE else "channel"
            if wanted != obj.kind:
                raise ValidationError(
                    f"{kind.token} needs a {wanted}, but {obj.name!r} is a {obj.kind}"
                )
            if kind.handle is not None and kind.handle != obj.name:
                raise ValidationError(
                    f"{kind.token} is pinned to {kind.handle!r}, got {obj.name!r}"
                )
            entries.append(RateEntry(kind.token, None, int(coeff.as_constant())))
        else:
            entries.append(RateEntry(kind.token, evaluate(coeff, psi), None))
    return tuple(entries)


def rate_table(ri: ResourceInequality, obj: RegisteredObject,
               phi: np.ndarray | None = None) -> RateTable:
    """Numeric instantiation of an inequality on a registered object."""
    psi = obj.tripartite(phi)
    return RateTable(
        ri_name=ri.name,
        mode=ri.mode.value,
        object_name=f"{obj.kind} {obj.name}",
        lhs=_side_entries(ri.lhs, obj, psi),
        rhs=_side_entries(ri.rhs, obj, psi),
    )


# ---------------------------------------------------------------------------
# Parameter sweeps
# ---------------------------------------------------------------------------

SWEEP_HEADER = ("param", "H_A", "H_B", "H_E", "I_AB", "I_AE", "Ic")

_SWEEP_EXPRS = (
    {"H(A)": 1},
    {"H(B)": 1},
    {"H(E)": 1},
    {"I(A:B)": 1},
    {"I(A:E)": 1},
    {"Ic(A>B)": 1},
)


def sweep(family: str, params: Sequence[float | Fraction],
          extra_exprs: Sequence[Mapping[str, object]] = ()) -> list[tuple[float, ...]]:
    """One row per parameter: the six standard quantities (plus any extra
    expressions) on the channel state with maximally entangled input."""
    rows = []
    for p in params:
        psi = channel_state(family_channel(family, float(p)))
        values = [evaluate(expr, psi) for expr in (*_SWEEP_EXPRS, *extra_exprs)]
        rows.append((float(p), *values))
    return rows


def sweep_csv(family: str, params: Sequence[float | Fraction],
              extra_headers: Sequence[str] = (),
              extra_exprs: Sequence[Mapping[str, object]] = ()) -> str:
    """CSV rendering with 12 significant digits, rows in grid order."""
    lines = [",".join((*SWEEP_HEADER, *extra_headers))]
    for row in sweep(family, params, extra_exprs):
        lines.append(",".join(f"{value:.12g}" for value in row))
    return "\n".join(lines) + "\n"
