"""Numerical backend: density operators, purifications, channel dilations,
von Neumann entropies, and evaluation of entropic expressions on concrete
tripartite pure states.

Conventions: all logarithms are base 2 (bits/ebits/qubits per copy);
eigenvalues below 1e-12 contribute 0 to entropies; amplitude layout of a
tripartite state is row-major over (A, B, E).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .algebra import EntropicExpr, Gen, canonicalize

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
NORM_TOL = 1e-10
ISOMETRY_TOL = 1e-9
EIGENVALUE_FLOOR = 1e-12


class ValidationError(ValueError):
    """A numeric object violating its defining invariants."""


@dataclass(frozen=True)
class DensityOp:
    """Validated density operator (Hermitian, unit trace, PSD within tolerance)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"density operator must be square, got shape {m.shape}")
        herm = np.max(np.abs(m - m.conj().T))
        if herm > HERMITIAN_TOL:
            raise ValidationError(f"not Hermitian: max|rho - rho^dag| = {herm:.3e} > {HERMITIAN_TOL}")
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValidationError(f"trace {tr!r} differs from 1 by more than {TRACE_TOL}")
        lo = float(np.min(np.linalg.eigvalsh((m + m.conj().T) / 2)))
        if lo < -PSD_TOL:
            raise ValidationError(f"negative eigenvalue {lo:.3e} below -{PSD_TOL}")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class TripartitePureState:
    """Unit vector on A x B x E with an explicit dimension split."""

    dims: tuple[int, int, int]
    amplitudes: np.ndarray

    def __post_init__(self):
        d_a, d_b, d_e = self.dims
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if any(d < 1 for d in self.dims):
            raise ValidationError(f"dimensions must be positive, got {self.dims}")
        if amps.size != d_a * d_b * d_e:
            raise ValidationError(
                f"amplitude length {amps.size} does not match dims {self.dims}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValidationError(f"norm {norm!r} differs from 1 by more than {NORM_TOL}")
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "amplitudes", amps)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.dims)


@dataclass(frozen=True)
class QuantumChannel:
    """CPTP map given by Kraus operators (d_out x d_in each)."""

    kraus: tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.kraus)
        if not ops:
            raise ValidationError("a channel needs at least one Kraus operator")
        d_out, d_in = ops[0].shape
        for k in ops:
            if k.shape != (d_out, d_in):
                raise ValidationError("all Kraus operators must share one shape")
        total = sum(k.conj().T @ k for k in ops)
        dev = np.max(np.abs(total - np.eye(d_in)))
        if dev > HERMITIAN_TOL:
            raise ValidationError(
                f"not trace preserving: max|sum K^dag K - I| = {dev:.3e} > {HERMITIAN_TOL}"
            )
        object.__setattr__(self, "kraus", ops)

    @property
    def d_in(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def d_out(self) -> int:
        return self.kraus[0].shape[0]

    @property
    def d_env(self) -> int:
        return len(self.kraus)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return sum(k @ rho @ k.conj().T for k in self.kraus)


# ---------------------------------------------------------------------------
# Core operations
# ---------------------------------------------------------------------------


def entropy(rho: DensityOp | np.ndarray) -> float:
    """von Neumann entropy in bits; eigenvalues < 1e-12 contribute nothing."""
    if not isinstance(rho, DensityOp):
        rho = DensityOp(rho)
    eigenvalues = np.linalg.eigvalsh(rho.matrix)
    kept = eigenvalues[eigenvalues > EIGENVALUE_FLOOR]
    return float(-np.sum(kept * np.log2(kept)))


def purify(rho: DensityOp | np.ndarray, split: tuple[int, int]) -> TripartitePureState:
    """Purification of a bipartite state: |psi>^ABE with Tr_E psi = rho.

    The environment dimension is the rank of rho (eigenvalues below 1e-12
    dropped), so pure inputs get a one-dimensional environment.
    """
    if not isinstance(rho, DensityOp):
        rho = DensityOp(rho)
    d_a, d_b = split
    if d_a * d_b != rho.dim:
        raise ValidationError(f"split {split} does not factor dimension {rho.dim}")
    eigenvalues, vectors = np.linalg.eigh(rho.matrix)
    keep = eigenvalues > EIGENVALUE_FLOOR
    eigenvalues, vectors = eigenvalues[keep], vectors[:, keep]
    d_e = int(eigenvalues.size)
    amps = np.zeros((rho.dim, d_e), dtype=complex)
    for k in range(d_e):
        amps[:, k] = np.sqrt(eigenvalues[k]) * vectors[:, k]
    return TripartitePureState((d_a, d_b, d_e), amps.reshape(d_a, d_b, d_e))


def stinespring(channel: QuantumChannel) -> np.ndarray:
    """Isometry U: d_in -> d_out * d_env with row index b*d_env + e,
    U[b*d_env + e, a] = K_e[b, a].  Tracing out the environment recovers
    the Kraus action."""
    d_out, d_in, d_env = channel.d_out, channel.d_in, channel.d_env
    u = np.zeros((d_out * d_env, d_in), dtype=complex)
    for e, k in enumerate(channel.kraus):
        for b in range(d_out):
            u[b * d_env + e, :] = k[b, :]
    dev = np.max(np.abs(u.conj().T @ u - np.eye(d_in)))
    if dev > ISOMETRY_TOL:
        raise ValidationError(f"dilation not isometric: max|U^dag U - I| = {dev:.3e}")
    return u


def channel_state(channel: QuantumChannel, phi: np.ndarray | None = None,
                  d_a: int | None = None) -> TripartitePureState:
    """Send the A' half of |phi>^AA' through the channel's dilation.

    phi is a pure state on A x A' (flat, row-major) with dim(A') = d_in;
    by default the maximally entangled state of full input dimension.
    Returns |psi>^ABE with dims (d_A, d_out, d_env).
    """
    d_in = channel.d_in
    if phi is None:
        phi = maximally_entangled(d_in)
        d_a = d_in
    phi = np.asarray(phi, dtype=complex).reshape(-1)
    if d_a is None:
        if phi.size % d_in != 0:
            raise ValidationError(f"state of size {phi.size} has no A x {d_in} split")
        d_a = phi.size // d_in
    if phi.size != d_a * d_in:
        raise ValidationError(f"state size {phi.size} does not match {d_a} x {d_in}")
    u = stinespring(channel)
    psi = (u @ phi.reshape(d_a, d_in).T).T  # (d_a, d_out*d_env)
    return TripartitePureState((d_a, channel.d_out, channel.d_env), psi)


def maximally_entangled(dim: int) -> np.ndarray:
    """|Phi_+> on two dim-dimensional systems, flat row-major."""
    phi = np.zeros(dim * dim, dtype=complex)
    phi[:: dim + 1] = 1.0 / np.sqrt(dim)
    return phi


_SUBSYSTEM_AXIS = {"A": 0, "B": 1, "E": 2}


def reduced(psi: TripartitePureState, subsystems: Iterable[str] | str) -> DensityOp:
    """Partial trace onto the named subsystems (subset of {A, B, E})."""
    names = list(subsystems)
    axes = sorted({_SUBSYSTEM_AXIS[n] for n in names})
    if not axes:
        raise ValidationError("need at least one subsystem")
    keep = axes
    drop = [ax for ax in range(3) if ax not in keep]
    t = psi.tensor()
    rho = np.tensordot(t, t.conj(), axes=(drop, drop))
    dim = int(np.prod([psi.dims[ax] for ax in keep]))
    # tensordot leaves kept-axes of t first, then kept-axes of conj(t)
    return DensityOp(rho.reshape(dim, dim))


def subsystem_entropies(psi: TripartitePureState) -> dict[str, float]:
    return {name: entropy(reduced(psi, name)) for name in ("A", "B", "E")}


def evaluate(expr: EntropicExpr | Mapping[str, object], psi: TripartitePureState) -> float:
    """Numeric value (bits) of an entropic expression on a concrete state."""
    expr = canonicalize(expr) if not isinstance(expr, EntropicExpr) else expr
    h = subsystem_entropies(psi)
    return expr.value(h["A"], h["B"], h["E"])


def evaluate_raw(symbol: str, psi: TripartitePureState) -> float:
    """Evaluate a raw symbol directly from reduced-state entropies, without
    the pure-state eliminations (independent check of canonicalize)."""
    key = symbol.replace(";", ":").replace(" ", "")
    if key in ("1", "CONST"):
        return 1.0
    if key.startswith("H(") and key.endswith(")"):
        return entropy(reduced(psi, key[2:-1]))

    def h(s: str) -> float:
        return entropy(reduced(psi, s))

    if key == "I(A:B)":
        return h("A") + h("B") - h("AB")
    if key == "I(A:E)":
        return h("A") + h("E") - h("AE")
    if key == "Ic(A>B)":
        return h("B") - h("AB")
    raise ValidationError(f"unknown raw symbol {symbol!r}")


def random_tripartite_state(rng, d_a: int, d_b: int) -> TripartitePureState:
    """Purification of a random mixed state on A x B (G G^dag normalized)."""
    from .rng import random_density

    return purify(random_density(rng, d_a * d_b), (d_a, d_b))
