"""Exact symbolic algebra for two-party information resources.

Six resource kinds (classical bits, qubit channels, ebits, coherent bits,
noisy states, noisy channels) with entropic-expression coefficients form
linear resource vectors, and a pair of vectors plus a mode forms a resource
inequality: the statement that the left side can simulate the right side,
either exactly or asymptotically.

Coefficients live in a four-dimensional rational space spanned by
{1, H(A), H(B), H(E)}, the independent one-party entropies of a tripartite
pure state.  All derived quantities (two-party entropies, mutual
informations, coherent information) are eliminated at construction using
the pure-state relations H(AB)=H(E), H(AE)=H(B), H(BE)=H(A), H(ABE)=0,
which makes identities such as

    1/2 I(A:B) + 1/2 I(A:E) = H(A)
    1/2 I(A:B) - 1/2 I(A:E) = Ic(A>B)

hold by construction.  Everything here is an immutable value with exact
rational arithmetic; no floats enter the symbolic layer.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Tuple, Union


class AlgebraError(ValueError):
    """Invalid construction or arithmetic in the resource algebra."""


class SymbolError(AlgebraError):
    """An entropic symbol outside the supported raw vocabulary."""


class LinearityError(AlgebraError):
    """Product of two non-constant entropic expressions."""


RationalLike = Union[int, Fraction, str]


def as_fraction(x: RationalLike) -> Fraction:
    """Coerce an exact rational; floats are rejected to keep the layer exact."""
    if isinstance(x, bool) or isinstance(x, float):
        raise AlgebraError(f"symbolic coefficients must be exact rationals, got {x!r}")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise AlgebraError(f"cannot interpret {x!r} as a rational")


class Gen(Enum):
    """Canonical generators of the entropic coefficient space."""

    CONST = "CONST"
    H_A = "H_A"
    H_B = "H_B"
    H_E = "H_E"


_GEN_ORDER = {Gen.CONST: 0, Gen.H_A: 1, Gen.H_B: 2, Gen.H_E: 3}

# Raw vocabulary -> canonical expansion.  The two-party entropies collapse
# via purity of |psi>^ABE; information quantities expand by definition.
_RAW_SYMBOLS: dict[str, dict[Gen, int]] = {
    "1": {Gen.CONST: 1},
    "CONST": {Gen.CONST: 1},
    "H(A)": {Gen.H_A: 1},
    "H(B)": {Gen.H_B: 1},
    "H(E)": {Gen.H_E: 1},
    "H(AB)": {Gen.H_E: 1},
    "H(AE)": {Gen.H_B: 1},
    "H(BE)": {Gen.H_A: 1},
    "H(ABE)": {},
    "I(A:B)": {Gen.H_A: 1, Gen.H_B: 1, Gen.H_E: -1},
    "I(A:E)": {Gen.H_A: 1, Gen.H_B: -1, Gen.H_E: 1},
    "Ic(A>B)": {Gen.H_B: 1, Gen.H_E: -1},
}


@dataclass(frozen=True)
class EntropicExpr:
    """Rational linear combination of {1, H(A), H(B), H(E)} in canonical form."""

    coeffs: Tuple[Tuple[Gen, Fraction], ...] = ()

    def __post_init__(self):
        cleaned: dict[Gen, Fraction] = {}
        for gen, value in self.coeffs:
            if not isinstance(gen, Gen):
                raise AlgebraError(f"not a canonical generator: {gen!r}")
            value = as_fraction(value)
            if value != 0:
                cleaned[gen] = cleaned.get(gen, Fraction(0)) + value
        ordered = tuple(
            (gen, cleaned[gen])
            for gen in sorted(cleaned, key=_GEN_ORDER.__getitem__)
            if cleaned[gen] != 0
        )
        object.__setattr__(self, "coeffs", ordered)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def constant(value: RationalLike) -> "EntropicExpr":
        return EntropicExpr(((Gen.CONST, as_fraction(value)),))

    @staticmethod
    def generator(gen: Gen) -> "EntropicExpr":
        return EntropicExpr(((gen, Fraction(1)),))

    @staticmethod
    def zero() -> "EntropicExpr":
        return EntropicExpr()

    # -- inspection --------------------------------------------------------

    def coeff(self, gen: Gen) -> Fraction:
        for g, v in self.coeffs:
            if g is gen:
                return v
        return Fraction(0)

    def as_dict(self) -> dict[Gen, Fraction]:
        return dict(self.coeffs)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def as_constant(self) -> Fraction | None:
        """The value if this expression is a pure constant, else None."""
        if self.is_zero:
            return Fraction(0)
        if len(self.coeffs) == 1 and self.coeffs[0][0] is Gen.CONST:
            return self.coeffs[0][1]
        return None

    def is_definitely_negative(self) -> bool:
        """True when every canonical coefficient is <= 0 and some is < 0.

        Entropies are nonnegative on every state, so such an expression is
        negative wherever it is nonzero.  Mixed-sign expressions (e.g. the
        coherent information) are sign-indefinite and not flagged.
        """
        return bool(self.coeffs) and all(v < 0 for _, v in self.coeffs)

    # -- arithmetic (module over the rationals) ----------------------------

    def __add__(self, other: "EntropicExpr") -> "EntropicExpr":
        if not isinstance(other, EntropicExpr):
            return NotImplemented
        return EntropicExpr(self.coeffs + other.coeffs)

    def __sub__(self, other: "EntropicExpr") -> "EntropicExpr":
        if not isinstance(other, EntropicExpr):
            return NotImplemented
        return self + (-other)

    def __neg__(self) -> "EntropicExpr":
        return EntropicExpr(tuple((g, -v) for g, v in self.coeffs))

    def __mul__(self, other) -> "EntropicExpr":
        if isinstance(other, EntropicExpr):
            c = other.as_constant()
            if c is None:
                c_self = self.as_constant()
                if c_self is None:
                    raise LinearityError(
                        "product of two non-constant entropic expressions; "
                        "the calculus is linear"
                    )
                return other * c_self
            return self * c
        scalar = as_fraction(other)
        return EntropicExpr(tuple((g, v * scalar) for g, v in self.coeffs))

    __rmul__ = __mul__

    def __truediv__(self, other: RationalLike) -> "EntropicExpr":
        return self * (Fraction(1) / as_fraction(other))

    def value(self, h_a: float, h_b: float, h_e: float) -> float:
        """Numeric value given the three one-party entropies (in bits)."""
        total = 0.0
        for gen, coeff in self.coeffs:
            basis = {Gen.CONST: 1.0, Gen.H_A: h_a, Gen.H_B: h_b, Gen.H_E: h_e}[gen]
            total += float(coeff) * basis
        return total

    def __str__(self) -> str:
        from . import grammar

        return grammar.format_expr(self)


ZERO = EntropicExpr.zero()
ONE = EntropicExpr.constant(1)
H_A = EntropicExpr.generator(Gen.H_A)
H_B = EntropicExpr.generator(Gen.H_B)
H_E = EntropicExpr.generator(Gen.H_E)


def canonicalize(raw: Union["EntropicExpr", Mapping[str, RationalLike]]) -> EntropicExpr:
    """Project a raw entropic expression onto the canonical generator set.

    `raw` maps symbol names ("1", "H(A)".."H(ABE)", "I(A:B)", "I(A:E)",
    "Ic(A>B)"; ';' is accepted for ':') to rational coefficients.  Canonical
    expressions pass through unchanged, making the map idempotent.
    """
    if isinstance(raw, EntropicExpr):
        return raw
    terms: list[Tuple[Gen, Fraction]] = []
    for symbol, coeff in raw.items():
        key = symbol.replace(";", ":").replace(" ", "")
        if key not in _RAW_SYMBOLS:
            raise SymbolError(f"unknown entropic symbol: {symbol!r}")
        c = as_fraction(coeff)
        for gen, weight in _RAW_SYMBOLS[key].items():
            terms.append((gen, c * weight))
    return EntropicExpr(tuple(terms))


I_AB = canonicalize({"I(A:B)": 1})
I_AE = canonicalize({"I(A:E)": 1})
I_COH = canonicalize({"Ic(A>B)": 1})
HALF = Fraction(1, 2)


# ---------------------------------------------------------------------------
# Resource kinds
# ---------------------------------------------------------------------------


class ResourceTag(Enum):
    CBIT = "[c->c]"
    QUBIT_CHANNEL = "[q->q]"
    EBIT = "[qq]"
    COBIT = "[q->qq]"
    NOISY_STATE = "{qq}"
    NOISY_CHANNEL = "{q->q}"


_TAG_ORDER = {tag: i for i, tag in enumerate(ResourceTag)}
_NOISY_TAGS = frozenset({ResourceTag.NOISY_STATE, ResourceTag.NOISY_CHANNEL})
_DUAL_TAG = {
    ResourceTag.CBIT: ResourceTag.CBIT,
    ResourceTag.COBIT: ResourceTag.COBIT,
    ResourceTag.EBIT: ResourceTag.QUBIT_CHANNEL,
    ResourceTag.QUBIT_CHANNEL: ResourceTag.EBIT,
    ResourceTag.NOISY_STATE: ResourceTag.NOISY_CHANNEL,
    ResourceTag.NOISY_CHANNEL: ResourceTag.NOISY_STATE,
}


@dataclass(frozen=True)
class ResourceKind:
    """One of the six resource kinds; noisy kinds may carry an object handle.

    Handles are opaque names resolved against a concrete state/channel
    registry only at numeric-evaluation time.
    """

    tag: ResourceTag
    handle: str | None = None

    def __post_init__(self):
        if self.handle is not None and self.tag not in _NOISY_TAGS:
            raise AlgebraError(f"{self.tag.value} cannot carry a handle")

    @property
    def is_noisy(self) -> bool:
        return self.tag in _NOISY_TAGS

    @property
    def token(self) -> str:
        if self.handle is None:
            return self.tag.value
        return self.tag.value[:-1] + ":" + self.handle + self.tag.value[-1]

    def sort_key(self) -> tuple:
        return (_TAG_ORDER[self.tag], self.handle or "")

    def __str__(self) -> str:
        return self.token


CBIT = ResourceKind(ResourceTag.CBIT)
QUBIT_CHANNEL = ResourceKind(ResourceTag.QUBIT_CHANNEL)
EBIT = ResourceKind(ResourceTag.EBIT)
COBIT = ResourceKind(ResourceTag.COBIT)
NOISY_STATE = ResourceKind(ResourceTag.NOISY_STATE)
NOISY_CHANNEL = ResourceKind(ResourceTag.NOISY_CHANNEL)


def noisy_state(handle: str | None = None) -> ResourceKind:
    return ResourceKind(ResourceTag.NOISY_STATE, handle)


def noisy_channel(handle: str | None = None) -> ResourceKind:
    return ResourceKind(ResourceTag.NOISY_CHANNEL, handle)


# ---------------------------------------------------------------------------
# Resource vectors
# ---------------------------------------------------------------------------

CoeffLike = Union[EntropicExpr, RationalLike]


def as_expr(value: CoeffLike) -> EntropicExpr:
    if isinstance(value, EntropicExpr):
        return value
    return EntropicExpr.constant(value)


@dataclass(frozen=True)
class ResourceVector:
    """Formal linear combination of resource kinds with entropic coefficients.

    Normalized: zero terms dropped, terms in canonical kind order.  Noisy
    kinds count whole protocol copies and must carry nonnegative integer
    coefficients; noiseless coefficients are arbitrary entropic expressions.
    """

    terms: Tuple[Tuple[ResourceKind, EntropicExpr], ...] = ()

    def __post_init__(self):
        merged: dict[ResourceKind, EntropicExpr] = {}
        for kind, coeff in self.terms:
            coeff = as_expr(coeff)
            merged[kind] = merged.get(kind, ZERO) + coeff
        for kind, coeff in merged.items():
            if kind.is_noisy and not coeff.is_zero:
                c = coeff.as_constant()
                if c is None or c.denominator != 1 or c < 0:
                    raise AlgebraError(
                        f"noisy resource {kind.token} requires a nonnegative "
                        f"integer coefficient, got {coeff}"
                    )
        ordered = tuple(
            (kind, merged[kind])
            for kind in sorted(merged, key=ResourceKind.sort_key)
            if not merged[kind].is_zero
        )
        object.__setattr__(self, "terms", ordered)

    @staticmethod
    def of(entries: Union[Mapping[ResourceKind, CoeffLike],
                          Iterable[Tuple[ResourceKind, CoeffLike]]]) -> "ResourceVector":
        items = entries.items() if isinstance(entries, Mapping) else entries
        return ResourceVector(tuple((k, as_expr(v)) for k, v in items))

    def coeff(self, kind: ResourceKind) -> EntropicExpr:
        for k, v in self.terms:
            if k == kind:
                return v
        return ZERO

    def kinds(self) -> tuple[ResourceKind, ...]:
        return tuple(k for k, _ in self.terms)

    def as_dict(self) -> dict[ResourceKind, EntropicExpr]:
        return dict(self.terms)

    @property
    def is_empty(self) -> bool:
        return not self.terms

    def restricted(self, tags: Iterable[ResourceTag]) -> "ResourceVector":
        """Sub-vector keeping only the given resource tags."""
        keep = frozenset(tags)
        return ResourceVector(tuple((k, v) for k, v in self.terms if k.tag in keep))

    def __add__(self, other: "ResourceVector") -> "ResourceVector":
        if not isinstance(other, ResourceVector):
            return NotImplemented
        return ResourceVector(self.terms + other.terms)

    def scale(self, k: CoeffLike) -> "ResourceVector":
        """Multiply every coefficient by k (rational, or entropic when no
        noisy resources are present — whole copies cannot be fractional)."""
        k = as_expr(k)
        if k.as_constant() is None and any(kind.is_noisy for kind, _ in self.terms):
            raise AlgebraError(
                "scaling a vector with noisy resources requires a rational "
                "constant; entropic multiples of whole copies are undefined"
            )
        return ResourceVector(tuple((kind, coeff * k) for kind, coeff in self.terms))

    def __str__(self) -> str:
        from . import grammar

        return grammar.format_vector(self)


EMPTY_VECTOR = ResourceVector()


def vec(coeff: CoeffLike, kind: ResourceKind) -> ResourceVector:
    """Single-term vector, e.g. vec(2, CBIT) for 2 [c->c]."""
    return ResourceVector(((kind, as_expr(coeff)),))


def vec_add(a: ResourceVector, b: ResourceVector) -> ResourceVector:
    return a + b


def vec_scale(a: ResourceVector, k: CoeffLike) -> ResourceVector:
    return a.scale(k)


# ---------------------------------------------------------------------------
# Resource inequalities
# ---------------------------------------------------------------------------


class Mode(Enum):
    EXACT = "exact"          # '>=!': single-shot, zero-error simulation
    ASYMPTOTIC = "asymptotic"  # '>=': vanishing trace-distance error per copy


@dataclass(frozen=True)
class RuleFlags:
    """Certifications supplied per protocol, never inferred.

    rule_I_ok: some implementing protocol has its classical message almost
    uniformly distributed and almost decoupled at the end (the uniformity
    condition may be relaxed to n^-1 log p_x ~ const for n-letter protocols;
    that refinement is documentation only and not modeled here).
    rule_O_ok: some implementing protocol leaves the classical message
    almost decoupled from the remaining quantum system (private output).
    """

    rule_I_ok: bool = False
    rule_O_ok: bool = False


@dataclass(frozen=True)
class ResourceInequality:
    """lhs >= rhs (asymptotic) or lhs >=! rhs (exact): inputs simulate outputs."""

    name: str
    lhs: ResourceVector
    rhs: ResourceVector
    mode: Mode = Mode.ASYMPTOTIC
    flags: RuleFlags = field(default_factory=RuleFlags)
    trace: tuple = ()  # DerivationSteps; empty for primitives

    def same_statement(self, other: "ResourceInequality") -> bool:
        """Equality of the mathematical statement, ignoring name/flags/trace."""
        return (
            self.lhs == other.lhs
            and self.rhs == other.rhs
            and self.mode == other.mode
        )

    def bare(self) -> "ResourceInequality":
        """Copy without its trace (used for snapshots inside traces)."""
        return replace(self, trace=())

    def with_name(self, name: str) -> "ResourceInequality":
        return replace(self, name=name)

    def with_flags(self, rule_I_ok: bool = False, rule_O_ok: bool = False) -> "ResourceInequality":
        return replace(self, flags=RuleFlags(rule_I_ok=rule_I_ok, rule_O_ok=rule_O_ok))

    def __str__(self) -> str:
        from . import grammar

        return grammar.format_ri(self)


# ---------------------------------------------------------------------------
# Duality
# ---------------------------------------------------------------------------


def dual(x):
    """Static/dynamic duality: swaps [qq] <-> [q->q] and {qq} <-> {q->q},
    fixes [c->c] and [q->qq].  Involutive; applies termwise to vectors and
    sidewise to inequalities (mode and flags carried along)."""
    if isinstance(x, ResourceKind):
        return ResourceKind(_DUAL_TAG[x.tag], x.handle)
    if isinstance(x, ResourceVector):
        return ResourceVector(tuple((dual(k), v) for k, v in x.terms))
    if isinstance(x, ResourceInequality):
        name = x.name[5:-1] if x.name.startswith("dual(") and x.name.endswith(")") else f"dual({x.name})"
        return ResourceInequality(
            name=name,
            lhs=dual(x.lhs),
            rhs=dual(x.rhs),
            mode=x.mode,
            flags=x.flags,
        )
    raise AlgebraError(f"dual is not defined for {type(x).__name__}")
