"""Mechanical derivation of the protocol family by composition and rewriting.

The five registered primitives are

    mother:  1/2*I(A:E) [q->q] + {qq}    >=  1/2*I(A:B) [qq]
    father:  1/2*I(A:E) [qq]   + {q->q}  >=  1/2*I(A:B) [q->q]
    tp:      2 [c->c] + [qq]             >=! [q->q]
    sd:      [q->q] + [qq]               >=! 2 [c->c]
    qe:      [q->q]                      >=! [qq]

and every child is produced by a short script of rewrites: sequential
composition (append/prepend a tool protocol at some rate), catalytic
cancellation of equal terms on both sides (licensed only asymptotically),
wasting (adding unused inputs), and the two coherentification rules that
trade classical bits for half a qubit channel plus or minus half an ebit.
Each operation records a replayable trace step.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction

from . import grammar
from .algebra import (
    AlgebraError,
    CBIT,
    CoeffLike,
    EBIT,
    EntropicExpr,
    HALF,
    I_AB,
    I_AE,
    I_COH,
    Mode,
    NOISY_CHANNEL,
    NOISY_STATE,
    QUBIT_CHANNEL,
    COBIT,
    ResourceInequality,
    ResourceKind,
    ResourceVector,
    as_expr,
    vec,
    vec_scale,
)


class DerivationError(ValueError):
    """A rewrite whose preconditions do not hold."""


class StepKind(Enum):
    APPEND = "APPEND"
    PREPEND = "PREPEND"
    CANCEL = "CANCEL"
    RULE_I = "RULE_I"
    RULE_O = "RULE_O"
    APPLY_QE_FRACTION = "APPLY_QE_FRACTION"
    WASTE = "WASTE"


@dataclass(frozen=True)
class DerivationStep:
    """One rewrite: `after` is obtained from `before` by the named operation.

    `tool` identifies what was used: a registry name for APPEND/PREPEND/
    APPLY_QE_FRACTION, a resource token for CANCEL, a vector in grammar text
    for WASTE, and "" for the rules.  `before`/`after` are trace-free
    snapshots, so replaying a trace reproduces the stored inequality.
    """

    kind: StepKind
    tool: str
    multiplier: EntropicExpr
    before: ResourceInequality
    after: ResourceInequality


def _with_step(base: ResourceInequality, result: ResourceInequality,
               kind: StepKind, tool: str, multiplier: EntropicExpr) -> ResourceInequality:
    step = DerivationStep(kind, tool, multiplier, base.bare(), result.bare())
    return replace(result, trace=base.trace + (step,))


def _add(side: dict[ResourceKind, EntropicExpr], kind: ResourceKind, coeff: EntropicExpr):
    total = side.get(kind, EntropicExpr.zero()) + coeff
    if total.is_zero:
        side.pop(kind, None)
    else:
        side[kind] = total


def _build(name: str, lhs: dict, rhs: dict, mode: Mode) -> ResourceInequality:
    try:
        return ResourceInequality(
            name=name,
            lhs=ResourceVector.of(lhs),
            rhs=ResourceVector.of(rhs),
            mode=mode,
        )
    except AlgebraError as exc:
        raise DerivationError(str(exc)) from exc


def _check_multiplier(k: EntropicExpr):
    if k.is_definitely_negative():
        raise DerivationError(f"multiplier {k} is negative")


def _match_into(target: dict, other: dict, kind: ResourceKind, amount: EntropicExpr):
    """Consume `amount` of `kind` from `target`, re-homing any definite
    deficit (and unmatched amount for absent kinds) into `other`."""
    if kind not in target:
        _add(other, kind, amount)
        return
    remainder = target[kind] - amount
    if remainder.is_zero:
        del target[kind]
    elif remainder.is_definitely_negative():
        del target[kind]
        _add(other, kind, -remainder)
    else:
        target[kind] = remainder


def _composed_mode(a: ResourceInequality, b: ResourceInequality) -> Mode:
    if a.mode is Mode.EXACT and b.mode is Mode.EXACT:
        return Mode.EXACT
    return Mode.ASYMPTOTIC


def append(base: ResourceInequality, tool: ResourceInequality, k: CoeffLike,
           step_kind: StepKind = StepKind.APPEND) -> ResourceInequality:
    """Run `tool` (scaled by k) on the outputs of `base`.

    Tool inputs are matched against base outputs kind by kind; whatever the
    outputs cannot cover is added to the composite's input side.  A matched
    output keeps its formal remainder (e.g. consuming 1/2*I(A:E) of a
    1/2*I(A:B) output leaves Ic(A>B)).
    """
    k = as_expr(k)
    if k.is_zero:
        return base
    _check_multiplier(k)
    try:
        need = vec_scale(tool.lhs, k)
        supply = vec_scale(tool.rhs, k)
    except AlgebraError as exc:
        raise DerivationError(str(exc)) from exc
    lhs = base.lhs.as_dict()
    rhs = base.rhs.as_dict()
    for kind, amount in need.terms:
        _match_into(rhs, lhs, kind, amount)
    for kind, amount in supply.terms:
        _add(rhs, kind, amount)
    result = _build(f"append({base.name},{tool.name})", lhs, rhs, _composed_mode(base, tool))
    return _with_step(base, result, step_kind, tool.name, k)


def prepend(base: ResourceInequality, tool: ResourceInequality, k: CoeffLike) -> ResourceInequality:
    """Run `tool` (scaled by k) first, feeding its outputs into `base`.

    Mirror of append: tool outputs are matched against base inputs; tool
    outputs the base does not consume become outputs of the composite.
    """
    k = as_expr(k)
    if k.is_zero:
        return base
    _check_multiplier(k)
    try:
        need = vec_scale(tool.lhs, k)
        supply = vec_scale(tool.rhs, k)
    except AlgebraError as exc:
        raise DerivationError(str(exc)) from exc
    lhs = base.lhs.as_dict()
    rhs = base.rhs.as_dict()
    for kind, amount in supply.terms:
        _match_into(lhs, rhs, kind, amount)
    for kind, amount in need.terms:
        _add(lhs, kind, amount)
    result = _build(f"prepend({base.name},{tool.name})", lhs, rhs, _composed_mode(base, tool))
    return _with_step(base, result, StepKind.PREPEND, tool.name, k)


def cancel(ri: ResourceInequality, kind: ResourceKind, amount: CoeffLike) -> ResourceInequality:
    """Catalytic cancellation: subtract `amount` of `kind` from both sides.

    Recycling a returned resource is licensed only for asymptotic
    inequalities, so EXACT inputs are rejected.
    """
    amount = as_expr(amount)
    if amount.is_zero:
        return ri
    if ri.mode is Mode.EXACT:
        raise DerivationError("catalysis requires asymptotic mode")
    _check_multiplier(amount)
    lhs = ri.lhs.as_dict()
    rhs = ri.rhs.as_dict()
    for side_name, side in (("left", lhs), ("right", rhs)):
        if kind not in side:
            raise DerivationError(f"cannot cancel {kind.token}: absent from {side_name} side")
        remainder = side[kind] - amount
        if remainder.is_definitely_negative():
            raise DerivationError(
                f"cannot cancel {amount} of {kind.token}: {side_name} side only has {side[kind]}"
            )
        if remainder.is_zero:
            del side[kind]
        else:
            side[kind] = remainder
    result = _build(ri.name, lhs, rhs, ri.mode)
    return _with_step(ri, result, StepKind.CANCEL, kind.token, amount)


def waste(ri: ResourceInequality, vector: ResourceVector) -> ResourceInequality:
    """Consume `vector` in addition to the existing inputs and discard it."""
    if vector.is_empty:
        return ri
    for kind, coeff in vector.terms:
        if coeff.is_definitely_negative():
            raise DerivationError(f"waste vector has negative {kind.token} coefficient")
    lhs = ri.lhs.as_dict()
    for kind, coeff in vector.terms:
        _add(lhs, kind, coeff)
    result = _build(f"waste({ri.name})", lhs, ri.rhs.as_dict(), ri.mode)
    return _with_step(ri, result, StepKind.WASTE, grammar.format_vector(vector), EntropicExpr.constant(1))


def apply_rule_I(ri: ResourceInequality) -> ResourceInequality:
    """Coherentify input classical bits: c [c->c] on the left becomes
    c/2 [q->q] on the left plus c/2 [qq] on the right.

    Requires the rule_I_ok certification (uniform message, decoupled at the
    end); the generated entanglement is what re-homes the formal -c/2 [qq]
    input.  An inequality with no classical input passes through unchanged.
    """
    if not ri.flags.rule_I_ok:
        raise DerivationError("protocol not certified uniform+decoupled (rule I)")
    c = ri.lhs.coeff(CBIT)
    if c.is_zero:
        return ri
    lhs = ri.lhs.as_dict()
    rhs = ri.rhs.as_dict()
    del lhs[CBIT]
    _add(lhs, QUBIT_CHANNEL, c * HALF)
    _add(rhs, EBIT, c * HALF)
    result = _build(f"rule_I({ri.name})", lhs, rhs, Mode.ASYMPTOTIC)
    return _with_step(ri, result, StepKind.RULE_I, "", c)


def apply_rule_O(ri: ResourceInequality) -> ResourceInequality:
    """Coherentify output classical bits: c [c->c] on the right becomes
    c/2 [q->q] + c/2 [qq] on the right.

    Requires the rule_O_ok certification (message decoupled from the
    remaining quantum system, hence private).  No classical output: no-op.
    """
    if not ri.flags.rule_O_ok:
        raise DerivationError("protocol not certified decoupled (rule O)")
    c = ri.rhs.coeff(CBIT)
    if c.is_zero:
        return ri
    rhs = ri.rhs.as_dict()
    del rhs[CBIT]
    _add(rhs, QUBIT_CHANNEL, c * HALF)
    _add(rhs, EBIT, c * HALF)
    result = _build(f"rule_O({ri.name})", ri.lhs.as_dict(), rhs, Mode.ASYMPTOTIC)
    return _with_step(ri, result, StepKind.RULE_O, "", c)


def expand_cobits(vector: ResourceVector) -> ResourceVector:
    """Replace c [q->qq] by c/2 [q->q] + c/2 [qq] (the cobit's asymptotic
    worth, established by the catalytic equivalence 2 [q->qq] == [q->q]+[qq])."""
    c = vector.coeff(COBIT)
    if c.is_zero:
        return vector
    terms = vector.as_dict()
    del terms[COBIT]
    _add(terms, QUBIT_CHANNEL, c * HALF)
    _add(terms, EBIT, c * HALF)
    return ResourceVector.of(terms)


# ---------------------------------------------------------------------------
# The registry and the scripted family
# ---------------------------------------------------------------------------


def standard_registry() -> dict[str, ResourceInequality]:
    """The five primitives, keyed by name."""
    mother = ResourceInequality(
        name="mother",
        lhs=vec(I_AE * HALF, QUBIT_CHANNEL) + vec(1, NOISY_STATE),
        rhs=vec(I_AB * HALF, EBIT),
    )
    father = ResourceInequality(
        name="father",
        lhs=vec(I_AE * HALF, EBIT) + vec(1, NOISY_CHANNEL),
        rhs=vec(I_AB * HALF, QUBIT_CHANNEL),
    )
    tp = ResourceInequality(
        name="tp",
        lhs=vec(2, CBIT) + vec(1, EBIT),
        rhs=vec(1, QUBIT_CHANNEL),
        mode=Mode.EXACT,
    )
    sd = ResourceInequality(
        name="sd",
        lhs=vec(1, QUBIT_CHANNEL) + vec(1, EBIT),
        rhs=vec(2, CBIT),
        mode=Mode.EXACT,
    )
    qe = ResourceInequality(
        name="qe",
        lhs=vec(1, QUBIT_CHANNEL),
        rhs=vec(1, EBIT),
        mode=Mode.EXACT,
    )
    return {ri.name: ri for ri in (mother, father, tp, sd, qe)}


# Cobit identities (exact, single-shot; verified gate by gate in circuits):
# making super-dense coding coherent yields two cobits, and teleporting
# through cobits returns the two message registers as ebits.
COHERENT_SD = ResourceInequality(
    name="coherent_sd",
    lhs=vec(1, QUBIT_CHANNEL) + vec(1, EBIT),
    rhs=vec(2, COBIT),
    mode=Mode.EXACT,
)
COHERENT_TP = ResourceInequality(
    name="coherent_tp",
    lhs=vec(2, COBIT) + vec(1, EBIT),
    rhs=vec(1, QUBIT_CHANNEL) + vec(2, EBIT),
    mode=Mode.EXACT,
)


def derive_family(registry: dict[str, ResourceInequality] | None = None) -> dict[str, ResourceInequality]:
    """All scripted derivations, traces included.

    Children: eq1 (classical-communication-assisted quantum transmission
    over a noisy state), eq2 (one-way distillation at the hashing rate),
    eq3 (noisy super-dense coding), eq4 (entanglement-assisted classical
    coding), eq5 (unassisted quantum capacity), plus eq1 re-derived from
    eq2 and the three reverse coherentifications that regenerate the
    parents.  Certification flags are asserted per protocol: eq2 and eq1
    carry rule_I_ok, eq3 and eq4 carry rule_O_ok, eq5 carries none (an
    irreversible transformation cannot regenerate its parent).
    """
    reg = standard_registry() if registry is None else dict(registry)
    mother, father = reg["mother"], reg["father"]
    tp, sd, qe = reg["tp"], reg["sd"], reg["qe"]

    eq1 = cancel(append(mother, tp, I_AB * HALF), QUBIT_CHANNEL, I_AE * HALF)
    eq1 = eq1.with_name("eq1").with_flags(rule_I_ok=True)

    eq2 = cancel(prepend(mother, tp, I_AE * HALF), EBIT, I_AE * HALF)
    eq2 = eq2.with_name("eq2").with_flags(rule_I_ok=True)

    eq3 = append(mother, sd, I_AB * HALF).with_name("eq3").with_flags(rule_O_ok=True)
    eq4 = append(father, sd, I_AB * HALF).with_name("eq4").with_flags(rule_O_ok=True)

    eq5 = cancel(
        append(father, qe, I_AE * HALF, step_kind=StepKind.APPLY_QE_FRACTION),
        EBIT,
        I_AE * HALF,
    ).with_name("eq5")

    eq1_via_eq2 = append(eq2, tp, I_COH).with_name("eq1_via_eq2")
    mother_via_rule_I = apply_rule_I(eq2).with_name("mother_via_rule_I")
    mother_via_rule_O = cancel(apply_rule_O(eq3), QUBIT_CHANNEL, I_AB * HALF)
    mother_via_rule_O = mother_via_rule_O.with_name("mother_via_rule_O")
    father_via_rule_O = cancel(apply_rule_O(eq4), EBIT, I_AB * HALF)
    father_via_rule_O = father_via_rule_O.with_name("father_via_rule_O")

    out = dict(reg)
    for ri in (eq1, eq2, eq3, eq4, eq5, eq1_via_eq2,
               mother_via_rule_I, mother_via_rule_O, father_via_rule_O):
        out[ri.name] = ri
    return out


FAMILY_ORDER = ("mother", "father", "tp", "sd", "qe", "eq1", "eq2", "eq3", "eq4", "eq5")


def family_table(registry: dict[str, ResourceInequality] | None = None) -> dict[str, ResourceInequality]:
    """The canonical ten inequalities (five primitives, five children)."""
    full = derive_family(registry)
    return {name: full[name] for name in FAMILY_ORDER}


# ---------------------------------------------------------------------------
# Trace replay
# ---------------------------------------------------------------------------


def _execute_step(step: DerivationStep, registry: dict[str, ResourceInequality]) -> ResourceInequality:
    base = step.before
    if step.kind in (StepKind.APPEND, StepKind.APPLY_QE_FRACTION):
        if step.tool not in registry:
            raise DerivationError(f"trace references unknown tool {step.tool!r}")
        return append(base, registry[step.tool], step.multiplier, step_kind=step.kind)
    if step.kind is StepKind.PREPEND:
        if step.tool not in registry:
            raise DerivationError(f"trace references unknown tool {step.tool!r}")
        return prepend(base, registry[step.tool], step.multiplier)
    if step.kind is StepKind.CANCEL:
        kind = grammar.parse_vector(step.tool).kinds()[0]
        return cancel(base, kind, step.multiplier)
    if step.kind is StepKind.RULE_I:
        return apply_rule_I(base)
    if step.kind is StepKind.RULE_O:
        return apply_rule_O(base)
    if step.kind is StepKind.WASTE:
        return waste(base, grammar.parse_vector(step.tool))
    raise DerivationError(f"unknown step kind {step.kind}")


def replay(trace: tuple[DerivationStep, ...],
           registry: dict[str, ResourceInequality] | None = None) -> ResourceInequality:
    """Re-execute a trace from its first snapshot, checking every step.

    Raises DerivationError if any re-executed step disagrees with its stored
    `after` snapshot or if consecutive steps do not chain.
    """
    if not trace:
        raise DerivationError("empty trace")
    reg = standard_registry() if registry is None else registry
    state = trace[0].before
    for i, step in enumerate(trace):
        if not state.same_statement(step.before):
            raise DerivationError(f"step {i}: chained state disagrees with snapshot")
        redone = _execute_step(step, reg)
        if not redone.same_statement(step.after):
            raise DerivationError(f"step {i}: replayed {step.kind.value} disagrees with snapshot")
        state = redone.bare()
    return state


def step_flow_discrepancy(step: DerivationStep,
                          registry: dict[str, ResourceInequality],
                          value_fn) -> float:
    """Largest per-kind violation of the step's resource-flow arithmetic,
    with coefficients mapped to floats by `value_fn`.

    Every rewrite obeys (lhs_after - lhs_before) + (rhs_before - rhs_after)
    = net resources injected by the step (tool inputs minus tool outputs for
    compositions, the classical-bit substitution for the rules, the wasted
    vector for WASTE, zero for CANCEL), independently of how matching was
    resolved.
    """
    kinds = set()
    sides = (step.before.lhs, step.before.rhs, step.after.lhs, step.after.rhs)
    for side in sides:
        kinds.update(side.kinds())

    def injected(kind: ResourceKind) -> float:
        k = value_fn(step.multiplier)
        if step.kind in (StepKind.APPEND, StepKind.PREPEND, StepKind.APPLY_QE_FRACTION):
            tool = registry[step.tool]
            return k * (value_fn(tool.lhs.coeff(kind)) - value_fn(tool.rhs.coeff(kind)))
        if step.kind is StepKind.CANCEL:
            return 0.0
        if step.kind is StepKind.RULE_I:
            if kind == CBIT:
                return -k
            if kind == QUBIT_CHANNEL:
                return k / 2
            if kind == EBIT:
                return -k / 2
            return 0.0
        if step.kind is StepKind.RULE_O:
            if kind == CBIT:
                return k
            if kind == QUBIT_CHANNEL:
                return -k / 2
            if kind == EBIT:
                return -k / 2
            return 0.0
        if step.kind is StepKind.WASTE:
            return value_fn(grammar.parse_vector(step.tool).coeff(kind))
        raise DerivationError(f"unknown step kind {step.kind}")

    worst = 0.0
    for kind in kinds:
        lhs_delta = value_fn(step.after.lhs.coeff(kind)) - value_fn(step.before.lhs.coeff(kind))
        rhs_delta = value_fn(step.before.rhs.coeff(kind)) - value_fn(step.after.rhs.coeff(kind))
        worst = max(worst, abs(lhs_delta + rhs_delta - injected(kind)))
    return worst


# ---------------------------------------------------------------------------
# Step serialization (used by grammar.ri_to_json / ri_from_json)
# ---------------------------------------------------------------------------


def step_to_json(step: DerivationStep) -> dict:
    return {
        "kind": step.kind.value,
        "tool": step.tool,
        "multiplier": grammar.expr_to_json(step.multiplier),
        "before": grammar.ri_to_json(step.before, include_trace=False),
        "after": grammar.ri_to_json(step.after, include_trace=False),
    }


def step_from_json(data: dict) -> DerivationStep:
    return DerivationStep(
        kind=StepKind(data["kind"]),
        tool=data["tool"],
        multiplier=grammar.expr_from_json(data["multiplier"]),
        before=grammar.ri_from_json(data["before"]),
        after=grammar.ri_from_json(data["after"]),
    )


def render_trace(ri: ResourceInequality, indent: str = "  ") -> str:
    """Human-readable trace: one rewrite per line."""
    if not ri.trace:
        return f"{indent}(primitive)"
    lines = [f"{indent}start: {grammar.format_ri(ri.trace[0].before)}"]
    for step in ri.trace:
        if step.kind in (StepKind.APPEND, StepKind.PREPEND, StepKind.APPLY_QE_FRACTION):
            what = f"{step.kind.value.lower()} {step.tool} x {grammar.format_expr(step.multiplier)}"
        elif step.kind is StepKind.CANCEL:
            what = f"cancel {grammar.format_expr(step.multiplier)} {step.tool} on both sides"
        elif step.kind is StepKind.WASTE:
            what = f"waste {step.tool}"
        else:
            what = f"{step.kind.value.lower().replace('_', ' ')} on {grammar.format_expr(step.multiplier)} [c->c]"
        lines.append(f"{indent}{what}  ->  {grammar.format_ri(step.after)}")
    return "\n".join(lines)
