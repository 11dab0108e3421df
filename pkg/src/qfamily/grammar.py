"""Text grammar and JSON wire format for resource inequalities.

ASCII grammar::

    ri          :=  vector ('>=' | '>=!') vector        # '>=!' is exact
    vector      :=  term ('+' term)*
    term        :=  [coefficient] resource
    resource    :=  '[c->c]' | '[q->q]' | '[qq]' | '[q->qq]'
                  | '{qq}' | '{q->q}' | '{qq:NAME}' | '{q->q:NAME}'
    coefficient :=  rational | [rational '*'] symbol | '(' signed_sum ')'
    symbol      :=  'H(A)' | 'H(B)' | 'H(E)' | 'H(AB)' | 'H(AE)' | 'H(BE)'
                  | 'H(ABE)' | 'I(A:B)' | 'I(A:E)' | 'Ic(A>B)'
    rational    :=  INT | INT '/' INT

so e.g. ``1/2*I(A:E) [q->q] + {qq} >= 1/2*I(A:B) [qq]``.  Formatting picks
the shortest faithful spelling (a named symbol when the expression is a
rational multiple of one, a parenthesized signed sum otherwise) so that
``parse_ri(format_ri(ri))`` reproduces the statement exactly.

JSON format for an inequality::

    {"name": ..., "mode": "exact"|"asymptotic",
     "lhs": [{"kind": "[q->q]", "coeff": {"H_A": "1/2", ...}}, ...],
     "rhs": [...],
     "flags": {"rule_I_ok": bool, "rule_O_ok": bool},
     "trace": [{"kind": "APPEND", "tool": ..., "multiplier": {...},
                "before": {...}, "after": {...}}, ...]}

with rationals encoded as "p/q" strings.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterator, NamedTuple

from .algebra import (
    CBIT,
    COBIT,
    EBIT,
    EntropicExpr,
    Gen,
    Mode,
    NOISY_CHANNEL,
    NOISY_STATE,
    QUBIT_CHANNEL,
    ResourceInequality,
    ResourceKind,
    ResourceTag,
    ResourceVector,
    RuleFlags,
    canonicalize,
)


class ParseError(ValueError):
    """Syntax or vocabulary error, with the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


# ---------------------------------------------------------------------------
# Formatting
# ---------------------------------------------------------------------------

# Preferred spellings, tried in order: plain generators first, then the
# information quantities.
_NAMED_EXPRS: list[tuple[str, EntropicExpr]] = [
    ("H(A)", canonicalize({"H(A)": 1})),
    ("H(B)", canonicalize({"H(B)": 1})),
    ("H(E)", canonicalize({"H(E)": 1})),
    ("I(A:B)", canonicalize({"I(A:B)": 1})),
    ("I(A:E)", canonicalize({"I(A:E)": 1})),
    ("Ic(A>B)", canonicalize({"Ic(A>B)": 1})),
]

_GEN_NAMES = {Gen.CONST: "1", Gen.H_A: "H(A)", Gen.H_B: "H(B)", Gen.H_E: "H(E)"}


def format_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_expr(expr: EntropicExpr) -> str:
    """Shortest faithful spelling of a canonical entropic expression.

    Negative-leading spellings are parenthesized so that terms always join
    with '+' in vector context.
    """
    if expr.is_zero:
        return "0"
    constant = expr.as_constant()
    if constant is not None:
        text = format_rational(constant)
        return text if constant >= 0 else f"({text})"
    for name, base in _NAMED_EXPRS:
        ratio = _multiple_of(expr, base)
        if ratio is not None:
            if ratio == 1:
                return name
            text = f"{format_rational(ratio)}*{name}"
            return text if ratio > 0 else f"({text})"
    parts: list[str] = []
    for gen, coeff in expr.coeffs:
        sign = "-" if coeff < 0 else "+"
        magnitude = abs(coeff)
        if gen is Gen.CONST:
            body = format_rational(magnitude)
        elif magnitude == 1:
            body = _GEN_NAMES[gen]
        else:
            body = f"{format_rational(magnitude)}*{_GEN_NAMES[gen]}"
        parts.append(f"{sign} {body}" if parts else (f"-{body}" if sign == "-" else body))
    return "(" + " ".join(parts) + ")"


def _multiple_of(expr: EntropicExpr, base: EntropicExpr) -> Fraction | None:
    """The rational r with expr == r*base, if one exists."""
    first = base.coeffs[0]
    ratio = expr.coeff(first[0]) / first[1]
    if ratio != 0 and expr == base * ratio:
        return ratio
    return None


def format_vector(vector: ResourceVector) -> str:
    if vector.is_empty:
        return "0"
    parts = []
    for kind, coeff in vector.terms:
        if coeff.as_constant() == 1:
            parts.append(kind.token)
        else:
            parts.append(f"{format_expr(coeff)} {kind.token}")
    return " + ".join(parts)


def format_ri(ri: ResourceInequality) -> str:
    op = ">=!" if ri.mode is Mode.EXACT else ">="
    return f"{format_vector(ri.lhs)} {op} {format_vector(ri.rhs)}"


# ---------------------------------------------------------------------------
# Tokenizer / parser
# ---------------------------------------------------------------------------


class _Token(NamedTuple):
    kind: str
    text: str
    position: int


_TOKEN_RE = re.compile(
    r"""
    (?P<WS>\s+)
  | (?P<RESOURCE>\[c->c\]|\[q->qq\]|\[q->q\]|\[qq\]
      |\{qq(?::[A-Za-z_][\w.-]*)?\}|\{q->q(?::[A-Za-z_][\w.-]*)?\})
  | (?P<SYMBOL>H\(ABE\)|H\(AB\)|H\(AE\)|H\(BE\)|H\(A\)|H\(B\)|H\(E\)
      |I\(A[:;]B\)|I\(A[:;]E\)|Ic\(A>B\))
  | (?P<CMP>>=!|>=)
  | (?P<NUMBER>\d+(?:/\d+)?)
  | (?P<PLUS>\+)
  | (?P<MINUS>-)
  | (?P<STAR>\*)
  | (?P<LPAREN>\()
  | (?P<RPAREN>\))
    """,
    re.VERBOSE,
)

_RESOURCE_BY_TOKEN = {
    "[c->c]": CBIT,
    "[q->q]": QUBIT_CHANNEL,
    "[qq]": EBIT,
    "[q->qq]": COBIT,
    "{qq}": NOISY_STATE,
    "{q->q}": NOISY_CHANNEL,
}


def _resource_from_token(text: str) -> ResourceKind:
    if text in _RESOURCE_BY_TOKEN:
        return _RESOURCE_BY_TOKEN[text]
    body, handle = text[1:-1].split(":", 1)
    tag = ResourceTag.NOISY_STATE if body == "qq" else ResourceTag.NOISY_CHANNEL
    return ResourceKind(tag, handle)


def _tokenize(text: str) -> Iterator[_Token]:
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise ParseError(f"unrecognized input {text[pos:pos + 12]!r}", pos)
        kind = match.lastgroup
        if kind != "WS":
            yield _Token(kind, match.group(), pos)
        pos = match.end()
    yield _Token("EOF", "", len(text))


class _Parser:
    def __init__(self, text: str):
        self.tokens = list(_tokenize(text))
        self.index = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.index]

    def advance(self) -> _Token:
        token = self.current
        self.index += 1
        return token

    def expect(self, kind: str) -> _Token:
        if self.current.kind != kind:
            raise ParseError(
                f"expected {kind}, found {self.current.text or 'end of input'!r}",
                self.current.position,
            )
        return self.advance()

    # coefficient := rational ['*' symbol] | symbol | '(' signed_sum ')'
    def parse_coefficient(self) -> EntropicExpr:
        token = self.current
        if token.kind == "NUMBER":
            self.advance()
            value = Fraction(token.text)
            if self.current.kind == "STAR":
                self.advance()
                symbol = self.expect("SYMBOL")
                return canonicalize({symbol.text: value})
            return EntropicExpr.constant(value)
        if token.kind == "SYMBOL":
            self.advance()
            return canonicalize({token.text: 1})
        if token.kind == "LPAREN":
            self.advance()
            expr = self.parse_signed_sum()
            self.expect("RPAREN")
            return expr
        raise ParseError(f"expected a coefficient, found {token.text!r}", token.position)

    def parse_signed_sum(self) -> EntropicExpr:
        total = EntropicExpr.zero()
        sign = Fraction(1)
        if self.current.kind == "MINUS":
            self.advance()
            sign = Fraction(-1)
        while True:
            total = total + self.parse_coefficient() * sign
            if self.current.kind == "PLUS":
                sign = Fraction(1)
                self.advance()
            elif self.current.kind == "MINUS":
                sign = Fraction(-1)
                self.advance()
            else:
                return total

    # term := [coefficient] resource
    def parse_term(self) -> tuple[ResourceKind, EntropicExpr]:
        if self.current.kind == "RESOURCE":
            token = self.advance()
            return _resource_from_token(token.text), EntropicExpr.constant(1)
        coeff = self.parse_coefficient()
        token = self.expect("RESOURCE")
        return _resource_from_token(token.text), coeff

    def parse_vector(self, allow_zero: bool = True) -> ResourceVector:
        if allow_zero and self.current.kind == "NUMBER" and self.current.text == "0":
            lookahead = self.tokens[self.index + 1]
            if lookahead.kind in ("EOF", "CMP"):
                self.advance()
                return ResourceVector()
        terms = [self.parse_term()]
        while self.current.kind == "PLUS":
            self.advance()
            terms.append(self.parse_term())
        return ResourceVector(tuple(terms))

    def parse_ri(self, name: str) -> ResourceInequality:
        lhs = self.parse_vector()
        cmp_token = self.expect("CMP")
        if self.current.kind == "EOF":
            raise ParseError("empty right-hand side", self.current.position)
        rhs = self.parse_vector(allow_zero=False)
        self.expect("EOF")
        if rhs.is_empty:
            raise ParseError("empty right-hand side", cmp_token.position)
        mode = Mode.EXACT if cmp_token.text == ">=!" else Mode.ASYMPTOTIC
        return ResourceInequality(name=name, lhs=lhs, rhs=rhs, mode=mode)


def parse_expr(text: str) -> EntropicExpr:
    """Parse a coefficient expression such as '1/2*I(A:B) + H(E)'."""
    parser = _Parser(text)
    expr = parser.parse_signed_sum()
    parser.expect("EOF")
    return expr


def parse_vector(text: str) -> ResourceVector:
    parser = _Parser(text)
    vector = parser.parse_vector()
    parser.expect("EOF")
    return vector


def parse_ri(text: str, name: str = "parsed") -> ResourceInequality:
    """Parse 'lhs >= rhs' / 'lhs >=! rhs'.  Round-trips format_ri statements."""
    return _Parser(text).parse_ri(name)


# ---------------------------------------------------------------------------
# JSON wire format
# ---------------------------------------------------------------------------


def expr_to_json(expr: EntropicExpr) -> dict[str, str]:
    return {gen.value: format_rational(coeff) for gen, coeff in expr.coeffs}


def expr_from_json(data: dict) -> EntropicExpr:
    terms = []
    for key, value in data.items():
        try:
            gen = Gen(key)
        except ValueError:
            raise ParseError(f"unknown generator {key!r} in coefficient map", 0) from None
        terms.append((gen, Fraction(str(value))))
    return EntropicExpr(tuple(terms))


def vector_to_json(vector: ResourceVector) -> list[dict]:
    return [{"kind": kind.token, "coeff": expr_to_json(coeff)} for kind, coeff in vector.terms]


def vector_from_json(data: list) -> ResourceVector:
    terms = []
    for entry in data:
        kind = _resource_from_token(entry["kind"])
        terms.append((kind, expr_from_json(entry["coeff"])))
    return ResourceVector(tuple(terms))


def ri_to_json(ri: ResourceInequality, include_trace: bool = True) -> dict:
    data = {
        "name": ri.name,
        "mode": ri.mode.value,
        "lhs": vector_to_json(ri.lhs),
        "rhs": vector_to_json(ri.rhs),
        "flags": {"rule_I_ok": ri.flags.rule_I_ok, "rule_O_ok": ri.flags.rule_O_ok},
    }
    if include_trace:
        from .derivation import step_to_json

        data["trace"] = [step_to_json(step) for step in ri.trace]
    return data


def ri_from_json(data: dict) -> ResourceInequality:
    flags = data.get("flags", {})
    trace: tuple = ()
    if data.get("trace"):
        from .derivation import step_from_json

        trace = tuple(step_from_json(step) for step in data["trace"])
    return ResourceInequality(
        name=data["name"],
        lhs=vector_from_json(data["lhs"]),
        rhs=vector_from_json(data["rhs"]),
        mode=Mode(data["mode"]),
        flags=RuleFlags(
            rule_I_ok=bool(flags.get("rule_I_ok", False)),
            rule_O_ok=bool(flags.get("rule_O_ok", False)),
        ),
        trace=trace,
    )
