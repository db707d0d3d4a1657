"""TPTP first-order (FOF) output and input.

The serializer emits one annotated formula per call, deterministically:
n-ary conjunction/disjunction in given order, every binary connective
parenthesized, quantifier bodies parenthesized when binary, single spaces
throughout.  The reader accepts exactly the dialect the serializer emits
(plus whitespace/comment freedom); parsing arbitrary TPTP files is out of
scope.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import fol
from .errors import OpenFormulaError, ParseError

ROLES = ("axiom", "conjecture")

NAME_RE = re.compile(r"[a-z][A-Za-z0-9_]*\Z")


# ---------------------------------------------------------------------------
# Serialization


def format_term(t: fol.Term) -> str:
    if isinstance(t, fol.Var):
        return t.name
    if isinstance(t, fol.Const):
        return t.name
    return f"{t.functor}({','.join(format_term(a) for a in t.args)})"


def format_formula(f: fol.Formula) -> str:
    """Formula part of a FOF line (no name/role wrapping)."""
    if isinstance(f, fol.Atom):
        if not f.args:
            return f.predicate
        return f"{f.predicate}({','.join(format_term(a) for a in f.args)})"
    if isinstance(f, fol.Equality):
        return f"{format_term(f.lhs)} = {format_term(f.rhs)}"
    if isinstance(f, fol.Verum):
        return "$true"
    if isinstance(f, fol.Not):
        return f"~ {_unitary(f.arg)}"
    if isinstance(f, fol.And):
        return "(" + " & ".join(_unitary(p) for p in f.parts) + ")"
    if isinstance(f, fol.Or):
        return "(" + " | ".join(_unitary(p) for p in f.parts) + ")"
    if isinstance(f, fol.Implies):
        return f"({_unitary(f.antecedent)} => {_unitary(f.consequent)})"
    if isinstance(f, fol.Iff):
        return f"({_unitary(f.lhs)} <=> {_unitary(f.rhs)})"
    if isinstance(f, fol.ForAll):
        return f"! [{','.join(f.variables)}] : {_unitary(f.body)}"
    if isinstance(f, fol.Exists):
        return f"? [{','.join(f.variables)}] : {_unitary(f.body)}"
    raise TypeError(f"cannot serialize {f!r}")


def _unitary(f: fol.Formula) -> str:
    # And/Or/Implies/Iff already emit their own parentheses.
    return format_formula(f)


def serialize_tptp(name: str, role: str, f: fol.Formula) -> str:
    """One annotated formula: ``fof(<name>, <role>, <formula>).``"""
    if role not in ROLES:
        raise ValueError(f"role must be one of {ROLES}, got {role!r}")
    if not NAME_RE.match(name):
        raise ValueError(f"invalid formula name {name!r}")
    free = fol.free_vars(f)
    if free:
        raise OpenFormulaError(free)
    return f"fof({name}, {role}, {format_formula(f)})."


# ---------------------------------------------------------------------------
# Parsing


@dataclass(frozen=True)
class TptpUnit:
    name: str
    role: str
    formula: fol.Formula


_TPTP_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<comment>%[^\n]*)"
    r"|(?P<dtrue>\$true)"
    r"|(?P<var>[A-Z][A-Za-z0-9_]*)"
    r"|(?P<ident>[a-z][A-Za-z0-9_]*)"
    r"|(?P<iff><=>)"
    r"|(?P<implies>=>)"
    r"|(?P<punct>[()\[\],.:=~&|!?])"
)


def _tokenize(text: str) -> list[tuple[str, str, int, int]]:
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        m = _TPTP_TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(
                f"unexpected character {text[pos]!r}", line, pos - line_start + 1
            )
        kind = m.lastgroup
        value = m.group()
        if kind not in ("ws", "comment"):
            tok_kind = value if kind == "punct" else kind
            tokens.append((tok_kind, value, line, pos - line_start + 1))
        nl = value.count("\n")
        if nl:
            line += nl
            line_start = pos + value.rindex("\n") + 1
        pos = m.end()
    tokens.append(("eof", "", line, pos - line_start + 1))
    return tokens


class _TptpParser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> tuple[str, str, int, int]:
        return self.tokens[self.pos]

    def next(self) -> tuple[str, str, int, int]:
        tok = self.tokens[self.pos]
        if tok[0] != "eof":
            self.pos += 1
        return tok

    def expect(self, kind: str) -> tuple[str, str, int, int]:
        tok = self.peek()
        if tok[0] != kind:
            raise ParseError(
                f"expected '{kind}', found {tok[1] or 'end of input'!r}",
                tok[2],
                tok[3],
            )
        return self.next()

    def parse_units(self) -> list[TptpUnit]:
        units = []
        while self.peek()[0] != "eof":
            units.append(self.parse_unit())
        return units

    def parse_unit(self) -> TptpUnit:
        head = self.expect("ident")
        if head[1] != "fof":
            raise ParseError(f"expected 'fof', found {head[1]!r}", head[2], head[3])
        self.expect("(")
        name = self.expect("ident")[1]
        self.expect(",")
        role_tok = self.expect("ident")
        if role_tok[1] not in ROLES:
            raise ParseError(
                f"unsupported role {role_tok[1]!r}", role_tok[2], role_tok[3]
            )
        self.expect(",")
        formula = self.parse_formula()
        self.expect(")")
        self.expect(".")
        return TptpUnit(name, role_tok[1], formula)

    def parse_formula(self) -> fol.Formula:
        lhs = self.parse_unitary()
        tok = self.peek()
        if tok[0] == "&":
            parts = [lhs]
            while self.peek()[0] == "&":
                self.next()
                parts.append(self.parse_unitary())
            return fol.And(tuple(parts))
        if tok[0] == "|":
            parts = [lhs]
            while self.peek()[0] == "|":
                self.next()
                parts.append(self.parse_unitary())
            return fol.Or(tuple(parts))
        if tok[0] == "implies":
            self.next()
            return fol.Implies(lhs, self.parse_unitary())
        if tok[0] == "iff":
            self.next()
            return fol.Iff(lhs, self.parse_unitary())
        return lhs

    def parse_unitary(self) -> fol.Formula:
        tok = self.peek()
        if tok[0] == "~":
            self.next()
            return fol.Not(self.parse_unitary())
        if tok[0] in ("!", "?"):
            self.next()
            self.expect("[")
            variables = [self.expect("var")[1]]
            while self.peek()[0] == ",":
                self.next()
                variables.append(self.expect("var")[1])
            self.expect("]")
            self.expect(":")
            body = self.parse_unitary()
            cls = fol.ForAll if tok[0] == "!" else fol.Exists
            return cls(tuple(variables), body)
        if tok[0] == "(":
            self.next()
            inner = self.parse_formula()
            self.expect(")")
            return inner
        if tok[0] == "dtrue":
            self.next()
            return fol.VERUM
        if tok[0] == "var":
            self.next()
            self.expect("=")
            return fol.Equality(fol.Var(tok[1]), self.parse_term())
        name = self.expect("ident")[1]
        args: list[fol.Term] = []
        if self.peek()[0] == "(":
            self.next()
            args.append(self.parse_term())
            while self.peek()[0] == ",":
                self.next()
                args.append(self.parse_term())
            self.expect(")")
        if self.peek()[0] == "=":
            self.next()
            return fol.Equality(fol.make_app(name, args), self.parse_term())
        return fol.Atom(name, tuple(args))

    def parse_term(self) -> fol.Term:
        tok = self.peek()
        if tok[0] == "var":
            self.next()
            return fol.Var(tok[1])
        name = self.expect("ident")[1]
        args: list[fol.Term] = []
        if self.peek()[0] == "(":
            self.next()
            args.append(self.parse_term())
            while self.peek()[0] == ",":
                self.next()
                args.append(self.parse_term())
            self.expect(")")
        return fol.make_app(name, args)


def parse_tptp_formula(text: str) -> fol.Formula:
    parser = _TptpParser(text)
    formula = parser.parse_formula()
    tok = parser.peek()
    if tok[0] != "eof":
        raise ParseError(f"unexpected {tok[1]!r} after formula", tok[2], tok[3])
    return formula


def parse_tptp_unit(text: str) -> TptpUnit:
    parser = _TptpParser(text)
    unit = parser.parse_unit()
    tok = parser.peek()
    if tok[0] != "eof":
        raise ParseError(f"unexpected {tok[1]!r} after unit", tok[2], tok[3])
    return unit


def parse_tptp_problem(text: str) -> list[TptpUnit]:
    """All annotated formulas of a problem file, in order."""
    return _TptpParser(text).parse_units()
