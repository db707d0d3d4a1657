"""Independent scanner over emitted TPTP problem text.

This deliberately shares no code with the formula AST or its serializer: it
re-tokenizes the text and classifies every symbol occurrence positionally
(formula-level application = predicate, application inside arguments or next
to '=' = functor/constant).  Used to audit generated problems for
self-containedness: every declared functor/constant must have its type axiom
on board and every cited name must resolve.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable

from .errors import ParseError

_TOKEN = re.compile(
    r"\s+|%[^\n]*"
    r"|(?P<word>\$?[A-Za-z][A-Za-z0-9_]*)"
    r"|(?P<op><=>|=>|[()\[\],.:=~&|!?])"
)

_SCOPE_CONSTANT = re.compile(r"c([1-9]\d*)\Z")
_CONJECTURE_NAME = re.compile(r"e[1-9]\d*_([1-9]\d*)__([a-z][a-z0-9_]*)\Z")


@dataclass
class ScannedProblem:
    axiom_names: list[str] = field(default_factory=list)
    conjecture_names: list[str] = field(default_factory=list)
    predicates: dict[str, set[int]] = field(default_factory=dict)
    functors: dict[str, set[int]] = field(default_factory=dict)

    def all_names(self) -> list[str]:
        return self.axiom_names + self.conjecture_names


class _Scanner:
    def __init__(self, text: str):
        self.tokens: list[str] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                raise ParseError(f"unexpected character {text[pos]!r}", 0, pos)
            if m.lastgroup in ("word", "op"):
                self.tokens.append(m.group())
            pos = m.end()
        self.i = 0
        self.result = ScannedProblem()

    def peek(self) -> str | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of problem", 0, 0)
        self.i += 1
        return tok

    def expect(self, tok: str) -> None:
        got = self.next()
        if got != tok:
            raise ParseError(f"expected {tok!r}, found {got!r}", 0, self.i)

    def scan(self) -> ScannedProblem:
        while self.peek() is not None:
            self.unit()
        return self.result

    def unit(self) -> None:
        self.expect("fof")
        self.expect("(")
        name = self.next()
        self.expect(",")
        role = self.next()
        self.expect(",")
        self.formula()
        self.expect(")")
        self.expect(".")
        if role == "conjecture":
            self.result.conjecture_names.append(name)
        else:
            self.result.axiom_names.append(name)

    def formula(self) -> None:
        while True:
            tok = self.peek()
            if tok == "~":
                self.next()
                continue
            if tok in ("!", "?"):
                self.next()
                self.expect("[")
                while self.next() != "]":
                    pass
                self.expect(":")
                continue
            if tok == "(":
                self.next()
                self.formula()
                self.expect(")")
            else:
                self.operand()
            if self.peek() in ("&", "|", "=>", "<=>"):
                self.next()
                continue
            return

    def operand(self) -> None:
        tok = self.next()
        if tok == "$true":
            return
        if not re.match(r"[A-Za-z]", tok or ""):
            raise ParseError(f"expected an atom, found {tok!r}", 0, self.i)
        if tok[0].isupper():  # variable: must be an equality operand
            self.expect("=")
            self.term()
            return
        arity = 0
        if self.peek() == "(":
            arity = self.arguments()
        if self.peek() == "=":
            self.next()
            self._record_functor(tok, arity)
            self.term()
        else:
            self.result.predicates.setdefault(tok, set()).add(arity)

    def arguments(self) -> int:
        self.expect("(")
        count = 1
        self.term()
        while self.peek() == ",":
            self.next()
            self.term()
            count += 1
        self.expect(")")
        return count

    def term(self) -> None:
        tok = self.next()
        if tok[0].isupper():
            return
        arity = self.arguments() if self.peek() == "(" else 0
        self._record_functor(tok, arity)

    def _record_functor(self, name: str, arity: int) -> None:
        self.result.functors.setdefault(name, set()).add(arity)


def scan_problem(text: str) -> ScannedProblem:
    return _Scanner(text).scan()


def check_problem(
    text: str,
    dt_name_for: Callable[[str], str | None],
    name_resolves: Callable[[str], bool],
) -> list[str]:
    """Audit one problem text; returns human-readable violations (empty = ok).

    `dt_name_for(symbol)` gives the expected type-axiom name for a declared
    functor/constant (None when the symbol has no declaration anywhere);
    scope constants c<j> are resolved against the conjecture's own context.
    `name_resolves(name)` decides whether a cited axiom name exists.
    """
    scanned = scan_problem(text)
    violations: list[str] = []
    if len(scanned.conjecture_names) != 1:
        violations.append(
            f"expected exactly one conjecture, found {len(scanned.conjecture_names)}"
        )
        return violations
    conjecture = scanned.conjecture_names[0]
    context = _CONJECTURE_NAME.match(conjecture)
    names_present = set(scanned.all_names())

    for symbol, arities in sorted(scanned.functors.items()):
        if len(arities) != 1:
            violations.append(f"functor '{symbol}' used with arities {sorted(arities)}")
        if symbol in scanned.predicates:
            violations.append(f"symbol '{symbol}' used as both predicate and functor")
        scope = _SCOPE_CONSTANT.match(symbol)
        if scope:
            if context is None:
                violations.append(
                    f"scope constant '{symbol}' in a problem with no local context"
                )
                continue
            expected = f"dt_c{scope.group(1)}_{context.group(1)}__{context.group(2)}"
        else:
            expected = dt_name_for(symbol)
        if expected is not None and expected not in names_present:
            violations.append(
                f"declared symbol '{symbol}' lacks its type axiom {expected}"
            )
    for symbol, arities in sorted(scanned.predicates.items()):
        if len(arities) != 1:
            violations.append(
                f"predicate '{symbol}' used with arities {sorted(arities)}"
            )
    for name in scanned.all_names():
        if not name_resolves(name):
            violations.append(f"cited name '{name}' does not resolve")
    return violations
