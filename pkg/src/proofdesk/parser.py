"""Lexer and recursive-descent parser for the mini formalization language.

Grammar (EBNF):

    article   := "article" ident ";" { reserve | func | item }
    reserve   := "reserve" var {"," var} "for" ident ";"
    func      := "func" ident "(" [var {"," var}] ")" "->" ident ";"
    item      := ("definition" | "theorem") label ":" formula (";" | proof)
    proof     := "proof" { step } "end" ";"
    step      := "let" var {"," var} ";"
              |  "assume" [label ":"] formula ";"
              |  label ":" formula just ";"
              |  "thus" formula just ";"
    just      := "by" ref {"," ref} | proof
    formula   := quantified and connective expressions over prefix atoms,
                 with "for"/"ex" .. "holds"/"st", "&", "or", "implies",
                 "iff", "not", "=" (precedence: quantifier body extends
                 right; iff < implies < or < & < not)

Variables are capitalized, all other symbols lower-case.  A justification
written as a nested proof terminates the step (no extra semicolon needed).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import fol, names
from .article import (
    Article,
    AssumeStep,
    AuxStep,
    ByRefs,
    Definition,
    FunctorDecl,
    LetStep,
    Proof,
    ProofStep,
    Subproof,
    Theorem,
    ThusStep,
)
from .errors import ArityError, DuplicateLabelError, ParseError

KEYWORDS = frozenset(
    """article reserve for func definition theorem proof end let assume thus
       by holds st ex not implies iff or""".split()
)

ARTICLE_NAME_RE = re.compile(r"[a-z][a-z0-9_]*\Z")

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<var>[A-Z][A-Za-z0-9_]*)"
    r"|(?P<ident>[a-z][A-Za-z0-9_]*)"
    r"|(?P<arrow>->)"
    r"|(?P<punct>[;,:()=&])"
)


@dataclass(frozen=True)
class Token:
    kind: str  # "var", "ident", "arrow", one of ";,:()=&", or "eof"
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(
                f"unexpected character {text[pos]!r}", line, pos - line_start + 1
            )
        kind = m.lastgroup
        value = m.group()
        if kind != "ws":
            tok_kind = value if kind == "punct" else kind
            tokens.append(Token(tok_kind, value, line, pos - line_start + 1))
        nl = value.count("\n")
        if nl:
            line += nl
            line_start = pos + value.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class SymbolTable:
    """Arity and role bookkeeping for predicates and functors.

    A name may be used as a predicate or as a functor/constant, never both,
    and always with one arity.
    """

    def __init__(self) -> None:
        self.predicates: dict[str, int] = {}
        self.functors: dict[str, int] = {}

    def record_predicate(self, name: str, arity: int, tok: Token | None = None) -> None:
        self._record(name, arity, self.predicates, self.functors, "predicate", tok)

    def record_functor(self, name: str, arity: int, tok: Token | None = None) -> None:
        self._record(name, arity, self.functors, self.predicates, "functor", tok)

    def _record(
        self,
        name: str,
        arity: int,
        table: dict[str, int],
        other: dict[str, int],
        role: str,
        tok: Token | None,
    ) -> None:
        line, col = (tok.line, tok.col) if tok else (0, 0)
        if name in other:
            raise ArityError(
                f"symbol '{name}' used both as predicate and functor",
                name,
                line,
                col,
            )
        known = table.get(name)
        if known is None:
            table[name] = arity
        elif known != arity:
            raise ArityError(
                f"{role} '{name}' used with arity {arity}, expected {known}",
                name,
                line,
                col,
            )


class _TokenStream:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, kind: str, what: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            expected = what or f"'{kind}'"
            raise ParseError(
                f"expected {expected}, found {tok.text or 'end of input'!r}",
                tok.line,
                tok.col,
            )
        return self.next()

    def at_keyword(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == "ident" and tok.text == word

    def expect_keyword(self, word: str) -> Token:
        if not self.at_keyword(word):
            tok = self.peek()
            raise ParseError(
                f"expected '{word}', found {tok.text or 'end of input'!r}",
                tok.line,
                tok.col,
            )
        return self.next()

    def expect_name(self, what: str) -> Token:
        tok = self.expect("ident", what)
        if tok.text in KEYWORDS:
            raise ParseError(
                f"keyword '{tok.text}' cannot be used as {what}", tok.line, tok.col
            )
        return tok


class _FormulaParser:
    def __init__(self, stream: _TokenStream, table: SymbolTable):
        self.stream = stream
        self.table = table

    def parse(self) -> fol.Formula:
        return self._iff()

    def _iff(self) -> fol.Formula:
        lhs = self._implies()
        if self.stream.at_keyword("iff"):
            self.stream.next()
            return fol.Iff(lhs, self._iff())
        return lhs

    def _implies(self) -> fol.Formula:
        lhs = self._or()
        if self.stream.at_keyword("implies"):
            self.stream.next()
            return fol.Implies(lhs, self._implies())
        return lhs

    def _or(self) -> fol.Formula:
        parts = [self._and()]
        while self.stream.at_keyword("or"):
            self.stream.next()
            parts.append(self._and())
        return parts[0] if len(parts) == 1 else fol.Or(tuple(parts))

    def _and(self) -> fol.Formula:
        parts = [self._unary()]
        while self.stream.peek().kind == "&":
            self.stream.next()
            parts.append(self._unary())
        return parts[0] if len(parts) == 1 else fol.And(tuple(parts))

    def _unary(self) -> fol.Formula:
        tok = self.stream.peek()
        if tok.kind == "ident" and tok.text == "not":
            self.stream.next()
            return fol.Not(self._unary())
        if tok.kind == "ident" and tok.text in ("for", "ex"):
            return self._quantified()
        if tok.kind == "(":
            self.stream.next()
            inner = self.parse()
            self.stream.expect(")")
            return inner
        return self._atom_or_equality()

    def _quantified(self) -> fol.Formula:
        head = self.stream.next()
        variables = [self.stream.expect("var", "a variable").text]
        while self.stream.peek().kind == ",":
            self.stream.next()
            variables.append(self.stream.expect("var", "a variable").text)
        if len(set(variables)) != len(variables):
            raise ParseError("repeated quantifier variable", head.line, head.col)
        closer = "holds" if head.text == "for" else "st"
        self.stream.expect_keyword(closer)
        body = self.parse()
        cls = fol.ForAll if head.text == "for" else fol.Exists
        return cls(tuple(variables), body)

    def _atom_or_equality(self) -> fol.Formula:
        tok = self.stream.peek()
        if tok.kind == "var":
            self.stream.next()
            self.stream.expect("=", "'=' (a bare variable is not a formula)")
            return fol.Equality(fol.Var(tok.text), self._term())
        name = self.stream.expect_name("a predicate or term")
        args: list[fol.Term] = []
        if self.stream.peek().kind == "(":
            self.stream.next()
            args.append(self._term())
            while self.stream.peek().kind == ",":
                self.stream.next()
                args.append(self._term())
            self.stream.expect(")")
        if self.stream.peek().kind == "=":
            self.stream.next()
            self.table.record_functor(name.text, len(args), name)
            return fol.Equality(fol.make_app(name.text, args), self._term())
        self.table.record_predicate(name.text, len(args), name)
        return fol.Atom(name.text, tuple(args))

    def _term(self) -> fol.Term:
        tok = self.stream.peek()
        if tok.kind == "var":
            self.stream.next()
            return fol.Var(tok.text)
        name = self.stream.expect_name("a term")
        args: list[fol.Term] = []
        if self.stream.peek().kind == "(":
            self.stream.next()
            args.append(self._term())
            while self.stream.peek().kind == ",":
                self.stream.next()
                args.append(self._term())
            self.stream.expect(")")
        self.table.record_functor(name.text, len(args), name)
        return fol.make_app(name.text, args)


def parse_formula(text: str, table: SymbolTable | None = None) -> fol.Formula:
    """Parse one MFL formula; free variables are permitted here."""
    stream = _TokenStream(tokenize(text))
    formula = _FormulaParser(stream, table or SymbolTable()).parse()
    trailing = stream.peek()
    if trailing.kind != "eof":
        raise ParseError(
            f"unexpected {trailing.text!r} after formula", trailing.line, trailing.col
        )
    return formula


@dataclass
class _ArticleState:
    table: SymbolTable = field(default_factory=SymbolTable)
    labels: set[str] = field(default_factory=set)  # all labels, for uniqueness
    item_labels: set[str] = field(default_factory=set)  # citable across items
    reserved: dict[str, str] = field(default_factory=dict)
    functors: dict[str, FunctorDecl] = field(default_factory=dict)


class _ArticleParser:
    def __init__(self, text: str):
        self.stream = _TokenStream(tokenize(text))
        self.state = _ArticleState()

    # -- helpers ------------------------------------------------------------

    def _register_label(self, tok: Token) -> str:
        if tok.text in self.state.labels:
            raise DuplicateLabelError(
                f"duplicate label '{tok.text}'", tok.line, tok.col
            )
        self.state.labels.add(tok.text)
        return tok.text

    def _parse_step_formula(self, fixed: set[str]) -> fol.Formula:
        tok = self.stream.peek()
        formula = _FormulaParser(self.stream, self.state.table).parse()
        self._check_functors_declared(formula, tok)
        loose = fol.free_vars(formula) - fixed
        if loose:
            raise ParseError(
                "free variable(s) not fixed by let: " + ", ".join(sorted(loose)),
                tok.line,
                tok.col,
            )
        return formula

    def _check_functors_declared(self, formula: fol.Formula, tok: Token) -> None:
        _, functors = fol.split_symbols(formula)
        undeclared = functors - set(self.state.functors)
        if undeclared:
            raise ParseError(
                "undeclared functor(s): " + ", ".join(sorted(undeclared)),
                tok.line,
                tok.col,
            )

    # -- grammar ------------------------------------------------------------

    def parse(self) -> Article:
        self.stream.expect_keyword("article")
        name_tok = self.stream.expect_name("an article name")
        if not ARTICLE_NAME_RE.match(name_tok.text):
            raise ParseError(
                f"invalid article name '{name_tok.text}'",
                name_tok.line,
                name_tok.col,
            )
        self.stream.expect(";")
        reservations: list[tuple[str, str]] = []
        decls: list[FunctorDecl] = []
        items: list[Definition | Theorem] = []
        n_definitions = 0
        n_theorems = 0
        while self.stream.peek().kind != "eof":
            if self.stream.at_keyword("reserve"):
                reservations.extend(self._reserve())
            elif self.stream.at_keyword("func"):
                decls.append(self._func(len(decls) + 1))
            elif self.stream.at_keyword("definition"):
                items.append(self._item("definition", n_definitions + 1))
                n_definitions += 1
            elif self.stream.at_keyword("theorem"):
                items.append(self._item("theorem", n_theorems + 1))
                n_theorems += 1
            else:
                tok = self.stream.peek()
                raise ParseError(
                    f"expected reserve, func, definition or theorem, "
                    f"found {tok.text or 'end of input'!r}",
                    tok.line,
                    tok.col,
                )
        return Article(
            name_tok.text, tuple(reservations), tuple(decls), tuple(items)
        )

    def _reserve(self) -> list[tuple[str, str]]:
        self.stream.expect_keyword("reserve")
        variables = [self.stream.expect("var", "a variable")]
        while self.stream.peek().kind == ",":
            self.stream.next()
            variables.append(self.stream.expect("var", "a variable"))
        self.stream.expect_keyword("for")
        type_tok = self.stream.expect_name("a type predicate")
        self.stream.expect(";")
        self.state.table.record_predicate(type_tok.text, 1, type_tok)
        out = []
        for var in variables:
            if var.text in self.state.reserved:
                raise ParseError(
                    f"variable '{var.text}' reserved twice", var.line, var.col
                )
            self.state.reserved[var.text] = type_tok.text
            out.append((var.text, type_tok.text))
        return out

    def _func(self, ordinal: int) -> FunctorDecl:
        self.stream.expect_keyword("func")
        name = self.stream.expect_name("a functor name")
        if re.match(r"c[1-9]\d*\Z", name.text):
            raise ParseError(
                f"'{name.text}' is reserved for proof-local constants",
                name.line,
                name.col,
            )
        if name.text in self.state.functors:
            raise ParseError(
                f"functor '{name.text}' declared twice", name.line, name.col
            )
        self.stream.expect("(")
        params: list[str] = []
        if self.stream.peek().kind == "var":
            params.append(self.stream.next().text)
            while self.stream.peek().kind == ",":
                self.stream.next()
                params.append(self.stream.expect("var", "a variable").text)
        self.stream.expect(")")
        if len(set(params)) != len(params):
            raise ParseError("repeated functor parameter", name.line, name.col)
        self.stream.expect("arrow", "'->'")
        result = self.stream.expect_name("a result type predicate")
        self.stream.expect(";")
        self.state.table.record_functor(name.text, len(params), name)
        self.state.table.record_predicate(result.text, 1, result)
        decl = FunctorDecl(name.text, tuple(params), result.text, ordinal)
        self.state.functors[decl.name] = decl
        return decl

    def _item(self, kind: str, ordinal: int) -> Definition | Theorem:
        self.stream.expect_keyword(kind)
        label_tok = self.stream.expect_name("a label")
        label = self._register_label(label_tok)
        self.stream.expect(":")
        formula_tok = self.stream.peek()
        formula = _FormulaParser(self.stream, self.state.table).parse()
        self._check_functors_declared(formula, formula_tok)
        loose = fol.free_vars(formula)
        if loose:
            raise ParseError(
                f"{kind} formula has free variable(s): " + ", ".join(sorted(loose)),
                formula_tok.line,
                formula_tok.col,
            )
        if self.stream.peek().kind == ";":
            self.stream.next()
            proof = None
        elif self.stream.at_keyword("proof"):
            if kind == "definition":
                tok = self.stream.peek()
                raise ParseError("definitions take no proof", tok.line, tok.col)
            proof = self._proof(fixed=set(), visible=set(self.state.item_labels))
        else:
            tok = self.stream.peek()
            raise ParseError(
                f"expected ';' or proof, found {tok.text or 'end of input'!r}",
                tok.line,
                tok.col,
            )
        self.state.item_labels.add(label)
        if kind == "definition":
            return Definition(label, ordinal, formula)
        return Theorem(label, ordinal, formula, proof)

    def _proof(self, fixed: set[str], visible: set[str]) -> Proof:
        """Parse a proof block.  `fixed` holds let-introduced variables and
        `visible` the labels citable at this point; both grow as steps are
        read and subproofs see snapshots of the current values."""
        self.stream.expect_keyword("proof")
        steps: list[ProofStep] = []
        fixed = set(fixed)
        visible = set(visible)
        while not self.stream.at_keyword("end"):
            tok = self.stream.peek()
            if tok.kind == "eof":
                raise ParseError("unterminated proof", tok.line, tok.col)
            if self.stream.at_keyword("let"):
                self.stream.next()
                variables = [self.stream.expect("var", "a variable")]
                while self.stream.peek().kind == ",":
                    self.stream.next()
                    variables.append(self.stream.expect("var", "a variable"))
                self.stream.expect(";")
                for var in variables:
                    if var.text in fixed:
                        raise ParseError(
                            f"variable '{var.text}' already fixed",
                            var.line,
                            var.col,
                        )
                    fixed.add(var.text)
                steps.append(LetStep(tuple(v.text for v in variables)))
            elif self.stream.at_keyword("assume"):
                self.stream.next()
                label = None
                if (
                    self.stream.peek().kind == "ident"
                    and self.stream.peek(1).kind == ":"
                    and self.stream.peek().text not in KEYWORDS
                ):
                    label = self._register_label(self.stream.next())
                    self.stream.next()
                formula = self._parse_step_formula(fixed)
                self.stream.expect(";")
                if label:
                    visible.add(label)
                steps.append(AssumeStep(label, formula))
            elif self.stream.at_keyword("thus"):
                self.stream.next()
                formula = self._parse_step_formula(fixed)
                just = self._justification(fixed, visible)
                steps.append(ThusStep(formula, just))
            elif tok.kind == "ident" and self.stream.peek(1).kind == ":":
                if tok.text in KEYWORDS:
                    raise ParseError(
                        f"keyword '{tok.text}' cannot be used as a label",
                        tok.line,
                        tok.col,
                    )
                label = self._register_label(self.stream.next())
                self.stream.next()
                formula = self._parse_step_formula(fixed)
                just = self._justification(fixed, visible)
                visible.add(label)
                steps.append(AuxStep(label, formula, just))
            else:
                raise ParseError(
                    f"expected a proof step, found {tok.text or 'end of input'!r}",
                    tok.line,
                    tok.col,
                )
        self.stream.expect_keyword("end")
        self.stream.expect(";")
        return Proof(tuple(steps))

    def _justification(self, fixed: set[str], visible: set[str]) -> ByRefs | Subproof:
        if self.stream.at_keyword("by"):
            self.stream.next()
            refs = [self._reference(visible)]
            while self.stream.peek().kind == ",":
                self.stream.next()
                refs.append(self._reference(visible))
            self.stream.expect(";")
            return ByRefs(tuple(refs))
        if self.stream.at_keyword("proof"):
            sub = self._proof(fixed, visible)
            if self.stream.peek().kind == ";":  # tolerated, never printed
                self.stream.next()
            return Subproof(sub)
        tok = self.stream.peek()
        raise ParseError(
            f"expected 'by' or a subproof, found {tok.text or 'end of input'!r}",
            tok.line,
            tok.col,
        )

    def _reference(self, visible: set[str]) -> str:
        tok = self.stream.expect_name("a reference")
        if tok.text in visible or names.is_library_reference(tok.text):
            return tok.text
        raise ParseError(f"unknown reference '{tok.text}'", tok.line, tok.col)


def parse_article(text: str) -> Article:
    """Parse and validate a full article.

    Raises ParseError (with line/column) on syntax errors, duplicate labels,
    unknown references, undeclared functors, and arity conflicts.
    """
    return _ArticleParser(text).parse()
