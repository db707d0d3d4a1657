"""Article structure for the mini formalization language (MFL).

An article declares reservations (variable -> type predicate), functors with
result types, and a sequence of labeled definitions and theorems.  Theorems
may carry proofs built from let/assume/aux/thus steps, justified by `by`
references or nested subproofs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from . import fol


@dataclass(frozen=True)
class FunctorDecl:
    name: str
    params: tuple[str, ...]  # parameter variables, typically reserved
    result_type: str
    ordinal: int  # k-index, dense in declaration order

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass(frozen=True)
class ByRefs:
    refs: tuple[str, ...]


@dataclass(frozen=True)
class Subproof:
    proof: "Proof"


Justification = Union[ByRefs, Subproof]


@dataclass(frozen=True)
class LetStep:
    variables: tuple[str, ...]


@dataclass(frozen=True)
class AssumeStep:
    label: str | None
    formula: fol.Formula


@dataclass(frozen=True)
class AuxStep:
    label: str
    formula: fol.Formula
    justification: Justification


@dataclass(frozen=True)
class ThusStep:
    formula: fol.Formula
    justification: Justification


ProofStep = Union[LetStep, AssumeStep, AuxStep, ThusStep]


@dataclass(frozen=True)
class Proof:
    steps: tuple[ProofStep, ...]


@dataclass(frozen=True)
class Definition:
    label: str
    ordinal: int  # dense among definitions
    formula: fol.Formula


@dataclass(frozen=True)
class Theorem:
    label: str
    ordinal: int  # dense among theorems
    formula: fol.Formula
    proof: Proof | None


Item = Union[Definition, Theorem]


@dataclass(frozen=True)
class Article:
    name: str
    reservations: tuple[tuple[str, str], ...]  # (variable, type predicate)
    functor_decls: tuple[FunctorDecl, ...]
    items: tuple[Item, ...]

    def reservation_map(self) -> dict[str, str]:
        return dict(self.reservations)

    def item_by_label(self, label: str) -> Item | None:
        for item in self.items:
            if item.label == label:
                return item
        return None


# ---------------------------------------------------------------------------
# Formula and article printing (MFL concrete syntax)

_PREC_QUANT = 0
_PREC_IFF = 1
_PREC_IMPLIES = 2
_PREC_OR = 3
_PREC_AND = 4
_PREC_NOT = 5


def format_term(t: fol.Term) -> str:
    if isinstance(t, fol.Var):
        return t.name
    if isinstance(t, fol.Const):
        return t.name
    return f"{t.functor}({', '.join(format_term(a) for a in t.args)})"


def format_formula(f: fol.Formula) -> str:
    """Render a formula in MFL syntax; inverse of the MFL formula parser.

    Verum renders as ``verum`` for display in theses; it has no parseable
    source form.
    """

    def go(g: fol.Formula, min_prec: int) -> str:
        if isinstance(g, fol.Atom):
            if not g.args:
                return g.predicate
            return f"{g.predicate}({', '.join(format_term(a) for a in g.args)})"
        if isinstance(g, fol.Equality):
            return f"{format_term(g.lhs)} = {format_term(g.rhs)}"
        if isinstance(g, fol.Verum):
            return "verum"
        if isinstance(g, fol.Not):
            s = f"not {go(g.arg, _PREC_NOT)}"
            prec = _PREC_NOT
        elif isinstance(g, fol.And):
            s = " & ".join(go(p, _PREC_AND + 1) for p in g.parts)
            prec = _PREC_AND
        elif isinstance(g, fol.Or):
            s = " or ".join(go(p, _PREC_OR + 1) for p in g.parts)
            prec = _PREC_OR
        elif isinstance(g, fol.Implies):
            s = (
                f"{go(g.antecedent, _PREC_IMPLIES + 1)} implies "
                f"{go(g.consequent, _PREC_IMPLIES)}"
            )
            prec = _PREC_IMPLIES
        elif isinstance(g, fol.Iff):
            s = f"{go(g.lhs, _PREC_IFF + 1)} iff {go(g.rhs, _PREC_IFF)}"
            prec = _PREC_IFF
        elif isinstance(g, fol.ForAll):
            s = f"for {', '.join(g.variables)} holds {go(g.body, _PREC_QUANT)}"
            prec = _PREC_QUANT
        elif isinstance(g, fol.Exists):
            s = f"ex {', '.join(g.variables)} st {go(g.body, _PREC_QUANT)}"
            prec = _PREC_QUANT
        else:
            raise TypeError(f"cannot format {g!r}")
        if prec < min_prec:
            return f"({s})"
        return s

    return go(f, _PREC_QUANT)


def _format_justification(just: Justification, indent: int) -> str:
    if isinstance(just, ByRefs):
        return f" by {', '.join(just.refs)};"
    return "\n" + _format_proof(just.proof, indent)


def _format_proof(proof: Proof, indent: int) -> str:
    pad = "  " * indent
    lines = [f"{pad}proof"]
    inner = "  " * (indent + 1)
    for step in proof.steps:
        if isinstance(step, LetStep):
            lines.append(f"{inner}let {', '.join(step.variables)};")
        elif isinstance(step, AssumeStep):
            label = f"{step.label}: " if step.label else ""
            lines.append(f"{inner}assume {label}{format_formula(step.formula)};")
        elif isinstance(step, AuxStep):
            lines.append(
                f"{inner}{step.label}: {format_formula(step.formula)}"
                f"{_format_justification(step.justification, indent + 1)}"
            )
        else:
            lines.append(
                f"{inner}thus {format_formula(step.formula)}"
                f"{_format_justification(step.justification, indent + 1)}"
            )
    lines.append(f"{pad}end;")
    return "\n".join(lines)


def pretty_print(article: Article) -> str:
    """Canonical source text; parsing it yields a structurally equal Article."""
    lines = [f"article {article.name};"]
    if article.reservations:
        lines.append("")
        i = 0
        res = article.reservations
        while i < len(res):
            j = i
            while j + 1 < len(res) and res[j + 1][1] == res[i][1]:
                j += 1
            group = ", ".join(v for v, _ in res[i : j + 1])
            lines.append(f"reserve {group} for {res[i][1]};")
            i = j + 1
    if article.functor_decls:
        lines.append("")
        for decl in article.functor_decls:
            params = ", ".join(decl.params)
            lines.append(f"func {decl.name}({params}) -> {decl.result_type};")
    for item in article.items:
        lines.append("")
        kind = "definition" if isinstance(item, Definition) else "theorem"
        head = f"{kind} {item.label}: {format_formula(item.formula)}"
        if isinstance(item, Theorem) and item.proof is not None:
            lines.append(head)
            lines.append(_format_proof(item.proof, 0))
        else:
            lines.append(head + ";")
    return "\n".join(lines) + "\n"
