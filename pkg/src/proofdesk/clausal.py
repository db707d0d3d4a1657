"""Clause normal form for the internal prover.

clausify() produces a clause set equisatisfiable with axioms + negated
conjecture.  Skolem symbols use the reserved prefixes skf_/skc_, chosen to
avoid every symbol of the input.  When equality occurs, the standard
equality axioms (reflexivity, symmetry, transitivity, congruence over every
functor and predicate of the clause set) are appended as unnamed clauses.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

from . import fol
from .errors import OpenFormulaError

EQ = "="  # predicate name reserved for equality literals


@dataclass(frozen=True)
class Literal:
    positive: bool
    predicate: str
    args: tuple[fol.Term, ...]

    def negate(self) -> "Literal":
        return Literal(not self.positive, self.predicate, self.args)


@dataclass(frozen=True)
class Clause:
    literals: tuple[Literal, ...]
    origin: str | None = None  # input formula name; None for built-in axioms

    def is_empty(self) -> bool:
        return not self.literals


@dataclass(frozen=True)
class ClausalForm:
    clauses: tuple[Clause, ...]


NamedFormula = Union[fol.Formula, tuple[str, fol.Formula]]


def clausify(
    axioms: Sequence[NamedFormula],
    conjecture: fol.Formula,
    conjecture_name: str = "goal",
) -> ClausalForm:
    """CNF of axioms + negated conjecture, clause origins tracking input names.

    Axioms may be bare formulas (named ax_1, ax_2, ...) or (name, formula)
    pairs.  All formulas must be closed.
    """
    named: list[tuple[str, fol.Formula]] = []
    for i, ax in enumerate(axioms):
        if isinstance(ax, tuple):
            named.append(ax)
        else:
            named.append((f"ax_{i + 1}", ax))

    taken: set[str] = set()
    for _, f in named:
        taken |= fol.symbols(f)
    taken |= fol.symbols(conjecture)
    gen = _SkolemGen(taken)

    clauses: list[Clause] = []
    for name, f in named:
        free = fol.free_vars(f)
        if free:
            raise OpenFormulaError(free)
        clauses.extend(_formula_clauses(f, name, gen))
    free = fol.free_vars(conjecture)
    if free:
        raise OpenFormulaError(free)
    clauses.extend(_formula_clauses(fol.Not(conjecture), conjecture_name, gen))

    if any(lit.predicate == EQ for c in clauses for lit in c.literals):
        clauses.extend(_equality_axioms(clauses))
    return ClausalForm(tuple(clauses))


class _SkolemGen:
    def __init__(self, taken: set[str]):
        self.taken = taken
        self.counter = 0

    def fresh(self, arity: int) -> str:
        while True:
            self.counter += 1
            name = (f"skc_{self.counter}" if arity == 0 else f"skf_{self.counter}")
            if name not in self.taken:
                self.taken.add(name)
                return name


class _VarGen:
    def __init__(self) -> None:
        self.counter = 0

    def fresh(self) -> fol.Var:
        self.counter += 1
        return fol.Var(f"V{self.counter}")


# Internal NNF representation: literals plus n-ary and/or and quantifiers,
# with True/False folded away eagerly.
_TRUE = ("true",)
_FALSE = ("false",)


def _formula_clauses(f: fol.Formula, origin: str, gen: _SkolemGen) -> list[Clause]:
    nnf = _nnf(f, True)
    vargen = _VarGen()
    matrix = _skolemize(nnf, {}, (), gen, vargen)
    clause_sets = _distribute(matrix)
    out: list[Clause] = []
    seen: set[tuple] = set()
    for lits in clause_sets:
        unique: list[Literal] = []
        tautology = False
        for lit in lits:
            if lit in unique:
                continue
            if lit.negate() in lits:
                tautology = True
                break
            unique.append(lit)
        if tautology:
            continue
        clause = Clause(tuple(unique), origin)
        key = tuple(unique)
        if key in seen:
            continue
        seen.add(key)
        out.append(clause)
    return out


def _nnf(f: fol.Formula, positive: bool):
    """Negation normal form over an internal algebra with True/False folding."""
    if isinstance(f, fol.Verum):
        return _TRUE if positive else _FALSE
    if isinstance(f, fol.Atom):
        return ("lit", positive, f.predicate, f.args)
    if isinstance(f, fol.Equality):
        return ("lit", positive, EQ, (f.lhs, f.rhs))
    if isinstance(f, fol.Not):
        return _nnf(f.arg, not positive)
    if isinstance(f, fol.And):
        parts = [_nnf(p, positive) for p in f.parts]
        return _join(parts, conj=positive)
    if isinstance(f, fol.Or):
        parts = [_nnf(p, positive) for p in f.parts]
        return _join(parts, conj=not positive)
    if isinstance(f, fol.Implies):
        return _join([_nnf(f.antecedent, not positive), _nnf(f.consequent, positive)],
                     conj=not positive)
    if isinstance(f, fol.Iff):
        # (a => b) & (b => a), or its negation
        expanded = fol.And(
            (fol.Implies(f.lhs, f.rhs), fol.Implies(f.rhs, f.lhs))
        )
        return _nnf(expanded, positive)
    if isinstance(f, fol.ForAll):
        kind = "all" if positive else "exists"
        return (kind, f.variables, _nnf(f.body, positive))
    if isinstance(f, fol.Exists):
        kind = "exists" if positive else "all"
        return (kind, f.variables, _nnf(f.body, positive))
    raise TypeError(f"cannot clausify {f!r}")


def _join(parts: list, conj: bool):
    flat = []
    for p in parts:
        if conj and p == _TRUE:
            continue
        if conj and p == _FALSE:
            return _FALSE
        if not conj and p == _FALSE:
            continue
        if not conj and p == _TRUE:
            return _TRUE
        if p[0] == ("and" if conj else "or"):
            flat.extend(p[1])
        else:
            flat.append(p)
    if not flat:
        return _TRUE if conj else _FALSE
    if len(flat) == 1:
        return flat[0]
    return ("and" if conj else "or", flat)


def _skolemize(node, env: dict[str, fol.Term], universals: tuple[fol.Var, ...],
               gen: _SkolemGen, vargen: _VarGen):
    """Drop quantifiers: universals become fresh free variables, existentials
    become Skolem terms over the universals in scope."""
    kind = node[0]
    if kind in ("true", "false"):
        return node
    if kind == "lit":
        _, positive, pred, args = node
        args = tuple(fol.substitute_term(a, env) for a in args)
        return ("lit", positive, pred, args)
    if kind in ("and", "or"):
        return (kind, [
            _skolemize(p, env, universals, gen, vargen) for p in node[1]
        ])
    if kind == "all":
        _, variables, body = node
        env = dict(env)
        for v in variables:
            fresh = vargen.fresh()
            env[v] = fresh
            universals = universals + (fresh,)
        return _skolemize(body, env, universals, gen, vargen)
    if kind == "exists":
        _, variables, body = node
        env = dict(env)
        for v in variables:
            name = gen.fresh(len(universals))
            env[v] = fol.make_app(name, universals)
        return _skolemize(body, env, universals, gen, vargen)
    raise ValueError(f"bad node {node!r}")


def _distribute(node) -> list[list[Literal]]:
    """CNF distribution: a list of clauses, each a list of literals."""
    kind = node[0]
    if kind == "true":
        return []
    if kind == "false":
        return [[]]
    if kind == "lit":
        _, positive, pred, args = node
        return [[Literal(positive, pred, args)]]
    if kind == "and":
        out: list[list[Literal]] = []
        for p in node[1]:
            out.extend(_distribute(p))
        return out
    if kind == "or":
        acc: list[list[Literal]] = [[]]
        for p in node[1]:
            branches = _distribute(p)
            if not branches:  # True disjunct: whole disjunction is true
                return []
            acc = [a + b for a in acc for b in branches]
        return acc
    raise ValueError(f"bad node {node!r}")


def _equality_axioms(clauses: list[Clause]) -> list[Clause]:
    functors: dict[str, int] = {}
    predicates: dict[str, int] = {}

    def scan_term(t: fol.Term) -> None:
        if isinstance(t, fol.App):
            functors.setdefault(t.functor, len(t.args))
            for a in t.args:
                scan_term(a)

    for c in clauses:
        for lit in c.literals:
            if lit.predicate != EQ and lit.args:
                predicates.setdefault(lit.predicate, len(lit.args))
            for a in lit.args:
                scan_term(a)

    x, y, z = fol.Var("X"), fol.Var("Y"), fol.Var("Z")
    out = [
        Clause((Literal(True, EQ, (x, x)),)),
        Clause((Literal(False, EQ, (x, y)), Literal(True, EQ, (y, x)))),
        Clause(
            (
                Literal(False, EQ, (x, y)),
                Literal(False, EQ, (y, z)),
                Literal(True, EQ, (x, z)),
            )
        ),
    ]
    for name in sorted(functors):
        arity = functors[name]
        xs = tuple(fol.Var(f"X{i + 1}") for i in range(arity))
        ys = tuple(fol.Var(f"Y{i + 1}") for i in range(arity))
        lits = [Literal(False, EQ, (a, b)) for a, b in zip(xs, ys)]
        lits.append(Literal(True, EQ, (fol.App(name, xs), fol.App(name, ys))))
        out.append(Clause(tuple(lits)))
    for name in sorted(predicates):
        arity = predicates[name]
        xs = tuple(fol.Var(f"X{i + 1}") for i in range(arity))
        ys = tuple(fol.Var(f"Y{i + 1}") for i in range(arity))
        lits = [Literal(False, EQ, (a, b)) for a, b in zip(xs, ys)]
        lits.append(Literal(False, name, xs))
        lits.append(Literal(True, name, ys))
        out.append(Clause(tuple(lits)))
    return out


def clause_symbols(form: ClausalForm) -> set[str]:
    """Functor/constant and predicate names over the whole clause set."""
    out: set[str] = set()

    def scan_term(t: fol.Term) -> None:
        if isinstance(t, fol.Const):
            out.add(t.name)
        elif isinstance(t, fol.App):
            out.add(t.functor)
            for a in t.args:
                scan_term(a)

    for c in form.clauses:
        for lit in c.literals:
            if lit.predicate != EQ:
                out.add(lit.predicate)
            for a in lit.args:
                scan_term(a)
    return out


def format_literal(lit: Literal) -> str:
    if lit.predicate == EQ:
        lhs, rhs = lit.args
        op = "=" if lit.positive else "!="
        return f"{_fmt_term(lhs)} {op} {_fmt_term(rhs)}"
    sign = "" if lit.positive else "~"
    if not lit.args:
        return f"{sign}{lit.predicate}"
    return f"{sign}{lit.predicate}({','.join(_fmt_term(a) for a in lit.args)})"


def _fmt_term(t: fol.Term) -> str:
    if isinstance(t, fol.Var):
        return t.name
    if isinstance(t, fol.Const):
        return t.name
    return f"{t.functor}({','.join(_fmt_term(a) for a in t.args)})"


def format_clause(c: Clause) -> str:
    if not c.literals:
        return "$false"
    return " | ".join(format_literal(lit) for lit in c.literals)
