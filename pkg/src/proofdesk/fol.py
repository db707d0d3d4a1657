"""First-order terms and formulas shared by the article language and prover output.

All values are immutable after construction and safe to share between threads
and worker processes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Union

VARIABLE_RE = re.compile(r"[A-Z][A-Za-z0-9_]*\Z")
SYMBOL_RE = re.compile(r"[a-z][A-Za-z0-9_]*\Z")


def is_variable_name(name: str) -> bool:
    return VARIABLE_RE.match(name) is not None


def is_symbol_name(name: str) -> bool:
    return SYMBOL_RE.match(name) is not None


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class App:
    functor: str
    args: tuple["Term", ...]

    def __post_init__(self) -> None:
        if not self.args:
            raise ValueError("use Const for a 0-ary functor")


Term = Union[Var, Const, App]


def make_app(functor: str, args: Iterable[Term]) -> Term:
    """Build an application, collapsing the 0-ary case to a constant."""
    args = tuple(args)
    return App(functor, args) if args else Const(functor)


# ---------------------------------------------------------------------------
# Formulas


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Equality:
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    parts: tuple["Formula", ...]

    def __post_init__(self) -> None:
        if len(self.parts) < 2:
            raise ValueError("conjunction needs at least two parts")


@dataclass(frozen=True)
class Or:
    parts: tuple["Formula", ...]

    def __post_init__(self) -> None:
        if len(self.parts) < 2:
            raise ValueError("disjunction needs at least two parts")


@dataclass(frozen=True)
class Implies:
    antecedent: "Formula"
    consequent: "Formula"


@dataclass(frozen=True)
class Iff:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class ForAll:
    variables: tuple[str, ...]
    body: "Formula"

    def __post_init__(self) -> None:
        if not self.variables:
            raise ValueError("quantifier needs at least one variable")


@dataclass(frozen=True)
class Exists:
    variables: tuple[str, ...]
    body: "Formula"

    def __post_init__(self) -> None:
        if not self.variables:
            raise ValueError("quantifier needs at least one variable")


@dataclass(frozen=True)
class Verum:
    """The discharged thesis; has no other use."""


Formula = Union[Atom, Equality, Not, And, Or, Implies, Iff, ForAll, Exists, Verum]

VERUM = Verum()


def conjoin(parts: list["Formula"]) -> "Formula":
    """And over a list, collapsing the 0/1-element cases."""
    if not parts:
        return VERUM
    if len(parts) == 1:
        return parts[0]
    return And(tuple(parts))


# ---------------------------------------------------------------------------
# Traversals


def term_free_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Const):
        return set()
    out: set[str] = set()
    for a in t.args:
        out |= term_free_vars(a)
    return out


def free_vars(f: Formula) -> set[str]:
    if isinstance(f, Atom):
        out: set[str] = set()
        for a in f.args:
            out |= term_free_vars(a)
        return out
    if isinstance(f, Equality):
        return term_free_vars(f.lhs) | term_free_vars(f.rhs)
    if isinstance(f, Not):
        return free_vars(f.arg)
    if isinstance(f, (And, Or)):
        out = set()
        for p in f.parts:
            out |= free_vars(p)
        return out
    if isinstance(f, Implies):
        return free_vars(f.antecedent) | free_vars(f.consequent)
    if isinstance(f, Iff):
        return free_vars(f.lhs) | free_vars(f.rhs)
    if isinstance(f, (ForAll, Exists)):
        return free_vars(f.body) - set(f.variables)
    return set()


def term_symbols(t: Term) -> set[str]:
    """Functor and constant names occurring in a term (variables excluded)."""
    if isinstance(t, Var):
        return set()
    if isinstance(t, Const):
        return {t.name}
    out = {t.functor}
    for a in t.args:
        out |= term_symbols(a)
    return out


def symbols(f: Formula) -> set[str]:
    """All predicate, functor and constant names occurring in a formula."""
    preds, funcs = split_symbols(f)
    return preds | funcs


def split_symbols(f: Formula) -> tuple[set[str], set[str]]:
    """Symbol names of a formula, split into (predicates, functors-and-constants)."""
    preds: set[str] = set()
    funcs: set[str] = set()

    def walk(g: Formula) -> None:
        if isinstance(g, Atom):
            preds.add(g.predicate)
            for a in g.args:
                funcs.update(term_symbols(a))
        elif isinstance(g, Equality):
            funcs.update(term_symbols(g.lhs))
            funcs.update(term_symbols(g.rhs))
        elif isinstance(g, Not):
            walk(g.arg)
        elif isinstance(g, (And, Or)):
            for p in g.parts:
                walk(p)
        elif isinstance(g, Implies):
            walk(g.antecedent)
            walk(g.consequent)
        elif isinstance(g, Iff):
            walk(g.lhs)
            walk(g.rhs)
        elif isinstance(g, (ForAll, Exists)):
            walk(g.body)

    walk(f)
    return preds, funcs


# ---------------------------------------------------------------------------
# Substitution


def substitute_term(t: Term, binding: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return binding.get(t.name, t)
    if isinstance(t, Const):
        return t
    return App(t.functor, tuple(substitute_term(a, binding) for a in t.args))


def _fresh_name(base: str, taken: set[str]) -> str:
    cand = base
    n = 0
    while cand in taken:
        n += 1
        cand = f"{base}_{n}"
    return cand


def substitute(f: Formula, binding: Mapping[str, Term]) -> Formula:
    """Capture-avoiding simultaneous substitution of variables by terms.

    Quantified variables that would capture a variable of a substituted term
    are renamed to fresh names.
    """
    if not binding:
        return f

    def go(g: Formula, b: Mapping[str, Term]) -> Formula:
        if isinstance(g, Atom):
            return Atom(g.predicate, tuple(substitute_term(a, b) for a in g.args))
        if isinstance(g, Equality):
            return Equality(substitute_term(g.lhs, b), substitute_term(g.rhs, b))
        if isinstance(g, Not):
            return Not(go(g.arg, b))
        if isinstance(g, And):
            return And(tuple(go(p, b) for p in g.parts))
        if isinstance(g, Or):
            return Or(tuple(go(p, b) for p in g.parts))
        if isinstance(g, Implies):
            return Implies(go(g.antecedent, b), go(g.consequent, b))
        if isinstance(g, Iff):
            return Iff(go(g.lhs, b), go(g.rhs, b))
        if isinstance(g, (ForAll, Exists)):
            cls = ForAll if isinstance(g, ForAll) else Exists
            inner = {k: v for k, v in b.items() if k not in g.variables}
            if not inner:
                return g
            inner_range: set[str] = set()
            for t in inner.values():
                inner_range |= term_free_vars(t)
            taken = (
                inner_range | free_vars(g.body) | set(g.variables) | set(inner.keys())
            )
            new_vars: list[str] = []
            renames: dict[str, Term] = {}
            for v in g.variables:
                if v in inner_range:
                    fresh = _fresh_name(v, taken)
                    taken.add(fresh)
                    renames[v] = Var(fresh)
                    new_vars.append(fresh)
                else:
                    new_vars.append(v)
            body = g.body
            if renames:
                body = go(body, renames)
            body = go(body, inner)
            return cls(tuple(new_vars), body)
        return g

    return go(f, binding)


# ---------------------------------------------------------------------------
# Structural comparison and normalization


def flatten_and(f: Formula) -> Formula:
    """Recursively flatten conjunctions nested directly inside conjunctions."""
    if isinstance(f, And):
        parts: list[Formula] = []
        for p in f.parts:
            q = flatten_and(p)
            if isinstance(q, And):
                parts.extend(q.parts)
            else:
                parts.append(q)
        return And(tuple(parts))
    if isinstance(f, Or):
        return Or(tuple(flatten_and(p) for p in f.parts))
    if isinstance(f, Not):
        return Not(flatten_and(f.arg))
    if isinstance(f, Implies):
        return Implies(flatten_and(f.antecedent), flatten_and(f.consequent))
    if isinstance(f, Iff):
        return Iff(flatten_and(f.lhs), flatten_and(f.rhs))
    if isinstance(f, ForAll):
        return ForAll(f.variables, flatten_and(f.body))
    if isinstance(f, Exists):
        return Exists(f.variables, flatten_and(f.body))
    return f


def and_parts(f: Formula) -> tuple[Formula, ...]:
    g = flatten_and(f)
    return g.parts if isinstance(g, And) else (g,)


def _alpha_term(s: Term, t: Term, env: dict[str, str]) -> bool:
    if isinstance(s, Var) and isinstance(t, Var):
        return env.get(s.name, s.name) == t.name
    if isinstance(s, Const) and isinstance(t, Const):
        return s.name == t.name
    if isinstance(s, App) and isinstance(t, App):
        return (
            s.functor == t.functor
            and len(s.args) == len(t.args)
            and all(_alpha_term(a, b, env) for a, b in zip(s.args, t.args))
        )
    return False


def alpha_equal(f: Formula, g: Formula) -> bool:
    """Structural equality up to consistent renaming of bound variables."""

    def go(a: Formula, b: Formula, env: dict[str, str]) -> bool:
        if type(a) is not type(b):
            return False
        if isinstance(a, Atom):
            return (
                a.predicate == b.predicate
                and len(a.args) == len(b.args)
                and all(_alpha_term(s, t, env) for s, t in zip(a.args, b.args))
            )
        if isinstance(a, Equality):
            return _alpha_term(a.lhs, b.lhs, env) and _alpha_term(a.rhs, b.rhs, env)
        if isinstance(a, Not):
            return go(a.arg, b.arg, env)
        if isinstance(a, (And, Or)):
            return len(a.parts) == len(b.parts) and all(
                go(p, q, env) for p, q in zip(a.parts, b.parts)
            )
        if isinstance(a, Implies):
            return go(a.antecedent, b.antecedent, env) and go(
                a.consequent, b.consequent, env
            )
        if isinstance(a, Iff):
            return go(a.lhs, b.lhs, env) and go(a.rhs, b.rhs, env)
        if isinstance(a, (ForAll, Exists)):
            if len(a.variables) != len(b.variables):
                return False
            inner = dict(env)
            inner.update(zip(a.variables, b.variables))
            return go(a.body, b.body, inner)
        return True  # Verum

    return go(f, g, {})


def matches(stated: Formula, thesis_part: Formula) -> bool:
    """Structural match used by skeleton checking: And-flattening plus
    bound-variable renaming, nothing stronger."""
    return alpha_equal(flatten_and(stated), flatten_and(thesis_part))


# ---------------------------------------------------------------------------
# Type-guard insertion


def relativize(f: Formula, var_types: Mapping[str, str]) -> Formula:
    """Guard quantifiers with the type predicates reserved for their variables.

    ``for X holds p(X)`` with X of type ``set`` becomes
    ``! [X] : (set(X) => p(X))``; existentials conjoin the guard instead.
    Variables without a reserved type are left unguarded.
    """
    if isinstance(f, Not):
        return Not(relativize(f.arg, var_types))
    if isinstance(f, And):
        return And(tuple(relativize(p, var_types) for p in f.parts))
    if isinstance(f, Or):
        return Or(tuple(relativize(p, var_types) for p in f.parts))
    if isinstance(f, Implies):
        return Implies(
            relativize(f.antecedent, var_types), relativize(f.consequent, var_types)
        )
    if isinstance(f, Iff):
        return Iff(relativize(f.lhs, var_types), relativize(f.rhs, var_types))
    if isinstance(f, (ForAll, Exists)):
        body = relativize(f.body, var_types)
        guards = [
            Atom(var_types[v], (Var(v),)) for v in f.variables if v in var_types
        ]
        if guards:
            if isinstance(f, ForAll):
                body = Implies(conjoin(guards), body)
            else:
                body = And(tuple(guards) + (body,))
        cls = ForAll if isinstance(f, ForAll) else Exists
        return cls(f.variables, body)
    return f
