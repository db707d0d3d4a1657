"""Shared test machinery: random generators, brute-force oracles, and the
synthetic article corpus."""

from __future__ import annotations

import itertools
import random

from proofdesk import fol
from proofdesk.library import LibraryStore, export_article
from proofdesk.parser import parse_article

PROP_ATOMS = ("p", "q", "r", "s")


# ---------------------------------------------------------------------------
# Propositional formulas and the truth-table oracle


def random_prop_formula(rng: random.Random, depth: int = 3) -> fol.Formula:
    if depth == 0 or rng.random() < 0.3:
        return fol.Atom(rng.choice(PROP_ATOMS), ())
    kind = rng.randrange(5)
    if kind == 0:
        return fol.Not(random_prop_formula(rng, depth - 1))
    if kind == 1:
        return fol.And(
            tuple(random_prop_formula(rng, depth - 1) for _ in range(rng.randint(2, 3)))
        )
    if kind == 2:
        return fol.Or(
            tuple(random_prop_formula(rng, depth - 1) for _ in range(rng.randint(2, 3)))
        )
    if kind == 3:
        return fol.Implies(
            random_prop_formula(rng, depth - 1), random_prop_formula(rng, depth - 1)
        )
    return fol.Iff(
        random_prop_formula(rng, depth - 1), random_prop_formula(rng, depth - 1)
    )


def eval_prop(f: fol.Formula, assignment: dict[str, bool]) -> bool:
    if isinstance(f, fol.Atom):
        return assignment[f.predicate]
    if isinstance(f, fol.Verum):
        return True
    if isinstance(f, fol.Not):
        return not eval_prop(f.arg, assignment)
    if isinstance(f, fol.And):
        return all(eval_prop(p, assignment) for p in f.parts)
    if isinstance(f, fol.Or):
        return any(eval_prop(p, assignment) for p in f.parts)
    if isinstance(f, fol.Implies):
        return (not eval_prop(f.antecedent, assignment)) or eval_prop(
            f.consequent, assignment
        )
    if isinstance(f, fol.Iff):
        return eval_prop(f.lhs, assignment) == eval_prop(f.rhs, assignment)
    raise TypeError(f"not propositional: {f!r}")


def truth_table_entailed(axioms: list[fol.Formula], conjecture: fol.Formula) -> bool:
    """Brute force over all assignments of the fixed atom set."""
    for values in itertools.product([False, True], repeat=len(PROP_ATOMS)):
        assignment = dict(zip(PROP_ATOMS, values))
        if all(eval_prop(a, assignment) for a in axioms) and not eval_prop(
            conjecture, assignment
        ):
            return False
    return True


def truth_table_satisfiable(formulas: list[fol.Formula]) -> bool:
    for values in itertools.product([False, True], repeat=len(PROP_ATOMS)):
        assignment = dict(zip(PROP_ATOMS, values))
        if all(eval_prop(f, assignment) for f in formulas):
            return True
    return False


# ---------------------------------------------------------------------------
# Random closed first-order formulas (for serializer round-trips)


def random_term(rng: random.Random, variables: list[str], depth: int = 2) -> fol.Term:
    choice = rng.random()
    if variables and choice < 0.4:
        return fol.Var(rng.choice(variables))
    if depth == 0 or choice < 0.7:
        return fol.Const(rng.choice(["a", "b", "c0"]))
    functor, arity = rng.choice([("f", 1), ("g", 2)])
    return fol.App(
        functor, tuple(random_term(rng, variables, depth - 1) for _ in range(arity))
    )


def random_fof(rng: random.Random, variables: list[str] | None = None,
               depth: int = 3) -> fol.Formula:
    """A random closed formula; fresh quantifiers bind every variable used."""
    variables = variables if variables is not None else []
    if depth == 0:
        kind = rng.randrange(3)
        if kind == 0:
            return fol.Atom("p0", ())
        if kind == 1:
            arity = rng.randint(1, 2)
            return fol.Atom(
                f"q{arity}", tuple(random_term(rng, variables, 1) for _ in range(arity))
            )
        return fol.Equality(random_term(rng, variables, 1), random_term(rng, variables, 1))
    kind = rng.randrange(7)
    if kind == 0:
        return fol.Not(random_fof(rng, variables, depth - 1))
    if kind == 1:
        return fol.And(
            tuple(random_fof(rng, variables, depth - 1) for _ in range(rng.randint(2, 3)))
        )
    if kind == 2:
        return fol.Or(
            tuple(random_fof(rng, variables, depth - 1) for _ in range(rng.randint(2, 3)))
        )
    if kind == 3:
        return fol.Implies(
            random_fof(rng, variables, depth - 1), random_fof(rng, variables, depth - 1)
        )
    if kind == 4:
        return fol.Iff(
            random_fof(rng, variables, depth - 1), random_fof(rng, variables, depth - 1)
        )
    fresh = [f"V{len(variables) + i + 1}" for i in range(rng.randint(1, 2))]
    body = random_fof(rng, variables + fresh, depth - 1)
    cls = fol.ForAll if kind == 5 else fol.Exists
    return cls(tuple(fresh), body)


# ---------------------------------------------------------------------------
# Synthetic corpus: one base library article plus N derived articles

CORPUS_SEED = 20260810
N_CHAINS = 8


def base_article_text() -> str:
    lines = ["article base0;", "reserve X for set;"]
    n = 0
    for i in range(1, N_CHAINS + 1):
        n += 1
        lines.append(
            f"theorem t{n}: for X holds (p{i}(X) implies q{i}(X));"
        )
        n += 1
        lines.append(
            f"theorem t{n}: for X holds (q{i}(X) implies r{i}(X));"
        )
    return "\n".join(lines) + "\n"


def corpus_article_text(k: int, rng: random.Random, n_theorems: int = 11) -> str:
    lines = [
        f"article syn{k};",
        "reserve X for set;",
        f"func g{k}(X) -> set;",
        f"definition d1: for X holds h{k}(g{k}(X));",
    ]
    for j in range(1, n_theorems + 1):
        i = rng.randint(1, N_CHAINS)
        base_pq = f"t{2 * i - 1}_base0"
        base_qr = f"t{2 * i}_base0"
        pattern = rng.randrange(4)
        if pattern == 0:
            lines += [
                f"theorem t{j}: for X holds (p{i}(X) implies q{i}(X))",
                f"proof let X; assume h{j}: p{i}(X); "
                f"thus q{i}(X) by h{j}, {base_pq}; end;",
            ]
        elif pattern == 1:
            lines += [
                f"theorem t{j}: for X holds (p{i}(X) implies r{i}(X))",
                f"proof let X; assume h{j}: p{i}(X); "
                f"s{j}: q{i}(X) by h{j}, {base_pq}; "
                f"thus r{i}(X) by s{j}, {base_qr}; end;",
            ]
        elif pattern == 2:
            lines += [
                f"theorem t{j}: for X holds (p{i}(g{k}(X)) implies q{i}(g{k}(X)))",
                f"proof let X; assume h{j}: p{i}(g{k}(X)); "
                f"thus q{i}(g{k}(X)) by h{j}, {base_pq}; end;",
            ]
        else:
            lines += [
                f"theorem t{j}: for X holds (h{k}(g{k}(X)) & (p{i}(X) implies q{i}(X)))",
                f"proof let X; thus h{k}(g{k}(X)) by d1; "
                f"assume h{j}: p{i}(X); thus q{i}(X) by h{j}, {base_pq}; end;",
            ]
    return "\n".join(lines) + "\n"


def build_corpus(n_articles: int = 20, n_theorems: int = 11, seed: int = CORPUS_SEED):
    """(library store with base0 installed, list of parsed corpus articles)."""
    rng = random.Random(seed)
    lib = LibraryStore()
    base = parse_article(base_article_text())
    lib.add_article(base.name, export_article(base))
    articles = [
        parse_article(corpus_article_text(k, rng, n_theorems))
        for k in range(1, n_articles + 1)
    ]
    return lib, articles


def speedup_article_text(n_theorems: int = 100, n_distractors: int = 8) -> str:
    """One article whose 2*n_theorems obligations are deliberately heavier
    (distractor premises, nested functor terms) so worker scaling is visible
    above process-pool overhead."""
    rng = random.Random(CORPUS_SEED + 1)
    lines = ["article speedy;", "reserve X for set;", "func gs(X) -> set;"]
    for j in range(1, n_theorems + 1):
        i = rng.randint(1, N_CHAINS)
        pool = [m for m in range(1, 2 * N_CHAINS + 1) if m not in (2 * i - 1, 2 * i)]
        picked = rng.sample(pool, n_distractors)
        cite_pq = ", ".join(
            f"t{m}_base0" for m in sorted(picked[: n_distractors // 2] + [2 * i - 1])
        )
        cite_qr = ", ".join(
            f"t{m}_base0" for m in sorted(picked[n_distractors // 2 :] + [2 * i])
        )
        lines += [
            f"theorem t{j}: for X holds (p{i}(gs(gs(X))) implies r{i}(gs(gs(X))))",
            f"proof let X; assume h{j}: p{i}(gs(gs(X)));"
            f" s{j}: q{i}(gs(gs(X))) by h{j}, {cite_pq};"
            f" thus r{i}(gs(gs(X))) by s{j}, {cite_qr}; end;",
        ]
    return "\n".join(lines) + "\n"
