"""Bounded given-clause saturation prover ("mini-e").

Binary resolution with factoring, given-clause selection by an age/weight
ratio of 1:4, forward subsumption, and a clause-weight cap on derived
clauses.  Theorem means the empty clause was derived; CounterSatisfiable
means the clause set saturated with no derived clause discarded by the
weight cap (so the saturation is an honest model witness); GaveUp means it
saturated only after discarding something; ResourceOut means a limit
tripped first.
"""

from __future__ import annotations

import heapq
import time
from collections import deque
from dataclasses import dataclass

from . import fol
from .clausal import ClausalForm, Literal, format_clause
from .szs import Limits, RunResult, SzsStatus

INTERNAL_SYSTEM = "mini-e"

DEFAULT_WEIGHT_CAP = 64


# ---------------------------------------------------------------------------
# Substitutions (triangular: resolve variable bindings lazily)


def _walk(t: fol.Term, sub: dict[str, fol.Term]) -> fol.Term:
    while isinstance(t, fol.Var) and t.name in sub:
        t = sub[t.name]
    return t


def _occurs(name: str, t: fol.Term, sub: dict[str, fol.Term]) -> bool:
    t = _walk(t, sub)
    if isinstance(t, fol.Var):
        return t.name == name
    if isinstance(t, fol.App):
        return any(_occurs(name, a, sub) for a in t.args)
    return False


def unify_terms(
    t1: fol.Term, t2: fol.Term, sub: dict[str, fol.Term] | None
) -> dict[str, fol.Term] | None:
    if sub is None:
        return None
    t1 = _walk(t1, sub)
    t2 = _walk(t2, sub)
    if t1 == t2:
        return sub
    if isinstance(t1, fol.Var):
        if _occurs(t1.name, t2, sub):
            return None
        out = dict(sub)
        out[t1.name] = t2
        return out
    if isinstance(t2, fol.Var):
        if _occurs(t2.name, t1, sub):
            return None
        out = dict(sub)
        out[t2.name] = t1
        return out
    if (
        isinstance(t1, fol.App)
        and isinstance(t2, fol.App)
        and t1.functor == t2.functor
        and len(t1.args) == len(t2.args)
    ):
        for a, b in zip(t1.args, t2.args):
            sub = unify_terms(a, b, sub)
            if sub is None:
                return None
        return sub
    return None


def unify_args(
    args1: tuple[fol.Term, ...],
    args2: tuple[fol.Term, ...],
    sub: dict[str, fol.Term] | None = None,
) -> dict[str, fol.Term] | None:
    sub = {} if sub is None else sub
    for a, b in zip(args1, args2):
        sub = unify_terms(a, b, sub)
        if sub is None:
            return None
    return sub


def _resolve_term(t: fol.Term, sub: dict[str, fol.Term]) -> fol.Term:
    t = _walk(t, sub)
    if isinstance(t, fol.App):
        return fol.App(t.functor, tuple(_resolve_term(a, sub) for a in t.args))
    return t


def _apply(lit: Literal, sub: dict[str, fol.Term]) -> Literal:
    return Literal(
        lit.positive, lit.predicate, tuple(_resolve_term(a, sub) for a in lit.args)
    )


# ---------------------------------------------------------------------------
# One-way matching, for subsumption


def _match_term(
    pattern: fol.Term, target: fol.Term, sub: dict[str, fol.Term]
) -> dict[str, fol.Term] | None:
    if isinstance(pattern, fol.Var):
        bound = sub.get(pattern.name)
        if bound is None:
            out = dict(sub)
            out[pattern.name] = target
            return out
        return sub if bound == target else None
    if isinstance(pattern, fol.Const):
        return sub if pattern == target else None
    if (
        isinstance(pattern, fol.App)
        and isinstance(target, fol.App)
        and pattern.functor == target.functor
        and len(pattern.args) == len(target.args)
    ):
        for p, t in zip(pattern.args, target.args):
            result = _match_term(p, t, sub)
            if result is None:
                return None
            sub = result
        return sub
    return None


def subsumes(c: tuple[Literal, ...], d: tuple[Literal, ...]) -> bool:
    """True when some instance of clause c is a sub-multiset of clause d."""
    if len(c) > len(d):
        return False

    def backtrack(i: int, sub: dict[str, fol.Term], used: set[int]) -> bool:
        if i == len(c):
            return True
        lc = c[i]
        for j, ld in enumerate(d):
            if j in used:
                continue
            if (
                lc.positive != ld.positive
                or lc.predicate != ld.predicate
                or len(lc.args) != len(ld.args)
            ):
                continue
            attempt = sub
            ok = True
            for p, t in zip(lc.args, ld.args):
                result = _match_term(p, t, attempt)
                if result is None:
                    ok = False
                    break
                attempt = result
            if ok and backtrack(i + 1, attempt, used | {j}):
                return True
        return False

    return backtrack(0, {}, set())


# ---------------------------------------------------------------------------
# Clause bookkeeping


@dataclass(frozen=True)
class _PClause:
    literals: tuple[Literal, ...]
    origins: frozenset[str]
    weight: int


def _term_weight(t: fol.Term) -> int:
    if isinstance(t, fol.App):
        return 1 + sum(_term_weight(a) for a in t.args)
    return 1


def clause_weight(literals: tuple[Literal, ...]) -> int:
    return sum(1 + sum(_term_weight(a) for a in lit.args) for lit in literals)


def _structural_key(lit: Literal) -> tuple:
    def mask(t: fol.Term) -> str:
        if isinstance(t, fol.Var):
            return "*"
        if isinstance(t, fol.Const):
            return t.name
        return f"{t.functor}({','.join(mask(a) for a in t.args)})"

    return (lit.predicate, not lit.positive, tuple(mask(a) for a in lit.args))


def canonicalize(literals: tuple[Literal, ...]) -> tuple[Literal, ...]:
    """Sort literals structurally and rename variables V1.. by first occurrence,
    giving a hashable form under which variants usually coincide."""
    ordered = sorted(literals, key=_structural_key)
    renaming: dict[str, fol.Term] = {}

    def rename(t: fol.Term) -> fol.Term:
        if isinstance(t, fol.Var):
            if t.name not in renaming:
                renaming[t.name] = fol.Var(f"V{len(renaming) + 1}")
            return renaming[t.name]
        if isinstance(t, fol.App):
            return fol.App(t.functor, tuple(rename(a) for a in t.args))
        return t

    return tuple(
        Literal(l.positive, l.predicate, tuple(rename(a) for a in l.args))
        for l in ordered
    )


def _rename_apart(literals: tuple[Literal, ...]) -> tuple[Literal, ...]:
    def rn(t: fol.Term) -> fol.Term:
        if isinstance(t, fol.Var):
            return fol.Var(t.name + "'")
        if isinstance(t, fol.App):
            return fol.App(t.functor, tuple(rn(a) for a in t.args))
        return t

    return tuple(
        Literal(l.positive, l.predicate, tuple(rn(a) for a in l.args))
        for l in literals
    )


def _simplify(literals: list[Literal]) -> tuple[Literal, ...] | None:
    """Deduplicate; None when the clause is a tautology."""
    unique: list[Literal] = []
    for lit in literals:
        if lit in unique:
            continue
        unique.append(lit)
    for lit in unique:
        if lit.negate() in unique:
            return None
    return tuple(unique)


# ---------------------------------------------------------------------------
# Saturation


class _Saturation:
    def __init__(self, limits: Limits, weight_cap: int | None):
        self.limits = limits
        self.weight_cap = weight_cap
        self.heap: list[tuple[int, int, _PClause]] = []
        self.fifo: deque[tuple[int, _PClause]] = deque()
        self.pending: set[int] = set()
        self.processed: list[_PClause] = []
        self.seen: set[tuple[Literal, ...]] = set()
        self.seq = 0
        self.picks = 0
        self.generated = 0
        self.incomplete = False
        self.empty: _PClause | None = None

    def push(self, literals: tuple[Literal, ...], origins: frozenset[str]) -> None:
        canon = canonicalize(literals)
        if canon in self.seen:
            return
        self.seen.add(canon)
        clause = _PClause(canon, origins, clause_weight(canon))
        if clause.literals == ():
            self.empty = clause
            return
        self.seq += 1
        heapq.heappush(self.heap, (clause.weight, self.seq, clause))
        self.fifo.append((self.seq, clause))
        self.pending.add(self.seq)

    def pop(self) -> _PClause | None:
        by_age = self.picks % 5 == 4
        self.picks += 1
        while True:
            if by_age:
                if not self.fifo:
                    by_age = False
                    continue
                seq, clause = self.fifo.popleft()
            else:
                if not self.heap:
                    if self.fifo:
                        by_age = True
                        continue
                    return None
                _, seq, clause = heapq.heappop(self.heap)
            if seq in self.pending:
                self.pending.discard(seq)
                return clause

    def derive(self, literals: list[Literal], origins: frozenset[str]) -> bool:
        """Record one generated clause; True when it is the empty clause."""
        self.generated += 1
        simplified = _simplify(literals)
        if simplified is None:
            return False
        if simplified == ():
            self.empty = _PClause((), origins, 0)
            return True
        if self.weight_cap is not None and clause_weight(simplified) > self.weight_cap:
            self.incomplete = True
            return False
        if any(subsumes(p.literals, simplified) for p in self.processed):
            return False
        self.push(simplified, origins)
        return False


def saturate(
    form: ClausalForm,
    limits: Limits | None = None,
    weight_cap: int | None = DEFAULT_WEIGHT_CAP,
) -> RunResult:
    """Decide a clause set within limits; see the module docstring."""
    limits = limits or Limits()
    cpu_start = time.process_time()
    wall_start = time.perf_counter()
    sat = _Saturation(limits, weight_cap)

    def result(status: SzsStatus, used: tuple[str, ...] | None = None) -> RunResult:
        return RunResult(
            system=INTERNAL_SYSTEM,
            status=status,
            cpu_millis=int((time.process_time() - cpu_start) * 1000),
            wall_millis=int((time.perf_counter() - wall_start) * 1000),
            used_axioms=used,
            generated_clauses=sat.generated,
        )

    for clause in form.clauses:
        simplified = _simplify(list(clause.literals))
        if simplified is None:
            continue
        origins = frozenset([clause.origin]) if clause.origin else frozenset()
        if simplified == ():
            return result(SzsStatus.THEOREM, tuple(sorted(origins)))
        sat.push(simplified, origins)

    def out_of_resources() -> bool:
        if time.process_time() - cpu_start > limits.cpu_seconds:
            return True
        if time.perf_counter() - wall_start > limits.wall_seconds:
            return True
        maxgen = limits.max_generated_clauses
        return maxgen is not None and sat.generated > maxgen

    while True:
        if out_of_resources():
            return result(SzsStatus.RESOURCE_OUT)
        given = sat.pop()
        if given is None:
            break
        if any(subsumes(p.literals, given.literals) for p in sat.processed):
            continue

        # Factoring on the given clause.
        lits = given.literals
        for i in range(len(lits)):
            for j in range(i + 1, len(lits)):
                a, b = lits[i], lits[j]
                if a.positive != b.positive or a.predicate != b.predicate:
                    continue
                if len(a.args) != len(b.args):
                    continue
                sub = unify_args(a.args, b.args)
                if sub is None:
                    continue
                factored = [
                    _apply(l, sub) for k, l in enumerate(lits) if k != j
                ]
                if sat.derive(factored, given.origins):
                    return result(SzsStatus.THEOREM, tuple(sorted(sat.empty.origins)))

        # Binary resolution of the given clause against processed + itself.
        for other in sat.processed + [given]:
            renamed = _rename_apart(other.literals)
            for i, li in enumerate(given.literals):
                for j, lj in enumerate(renamed):
                    if li.positive == lj.positive or li.predicate != lj.predicate:
                        continue
                    if len(li.args) != len(lj.args):
                        continue
                    sub = unify_args(li.args, lj.args)
                    if sub is None:
                        continue
                    resolvent = [
                        _apply(l, sub)
                        for k, l in enumerate(given.literals)
                        if k != i
                    ] + [
                        _apply(l, sub) for k, l in enumerate(renamed) if k != j
                    ]
                    if sat.derive(resolvent, given.origins | other.origins):
                        return result(
                            SzsStatus.THEOREM, tuple(sorted(sat.empty.origins))
                        )
            if sat.generated % 64 == 0 and out_of_resources():
                return result(SzsStatus.RESOURCE_OUT)

        sat.processed.append(given)

    if sat.incomplete:
        return result(SzsStatus.GAVE_UP)
    return result(SzsStatus.COUNTER_SATISFIABLE)


def derivation_summary(result: RunResult, form: ClausalForm) -> str:
    """Raw-output text for a saturation run, in SZS-style framing."""
    lines = [
        f"% SZS status {result.status} for {INTERNAL_SYSTEM}",
        f"% cpu_millis {result.cpu_millis} wall_millis {result.wall_millis}",
        f"% generated_clauses {result.generated_clauses}",
        f"% input_clauses {len(form.clauses)}",
    ]
    if result.used_axioms is not None:
        lines.append("% used axioms: " + ", ".join(result.used_axioms))
    for clause in form.clauses:
        origin = clause.origin or "<builtin>"
        lines.append(f"% [{origin}] {format_clause(clause)}")
    return "\n".join(lines) + "\n"
