"""Thesis tracking and proof-obligation extraction.

Walking a theorem's proof does three things at once: it reduces the thesis
through let/assume/thus steps, numbers propositions (e-ordinals) and scope
constants, and emits one Obligation per `by` justification.  Obligation
extraction never depends on whether the thesis actually matches, so problems
can be generated even for articles whose skeletons fail.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from . import fol, names
from .article import (
    Article,
    AssumeStep,
    AuxStep,
    ByRefs,
    Definition,
    LetStep,
    Proof,
    ProofStep,
    Theorem,
    ThusStep,
)
from .errors import UnknownReferenceError

SCOPE_CONSTANT_RE = re.compile(r"c[1-9]\d*\Z")


class SkeletonMismatch(Exception):
    """A let/assume/thus step does not fit the current thesis."""


@dataclass(frozen=True)
class Thesis:
    current: fol.Formula
    scope: tuple["ScopeConstant", ...] = ()

    @property
    def discharged(self) -> bool:
        return isinstance(self.current, fol.Verum)


@dataclass(frozen=True)
class ScopeConstant:
    name: str
    type_predicate: str | None
    index: int  # 1-based, per theorem


@dataclass(frozen=True)
class ResolvedRef:
    name: str  # axiom name in generated problems
    formula: fol.Formula | None  # None for library items (look up in the store)
    kind: str


@dataclass(frozen=True)
class Obligation:
    id: str
    article: str
    theorem_ordinal: int
    conjecture: fol.Formula  # stated formula with scope constants substituted
    explicit_refs: tuple[ResolvedRef, ...]
    scope: tuple[ScopeConstant, ...]
    origin: tuple[str, int]  # (item label, step e-ordinal)


def step_thesis(
    thesis: Thesis,
    step: ProofStep,
    reservations: Mapping[str, str] | None = None,
    constants: Sequence[str] | None = None,
) -> Thesis:
    """Advance the thesis over one step; raises SkeletonMismatch on misfit.

    Step formulas must already have scope constants substituted in.  For a
    let step, `constants` supplies the fresh constant names (defaults to
    c<i> numbered after the current scope).
    """
    current = thesis.current
    if isinstance(current, fol.Verum):
        raise SkeletonMismatch("thesis is already discharged")
    if isinstance(step, LetStep):
        n = len(step.variables)
        if not isinstance(current, fol.ForAll) or len(current.variables) < n:
            raise SkeletonMismatch(
                f"let of {n} variable(s) needs a universal thesis with at "
                f"least {n} variable(s)"
            )
        if constants is None:
            base = len(thesis.scope)
            constants = [f"c{base + i + 1}" for i in range(n)]
        reservations = reservations or {}
        binding = {
            v: fol.Const(c) for v, c in zip(current.variables[:n], constants)
        }
        body = fol.substitute(current.body, binding)
        if len(current.variables) > n:
            body = fol.ForAll(current.variables[n:], body)
        new_scope = thesis.scope + tuple(
            ScopeConstant(c, reservations.get(v), len(thesis.scope) + i + 1)
            for i, (v, c) in enumerate(zip(step.variables, constants))
        )
        return Thesis(body, new_scope)
    if isinstance(step, AssumeStep):
        if isinstance(current, fol.Implies) and fol.matches(
            step.formula, current.antecedent
        ):
            return Thesis(current.consequent, thesis.scope)
        if _restates_scope_types(step.formula, thesis.scope):
            # Redundant assumption of a fixed constant's own type; the type
            # is already ambient in the scope, so nothing is discharged.
            return thesis
        if not isinstance(current, fol.Implies):
            raise SkeletonMismatch("assume needs an implication thesis")
        raise SkeletonMismatch(
            "assumption does not match the thesis antecedent "
            f"'{_shape(current.antecedent)}'"
        )
    if isinstance(step, ThusStep):
        flat = fol.flatten_and(current)
        if isinstance(flat, fol.And):
            first, rest = flat.parts[0], flat.parts[1:]
            if fol.matches(step.formula, first):
                remaining = rest[0] if len(rest) == 1 else fol.And(rest)
                return Thesis(remaining, thesis.scope)
            if fol.matches(step.formula, flat):
                return Thesis(fol.VERUM, thesis.scope)
            raise SkeletonMismatch(
                f"thus does not match the first conjunct '{_shape(first)}'"
            )
        if fol.matches(step.formula, current):
            return Thesis(fol.VERUM, thesis.scope)
        raise SkeletonMismatch(f"thus does not match the thesis '{_shape(current)}'")
    # Aux steps leave the thesis unchanged.
    return thesis


def _shape(f: fol.Formula) -> str:
    from .article import format_formula

    return format_formula(f)


def _restates_scope_types(f: fol.Formula, scope: tuple["ScopeConstant", ...]) -> bool:
    typed = {(sc.name, sc.type_predicate) for sc in scope}
    for part in fol.and_parts(f):
        if not (
            isinstance(part, fol.Atom)
            and len(part.args) == 1
            and isinstance(part.args[0], fol.Const)
            and (part.args[0].name, part.predicate) in typed
        ):
            return False
    return True


# ---------------------------------------------------------------------------
# Proof walking


@dataclass
class StepRecord:
    kind: str  # "let" | "assume" | "aux" | "thus"
    e_ordinal: int | None = None
    label: str | None = None
    formula: fol.Formula | None = None  # with scope constants substituted
    let_variables: tuple[str, ...] = ()
    constants: tuple[ScopeConstant, ...] = ()
    refs: tuple[str, ...] = ()
    obligation_id: str | None = None
    thesis_after: fol.Formula | None = None
    skeleton_error: str | None = None
    children: list["StepRecord"] = field(default_factory=list)


@dataclass
class TheoremWalk:
    theorem: Theorem
    steps: list[StepRecord]
    obligations: list[Obligation]
    skeleton_error: str | None  # first mismatch, or undischarged thesis
    discharged: bool


class _Walker:
    def __init__(self, article: Article, theorem: Theorem, lib) -> None:
        self.article = article
        self.theorem = theorem
        self.lib = lib
        self.reservations = article.reservation_map()
        self.e_counter = 0
        self.const_counter = 0
        self.obligations: list[Obligation] = []
        self.first_error: str | None = None
        # Labels citable before this theorem: earlier items under their
        # export names.
        self.item_env: dict[str, ResolvedRef] = {}
        for item in article.items:
            if item is theorem:
                break
            if isinstance(item, Definition):
                name = names.definition_name(item.ordinal, article.name)
                kind = names.DEFINITION
            else:
                name = names.theorem_name(item.ordinal, article.name)
                kind = names.THEOREM
            self.item_env[item.label] = ResolvedRef(name, item.formula, kind)

    def fresh_constant(self, type_predicate: str | None) -> ScopeConstant:
        self.const_counter += 1
        return ScopeConstant(f"c{self.const_counter}", type_predicate, self.const_counter)

    def resolve(self, ref: str, prop_env: dict[str, ResolvedRef]) -> ResolvedRef:
        if ref in prop_env:
            return prop_env[ref]
        if ref in self.item_env:
            return self.item_env[ref]
        try:
            parsed = names.parse_name(ref)
        except Exception:
            parsed = None
        if parsed is not None and parsed.kind in (names.THEOREM, names.DEFINITION):
            if self.lib is not None and self.lib.get(ref) is None:
                raise UnknownReferenceError(
                    f"unresolved library reference '{ref}'", ref
                )
            return ResolvedRef(ref, None, parsed.kind)
        raise UnknownReferenceError(f"cannot resolve reference '{ref}'", ref)

    def walk(self, track_thesis: bool) -> TheoremWalk:
        thesis = Thesis(self.theorem.formula) if track_thesis else None
        assert self.theorem.proof is not None
        steps, final = self.walk_proof(
            self.theorem.proof, thesis, {}, (), dict(self.item_env)
        )
        discharged = final is not None and final.discharged
        if track_thesis and self.first_error is None and not discharged:
            assert final is not None
            self.first_error = (
                f"proof ends with undischarged thesis '{_shape(final.current)}'"
            )
        return TheoremWalk(
            self.theorem, steps, self.obligations, self.first_error, discharged
        )

    def walk_proof(
        self,
        proof: Proof,
        thesis: Thesis | None,
        subst: dict[str, fol.Term],
        scope: tuple[ScopeConstant, ...],
        env: dict[str, ResolvedRef],
    ) -> tuple[list[StepRecord], Thesis | None]:
        """Returns step records and the final thesis (None once tracking was
        lost to a skeleton mismatch or was off to begin with)."""
        subst = dict(subst)
        env = dict(env)
        records: list[StepRecord] = []
        for step in proof.steps:
            if isinstance(step, LetStep):
                consts = tuple(
                    self.fresh_constant(self.reservations.get(v))
                    for v in step.variables
                )
                for v, sc in zip(step.variables, consts):
                    subst[v] = fol.Const(sc.name)
                scope = scope + consts
                record = StepRecord(
                    "let", let_variables=step.variables, constants=consts
                )
                thesis = self._advance(
                    record, thesis, step, [sc.name for sc in consts]
                )
            elif isinstance(step, AssumeStep):
                self.e_counter += 1
                stated = fol.substitute(step.formula, subst)
                name = names.local_proposition_name(
                    self.e_counter, self.theorem.ordinal, self.article.name
                )
                record = StepRecord(
                    "assume",
                    e_ordinal=self.e_counter,
                    label=step.label,
                    formula=stated,
                )
                if step.label:
                    env[step.label] = ResolvedRef(
                        name, stated, names.LOCAL_PROPOSITION
                    )
                thesis = self._advance(
                    record, thesis, AssumeStep(step.label, stated), None
                )
            elif isinstance(step, (AuxStep, ThusStep)):
                self.e_counter += 1
                e_ord = self.e_counter
                stated = fol.substitute(step.formula, subst)
                name = names.local_proposition_name(
                    e_ord, self.theorem.ordinal, self.article.name
                )
                label = step.label if isinstance(step, AuxStep) else None
                record = StepRecord(
                    "aux" if isinstance(step, AuxStep) else "thus",
                    e_ordinal=e_ord,
                    label=label,
                    formula=stated,
                )
                if isinstance(step.justification, ByRefs):
                    refs = tuple(
                        self.resolve(r, env) for r in step.justification.refs
                    )
                    record.refs = step.justification.refs
                    record.obligation_id = name
                    self.obligations.append(
                        Obligation(
                            id=name,
                            article=self.article.name,
                            theorem_ordinal=self.theorem.ordinal,
                            conjecture=stated,
                            explicit_refs=refs,
                            scope=scope,
                            origin=(self.theorem.label, e_ord),
                        )
                    )
                else:
                    sub_thesis = (
                        Thesis(stated, scope) if thesis is not None else None
                    )
                    children, sub_final = self.walk_proof(
                        step.justification.proof, sub_thesis, subst, scope, env
                    )
                    record.children = children
                    if (
                        thesis is not None
                        and self.first_error is None
                        and (sub_final is None or not sub_final.discharged)
                    ):
                        if sub_final is not None:
                            self.first_error = (
                                "subproof ends with undischarged thesis "
                                f"'{_shape(sub_final.current)}'"
                            )
                            record.skeleton_error = self.first_error
                if label:
                    env[label] = ResolvedRef(name, stated, names.LOCAL_PROPOSITION)
                if isinstance(step, ThusStep):
                    thesis = self._advance(
                        record, thesis, ThusStep(stated, step.justification), None
                    )
                elif thesis is not None:
                    record.thesis_after = thesis.current
            else:
                raise TypeError(f"unknown step {step!r}")
            records.append(record)
        return records, thesis

    def _advance(
        self,
        record: StepRecord,
        thesis: Thesis | None,
        step: ProofStep,
        constants: list[str] | None,
    ) -> Thesis | None:
        if thesis is None:
            return None
        try:
            new = step_thesis(thesis, step, self.reservations, constants)
        except SkeletonMismatch as exc:
            message = f"step does not fit the thesis: {exc}"
            record.skeleton_error = message
            if self.first_error is None:
                self.first_error = message
            return None
        record.thesis_after = new.current
        return new


def walk_theorem(
    article: Article, theorem: Theorem, lib=None, track_thesis: bool = True
) -> TheoremWalk:
    return _Walker(article, theorem, lib).walk(track_thesis)


def extract_obligations(article: Article, lib=None) -> list[Obligation]:
    """One Obligation per `by` justification, in textual order.

    Library references must resolve in `lib` when one is given; thesis
    matching is not required here.
    """
    out: list[Obligation] = []
    for item in article.items:
        if isinstance(item, Theorem) and item.proof is not None:
            out.extend(walk_theorem(article, item, lib, track_thesis=False).obligations)
    return out
