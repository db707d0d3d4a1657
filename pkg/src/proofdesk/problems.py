"""Self-contained TPTP problems for proof obligations.

A problem holds the obligation's cited premises (in citation order) plus the
least fixpoint of type axioms (dt_*) over every functor and constant symbol
occurring anywhere in the problem, with the conjecture last.  Only dt_*
axioms are ever pulled in transitively; theorems and definitions enter by
explicit citation alone.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable

from . import fol, names, tptp
from .article import Article
from .errors import GenerationError, ProofDeskError
from .library import LibraryItem, LibraryStore, functor_type_axiom
from .obligations import Obligation, ScopeConstant, extract_obligations


def iso_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass(frozen=True)
class ProblemFormula:
    name: str
    role: str  # "axiom" | "conjecture"
    formula: fol.Formula
    kind: str  # reference kind, for explanation metadata


@dataclass(frozen=True)
class TptpProblem:
    name: str
    axioms: tuple[ProblemFormula, ...]
    conjecture: ProblemFormula
    origin: tuple[str, int]
    generated_at: str | None = None
    warnings: tuple[str, ...] = ()

    def all_names(self) -> list[str]:
        return [a.name for a in self.axioms] + [self.conjecture.name]

    def kind_of(self, name: str) -> str | None:
        for f in self.axioms:
            if f.name == name:
                return f.kind
        if name == self.conjecture.name:
            return self.conjecture.kind
        return None

    def render(self) -> str:
        label, step = self.origin
        lines = [f"% origin: {label}:{step}"]
        if self.generated_at:
            lines.append(f"% generated: {self.generated_at}")
        for w in self.warnings:
            lines.append(f"% warning: {w}")
        for ax in self.axioms:
            lines.append(tptp.serialize_tptp(ax.name, "axiom", ax.formula))
        lines.append(
            tptp.serialize_tptp(self.conjecture.name, "conjecture", self.conjecture.formula)
        )
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ArticleContext:
    """The current article's contribution to problem building: reservations
    for quantifier guards and the local functor type axioms."""

    article: str
    reservations: tuple[tuple[str, str], ...]
    local_dt: tuple[LibraryItem, ...]

    @classmethod
    def from_article(cls, article: Article) -> "ArticleContext":
        reservations = article.reservation_map()
        local = tuple(
            LibraryItem(
                names.functor_type_name(decl.ordinal, article.name),
                names.FUNCTOR_TYPE,
                functor_type_axiom(decl, reservations),
                frozenset(),
                article.name,
                declares=decl.name,
            )
            for decl in article.functor_decls
        )
        return cls(article.name, article.reservations, local)

    def reservation_map(self) -> dict[str, str]:
        return dict(self.reservations)


@dataclass
class DependencyGraph:
    """Dependency edges between item names and symbols.

    `uses` maps an item name to the functor/constant symbols of its formula;
    `typed_by` maps a symbol to the dt_* item declaring it.  closure() is the
    least fixpoint under both edge kinds restricted to dt_* axioms.
    """

    uses: dict[str, frozenset[str]] = field(default_factory=dict)
    typed_by: dict[str, LibraryItem] = field(default_factory=dict)

    @classmethod
    def build(
        cls,
        lib: LibraryStore | None,
        ctx: ArticleContext,
        scope: tuple[ScopeConstant, ...] = (),
        theorem_ordinal: int = 1,
    ) -> "DependencyGraph":
        graph = cls()
        if lib is not None:
            for items in lib.articles.values():
                for item in items:
                    graph.uses[item.name] = item.symbols
                    if item.declares is not None:
                        current = graph.typed_by.get(item.declares)
                        if current is None or item.name < current.name:
                            graph.typed_by[item.declares] = item
        for item in ctx.local_dt:
            graph.uses[item.name] = frozenset(fol.symbols(item.formula))
            graph.typed_by[item.declares] = item  # local declaration wins
        for sc in scope:
            if sc.type_predicate is None:
                continue
            dt = LibraryItem(
                names.constant_type_name(sc.index, theorem_ordinal, ctx.article),
                names.CONSTANT_TYPE,
                fol.Atom(sc.type_predicate, (fol.Const(sc.name),)),
                frozenset({sc.type_predicate, sc.name}),
                ctx.article,
                declares=sc.name,
            )
            graph.typed_by[sc.name] = dt
        return graph

    def closure(
        self, seed_formulas: Iterable[fol.Formula]
    ) -> tuple[list[LibraryItem], list[str]]:
        """dt_* items covering every functor/constant reachable from the
        seeds, plus warnings for symbols without any declaration."""
        pending: deque[str] = deque()
        for f in seed_formulas:
            _, functors = fol.split_symbols(f)
            pending.extend(sorted(functors))
        included: dict[str, LibraryItem] = {}
        handled: set[str] = set()
        warnings: list[str] = []
        while pending:
            symbol = pending.popleft()
            if symbol in handled:
                continue
            handled.add(symbol)
            item = self.typed_by.get(symbol)
            if item is None:
                warnings.append(f"no declaration for symbol '{symbol}'")
                continue
            if item.name not in included:
                included[item.name] = item
                _, functors = fol.split_symbols(item.formula)
                pending.extend(sorted(functors))
        items = sorted(included.values(), key=lambda i: i.name)
        return items, sorted(set(warnings))


def generate_problem(
    obligation: Obligation,
    lib: LibraryStore | None,
    ctx: ArticleContext,
    generated_at: str | None = None,
) -> TptpProblem:
    """Build the self-contained problem for one obligation.

    Axiom order is deterministic: explicit references in citation order,
    then dt_* axioms sorted by name; the conjecture comes last.
    """
    reservations = ctx.reservation_map()
    conjecture = fol.relativize(obligation.conjecture, reservations)

    axioms: list[ProblemFormula] = []
    seen: set[str] = set()
    for ref in obligation.explicit_refs:
        if ref.name in seen:
            continue
        seen.add(ref.name)
        if ref.formula is not None:
            formula = fol.relativize(ref.formula, reservations)
        else:
            item = lib.get(ref.name) if lib is not None else None
            if item is None:
                raise GenerationError(
                    f"unresolved reference '{ref.name}' for {obligation.id}"
                )
            formula = item.formula
        axioms.append(ProblemFormula(ref.name, "axiom", formula, ref.kind))

    graph = DependencyGraph.build(
        lib, ctx, obligation.scope, obligation.theorem_ordinal
    )
    dt_items, warnings = graph.closure(
        [conjecture] + [a.formula for a in axioms]
    )
    for item in dt_items:
        if item.name in seen:
            continue
        seen.add(item.name)
        axioms.append(ProblemFormula(item.name, "axiom", item.formula, item.kind))

    explicit = [a for a in axioms if a.kind not in (names.FUNCTOR_TYPE, names.CONSTANT_TYPE)]
    dt_part = sorted(
        (a for a in axioms if a.kind in (names.FUNCTOR_TYPE, names.CONSTANT_TYPE)),
        key=lambda a: a.name,
    )
    return TptpProblem(
        name=obligation.id,
        axioms=tuple(explicit + dt_part),
        conjecture=ProblemFormula(
            obligation.id, "conjecture", conjecture, "conjecture"
        ),
        origin=obligation.origin,
        generated_at=generated_at,
        warnings=tuple(warnings),
    )


# ---------------------------------------------------------------------------
# Batch generation


def generate_all(
    article: Article,
    lib: LibraryStore | None,
    sink: Callable[[TptpProblem], None],
    log: Callable[[str], None] | None = None,
    now: Callable[[], str] = iso_now,
) -> list[str]:
    """Generate every obligation's problem in order, streaming to `sink`.

    Per-problem generation errors are logged and skipped; sink failures
    propagate (the log then holds exactly the lines of delivered problems).
    Returns the log lines.
    """
    lines: list[str] = []

    def emit(line: str) -> None:
        lines.append(line)
        if log is not None:
            log(line)

    ctx = ArticleContext.from_article(article)
    for obligation in extract_obligations(article, lib=None):
        try:
            problem = generate_problem(obligation, lib, ctx, generated_at=now())
        except ProofDeskError as exc:
            emit(f"{now()} error {obligation.id}: {exc}")
            continue
        sink(problem)
        emit(f"{now()} generated {obligation.id}")
    return lines


@dataclass
class GenerationOutcome:
    problems: list[str]  # obligation ids written in this run
    skipped: list[str]  # already present (resume)
    errors: list[str]
    log_lines: list[str]


def write_problem_files(
    article: Article,
    lib: LibraryStore | None,
    workdir: str | Path,
    now: Callable[[], str] = iso_now,
) -> GenerationOutcome:
    """File-layout producer: problems under <workdir>/<article>/problems/,
    appending to <workdir>/<article>/generation.log.

    Problem files are written atomically (rename), and files already present
    are kept, so an interrupted generation can resume without duplicate log
    lines.
    """
    base = Path(workdir) / article.name
    problems_dir = base / "problems"
    problems_dir.mkdir(parents=True, exist_ok=True)
    log_path = base / "generation.log"
    outcome = GenerationOutcome([], [], [], [])

    def append_log(line: str) -> None:
        outcome.log_lines.append(line)
        with log_path.open("a") as fh:
            fh.write(line + "\n")

    ctx = ArticleContext.from_article(article)
    for obligation in extract_obligations(article, lib=None):
        path = problems_dir / f"{obligation.id}.p"
        if path.exists():
            outcome.skipped.append(obligation.id)
            continue
        try:
            problem = generate_problem(obligation, lib, ctx, generated_at=now())
        except ProofDeskError as exc:
            outcome.errors.append(obligation.id)
            append_log(f"{now()} error {obligation.id}: {exc}")
            continue
        tmp = path.with_suffix(".p.tmp")
        tmp.write_text(problem.render())
        os.replace(tmp, path)
        outcome.problems.append(obligation.id)
        append_log(f"{now()} generated {obligation.id}")
    return outcome
