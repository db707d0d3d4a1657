"""Article verification: skeleton checking plus bounded entailment checking.

Each `by` obligation is decided by assembling the same premise closure the
problem generator uses and running the internal saturation prover under the
"obviousness" limits.  Obligations are independent read-only jobs, so they
can be checked by several worker processes; the resulting report is the same
for any worker count.
"""

from __future__ import annotations

import multiprocessing
import time
from dataclasses import dataclass
from enum import Enum

from . import fol
from .article import Article, Definition, Theorem, format_formula
from .clausal import clausify
from .errors import ProofDeskError
from .library import LibraryStore
from .obligations import Obligation, StepRecord, walk_theorem
from .problems import ArticleContext, generate_problem
from .saturation import saturate
from .szs import Limits, SzsStatus


class StepStatus(Enum):
    VERIFIED = "verified"
    COUNTERSATISFIABLE = "countersatisfiable"
    GAVEUP = "gaveup"
    SKELETON_ERROR = "skeleton_error"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class CheckLimits:
    """Obviousness bounds for the checker's prover calls."""

    cpu_seconds: float = 2.0
    max_generated_clauses: int = 10000
    max_clause_weight: int = 64

    def to_prover_limits(self) -> Limits:
        return Limits(
            cpu_seconds=self.cpu_seconds,
            wall_seconds=max(self.cpu_seconds * 4, 10.0),
            max_generated_clauses=self.max_generated_clauses,
        )


def _szs_to_step(status: SzsStatus) -> StepStatus:
    if status is SzsStatus.THEOREM:
        return StepStatus.VERIFIED
    if status is SzsStatus.COUNTER_SATISFIABLE:
        return StepStatus.COUNTERSATISFIABLE
    return StepStatus.GAVEUP


def check_obligation(
    obligation: Obligation,
    lib: LibraryStore | None,
    ctx: ArticleContext,
    limits: CheckLimits | None = None,
) -> StepStatus:
    """Decide one obligation with the internal prover under checker limits."""
    status, _, _ = _check_timed(obligation, lib, ctx, limits or CheckLimits())
    return status


def _check_timed(
    obligation: Obligation,
    lib: LibraryStore | None,
    ctx: ArticleContext,
    limits: CheckLimits,
) -> tuple[StepStatus, int, int]:
    problem = generate_problem(obligation, lib, ctx)
    form = clausify(
        [(a.name, a.formula) for a in problem.axioms],
        problem.conjecture.formula,
        conjecture_name=problem.conjecture.name,
    )
    result = saturate(
        form, limits.to_prover_limits(), weight_cap=limits.max_clause_weight
    )
    return _szs_to_step(result.status), result.cpu_millis, result.wall_millis


@dataclass
class ObligationResult:
    id: str
    status: StepStatus
    cpu_millis: int
    wall_millis: int


@dataclass
class ItemReport:
    label: str
    kind: str  # "definition" | "theorem"
    ordinal: int
    formula: fol.Formula
    status: str  # "axiom" | "unproved" | "verified" | "failed"
    steps: list[StepRecord]
    error: str | None = None


@dataclass
class VerificationReport:
    article: str
    items: list[ItemReport]
    obligations: dict[str, ObligationResult]
    elapsed_millis: int = 0

    @property
    def ok(self) -> bool:
        return all(item.status != "failed" for item in self.items)

    def status_map(self) -> dict[str, str]:
        return {oid: r.status.value for oid, r in self.obligations.items()}

    def text_log(self) -> str:
        lines = [
            f"{oid} {r.status.value} {r.wall_millis}"
            for oid, r in self.obligations.items()
        ]
        return "\n".join(lines) + ("\n" if lines else "")

    def _step_dict(self, record: StepRecord) -> dict:
        result = self.obligations.get(record.obligation_id or "")
        return {
            "kind": record.kind,
            "e_ordinal": record.e_ordinal,
            "label": record.label,
            "formula": format_formula(record.formula) if record.formula else None,
            "let_variables": list(record.let_variables),
            "constants": [
                {"name": c.name, "type": c.type_predicate} for c in record.constants
            ],
            "refs": list(record.refs),
            "obligation_id": record.obligation_id,
            "status": result.status.value if result else (
                StepStatus.SKELETON_ERROR.value if record.skeleton_error else None
            ),
            "millis": result.wall_millis if result else None,
            "thesis_after": (
                format_formula(record.thesis_after)
                if record.thesis_after is not None
                else None
            ),
            "skeleton_error": record.skeleton_error,
            "steps": [self._step_dict(child) for child in record.children],
        }

    def to_dict(self) -> dict:
        return {
            "article": self.article,
            "ok": self.ok,
            "elapsed_millis": self.elapsed_millis,
            "items": [
                {
                    "label": item.label,
                    "kind": item.kind,
                    "ordinal": item.ordinal,
                    "formula": format_formula(item.formula),
                    "status": item.status,
                    "error": item.error,
                    "steps": [self._step_dict(s) for s in item.steps],
                }
                for item in self.items
            ],
            "obligations": [
                {
                    "id": r.id,
                    "status": r.status.value,
                    "cpu_millis": r.cpu_millis,
                    "wall_millis": r.wall_millis,
                }
                for r in self.obligations.values()
            ],
        }


# ---------------------------------------------------------------------------
# Parallel checking

_WORKER_CONTEXT: dict = {}


def _init_worker(lib, ctx, limits) -> None:
    _WORKER_CONTEXT["args"] = (lib, ctx, limits)


def _check_in_worker(obligation: Obligation) -> tuple[str, str, int, int]:
    lib, ctx, limits = _WORKER_CONTEXT["args"]
    status, cpu, wall = _check_timed(obligation, lib, ctx, limits)
    return obligation.id, status.value, cpu, wall


def _check_many(
    obligations: list[Obligation],
    lib: LibraryStore | None,
    ctx: ArticleContext,
    limits: CheckLimits,
    workers: int,
) -> dict[str, ObligationResult]:
    results: dict[str, ObligationResult] = {}
    if workers <= 1 or len(obligations) < 2:
        for obligation in obligations:
            status, cpu, wall = _check_timed(obligation, lib, ctx, limits)
            results[obligation.id] = ObligationResult(
                obligation.id, status, cpu, wall
            )
        return results
    mp = multiprocessing.get_context("fork")
    with mp.Pool(
        processes=workers, initializer=_init_worker, initargs=(lib, ctx, limits)
    ) as pool:
        for oid, status, cpu, wall in pool.map(
            _check_in_worker, obligations, chunksize=max(1, len(obligations) // (workers * 4))
        ):
            results[oid] = ObligationResult(oid, StepStatus(status), cpu, wall)
    # Reorder to the obligations' textual order for deterministic reports.
    return {o.id: results[o.id] for o in obligations}


def verify_article(
    article: Article,
    lib: LibraryStore | None = None,
    workers: int = 1,
    limits: CheckLimits | None = None,
) -> VerificationReport:
    """Check every item of an article.

    Skeleton errors and unresolved references fail their item without
    stopping the others; `by` obligations are checked concurrently with at
    most `workers` in flight, and the statuses do not depend on the worker
    count.
    """
    limits = limits or CheckLimits()
    lib = lib if lib is not None else LibraryStore()
    started = time.perf_counter()
    ctx = ArticleContext.from_article(article)
    items: list[ItemReport] = []
    pending: list[tuple[ItemReport, list[Obligation]]] = []
    all_obligations: list[Obligation] = []

    for item in article.items:
        if isinstance(item, Definition):
            items.append(
                ItemReport(item.label, "definition", item.ordinal, item.formula,
                           "axiom", [])
            )
            continue
        assert isinstance(item, Theorem)
        if item.proof is None:
            items.append(
                ItemReport(item.label, "theorem", item.ordinal, item.formula,
                           "unproved", [])
            )
            continue
        try:
            walk = walk_theorem(article, item, lib, track_thesis=True)
        except ProofDeskError as exc:
            items.append(
                ItemReport(item.label, "theorem", item.ordinal, item.formula,
                           "failed", [], error=str(exc))
            )
            continue
        report = ItemReport(
            item.label, "theorem", item.ordinal, item.formula,
            "verified", walk.steps, error=walk.skeleton_error,
        )
        if walk.skeleton_error is not None:
            report.status = "failed"
        items.append(report)
        pending.append((report, walk.obligations))
        all_obligations.extend(walk.obligations)

    results = _check_many(all_obligations, lib, ctx, limits, workers)

    for report, obligations in pending:
        for obligation in obligations:
            if results[obligation.id].status is not StepStatus.VERIFIED:
                report.status = "failed"
                if report.error is None:
                    report.error = (
                        f"obligation {obligation.id} "
                        f"{results[obligation.id].status.value}"
                    )

    elapsed = int((time.perf_counter() - started) * 1000)
    return VerificationReport(article.name, items, results, elapsed)
