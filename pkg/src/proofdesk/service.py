"""HTTP service orchestrating the pipeline: submit, verify, render, generate
problems asynchronously, dispatch provers, suggest premises, grow the library.

Every submission owns an immutable workspace directory under
<workdir>/jobs/<id>/ that survives restarts: jobs caught mid-generation are
resumed (problem files are written atomically and skipped when present).
The job log is the single source of truth for generation progress.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import advisor, names, tptp
from .article import Article, Theorem, format_formula
from .errors import ProofDeskError
from .library import LibraryStore, export_article
from .parser import parse_article
from .problems import ProblemFormula, TptpProblem, iso_now, write_problem_files
from .render import render_model
from .systems import MINI_E, ProverSystem, load_system_db, run_prover
from .szs import Limits, RunResult, SzsStatus
from .verifier import CheckLimits, VerificationReport, verify_article

MAX_BODY_BYTES = 1 << 20  # submissions above 1 MiB are rejected
SYNC_VERIFY_BYTES = 64 * 1024  # larger articles verify in the background

RECEIVED = "Received"
PARSED = "Parsed"
VERIFIED = "Verified"
GENERATING = "Generating"
READY = "Ready"
FAILED = "Failed"


class ServiceError(ProofDeskError):
    def __init__(self, status_code: int, detail: str):
        super().__init__(detail)
        self.status_code = status_code
        self.detail = detail


@dataclass
class ServiceConfig:
    workdir: Path
    systems_db: Path | None = None
    verify_workers: int = 1
    default_system: str = MINI_E.name
    default_hints: int = 20
    check_limits: CheckLimits = field(default_factory=CheckLimits)
    ui_dir: Path | None = None


class ArticleJob:
    def __init__(self, job_id: str, root: Path, name: str | None = None):
        self.id = job_id
        self.root = root
        self.name = name
        self.state = RECEIVED
        self.error: str | None = None
        self.timestamps: dict[str, str] = {}
        self.article: Article | None = None
        self.report: VerificationReport | None = None
        self.runs: dict[str, RunResult] = {}  # last run per obligation
        self.run_seq: dict[str, int] = {}
        self.lock = threading.RLock()

    # -- paths ----------------------------------------------------------------

    @property
    def source_path(self) -> Path:
        return self.root / "source.mfl"

    @property
    def state_path(self) -> Path:
        return self.root / "job.json"

    @property
    def log_path(self) -> Path:
        return self.root / "log.txt"

    @property
    def report_path(self) -> Path:
        return self.root / "report.json"

    @property
    def render_path(self) -> Path:
        return self.root / "render.json"

    def article_dir(self) -> Path:
        assert self.article is not None
        return self.root / self.article.name

    def problem_path(self, obligation_id: str) -> Path:
        return self.article_dir() / "problems" / f"{obligation_id}.p"

    def runs_dir(self) -> Path:
        return self.article_dir() / "runs"

    # -- state ----------------------------------------------------------------

    def log(self, event: str) -> None:
        stamp = datetime.now(timezone.utc).isoformat(timespec="milliseconds")
        with self.log_path.open("a") as fh:
            fh.write(f"{stamp} {event}\n")

    def transition(self, state: str, error: str | None = None) -> None:
        with self.lock:
            self.state = state
            self.error = error
            self.timestamps[state] = iso_now()
            self.persist()
        self.log(state.lower() if error is None else f"failed {error}")

    def persist(self) -> None:
        doc = {
            "id": self.id,
            "name": self.name,
            "article": self.article.name if self.article else None,
            "state": self.state,
            "error": self.error,
            "timestamps": self.timestamps,
        }
        tmp = self.state_path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(doc, indent=1) + "\n")
        tmp.replace(self.state_path)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "article": self.article.name if self.article else None,
            "state": self.state,
            "error": self.error,
            "timestamps": dict(self.timestamps),
        }


def _problem_from_file(path: Path) -> TptpProblem | None:
    """Rebuild enough of a generated problem from its file for hints/harvest."""
    try:
        units = tptp.parse_tptp_problem(path.read_text())
    except (OSError, ProofDeskError):
        return None
    axioms = []
    conjecture = None
    for unit in units:
        try:
            kind = names.parse_name(unit.name).kind
        except ProofDeskError:
            kind = "axiom"
        pf = ProblemFormula(unit.name, unit.role, unit.formula, kind)
        if unit.role == "conjecture":
            conjecture = ProblemFormula(unit.name, unit.role, unit.formula, "conjecture")
        else:
            axioms.append(pf)
    if conjecture is None:
        return None
    return TptpProblem(conjecture.name, tuple(axioms), conjecture, ("", 0))


class Service:
    """All pipeline state behind the HTTP API (and the CLI)."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.workdir = Path(config.workdir)
        self.jobs_dir = self.workdir / "jobs"
        self.jobs_dir.mkdir(parents=True, exist_ok=True)
        self.systems: dict[str, ProverSystem] = {MINI_E.name: MINI_E}
        if config.systems_db is not None:
            for system in load_system_db(config.systems_db):
                self.systems[system.name] = system
        self.library_path = self.workdir / "library.json"
        self.model_path = self.workdir / "advisor.model"
        self.library_lock = threading.RLock()
        if self.library_path.exists():
            self.library = LibraryStore.load(self.library_path)
        else:
            self.library = LibraryStore()
        if self.model_path.exists():
            self.model = advisor.load_model(self.model_path)
        else:
            self.model = advisor.AdvisorModel()
        self.jobs: dict[str, ArticleJob] = {}
        self.executor = ThreadPoolExecutor(max_workers=4)
        self._restore_jobs()

    # -- lifecycle -------------------------------------------------------------

    def close(self) -> None:
        self.executor.shutdown(wait=True)

    def _restore_jobs(self) -> None:
        for state_file in sorted(self.jobs_dir.glob("*/job.json")):
            try:
                doc = json.loads(state_file.read_text())
            except (OSError, json.JSONDecodeError):
                continue
            job = ArticleJob(doc["id"], state_file.parent, doc.get("name"))
            job.state = doc["state"]
            job.error = doc.get("error")
            job.timestamps = doc.get("timestamps", {})
            self.jobs[job.id] = job
            if job.state in (READY, FAILED):
                self._reload_article(job)
                continue
            if job.state in (VERIFIED, GENERATING):
                # Interrupted mid-generation: resume (existing problem files
                # are kept, so the log keeps its prefix property).
                if self._reload_article(job):
                    self.executor.submit(self._generate, job)
                else:
                    job.transition(FAILED, "workspace unreadable after restart")
            else:
                job.transition(FAILED, "interrupted by restart before verification")

    def _reload_article(self, job: ArticleJob) -> bool:
        try:
            job.article = parse_article(job.source_path.read_text())
            report_doc = json.loads(job.report_path.read_text())
        except (OSError, ProofDeskError, json.JSONDecodeError):
            return job.article is not None
        job.report = None  # full report object is rebuilt only if needed
        job._report_doc = report_doc  # type: ignore[attr-defined]
        return True

    # -- submission pipeline -----------------------------------------------------

    def submit(self, text: str, name: str | None = None) -> ArticleJob:
        if not text.strip():
            raise ServiceError(400, "empty article body")
        if len(text.encode()) > MAX_BODY_BYTES:
            raise ServiceError(400, "article exceeds 1 MiB")
        job_id = uuid.uuid4().hex[:12]
        root = self.jobs_dir / job_id
        root.mkdir(parents=True)
        job = ArticleJob(job_id, root, name)
        job.source_path.write_text(text)
        self.jobs[job_id] = job
        job.transition(RECEIVED)
        if len(text.encode()) <= SYNC_VERIFY_BYTES:
            ok = self._parse_and_verify(job)
            if ok:
                self.executor.submit(self._generate, job)
        else:
            self.executor.submit(self._pipeline, job)
        return job

    def _pipeline(self, job: ArticleJob) -> None:
        if self._parse_and_verify(job):
            self._generate(job)

    def _parse_and_verify(self, job: ArticleJob) -> bool:
        try:
            job.article = parse_article(job.source_path.read_text())
        except ProofDeskError as exc:
            job.transition(FAILED, f"parse error: {exc}")
            return False
        job.transition(PARSED)
        try:
            with self.library_lock:
                report = verify_article(
                    job.article,
                    self.library,
                    workers=self.config.verify_workers,
                    limits=self.config.check_limits,
                )
        except ProofDeskError as exc:
            job.transition(FAILED, f"verification error: {exc}")
            return False
        job.report = report
        job.report_path.write_text(json.dumps(report.to_dict(), indent=1) + "\n")
        job.render_path.write_text(
            json.dumps(render_model(job.article, report), indent=1) + "\n"
        )
        job.transition(VERIFIED)
        return True

    def _generate(self, job: ArticleJob) -> None:
        assert job.article is not None
        job.transition(GENERATING)
        try:
            outcome = write_problem_files(job.article, self.library, job.root)
            for line in outcome.log_lines:
                job.log(line.split(" ", 1)[1] if " " in line else line)
        except Exception as exc:  # workspace errors: fail the job, not the server
            job.transition(FAILED, f"generation error: {exc}")
            return
        job.transition(READY)

    # -- lookups ----------------------------------------------------------------

    def job(self, job_id: str) -> ArticleJob:
        job = self.jobs.get(job_id)
        if job is None:
            raise ServiceError(404, f"unknown job '{job_id}'")
        return job

    def _require_verified(self, job: ArticleJob) -> None:
        if job.state in (RECEIVED, PARSED):
            raise ServiceError(409, f"job not verified yet (state {job.state})")
        if job.state == FAILED:
            raise ServiceError(409, f"job failed: {job.error}")

    def render_doc(self, job_id: str) -> dict:
        job = self.job(job_id)
        self._require_verified(job)
        try:
            return json.loads(job.render_path.read_text())
        except OSError:
            raise ServiceError(409, "render model not available")

    def report_doc(self, job: ArticleJob) -> dict:
        if job.report is not None:
            return job.report.to_dict()
        doc = getattr(job, "_report_doc", None)
        if doc is None:
            try:
                doc = json.loads(job.report_path.read_text())
            except OSError:
                raise ServiceError(409, "verification report not available")
        return doc

    def log_text(self, job_id: str) -> str:
        job = self.job(job_id)
        try:
            return job.log_path.read_text()
        except OSError:
            return ""

    def obligations_doc(self, job_id: str) -> list[dict]:
        job = self.job(job_id)
        self._require_verified(job)
        doc = self.report_doc(job)
        out = []
        for record in doc.get("obligations", []):
            oid = record["id"]
            out.append(
                {
                    "id": oid,
                    "status": record["status"],
                    "millis": record["wall_millis"],
                    "generated": job.problem_path(oid).exists(),
                }
            )
        return out

    def problem_text(self, job_id: str, obligation_id: str) -> str:
        job = self.job(job_id)
        self._require_verified(job)
        self._known_obligation(job, obligation_id)
        path = job.problem_path(obligation_id)
        if not path.exists():
            raise ServiceError(409, f"problem for '{obligation_id}' not yet generated")
        return path.read_text()

    def _known_obligation(self, job: ArticleJob, obligation_id: str) -> None:
        doc = self.report_doc(job)
        if not any(r["id"] == obligation_id for r in doc.get("obligations", [])):
            raise ServiceError(404, f"unknown obligation '{obligation_id}'")

    # -- proving ------------------------------------------------------------------

    def _reference_meta(self, job: ArticleJob, name: str) -> dict:
        kind = None
        title = None
        anchor = None
        try:
            parsed = names.parse_name(name)
            kind = parsed.kind
        except ProofDeskError:
            parsed = None
        item = self.library.get(name)
        if item is not None:
            title = f"{item.kind} from {item.article}: " + format_formula(item.formula)
            anchor = f"/library/{name}"
        elif parsed is not None and job.article is not None:
            if parsed.kind in (names.THEOREM, names.DEFINITION):
                for it in job.article.items:
                    exported = (
                        names.theorem_name(it.ordinal, job.article.name)
                        if isinstance(it, Theorem)
                        else names.definition_name(it.ordinal, job.article.name)
                    )
                    if exported == name:
                        title = f"{parsed.kind} {it.label}: " + format_formula(it.formula)
                        anchor = f"#label-{it.label}"
                        break
            elif parsed.kind == names.FUNCTOR_TYPE:
                for decl in job.article.functor_decls:
                    if decl.ordinal == parsed.ordinal:
                        title = f"type of {decl.name}"
                        anchor = f"#func-{decl.name}"
                        break
            elif parsed.kind == names.CONSTANT_TYPE:
                title = f"type of local constant c{parsed.ordinal}"
            elif parsed.kind == names.LOCAL_PROPOSITION:
                title = f"proposition {parsed.ordinal} in this proof"
        return {"name": name, "kind": kind, "title": title, "anchor": anchor}

    def prove(
        self,
        job_id: str,
        obligation_id: str,
        system: str | None = None,
        cpu: float | None = None,
    ) -> dict:
        job = self.job(job_id)
        self._require_verified(job)
        self._known_obligation(job, obligation_id)
        path = job.problem_path(obligation_id)
        if not path.exists():
            raise ServiceError(409, f"problem for '{obligation_id}' not yet generated")
        system_name = system or self.config.default_system
        prover = self.systems.get(system_name)
        if prover is None:
            raise ServiceError(404, f"unknown system '{system_name}'")
        if cpu is not None and cpu <= 0:
            raise ServiceError(400, "cpu must be positive")
        cpu_seconds = cpu if cpu is not None else prover.default_cpu
        limits = Limits(
            cpu_seconds=cpu_seconds,
            wall_seconds=cpu_seconds + 0.4 if cpu is not None else max(15.0, cpu_seconds),
        )
        seq = job.run_seq.get(obligation_id, 0) + 1
        job.run_seq[obligation_id] = seq
        job.runs_dir().mkdir(parents=True, exist_ok=True)
        out_path = job.runs_dir() / f"{obligation_id}.{prover.name}.{seq}.out"
        result = run_prover(prover, path, limits, out_path)
        job.runs[obligation_id] = result
        job.log(
            f"prove {obligation_id} {prover.name} {result.status.value} "
            f"{result.wall_millis}"
        )
        used = [
            self._reference_meta(job, name) for name in (result.used_axioms or ())
        ]
        return {
            "obligation_id": obligation_id,
            "system": prover.name,
            "status": result.status.value,
            "cpu_millis": result.cpu_millis,
            "wall_millis": result.wall_millis,
            "used_references": used,
            "raw_output": f"/articles/{job.id}/runs/{out_path.name}",
            "hints_available": result.status is not SzsStatus.THEOREM,
            "message": result.message,
        }

    def raw_output(self, job_id: str, filename: str) -> str:
        job = self.job(job_id)
        if "/" in filename or ".." in filename:
            raise ServiceError(404, "unknown run")
        path = job.runs_dir() / filename
        if not path.exists():
            raise ServiceError(404, "unknown run")
        return path.read_text(errors="replace")

    # -- hints ---------------------------------------------------------------------

    def _allowed_premises(self, job: ArticleJob, obligation_id: str) -> set[str]:
        allowed = set(self.library.all_names())
        if job.article is None:
            return allowed
        context = names.parse_name(obligation_id)
        for item in job.article.items:
            if isinstance(item, Theorem):
                if context.item is not None and item.ordinal >= context.item:
                    continue
                allowed.add(names.theorem_name(item.ordinal, job.article.name))
            else:
                allowed.add(names.definition_name(item.ordinal, job.article.name))
        return allowed

    def hints(self, job_id: str, obligation_id: str, k: int | None = None) -> dict:
        job = self.job(job_id)
        self._require_verified(job)
        self._known_obligation(job, obligation_id)
        if k is not None and k <= 0:
            raise ServiceError(400, "k must be positive")
        k = k or self.config.default_hints
        problem = _problem_from_file(job.problem_path(obligation_id))
        if problem is None:
            raise ServiceError(409, f"problem for '{obligation_id}' not yet generated")
        goal = advisor.goal_symbols_of(problem)
        started = time.perf_counter()
        hint_list = advisor.suggest_hints(
            self.model, goal, k, allowed=self._allowed_premises(job, obligation_id)
        )
        millis = int((time.perf_counter() - started) * 1000)
        job.log(f"hints {obligation_id} {millis}")
        return {
            "obligation_id": obligation_id,
            "k": k,
            "goal_symbols": sorted(goal),
            "hints": [
                dict(self._reference_meta(job, name), score=score)
                for name, score in hint_list.ranked
            ],
            "millis": millis,
        }

    # -- library ----------------------------------------------------------------------

    def library_list(self) -> list[dict]:
        return [
            {"name": item.name, "kind": item.kind, "article": item.article}
            for item in self.library.all_items()
        ]

    def library_item(self, name: str) -> dict:
        item = self.library.get(name)
        if item is None:
            raise ServiceError(404, f"unknown library item '{name}'")
        return {
            "name": item.name,
            "kind": item.kind,
            "article": item.article,
            "formula": format_formula(item.formula),
            "tptp": tptp.format_formula(item.formula),
            "anchor": f"/library/{item.name}",
        }

    def install(self, job_id: str, force: bool = False) -> dict:
        job = self.job(job_id)
        self._require_verified(job)
        if job.article is None or job.report is None:
            raise ServiceError(409, "job is not installable (no verification run)")
        if not job.report.ok and not force:
            failed = [i.label for i in job.report.items if i.status == "failed"]
            raise ServiceError(
                409, "article has failed steps: " + ", ".join(failed)
            )
        with self.library_lock:
            items = export_article(job.article, job.report, force=force)
            try:
                self.library.add_article(job.article.name, items)
            except ProofDeskError as exc:
                raise ServiceError(409, str(exc))
            self.library.save(self.library_path)
            problems = {}
            for record in job.report.obligations.values():
                problem = _problem_from_file(job.problem_path(record.id))
                if problem is not None:
                    problems[record.id] = problem
            examples = advisor.harvest(job.report, problems, job.runs)
            merged = advisor.train(examples)
            # Swap in an additively merged model: counting is associative, so
            # this equals retraining on the full harvested corpus.
            new_model = advisor.AdvisorModel(
                premise_count=dict(self.model.premise_count),
                cofire=dict(self.model.cofire),
                total_examples=self.model.total_examples,
            )
            new_model.total_examples += merged.total_examples
            for key, count in merged.premise_count.items():
                new_model.premise_count[key] = (
                    new_model.premise_count.get(key, 0) + count
                )
            for key, count in merged.cofire.items():
                new_model.cofire[key] = new_model.cofire.get(key, 0) + count
            self.model = new_model
            advisor.save_model(self.model, self.model_path)
        job.log(f"install {job.article.name} items={len(items)} examples={len(examples)}")
        return {
            "article": job.article.name,
            "items": [item.name for item in items],
            "training_examples": len(examples),
        }


# ---------------------------------------------------------------------------
# FastAPI wiring


def create_app(service: Service):
    from fastapi import Body, FastAPI, Request
    from fastapi.responses import JSONResponse, PlainTextResponse

    app = FastAPI(title="proofdesk", version="0.1.0")
    app.state.service = service

    @app.exception_handler(ServiceError)
    async def _service_error(request: Request, exc: ServiceError):
        return JSONResponse(
            status_code=exc.status_code, content={"detail": exc.detail}
        )

    @app.post("/articles")
    def submit(body: dict = Body(...)):
        text = body.get("text", "")
        if not isinstance(text, str):
            raise ServiceError(400, "'text' must be a string")
        job = service.submit(text, body.get("name"))
        return {"id": job.id, "state": job.state}

    @app.get("/articles/{job_id}")
    def job_state(job_id: str):
        return service.job(job_id).to_dict()

    @app.get("/articles/{job_id}/render")
    def render(job_id: str):
        return service.render_doc(job_id)

    @app.get("/articles/{job_id}/log")
    def log(job_id: str):
        return PlainTextResponse(service.log_text(job_id))

    @app.get("/articles/{job_id}/obligations")
    def obligations(job_id: str):
        return service.obligations_doc(job_id)

    @app.post("/articles/{job_id}/obligations/{oid}/prove")
    def prove(job_id: str, oid: str, body: dict = Body(default={})):
        return service.prove(job_id, oid, body.get("system"), body.get("cpu"))

    @app.get("/articles/{job_id}/obligations/{oid}/problem")
    def problem(job_id: str, oid: str):
        return PlainTextResponse(service.problem_text(job_id, oid))

    @app.post("/articles/{job_id}/obligations/{oid}/hints")
    def hints(job_id: str, oid: str, body: dict = Body(default={})):
        k = body.get("k")
        if k is not None and not isinstance(k, int):
            raise ServiceError(400, "'k' must be an integer")
        return service.hints(job_id, oid, k)

    @app.get("/articles/{job_id}/runs/{filename}")
    def raw_run(job_id: str, filename: str):
        return PlainTextResponse(service.raw_output(job_id, filename))

    @app.get("/library")
    def library_list():
        return service.library_list()

    @app.get("/library/{name}")
    def library_item(name: str):
        return service.library_item(name)

    @app.post("/articles/{job_id}/install")
    def install(job_id: str, body: dict = Body(default={})):
        return service.install(job_id, bool(body.get("force", False)))

    @app.get("/systems")
    def systems():
        return [
            {"name": s.name, "kind": s.kind, "default_cpu": s.default_cpu}
            for s in service.systems.values()
        ]

    ui_dir = service.config.ui_dir
    if ui_dir is not None and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
