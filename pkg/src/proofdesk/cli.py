"""Command-line interface: the same engine as the HTTP service, no server."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import advisor as advisor_mod
from .errors import ProofDeskError
from .library import LibraryStore
from .parser import parse_article
from .problems import write_problem_files
from .report import write_report
from .systems import MINI_E, load_system_db, run_prover
from .szs import Limits
from .verifier import verify_article


def _load_library(path: str | None) -> LibraryStore | None:
    if path is None:
        return None
    return LibraryStore.load(path)


def _parse_file(path: str):
    try:
        return parse_article(Path(path).read_text())
    except ProofDeskError as exc:
        raise click.ClickException(str(exc))


@click.group()
def main() -> None:
    """Verify articles, generate prover problems, run provers, get hints."""


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--library", type=click.Path(exists=True, dir_okay=False),
              help="Library store (JSON) for resolving references.")
@click.option("--workers", default=1, show_default=True,
              help="Concurrent obligation checks.")
@click.option("--report-dir", type=click.Path(file_okay=False),
              help="Write report.log, report.json and timings.png here.")
@click.option("--figure/--no-figure", default=True, show_default=True,
              help="Render the timing figure with the report.")
def verify(file: str, library: str | None, workers: int,
           report_dir: str | None, figure: bool) -> None:
    """Verify FILE and print one line per obligation."""
    article = _parse_file(file)
    try:
        report = verify_article(article, _load_library(library), workers=workers)
    except ProofDeskError as exc:
        raise click.ClickException(str(exc))
    click.echo(report.text_log(), nl=False)
    for item in report.items:
        line = f"{item.label}: {item.status}"
        if item.error:
            line += f" ({item.error})"
        click.echo(line)
    if report_dir:
        for path in write_report(report, report_dir, figure=figure):
            click.echo(f"wrote {path}")
    if not report.ok:
        sys.exit(1)


@main.command("gen-problems")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--out", "out_dir", required=True,
              type=click.Path(file_okay=False), help="Workspace directory.")
@click.option("--library", type=click.Path(exists=True, dir_okay=False))
def gen_problems(file: str, out_dir: str, library: str | None) -> None:
    """Generate one TPTP problem per obligation of FILE into OUT."""
    article = _parse_file(file)
    outcome = write_problem_files(article, _load_library(library), out_dir)
    for line in outcome.log_lines:
        click.echo(line)
    click.echo(
        f"{len(outcome.problems)} generated, {len(outcome.skipped)} kept, "
        f"{len(outcome.errors)} failed"
    )
    if outcome.errors:
        sys.exit(1)


@main.command()
@click.argument("problem", type=click.Path(exists=True, dir_okay=False))
@click.option("--system", default=MINI_E.name, show_default=True)
@click.option("--cpu", type=float, default=None, help="CPU seconds limit.")
@click.option("--systems", "systems_db", type=click.Path(exists=True, dir_okay=False),
              help="Prover system database.")
@click.option("--output", type=click.Path(dir_okay=False),
              help="Store raw prover output here.")
def prove(problem: str, system: str, cpu: float | None,
          systems_db: str | None, output: str | None) -> None:
    """Run a prover on a TPTP PROBLEM file."""
    systems = {MINI_E.name: MINI_E}
    if systems_db:
        try:
            systems = {s.name: s for s in load_system_db(systems_db)}
        except ProofDeskError as exc:
            raise click.ClickException(str(exc))
    chosen = systems.get(system)
    if chosen is None:
        raise click.ClickException(f"unknown system '{system}'")
    cpu_seconds = cpu if cpu is not None else chosen.default_cpu
    limits = Limits(cpu_seconds=cpu_seconds, wall_seconds=max(cpu_seconds * 1.5, 15.0))
    result = run_prover(chosen, problem, limits, output)
    click.echo(f"SZS status {result.status.value}")
    click.echo(f"cpu {result.cpu_millis} ms, wall {result.wall_millis} ms")
    if result.used_axioms:
        click.echo("used: " + ", ".join(result.used_axioms))
    if result.message:
        click.echo(f"note: {result.message}")
    if result.raw_output_path:
        click.echo(f"raw output: {result.raw_output_path}")


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--obligation", required=True, help="Obligation id to advise on.")
@click.option("-k", default=20, show_default=True, help="Number of hints.")
@click.option("--model", "model_path", type=click.Path(exists=True, dir_okay=False),
              help="Trained advisor model file.")
@click.option("--library", type=click.Path(exists=True, dir_okay=False))
def advise(file: str, obligation: str, k: int, model_path: str | None,
           library: str | None) -> None:
    """Suggest premises for one obligation of FILE."""
    from .obligations import extract_obligations
    from .problems import ArticleContext, generate_problem

    article = _parse_file(file)
    lib = _load_library(library)
    ctx = ArticleContext.from_article(article)
    target = None
    for ob in extract_obligations(article, lib=None):
        if ob.id == obligation:
            target = ob
            break
    if target is None:
        raise click.ClickException(f"unknown obligation '{obligation}'")
    problem = generate_problem(target, lib, ctx)
    model = (
        advisor_mod.load_model(model_path)
        if model_path
        else advisor_mod.AdvisorModel()
    )
    goal = advisor_mod.goal_symbols_of(problem)
    hints = advisor_mod.suggest_hints(model, goal, k)
    click.echo(f"goal symbols: {', '.join(sorted(goal))}")
    if not hints.ranked:
        click.echo("no hints (model is empty)")
        return
    for name, score in hints.ranked:
        click.echo(f"{score:10.4f}  {name}")


@main.command()
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--workdir", required=True, type=click.Path(file_okay=False))
@click.option("--systems", "systems_db", type=click.Path(exists=True, dir_okay=False))
@click.option("--workers", default=1, show_default=True,
              help="Concurrent obligation checks during verification.")
@click.option("--ui", "ui_dir", type=click.Path(file_okay=False),
              help="Static front-end assets to serve under /ui.")
def serve(port: int, host: str, workdir: str, systems_db: str | None,
          workers: int, ui_dir: str | None) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .service import Service, ServiceConfig, create_app

    config = ServiceConfig(
        workdir=Path(workdir),
        systems_db=Path(systems_db) if systems_db else None,
        verify_workers=workers,
        ui_dir=Path(ui_dir) if ui_dir else None,
    )
    app = create_app(Service(config))
    uvicorn.run(app, host=host, port=port)


@main.command("export-library")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--out", required=True, type=click.Path(dir_okay=False),
              help="Library store JSON to create or extend.")
@click.option("--force", is_flag=True, help="Export even with failed steps.")
@click.option("--workers", default=1, show_default=True)
def export_library(file: str, out: str, force: bool, workers: int) -> None:
    """Verify FILE and add its exported items to a library store."""
    from .library import export_article

    article = _parse_file(file)
    lib = LibraryStore.load(out) if Path(out).exists() else LibraryStore()
    report = verify_article(article, lib, workers=workers)
    try:
        items = export_article(article, report, force=force)
        lib.add_article(article.name, items)
    except ProofDeskError as exc:
        raise click.ClickException(str(exc))
    lib.save(out)
    click.echo(f"installed {article.name}: {len(items)} items -> {out}")


@main.command("model-info")
@click.argument("model", type=click.Path(exists=True, dir_okay=False))
def model_info(model: str) -> None:
    """Show advisor model statistics."""
    m = advisor_mod.load_model(model)
    click.echo(json.dumps(
        {
            "total_examples": m.total_examples,
            "premises": len(m.premise_count),
            "symbols": len(m.symbol_vocabulary),
        },
        indent=1,
    ))
