"""Prover systems: the text database, resource-limited execution, fallback.

External systems run in their own process group; a poll loop (every 100 ms)
accounts CPU, wall time and memory over the whole process tree and kills the
entire tree on any breach.  Output is classified through per-system
substring patterns into SZS statuses.
"""

from __future__ import annotations

import os
import re
import shlex
import signal
import subprocess
import tempfile
import threading
import time
from dataclasses import dataclass
from pathlib import Path

import psutil

from . import tptp
from .clausal import clausify
from .errors import SystemDbError
from .saturation import INTERNAL_SYSTEM, derivation_summary, saturate
from .szs import Limits, RunResult, SzsStatus

POLL_INTERVAL = 0.1  # tree resource accounting cadence (must stay <= 200 ms)

# Cap on simultaneously running external provers, shared process-wide.
_EXTERNAL_SLOTS = threading.BoundedSemaphore(os.cpu_count() or 2)

_FOF_NAME_RE = re.compile(r"\bfof\(\s*([a-z][A-Za-z0-9_]*)")
_FILE_NAME_RE = re.compile(r"\bfile\('[^']*',\s*([a-z][A-Za-z0-9_]*)\s*\)")


@dataclass(frozen=True)
class ProverSystem:
    name: str
    command_template: str  # %s -> problem path, %d -> cpu seconds
    status_patterns: tuple[tuple[str, SzsStatus], ...]
    default_cpu: float = 10.0
    kind: str = "external"  # "internal" | "external"

    def __post_init__(self) -> None:
        if self.kind == "external":
            if self.command_template.count("%s") != 1:
                raise SystemDbError(
                    f"system '{self.name}': command must contain %s exactly once"
                )
        patterns = [p for p, _ in self.status_patterns]
        for i, a in enumerate(patterns):
            for b in patterns[i + 1 :]:
                if a in b or b in a:
                    raise SystemDbError(
                        f"system '{self.name}': overlapping status patterns "
                        f"{a!r} and {b!r}"
                    )

    def command(self, problem_path: str, cpu_seconds: float) -> list[str]:
        text = self.command_template.replace("%d", str(int(cpu_seconds)))
        text = text.replace("%s", problem_path)
        return shlex.split(text)

    def classify(self, output: str) -> SzsStatus | None:
        for pattern, status in self.status_patterns:
            if pattern in output:
                return status
        return None


MINI_E = ProverSystem(
    name=INTERNAL_SYSTEM,
    command_template="%s",
    status_patterns=(
        ("SZS status Theorem", SzsStatus.THEOREM),
        ("SZS status CounterSatisfiable", SzsStatus.COUNTER_SATISFIABLE),
        ("SZS status ResourceOut", SzsStatus.RESOURCE_OUT),
        ("SZS status GaveUp", SzsStatus.GAVE_UP),
    ),
    kind="internal",
)


# ---------------------------------------------------------------------------
# System database (stanza-per-system text file)


def load_system_db(path: str | Path) -> list[ProverSystem]:
    """Parse the prover database; the internal system is always first."""
    systems: list[ProverSystem] = [MINI_E]
    names = {MINI_E.name}
    stanza: dict[str, str] = {}
    patterns: list[tuple[str, SzsStatus]] = []
    stanza_line = 0

    def flush(line_no: int) -> None:
        nonlocal stanza, patterns
        if not stanza and not patterns:
            return
        if "name" not in stanza:
            raise SystemDbError("stanza missing 'name'", stanza_line)
        if "command" not in stanza:
            raise SystemDbError(
                f"system '{stanza['name']}' missing 'command'", stanza_line
            )
        name = stanza["name"]
        if name in names:
            raise SystemDbError(f"duplicate system name '{name}'", stanza_line)
        names.add(name)
        systems.append(
            ProverSystem(
                name=name,
                command_template=stanza["command"],
                status_patterns=tuple(patterns),
                default_cpu=float(stanza.get("cpu", 10.0)),
            )
        )
        stanza = {}
        patterns = []

    text = Path(path).read_text()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            if not line:
                flush(line_no)
            continue
        if "=" not in line:
            raise SystemDbError(f"expected 'key = value', got {raw!r}", line_no)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not stanza and not patterns:
            stanza_line = line_no
        if key.startswith("status "):
            status_name = key[len("status "):].strip()
            try:
                status = SzsStatus(status_name)
            except ValueError:
                raise SystemDbError(f"unknown status '{status_name}'", line_no)
            patterns.append((value, status))
        elif key in ("name", "command", "cpu"):
            if key in stanza:
                raise SystemDbError(f"duplicate key '{key}' in stanza", line_no)
            stanza[key] = value
        else:
            raise SystemDbError(f"unknown key '{key}'", line_no)
    flush(len(text.splitlines()) + 1)
    return systems


def serialize_system_db(systems: list[ProverSystem]) -> str:
    """Inverse of load_system_db over the external systems (the internal one
    is implicit and always re-added on load)."""
    stanzas = []
    for system in systems:
        if system.kind != "external":
            continue
        lines = [f"name = {system.name}", f"command = {system.command_template}"]
        if system.default_cpu != 10.0:
            lines.append(f"cpu = {system.default_cpu:g}")
        for pattern, status in system.status_patterns:
            lines.append(f"status {status.value} = {pattern}")
        stanzas.append("\n".join(lines))
    return "\n\n".join(stanzas) + ("\n" if stanzas else "")


# ---------------------------------------------------------------------------
# Resource-limited execution


def _tree_processes(root: psutil.Process) -> list[psutil.Process]:
    try:
        return [root] + root.children(recursive=True)
    except psutil.NoSuchProcess:
        return []


def _tree_cpu_seconds(procs: list[psutil.Process]) -> float:
    total = 0.0
    for p in procs:
        try:
            t = p.cpu_times()
        except psutil.NoSuchProcess:
            continue
        total += t.user + t.system
        # Children entries cover already-reaped descendants.
        total += getattr(t, "children_user", 0.0) + getattr(t, "children_system", 0.0)
    return total


def _tree_memory_bytes(procs: list[psutil.Process]) -> int:
    total = 0
    for p in procs:
        try:
            total += p.memory_info().rss
        except psutil.NoSuchProcess:
            continue
    return total


def _kill_tree(proc: subprocess.Popen, procs: list[psutil.Process]) -> None:
    for p in procs:
        try:
            p.kill()
        except psutil.NoSuchProcess:
            pass
    try:
        os.killpg(proc.pid, signal.SIGKILL)
    except (ProcessLookupError, PermissionError):
        pass
    try:
        proc.wait(timeout=5)
    except subprocess.TimeoutExpired:
        pass


def run_external(
    system: ProverSystem,
    problem_path: str | Path,
    limits: Limits | None = None,
    output_path: str | Path | None = None,
) -> RunResult:
    """Run an external prover under CPU/wall/memory limits over its whole
    process tree; returns ResourceOut on any breach, with the tree killed."""
    if system.kind != "external":
        raise ValueError(f"system '{system.name}' is not external")
    limits = limits or Limits(cpu_seconds=system.default_cpu)
    problem_path = str(problem_path)
    if output_path is None:
        fd, output_path = tempfile.mkstemp(prefix="prover-", suffix=".out")
        os.close(fd)
    output_path = str(output_path)

    command = system.command(problem_path, limits.cpu_seconds)
    with _EXTERNAL_SLOTS:
        return _run_limited(system, command, problem_path, output_path, limits)


def _run_limited(
    system: ProverSystem,
    command: list[str],
    problem_path: str,
    output_path: str,
    limits: Limits,
) -> RunResult:
    start = time.perf_counter()
    try:
        out_file = open(output_path, "wb")
    except OSError as exc:
        return RunResult(system.name, SzsStatus.ERROR, 0, 0, message=str(exc))
    with out_file:
        try:
            proc = subprocess.Popen(
                command,
                stdout=out_file,
                stderr=subprocess.STDOUT,
                start_new_session=True,
            )
        except (OSError, ValueError) as exc:
            return RunResult(
                system.name,
                SzsStatus.ERROR,
                0,
                0,
                raw_output_path=output_path,
                message=f"cannot spawn {command[0]!r}: {exc}",
            )

        cpu_used = 0.0
        breached = False
        try:
            root = psutil.Process(proc.pid)
        except psutil.NoSuchProcess:
            root = None
        while proc.poll() is None:
            wall = time.perf_counter() - start
            procs = _tree_processes(root) if root is not None else []
            cpu_used = max(cpu_used, _tree_cpu_seconds(procs))
            if (
                wall > limits.wall_seconds
                or cpu_used > limits.cpu_seconds
                or _tree_memory_bytes(procs) > limits.memory_bytes
            ):
                _kill_tree(proc, procs)
                breached = True
                break
            try:
                proc.wait(timeout=POLL_INTERVAL)
            except subprocess.TimeoutExpired:
                pass
        proc.poll()

    wall_millis = int((time.perf_counter() - start) * 1000)
    cpu_millis = int(cpu_used * 1000)
    if breached:
        return RunResult(
            system.name,
            SzsStatus.RESOURCE_OUT,
            cpu_millis,
            wall_millis,
            raw_output_path=output_path,
        )
    try:
        output = Path(output_path).read_text(errors="replace")
    except OSError:
        output = ""
    status = system.classify(output)
    if status is None:
        status = SzsStatus.GAVE_UP
    used = None
    if status is SzsStatus.THEOREM:
        used = _cited_axioms(output, problem_path)
    return RunResult(
        system.name,
        status,
        cpu_millis,
        wall_millis,
        used_axioms=used,
        raw_output_path=output_path,
    )


def _cited_axioms(output: str, problem_path: str) -> tuple[str, ...] | None:
    """Names cited in proof output, restricted to the problem's own names."""
    try:
        problem_text = Path(problem_path).read_text()
    except OSError:
        return None
    problem_names = set(_FOF_NAME_RE.findall(problem_text))
    cited = set(_FOF_NAME_RE.findall(output)) | set(_FILE_NAME_RE.findall(output))
    used = tuple(sorted(cited & problem_names))
    return used or None


# ---------------------------------------------------------------------------
# Dispatch and fallback


def run_internal(
    problem_path: str | Path,
    limits: Limits | None = None,
    output_path: str | Path | None = None,
    weight_cap: int | None = None,
) -> RunResult:
    """Run the built-in saturation prover on a TPTP problem file."""
    limits = limits or Limits()
    text = Path(problem_path).read_text()
    units = tptp.parse_tptp_problem(text)
    axioms = [(u.name, u.formula) for u in units if u.role == "axiom"]
    conjectures = [u for u in units if u.role == "conjecture"]
    if len(conjectures) != 1:
        return RunResult(
            INTERNAL_SYSTEM,
            SzsStatus.ERROR,
            0,
            0,
            message=f"expected one conjecture, found {len(conjectures)}",
        )
    form = clausify(axioms, conjectures[0].formula, conjecture_name=conjectures[0].name)
    result = saturate(form, limits, weight_cap=weight_cap)
    if output_path is not None:
        Path(output_path).parent.mkdir(parents=True, exist_ok=True)
        Path(output_path).write_text(derivation_summary(result, form))
        result = RunResult(
            result.system,
            result.status,
            result.cpu_millis,
            result.wall_millis,
            used_axioms=result.used_axioms,
            raw_output_path=str(output_path),
            generated_clauses=result.generated_clauses,
        )
    return result


def run_prover(
    system: ProverSystem,
    problem_path: str | Path,
    limits: Limits | None = None,
    output_path: str | Path | None = None,
) -> RunResult:
    if system.kind == "internal":
        return run_internal(problem_path, limits, output_path)
    return run_external(system, problem_path, limits, output_path)


def prove_with_fallback(
    problem_path: str | Path,
    primary: ProverSystem,
    fallback: ProverSystem | None,
    limits: Limits | None = None,
    output_paths: tuple[str | Path | None, str | Path | None] = (None, None),
) -> list[RunResult]:
    """Run the primary system; on anything other than Theorem or
    CounterSatisfiable, run the fallback too.  Returns all results in order.
    """
    results = [run_prover(primary, problem_path, limits, output_paths[0])]
    if (
        fallback is not None
        and results[0].status not in (SzsStatus.THEOREM, SzsStatus.COUNTER_SATISFIABLE)
    ):
        results.append(run_prover(fallback, problem_path, limits, output_paths[1]))
    return results
