"""Premise selection by naive Bayes over conjecture symbols.

Training counts, per premise, how often it was used and how often it
co-fired with each goal symbol.  A query scores every known premise by

    log((count(p)+1) / (total+P)) + sum over goal symbols s of
    log((cofire(p,s)+1) / (count(p)+2))

with Laplace smoothing sigma=1 and P the number of known premises, and
returns the top-k, ties broken by name.  Queries are read-only; retraining
builds a fresh model that callers swap in atomically.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from . import fol
from .errors import ProofDeskError
from .problems import TptpProblem
from .szs import RunResult, SzsStatus

_SCOPE_CONSTANT_RE = re.compile(r"c[1-9]\d*\Z")

FORMAT_HEADER = "advisor-model v1"


@dataclass(frozen=True)
class TrainingExample:
    goal_symbols: frozenset[str]
    used_premises: frozenset[str]

    def __post_init__(self) -> None:
        if not self.goal_symbols or not self.used_premises:
            raise ValueError("training example needs non-empty symbol and premise sets")


@dataclass
class AdvisorModel:
    premise_count: dict[str, int] = field(default_factory=dict)
    cofire: dict[tuple[str, str], int] = field(default_factory=dict)
    total_examples: int = 0

    @property
    def symbol_vocabulary(self) -> set[str]:
        return {s for _, s in self.cofire}

    def known_premises(self) -> list[str]:
        return sorted(self.premise_count)


@dataclass(frozen=True)
class HintList:
    ranked: tuple[tuple[str, float], ...]

    def names(self) -> list[str]:
        return [name for name, _ in self.ranked]

    def to_dict(self) -> list[dict]:
        return [{"name": n, "score": s} for n, s in self.ranked]


def train(examples: Iterable[TrainingExample]) -> AdvisorModel:
    """Accumulate counts; the result is independent of example order."""
    model = AdvisorModel()
    for example in examples:
        model.total_examples += 1
        for premise in example.used_premises:
            model.premise_count[premise] = model.premise_count.get(premise, 0) + 1
            for symbol in example.goal_symbols:
                key = (premise, symbol)
                model.cofire[key] = model.cofire.get(key, 0) + 1
    return model


def score(model: AdvisorModel, premise: str, goal_symbols: Iterable[str]) -> float:
    count = model.premise_count.get(premise, 0)
    total = model.total_examples
    known = len(model.premise_count)
    value = math.log((count + 1) / (total + known))
    for symbol in goal_symbols:
        value += math.log((model.cofire.get((premise, symbol), 0) + 1) / (count + 2))
    return value


def suggest_hints(
    model: AdvisorModel,
    goal_symbols: Iterable[str],
    k: int,
    allowed: set[str] | None = None,
) -> HintList:
    """Top-k premises by score, descending, ties by name ascending."""
    if k <= 0:
        raise ValueError("k must be positive")
    if model.total_examples == 0 or not model.premise_count:
        return HintList(())
    goal = sorted(set(goal_symbols))
    scored = [
        (name, score(model, name, goal))
        for name in model.premise_count
        if allowed is None or name in allowed
    ]
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return HintList(tuple(scored[:k]))


# ---------------------------------------------------------------------------
# Harvesting training data from verification and prover runs


def goal_symbols_of(problem: TptpProblem) -> frozenset[str]:
    """Feature symbols of a problem's conjecture: its predicates and functors
    with proof-local constants replaced by their type predicates."""
    symbols = set(fol.symbols(problem.conjecture.formula))
    constant_types: dict[str, str] = {}
    for axiom in problem.axioms:
        if axiom.kind == "constant-type" and isinstance(axiom.formula, fol.Atom):
            arg = axiom.formula.args[0]
            if isinstance(arg, fol.Const):
                constant_types[arg.name] = axiom.formula.predicate
    out = set()
    for s in symbols:
        if _SCOPE_CONSTANT_RE.match(s):
            if s in constant_types:
                out.add(constant_types[s])
        else:
            out.add(s)
    return frozenset(out)


def harvest(
    report,
    problems: Mapping[str, TptpProblem],
    results: Mapping[str, RunResult] | None = None,
) -> list[TrainingExample]:
    """One example per obligation that was Verified or proved by a prover run.

    Premises are the run's used axioms when a Theorem run reported them
    (minus the conjecture's own name), otherwise the problem's axiom names
    (explicit references plus the included dt_* axioms).
    """
    results = results or {}
    examples: list[TrainingExample] = []
    for oid, record in report.obligations.items():
        problem = problems.get(oid)
        if problem is None:
            continue
        run = results.get(oid)
        verified = record.status.value == "verified"
        proved = run is not None and run.status is SzsStatus.THEOREM
        if not verified and not proved:
            continue
        if proved and run.used_axioms:
            premises = frozenset(run.used_axioms) - {problem.conjecture.name}
        else:
            premises = frozenset(a.name for a in problem.axioms)
        goal = goal_symbols_of(problem)
        if not premises or not goal:
            continue
        examples.append(TrainingExample(goal, premises))
    return examples


# ---------------------------------------------------------------------------
# Persistence (line-oriented count file)


def save_model(model: AdvisorModel, path: str | Path) -> None:
    lines = [f"{FORMAT_HEADER} total={model.total_examples}"]
    for premise in sorted(model.premise_count):
        lines.append(f"{premise}\t{model.premise_count[premise]}")
    for (premise, symbol) in sorted(model.cofire):
        lines.append(f"{premise}\t{symbol}\t{model.cofire[(premise, symbol)]}")
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text("\n".join(lines) + "\n")
    tmp.replace(path)


def load_model(path: str | Path) -> AdvisorModel:
    text = Path(path).read_text()
    lines = text.splitlines()
    if not lines or not lines[0].startswith(FORMAT_HEADER):
        raise ProofDeskError(f"not an advisor model file: {path}")
    header = lines[0]
    try:
        total = int(header.split("total=", 1)[1])
    except (IndexError, ValueError):
        raise ProofDeskError(f"malformed model header: {header!r}")
    model = AdvisorModel(total_examples=total)
    for line in lines[1:]:
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) == 2:
            model.premise_count[fields[0]] = int(fields[1])
        elif len(fields) == 3:
            model.cofire[(fields[0], fields[1])] = int(fields[2])
        else:
            raise ProofDeskError(f"malformed model line: {line!r}")
    return model
