"""Prover outcome vocabulary, resource limits, and run results."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class SzsStatus(Enum):
    THEOREM = "Theorem"
    COUNTER_SATISFIABLE = "CounterSatisfiable"
    RESOURCE_OUT = "ResourceOut"
    GAVE_UP = "GaveUp"
    ERROR = "Error"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Limits:
    cpu_seconds: float = 10.0
    wall_seconds: float = 15.0
    memory_bytes: int = 1 << 30
    max_generated_clauses: int | None = None  # internal prover only

    def __post_init__(self) -> None:
        if self.cpu_seconds <= 0 or self.wall_seconds <= 0 or self.memory_bytes <= 0:
            raise ValueError("limits must be positive")
        if self.wall_seconds < self.cpu_seconds:
            raise ValueError("wall limit must be at least the cpu limit")
        if self.max_generated_clauses is not None and self.max_generated_clauses <= 0:
            raise ValueError("limits must be positive")


@dataclass(frozen=True)
class RunResult:
    system: str
    status: SzsStatus
    cpu_millis: int
    wall_millis: int
    used_axioms: tuple[str, ...] | None = None  # only when status is Theorem
    raw_output_path: str | None = None
    message: str | None = None  # diagnostic, set for Error
    generated_clauses: int | None = None  # internal prover statistics
