"""Domain types shared across the tutoring engine.

Theorems, aligned proofs, and checker-rendered proof states are all immutable
values; every operation in this module is pure, so instances can be shared
freely between concurrent sessions.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

TURNSTILE = "⊢"  # ⊢
PROOF_ENTRY_MARKER = ":= by"


class MalformedState(ValueError):
    """Checker-rendered goal text that cannot be parsed into goal cases."""


class Persona(str, Enum):
    STAFF_SOLUTION = "staff_solution"
    EQUATION_BASED = "equation_based"
    JUSTIFICATION_BASED = "justification_based"


class Label(str, Enum):
    CORRECT = "correct"
    INCORRECT = "incorrect"


@dataclass(frozen=True)
class TheoremSpec:
    """A theorem in the curriculum: statement in both languages plus ordering."""

    name: str
    statement_nl: str
    statement_fl: str
    world: str
    order_index: int

    def __post_init__(self) -> None:
        if not self.statement_fl.rstrip().endswith(PROOF_ENTRY_MARKER):
            raise ValueError(
                f"formal statement of {self.name!r} must end with {PROOF_ENTRY_MARKER!r}"
            )
        if self.order_index < 0:
            raise ValueError("order_index must be non-negative")


@dataclass(frozen=True)
class ProofStep:
    """One aligned proof step: a natural-language sentence and one Lean tactic."""

    nl: str
    tactic: str

    def __post_init__(self) -> None:
        if self.nl.lstrip().startswith("--"):
            raise ValueError("natural-language step must not keep comment markers")
        if "\n" in self.tactic:
            raise ValueError("tactic must be a single line")


@dataclass(frozen=True)
class AnnotatedProof:
    """A theorem with its ordered, 1:1 aligned (NL, tactic) steps.

    ``skipped_index`` is the 1-based position of the step that was deleted from
    the source proof; it is present exactly when ``label`` is ``INCORRECT``.
    """

    theorem: TheoremSpec
    steps: tuple[ProofStep, ...]
    persona: Persona
    label: Label
    skipped_index: int | None = None

    def __post_init__(self) -> None:
        if not self.steps:
            raise ValueError("a proof needs at least one step")
        if self.label is Label.INCORRECT and self.skipped_index is None:
            raise ValueError("incorrect proofs must record the skipped step index")
        if self.label is Label.CORRECT and self.skipped_index is not None:
            raise ValueError("correct proofs carry no skipped step index")

    @property
    def tactics(self) -> tuple[str, ...]:
        return tuple(step.tactic for step in self.steps)

    @property
    def nl_steps(self) -> tuple[str, ...]:
        return tuple(step.nl for step in self.steps)


@dataclass(frozen=True)
class GoalCase:
    """One goal of a proof state: hypothesis lines followed by its ⊢ line."""

    hypothesis_lines: tuple[str, ...]
    goal_line: str
    free_variables: tuple[str, ...]

    @property
    def lines(self) -> tuple[str, ...]:
        return self.hypothesis_lines + (self.goal_line,)

    @property
    def text(self) -> str:
        return "\n".join(self.lines)


@dataclass(frozen=True)
class ProofState:
    """Checker-rendered goal text plus its parse into goal cases.

    An empty ``cases`` tuple is the completed-proof sentinel.
    """

    raw: str
    cases: tuple[GoalCase, ...]

    @property
    def is_complete(self) -> bool:
        return not self.cases

    def render(self) -> str:
        """Canonical text form: cases joined by one blank line."""
        return "\n\n".join(case.text for case in self.cases)


COMPLETE_STATE = ProofState(raw="", cases=())


def extract_free_variables(case_lines: list[str] | tuple[str, ...]) -> list[str]:
    """Collect the names left of the first colon on each hypothesis line.

    Multi-name binder lines (``a b : ℕ``) contribute each name separately.
    Names are returned in first-appearance order, without duplicates.
    """
    seen: list[str] = []
    for line in case_lines:
        head, colon, _ = line.partition(":")
        if not colon:
            raise MalformedState(f"hypothesis line has no colon: {line!r}")
        for name in head.split():
            if name not in seen:
                seen.append(name)
    return seen


def parse_proof_state(raw: str) -> ProofState:
    """Split checker-rendered goal text into goal cases.

    A case is a maximal run of lines holding exactly one turnstile line; a new
    case begins at the first non-blank line after a turnstile line. Blank lines
    are separators, never content. Empty or whitespace-only input is the
    completed-proof sentinel (zero cases).
    """
    if not raw.strip():
        return ProofState(raw=raw, cases=())

    blocks: list[list[str]] = []
    current: list[str] = []
    closed = False
    for line in raw.split("\n"):
        if not line.strip():
            continue
        if closed and current:
            blocks.append(current)
            current = []
            closed = False
        current.append(line)
        if TURNSTILE in line:
            closed = True
    if current:
        blocks.append(current)

    cases = []
    for block in blocks:
        goal_indices = [i for i, line in enumerate(block) if TURNSTILE in line]
        if not goal_indices:
            raise MalformedState(f"goal case lacks a turnstile line: {block!r}")
        goal_at = goal_indices[0]
        hypothesis_lines = tuple(block[:goal_at])
        cases.append(
            GoalCase(
                hypothesis_lines=hypothesis_lines,
                goal_line=block[goal_at],
                free_variables=tuple(extract_free_variables(hypothesis_lines)),
            )
        )
    return ProofState(raw=raw, cases=tuple(cases))
