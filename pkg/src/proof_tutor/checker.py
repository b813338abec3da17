"""Bridge to a Lean proof checker.

A check runs one theorem header plus a tactic list through a checker backend
and classifies the outcome. The classification rule is deliberately narrow:
an error diagnostic whose text starts with ``unsolved goals`` means the proof
merely is not finished; any other error diagnostic marks the run as erroneous;
no error diagnostics at all means the proof is complete. Non-error severities
(warnings, infos) never affect classification.

Two backends are provided: :class:`LeanReplChecker` drives a persistent REPL
subprocess over newline-delimited JSON, and :class:`FixtureChecker` replays
recorded results so the rest of the system is testable without a Lean
toolchain.
"""

from __future__ import annotations

import json
import queue
import re
import subprocess
import threading
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .model import COMPLETE_STATE, PROOF_ENTRY_MARKER, ProofState, parse_proof_state

UNSOLVED_GOALS_PREFIX = "unsolved goals"

_CASE_LABEL = re.compile(r"^case\s+\S+.*$")
_THEOREM_NAME = re.compile(r"\b(?:theorem|lemma|example)\s+([^\s(:{\[]+)")


class BackendUnavailable(RuntimeError):
    """The checker backend itself failed; distinct from a proof error."""


class Status(str, Enum):
    COMPLETE = "complete"
    INCOMPLETE = "incomplete"
    ERROR = "error"


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    text: str
    position: tuple[int, int] | None = None
    end_position: tuple[int, int] | None = None


@dataclass(frozen=True)
class CheckRequest:
    theorem_header: str
    tactics: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.theorem_header.rstrip().endswith(PROOF_ENTRY_MARKER):
            raise ValueError(f"theorem header must end with {PROOF_ENTRY_MARKER!r}")
        for tactic in self.tactics:
            if "\n" in tactic:
                raise ValueError(f"tactic must be a single line: {tactic!r}")
            if tactic.lstrip().startswith("--"):
                raise ValueError(f"comment lines are not tactics: {tactic!r}")

    @property
    def source(self) -> str:
        body = "".join(f"\n  {tactic}" for tactic in self.tactics)
        return self.theorem_header + body


@dataclass(frozen=True)
class CheckResult:
    status: Status
    goal_state: ProofState | None = None
    message: str | None = None
    error_position: tuple[int, int] | None = None

    def __post_init__(self) -> None:
        if self.status is Status.COMPLETE:
            if (self.goal_state is None or self.goal_state.cases) or self.message:
                raise ValueError("complete results carry an empty goal state and no message")
        if self.status is Status.INCOMPLETE and self.goal_state is None:
            raise ValueError("incomplete results carry the remaining goal state")
        if self.status is Status.ERROR and not self.message:
            raise ValueError("error results carry a message")


def theorem_name_from_header(header: str) -> str:
    match = _THEOREM_NAME.search(header)
    if not match:
        raise ValueError(f"cannot find a theorem name in {header!r}")
    return match.group(1)


def classify(diagnostics: Iterable[Diagnostic]) -> Status:
    """Pure classification of one checker run's diagnostics."""
    errors = [d for d in diagnostics if d.severity == "error"]
    if not errors:
        return Status.COMPLETE
    if all(d.text.startswith(UNSOLVED_GOALS_PREFIX) for d in errors):
        return Status.INCOMPLETE
    return Status.ERROR


def strip_case_labels(goal_text: str) -> str:
    """Drop Lean's ``case foo`` header lines from rendered goal text."""
    kept = [line for line in goal_text.split("\n") if not _CASE_LABEL.match(line)]
    return "\n".join(kept)


def result_from_diagnostics(diagnostics: Sequence[Diagnostic]) -> CheckResult:
    status = classify(diagnostics)
    if status is Status.COMPLETE:
        return CheckResult(status=status, goal_state=COMPLETE_STATE)
    if status is Status.INCOMPLETE:
        goal_texts = []
        for diag in diagnostics:
            if diag.severity == "error" and diag.text.startswith(UNSOLVED_GOALS_PREFIX):
                remainder = diag.text[len(UNSOLVED_GOALS_PREFIX) :].lstrip("\n")
                goal_texts.append(strip_case_labels(remainder))
        raw = "\n\n".join(goal_texts)
        return CheckResult(status=status, goal_state=parse_proof_state(raw))
    first_error = next(
        d
        for d in diagnostics
        if d.severity == "error" and not d.text.startswith(UNSOLVED_GOALS_PREFIX)
    )
    return CheckResult(
        status=status, message=first_error.text, error_position=first_error.position
    )


@dataclass
class ReplConfig:
    """Configuration for the persistent REPL subprocess."""

    project_root: Path
    command: tuple[str, ...] = ("lake", "env", "repl")
    prelude: str | None = None
    startup_timeout: float = 120.0
    check_timeout: float = 30.0


class LeanReplChecker:
    """Serial client for a REPL subprocess speaking line-delimited JSON.

    Requests carry the command text and an environment id; responses carry a
    list of diagnostics and the new environment id. Exactly one request is in
    flight at any time; run one instance per session for concurrency. Every
    check re-runs the full tactic list in a fresh environment derived from the
    prelude, never reusing incremental proof state.
    """

    def __init__(self, config: ReplConfig) -> None:
        self._config = config
        self._proc: subprocess.Popen[str] | None = None
        self._lines: queue.Queue[str | None] = queue.Queue()
        self._base_env: int | None = None
        self._lock = threading.Lock()

    def start(self) -> None:
        try:
            self._proc = subprocess.Popen(
                list(self._config.command),
                cwd=self._config.project_root,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
                text=True,
                encoding="utf-8",
            )
        except OSError as exc:
            raise BackendUnavailable(f"cannot launch checker: {exc}") from exc
        reader = threading.Thread(target=self._pump, daemon=True)
        reader.start()
        if self._config.prelude:
            response = self._roundtrip(
                {"cmd": self._config.prelude}, self._config.startup_timeout
            )
            self._base_env = response.get("env")

    def close(self) -> None:
        if self._proc is not None:
            self._proc.terminate()
            self._proc = None

    def _pump(self) -> None:
        assert self._proc is not None and self._proc.stdout is not None
        for line in self._proc.stdout:
            self._lines.put(line)
        self._lines.put(None)

    def _roundtrip(self, payload: dict, timeout: float) -> dict:
        if self._proc is None or self._proc.stdin is None:
            raise BackendUnavailable("checker process is not running")
        try:
            self._proc.stdin.write(json.dumps(payload, ensure_ascii=False) + "\n\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise BackendUnavailable(f"checker process died: {exc}") from exc
        buffer = ""
        while True:
            try:
                line = self._lines.get(timeout=timeout)
            except queue.Empty:
                raise BackendUnavailable("checker response timed out") from None
            if line is None:
                raise BackendUnavailable("checker process closed its output")
            buffer += line
            stripped = buffer.strip()
            if not stripped:
                continue
            try:
                return json.loads(stripped)
            except json.JSONDecodeError:
                continue

    def check(self, request: CheckRequest) -> CheckResult:
        with self._lock:
            if self._proc is None:
                self.start()
            payload: dict = {"cmd": request.source}
            if self._base_env is not None:
                payload["env"] = self._base_env
            response = self._roundtrip(payload, self._config.check_timeout)
        diagnostics = []
        for message in response.get("messages", ()):
            pos = message.get("pos") or {}
            end = message.get("endPos") or {}
            diagnostics.append(
                Diagnostic(
                    severity=message.get("severity", "error"),
                    text=message.get("data", ""),
                    position=(pos["line"], pos["column"]) if pos else None,
                    end_position=(end["line"], end["column"]) if end else None,
                )
            )
        return result_from_diagnostics(diagnostics)


def _result_to_record(result: CheckResult) -> dict:
    if result.status is Status.COMPLETE:
        return {"status": "complete"}
    if result.status is Status.INCOMPLETE:
        assert result.goal_state is not None
        return {"status": "incomplete", "goals": result.goal_state.raw}
    record: dict = {"status": "error", "message": result.message}
    if result.error_position is not None:
        record["position"] = list(result.error_position)
    return record


def _result_from_record(record: dict) -> CheckResult:
    status = Status(record["status"])
    if status is Status.COMPLETE:
        return CheckResult(status=status, goal_state=COMPLETE_STATE)
    if status is Status.INCOMPLETE:
        return CheckResult(status=status, goal_state=parse_proof_state(record["goals"]))
    position = record.get("position")
    return CheckResult(
        status=status,
        message=record["message"],
        error_position=tuple(position) if position else None,
    )


@dataclass
class FixtureChecker:
    """Replay checker backed by recorded (theorem, tactic list) results.

    Unknown keys raise :class:`BackendUnavailable` rather than guessing, so a
    test that drifts from its fixtures fails loudly.
    """

    records: dict[tuple[str, tuple[str, ...]], CheckResult] = field(default_factory=dict)

    @classmethod
    def from_file(cls, path: Path | str) -> "FixtureChecker":
        records = {}
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            entry = json.loads(line)
            key = (entry["theorem"], tuple(entry["tactics"]))
            records[key] = _result_from_record(entry["result"])
        return cls(records=records)

    def add(self, theorem: str, tactics: Sequence[str], result: CheckResult) -> None:
        self.records[(theorem, tuple(tactics))] = result

    def check(self, request: CheckRequest) -> CheckResult:
        name = theorem_name_from_header(request.theorem_header)
        key = (name, request.tactics)
        if key not in self.records:
            raise BackendUnavailable(
                f"no recorded result for {name} with tactics {list(request.tactics)}"
            )
        return self.records[key]


class RecordingChecker:
    """Wrap a live checker and append every result to a fixture manifest."""

    def __init__(self, inner, path: Path | str) -> None:
        self._inner = inner
        self._path = Path(path)

    def check(self, request: CheckRequest) -> CheckResult:
        result = self._inner.check(request)
        entry = {
            "theorem": theorem_name_from_header(request.theorem_header),
            "tactics": list(request.tactics),
            "result": _result_to_record(result),
        }
        with self._path.open("a", encoding="utf-8") as handle:
            handle.write(json.dumps(entry, ensure_ascii=False) + "\n")
        return result


def write_fixture_file(
    path: Path | str,
    entries: Iterable[tuple[str, Sequence[str], CheckResult]],
) -> None:
    lines = []
    for theorem, tactics, result in entries:
        record = {
            "theorem": theorem,
            "tactics": list(tactics),
            "result": _result_to_record(result),
        }
        lines.append(json.dumps(record, ensure_ascii=False))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
