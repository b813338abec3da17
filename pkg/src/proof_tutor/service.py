"""Tutoring session engine and its HTTP face.

The engine is the only place sessions live; the HTTP layer is a thin adapter
whose every response is derivable from engine outputs. Sessions survive
restarts through an append-only journal that is replayed on startup. Student
responses never contain raw Lean: goal summaries are template-rendered from
normalized states with the var names mapped back to the original identifiers,
and tactic scripts appear only under the instructor flag.
"""

from __future__ import annotations

import json
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .autoformalize import (
    FormalizeOptions,
    FormatError,
    HaltReason,
    TraceEntry,
    build_step_prompt,
    sanitize_tactic,
)
from .checker import BackendUnavailable, CheckRequest, CheckResult, Status
from .dataset import build_dictionaries, world_premises
from .feedback import FeedbackBundle, cold_start_feedback, feedback_for_trace
from .llm import BackendError, LLMBackend, PromptKnobs
from .matching import normalize_case
from .model import AnnotatedProof, Label, Persona, ProofState, TheoremSpec
from .search import SearchConfig, forbidden_theorems, search


class UnknownTheorem(KeyError):
    pass


class UnknownSession(KeyError):
    pass


class SessionComplete(RuntimeError):
    """A step was submitted to a session that already finished."""


class SessionStatus(str):
    IN_PROGRESS = "in_progress"
    COMPLETE = "complete"
    HALTED = "halted"


@dataclass
class StepOutcome:
    verdict: str  # ok | complete | error
    nl: str
    tactic: str
    goal_summary: str | None = None
    feedback: FeedbackBundle | None = None


@dataclass
class SessionRecord:
    session_id: str
    theorem: TheoremSpec
    entries: list[TraceEntry] = field(default_factory=list)
    feedback_history: list[FeedbackBundle] = field(default_factory=list)
    status: str = SessionStatus.IN_PROGRESS
    search_log: list[str] = field(default_factory=list)


def render_goal_summary(state: ProofState) -> str:
    """Student-facing summary of what remains to show.

    Each case is normalized and the var names are mapped back, so the summary
    is exactly as renaming-robust as the metric's view of the state.
    """
    if state.is_complete:
        return "Nothing left to show. The proof is complete."
    parts = []
    for i, case in enumerate(state.cases, start=1):
        normalized = normalize_case(case)
        text = normalized.text
        for original, var in sorted(
            normalized.renaming.items(), key=lambda kv: -len(kv[1])
        ):
            text = text.replace(var, original)
        lines = text.split("\n")
        goal = lines[-1].split("⊢", 1)[-1].strip()
        given = [line.strip() for line in lines[:-1]]
        label = f"Goal {i} of {len(state.cases)}: " if len(state.cases) > 1 else ""
        sentence = f"{label}You need to show {goal}."
        if given:
            sentence += " You may use: " + "; ".join(given) + "."
        parts.append(sentence)
    return "\n".join(parts)


class TutorEngine:
    """Session logic shared by the HTTP service and the terminal tutor."""

    def __init__(
        self,
        proofs: Sequence[AnnotatedProof],
        llm: LLMBackend,
        checker,
        knobs: PromptKnobs = PromptKnobs(),
        journal_path: Path | None = None,
        descriptions: dict[str, dict[str, str]] | None = None,
        include_staff_solution: bool = True,
        search_config: SearchConfig = SearchConfig(),
    ) -> None:
        self._proofs = list(proofs)
        self._llm = llm
        self._checker = checker
        self._knobs = knobs
        self._journal_path = journal_path
        self._include_staff = include_staff_solution
        self._search_config = search_config
        descriptions = descriptions or {"theorems": {}, "tactics": {}}
        self.theorem_dict, self.tactic_dict, _ = build_dictionaries(self._proofs, descriptions)
        self._theorems: dict[str, TheoremSpec] = {}
        self._staff: dict[str, AnnotatedProof] = {}
        for proof in self._proofs:
            self._theorems.setdefault(proof.theorem.name, proof.theorem)
            if proof.persona is Persona.STAFF_SOLUTION and proof.label is Label.CORRECT:
                self._staff.setdefault(proof.theorem.name, proof)
        self.sessions: dict[str, SessionRecord] = {}
        if journal_path is not None and journal_path.exists():
            self._replay_journal()

    # -- persistence -------------------------------------------------------

    def _journal(self, event: dict) -> None:
        if self._journal_path is None:
            return
        with self._journal_path.open("a", encoding="utf-8") as handle:
            handle.write(json.dumps(event, ensure_ascii=False) + "\n")

    def _replay_journal(self) -> None:
        assert self._journal_path is not None
        for line in self._journal_path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            event = json.loads(line)
            kind = event["event"]
            if kind == "created":
                theorem = self._theorems[event["theorem"]]
                self.sessions[event["session_id"]] = SessionRecord(
                    session_id=event["session_id"], theorem=theorem
                )
            elif kind == "step":
                record = self.sessions[event["session_id"]]
                record.entries.append(
                    TraceEntry(
                        nl=event["nl"],
                        tactic=event["tactic"],
                        result=_result_from_json(event["result"]),
                    )
                )
                record.status = event["status"]
            elif kind == "feedback":
                record = self.sessions[event["session_id"]]
                record.feedback_history.append(_bundle_from_json(event["bundle"]))
            elif kind == "search":
                self.sessions[event["session_id"]].search_log.extend(event["log"])

    # -- session operations --------------------------------------------------

    def list_theorems(self) -> list[dict]:
        listed = []
        for name, theorem in sorted(self._theorems.items(), key=lambda kv: kv[1].order_index):
            listed.append(
                {
                    "name": name,
                    "world": theorem.world,
                    "order_index": theorem.order_index,
                    "statement_nl": theorem.statement_nl,
                }
            )
        return listed

    def create_session(self, theorem_name: str) -> SessionRecord:
        if theorem_name not in self._theorems:
            raise UnknownTheorem(theorem_name)
        record = SessionRecord(
            session_id=uuid.uuid4().hex, theorem=self._theorems[theorem_name]
        )
        self.sessions[record.session_id] = record
        self._journal({"event": "created", "session_id": record.session_id, "theorem": theorem_name})
        return record

    def get_session(self, session_id: str) -> SessionRecord:
        if session_id not in self.sessions:
            raise UnknownSession(session_id)
        return self.sessions[session_id]

    def _options_for(self, theorem: TheoremSpec) -> FormalizeOptions:
        staff = self._staff.get(theorem.name) if self._include_staff else None
        return FormalizeOptions(
            theorem_dict=self.theorem_dict,
            tactic_dict=self.tactic_dict,
            staff_solution=staff,
            knobs=self._knobs,
        )

    def _search_config_for(self, theorem: TheoremSpec) -> SearchConfig:
        corpus = list(self._theorems.values())
        return SearchConfig(
            branching=self._search_config.branching,
            max_depth=self._search_config.max_depth,
            forbidden=frozenset(forbidden_theorems(theorem, corpus)),
            world_premises=tuple(world_premises(self._proofs, theorem.world)),
        )

    def submit_step(self, session_id: str, nl_text: str) -> StepOutcome:
        record = self.get_session(session_id)
        if record.status != SessionStatus.IN_PROGRESS:
            raise SessionComplete(session_id)
        opts = self._options_for(record.theorem)
        bundle = build_step_prompt(
            record.theorem,
            nl_text,
            opts.theorem_dict,
            opts.tactic_dict,
            staff_solution=opts.staff_solution,
            knobs=self._knobs,
        )
        raw = self._llm.complete(bundle)
        tactic = sanitize_tactic(raw)
        tactics = tuple(entry.tactic for entry in record.entries) + (tactic,)
        result = self._checker.check(
            CheckRequest(theorem_header=record.theorem.statement_fl, tactics=tactics)
        )
        entry = TraceEntry(nl=nl_text, tactic=tactic, result=result)
        record.entries.append(entry)

        if result.status is Status.COMPLETE:
            record.status = SessionStatus.COMPLETE
            outcome = StepOutcome(verdict="complete", nl=nl_text, tactic=tactic)
        elif result.status is Status.INCOMPLETE:
            assert result.goal_state is not None
            outcome = StepOutcome(
                verdict="ok",
                nl=nl_text,
                tactic=tactic,
                goal_summary=render_goal_summary(result.goal_state),
            )
        else:
            record.status = SessionStatus.HALTED
            feedback = self._feedback_for_error(record)
            record.feedback_history.append(feedback)
            outcome = StepOutcome(verdict="error", nl=nl_text, tactic=tactic, feedback=feedback)
        self._journal(
            {
                "event": "step",
                "session_id": session_id,
                "nl": nl_text,
                "tactic": tactic,
                "result": _result_to_json(result),
                "status": record.status,
            }
        )
        if outcome.feedback is not None:
            self._journal(
                {
                    "event": "feedback",
                    "session_id": session_id,
                    "bundle": outcome.feedback.to_dict(),
                }
            )
        return outcome

    def _feedback_for_error(self, record: SessionRecord) -> FeedbackBundle:
        from .autoformalize import FormalizationTrace

        trace = FormalizationTrace(
            theorem=record.theorem,
            entries=tuple(record.entries),
            halted_at=len(record.entries),
            halt_reason=HaltReason.CHECKER_ERROR,
        )
        root_tactics = trace.accepted_tactics[:-1]
        config = self._search_config_for(record.theorem)
        result = search(root_tactics, record.theorem, config, self._llm, self._checker, self._knobs)
        record.search_log.extend(result.render_trace().split("\n") if result.trace else [])
        self._journal(
            {
                "event": "search",
                "session_id": record.session_id,
                "log": record.search_log,
            }
        )
        return feedback_for_trace(trace, result, self._llm, self._knobs)

    def request_hint(self, session_id: str) -> FeedbackBundle:
        record = self.get_session(session_id)
        if record.status == SessionStatus.COMPLETE:
            raise SessionComplete(session_id)
        if not record.entries:
            staff = self._staff.get(record.theorem.name)
            bundle = cold_start_feedback(record.theorem, staff, self._llm, self._knobs)
        else:
            from .autoformalize import FormalizationTrace

            trace = FormalizationTrace(
                theorem=record.theorem,
                entries=tuple(record.entries),
                halted_at=None,
                halt_reason=HaltReason.FINISHED,
            )
            config = self._search_config_for(record.theorem)
            result = search(
                trace.accepted_tactics, record.theorem, config, self._llm, self._checker, self._knobs
            )
            bundle = feedback_for_trace(trace, result, self._llm, self._knobs)
        record.feedback_history.append(bundle)
        self._journal(
            {"event": "feedback", "session_id": session_id, "bundle": bundle.to_dict()}
        )
        return bundle

    def transcript(self, session_id: str, instructor: bool = False) -> dict:
        record = self.get_session(session_id)
        data: dict = {
            "session_id": record.session_id,
            "theorem": record.theorem.name,
            "statement_nl": record.theorem.statement_nl,
            "status": record.status,
            "steps": [
                {
                    "nl": entry.nl,
                    "status": entry.result.status.value,
                }
                for entry in record.entries
            ],
            "feedback": [bundle.to_dict() for bundle in record.feedback_history],
        }
        if instructor:
            data["trace"] = [
                {
                    "nl": entry.nl,
                    "tactic": entry.tactic,
                    "result": _result_to_json(entry.result),
                }
                for entry in record.entries
            ]
            data["search_log"] = list(record.search_log)
        return data


def _result_to_json(result: CheckResult) -> dict:
    data: dict = {"status": result.status.value}
    if result.status is Status.INCOMPLETE:
        assert result.goal_state is not None
        data["goals"] = result.goal_state.raw
    if result.status is Status.ERROR:
        data["message"] = result.message
        if result.error_position:
            data["position"] = list(result.error_position)
    return data


def _result_from_json(data: dict) -> CheckResult:
    from .checker import _result_from_record

    return _result_from_record(data)


def _bundle_from_json(data: dict) -> FeedbackBundle:
    from .feedback import categorize_error_type

    return FeedbackBundle(
        error_type=categorize_error_type(data["Type"]),
        message=data["Message"],
        question=data["Question"],
        informalization=data["Informalization"],
        raw_error_type=data["Type"],
    )


from pydantic import BaseModel


class CreateSessionBody(BaseModel):
    theorem: str


class SubmitStepBody(BaseModel):
    nl: str


def create_app(engine: TutorEngine):
    """Build the FastAPI app around an engine instance."""
    from fastapi import FastAPI, HTTPException

    app = FastAPI(title="proof-tutor session service")

    @app.get("/theorems")
    def theorems():
        return engine.list_theorems()

    @app.post("/sessions")
    def create_session(body: CreateSessionBody):
        try:
            record = engine.create_session(body.theorem)
        except UnknownTheorem:
            raise HTTPException(status_code=404, detail="unknown theorem")
        return {"session_id": record.session_id, "theorem": record.theorem.name}

    @app.post("/sessions/{session_id}/steps")
    def submit_step(session_id: str, body: SubmitStepBody):
        try:
            outcome = engine.submit_step(session_id, body.nl)
        except UnknownSession:
            raise HTTPException(status_code=404, detail="unknown session")
        except SessionComplete:
            raise HTTPException(status_code=409, detail="session already finished")
        except (BackendUnavailable, BackendError, FormatError) as exc:
            raise HTTPException(
                status_code=502, detail={"error": str(exc), "retriable": True}
            )
        data: dict = {"verdict": outcome.verdict, "nl": outcome.nl}
        if outcome.goal_summary is not None:
            data["goal_summary"] = outcome.goal_summary
        if outcome.feedback is not None:
            data["feedback"] = outcome.feedback.to_dict()
        return data

    @app.post("/sessions/{session_id}/hint")
    def request_hint(session_id: str):
        try:
            bundle = engine.request_hint(session_id)
        except UnknownSession:
            raise HTTPException(status_code=404, detail="unknown session")
        except SessionComplete:
            raise HTTPException(status_code=409, detail="session already finished")
        except (BackendUnavailable, BackendError) as exc:
            raise HTTPException(
                status_code=502, detail={"error": str(exc), "retriable": True}
            )
        return bundle.to_dict()

    @app.get("/sessions/{session_id}")
    def transcript(session_id: str, instructor: bool = False):
        try:
            return engine.transcript(session_id, instructor=instructor)
        except UnknownSession:
            raise HTTPException(status_code=404, detail="unknown session")

    return app
