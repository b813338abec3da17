"""Natural-language feedback generation and validation.

Three feedback artifacts are produced for an erroneous proof: the error type
with a short message, a guiding question, and a bottom-out next step
(informalization). The prompt embeds the autoformalized Lean proof, the
compiler error, and the verified next tactic from the search module; the
response must be a raw four-key JSON object. Cold-start mode (student has
written nothing) extracts the first staff-solution tactic and asks only for
the question and the next step.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .autoformalize import FormalizationTrace
from .dataset import PremiseDictionary
from .llm import LLMBackend, PromptBundle, PromptKnobs, TemplateError
from .matching import identifier_tokens
from .model import AnnotatedProof, TheoremSpec
from .search import SearchResult


class ParseError(ValueError):
    """Backend output is not the expected raw JSON object."""


class ErrorCategory(str, Enum):
    INDUCTING_ON_INCORRECT_VARIABLE = "inducting-on-incorrect-variable"
    INCORRECT_BASE_CASE = "incorrect-base-case"
    NOT_GENERALIZING_INDUCTIVE_STEP = "not-generalizing-inductive-step"
    FAILING_TO_APPLY_INDUCTIVE_HYPOTHESIS = "failing-to-apply-inductive-hypothesis"
    INCORRECT_SIMPLIFICATION_OR_EXPANSION = "incorrect-simplification-or-expansion"
    CARELESS_CALCULATION = "careless-calculation"
    OTHER = "other"


NO_NEXT_STEP_MARKER = "(no verified next step found)"
NO_ERROR_MARKER = "(no error: the student has not started this proof)"


@dataclass(frozen=True)
class FeedbackBundle:
    error_type: ErrorCategory
    message: str
    question: str
    informalization: str
    raw_error_type: str | None = None

    def __post_init__(self) -> None:
        if not (self.message and self.question and self.informalization):
            raise ValueError("feedback fields must be non-empty")

    def to_dict(self) -> dict[str, str]:
        return {
            "Type": self.raw_error_type or self.error_type.value,
            "Message": self.message,
            "Question": self.question,
            "Informalization": self.informalization,
        }


@dataclass(frozen=True)
class BaselineFeedback:
    error_message: str
    next_step: str
    question: str


_FEEDBACK_SYSTEM = (
    "You are a math professor, identifying the error in student proofs, "
    "with the help of the Lean4 verifier."
)

_FEEDBACK_USER_TEMPLATE = """A first-year math student's incomplete Peano Arithmetic proof has been formalized in Lean4, but it has an error.
This is the incorrect student proof in Lean4:

{lean_proof}

This is the current Lean4 state, throwing an error due to the last step {last_line}:

{error}

The actual correct step in Lean4 is:

{next_step}

Error Categories include:
1. Inducting on the incorrect variable
2. Selecting the incorrect base case
3. Not generalizing the inductive step to all cases
4. Failing to apply the inductive hypothesis
5. Incorrect/Incomplete simplification or expansion
6. Incorrect calculation or careless mistake
7. Other

Explain the student error, ask a guiding question to reach correct next step, and give a hint that explicitly reveals the answer in 1-2 sentences. Be specific and use equations from goal states.

DO NOT USE any "Lean" or any Lean tactics or syntax such as "tactic" or "reflexivity" or theorems such as "add_comm". You are speaking directly to the student, use "You" language.

Example:

Type: Incorrect simplification
Message: The RHS of your equation, a + (b + succ d), cannot be simplified with your applied strategy.
Question/Hint: Do you know of a theorem that can perform this simplification?
Informalization: The next step is to rewrite a + (b + succ d) as (a + b) + succ d.

IMPORTANT: Respond with ONLY a raw JSON object in the following format, without any code block formatting or additional text:
{{
"Type": "Students' error type",
"Message": "Brief description of error in this problem",
"Question": "Do you....?",
"Informalization": "The next step is to..."
}}"""

_COLD_START_USER_TEMPLATE = """A first-year math student does not know how to start their Peano Arithmetic proof of the following theorem:

{theorem_nl}

The correct first step of the proof, in Lean4, is:

{next_step}

Ask a guiding question that helps the student find this first step on their own, and give a hint that explicitly reveals the first step in 1-2 sentences.

DO NOT USE any "Lean" or any Lean tactics or syntax such as "tactic" or "reflexivity" or theorems such as "add_comm". You are speaking directly to the student, use "You" language.

IMPORTANT: Respond with ONLY a raw JSON object in the following format, without any code block formatting or additional text:
{{
"Question": "Do you....?",
"Informalization": "The first step is to..."
}}"""

_BASELINE_SYSTEM = "You are a math professor helping a student debug their Peano Arithmetic proof."

_BASELINE_USER_TEMPLATE = """A first-year math student is working on the following Peano Arithmetic theorem:
{theorem}

Below are the steps of the proof the student has completed thus far. There may be errors and/or the work may be incomplete:
{proof}

Identify and explain the student error, if it exists. Then, identify the correct next step. Ask a guiding question or give a hint that can help the student reach the correct next step in 1-2 sentences. Be specific.

Speak directly to the student using "You" language. Avoid using Lean tactics or syntax like "apply", "intro", or "rw".

Example:
Error Message: The RHS of your equation, a + (b + succ d), cannot be simplified with your applied strategy.
Next Step: The next step is to rewrite a + (b + succ d) as (a + b) + succ d.
Question/Hint: Do you know of a theorem that can perform this simplification?

IMPORTANT: Respond with ONLY a raw JSON object in the following format, without any code block formatting or additional text:
{{
"Error_Message": "Brief description of error in this problem",
"Next_Step": "The next step is to...",
"Question": "Do you....?"
}}"""


def build_feedback_prompt(
    lean_proof: str,
    error: str,
    next_step: str,
    knobs: PromptKnobs = PromptKnobs(),
) -> PromptBundle:
    """Fill the feedback template; the last proof line is quoted as the culprit."""
    lines = [line for line in lean_proof.strip().split("\n") if line.strip()]
    last_line = lines[-1].strip() if lines else ""
    try:
        user = _FEEDBACK_USER_TEMPLATE.format(
            lean_proof=lean_proof,
            last_line=last_line,
            error=error,
            next_step=next_step or NO_NEXT_STEP_MARKER,
        )
    except (KeyError, IndexError) as exc:
        raise TemplateError(f"prompt placeholder missing: {exc}") from exc
    return PromptBundle(system=_FEEDBACK_SYSTEM, user=user, knobs=knobs)


def build_cold_start_prompt(
    theorem: TheoremSpec,
    staff: AnnotatedProof,
    knobs: PromptKnobs = PromptKnobs(),
) -> PromptBundle:
    user = _COLD_START_USER_TEMPLATE.format(
        theorem_nl=theorem.statement_nl or theorem.statement_fl,
        next_step=staff.steps[0].tactic,
    )
    return PromptBundle(system=_FEEDBACK_SYSTEM, user=user, knobs=knobs)


def build_baseline_prompt(
    theorem_nl: str,
    proof_nl: Sequence[str],
    knobs: PromptKnobs = PromptKnobs(),
) -> PromptBundle:
    user = _BASELINE_USER_TEMPLATE.format(theorem=theorem_nl, proof="\n".join(proof_nl))
    return PromptBundle(system=_BASELINE_SYSTEM, user=user, knobs=knobs)


# Each category is matched by any one needle group; a group matches when all
# of its needles occur in the folded text.
_CATEGORY_HINTS: tuple[tuple[ErrorCategory, tuple[tuple[str, ...], ...]], ...] = (
    (ErrorCategory.INDUCTING_ON_INCORRECT_VARIABLE, (("induct", "variable"),)),
    (ErrorCategory.INCORRECT_BASE_CASE, (("base case",),)),
    (ErrorCategory.NOT_GENERALIZING_INDUCTIVE_STEP, (("generaliz",),)),
    (ErrorCategory.FAILING_TO_APPLY_INDUCTIVE_HYPOTHESIS, (("hypothesis",),)),
    (ErrorCategory.INCORRECT_SIMPLIFICATION_OR_EXPANSION, (("simplif",), ("expan",))),
    (ErrorCategory.CARELESS_CALCULATION, (("calculat",), ("careless",))),
)


def categorize_error_type(raw_type: str) -> ErrorCategory:
    """Fuzzy, case- and punctuation-insensitive mapping onto the closed enum."""
    folded = re.sub(r"[^a-z ]", " ", raw_type.lower())
    folded = re.sub(r"\s+", " ", folded).strip()
    for category, groups in _CATEGORY_HINTS:
        if any(all(needle in folded for needle in group) for group in groups):
            return category
    return ErrorCategory.OTHER


def _strip_json_fences(raw: str) -> str:
    text = raw.strip()
    if text.startswith("```"):
        text = text.split("\n", 1)[1] if "\n" in text else ""
        if text.rstrip().endswith("```"):
            text = text.rstrip()[:-3]
    return text.strip()


def _parse_json_object(raw: str, required_keys: tuple[str, ...]) -> dict[str, str]:
    text = _strip_json_fences(raw)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"feedback is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ParseError("feedback must be a JSON object")
    missing = [key for key in required_keys if key not in data]
    if missing:
        raise ParseError(f"feedback object missing keys: {missing}")
    extra = [key for key in data if key not in required_keys]
    if extra:
        raise ParseError(f"feedback object has unexpected keys: {extra}")
    return {key: str(data[key]) for key in required_keys}


def parse_feedback(raw: str) -> FeedbackBundle:
    fields = _parse_json_object(raw, ("Type", "Message", "Question", "Informalization"))
    category = categorize_error_type(fields["Type"])
    return FeedbackBundle(
        error_type=category,
        message=fields["Message"],
        question=fields["Question"],
        informalization=fields["Informalization"],
        # Keep the backend's own wording only when it differs from ours.
        raw_error_type=None if fields["Type"] == category.value else fields["Type"],
    )


def parse_baseline_feedback(raw: str) -> BaselineFeedback:
    fields = _parse_json_object(raw, ("Error_Message", "Next_Step", "Question"))
    return BaselineFeedback(
        error_message=fields["Error_Message"],
        next_step=fields["Next_Step"],
        question=fields["Question"],
    )


def feedback_for_trace(
    trace: FormalizationTrace,
    search_result: SearchResult,
    llm: LLMBackend,
    knobs: PromptKnobs = PromptKnobs(),
) -> FeedbackBundle:
    """Assemble the feedback prompt from a halted trace and a search outcome."""
    lean_proof = trace.theorem.statement_fl + "".join(
        f"\n  {tactic}" for tactic in trace.accepted_tactics
    )
    failing = trace.failing_entry
    error = failing.result.message if failing and failing.result.message else "(no error message)"
    if search_result.completion:
        next_step = search_result.completion[0]
    else:
        next_step = NO_NEXT_STEP_MARKER
    bundle = build_feedback_prompt(lean_proof, error, next_step, knobs)
    return parse_feedback(llm.complete(bundle))


def cold_start_feedback(
    theorem: TheoremSpec,
    staff: AnnotatedProof | None,
    llm: LLMBackend,
    knobs: PromptKnobs = PromptKnobs(),
) -> FeedbackBundle:
    """Hint for a student who has not started: question plus first step only.

    The next step is extracted directly from the staff solution, never
    generated, so it is correct by construction.
    """
    if staff is None:
        raise ValueError("cold-start feedback requires a staff solution")
    bundle = build_cold_start_prompt(theorem, staff, knobs)
    fields = _parse_json_object(llm.complete(bundle), ("Question", "Informalization"))
    return FeedbackBundle(
        error_type=ErrorCategory.OTHER,
        message=NO_ERROR_MARKER,
        question=fields["Question"],
        informalization=fields["Informalization"],
    )


@dataclass(frozen=True)
class LintFinding:
    field: str  # "message" | "question"
    token: str


# Tactic names that read as Lean jargon anywhere; English-homonym tactic names
# (use, cases, apply, ...) are only flagged next to a bracket or a known
# premise name, which the premise scan already catches.
_LEAN_ONLY_TACTICS = {
    "rfl",
    "rw",
    "tauto",
    "intro",
    "intros",
    "simp",
    "nth_rewrite",
    "contrapose",
    "symm",
    "omega",
    "decide",
}

_BRACKET_CALL = re.compile(r"(?<![A-Za-z0-9_'])(rw|nth_rewrite|simp)\s*\[")


def leakage_lint(
    bundle: FeedbackBundle,
    theorem_dict: PremiseDictionary,
    tactic_dict: PremiseDictionary,
) -> list[LintFinding]:
    """Find formal names leaking into the student-facing feedback fields.

    The informalization is exempt: it is the bottom-out hint and is expected
    to reveal the step.
    """
    findings: list[LintFinding] = []
    formal_names = set(theorem_dict.entries)
    jargon = _LEAN_ONLY_TACTICS | (set(tactic_dict.entries) & _LEAN_ONLY_TACTICS)
    for field_name in ("message", "question"):
        text = getattr(bundle, field_name)
        for raw_token in identifier_tokens(text):
            # Prose attaches sentence punctuation to tokens; strip it before
            # comparing against formal names.
            token = raw_token.rstrip(".!?'")
            if token in formal_names or token in jargon:
                findings.append(LintFinding(field=field_name, token=token))
        if _BRACKET_CALL.search(text):
            findings.append(LintFinding(field=field_name, token="rw ["))
    return findings


SCORING_AXES = ("Accuracy", "Relevance", "Readability", "Answer Leakage")
FEEDBACK_TYPES = ("error identification", "hint/question", "next step")


def export_scoring_sheet(proof_ids_and_bundles: Sequence[tuple[str, FeedbackBundle]]) -> str:
    """Blank 5-point scoring sheet, one row per (proof, feedback type, axis)."""
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["proof", "feedback_type", "text", "axis", "score_1_to_5"])
    for proof_id, bundle in proof_ids_and_bundles:
        texts = {
            "error identification": f"[{bundle.error_type.value}] {bundle.message}",
            "hint/question": bundle.question,
            "next step": bundle.informalization,
        }
        for feedback_type in FEEDBACK_TYPES:
            for axis in SCORING_AXES:
                writer.writerow([proof_id, feedback_type, texts[feedback_type], axis, ""])
    return out.getvalue()
