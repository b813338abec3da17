"""Step-by-step (and whole-proof) autoformalization of student proofs.

Each natural-language step is turned into one Lean tactic by a single LLM
query, appended to the previously accepted tactics, and compiled. The run
stops at the first checker error; the erroring entry stays in the trace so
feedback generation can quote the compiler evidence. A checker error is
attributed to the student step even though it may in fact be an
autoformalization error; the raw result is kept so downstream consumers can
hedge.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .checker import CheckRequest, CheckResult, Status
from .dataset import PremiseDictionary, serialize_annotated_proof
from .llm import BackendError, LLMBackend, PromptBundle, PromptKnobs, TemplateError
from .model import AnnotatedProof, TheoremSpec


class FormatError(ValueError):
    """The backend's raw output could not be reduced to usable tactics."""


@dataclass(frozen=True)
class FewShotExample:
    input: str
    output: str


# Default few-shot examples for single-step formalization.
STEP_EXAMPLES: tuple[FewShotExample, ...] = (
    FewShotExample(
        input=(
            "Rewrite the LHS pred (succ a) with the given statement that "
            "succ a = succ b, LHS is now pred (succ b)"
        ),
        output="rw [h]",
    ),
    FewShotExample(
        input=(
            "Rewrite LHS using the commutative property of addition, "
            "changing a + (b + c) to a + b + c"
        ),
        output="rw [← add_assoc]",
    ),
    FewShotExample(
        input=(
            "Assume that the hypothesis 'h' is true, that is, a + succ d = 0. "
            "The goal now is to prove that a = 0."
        ),
        output="rw [add_zero] at h",
    ),
    FewShotExample(
        input=(
            "Split the natural number 'b' into two cases: 'b' is zero, and "
            "'b' is the successor of another natural number 'd'."
        ),
        output="cases b with d",
    ),
    FewShotExample(
        input="Use the case of a + b to simplify the goal to equal z = x + (a + b).",
        output="use a + b",
    ),
)

# Default few-shot examples for whole-proof formalization.
WHOLE_PROOF_EXAMPLES: tuple[FewShotExample, ...] = (
    FewShotExample(
        input=(
            "Induct on b, with d = 0 as the base case and the inductive hypothesis "
            "a * d = d * a. There are now two proof goals, prove base case: "
            "a * 0 = 0 * a, and inductive step: a * succ d = succ d * a.\n"
            "First we prove base case.\n"
            "Simplify RHS 0 * a to 0.\n"
            "Simplify LHS a * 0 to 0.\n"
            "Prove LHS and RHS are equal, 0 = 0, completing base case.\n"
            "Next prove inductive step. Rewrite RHS succ d * a to d * a + a.\n"
            "Rewrite the RHS from d * a + a to a * d + a using the inductive hypothesis.\n"
            "Rewrite the LHS, changing a * succ d to a * d + a.\n"
            "Prove LHS and RHS are equal, a * d + a = a * d + a, completing the proof."
        ),
        output=(
            "induction b with d hd\n"
            "rw [zero_mul]\n"
            "rw [mul_zero]\n"
            "rfl\n"
            "rw [succ_mul]\n"
            "rw [← hd]\n"
            "rw [mul_succ]\n"
            "rfl"
        ),
    ),
    FewShotExample(
        input=(
            "We must assume succ (succ 0) + succ (succ 0) = succ (succ (succ (succ (succ 0)))) "
            "and derive a contradiction or falsehood.\n"
            "Using our previous theorems, we can change succ (succ 0) + succ (succ 0) into "
            "succ (succ (succ (succ 0))).\n"
            "By the injectivity of succ, we know that 0 = succ 0. 0 is not equal to the "
            "successor of any natural number, so we have a contradiction.\n"
            "Thus, we have a falsehood/contradiction, which is what we wanted to show."
        ),
        output=(
            "intro h\n"
            "rw [add_succ, add_succ, add_zero] at h\n"
            "repeat apply succ_inj at h\n"
            "apply zero_ne_succ at h\n"
            "exact h"
        ),
    ),
    FewShotExample(
        input=(
            "We consider the case where the successor of x is less than or equal to the "
            "successor of y. This implies that the successor of y is equal to the successor "
            "of x plus some natural number d.\n"
            "We assume d as the difference such that when added to x results in y. The goal "
            "now is to prove that y is equal to x plus d.\n"
            "We rewrite the right-hand side of succ y = succ x + d using the theorem that "
            "states the the successor of a sum of two natural numbers is the same as the "
            "successor of the first number added to the second number.\n"
            "We apply the property that if two natural numbers with successors are equal, "
            "then the original numbers are also equal.\n"
            "We have shown that x = y + d, so we can use this to prove the goal."
        ),
        output=(
            "cases hx with d hd\n"
            "use d\n"
            "rw [succ_add] at hd\n"
            "apply succ_inj at hd\n"
            "exact hd"
        ),
    ),
    FewShotExample(
        input=(
            "We use proof by contraposition. So, we assume succ m = succ n and show m = n.\n"
            "By the injectivity of succ, we have m = n.\n"
            "So, m = n, which is exactly what we wanted to show."
        ),
        output="contrapose! h\napply succ_inj at h\nexact h",
    ),
    FewShotExample(
        input=(
            "Rewrite the expression for the square of (a + b), a^2, and b^2 to be "
            "(a + b) * (a + b), a * a, and b * b respectively.\n"
            "Rearrange the terms on the right hand side of the equation, swapping the order "
            "of b * b and 2 * a * b. This is based on the commutative property of addition, "
            "which states that the order of the terms does not change the result of the "
            "addition.\n"
            "Rewrite the left-hand side of the equation using the distributive property of "
            "multiplication over addition. This expands (a + b) * (a + b) to "
            "a * a + b * a + a * b + b * b.\n"
            "Rewrite the term 2 * a * b in the goal as (a * b + a * b) using the theorem "
            "that 2 times a number is the same as the number added to itself. Also, rewrite "
            "the term a * b + b * b as (a * b + a * b) + b * b using the theorem that the "
            "product of a sum is the sum of the products.\n"
            "We rewrite the expression a * b as b * a in the goal. This is based on the "
            "commutative property of multiplication, which states that the order of the "
            "factors does not change the product. This results in the new goal: "
            "a * a + a * b + (a * b + b * b) = a * a + (a * b + a * b) + b * b.\n"
            "We use the theorem that states the associativity of addition twice to "
            "rearrange the left-hand side of the equation. This changes the goal to proving "
            "that a * a + a * b + a * b + b * b equals a * a + a * b + a * b + b * b.\n"
            "The goal is now to prove that a * a + a * b + a * b + b * b = "
            "a * a + a * b + a * b + b * b, which is true by reflexivity"
        ),
        output=(
            "rw [pow_two, pow_two, pow_two]\n"
            "rw [add_right_comm]\n"
            "rw [mul_add, add_mul, add_mul]\n"
            "rw [two_mul, add_mul]\n"
            "rw [mul_comm b a]\n"
            "rw [← add_assoc, ← add_assoc]\n"
            "rfl"
        ),
    ),
)

_STEP_SYSTEM_TEMPLATE = """An undergraduate student is proving the following Peano Arithmetic theorem:
Theorem statement in natural language: {theorem_statement_nl}
Theorem statement in formal language: {theorem_statement_fl}
Convert the student's natural language mathematical proof step to Lean4 syntax.
{staff_block}These are the formal theorems you have access to:
{theorem_dict}

These are the Lean tactics you have access to:
{tactic_dict}

Your response must be written as a single line of Lean tactic code, as used in the body of a by block of a Lean theorem.It should match the structure of Lean DSL tactic proofs, such as:
intro h
rw [← is_zero_succ a]
apply succ_inj at h
exact h
contrapose! h

Note: Only 1 lean tactic, do not write multiple lean tactics that are comma seperated.
DO *NOT* wrap your answer in markdown syntax, e.g. '''lean '''. It must be simply a Lean tactic script that can be inserted into a proof.

Here are some examples. NOTE: These are just examples. The correct Lean4 code may not necessarily use the propositions shown in these proofs.

{examples}"""

_WHOLE_SYSTEM_TEMPLATE = """An undergraduate student is proving the following Peano Arithmetic theorem:
Theorem statement in natural language: {theorem_statement_nl}
Theorem statement in formal language: {theorem_statement_fl}

Convert the student's natural language mathematical proof to Lean4 syntax.

{staff_block}These are the formal theorems you have access to:
{theorem_dict}

These are the Lean tactics you have access to:
{tactic_dict}

Your response must be written as a proof in Lean, in a list of tactics on each new line. SUch as:
intro h
rw [← is_zero_succ a]
apply succ_inj at h
exact h
contrapose! h

Each tactic must be formatted consistently with Lean4's syntax and DO NOT include any comments in the list.
DO *NOT* wrap your answer in markdown syntax, e.g. '''lean '''. It must be simply a list of Lean tactics separated by \\n.

Here are some examples. NOTE: These are just examples. The correct Lean4 code may not necessarily use the propositions shown in these proofs.

{examples}"""

_STAFF_BLOCK_TEMPLATE = """This is one example of the completed proof in Lean4, with in-line comments of the natural language proof corresponding to the Lean4 syntax:
{staff_solution}

"""

_STEP_USER_TEMPLATE = "The natural-language statement to formalize is:\n{nl_statement}"

_WHOLE_USER_TEMPLATE = "The natural language proof that we want to formalize:\n{nl_statement}"


def _render_examples(examples: Sequence[FewShotExample]) -> str:
    parts = []
    for i, example in enumerate(examples, start=1):
        parts.append(f"Example {i}:\nInput: {example.input}\nOutput: {example.output}")
    return "\n\n".join(parts)


def _build_prompt(
    system_template: str,
    user_template: str,
    theorem: TheoremSpec,
    nl_statement: str,
    theorem_dict: PremiseDictionary,
    tactic_dict: PremiseDictionary,
    examples: Sequence[FewShotExample],
    staff_solution: AnnotatedProof | None,
    knobs: PromptKnobs,
) -> PromptBundle:
    if len(examples) != 5:
        raise TemplateError(f"exactly 5 few-shot examples are required, got {len(examples)}")
    staff_block = ""
    if staff_solution is not None:
        staff_block = _STAFF_BLOCK_TEMPLATE.format(
            staff_solution=serialize_annotated_proof(staff_solution).rstrip("\n")
        )
    try:
        system = system_template.format(
            theorem_statement_nl=theorem.statement_nl,
            theorem_statement_fl=theorem.statement_fl,
            staff_block=staff_block,
            theorem_dict=theorem_dict.render(),
            tactic_dict=tactic_dict.render(),
            examples=_render_examples(examples),
        )
        user = user_template.format(nl_statement=nl_statement)
    except (KeyError, IndexError) as exc:
        raise TemplateError(f"prompt placeholder missing: {exc}") from exc
    return PromptBundle(system=system, user=user, knobs=knobs)


def build_step_prompt(
    theorem: TheoremSpec,
    nl_step: str,
    theorem_dict: PremiseDictionary,
    tactic_dict: PremiseDictionary,
    examples: Sequence[FewShotExample] = STEP_EXAMPLES,
    staff_solution: AnnotatedProof | None = None,
    knobs: PromptKnobs = PromptKnobs(),
) -> PromptBundle:
    return _build_prompt(
        _STEP_SYSTEM_TEMPLATE,
        _STEP_USER_TEMPLATE,
        theorem,
        nl_step,
        theorem_dict,
        tactic_dict,
        examples,
        staff_solution,
        knobs,
    )


def build_whole_proof_prompt(
    theorem: TheoremSpec,
    nl_proof: Sequence[str],
    theorem_dict: PremiseDictionary,
    tactic_dict: PremiseDictionary,
    examples: Sequence[FewShotExample] = WHOLE_PROOF_EXAMPLES,
    staff_solution: AnnotatedProof | None = None,
    knobs: PromptKnobs = PromptKnobs(),
) -> PromptBundle:
    return _build_prompt(
        _WHOLE_SYSTEM_TEMPLATE,
        _WHOLE_USER_TEMPLATE,
        theorem,
        "\n".join(nl_proof),
        theorem_dict,
        tactic_dict,
        examples,
        staff_solution,
        knobs,
    )


_FENCES = ("```lean", "```lean4", "```", "'''lean", "'''")


def _strip_fences(raw: str) -> str:
    text = raw.strip()
    for fence in _FENCES:
        if text.startswith(fence):
            text = text[len(fence) :]
            break
    for fence in _FENCES:
        if text.rstrip().endswith(fence):
            text = text.rstrip()[: -len(fence)]
            break
    return text.strip()


def _has_toplevel_comma(line: str) -> bool:
    depth = 0
    for ch in line:
        if ch in "[(":
            depth += 1
        elif ch in "])":
            depth = max(0, depth - 1)
        elif ch == "," and depth == 0:
            return True
    return False


def sanitize_tactic(raw: str) -> str:
    """Reduce raw backend output to a single tactic line.

    Markdown fences and surrounding whitespace are stripped, only the first
    line is kept, and comma-joined multi-tactic lines are rejected because the
    prompt demands exactly one tactic.
    """
    text = _strip_fences(raw)
    first_line = text.split("\n", 1)[0].strip()
    if not first_line:
        raise FormatError("backend returned no tactic")
    if _has_toplevel_comma(first_line):
        raise FormatError(f"comma-joined multi-tactic line: {first_line!r}")
    return first_line


class HaltReason(str, Enum):
    FINISHED = "finished"
    CHECKER_ERROR = "checker_error"
    BACKEND_ERROR = "backend_error"


@dataclass(frozen=True)
class TraceEntry:
    nl: str
    tactic: str
    result: CheckResult


@dataclass(frozen=True)
class FormalizationTrace:
    theorem: TheoremSpec
    entries: tuple[TraceEntry, ...]
    halted_at: int | None
    halt_reason: HaltReason

    @property
    def accepted_tactics(self) -> tuple[str, ...]:
        return tuple(entry.tactic for entry in self.entries)

    @property
    def failing_entry(self) -> TraceEntry | None:
        if self.halted_at is None or self.halt_reason is not HaltReason.CHECKER_ERROR:
            return None
        return self.entries[self.halted_at - 1]


@dataclass(frozen=True)
class FormalizeOptions:
    theorem_dict: PremiseDictionary
    tactic_dict: PremiseDictionary
    staff_solution: AnnotatedProof | None = None
    step_examples: tuple[FewShotExample, ...] = STEP_EXAMPLES
    whole_examples: tuple[FewShotExample, ...] = WHOLE_PROOF_EXAMPLES
    knobs: PromptKnobs = PromptKnobs()


def formalize_step_by_step(
    proof_nl: Sequence[str],
    theorem: TheoremSpec,
    llm: LLMBackend,
    checker,
    opts: FormalizeOptions,
) -> FormalizationTrace:
    """Formalize one NL step at a time, stopping at the first checker error.

    Exactly one backend query is issued per NL step (pass@1); malformed or
    missing backend output halts the trace with ``BACKEND_ERROR``.
    """
    entries: list[TraceEntry] = []
    tactics: list[str] = []
    for index, nl_step in enumerate(proof_nl, start=1):
        bundle = build_step_prompt(
            theorem,
            nl_step,
            opts.theorem_dict,
            opts.tactic_dict,
            examples=opts.step_examples,
            staff_solution=opts.staff_solution,
            knobs=opts.knobs,
        )
        try:
            raw = llm.complete(bundle)
            tactic = sanitize_tactic(raw)
        except (BackendError, FormatError):
            return FormalizationTrace(
                theorem=theorem,
                entries=tuple(entries),
                halted_at=index,
                halt_reason=HaltReason.BACKEND_ERROR,
            )
        tactics.append(tactic)
        result = checker.check(
            CheckRequest(theorem_header=theorem.statement_fl, tactics=tuple(tactics))
        )
        entries.append(TraceEntry(nl=nl_step, tactic=tactic, result=result))
        if result.status is Status.ERROR:
            return FormalizationTrace(
                theorem=theorem,
                entries=tuple(entries),
                halted_at=index,
                halt_reason=HaltReason.CHECKER_ERROR,
            )
        if result.status is Status.COMPLETE:
            break
    return FormalizationTrace(
        theorem=theorem,
        entries=tuple(entries),
        halted_at=None,
        halt_reason=HaltReason.FINISHED,
    )


def formalize_whole_proof(
    proof_nl: Sequence[str],
    theorem: TheoremSpec,
    llm: LLMBackend,
    opts: FormalizeOptions,
) -> list[str]:
    """Formalize the whole NL proof with a single backend query."""
    bundle = build_whole_proof_prompt(
        theorem,
        proof_nl,
        opts.theorem_dict,
        opts.tactic_dict,
        examples=opts.whole_examples,
        staff_solution=opts.staff_solution,
        knobs=opts.knobs,
    )
    raw = llm.complete(bundle)
    text = _strip_fences(raw)
    if "```" in text or "'''" in text:
        raise FormatError("markdown fences remain after sanitization")
    tactics = []
    for line in text.split("\n"):
        stripped = line.strip()
        if not stripped or stripped.startswith("--"):
            continue
        tactics.append(stripped)
    return tactics
