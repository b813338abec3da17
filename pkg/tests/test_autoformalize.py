from __future__ import annotations

import pytest

from proof_tutor.autoformalize import (
    STEP_EXAMPLES,
    FormalizeOptions,
    FormatError,
    HaltReason,
    build_step_prompt,
    build_whole_proof_prompt,
    formalize_step_by_step,
    formalize_whole_proof,
    sanitize_tactic,
)
from proof_tutor.checker import Status
from proof_tutor.llm import (
    BackendError,
    CountingBackend,
    RecordingBackend,
    ReplayBackend,
    ScriptedBackend,
    TemplateError,
)
from proof_tutor.model import Label, Persona

from .conftest import proof_by


@pytest.fixture()
def opts(dictionaries) -> FormalizeOptions:
    theorems, tactics = dictionaries
    return FormalizeOptions(theorem_dict=theorems, tactic_dict=tactics)


def opts_with_staff(dictionaries, corpus, theorem_name: str) -> FormalizeOptions:
    theorems, tactics = dictionaries
    staff = proof_by(corpus, theorem_name, Persona.STAFF_SOLUTION)
    return FormalizeOptions(theorem_dict=theorems, tactic_dict=tactics, staff_solution=staff)


# -- prompts --------------------------------------------------------------------


def test_step_prompt_embeds_statements_and_dictionaries(corpus, dictionaries):
    theorems, tactics = dictionaries
    theorem = proof_by(corpus, "add_comm", Persona.EQUATION_BASED).theorem
    bundle = build_step_prompt(theorem, "Start by inducting on b", theorems, tactics)
    assert theorem.statement_nl in bundle.system
    assert theorem.statement_fl in bundle.system
    assert "add_zero:" in bundle.system
    assert "induction:" in bundle.system
    assert bundle.user.endswith("Start by inducting on b")
    assert "Example 5:" in bundle.system


def test_staff_block_present_only_when_provided(corpus, dictionaries):
    theorems, tactics = dictionaries
    proof = proof_by(corpus, "add_comm", Persona.EQUATION_BASED)
    staff = proof_by(corpus, "add_comm", Persona.STAFF_SOLUTION)
    without = build_step_prompt(proof.theorem, "x", theorems, tactics)
    with_staff = build_step_prompt(proof.theorem, "x", theorems, tactics, staff_solution=staff)
    marker = "This is one example of the completed proof in Lean4"
    assert marker not in without.system
    assert marker in with_staff.system
    assert "induction b with d hd" in with_staff.system
    assert staff.steps[0].nl in with_staff.system  # in-line comments included
    assert with_staff.user == without.user


def test_prompt_requires_exactly_five_examples(corpus, dictionaries):
    theorems, tactics = dictionaries
    theorem = proof_by(corpus, "add_comm", Persona.EQUATION_BASED).theorem
    with pytest.raises(TemplateError):
        build_step_prompt(theorem, "x", theorems, tactics, examples=STEP_EXAMPLES[:4])


def test_step_prompt_is_byte_stable(corpus, dictionaries):
    theorems, tactics = dictionaries
    proof = proof_by(corpus, "add_comm", Persona.EQUATION_BASED)
    staff = proof_by(corpus, "add_comm", Persona.STAFF_SOLUTION)
    first = build_step_prompt(proof.theorem, proof.steps[0].nl, theorems, tactics, staff_solution=staff)
    second = build_step_prompt(proof.theorem, proof.steps[0].nl, theorems, tactics, staff_solution=staff)
    assert first == second


def test_whole_prompt_joins_nl_steps(corpus, dictionaries):
    theorems, tactics = dictionaries
    proof = proof_by(corpus, "add_comm", Persona.EQUATION_BASED)
    bundle = build_whole_proof_prompt(proof.theorem, proof.nl_steps, theorems, tactics)
    for nl in proof.nl_steps:
        assert nl in bundle.user


# -- sanitization -----------------------------------------------------------------


def test_sanitize_strips_fences():
    assert sanitize_tactic("```lean\nrfl\n```") == "rfl"
    assert sanitize_tactic("'''lean rfl'''") == "rfl"


def test_sanitize_keeps_first_line():
    assert sanitize_tactic("rw [add_zero]\nrfl") == "rw [add_zero]"


def test_sanitize_rejects_comma_joined_tactics():
    with pytest.raises(FormatError):
        sanitize_tactic("intro h, rfl")


def test_sanitize_allows_commas_inside_brackets():
    assert sanitize_tactic("rw [add_succ, add_zero]") == "rw [add_succ, add_zero]"


def test_sanitize_rejects_empty():
    with pytest.raises(FormatError):
        sanitize_tactic("```lean\n```")


# -- step-by-step orchestration ----------------------------------------------------


def test_replaying_correct_proof_finishes(corpus, dictionaries, fixture_checker):
    proof = proof_by(corpus, "eq_succ_of_ne_zero", Persona.STAFF_SOLUTION)
    llm = ScriptedBackend(responses=list(proof.tactics))
    trace = formalize_step_by_step(
        proof.nl_steps, proof.theorem, llm, fixture_checker,
        opts_with_staff(dictionaries, corpus, "eq_succ_of_ne_zero"),
    )
    assert trace.halt_reason is HaltReason.FINISHED
    assert trace.halted_at is None
    assert len(trace.entries) == 4
    assert trace.entries[-1].result.status is Status.COMPLETE
    for entry in trace.entries[:-1]:
        assert entry.result.status is Status.INCOMPLETE


def test_checker_error_halts_trace(corpus, dictionaries, fixture_checker):
    proof = proof_by(corpus, "eq_succ_of_ne_zero", Persona.EQUATION_BASED, Label.INCORRECT)
    llm = ScriptedBackend(responses=list(proof.tactics))
    trace = formalize_step_by_step(
        proof.nl_steps, proof.theorem, llm, fixture_checker,
        opts_with_staff(dictionaries, corpus, "eq_succ_of_ne_zero"),
    )
    assert trace.halt_reason is HaltReason.CHECKER_ERROR
    assert trace.halted_at == 2
    assert trace.entries[-1].result.status is Status.ERROR
    assert trace.failing_entry is trace.entries[-1]


def test_empty_nl_list_is_vacuously_finished(corpus, dictionaries, fixture_checker, opts):
    theorem = proof_by(corpus, "add_comm", Persona.STAFF_SOLUTION).theorem
    llm = ScriptedBackend(responses=[])
    trace = formalize_step_by_step([], theorem, llm, fixture_checker, opts)
    assert trace.halt_reason is HaltReason.FINISHED
    assert trace.entries == ()


def test_one_llm_call_per_step(corpus, dictionaries, fixture_checker):
    proof = proof_by(corpus, "add_comm", Persona.EQUATION_BASED)
    llm = CountingBackend(ScriptedBackend(responses=list(proof.tactics)))
    trace = formalize_step_by_step(
        proof.nl_steps, proof.theorem, llm, fixture_checker,
        opts_with_staff(dictionaries, corpus, "add_comm"),
    )
    assert trace.halt_reason is HaltReason.FINISHED
    assert llm.calls == len(proof.steps)


def test_backend_failure_is_recorded_not_raised(corpus, dictionaries, fixture_checker, opts):
    proof = proof_by(corpus, "add_comm", Persona.EQUATION_BASED)

    def explode(bundle):
        raise BackendError("transport down")

    trace = formalize_step_by_step(
        proof.nl_steps, proof.theorem, ScriptedBackend(responder=explode), fixture_checker, opts
    )
    assert trace.halt_reason is HaltReason.BACKEND_ERROR
    assert trace.halted_at == 1
    assert trace.entries == ()


def test_trace_prefix_validity_is_recheckable(corpus, dictionaries, fixture_checker):
    from proof_tutor.checker import CheckRequest

    proof = proof_by(corpus, "add_comm", Persona.JUSTIFICATION_BASED, Label.INCORRECT)
    llm = ScriptedBackend(responses=list(proof.tactics))
    trace = formalize_step_by_step(
        proof.nl_steps, proof.theorem, llm, fixture_checker,
        opts_with_staff(dictionaries, corpus, "add_comm"),
    )
    assert trace.halted_at == 7
    for i in range(trace.halted_at - 1):
        result = fixture_checker.check(
            CheckRequest(
                theorem_header=proof.theorem.statement_fl,
                tactics=trace.accepted_tactics[: i + 1],
            )
        )
        assert result.status in (Status.INCOMPLETE, Status.COMPLETE)


# -- whole proof ---------------------------------------------------------------------


def test_whole_proof_single_call_and_split(corpus, dictionaries):
    proof = proof_by(corpus, "add_comm", Persona.EQUATION_BASED)
    llm = CountingBackend(ScriptedBackend(responses=["\n".join(proof.tactics)]))
    tactics = formalize_whole_proof(
        proof.nl_steps, proof.theorem, llm, opts_with_staff(dictionaries, corpus, "add_comm")
    )
    assert tactics == list(proof.tactics)
    assert llm.calls == 1


def test_whole_proof_drops_comment_lines(corpus, dictionaries, opts):
    proof = proof_by(corpus, "add_comm", Persona.EQUATION_BASED)
    llm = ScriptedBackend(responses=["-- thinking\nrfl\n\n-- more\nrfl"])
    assert formalize_whole_proof(proof.nl_steps, proof.theorem, llm, opts) == ["rfl", "rfl"]


def test_whole_proof_rejects_stubborn_fences(corpus, dictionaries, opts):
    proof = proof_by(corpus, "add_comm", Persona.EQUATION_BASED)
    llm = ScriptedBackend(responses=["rfl\n```lean\nrfl\n```\nrfl"])
    with pytest.raises(FormatError):
        formalize_whole_proof(proof.nl_steps, proof.theorem, llm, opts)


# -- replay determinism ----------------------------------------------------------------


def test_record_then_replay_is_bit_deterministic(tmp_path, corpus, dictionaries, fixture_checker):
    proof = proof_by(corpus, "add_comm", Persona.EQUATION_BASED)
    opts = opts_with_staff(dictionaries, corpus, "add_comm")
    recorder = RecordingBackend(ScriptedBackend(responses=list(proof.tactics)), tmp_path)
    formalize_step_by_step(proof.nl_steps, proof.theorem, recorder, fixture_checker, opts)

    replays = []
    for _ in range(2):
        replay = ReplayBackend(tmp_path)
        replays.append(
            formalize_step_by_step(proof.nl_steps, proof.theorem, replay, fixture_checker, opts)
        )
    assert replays[0] == replays[1]
    assert replays[0].accepted_tactics == proof.tactics
