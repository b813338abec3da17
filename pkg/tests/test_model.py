from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from proof_tutor.model import (
    AnnotatedProof,
    GoalCase,
    Label,
    MalformedState,
    Persona,
    ProofStep,
    TheoremSpec,
    extract_free_variables,
    parse_proof_state,
)

NU = "ℕ"
TS = "⊢"


def test_parse_single_case_state():
    state = parse_proof_state(f"n : {NU}\nh : 1 ≤ n\n{TS} n + 0 = n")
    assert len(state.cases) == 1
    case = state.cases[0]
    assert case.hypothesis_lines == (f"n : {NU}", "h : 1 ≤ n")
    assert case.goal_line == f"{TS} n + 0 = n"
    assert case.free_variables == ("n", "h")


def test_empty_text_is_completed_proof():
    assert parse_proof_state("").cases == ()
    assert parse_proof_state("  \n ").cases == ()
    assert parse_proof_state("").is_complete


def test_two_blank_separated_blocks_are_two_cases():
    # Mirrors what induction renders: a goal-only base case, then the
    # successor case with its context.
    raw = f"{TS} 0 + 0 = 0\n\nd : {NU}\nhd : 0 + d = d\n{TS} 0 + succ d = succ d"
    state = parse_proof_state(raw)
    assert len(state.cases) == 2
    assert state.cases[0].free_variables == ()
    assert state.cases[1].free_variables == ("d", "hd")


def test_new_case_starts_after_turnstile_even_without_blank_line():
    raw = f"{TS} goal one\nd : {NU}\n{TS} goal two"
    state = parse_proof_state(raw)
    assert len(state.cases) == 2
    assert state.cases[1].hypothesis_lines == (f"d : {NU}",)


def test_case_without_turnstile_is_malformed():
    with pytest.raises(MalformedState):
        parse_proof_state(f"{TS} fine\n\nh : {NU}\nno goal here")


def test_hypothesis_line_without_colon_is_malformed():
    with pytest.raises(MalformedState):
        parse_proof_state(f"case succ\nd : {NU}\n{TS} goal")


def test_render_round_trips_canonical_text():
    raw = f"{TS} 0 + 0 = 0\n\nd : {NU}\nhd : 0 + d = d\n{TS} 0 + succ d = succ d"
    assert parse_proof_state(raw).render() == raw


def test_extract_free_variables_multi_name_binder():
    assert extract_free_variables([f"a b : {NU}"]) == ["a", "b"]


def test_extract_free_variables_examples():
    assert extract_free_variables([f"m : {NU}", "hm : 1 ≤ m"]) == ["m", "hm"]
    assert extract_free_variables([]) == []


def test_extract_free_variables_requires_colon():
    with pytest.raises(MalformedState):
        extract_free_variables(["no colon line"])


def test_extract_free_variables_deduplicates_in_order():
    assert extract_free_variables([f"a : {NU}", f"a b : {NU}"]) == ["a", "b"]


_name = st.text(alphabet="abcdefgh", min_size=1, max_size=3)


@given(st.lists(st.tuples(st.lists(_name, min_size=1, max_size=3), _name), min_size=1, max_size=4))
def test_parse_round_trip_on_generated_states(cases):
    blocks = []
    for names, goal_term in cases:
        lines = [f"{name} : {NU}" for name in names]
        lines.append(f"{TS} {goal_term} = {goal_term}")
        blocks.append("\n".join(lines))
    raw = "\n\n".join(blocks)
    state = parse_proof_state(raw)
    assert len(state.cases) == len(cases)
    assert state.render() == raw


@given(st.lists(_name, min_size=0, max_size=6))
def test_free_variable_extraction_is_duplicate_free(names):
    lines = [f"{name} : {NU}" for name in names]
    result = extract_free_variables(lines)
    assert len(result) == len(set(result))
    # order-stable: first appearance wins
    seen = []
    for name in names:
        if name not in seen:
            seen.append(name)
    assert result == seen


def test_theorem_spec_requires_proof_entry_marker():
    with pytest.raises(ValueError):
        TheoremSpec(name="x", statement_nl="", statement_fl="theorem x : T", world="W", order_index=0)


def test_proof_step_rejects_comment_residue_and_newlines():
    with pytest.raises(ValueError):
        ProofStep(nl="-- leftover", tactic="rfl")
    with pytest.raises(ValueError):
        ProofStep(nl="fine", tactic="rfl\nrfl")


def test_annotated_proof_invariants():
    theorem = TheoremSpec(
        name="t", statement_nl="", statement_fl="theorem t : A := by", world="W", order_index=0
    )
    step = ProofStep(nl="do it", tactic="rfl")
    with pytest.raises(ValueError):
        AnnotatedProof(theorem=theorem, steps=(), persona=Persona.STAFF_SOLUTION, label=Label.CORRECT)
    with pytest.raises(ValueError):
        AnnotatedProof(
            theorem=theorem, steps=(step,), persona=Persona.EQUATION_BASED, label=Label.INCORRECT
        )
    proof = AnnotatedProof(
        theorem=theorem,
        steps=(step,),
        persona=Persona.EQUATION_BASED,
        label=Label.INCORRECT,
        skipped_index=2,
    )
    assert proof.skipped_index == 2


def test_goal_case_text_joins_lines():
    case = GoalCase(
        hypothesis_lines=(f"a : {NU}",), goal_line=f"{TS} a = a", free_variables=("a",)
    )
    assert case.text == f"a : {NU}\n{TS} a = a"
