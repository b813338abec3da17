from __future__ import annotations

from collections import Counter

import pytest
from hypothesis import given, strategies as st

from proof_tutor.dataset import (
    AlignmentError,
    GenerationReport,
    HeaderError,
    TooShort,
    build_dictionaries,
    extract_premise_candidates,
    generate_incorrect_set,
    parse_annotated_file,
    serialize_annotated_proof,
    skip_step,
    world_premises,
)
from proof_tutor.model import Label, Persona

from .conftest import make_proof, proof_by

NU = "ℕ"


# -- parsing ------------------------------------------------------------------


def test_parse_staff_add_comm_listing(corpus):
    proof = proof_by(corpus, "add_comm", Persona.STAFF_SOLUTION)
    assert len(proof.steps) == 8
    assert proof.steps[0].tactic == "induction b with d hd"
    assert proof.steps[0].nl.startswith("Induct on b")


def test_parse_incorrect_listing_lacks_inductive_rewrite(corpus):
    proof = proof_by(corpus, "add_comm", Persona.JUSTIFICATION_BASED, Label.INCORRECT)
    assert len(proof.steps) == 7
    assert "rw [hd]" not in proof.tactics
    assert proof.skipped_index == 7


def test_two_consecutive_tactics_is_alignment_error():
    text = f"theorem t (a : {NU}) : a = a := by\n  -- one\n  rfl\n  rfl\n"
    with pytest.raises(AlignmentError):
        parse_annotated_file(text)


def test_dangling_comment_is_alignment_error():
    text = f"theorem t (a : {NU}) : a = a := by\n  -- one\n  rfl\n  -- dangling\n"
    with pytest.raises(AlignmentError):
        parse_annotated_file(text)


def test_two_consecutive_comments_is_alignment_error():
    text = f"theorem t (a : {NU}) : a = a := by\n  -- one\n  -- two\n  rfl\n"
    with pytest.raises(AlignmentError):
        parse_annotated_file(text)


def test_missing_proof_entry_marker_is_header_error():
    with pytest.raises(HeaderError):
        parse_annotated_file(f"theorem t (a : {NU}) : a = a\n  -- one\n  rfl\n")


def test_empty_file_is_header_error():
    with pytest.raises(HeaderError):
        parse_annotated_file("")


def test_theorem_statement_comment_populates_statement_nl():
    text = (
        "-- Theorem Statement: Prove something.\n"
        f"theorem t (a : {NU}) : a = a := by\n  -- done\n  rfl\n"
    )
    proof = parse_annotated_file(text)[0]
    assert proof.theorem.statement_nl == "Prove something."


def test_inline_tactic_comments_are_stripped():
    text = f"theorem t (a : {NU}) : a = a := by\n  -- done\n  rfl -- incorrect\n"
    proof = parse_annotated_file(text)[0]
    assert proof.steps[0].tactic == "rfl"


def test_multiple_theorems_in_one_file():
    text = (
        f"theorem one (a : {NU}) : a = a := by\n  -- done\n  rfl\n\n"
        f"theorem two (b : {NU}) : b = b := by\n  -- also done\n  rfl\n"
    )
    proofs = parse_annotated_file(text)
    assert [p.theorem.name for p in proofs] == ["one", "two"]


def test_parse_serialize_round_trip(corpus):
    for proof in corpus:
        reparsed = parse_annotated_file(serialize_annotated_proof(proof))[0]
        assert reparsed.steps == proof.steps
        assert reparsed.theorem.name == proof.theorem.name
        assert reparsed.theorem.statement_fl == proof.theorem.statement_fl
        assert reparsed.theorem.statement_nl == proof.theorem.statement_nl


# -- step skipping ------------------------------------------------------------


def test_skip_step_two_step_proof_deletes_step_two():
    proof = make_proof(n_steps=2)
    out = skip_step(proof, rng_seed=0)
    assert out.skipped_index == 2
    assert out.tactics == ("tac1",)
    assert out.label is Label.INCORRECT


def test_skip_step_three_step_proof_deletes_step_two():
    out = skip_step(make_proof(n_steps=3), rng_seed=123)
    assert out.skipped_index == 2
    assert out.tactics == ("tac1", "tac3")


def test_skip_step_windows_by_length():
    windows = {2: {2}, 3: {2}, 4: {2, 3}, 5: {2, 3, 4}, 8: {5, 6, 7}}
    for n, expected in windows.items():
        seen = set()
        for seed in range(200):
            out = skip_step(make_proof(n_steps=n), rng_seed=seed)
            seen.add(out.skipped_index)
            assert len(out.steps) == n - 1
        assert seen == expected, n


def test_skip_step_preserves_order_of_survivors():
    proof = make_proof(n_steps=8)
    out = skip_step(proof, rng_seed=5)
    k = out.skipped_index
    assert out.steps == proof.steps[: k - 1] + proof.steps[k:]


def test_skip_step_never_deletes_step_one():
    for n in range(2, 12):
        for seed in range(50):
            assert skip_step(make_proof(n_steps=n), rng_seed=seed).skipped_index != 1


def test_skip_step_is_deterministic_in_seed():
    proof = make_proof(n_steps=8)
    assert skip_step(proof, 42) == skip_step(proof, 42)


def test_skip_step_rejects_one_liners():
    with pytest.raises(TooShort):
        skip_step(make_proof(n_steps=1), rng_seed=0)


def test_skip_step_rejects_incorrect_input():
    bad = skip_step(make_proof(n_steps=3), rng_seed=0)
    with pytest.raises(ValueError):
        skip_step(bad, rng_seed=0)


@given(st.integers(min_value=2, max_value=12), st.integers(min_value=0, max_value=2**32 - 1))
def test_skip_step_always_in_procedure_window(n, seed):
    out = skip_step(make_proof(n_steps=n), rng_seed=seed)
    if n in (2, 3):
        assert out.skipped_index == 2
    elif n == 4:
        assert out.skipped_index in (2, 3)
    else:
        assert out.skipped_index in (n - 3, n - 2, n - 1)


def test_monte_carlo_uniformity_for_five_steps():
    counts = Counter(
        skip_step(make_proof(n_steps=5), rng_seed=seed).skipped_index for seed in range(1000)
    )
    assert set(counts) == {2, 3, 4}
    for index in (2, 3, 4):
        assert abs(counts[index] / 1000 - 1 / 3) <= 0.05, counts


# -- incorrect-set generation ---------------------------------------------------


def _persona_corpus(persona: Persona, total: int = 75, one_liners: int = 2):
    proofs = []
    for i in range(total):
        n = 1 if i < one_liners else 2 + (i % 7)
        proofs.append(make_proof(name=f"thm{persona.value}{i}", n_steps=n, persona=persona))
    return proofs


def test_seventy_five_with_two_one_liners_yields_seventy_three_per_persona():
    eq = _persona_corpus(Persona.EQUATION_BASED)
    ju = _persona_corpus(Persona.JUSTIFICATION_BASED)
    out, report = generate_incorrect_set(eq + ju, seed=7)
    per_persona = Counter(p.persona for p in out)
    assert per_persona[Persona.EQUATION_BASED] == 73
    assert per_persona[Persona.JUSTIFICATION_BASED] == 73
    assert report.generated == 146
    assert sum(1 for _, _, reason in report.skipped if reason == "one-line proof") == 4


def test_generate_incorrect_set_excludes_staff():
    staff = [make_proof(name="s", n_steps=4, persona=Persona.STAFF_SOLUTION)]
    out, report = generate_incorrect_set(staff, seed=1)
    assert out == []
    assert report.skipped[0][2] == "staff persona excluded"


def test_generate_incorrect_set_empty_input():
    out, report = generate_incorrect_set([], seed=0)
    assert out == [] and report == GenerationReport(generated=0, skipped=())


def test_generate_incorrect_set_is_deterministic():
    proofs = [make_proof(name=f"t{i}", n_steps=3 + i) for i in range(5)]
    first, _ = generate_incorrect_set(proofs, seed=99)
    second, _ = generate_incorrect_set(proofs, seed=99)
    assert [serialize_annotated_proof(p) for p in first] == [
        serialize_annotated_proof(p) for p in second
    ]


# -- dictionaries ---------------------------------------------------------------


def test_bracket_premises_enter_theorem_dictionary(corpus, descriptions):
    theorems, tactics, report = build_dictionaries(corpus, descriptions)
    assert "add_zero" in theorems.entries
    assert "zero_add" in theorems.entries
    assert "induction" in tactics.entries
    assert "rfl" in tactics.entries
    assert "hd" in report.missing_theorems  # local hypothesis, reported not fatal


def test_dictionary_keys_match_independent_scan(corpus, descriptions):
    theorems, tactics, _ = build_dictionaries(corpus, descriptions)

    # Independent oracle: a character walk that collects bracket contents and
    # first words, with no reuse of the production lexer.
    def crude_words(text: str) -> list[str]:
        words, word = [], ""
        for ch in text:
            if ch.isalnum() or ch in "_'!?":
                word += ch
            else:
                if word:
                    words.append(word)
                word = ""
        if word:
            words.append(word)
        return words

    expected_theorems: set[str] = set()
    expected_tactics: set[str] = set()
    for proof in corpus:
        expected_theorems.add(proof.theorem.name)
        for step in proof.steps:
            words = crude_words(step.tactic)
            if words:
                expected_tactics.add(words[0])
            for chunk in step.tactic.split("[")[1:]:
                expected_theorems.update(crude_words(chunk.split("]")[0]))
            for lead in ("apply ", "exact "):
                if step.tactic.startswith(lead):
                    expected_theorems.add(crude_words(step.tactic[len(lead) :])[0])
    known_theorems = set(descriptions["theorems"])
    known_tactics = set(descriptions["tactics"])
    assert set(theorems.entries) == expected_theorems & known_theorems
    assert set(tactics.entries) == expected_tactics & known_tactics


def test_extract_premise_candidates():
    assert extract_premise_candidates("rw [add_zero]") == ("rw", ["add_zero"])
    assert extract_premise_candidates("induction b with d hd") == ("induction", [])
    assert extract_premise_candidates("apply succ_inj at h") == ("apply", ["succ_inj"])
    assert extract_premise_candidates("rw [← add_assoc, add_comm]") == (
        "rw",
        ["add_assoc", "add_comm"],
    )


def test_world_premises_collects_by_world(corpus):
    premises = world_premises(corpus, "Addition")
    assert "induction" in premises
    assert "add_succ" in premises
    assert "tauto" not in premises  # implication world only


def test_dictionary_rejects_empty_description():
    from proof_tutor.dataset import PremiseDictionary

    with pytest.raises(ValueError):
        PremiseDictionary(entries={"x": ""}, kind="theorem")
