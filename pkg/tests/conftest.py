from __future__ import annotations

import pytest

from proof_tutor.checker import FixtureChecker
from proof_tutor.config import DEFAULT_CORPUS, DEFAULT_DESCRIPTIONS, DEFAULT_FIXTURES
from proof_tutor.dataset import build_dictionaries, load_corpus, load_descriptions
from proof_tutor.model import AnnotatedProof, Label, Persona, ProofStep, TheoremSpec


@pytest.fixture(scope="session")
def corpus() -> list[AnnotatedProof]:
    return load_corpus(DEFAULT_CORPUS)


@pytest.fixture(scope="session")
def descriptions() -> dict[str, dict[str, str]]:
    return load_descriptions(DEFAULT_DESCRIPTIONS)


@pytest.fixture()
def fixture_checker() -> FixtureChecker:
    return FixtureChecker.from_file(DEFAULT_FIXTURES)


@pytest.fixture(scope="session")
def dictionaries(corpus, descriptions):
    theorems, tactics, _ = build_dictionaries(corpus, descriptions)
    return theorems, tactics


def proof_by(corpus, name: str, persona: Persona, label: Label = Label.CORRECT) -> AnnotatedProof:
    for proof in corpus:
        if proof.theorem.name == name and proof.persona is persona and proof.label is label:
            return proof
    raise LookupError(f"{name}/{persona.value}/{label.value} not in corpus")


def make_proof(
    name: str = "demo",
    n_steps: int = 4,
    order_index: int = 0,
    persona: Persona = Persona.EQUATION_BASED,
) -> AnnotatedProof:
    """Small synthetic proof for tests that only care about structure."""
    theorem = TheoremSpec(
        name=name,
        statement_nl=f"Prove {name}.",
        statement_fl=f"theorem {name} (a : ℕ) : a = a := by",
        world="Synthetic",
        order_index=order_index,
    )
    steps = tuple(
        ProofStep(nl=f"step {i} of {name}", tactic=f"tac{i}") for i in range(1, n_steps + 1)
    )
    return AnnotatedProof(theorem=theorem, steps=steps, persona=persona, label=Label.CORRECT)
