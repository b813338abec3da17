"""Aligned proof corpus tooling.

Corpus files are Lean sources where every tactic line is preceded by exactly
one ``--`` comment carrying its natural-language step; an optional
``-- Theorem Statement:`` comment precedes the header. A structured-text
manifest sidecar assigns world, curriculum order, persona, and label to each
proof, since none of those are inferrable from the prose.

The module also generates incorrect proofs by deleting one step from near the
end of a correct proof, and builds the theorem/tactic description dictionaries
used in prompts.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

from .matching import identifier_tokens
from .model import (
    AnnotatedProof,
    Label,
    Persona,
    PROOF_ENTRY_MARKER,
    ProofStep,
    TheoremSpec,
)

THEOREM_STATEMENT_PREFIX = "Theorem Statement:"


class AlignmentError(ValueError):
    """The 1:1 comment/tactic alternation of a corpus file is broken."""


class HeaderError(ValueError):
    """Missing or malformed theorem header."""


class TooShort(ValueError):
    """One-line proofs are removed from the incorrect set."""


@dataclass(frozen=True)
class CorpusFile:
    path: Path
    proofs: tuple[AnnotatedProof, ...]


@dataclass(frozen=True)
class PremiseDictionary:
    """Formal names mapped to natural-language descriptions."""

    entries: dict[str, str]
    kind: str  # "theorem" | "tactic"

    def __post_init__(self) -> None:
        if any(not desc for desc in self.entries.values()):
            raise ValueError("descriptions must be non-empty")

    def render(self) -> str:
        return "\n".join(f"{name}: {desc}" for name, desc in sorted(self.entries.items()))


def _strip_inline_comment(line: str) -> str:
    code, _, _ = line.partition("--")
    return code.strip()


def parse_annotated_file(text: str) -> list[AnnotatedProof]:
    """Parse a corpus file into proofs with placeholder metadata.

    World, order, persona, and label come from the manifest; the parser fills
    neutral defaults so the result is usable standalone.
    """
    proofs: list[AnnotatedProof] = []
    statement_nl: str | None = None
    header: str | None = None
    name: str | None = None
    pending_nl: str | None = None
    steps: list[ProofStep] = []

    def close_proof() -> None:
        nonlocal header, name, statement_nl, pending_nl, steps
        if header is None:
            return
        if pending_nl is not None:
            raise AlignmentError(f"dangling comment with no tactic in {name!r}")
        if not steps:
            raise AlignmentError(f"theorem {name!r} has no proof steps")
        theorem = TheoremSpec(
            name=name or "",
            statement_nl=statement_nl or "",
            statement_fl=header,
            world="",
            order_index=len(proofs),
        )
        proofs.append(
            AnnotatedProof(
                theorem=theorem,
                steps=tuple(steps),
                persona=Persona.STAFF_SOLUTION,
                label=Label.CORRECT,
            )
        )
        statement_nl = None
        header = None
        name = None
        steps = []

    for raw_line in text.splitlines():
        line = raw_line.strip()
        if not line:
            continue
        if line.startswith("--"):
            comment = line[2:].strip()
            if comment.startswith(THEOREM_STATEMENT_PREFIX):
                close_proof()
                statement_nl = comment[len(THEOREM_STATEMENT_PREFIX) :].strip()
                continue
            if header is None:
                raise HeaderError(f"step comment before any theorem header: {line!r}")
            if pending_nl is not None:
                raise AlignmentError(f"two consecutive comments: {pending_nl!r}, {comment!r}")
            pending_nl = comment
        elif line.startswith("theorem ") or line.startswith("lemma "):
            close_proof()
            if not line.rstrip().endswith(PROOF_ENTRY_MARKER):
                raise HeaderError(f"theorem header must end with {PROOF_ENTRY_MARKER!r}: {line!r}")
            header = line
            name = line.split()[1]
        else:
            if header is None:
                raise HeaderError(f"tactic before any theorem header: {line!r}")
            if pending_nl is None:
                raise AlignmentError(f"tactic without a preceding comment: {line!r}")
            code = _strip_inline_comment(raw_line)
            steps.append(ProofStep(nl=pending_nl, tactic=code))
            pending_nl = None
    close_proof()
    if not proofs:
        raise HeaderError("no theorem header found")
    return proofs


def serialize_annotated_proof(proof: AnnotatedProof) -> str:
    lines = []
    if proof.theorem.statement_nl:
        lines.append(f"-- {THEOREM_STATEMENT_PREFIX} {proof.theorem.statement_nl}")
    lines.append(proof.theorem.statement_fl)
    for step in proof.steps:
        lines.append(f"  -- {step.nl}")
        lines.append(f"  {step.tactic}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ManifestEntry:
    theorem: str
    world: str
    order_index: int
    persona: Persona
    file: str
    label: Label = Label.CORRECT
    skipped_index: int | None = None
    statement_nl: str | None = None


def read_manifest(path: Path | str) -> list[ManifestEntry]:
    entries = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        record = json.loads(line)
        entries.append(
            ManifestEntry(
                theorem=record["theorem"],
                world=record["world"],
                order_index=record["order_index"],
                persona=Persona(record["persona"]),
                file=record["file"],
                label=Label(record.get("label", "correct")),
                skipped_index=record.get("skipped_index"),
                statement_nl=record.get("statement_nl"),
            )
        )
    return entries


def write_manifest(path: Path | str, entries: Iterable[ManifestEntry]) -> None:
    lines = []
    for entry in entries:
        record: dict = {
            "theorem": entry.theorem,
            "world": entry.world,
            "order_index": entry.order_index,
            "persona": entry.persona.value,
            "file": entry.file,
            "label": entry.label.value,
        }
        if entry.skipped_index is not None:
            record["skipped_index"] = entry.skipped_index
        if entry.statement_nl is not None:
            record["statement_nl"] = entry.statement_nl
        lines.append(json.dumps(record, ensure_ascii=False))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_corpus(root: Path | str, manifest_name: str = "manifest.jsonl") -> list[AnnotatedProof]:
    """Load every proof listed in a corpus manifest, applying its metadata."""
    root = Path(root)
    entries = read_manifest(root / manifest_name)
    orders: dict[str, int] = {}
    for entry in entries:
        known = orders.setdefault(entry.theorem, entry.order_index)
        if known != entry.order_index:
            raise ValueError(f"conflicting order_index for theorem {entry.theorem!r}")
    by_order: dict[int, str] = {}
    for theorem, order in orders.items():
        if order in by_order and by_order[order] != theorem:
            raise ValueError(f"order_index {order} assigned to two theorems")
        by_order[order] = theorem

    proofs: list[AnnotatedProof] = []
    for entry in entries:
        parsed = parse_annotated_file((root / entry.file).read_text(encoding="utf-8"))
        matching = [p for p in parsed if p.theorem.name == entry.theorem]
        if not matching:
            raise HeaderError(f"{entry.file} does not define theorem {entry.theorem!r}")
        base = matching[0]
        theorem = replace(
            base.theorem,
            world=entry.world,
            order_index=entry.order_index,
            statement_nl=entry.statement_nl or base.theorem.statement_nl,
        )
        proofs.append(
            AnnotatedProof(
                theorem=theorem,
                steps=base.steps,
                persona=entry.persona,
                label=entry.label,
                skipped_index=entry.skipped_index,
            )
        )
    return proofs


def skip_step(proof: AnnotatedProof, rng_seed: int) -> AnnotatedProof:
    """Delete one late step from a correct proof, deterministically in the seed.

    With n steps: n in {2, 3} deletes step 2; n = 4 deletes step 3 or 2; n > 4
    deletes one of steps n-1, n-2, n-3 (uniformly). Step numbering is 1-based.
    """
    if proof.label is not Label.CORRECT:
        raise ValueError("can only skip a step of a correct proof")
    n = len(proof.steps)
    if n == 1:
        raise TooShort("one-line proofs are removed from the incorrect set")
    rng = random.Random(rng_seed)
    if n in (2, 3):
        k = 2
    elif n == 4:
        k = rng.choice([n - 1, n - 2])
    else:
        k = rng.choice([n - 1, n - 2, n - 3])
    surviving = proof.steps[: k - 1] + proof.steps[k:]
    return AnnotatedProof(
        theorem=proof.theorem,
        steps=surviving,
        persona=proof.persona,
        label=Label.INCORRECT,
        skipped_index=k,
    )


@dataclass(frozen=True)
class GenerationReport:
    generated: int
    skipped: tuple[tuple[str, str, str], ...]  # (theorem, persona, reason)


def generate_incorrect_set(
    proofs: Sequence[AnnotatedProof], seed: int
) -> tuple[list[AnnotatedProof], GenerationReport]:
    """One incorrect proof per eligible correct equation/justification proof.

    Staff solutions and one-line proofs are skipped and reported; the result
    is a pure function of the input sequence and the seed.
    """
    master = random.Random(seed)
    out: list[AnnotatedProof] = []
    skipped: list[tuple[str, str, str]] = []
    for proof in proofs:
        if proof.persona is Persona.STAFF_SOLUTION:
            skipped.append((proof.theorem.name, proof.persona.value, "staff persona excluded"))
            continue
        if proof.label is not Label.CORRECT:
            skipped.append((proof.theorem.name, proof.persona.value, "already incorrect"))
            continue
        if len(proof.steps) == 1:
            skipped.append((proof.theorem.name, proof.persona.value, "one-line proof"))
            continue
        out.append(skip_step(proof, master.getrandbits(32)))
    return out, GenerationReport(generated=len(out), skipped=tuple(skipped))


# Tokens that lex as identifiers but are tactic-argument syntax, not premises.
_ARGUMENT_KEYWORDS = {"at", "with", "to", "using", "fun", "by", "this"}


def extract_premise_candidates(tactic: str) -> tuple[str, list[str]]:
    """Split one tactic line into its tactic name and premise candidates.

    The tactic name is the first identifier token. Premise candidates are the
    identifiers inside square brackets plus the identifier right after
    ``apply`` or ``exact``; local hypothesis names slip through and surface as
    missing-description reports downstream.
    """
    tokens = identifier_tokens(tactic)
    tactic_name = tokens[0] if tokens else ""
    candidates: list[str] = []
    depth = 0
    i = 0
    previous_token: str | None = None
    while i < len(tactic):
        ch = tactic[i]
        if ch == "[":
            depth += 1
            i += 1
            continue
        if ch == "]":
            depth = max(0, depth - 1)
            i += 1
            continue
        from .matching import longest_identifier_at

        ident = longest_identifier_at(tactic, i)
        if ident is None:
            i += 1
            continue
        if depth > 0 and ident not in _ARGUMENT_KEYWORDS:
            candidates.append(ident)
        elif previous_token in ("apply", "exact") and ident not in _ARGUMENT_KEYWORDS:
            candidates.append(ident)
        previous_token = ident
        i += len(ident)
    deduped = []
    for cand in candidates:
        if cand not in deduped:
            deduped.append(cand)
    return tactic_name, deduped


@dataclass(frozen=True)
class DictionaryReport:
    missing_theorems: tuple[str, ...]
    missing_tactics: tuple[str, ...]


def load_descriptions(path: Path | str) -> dict[str, dict[str, str]]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return {"theorems": dict(data["theorems"]), "tactics": dict(data["tactics"])}


def build_dictionaries(
    proofs: Sequence[AnnotatedProof], descriptions: dict[str, dict[str, str]]
) -> tuple[PremiseDictionary, PremiseDictionary, DictionaryReport]:
    """Collect every premise/tactic name used in the proofs and describe it.

    Names without a curated description are reported, not fatal, so new
    corpora can be onboarded incrementally.
    """
    theorem_names: list[str] = []
    tactic_names: list[str] = []
    for proof in proofs:
        # The theorem being proven is itself part of the dataset's vocabulary.
        if proof.theorem.name not in theorem_names:
            theorem_names.append(proof.theorem.name)
        for step in proof.steps:
            tactic_name, candidates = extract_premise_candidates(step.tactic)
            if tactic_name and tactic_name not in tactic_names:
                tactic_names.append(tactic_name)
            for cand in candidates:
                if cand not in theorem_names:
                    theorem_names.append(cand)

    known_theorems = descriptions["theorems"]
    known_tactics = descriptions["tactics"]
    theorems = PremiseDictionary(
        entries={n: known_theorems[n] for n in theorem_names if n in known_theorems},
        kind="theorem",
    )
    tactics = PremiseDictionary(
        entries={n: known_tactics[n] for n in tactic_names if n in known_tactics},
        kind="tactic",
    )
    report = DictionaryReport(
        missing_theorems=tuple(n for n in theorem_names if n not in known_theorems),
        missing_tactics=tuple(n for n in tactic_names if n not in known_tactics),
    )
    return theorems, tactics, report


def world_premises(proofs: Sequence[AnnotatedProof], world: str) -> list[str]:
    """All tactic and premise names used by proofs of one world, in order."""
    names: list[str] = []
    for proof in proofs:
        if proof.theorem.world != world:
            continue
        for step in proof.steps:
            tactic_name, candidates = extract_premise_candidates(step.tactic)
            for name in [tactic_name, *candidates]:
                if name and name not in names:
                    names.append(name)
    return names
