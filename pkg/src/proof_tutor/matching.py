"""Relaxed exact matching of tactics against ground truth.

Phase one compares tactic strings directly (the only tolerated spelling
difference is ``rw[`` versus ``rw [``). Phase two appends both tactics to
their respective proof prefixes, runs the checker, and compares the resulting
proof states up to free-variable renaming: each case is normalized by
replacing every whole-identifier occurrence of a free variable with ``var{i}``,
where ``i`` is the variable's index in the case's local context.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Protocol, Sequence

from .model import COMPLETE_STATE, GoalCase, ProofState

# Identifier character classes. ASCII letters and underscore start an
# identifier, as do Greek and letter-like symbols (ℕ, ℤ, script letters).
# Continuation characters add digits, ', !, ? and subscript alphanumerics.
# Dots join identifier atoms into dotted names (MyNat.add_comm). Double
# guillemets are not handled.

_LETTERLIKE_RANGES = (
    (0x3B1, 0x3C9),  # lowercase Greek
    (0x391, 0x3A9),  # uppercase Greek
    (0x3CA, 0x3FB),
    (0x1F00, 0x1FFE),  # polytonic Greek
    (0x2100, 0x214F),  # letter-like symbols, includes ℕ
    (0x1D49C, 0x1D59F),  # script, double-struck, fraktur
)
_LETTERLIKE_EXCLUDED = {0x3BB, 0x3A0, 0x3A3}  # λ, Π, Σ are syntax, not names

_SUBSCRIPT_RANGES = (
    (0x2080, 0x2089),  # subscript digits
    (0x2090, 0x209C),
    (0x1D62, 0x1D6A),
)


def _is_letterlike(code: int) -> bool:
    if code in _LETTERLIKE_EXCLUDED:
        return False
    return any(lo <= code <= hi for lo, hi in _LETTERLIKE_RANGES)


def _is_subscript(code: int) -> bool:
    return any(lo <= code <= hi for lo, hi in _SUBSCRIPT_RANGES)


def is_identifier_first(ch: str) -> bool:
    if ch.isascii():
        return ch.isalpha() or ch == "_"
    return _is_letterlike(ord(ch))


def is_identifier_rest(ch: str) -> bool:
    if ch.isascii():
        return ch.isalnum() or ch in "_'!?"
    code = ord(ch)
    return _is_letterlike(code) or _is_subscript(code)


def is_valid_identifier(text: str) -> bool:
    """Whether ``text`` is one identifier token (dots allowed after the head)."""
    if not text or not is_identifier_first(text[0]):
        return False
    return all(is_identifier_rest(ch) or ch == "." for ch in text[1:])


def longest_identifier_at(text: str, i: int) -> str | None:
    """Greedy max-munch: the longest identifier starting exactly at ``i``."""
    if i < 0 or i >= len(text):
        raise IndexError(f"index {i} out of range")
    if not is_identifier_first(text[i]):
        return None
    j = i + 1
    while j < len(text) and (is_identifier_rest(text[j]) or text[j] == "."):
        j += 1
    return text[i:j]


def identifier_tokens(text: str) -> list[str]:
    """All identifier tokens of ``text`` in order, via max-munch scanning."""
    tokens: list[str] = []
    i = 0
    while i < len(text):
        ident = longest_identifier_at(text, i)
        if ident is None:
            i += 1
        else:
            tokens.append(ident)
            i += len(ident)
    return tokens


@dataclass(frozen=True)
class NormalizedState:
    """One goal case with its free variables renamed to var0, var1, ..."""

    text: str
    renaming: dict[str, str]


def normalize_case(case: GoalCase) -> NormalizedState:
    variable_list = list(case.free_variables)
    source = case.text
    out: list[str] = []
    i = 0
    while i < len(source):
        ident = longest_identifier_at(source, i)
        if ident is not None:
            if ident in variable_list:
                out.append(f"var{variable_list.index(ident)}")
            else:
                out.append(ident)
            i += len(ident)
        else:
            out.append(source[i])
            i += 1
    renaming = {name: f"var{idx}" for idx, name in enumerate(variable_list)}
    return NormalizedState(text="".join(out), renaming=renaming)


def normalize(state: ProofState) -> list[NormalizedState]:
    """Normalize every goal case of ``state`` independently."""
    return [normalize_case(case) for case in state.cases]


def state_key(state: ProofState) -> str:
    """Renaming-invariant key for a proof state, used for cycle detection."""
    return "\n\n".join(ns.text for ns in normalize(state))


def states_equivalent(a: ProofState, b: ProofState) -> bool:
    """Same case count and pairwise-identical normalized case texts."""
    if len(a.cases) != len(b.cases):
        return False
    return all(
        normalize_case(ca).text == normalize_case(cb).text
        for ca, cb in zip(a.cases, b.cases)
    )


_RW_SPACING = re.compile(r"(?<![A-Za-z0-9_'])rw\[")


def canonicalize_tactic(tactic: str) -> str:
    """Apply the one tolerated spelling difference: ``rw[`` means ``rw [``."""
    return _RW_SPACING.sub("rw [", tactic)


class MatchPhase(str, Enum):
    STRING = "string"
    STATE = "state"
    NONE = "none"


@dataclass(frozen=True)
class MatchVerdict:
    matched: bool
    phase: MatchPhase
    evidence: str

    def __post_init__(self) -> None:
        if self.matched and self.phase is MatchPhase.NONE:
            raise ValueError("a match must name its phase")


class Checker(Protocol):
    def check(self, request):  # pragma: no cover - structural typing only
        ...


def _goal_state(result) -> ProofState:
    if result.goal_state is not None:
        return result.goal_state
    return COMPLETE_STATE


def tactics_match(
    pred: str,
    truth: str,
    pred_prefix: Sequence[str],
    truth_prefix: Sequence[str],
    checker: Checker,
    theorem_header: str,
) -> MatchVerdict:
    """Two-phase comparison of a predicted tactic against the ground truth.

    String matching never touches the checker. State matching appends each
    tactic to its own already-accepted prefix; a predicted tactic that errors
    in the checker never matches.
    """
    from .checker import CheckRequest, Status

    if canonicalize_tactic(pred) == canonicalize_tactic(truth):
        return MatchVerdict(True, MatchPhase.STRING, evidence="exact tactic string")

    pred_result = checker.check(
        CheckRequest(theorem_header=theorem_header, tactics=(*pred_prefix, pred))
    )
    truth_result = checker.check(
        CheckRequest(theorem_header=theorem_header, tactics=(*truth_prefix, truth))
    )
    if pred_result.status is Status.ERROR:
        return MatchVerdict(
            False, MatchPhase.NONE, evidence=f"predicted tactic errors: {pred_result.message}"
        )
    if truth_result.status is Status.ERROR:
        return MatchVerdict(
            False, MatchPhase.NONE, evidence=f"ground-truth tactic errors: {truth_result.message}"
        )

    pred_state = _goal_state(pred_result)
    truth_state = _goal_state(truth_result)
    if states_equivalent(pred_state, truth_state):
        return MatchVerdict(
            True, MatchPhase.STATE, evidence=f"normalized state:\n{state_key(pred_state)}"
        )
    return MatchVerdict(
        False,
        MatchPhase.NONE,
        evidence=(
            "normalized states differ:\n"
            f"predicted:\n{state_key(pred_state)}\n"
            f"ground truth:\n{state_key(truth_state)}"
        ),
    )


@dataclass(frozen=True)
class ProofScore:
    """Per-proof metric outcome plus the per-position verdicts for logging."""

    tactic_hits: int
    proof_exact: bool
    verdicts: tuple[MatchVerdict, ...]


def truncate_for_alignment(pred: Sequence[str], truth_len: int) -> list[str]:
    """Whole-proof alignment: keep min(len(pred), truth_len) positions."""
    return list(pred[: min(len(pred), truth_len)])


def score_correct_proof(pred: Sequence[str], truth, checker: Checker) -> ProofScore:
    """Count index-aligned tactic matches; exact means every step matched.

    ``truth`` is a correct AnnotatedProof. Whole-proof callers truncate
    ``pred`` with :func:`truncate_for_alignment` beforehand.
    """
    truth_tactics = list(truth.tactics)
    header = truth.theorem.statement_fl
    compared = min(len(pred), len(truth_tactics))
    verdicts = []
    for i in range(compared):
        verdicts.append(
            tactics_match(
                pred[i], truth_tactics[i], pred[:i], truth_tactics[:i], checker, header
            )
        )
    hits = sum(1 for v in verdicts if v.matched)
    exact = len(pred) == len(truth_tactics) and hits == len(truth_tactics)
    return ProofScore(tactic_hits=hits, proof_exact=exact, verdicts=tuple(verdicts))


def score_incorrect_proof(pred: Sequence[str], truth, checker: Checker) -> bool:
    """Success on an incorrect proof: faithful prefix, then a compiler error.

    The first incorrect step sits at position ``skipped_index`` of the
    surviving step list (the step that followed the deleted one). Every
    position before it must match, and the checker run that includes the
    predicted formalization of that step must report an error. When the
    deleted step was the final one there is no erroring step to formalize, so
    the formalization cannot be counted successful.
    """
    from .checker import CheckRequest, Status

    if truth.skipped_index is None:
        raise ValueError("score_incorrect_proof needs an incorrect proof")
    k = truth.skipped_index
    truth_tactics = list(truth.tactics)
    header = truth.theorem.statement_fl
    if len(pred) < k:
        return False
    for i in range(k - 1):
        verdict = tactics_match(
            pred[i], truth_tactics[i], pred[:i], truth_tactics[:i], checker, header
        )
        if not verdict.matched:
            return False
    result = checker.check(CheckRequest(theorem_header=header, tactics=tuple(pred[:k])))
    return result.status is Status.ERROR
