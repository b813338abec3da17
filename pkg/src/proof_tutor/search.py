"""Next-step generation: LLM-ranked candidates under depth-first search.

When a student proof halts, the search starts from the formalized partial
proof with the incorrect step removed. At each node the backend proposes a
rank-ordered list of candidate tactics; candidates are compiled lazily in rank
order, filtered through a progress check (no forbidden theorems, no revisits
of a goal state already on the current path, compared up to variable
renaming), and explored depth-first until a completing sequence is found or
the depth bound is exhausted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .checker import CheckRequest, CheckResult, Status
from .llm import LLMBackend, PromptBundle, PromptKnobs
from .matching import identifier_tokens, state_key
from .model import COMPLETE_STATE, ProofState, TheoremSpec


@dataclass(frozen=True)
class SearchConfig:
    branching: int = 12
    max_depth: int = 8
    forbidden: frozenset[str] = frozenset()
    world_premises: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.branching < 1 or self.max_depth < 1:
            raise ValueError("branching and max_depth must be at least 1")


@dataclass(frozen=True)
class SearchNode:
    tactics_so_far: tuple[str, ...]
    state: ProofState
    depth: int
    parent: "SearchNode | None" = None


@dataclass(frozen=True)
class TraceEvent:
    depth: int
    tactic: str
    verdict: str  # compile-fail | forbidden | cyclic | expanded | complete


@dataclass
class SearchResult:
    completion: list[str] | None
    trace: list[TraceEvent] = field(default_factory=list)
    nodes_expanded: int = 0
    states_seen: int = 0

    @property
    def found(self) -> bool:
        return self.completion is not None

    def render_trace(self) -> str:
        return "\n".join(f"{e.depth}\t{e.verdict}\t{e.tactic}" for e in self.trace)


def forbidden_theorems(theorem: TheoremSpec, corpus: Sequence[TheoremSpec]) -> set[str]:
    """The theorem under proof plus everything introduced after it."""
    return {theorem.name} | {
        other.name for other in corpus if other.order_index > theorem.order_index
    }


def uses_forbidden_name(tactic: str, forbidden: frozenset[str] | set[str]) -> bool:
    """Whole-identifier membership, so add_comm does not ban add_comm'."""
    return any(token in forbidden for token in identifier_tokens(tactic))


def progress_check(
    candidate: str,
    child_state: ProofState,
    visited_states: set[str],
    config: SearchConfig,
) -> bool:
    """Filter applied to candidates that already compiled from their node."""
    if uses_forbidden_name(candidate, config.forbidden):
        return False
    if state_key(child_state) in visited_states:
        return False
    return True


_CANDIDATE_SYSTEM = """You are completing a Lean 4 tactic proof of a Peano Arithmetic theorem.
Propose candidate next tactics for the current goal state, ranked from most to least likely to lead to a complete proof.
Respond with one Lean tactic per line and nothing else: no numbering, no commentary, no markdown."""

_CANDIDATE_USER_TEMPLATE = """Theorem statement in formal language: {theorem_statement_fl}

The proof so far:
{partial_proof}

The current goal state:
{goal_state}

These are the tactics and premises used in this world:
{world_premises}

Propose {branching} candidate next tactics, one per line, most likely first."""


def build_candidate_prompt(
    theorem: TheoremSpec,
    node: SearchNode,
    config: SearchConfig,
    knobs: PromptKnobs = PromptKnobs(),
) -> PromptBundle:
    partial = "\n".join(node.tactics_so_far) if node.tactics_so_far else "(no tactics yet)"
    goal = node.state.render() if node.state.cases else "(no goals)"
    user = _CANDIDATE_USER_TEMPLATE.format(
        theorem_statement_fl=theorem.statement_fl,
        partial_proof=partial,
        goal_state=goal,
        world_premises=", ".join(config.world_premises) or "(none listed)",
        branching=config.branching,
    )
    return PromptBundle(system=_CANDIDATE_SYSTEM, user=user, knobs=knobs)


def propose_candidates(
    node: SearchNode,
    theorem: TheoremSpec,
    config: SearchConfig,
    llm: LLMBackend,
    knobs: PromptKnobs = PromptKnobs(),
) -> list[str]:
    """Ranked, sanitized, de-duplicated candidate tactics (at most branching)."""
    from .autoformalize import FormatError, sanitize_tactic

    raw = llm.complete(build_candidate_prompt(theorem, node, config, knobs))
    candidates: list[str] = []
    for line in raw.split("\n"):
        if not line.strip():
            continue
        try:
            tactic = sanitize_tactic(line)
        except FormatError:
            continue
        if tactic not in candidates:
            candidates.append(tactic)
        if len(candidates) == config.branching:
            break
    return candidates


class SearchError(RuntimeError):
    """Internal inconsistency, e.g. a completion that fails its re-check."""


def _goal_state(result: CheckResult) -> ProofState:
    return result.goal_state if result.goal_state is not None else COMPLETE_STATE


def search(
    root_tactics: Sequence[str],
    theorem: TheoremSpec,
    config: SearchConfig,
    llm: LLMBackend,
    checker,
    knobs: PromptKnobs = PromptKnobs(),
) -> SearchResult:
    """Depth-first search for a tactic sequence completing the proof.

    Children are explored strictly in the backend's rank order, so the search
    is deterministic whenever the candidate source is. Any returned completion
    is re-checked before being reported.
    """
    header = theorem.statement_fl
    result = SearchResult(completion=None)

    root_check = checker.check(
        CheckRequest(theorem_header=header, tactics=tuple(root_tactics))
    )
    if root_check.status is Status.ERROR:
        raise SearchError(
            f"search root does not compile: {root_check.message}"
        )
    if root_check.status is Status.COMPLETE:
        result.completion = []
        return result
    root_state = _goal_state(root_check)

    def dfs(tactics: tuple[str, ...], state: ProofState, depth: int, visited: set[str]) -> list[str] | None:
        if depth >= config.max_depth:
            return None
        node = SearchNode(tactics_so_far=tactics, state=state, depth=depth)
        result.nodes_expanded += 1
        for candidate in propose_candidates(node, theorem, config, llm, knobs):
            check = checker.check(
                CheckRequest(theorem_header=header, tactics=(*tactics, candidate))
            )
            if check.status is Status.ERROR:
                result.trace.append(TraceEvent(depth, candidate, "compile-fail"))
                continue
            if uses_forbidden_name(candidate, config.forbidden):
                result.trace.append(TraceEvent(depth, candidate, "forbidden"))
                continue
            if check.status is Status.COMPLETE:
                result.trace.append(TraceEvent(depth, candidate, "complete"))
                return [candidate]
            child_state = _goal_state(check)
            key = state_key(child_state)
            if key in visited:
                result.trace.append(TraceEvent(depth, candidate, "cyclic"))
                continue
            result.trace.append(TraceEvent(depth, candidate, "expanded"))
            result.states_seen += 1
            found = dfs((*tactics, candidate), child_state, depth + 1, visited | {key})
            if found is not None:
                return [candidate, *found]
        return None

    completion = dfs(tuple(root_tactics), root_state, 0, {state_key(root_state)})
    if completion is not None:
        recheck = checker.check(
            CheckRequest(theorem_header=header, tactics=(*root_tactics, *completion))
        )
        if recheck.status is not Status.COMPLETE:
            raise SearchError("completion failed its re-check")
    result.completion = completion
    return result
