"""Proof tutoring engine for natural-language Peano arithmetic proofs.

Students write proofs one plain-language step at a time; each step is
formalized into a Lean tactic, compiled, and either accepted or answered with
structured feedback built from the compiler error and a verified next step.
"""

from .model import (
    AnnotatedProof,
    GoalCase,
    Label,
    MalformedState,
    Persona,
    ProofState,
    ProofStep,
    TheoremSpec,
    extract_free_variables,
    parse_proof_state,
)
from .checker import (
    BackendUnavailable,
    CheckRequest,
    CheckResult,
    Diagnostic,
    FixtureChecker,
    LeanReplChecker,
    Status,
    classify,
)
from .matching import (
    MatchPhase,
    MatchVerdict,
    NormalizedState,
    longest_identifier_at,
    normalize,
    score_correct_proof,
    score_incorrect_proof,
    states_equivalent,
    tactics_match,
)
from .dataset import (
    AlignmentError,
    HeaderError,
    PremiseDictionary,
    TooShort,
    build_dictionaries,
    generate_incorrect_set,
    load_corpus,
    parse_annotated_file,
    serialize_annotated_proof,
    skip_step,
)
from .autoformalize import (
    FormalizationTrace,
    FormalizeOptions,
    FormatError,
    HaltReason,
    build_step_prompt,
    build_whole_proof_prompt,
    formalize_step_by_step,
    formalize_whole_proof,
    sanitize_tactic,
)
from .search import (
    SearchConfig,
    SearchResult,
    forbidden_theorems,
    progress_check,
    propose_candidates,
    search,
)
from .feedback import (
    ErrorCategory,
    FeedbackBundle,
    ParseError,
    build_feedback_prompt,
    cold_start_feedback,
    leakage_lint,
    parse_feedback,
)
from .evaluation import jeffreys_interval
from .llm import (
    BackendError,
    PromptBundle,
    PromptKnobs,
    RemoteChatBackend,
    ReplayBackend,
    ScriptedBackend,
    TemplateError,
)

__version__ = "0.1.0"
