"""Runtime configuration for the CLI and the session service."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .search import SearchConfig

PACKAGE_DATA = Path(__file__).parent / "data"
DEFAULT_CORPUS = PACKAGE_DATA / "corpus"
DEFAULT_DESCRIPTIONS = PACKAGE_DATA / "descriptions.json"
DEFAULT_FIXTURES = PACKAGE_DATA / "checker_fixtures.jsonl"


@dataclass
class Config:
    dataset_root: Path = DEFAULT_CORPUS
    descriptions_path: Path = DEFAULT_DESCRIPTIONS
    backend: str = "replay"  # remote | replay | mock
    model_id: str = "gpt-4o-mini-2024-07-18"
    temperature: float = 0.0
    remote_base_url: str = ""
    api_key_env: str = "LLM_API_KEY"
    replay_dir: Path | None = None
    mock_script: Path | None = None
    lean_project_root: Path | None = None
    fixture_path: Path = DEFAULT_FIXTURES
    session_journal: Path = Path("sessions.jsonl")
    include_staff_solution: bool = True
    search: SearchConfig = field(default_factory=SearchConfig)

    def __post_init__(self) -> None:
        if self.backend not in ("remote", "replay", "mock"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.backend == "remote" and not self.remote_base_url:
            raise ValueError("remote backend needs a base URL")


def load_config(path: Path | str | None = None, **overrides) -> Config:
    """Build a Config from an optional JSON file plus keyword overrides."""
    values: dict = {}
    if path is not None:
        values.update(json.loads(Path(path).read_text(encoding="utf-8")))
    values.update({k: v for k, v in overrides.items() if v is not None})
    path_fields = (
        "dataset_root",
        "descriptions_path",
        "replay_dir",
        "mock_script",
        "lean_project_root",
        "fixture_path",
        "session_journal",
    )
    for name in path_fields:
        if name in values and values[name] is not None:
            values[name] = Path(values[name])
    if "search" in values and isinstance(values["search"], dict):
        search = dict(values["search"])
        if "forbidden" in search:
            search["forbidden"] = frozenset(search["forbidden"])
        if "world_premises" in search:
            search["world_premises"] = tuple(search["world_premises"])
        values["search"] = SearchConfig(**search)
    return Config(**values)
