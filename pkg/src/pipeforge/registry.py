"""Portal data model: applications, repositories, CI engines, CI pipelines.

File-backed persistence: one JSON document (schema_version 1, sorted keys,
UTF-8, LF) rewritten atomically via a temp file + rename. A lock file keeps
writers single-file; a second writer gets RegistryBusy instead of blocking.
Entities returned from the registry are snapshots; mutate through upsert.
"""

from __future__ import annotations

import json
import math
import os
import threading
import uuid
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction
from pathlib import Path

from .catalog import TemplateCatalog
from .errors import (
    DuplicateName,
    NeverBreaksEven,
    NoTemplatesMatched,
    NotFound,
    ReferentialIntegrity,
    RegistryBusy,
)

SCHEMA_VERSION = 1

KIND_APPLICATION = "applications"
KIND_REPOSITORY = "repositories"
KIND_ENGINE = "ci_engines"
KIND_PIPELINE = "ci_pipelines"
KINDS = (KIND_APPLICATION, KIND_REPOSITORY, KIND_ENGINE, KIND_PIPELINE)

ENGINE_KINDS = ("gitlab", "github")


@dataclass(frozen=True)
class Requirements:
    lint_required: bool = True
    coverage_target: float = 0.0
    security_scan_required: bool = True


@dataclass(frozen=True)
class Application:
    name: str
    requirements: Requirements = field(default_factory=Requirements)
    repository_ids: tuple[str, ...] = ()
    id: str = ""


@dataclass(frozen=True)
class Repository:
    name: str
    url: str = ""
    path: str = ""
    languages: tuple[str, ...] = ()
    toolchains: tuple[str, ...] = ()
    engine_id: str = ""
    application_id: str = ""
    id: str = ""


@dataclass(frozen=True)
class CIEngine:
    name: str
    kind: str
    id: str = ""


@dataclass(frozen=True)
class CIPipeline:
    repository_id: str
    engine_id: str
    template_refs: tuple[str, ...] = ()
    rendered_digest: str = ""
    catalog_version: str = ""
    name: str = ""
    id: str = ""


_ENTITY_KIND = {
    Application: KIND_APPLICATION,
    Repository: KIND_REPOSITORY,
    CIEngine: KIND_ENGINE,
    CIPipeline: KIND_PIPELINE,
}
_KIND_ENTITY = {v: k for k, v in _ENTITY_KIND.items()}


class Registry:
    """Many concurrent readers, one writer; writes serialize via the lock."""

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path is not None else None
        self._lock = threading.Lock()
        self._entities: dict[str, dict[str, object]] = {kind: {} for kind in KINDS}
        if self.path is not None and self.path.exists():
            self._load()

    # -- CRUD --------------------------------------------------------------

    def upsert(self, entity) -> str:
        kind = _ENTITY_KIND.get(type(entity))
        if kind is None:
            raise TypeError(f"unknown entity type {type(entity).__name__}")
        with self._lock:
            self._validate(kind, entity)
            if entity.id:
                if entity.id not in self._entities[kind]:
                    raise NotFound(f"cannot update unknown id {entity.id!r}")
                stored = entity
            else:
                stored = replace(entity, id=uuid.uuid4().hex)
            self._check_name(kind, stored)
            self._entities[kind][stored.id] = stored
            self._save()
            return stored.id

    def get(self, entity_id: str):
        for kind in KINDS:
            entity = self._entities[kind].get(entity_id)
            if entity is not None:
                return entity
        raise NotFound(f"no entity with id {entity_id!r}")

    def list(self, kind: str, **filters):
        if kind not in KINDS:
            raise NotFound(f"unknown entity kind {kind!r}")
        items = list(self._entities[kind].values())
        for key, wanted in filters.items():
            if wanted is None:
                continue
            items = [e for e in items if _matches(e, key, wanted)]
        return sorted(items, key=lambda e: (e.name, e.id))

    def delete(self, entity_id: str) -> None:
        with self._lock:
            for kind in KINDS:
                if entity_id in self._entities[kind]:
                    referrers = self._referrers(entity_id)
                    if referrers:
                        raise ReferentialIntegrity(entity_id, referrers)
                    del self._entities[kind][entity_id]
                    self._save()
                    return
            raise NotFound(f"no entity with id {entity_id!r}")

    # -- validation ---------------------------------------------------------

    def _validate(self, kind: str, entity) -> None:
        if kind == KIND_APPLICATION:
            target = entity.requirements.coverage_target
            if not 0 <= target <= 100:
                raise ValueError(f"coverage_target {target} outside [0, 100]")
            for rid in entity.repository_ids:
                self._require(KIND_REPOSITORY, rid, "repository")
        elif kind == KIND_REPOSITORY:
            if entity.engine_id:
                self._require(KIND_ENGINE, entity.engine_id, "engine")
            if entity.application_id:
                self._require(KIND_APPLICATION, entity.application_id, "application")
        elif kind == KIND_ENGINE:
            if entity.kind not in ENGINE_KINDS:
                raise ValueError(f"unsupported engine kind {entity.kind!r}")
        elif kind == KIND_PIPELINE:
            self._require(KIND_REPOSITORY, entity.repository_id, "repository")
            self._require(KIND_ENGINE, entity.engine_id, "engine")

    def _require(self, kind: str, entity_id: str, label: str) -> None:
        if entity_id not in self._entities[kind]:
            raise NotFound(f"referenced {label} {entity_id!r} does not exist")

    def _check_name(self, kind: str, entity) -> None:
        if not entity.name:
            if kind == KIND_PIPELINE:
                return  # pipelines may be anonymous
            raise ValueError("name must be non-empty")
        for other in self._entities[kind].values():
            if other.id != entity.id and other.name == entity.name:
                raise DuplicateName(f"{kind} name {entity.name!r} already in use")

    def _referrers(self, entity_id: str) -> list[str]:
        refs: list[str] = []
        for app in self._entities[KIND_APPLICATION].values():
            if entity_id in app.repository_ids:
                refs.append(app.id)
        for repo in self._entities[KIND_REPOSITORY].values():
            if entity_id in (repo.engine_id, repo.application_id):
                refs.append(repo.id)
        for pipe in self._entities[KIND_PIPELINE].values():
            if entity_id in (pipe.repository_id, pipe.engine_id):
                refs.append(pipe.id)
        return refs

    # -- persistence ---------------------------------------------------------

    def to_dict(self) -> dict:
        doc: dict[str, object] = {"schema_version": SCHEMA_VERSION}
        for kind in KINDS:
            doc[kind] = [
                asdict(self._entities[kind][eid]) for eid in sorted(self._entities[kind])
            ]
        return doc

    def _save(self) -> None:
        if self.path is None:
            return
        lock_path = self.path.with_suffix(self.path.suffix + ".lock")
        try:
            fd = os.open(lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise RegistryBusy(f"registry {self.path} is locked by another writer") from None
        try:
            tmp = self.path.with_suffix(self.path.suffix + ".tmp")
            payload = json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"
            tmp.write_text(payload, encoding="utf-8")
            os.replace(tmp, self.path)
        finally:
            os.close(fd)
            os.unlink(lock_path)

    def _load(self) -> None:
        data = json.loads(self.path.read_text(encoding="utf-8"))
        for kind in KINDS:
            cls = _KIND_ENTITY[kind]
            for raw in data.get(kind, []):
                entity = _from_dict(cls, raw)
                self._entities[kind][entity.id] = entity


def _matches(entity, key: str, wanted) -> bool:
    value = getattr(entity, key, None)
    if isinstance(value, tuple):
        return wanted in value
    return value == wanted


def _from_dict(cls, raw: dict):
    if cls is Application:
        return Application(
            name=raw["name"],
            requirements=Requirements(**raw.get("requirements", {})),
            repository_ids=tuple(raw.get("repository_ids", [])),
            id=raw["id"],
        )
    kwargs = dict(raw)
    for key, value in kwargs.items():
        if isinstance(value, list):
            kwargs[key] = tuple(value)
    return cls(**kwargs)


def match_pipelines(
    repo: Repository,
    app: Application | None,
    catalog: TemplateCatalog,
    engine: CIEngine,
    strict: bool = False,
) -> tuple[list[CIPipeline], list[str]]:
    """Select golden-path pipelines for a repository's declared languages.

    One candidate pipeline per language that has a catalog group, carrying
    the group's block refs filtered by the application's requirements.
    Returns (pipelines, findings); findings report soft requirement gaps.
    """
    groups_by_language = {g.language: g for _, g in sorted(catalog.groups.items())}
    pipelines: list[CIPipeline] = []
    findings: list[str] = []

    for language in repo.languages:
        group = groups_by_language.get(language)
        if group is None:
            findings.append(f"no catalog group for language {language}")
            continue
        refs = list(group.blocks)
        if app is not None and not app.requirements.lint_required:
            refs = [r for r in refs if catalog.blocks[r].stage != "lint"]
        if app is not None and app.requirements.security_scan_required:
            if not any(catalog.blocks[r].stage == "sast" for r in refs):
                findings.append(
                    f"group {group.name} has no sast block but the application requires one"
                )
        pipelines.append(
            CIPipeline(
                repository_id=repo.id,
                engine_id=engine.id,
                template_refs=tuple(refs),
                catalog_version=catalog.version,
                name=f"{repo.name}-{group.name}" if repo.name else group.name,
            )
        )

    if not pipelines and strict:
        raise NoTemplatesMatched(
            f"no catalog group matches any of {', '.join(repo.languages) or 'no languages'}"
        )
    return pipelines, findings


def breakeven_uses(
    manual_hours_per_pipeline: float,
    automation_setup_hours: float,
    automated_hours_per_use: float = 0,
) -> int:
    """Smallest n with n * manual >= setup + n * automated.

    Exact for integer inputs (no floating-point drift).
    """
    if manual_hours_per_pipeline <= 0:
        raise ValueError("manual hours per pipeline must be positive")
    if automation_setup_hours < 0 or automated_hours_per_use < 0:
        raise ValueError("setup and per-use hours must be non-negative")
    if manual_hours_per_pipeline <= automated_hours_per_use:
        raise NeverBreaksEven(
            "automation never pays off: each use costs at least as much as manual work"
        )
    saving = Fraction(manual_hours_per_pipeline) - Fraction(automated_hours_per_use)
    return max(0, math.ceil(Fraction(automation_setup_hours) / saving))
