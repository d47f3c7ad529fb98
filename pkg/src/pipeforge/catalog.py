"""Versioned golden-path template catalog.

On disk a catalog is a directory per version, holding one YAML document per
block plus group files::

    <root>/<version>/<language>/<stage>/<name>.yml   language-scoped block
    <root>/<version>/<stage>/<name>.yml              cross-language block (e.g. sast/trivy)
    <root>/<version>/groups/<name>.yml               golden path per language

Block documents carry ``name``, ``stage``, optional ``params`` and a per-engine
``engines`` body map with ``${param}`` placeholders. Catalogs are immutable
after load and safe to share between threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .errors import (
    CatalogNotFound,
    EngineUnsupported,
    GroupNotFound,
    MalformedBlock,
    MissingParam,
    VersionNotFound,
)

CANONICAL_STAGES: tuple[str, ...] = ("build", "lint", "test", "sast", "sca", "package", "deploy")

GROUPS_DIR = "groups"
LATEST = "latest"

_PLACEHOLDER_RE = re.compile(r"\$\{([A-Za-z_][A-Za-z0-9_]*)\}")


@dataclass(frozen=True)
class BlockRef:
    """Identifies one block within a catalog version."""

    version: str
    path: str

    def __str__(self) -> str:
        return f"{self.version}:{self.path}"


@dataclass(frozen=True)
class BlockParam:
    name: str
    default: str | None = None
    required: bool = False


@dataclass(frozen=True)
class TemplateBlock:
    name: str
    stage: str
    params: tuple[BlockParam, ...]
    engines: dict[str, str]
    language: str | None = None
    source_text: str = ""

    def serialize(self) -> str:
        """The block file's bytes, normalized to a single trailing newline."""
        return self.source_text.rstrip("\n") + "\n"


@dataclass(frozen=True)
class TemplateGroup:
    name: str
    language: str
    blocks: tuple[str, ...]
    source_text: str = ""


@dataclass(frozen=True)
class TemplateCatalog:
    version: str
    blocks: dict[str, TemplateBlock]
    groups: dict[str, TemplateGroup]
    root: Path | None = None


@dataclass(frozen=True)
class Finding:
    severity: str
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.severity}: {self.path}: {self.message}"


def _version_key(name: str) -> tuple:
    # Natural ordering of dotted numerals: "1.10" sorts above "1.2".
    parts = []
    for piece in name.split("."):
        parts.append((0, int(piece), "") if piece.isdigit() else (1, 0, piece))
    return tuple(parts)


def resolve_version(root: Path, selector: str) -> str:
    versions = sorted(d.name for d in root.iterdir() if d.is_dir())
    if not versions:
        raise VersionNotFound(f"no version directories under {root}")
    if selector == LATEST:
        return max(versions, key=_version_key)
    if selector not in versions:
        raise VersionNotFound(f"version {selector!r} not found under {root}")
    return selector


def load_catalog(root: str | Path, version: str = LATEST) -> TemplateCatalog:
    """Load one catalog version from *root*.

    ``latest`` picks the greatest version directory under natural ordering
    of dotted numerals. Structural problems in a block file raise
    MalformedBlock; semantic invariants are checked by validate_catalog.
    """
    root_path = Path(root)
    if not root_path.is_dir():
        raise CatalogNotFound(str(root))
    resolved = resolve_version(root_path, version)
    version_dir = root_path / resolved

    blocks: dict[str, TemplateBlock] = {}
    groups: dict[str, TemplateGroup] = {}
    for file in sorted(version_dir.rglob("*.yml")):
        rel = file.relative_to(version_dir).as_posix()
        text = file.read_text(encoding="utf-8")
        segments = rel[: -len(".yml")].split("/")
        if segments[0] == GROUPS_DIR:
            if len(segments) != 2:
                raise MalformedBlock(rel, "group files live directly under groups/")
            group = _parse_group(rel, text)
            groups[group.name] = group
        else:
            if len(segments) < 2:
                raise MalformedBlock(rel, "blocks live under <language>/<stage>/ or <stage>/")
            path = "/".join(segments)
            blocks[path] = _parse_block(rel, path, text)

    return TemplateCatalog(version=resolved, blocks=blocks, groups=groups, root=root_path)


def _parse_block(rel: str, path: str, text: str) -> TemplateBlock:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise MalformedBlock(rel, f"invalid YAML: {exc}") from exc
    if not isinstance(data, dict):
        raise MalformedBlock(rel, "block document must be a mapping")
    name = data.get("name")
    stage = data.get("stage")
    if not isinstance(name, str) or not name:
        raise MalformedBlock(rel, "missing block name")
    if not isinstance(stage, str) or not stage:
        raise MalformedBlock(rel, "missing stage")

    params: list[BlockParam] = []
    for entry in data.get("params") or []:
        if not isinstance(entry, dict) or "name" not in entry:
            raise MalformedBlock(rel, "params entries need a name")
        default = entry.get("default")
        params.append(
            BlockParam(
                name=str(entry["name"]),
                default=None if default is None else str(default),
                required=bool(entry.get("required", False)),
            )
        )

    engines_raw = data.get("engines") or {}
    if not isinstance(engines_raw, dict):
        raise MalformedBlock(rel, "engines must be a mapping of engine id to body text")
    engines = {str(k): str(v) for k, v in engines_raw.items()}

    segments = path.split("/")
    language = data.get("language") or (segments[0] if len(segments) >= 3 else None)

    return TemplateBlock(
        name=name,
        stage=stage,
        params=tuple(params),
        engines=engines,
        language=language,
        source_text=text,
    )


def _parse_group(rel: str, text: str) -> TemplateGroup:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise MalformedBlock(rel, f"invalid YAML: {exc}") from exc
    if not isinstance(data, dict) or not isinstance(data.get("name"), str):
        raise MalformedBlock(rel, "group document must be a mapping with a name")
    blocks = data.get("blocks") or []
    if not isinstance(blocks, list):
        raise MalformedBlock(rel, "group blocks must be a list of block paths")
    return TemplateGroup(
        name=data["name"],
        language=str(data.get("language", "")),
        blocks=tuple(str(b) for b in blocks),
        source_text=text,
    )


def validate_catalog(catalog: TemplateCatalog) -> list[Finding]:
    """Check catalog invariants. Empty list means the catalog is valid.

    Findings are deterministic and sorted by path.
    """
    findings: list[Finding] = []

    for path, block in catalog.blocks.items():
        if block.stage not in CANONICAL_STAGES:
            findings.append(
                Finding("error", path, f"UnknownStage: {block.stage!r} is not a canonical stage")
            )
        if not block.engines:
            findings.append(Finding("error", path, "NoEngineBody: block defines no engine body"))
        declared = {p.name for p in block.params}
        for engine, body in sorted(block.engines.items()):
            for used in sorted(set(_PLACEHOLDER_RE.findall(body))):
                if used not in declared:
                    findings.append(
                        Finding(
                            "error",
                            path,
                            f"UndeclaredParam: {engine} body references ${{{used}}} "
                            "which is not declared in params",
                        )
                    )

    for name, group in catalog.groups.items():
        gpath = f"{GROUPS_DIR}/{name}"
        if not group.blocks:
            findings.append(Finding("error", gpath, "EmptyGroup: group lists no blocks"))
        seen: set[str] = set()
        for ref in group.blocks:
            if ref in seen:
                findings.append(
                    Finding("error", gpath, f"DuplicateGroupMember: {ref} listed more than once")
                )
            seen.add(ref)
            if ref not in catalog.blocks:
                findings.append(
                    Finding("error", gpath, f"DanglingRef: group references missing block {ref}")
                )

    findings.sort(key=lambda f: (f.path, f.message))
    return findings


def expand_group(catalog: TemplateCatalog, group_name: str) -> list[BlockRef]:
    """Return the group's blocks in declared order."""
    group = catalog.groups.get(group_name)
    if group is None:
        raise GroupNotFound(f"group {group_name!r} not in catalog {catalog.version}")
    return [BlockRef(catalog.version, path) for path in group.blocks]


def render_block(block: TemplateBlock, engine: str, params: dict[str, object]) -> str:
    """Substitute ``${param}`` placeholders into the block's engine body.

    Values win over declared defaults; a required parameter with neither
    raises MissingParam. The result never contains residual placeholders.
    """
    body = block.engines.get(engine)
    if body is None:
        raise EngineUnsupported(f"block {block.name!r} has no body for engine {engine!r}")

    values: dict[str, str] = {}
    for param in block.params:
        if param.name in params:
            values[param.name] = str(params[param.name])
        elif param.default is not None:
            values[param.name] = param.default
        elif param.required:
            raise MissingParam(param.name)

    def _substitute(match: re.Match) -> str:
        name = match.group(1)
        if name not in values:
            raise MissingParam(name)
        return values[name]

    return _PLACEHOLDER_RE.sub(_substitute, body)
