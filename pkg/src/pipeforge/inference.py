"""Golden-path selection: FactSet + catalog -> engine-agnostic PipelinePlan.

Selection rules:

- every detected language with a catalog group contributes that group's
  blocks, in group order;
- test-stage jobs survive only when the FactSet holds test evidence;
- each dependency manifest adds one SCA job (or a single generic one when
  ``sca_per_manifest`` is off);
- IaC evidence adds a misconfiguration-scan SAST job.

An empty FactSet yields an empty plan with a diagnostic, never an error.
All functions here are pure over immutable inputs.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import yaml

from .catalog import CANONICAL_STAGES, BlockRef, TemplateBlock, TemplateCatalog
from .errors import NoCatalogGroup, UnknownStage
from .scanner import FactSet

# IaC kind -> block path of the misconfiguration scanner.
IAC_SAST_BLOCKS: dict[str, str] = {"terraform": "sast/tfsec"}

# Block path prefix for per-manifest SCA jobs (path = "sca/<manifest id>")
# and the single catch-all scanner used when sca_per_manifest is off.
SCA_PREFIX = "sca/"
GENERIC_SCA_BLOCK = "sca/dependency-scan"

NO_MATCH_DIAGNOSTIC = "no golden path matched"


@dataclass
class PlanPolicy:
    forbid_shell: bool = False
    sca_per_manifest: bool = True
    default_params: dict[str, object] = field(default_factory=dict)
    strict: bool = False


@dataclass(frozen=True)
class PlanJob:
    ref: BlockRef
    params: dict[str, str]
    stage: str


@dataclass(frozen=True)
class PipelinePlan:
    jobs: tuple[PlanJob, ...]
    stages: tuple[str, ...]
    source_facts: str
    catalog_version: str
    diagnostics: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "catalog_version": self.catalog_version,
            "diagnostics": list(self.diagnostics),
            "jobs": [
                {"params": dict(sorted(j.params.items())), "path": j.ref.path, "stage": j.stage}
                for j in self.jobs
            ],
            "source_facts": self.source_facts,
            "stages": list(self.stages),
        }

    def to_yaml(self) -> str:
        """Canonical serialization: sorted mappings, declared job order."""
        return yaml.safe_dump(self.to_dict(), sort_keys=True, default_flow_style=False)

    def digest(self) -> str:
        return hashlib.sha256(self.to_yaml().encode("utf-8")).hexdigest()


def stage_order(stage_names: set[str] | frozenset[str]) -> list[str]:
    """Order a stage set along the canonical build..deploy axis."""
    unknown = set(stage_names) - set(CANONICAL_STAGES)
    if unknown:
        raise UnknownStage(f"unknown stages: {', '.join(sorted(unknown))}")
    return [s for s in CANONICAL_STAGES if s in stage_names]


def plan_pipeline(
    facts: FactSet,
    catalog: TemplateCatalog,
    policy: PlanPolicy | None = None,
) -> PipelinePlan:
    policy = policy or PlanPolicy()
    diagnostics: list[str] = []
    jobs: list[PlanJob] = []
    seen_paths: set[str] = set()

    def add(path: str, block: TemplateBlock) -> None:
        if path in seen_paths:
            return
        seen_paths.add(path)
        jobs.append(
            PlanJob(
                ref=BlockRef(catalog.version, path),
                params=_resolve_params(block, policy),
                stage=block.stage,
            )
        )

    groups_by_language = {
        g.language: g for _, g in sorted(catalog.groups.items())
    }

    # Golden path per detected language.
    for language in sorted(facts.languages):
        group = groups_by_language.get(language)
        if group is None:
            if policy.strict:
                raise NoCatalogGroup(language)
            diagnostics.append(f"no catalog group for language {language}")
            continue
        for path in group.blocks:
            block = catalog.blocks[path]
            if block.stage == "test" and not facts.tests:
                continue  # no test step when no tests are found
            add(path, block)

    # One SCA job per manifest (or one catch-all scan).
    if facts.manifests:
        if policy.sca_per_manifest:
            for manifest in sorted(facts.manifests):
                path = SCA_PREFIX + manifest
                block = catalog.blocks.get(path)
                if block is None:
                    diagnostics.append(f"no sca block for manifest {manifest}")
                    continue
                add(path, block)
        else:
            block = catalog.blocks.get(GENERIC_SCA_BLOCK)
            if block is None:
                diagnostics.append("no generic sca block in catalog")
            else:
                add(GENERIC_SCA_BLOCK, block)

    # Misconfiguration scan per IaC kind.
    for kind in sorted(facts.iac):
        path = IAC_SAST_BLOCKS.get(kind)
        block = catalog.blocks.get(path) if path else None
        if block is None:
            diagnostics.append(f"no sast block for iac kind {kind}")
            continue
        add(path, block)

    used_stages = {j.stage for j in jobs}
    stages = stage_order(used_stages)
    order = {s: i for i, s in enumerate(CANONICAL_STAGES)}
    jobs.sort(key=lambda j: order[j.stage])  # stable: keeps group order within a stage

    if not jobs:
        diagnostics.append(NO_MATCH_DIAGNOSTIC)

    return PipelinePlan(
        jobs=tuple(jobs),
        stages=tuple(stages),
        source_facts=facts.digest(),
        catalog_version=catalog.version,
        diagnostics=tuple(diagnostics),
    )


def _resolve_params(block: TemplateBlock, policy: PlanPolicy) -> dict[str, str]:
    resolved: dict[str, str] = {}
    for param in block.params:
        if param.name in policy.default_params:
            resolved[param.name] = str(policy.default_params[param.name])
        elif param.default is not None:
            resolved[param.name] = param.default
    return resolved
