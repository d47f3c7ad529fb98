"""Serialize a PipelinePlan into sealed, engine-specific pipeline text.

Two engines (gitlab, github), two modes:

- include: reference catalog template files, parameter values carried as
  per-job variables (gitlab) or workflow-call inputs (github);
- inline: embed fully resolved job bodies.

Emission is byte-deterministic: top-level key order is fixed (stages,
include/jobs, then per-job mappings) and job body keys keep their authored
order. The output is sealed with a digest header so later edits are
detectable; a generator comment right after the header records the
generator and catalog versions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import yaml

from . import __version__
from .catalog import Finding, TemplateCatalog, render_block
from .errors import EngineUnsupported, PolicyViolation, UnresolvedRef
from .inference import PipelinePlan
from .integrity import seal

ENGINE_GITLAB = "gitlab"
ENGINE_GITHUB = "github"
ENGINES = (ENGINE_GITLAB, ENGINE_GITHUB)

MODE_INCLUDE = "include"
MODE_INLINE = "inline"

# Conventional output location per engine, relative to the repository root.
OUTPUT_PATHS = {
    ENGINE_GITLAB: ".gitlab-ci.yml",
    ENGINE_GITHUB: ".github/workflows/pipeforge.yml",
}

GITHUB_WORKFLOW_NAME = "pipeforge"

# Top-level gitlab keys that are configuration, not jobs.
_GITLAB_RESERVED = {
    "stages",
    "include",
    "variables",
    "default",
    "workflow",
    "image",
    "services",
    "before_script",
    "after_script",
    "cache",
}


@dataclass(frozen=True)
class RenderOptions:
    engine: str
    mode: str = MODE_INLINE
    catalog_locator: str = ""
    forbid_shell: bool = False


@dataclass(frozen=True)
class RenderedPipeline:
    engine: str
    text: str
    plan_digest: str
    generator_version: str


def render(plan: PipelinePlan, options: RenderOptions, catalog: TemplateCatalog) -> RenderedPipeline:
    if options.engine not in ENGINES:
        raise EngineUnsupported(f"unknown engine {options.engine!r}")
    if options.mode not in (MODE_INCLUDE, MODE_INLINE):
        raise ValueError(f"unknown render mode {options.mode!r}")
    if options.mode == MODE_INCLUDE and not options.catalog_locator:
        raise ValueError("include mode requires a catalog locator")

    resolved = []
    for job in plan.jobs:
        block = catalog.blocks.get(job.ref.path)
        if block is None:
            raise UnresolvedRef(f"plan references unknown block {job.ref.path}")
        if options.engine not in block.engines:
            raise EngineUnsupported(
                f"block {job.ref.path} has no body for engine {options.engine!r}"
            )
        if options.engine == ENGINE_GITHUB and options.forbid_shell:
            if _uses_shell(block.engines[ENGINE_GITHUB]):
                raise PolicyViolation(block.name, "github body uses the run keyword")
        resolved.append((job, block))

    if options.engine == ENGINE_GITLAB:
        doc = _gitlab_document(plan, options, catalog, resolved)
    else:
        doc = _github_document(plan, options, catalog, resolved)

    body = (
        f"# pipeforge: generator {__version__}; catalog {plan.catalog_version}\n"
        + _emit_yaml(doc)
    )
    return RenderedPipeline(
        engine=options.engine,
        text=seal(body),
        plan_digest=plan.digest(),
        generator_version=__version__,
    )


def _emit_yaml(doc: dict) -> str:
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=False, width=4096)


def _job_name(block) -> str:
    return block.name


def _gitlab_document(plan, options, catalog, resolved) -> dict:
    doc: dict[str, Any] = {"stages": list(plan.stages)}
    if options.mode == MODE_INCLUDE:
        doc["include"] = [
            {
                "project": options.catalog_locator,
                "file": f"/{catalog.version}/{job.ref.path}.yml",
            }
            for job, _ in resolved
        ]
        for job, block in resolved:
            doc[_job_name(block)] = {
                "stage": job.stage,
                "variables": {name.upper(): value for name, value in sorted(job.params.items())},
            }
    else:
        for job, block in resolved:
            body = _load_body(job, block, options.engine)
            entry: dict[str, Any] = {"stage": job.stage}
            for key, value in body.items():
                if key != "stage":
                    entry[key] = value
            doc[_job_name(block)] = entry
    return doc


def _github_document(plan, options, catalog, resolved) -> dict:
    jobs: dict[str, Any] = {}
    previous_stage_jobs: list[str] = []
    current_stage: str | None = None
    current_stage_jobs: list[str] = []

    for job, block in resolved:
        if job.stage != current_stage:
            if current_stage is not None:
                previous_stage_jobs = current_stage_jobs
            current_stage = job.stage
            current_stage_jobs = []
        name = _job_name(block)
        current_stage_jobs.append(name)

        entry: dict[str, Any] = {}
        if previous_stage_jobs:
            entry["needs"] = list(previous_stage_jobs)
        if options.mode == MODE_INCLUDE:
            entry["uses"] = (
                f"{options.catalog_locator}/{catalog.version}/{job.ref.path}.yml"
                f"@{catalog.version}"
            )
            if job.params:
                entry["with"] = dict(sorted(job.params.items()))
        else:
            for key, value in _load_body(job, block, options.engine).items():
                if key != "needs":
                    entry[key] = value
        jobs[name] = entry

    return {"name": GITHUB_WORKFLOW_NAME, "on": {"push": {}}, "jobs": jobs}


def _load_body(job, block, engine: str) -> dict:
    text = render_block(block, engine, job.params)
    body = yaml.safe_load(text)
    if not isinstance(body, dict):
        raise UnresolvedRef(f"block {job.ref.path} {engine} body is not a mapping")
    return body


def _uses_shell(body_text: str) -> bool:
    try:
        data = yaml.safe_load(body_text)
    except yaml.YAMLError:
        return True  # unparseable body: refuse under a shell ban
    return _contains_run_key(data)


def _contains_run_key(node: object) -> bool:
    if isinstance(node, dict):
        return any(
            key == "run" or _contains_run_key(value) for key, value in node.items()
        )
    if isinstance(node, list):
        return any(_contains_run_key(item) for item in node)
    return False


def parse_check(text: str, engine: str) -> list[Finding]:
    """Shape-check pipeline text. Empty findings list means ok.

    The digest header is a YAML comment, so sealed text can be passed
    directly.
    """
    findings: list[Finding] = []
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        return [Finding("error", "", f"ParseError: {exc}")]
    if not isinstance(data, dict):
        return [Finding("error", "", "ParseError: document is not a mapping")]

    if engine == ENGINE_GITLAB:
        stages = data.get("stages") or []
        for key, value in data.items():
            if key in _GITLAB_RESERVED:
                continue
            if not isinstance(value, dict):
                findings.append(Finding("error", str(key), "JobNotMapping: job is not a mapping"))
                continue
            stage = value.get("stage")
            if stage not in stages:
                findings.append(
                    Finding(
                        "error",
                        str(key),
                        f"UndeclaredStage: job uses stage {stage!r} not in the stages list",
                    )
                )
    elif engine == ENGINE_GITHUB:
        if not isinstance(data.get("jobs"), dict):
            findings.append(Finding("error", "", "MissingJobs: no top-level jobs mapping"))
    else:
        findings.append(Finding("error", "", f"UnknownEngine: {engine!r}"))

    findings.sort(key=lambda f: (f.path, f.message))
    return findings
