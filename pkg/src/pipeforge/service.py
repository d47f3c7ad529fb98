"""HTTP portal service: registry CRUD, scanning, and pipeline provisioning.

All routes live under /api/v1 with JSON bodies. The companion single-page
UI (when built) is served statically at /. Provisioning is regenerate-
overwrites: a new provision replaces the previous pipeline file and entity
state unconditionally.
"""

from __future__ import annotations

from pathlib import Path
from typing import Literal

from fastapi import APIRouter, FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import registry as reg
from .catalog import load_catalog
from .errors import (
    DuplicateName,
    NotADirectory,
    NotFound,
    PathNotFound,
    PipeforgeError,
    PolicyViolation,
    ReferentialIntegrity,
    RegistryBusy,
)
from .inference import PlanPolicy, plan_pipeline
from .integrity import HEADER_RE
from .renderer import OUTPUT_PATHS, RenderOptions, render
from .scanner import scan_repository

DEFAULT_PORT = 7780


# -- request / response models -------------------------------------------------


class RequirementsModel(BaseModel):
    lint_required: bool = True
    coverage_target: float = Field(default=0, ge=0, le=100)
    security_scan_required: bool = True


class ApplicationIn(BaseModel):
    name: str = Field(min_length=1)
    requirements: RequirementsModel = RequirementsModel()
    repository_ids: list[str] = []


class ApplicationOut(ApplicationIn):
    id: str


class RepositoryIn(BaseModel):
    name: str = Field(min_length=1)
    url: str = ""
    path: str = ""
    languages: list[str] = []
    toolchains: list[str] = []
    engine_id: str = ""
    application_id: str = ""


class RepositoryOut(RepositoryIn):
    id: str


class CIEngineIn(BaseModel):
    name: str = Field(min_length=1)
    kind: Literal["gitlab", "github"]


class CIEngineOut(CIEngineIn):
    id: str


class PipelineIn(BaseModel):
    repository_id: str
    engine_id: str
    template_refs: list[str] = []
    rendered_digest: str = ""
    catalog_version: str = ""
    name: str = ""


class PipelineOut(PipelineIn):
    id: str


class ScanRequest(BaseModel):
    path: str = ""


class FactSetModel(BaseModel):
    languages: dict[str, int]
    manifests: list[str]
    make_targets: list[str]
    tests: list[str]
    iac: list[str]
    file_count: int


class ProvisionRequest(BaseModel):
    engine_id: str
    mode: Literal["include", "inline"] = "inline"
    write_back: bool = False


class ProvisionResult(BaseModel):
    pipeline_id: str
    sealed_text: str
    plan: dict[str, list[str]]
    catalog_version: str


class BlockInfo(BaseModel):
    path: str
    name: str
    stage: str
    language: str | None = None
    engines: list[str]
    params: list[str]


class GroupInfo(BaseModel):
    name: str
    language: str
    blocks: list[str]


class HealthOut(BaseModel):
    status: str


# -- entity conversion ----------------------------------------------------------


def _to_application(m: ApplicationIn, entity_id: str = "") -> reg.Application:
    return reg.Application(
        name=m.name,
        requirements=reg.Requirements(**m.requirements.model_dump()),
        repository_ids=tuple(m.repository_ids),
        id=entity_id,
    )


def _to_repository(m: RepositoryIn, entity_id: str = "") -> reg.Repository:
    return reg.Repository(
        name=m.name,
        url=m.url,
        path=m.path,
        languages=tuple(m.languages),
        toolchains=tuple(m.toolchains),
        engine_id=m.engine_id,
        application_id=m.application_id,
        id=entity_id,
    )


def _to_pipeline(m: PipelineIn, entity_id: str = "") -> reg.CIPipeline:
    return reg.CIPipeline(
        repository_id=m.repository_id,
        engine_id=m.engine_id,
        template_refs=tuple(m.template_refs),
        rendered_digest=m.rendered_digest,
        catalog_version=m.catalog_version,
        name=m.name,
        id=entity_id,
    )


def _out(entity) -> dict:
    import dataclasses

    return dataclasses.asdict(entity)


# -- app factory -----------------------------------------------------------------


def create_app(
    registry_path: str | Path,
    catalog_root: str | Path,
    catalog_version: str = "latest",
    catalog_locator: str = "pipeline-blocks",
    forbid_shell: bool = False,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="pipeforge", version="0.1.0")
    registry = reg.Registry(registry_path)
    catalog = load_catalog(catalog_root, catalog_version)
    app.state.registry = registry
    app.state.catalog = catalog
    app.state.catalog_locator = catalog_locator
    app.state.forbid_shell = forbid_shell

    api = APIRouter(prefix="/api/v1")

    @api.get("/health", response_model=HealthOut)
    def health():
        return HealthOut(status="ok")

    # -- applications --

    @api.post("/applications", response_model=ApplicationOut, status_code=201)
    def create_application(body: ApplicationIn):
        return _out(registry.get(registry.upsert(_to_application(body))))

    @api.get("/applications", response_model=list[ApplicationOut])
    def list_applications():
        return [_out(a) for a in registry.list("applications")]

    @api.get("/applications/{entity_id}", response_model=ApplicationOut)
    def get_application(entity_id: str):
        return _out(registry.get(entity_id))

    @api.delete("/applications/{entity_id}", status_code=204)
    def delete_application(entity_id: str):
        registry.delete(entity_id)

    # -- repositories --

    @api.post("/repositories", response_model=RepositoryOut, status_code=201)
    def create_repository(body: RepositoryIn):
        return _out(registry.get(registry.upsert(_to_repository(body))))

    @api.get("/repositories", response_model=list[RepositoryOut])
    def list_repositories(application_id: str | None = None, engine_id: str | None = None):
        return [
            _out(r)
            for r in registry.list(
                "repositories", application_id=application_id, engine_id=engine_id
            )
        ]

    @api.get("/repositories/{entity_id}", response_model=RepositoryOut)
    def get_repository(entity_id: str):
        return _out(registry.get(entity_id))

    @api.delete("/repositories/{entity_id}", status_code=204)
    def delete_repository(entity_id: str):
        registry.delete(entity_id)

    @api.post("/repositories/{entity_id}/scan", response_model=FactSetModel)
    def scan_repository_route(entity_id: str, body: ScanRequest):
        repo = registry.get(entity_id)
        path = body.path or repo.path
        if not path:
            raise PathNotFound("repository has no local path to scan")
        return scan_repository(path).to_dict()

    @api.post("/repositories/{entity_id}/provision", response_model=ProvisionResult)
    def provision_repository(entity_id: str, body: ProvisionRequest):
        repo = registry.get(entity_id)
        engine = registry.get(body.engine_id)
        if not isinstance(engine, reg.CIEngine):
            raise NotFound(f"{body.engine_id!r} is not a CI engine")
        if not repo.path:
            raise PathNotFound("repository has no local path to provision from")

        facts = scan_repository(repo.path)
        plan = plan_pipeline(facts, catalog, PlanPolicy(forbid_shell=app.state.forbid_shell))
        rendered = render(
            plan,
            RenderOptions(
                engine=engine.kind,
                mode=body.mode,
                catalog_locator=app.state.catalog_locator,
                forbid_shell=app.state.forbid_shell,
            ),
            catalog,
        )
        digest = HEADER_RE.match(rendered.text.splitlines()[0]).group(1)

        existing = registry.list(
            "ci_pipelines", repository_id=repo.id, engine_id=engine.id
        )
        pipeline = reg.CIPipeline(
            repository_id=repo.id,
            engine_id=engine.id,
            template_refs=tuple(j.ref.path for j in plan.jobs),
            rendered_digest=digest,
            catalog_version=plan.catalog_version,
            name=f"{repo.name}-{engine.kind}",
            id=existing[0].id if existing else "",
        )
        pipeline_id = registry.upsert(pipeline)

        if body.write_back:
            target = Path(repo.path) / OUTPUT_PATHS[engine.kind]
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(rendered.text, encoding="utf-8", newline="\n")

        summary: dict[str, list[str]] = {stage: [] for stage in plan.stages}
        for job in plan.jobs:
            summary[job.stage].append(catalog.blocks[job.ref.path].name)
        return ProvisionResult(
            pipeline_id=pipeline_id,
            sealed_text=rendered.text,
            plan=summary,
            catalog_version=plan.catalog_version,
        )

    # -- engines --

    @api.post("/ci-engines", response_model=CIEngineOut, status_code=201)
    def create_engine(body: CIEngineIn):
        return _out(registry.get(registry.upsert(reg.CIEngine(name=body.name, kind=body.kind))))

    @api.get("/ci-engines", response_model=list[CIEngineOut])
    def list_engines():
        return [_out(e) for e in registry.list("ci_engines")]

    @api.get("/ci-engines/{entity_id}", response_model=CIEngineOut)
    def get_engine(entity_id: str):
        return _out(registry.get(entity_id))

    @api.delete("/ci-engines/{entity_id}", status_code=204)
    def delete_engine(entity_id: str):
        registry.delete(entity_id)

    # -- pipelines --

    @api.post("/pipelines", response_model=PipelineOut, status_code=201)
    def create_pipeline(body: PipelineIn):
        return _out(registry.get(registry.upsert(_to_pipeline(body))))

    @api.get("/pipelines", response_model=list[PipelineOut])
    def list_pipelines(
        template: str | None = None,
        repository_id: str | None = None,
        engine_id: str | None = None,
    ):
        pipelines = registry.list(
            "ci_pipelines", repository_id=repository_id, engine_id=engine_id
        )
        if template is not None:
            pipelines = [p for p in pipelines if template in p.template_refs]
        return [_out(p) for p in pipelines]

    @api.get("/pipelines/{entity_id}", response_model=PipelineOut)
    def get_pipeline(entity_id: str):
        return _out(registry.get(entity_id))

    @api.delete("/pipelines/{entity_id}", status_code=204)
    def delete_pipeline(entity_id: str):
        registry.delete(entity_id)

    # -- catalog listings --

    @api.get("/catalog/blocks", response_model=list[BlockInfo])
    def list_blocks():
        return [
            BlockInfo(
                path=path,
                name=block.name,
                stage=block.stage,
                language=block.language,
                engines=sorted(block.engines),
                params=[p.name for p in block.params],
            )
            for path, block in sorted(catalog.blocks.items())
        ]

    @api.get("/catalog/groups", response_model=list[GroupInfo])
    def list_groups():
        return [
            GroupInfo(name=g.name, language=g.language, blocks=list(g.blocks))
            for _, g in sorted(catalog.groups.items())
        ]

    app.include_router(api)
    _register_error_handlers(app)

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def _register_error_handlers(app: FastAPI) -> None:
    def _json(status: int, exc: Exception, **extra) -> JSONResponse:
        return JSONResponse(status_code=status, content={"detail": str(exc), **extra})

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.exception_handler(NotFound)
    async def not_found(request: Request, exc: NotFound):
        return _json(404, exc)

    @app.exception_handler(DuplicateName)
    async def duplicate_name(request: Request, exc: DuplicateName):
        return _json(409, exc)

    @app.exception_handler(ReferentialIntegrity)
    async def referential_integrity(request: Request, exc: ReferentialIntegrity):
        return _json(409, exc)

    @app.exception_handler(RegistryBusy)
    async def busy(request: Request, exc: RegistryBusy):
        return _json(409, exc)

    @app.exception_handler(PolicyViolation)
    async def policy_violation(request: Request, exc: PolicyViolation):
        return _json(422, exc, block=exc.block)

    @app.exception_handler(PathNotFound)
    @app.exception_handler(NotADirectory)
    async def bad_path(request: Request, exc: PipeforgeError):
        return _json(400, exc)

    @app.exception_handler(ValueError)
    async def invalid_value(request: Request, exc: ValueError):
        return _json(400, exc)
