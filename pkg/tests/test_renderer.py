import yaml
import pytest

from pipeforge.catalog import load_catalog
from pipeforge.errors import EngineUnsupported, PolicyViolation, UnresolvedRef
from pipeforge.inference import PipelinePlan, PlanJob, plan_pipeline
from pipeforge.integrity import VerdictKind, verify
from pipeforge.renderer import RenderOptions, parse_check, render
from pipeforge.scanner import scan_repository

from conftest import GOLDEN


def strip_headers(text: str) -> str:
    return "\n".join(l for l in text.splitlines() if not l.startswith("#")) + "\n"


def job_names_gitlab(text: str) -> dict:
    data = yaml.safe_load(text)
    reserved = {"stages", "include", "variables", "default", "workflow"}
    return {k: v.get("stage") for k, v in data.items() if k not in reserved}


@pytest.fixture(scope="module")
def go_plan(catalog):
    facts = scan_repository("tests/fixtures/repos/go-service")
    return plan_pipeline(facts, catalog)


class TestRenderGitlab:
    def test_golden_inline(self, go_plan, catalog):
        out = render(go_plan, RenderOptions("gitlab", "inline"), catalog)
        golden = (GOLDEN / "go-service.gitlab-inline.yml").read_text()
        assert out.text == golden

    def test_inline_shape(self, go_plan, catalog):
        out = render(go_plan, RenderOptions("gitlab", "inline"), catalog)
        jobs = job_names_gitlab(out.text)
        assert jobs == {
            "go-build": "build",
            "go-vet": "lint",
            "go-staticcheck": "lint",
            "go-test": "test",
            "trivy": "sast",
            "sca-go-mod": "sca",
        }

    def test_empty_plan(self, catalog):
        plan = PipelinePlan((), (), "0" * 64, catalog.version)
        out = render(plan, RenderOptions("gitlab", "inline"), catalog)
        assert verify(out.text).kind is VerdictKind.SEALED_VALID
        data = yaml.safe_load(out.text)
        assert data == {"stages": []}

    def test_include_lists_catalog_files(self, go_plan, catalog):
        out = render(
            go_plan,
            RenderOptions("gitlab", "include", catalog_locator="platform/blocks"),
            catalog,
        )
        data = yaml.safe_load(out.text)
        files = [entry["file"] for entry in data["include"]]
        assert "/1.0/go/build/1.22.yml" in files
        assert all(entry["project"] == "platform/blocks" for entry in data["include"])
        assert data["go-build"]["variables"] == {"GO_VERSION": "1.22"}

    def test_include_requires_locator(self, go_plan, catalog):
        with pytest.raises(ValueError):
            render(go_plan, RenderOptions("gitlab", "include"), catalog)

    def test_mode_equivalence_jobs_and_stages(self, go_plan, catalog):
        inline = render(go_plan, RenderOptions("gitlab", "inline"), catalog)
        include = render(
            go_plan, RenderOptions("gitlab", "include", catalog_locator="x/y"), catalog
        )
        assert job_names_gitlab(inline.text) == job_names_gitlab(include.text)


class TestRenderGithub:
    def test_golden_inline(self, go_plan, catalog):
        out = render(go_plan, RenderOptions("github", "inline"), catalog)
        golden = (GOLDEN / "go-service.github-inline.yml").read_text()
        assert out.text == golden

    def test_needs_edges_point_to_earlier_stages(self, go_plan, catalog):
        out = render(go_plan, RenderOptions("github", "inline"), catalog)
        data = yaml.safe_load(out.text)
        stage_of = {}
        for job in go_plan.jobs:
            stage_of[catalog.blocks[job.ref.path].name] = list(go_plan.stages).index(job.stage)
        for name, body in data["jobs"].items():
            for dep in body.get("needs", []):
                assert stage_of[dep] < stage_of[name]

    def test_forbid_shell_policy(self, go_plan, catalog):
        with pytest.raises(PolicyViolation) as err:
            render(go_plan, RenderOptions("github", "inline", forbid_shell=True), catalog)
        assert err.value.block == "go-test"

    def test_forbid_shell_passes_without_run_blocks(self, catalog):
        clean = [j for j in plan_of_paths(catalog, ["go/build/1.22", "go/lint/vet"])]
        plan = PipelinePlan(tuple(clean), ("build", "lint"), "0" * 64, catalog.version)
        out = render(plan, RenderOptions("github", "inline", forbid_shell=True), catalog)
        assert "run:" not in out.text

    def test_include_mode_uses_reusable_workflows(self, go_plan, catalog):
        out = render(
            go_plan, RenderOptions("github", "include", catalog_locator="org/blocks"), catalog
        )
        data = yaml.safe_load(out.text)
        build = data["jobs"]["go-build"]
        assert build["uses"] == "org/blocks/1.0/go/build/1.22.yml@1.0"
        assert build["with"] == {"go_version": "1.22"}

    def test_mode_equivalence_job_names(self, go_plan, catalog):
        inline = render(go_plan, RenderOptions("github", "inline"), catalog)
        include = render(
            go_plan, RenderOptions("github", "include", catalog_locator="o/b"), catalog
        )
        inline_jobs = yaml.safe_load(inline.text)["jobs"]
        include_jobs = yaml.safe_load(include.text)["jobs"]
        assert list(inline_jobs) == list(include_jobs)
        for name in inline_jobs:
            assert inline_jobs[name].get("needs") == include_jobs[name].get("needs")


def plan_of_paths(catalog, paths):
    from pipeforge.catalog import BlockRef

    jobs = []
    for path in paths:
        block = catalog.blocks[path]
        params = {p.name: p.default for p in block.params if p.default is not None}
        jobs.append(PlanJob(BlockRef(catalog.version, path), params, block.stage))
    return jobs


class TestRenderContracts:
    def test_idempotent_bytes(self, go_plan, catalog):
        opts = RenderOptions("gitlab", "inline")
        assert render(go_plan, opts, catalog).text == render(go_plan, opts, catalog).text

    def test_unresolved_ref(self, catalog):
        from pipeforge.catalog import BlockRef

        plan = PipelinePlan(
            (PlanJob(BlockRef("1.0", "go/build/9.9"), {}, "build"),),
            ("build",),
            "0" * 64,
            "1.0",
        )
        with pytest.raises(UnresolvedRef):
            render(plan, RenderOptions("gitlab", "inline"), catalog)

    def test_engine_unsupported_block(self, tmp_path):
        d = tmp_path / "1.0" / "build"
        d.mkdir(parents=True)
        (d / "only-gitlab.yml").write_text(
            "name: only-gitlab\nstage: build\nengines:\n  gitlab: |\n    script:\n      - true\n"
        )
        cat = load_catalog(tmp_path, "1.0")
        plan = PipelinePlan(
            tuple(plan_of_paths(cat, ["build/only-gitlab"])), ("build",), "0" * 64, "1.0"
        )
        with pytest.raises(EngineUnsupported):
            render(plan, RenderOptions("github", "inline"), cat)

    def test_generator_comment_present(self, go_plan, catalog):
        out = render(go_plan, RenderOptions("gitlab", "inline"), catalog)
        lines = out.text.splitlines()
        assert lines[1].startswith("# pipeforge: generator ")
        assert "catalog 1.0" in lines[1]

    def test_rendered_text_verifies(self, go_plan, catalog):
        for engine in ("gitlab", "github"):
            for mode, locator in (("inline", ""), ("include", "o/b")):
                out = render(go_plan, RenderOptions(engine, mode, locator), catalog)
                assert verify(out.text).kind is VerdictKind.SEALED_VALID

    def test_plan_digest_recorded(self, go_plan, catalog):
        out = render(go_plan, RenderOptions("gitlab", "inline"), catalog)
        assert out.plan_digest == go_plan.digest()


class TestParseCheck:
    def test_rendered_outputs_pass(self, go_plan, catalog):
        for engine in ("gitlab", "github"):
            out = render(go_plan, RenderOptions(engine, "inline"), catalog)
            assert parse_check(out.text, engine) == []
            assert parse_check(strip_headers(out.text), engine) == []

    def test_malformed_yaml(self):
        findings = parse_check("jobs: [", "github")
        assert findings and "ParseError" in findings[0].message

    def test_undeclared_stage(self):
        text = "stages:\n- build\nmyjob:\n  stage: deploy\n  script:\n  - true\n"
        findings = parse_check(text, "gitlab")
        assert len(findings) == 1
        assert "UndeclaredStage" in findings[0].message
        assert findings[0].path == "myjob"

    def test_github_missing_jobs(self):
        findings = parse_check("name: x\n", "github")
        assert findings and "MissingJobs" in findings[0].message
