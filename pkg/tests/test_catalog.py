import pytest

from pipeforge.catalog import (
    BlockParam,
    TemplateBlock,
    expand_group,
    load_catalog,
    render_block,
    validate_catalog,
)
from pipeforge.errors import (
    CatalogNotFound,
    EngineUnsupported,
    GroupNotFound,
    MissingParam,
    VersionNotFound,
)

from conftest import BROKEN_CATALOGS, CATALOG_ROOT


class TestLoadCatalog:
    def test_fixture_layout(self, catalog):
        assert catalog.version == "1.0"
        for path in (
            "go/build/1.21",
            "go/build/1.22",
            "go/test/make-test",
            "python/lint/pylint-2.17",
            "sast/trivy",
        ):
            assert path in catalog.blocks
        assert set(catalog.groups) == {"go", "python"}

    def test_language_tag_from_path(self, catalog):
        assert catalog.blocks["go/build/1.22"].language == "go"
        assert catalog.blocks["sast/trivy"].language is None

    def test_version_not_found(self):
        with pytest.raises(VersionNotFound):
            load_catalog(CATALOG_ROOT, "9.9")

    def test_catalog_not_found(self, tmp_path):
        with pytest.raises(CatalogNotFound):
            load_catalog(tmp_path / "absent")

    def test_latest_uses_natural_ordering(self, tmp_path):
        # Hand-derived: 1.10 > 1.2 > 1.0 under natural ordering.
        for version in ("1.0", "1.10", "1.2"):
            d = tmp_path / version / "sast"
            d.mkdir(parents=True)
            (d / "probe.yml").write_text(
                "name: probe\nstage: sast\nengines:\n  gitlab: |\n    script:\n      - true\n"
            )
        assert load_catalog(tmp_path, "latest").version == "1.10"

    def test_round_trip_preserves_bytes(self, catalog):
        version_dir = CATALOG_ROOT / catalog.version
        for path, block in catalog.blocks.items():
            on_disk = (version_dir / f"{path}.yml").read_text()
            assert block.serialize() == on_disk.rstrip("\n") + "\n"


class TestValidateCatalog:
    def test_fixture_is_valid(self, catalog):
        assert validate_catalog(catalog) == []

    @pytest.mark.parametrize(
        "name,token",
        [
            ("dangling-ref", "DanglingRef"),
            ("undeclared-param", "UndeclaredParam"),
            ("bad-stage", "UnknownStage"),
            ("duplicate-member", "DuplicateGroupMember"),
            ("missing-engine", "NoEngineBody"),
        ],
    )
    def test_broken_catalogs(self, name, token):
        broken = load_catalog(BROKEN_CATALOGS / name, "1.0")
        findings = validate_catalog(broken)
        assert len(findings) == 1
        assert findings[0].severity == "error"
        assert token in findings[0].message

    def test_findings_sorted_by_path(self, catalog):
        # Merge two broken catalogs' defects into one synthetic catalog.
        a = load_catalog(BROKEN_CATALOGS / "bad-stage", "1.0")
        b = load_catalog(BROKEN_CATALOGS / "missing-engine", "1.0")
        from pipeforge.catalog import TemplateCatalog

        merged = TemplateCatalog(
            version="1.0", blocks={**a.blocks, **b.blocks}, groups={}
        )
        findings = validate_catalog(merged)
        assert [f.path for f in findings] == sorted(f.path for f in findings)
        assert len(findings) == 2


class TestExpandGroup:
    def test_go_group_order(self, catalog):
        refs = expand_group(catalog, "go")
        assert [r.path for r in refs] == [
            "go/build/1.22",
            "go/lint/vet",
            "go/lint/staticcheck",
            "go/test/make-test",
            "sast/trivy",
        ]
        assert all(r.version == "1.0" for r in refs)

    def test_missing_group(self, catalog):
        with pytest.raises(GroupNotFound):
            expand_group(catalog, "nope")

    def test_singleton_group(self, tmp_path):
        d = tmp_path / "1.0"
        (d / "sast").mkdir(parents=True)
        (d / "groups").mkdir()
        (d / "sast" / "only.yml").write_text(
            "name: only\nstage: sast\nengines:\n  gitlab: |\n    script:\n      - true\n"
        )
        (d / "groups" / "solo.yml").write_text("name: solo\nlanguage: X\nblocks:\n  - sast/only\n")
        cat = load_catalog(tmp_path, "1.0")
        assert [r.path for r in expand_group(cat, "solo")] == ["sast/only"]

    def test_members_subset_of_blocks(self, catalog):
        for name in catalog.groups:
            for ref in expand_group(catalog, name):
                assert ref.path in catalog.blocks


class TestRenderBlock:
    def test_pylint_version_substituted(self, catalog):
        block = catalog.blocks["python/lint/pylint-2.17"]
        text = render_block(block, "gitlab", {"pylint_version": "2.17"})
        assert "2.17" in text
        assert "${" not in text

    def test_engine_unsupported(self):
        block = TemplateBlock("x", "build", (), {"gitlab": "script:\n- true\n"})
        with pytest.raises(EngineUnsupported):
            render_block(block, "github", {})

    def test_missing_required_param(self):
        block = TemplateBlock(
            "x",
            "build",
            (BlockParam("go_version", default=None, required=True),),
            {"gitlab": "image: golang:${go_version}\n"},
        )
        with pytest.raises(MissingParam):
            render_block(block, "gitlab", {})

    def test_render_is_pure(self, catalog):
        block = catalog.blocks["sast/trivy"]
        first = render_block(block, "gitlab", {"severity": "LOW"})
        second = render_block(block, "gitlab", {"severity": "LOW"})
        assert first == second

    def test_defaults_render_placeholder_free(self, catalog):
        for path, block in catalog.blocks.items():
            for engine in block.engines:
                text = render_block(block, engine, {})
                assert "${" not in text, path
