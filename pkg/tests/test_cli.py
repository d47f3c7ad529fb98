import json

import pytest
import yaml

from pipeforge.cli import main

from conftest import BROKEN_CATALOGS, CATALOG_ROOT, GO_SERVICE, PYTHON_LIB


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestScanVerb:
    def test_yaml_output(self, capsys):
        code, out, _ = run(capsys, "scan", GO_SERVICE)
        assert code == 0
        facts = yaml.safe_load(out)
        assert facts["languages"] == {"Go": 3}
        assert facts["tests"] == ["go-native", "make-test"]

    def test_json_output(self, capsys):
        code, out, _ = run(capsys, "scan", GO_SERVICE, "--format", "json")
        assert code == 0
        assert json.loads(out)["manifests"] == ["go-mod"]

    def test_missing_path(self, capsys):
        code, _, err = run(capsys, "scan", "/definitely/not/here")
        assert code == 2
        assert "error" in err


class TestPlanVerb:
    def test_plan_output(self, capsys):
        code, out, _ = run(capsys, "plan", GO_SERVICE, "--catalog", CATALOG_ROOT)
        assert code == 0
        plan = yaml.safe_load(out)
        assert [j["path"] for j in plan["jobs"]][0] == "go/build/1.22"
        assert plan["stages"] == ["build", "lint", "test", "sast", "sca"]

    def test_strict_unknown_language(self, capsys, tmp_path):
        (tmp_path / "prog.rs").write_text("fn main() {}\n")
        code, _, err = run(
            capsys, "plan", tmp_path, "--catalog", CATALOG_ROOT, "--strict"
        )
        assert code == 2
        assert "Rust" in err


class TestGenerateAndVerify:
    def test_generate_then_verify(self, capsys, tmp_path):
        out_file = tmp_path / "ci.yml"
        code, out, _ = run(
            capsys,
            "generate", GO_SERVICE,
            "--catalog", CATALOG_ROOT,
            "--engine", "gitlab",
            "--mode", "inline",
            "--out", out_file,
        )
        assert code == 0
        assert str(out_file) in out
        code, out, _ = run(capsys, "verify", out_file)
        assert code == 0
        assert out.startswith("SealedValid")

    def test_verify_detects_manual_edit(self, capsys, tmp_path):
        out_file = tmp_path / "ci.yml"
        run(capsys, "generate", GO_SERVICE, "--catalog", CATALOG_ROOT,
            "--engine", "gitlab", "--out", out_file)
        text = out_file.read_text().replace("go build", "go run")
        out_file.write_text(text)
        code, out, _ = run(capsys, "verify", out_file)
        assert code == 1
        assert out.startswith("Tampered")

    def test_verify_unsealed(self, capsys, tmp_path):
        raw = tmp_path / "plain.yml"
        raw.write_text("stages: []\n")
        code, out, _ = run(capsys, "verify", raw)
        assert code == 5
        assert out.startswith("Unsealed")

    def test_generate_to_stdout(self, capsys):
        code, out, _ = run(
            capsys, "generate", GO_SERVICE, "--catalog", CATALOG_ROOT,
            "--engine", "gitlab", "--out", "-",
        )
        assert code == 0
        assert out.startswith("# pipeforge-digest: v1; sha256=")

    def test_generate_default_location(self, capsys, tmp_path):
        import shutil

        work = tmp_path / "checkout"
        shutil.copytree(PYTHON_LIB, work)
        code, out, _ = run(
            capsys, "generate", work, "--catalog", CATALOG_ROOT, "--engine", "github"
        )
        assert code == 0
        assert (work / ".github" / "workflows" / "pipeforge.yml").is_file()

    def test_forbid_shell_exit_code(self, capsys, tmp_path):
        code, _, err = run(
            capsys, "generate", GO_SERVICE, "--catalog", CATALOG_ROOT,
            "--engine", "github", "--forbid-shell", "--out", tmp_path / "x.yml",
        )
        assert code == 3
        assert "go-test" in err


class TestCatalogValidateVerb:
    def test_valid_catalog(self, capsys):
        code, out, _ = run(capsys, "catalog", "validate", CATALOG_ROOT)
        assert code == 0
        assert out == ""

    def test_broken_catalog(self, capsys):
        code, out, _ = run(capsys, "catalog", "validate", BROKEN_CATALOGS / "dangling-ref")
        assert code == 4
        assert "DanglingRef" in out

    def test_missing_version(self, capsys):
        code, _, err = run(
            capsys, "catalog", "validate", CATALOG_ROOT, "--catalog-version", "9.9"
        )
        assert code == 2


class TestRoiVerb:
    def test_case_study(self, capsys):
        code, out, _ = run(capsys, "roi", "--manual", "150", "--setup", "200")
        assert code == 0
        assert out.strip() == "2"

    def test_per_use(self, capsys):
        code, out, _ = run(
            capsys, "roi", "--manual", "100", "--setup", "350", "--per-use", "10"
        )
        assert code == 0
        assert out.strip() == "4"

    def test_never_breaks_even(self, capsys):
        code, _, err = run(capsys, "roi", "--manual", "1", "--setup", "10", "--per-use", "2")
        assert code == 2
        assert "never" in err.lower()


class TestUsageErrors:
    def test_unknown_command_exits_2(self):
        with pytest.raises(SystemExit) as err:
            main(["frobnicate"])
        assert err.value.code == 2

    def test_missing_required_flag(self):
        with pytest.raises(SystemExit) as err:
            main(["generate", "."])
        assert err.value.code == 2
