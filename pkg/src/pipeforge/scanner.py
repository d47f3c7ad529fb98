"""Repository scanner -- walks a working tree and extracts a FactSet.

The FactSet is a pure function of file names and makefile contents: the
walk order, timestamps, and file bodies (other than the makefile) never
influence it. Inference consumes the FactSet to pick golden-path blocks.
"""

from __future__ import annotations

import hashlib
import os
import re
from dataclasses import dataclass, field
from fnmatch import fnmatch
from pathlib import Path

import yaml

from .errors import NotADirectory, PathNotFound, TooManyFiles

DEFAULT_EXTENSION_MAP: dict[str, str] = {
    ".go": "Go",
    ".py": "Python",
    ".java": "Java",
    ".rs": "Rust",
    ".ts": "TypeScript",
    ".tf": "Terraform",
}

# Third-party / VCS directories whose contents must not count as project code.
DEFAULT_IGNORE_GLOBS: tuple[str, ...] = (".git/", "vendor/", "node_modules/", "target/")

# Manifest files recognized at the repository root only.
MANIFEST_FILES: dict[str, str] = {
    "go.mod": "go-mod",
    "requirements.txt": "requirements-txt",
    "pom.xml": "pom-xml",
}

IAC_EXTENSIONS: dict[str, str] = {".tf": "terraform"}

# GNU make lookup order.
MAKEFILE_NAMES: tuple[str, ...] = ("GNUmakefile", "makefile", "Makefile")

GO_TEST_SUFFIX = "_test.go"
TEST_EVIDENCE_GO = "go-native"
TEST_EVIDENCE_MAKE = "make-test"

# A rule line: target name at column 0 followed by ":" (but not ":=" which
# is a variable assignment).
_RULE_RE = re.compile(r"^([^\s:#=]+)\s*:(?!=)")


@dataclass
class ScanConfig:
    """Tunable knobs for a scan. Defaults match the stock golden paths."""

    ignore_globs: list[str] = field(default_factory=lambda: list(DEFAULT_IGNORE_GLOBS))
    extension_map: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_EXTENSION_MAP))
    max_files: int | None = None


@dataclass(frozen=True)
class FactSet:
    """Evidence extracted from one repository tree."""

    languages: dict[str, int]
    manifests: frozenset[str]
    make_targets: frozenset[str]
    tests: frozenset[str]
    iac: frozenset[str]
    file_count: int

    def to_dict(self) -> dict:
        return {
            "file_count": self.file_count,
            "iac": sorted(self.iac),
            "languages": dict(sorted(self.languages.items())),
            "make_targets": sorted(self.make_targets),
            "manifests": sorted(self.manifests),
            "tests": sorted(self.tests),
        }

    def to_yaml(self) -> str:
        """Canonical serialization: YAML mapping with sorted keys."""
        return yaml.safe_dump(self.to_dict(), sort_keys=True, default_flow_style=False)

    def digest(self) -> str:
        return hashlib.sha256(self.to_yaml().encode("utf-8")).hexdigest()

    @classmethod
    def empty(cls) -> "FactSet":
        return cls({}, frozenset(), frozenset(), frozenset(), frozenset(), 0)


def detect_languages(file_paths: list[str], config: ScanConfig | None = None) -> dict[str, int]:
    """Count files per language by extension; unknown extensions are ignored."""
    cfg = config or ScanConfig()
    counts: dict[str, int] = {}
    for path in file_paths:
        ext = os.path.splitext(path)[1].lower()
        language = cfg.extension_map.get(ext)
        if language is not None:
            counts[language] = counts.get(language, 0) + 1
    return dict(sorted(counts.items()))


def detect_make_targets(makefile_text: str) -> frozenset[str]:
    """Extract top-level rule target names from a makefile.

    Line-based on purpose: only the target names matter, not the full make
    grammar. Pattern rules and special targets starting with "." are skipped.
    """
    targets: set[str] = set()
    for line in makefile_text.splitlines():
        match = _RULE_RE.match(line)
        if match is None:
            continue
        name = match.group(1)
        if name.startswith(".") or "%" in name:
            continue
        targets.add(name)
    return frozenset(targets)


def detect_tests(
    file_paths: list[str],
    languages: dict[str, int],
    make_targets: frozenset[str],
) -> frozenset[str]:
    """Find test evidence: Go native test files and a make `test` target."""
    evidence: set[str] = set()
    if "Go" in languages and any(p.endswith(GO_TEST_SUFFIX) for p in file_paths):
        evidence.add(TEST_EVIDENCE_GO)
    if "test" in make_targets:
        evidence.add(TEST_EVIDENCE_MAKE)
    return frozenset(evidence)


def detect_manifests(file_paths: list[str]) -> frozenset[str]:
    """Recognize dependency manifests at the repository root only."""
    found = {
        ident for name, ident in MANIFEST_FILES.items() if name in file_paths
    }
    return frozenset(found)


def scan_repository(path: str | Path, config: ScanConfig | None = None) -> FactSet:
    """Walk *path* and return its FactSet.

    Deterministic for byte-identical trees regardless of directory
    enumeration order: the collected file list is sorted before any
    detection runs. Symlinks are never followed.
    """
    cfg = config or ScanConfig()
    root = Path(path)
    if not root.exists():
        raise PathNotFound(str(path))
    if not root.is_dir():
        raise NotADirectory(str(path))

    files = _collect_files(root, cfg)
    if cfg.max_files is not None and len(files) > cfg.max_files:
        raise TooManyFiles(f"{len(files)} files exceed the cap of {cfg.max_files}")

    makefile_text = _read_root_makefile(root, files)
    languages = detect_languages(files, cfg)
    make_targets = detect_make_targets(makefile_text)
    manifests = detect_manifests(files)
    tests = detect_tests(files, languages, make_targets)
    iac = frozenset(
        kind
        for ext, kind in IAC_EXTENSIONS.items()
        if any(p.lower().endswith(ext) for p in files)
    )
    return FactSet(
        languages=languages,
        manifests=manifests,
        make_targets=make_targets,
        tests=tests,
        iac=iac,
        file_count=len(files),
    )


def _collect_files(root: Path, cfg: ScanConfig) -> list[str]:
    dir_patterns = [g.rstrip("/") for g in cfg.ignore_globs if g.endswith("/")]
    file_patterns = [g for g in cfg.ignore_globs if not g.endswith("/")]

    collected: list[str] = []
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames[:] = sorted(
            d
            for d in dirnames
            if not any(fnmatch(d, pat) for pat in dir_patterns)
            and not (Path(dirpath) / d).is_symlink()
        )
        rel_dir = Path(dirpath).relative_to(root).as_posix()
        for fname in filenames:
            full = Path(dirpath) / fname
            if full.is_symlink():
                continue
            rel = fname if rel_dir == "." else f"{rel_dir}/{fname}"
            if any(fnmatch(rel, pat) or fnmatch(fname, pat) for pat in file_patterns):
                continue
            collected.append(rel)
    collected.sort()
    return collected


def _read_root_makefile(root: Path, files: list[str]) -> str:
    for name in MAKEFILE_NAMES:
        if name in files:
            return (root / name).read_text(encoding="utf-8", errors="replace")
    return ""
