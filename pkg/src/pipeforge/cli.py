"""Command-line interface.

Thin argument handling over the core package; every verb maps onto one
library call. Exit codes: 0 ok, 1 verification failed (Tampered),
2 usage / input error, 3 policy violation, 4 catalog findings, 5 unsealed.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .catalog import load_catalog, validate_catalog
from .errors import PipeforgeError, PolicyViolation
from .inference import PlanPolicy, plan_pipeline
from .integrity import VerdictKind, verify
from .registry import breakeven_uses
from .renderer import OUTPUT_PATHS, RenderOptions, render
from .scanner import scan_repository
from .service import DEFAULT_PORT, create_app

EXIT_OK = 0
EXIT_TAMPERED = 1
EXIT_USAGE = 2
EXIT_POLICY = 3
EXIT_FINDINGS = 4
EXIT_UNSEALED = 5

ENV_PORT = "PIPEFORGE_PORT"
ENV_REGISTRY = "PIPEFORGE_REGISTRY"
ENV_CATALOG = "PIPEFORGE_CATALOG"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pipeforge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_scan = sub.add_parser("scan", help="extract a FactSet from a repository tree")
    p_scan.add_argument("path")
    p_scan.add_argument("--format", choices=("yaml", "json"), default="yaml")

    p_plan = sub.add_parser("plan", help="infer an engine-agnostic pipeline plan")
    p_plan.add_argument("path")
    _catalog_args(p_plan)
    p_plan.add_argument("--engine", choices=("gitlab", "github"))
    p_plan.add_argument("--strict", action="store_true")

    p_gen = sub.add_parser("generate", help="render and seal a pipeline file")
    p_gen.add_argument("path")
    _catalog_args(p_gen)
    p_gen.add_argument("--engine", choices=("gitlab", "github"), required=True)
    p_gen.add_argument("--mode", choices=("include", "inline"), default="inline")
    p_gen.add_argument("--locator", default="", help="catalog project locator (include mode)")
    p_gen.add_argument("--forbid-shell", action="store_true")
    p_gen.add_argument("--strict", action="store_true")
    p_gen.add_argument("--out", help="output file, '-' for stdout (default: engine convention)")

    p_verify = sub.add_parser("verify", help="check a sealed pipeline file for drift")
    p_verify.add_argument("file")

    p_cat = sub.add_parser("catalog", help="catalog maintenance")
    cat_sub = p_cat.add_subparsers(dest="catalog_command", required=True)
    p_val = cat_sub.add_parser("validate", help="check catalog invariants")
    p_val.add_argument("dir")
    p_val.add_argument("--catalog-version", default="latest")

    p_serve = sub.add_parser("serve", help="run the portal HTTP service")
    p_serve.add_argument("--registry", default=os.environ.get(ENV_REGISTRY, "registry.json"))
    p_serve.add_argument("--catalog", default=os.environ.get(ENV_CATALOG))
    p_serve.add_argument("--catalog-version", default="latest")
    p_serve.add_argument("--locator", default="pipeline-blocks")
    p_serve.add_argument("--port", type=int, default=None)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--forbid-shell", action="store_true")
    p_serve.add_argument("--ui", default=None, help="static UI directory (default: frontend/dist)")

    p_roi = sub.add_parser("roi", help="break-even uses for automation setup cost")
    p_roi.add_argument("--manual", type=float, required=True)
    p_roi.add_argument("--setup", type=float, required=True)
    p_roi.add_argument("--per-use", type=float, default=0)

    return parser


def _catalog_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--catalog", default=os.environ.get(ENV_CATALOG), required=ENV_CATALOG not in os.environ)
    p.add_argument("--catalog-version", default="latest")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except PolicyViolation as exc:
        print(f"policy violation: {exc}", file=sys.stderr)
        return EXIT_POLICY
    except PipeforgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "scan":
        return _cmd_scan(args)
    if args.command == "plan":
        return _cmd_plan(args)
    if args.command == "generate":
        return _cmd_generate(args)
    if args.command == "verify":
        return _cmd_verify(args)
    if args.command == "catalog":
        return _cmd_catalog_validate(args)
    if args.command == "serve":
        return _cmd_serve(args)
    if args.command == "roi":
        return _cmd_roi(args)
    raise AssertionError(f"unhandled command {args.command}")


def _cmd_scan(args) -> int:
    facts = scan_repository(args.path)
    if args.format == "json":
        import json

        print(json.dumps(facts.to_dict(), sort_keys=True, indent=2))
    else:
        sys.stdout.write(facts.to_yaml())
    return EXIT_OK


def _cmd_plan(args) -> int:
    catalog = load_catalog(args.catalog, args.catalog_version)
    facts = scan_repository(args.path)
    plan = plan_pipeline(facts, catalog, PlanPolicy(strict=args.strict))
    if args.engine:
        unsupported = [
            j.ref.path
            for j in plan.jobs
            if args.engine not in catalog.blocks[j.ref.path].engines
        ]
        if unsupported:
            print(
                f"error: blocks without {args.engine} body: {', '.join(unsupported)}",
                file=sys.stderr,
            )
            return EXIT_USAGE
    sys.stdout.write(plan.to_yaml())
    return EXIT_OK


def _cmd_generate(args) -> int:
    catalog = load_catalog(args.catalog, args.catalog_version)
    facts = scan_repository(args.path)
    plan = plan_pipeline(facts, catalog, PlanPolicy(strict=args.strict))
    rendered = render(
        plan,
        RenderOptions(
            engine=args.engine,
            mode=args.mode,
            catalog_locator=args.locator,
            forbid_shell=args.forbid_shell,
        ),
        catalog,
    )
    if args.out == "-":
        sys.stdout.write(rendered.text)
        return EXIT_OK
    out = Path(args.out) if args.out else Path(args.path) / OUTPUT_PATHS[args.engine]
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(rendered.text, encoding="utf-8", newline="\n")
    print(str(out))
    return EXIT_OK


def _cmd_verify(args) -> int:
    path = Path(args.file)
    if not path.is_file():
        print(f"error: no such file {args.file}", file=sys.stderr)
        return EXIT_USAGE
    verdict = verify(path.read_text(encoding="utf-8"))
    print(f"{verdict.kind.value}: {verdict.detail}")
    if verdict.kind is VerdictKind.SEALED_VALID:
        return EXIT_OK
    if verdict.kind is VerdictKind.TAMPERED:
        return EXIT_TAMPERED
    return EXIT_UNSEALED


def _cmd_catalog_validate(args) -> int:
    catalog = load_catalog(args.dir, args.catalog_version)
    findings = validate_catalog(catalog)
    for finding in findings:
        print(str(finding))
    if any(f.severity == "error" for f in findings):
        return EXIT_FINDINGS
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    if args.catalog is None:
        print("error: --catalog (or PIPEFORGE_CATALOG) is required", file=sys.stderr)
        return EXIT_USAGE
    port = args.port
    if port is None:
        port = int(os.environ.get(ENV_PORT, DEFAULT_PORT))
    ui_dir = args.ui or (Path("frontend") / "dist")
    app = create_app(
        registry_path=args.registry,
        catalog_root=args.catalog,
        catalog_version=args.catalog_version,
        catalog_locator=args.locator,
        forbid_shell=args.forbid_shell,
        ui_dir=ui_dir,
    )
    uvicorn.run(app, host=args.host, port=port)
    return EXIT_OK


def _cmd_roi(args) -> int:
    print(breakeven_uses(args.manual, args.setup, args.per_use))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
