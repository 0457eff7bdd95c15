"""Command-line front end.

    cnp run PROGRAM [--manifest M] [--var K=V ...] [--max-solutions N]
                    [--max-depth D] [--trace FILE]
    cnp validate PROGRAM
    cnp fixture-worker MODE [ARGS...]

PROGRAM is a ``.cn`` file or a directory holding ``program.cn`` (and usually
``manifest.toml``). Solution output comes from the program's own print
primitives; the runner adds the final ``Number of solutions: K`` line.

Exit codes: 0 search completed (exhausted or solution limit), 2 load or
validation problem, 3 aborted run (primitive hard error, or depth limit cut
the search short).
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .console import Console
from .engine import LoadError, RunConfig, Termination, run
from .manifest import Manifest, ManifestError, build_registry, load_manifest
from .parser import ParseError, ValidationError, parse

PROGRAM_FILE = "program.cn"
MANIFEST_FILE = "manifest.toml"


def main(argv: list[str] | None = None) -> int:
    args = _arg_parser().parse_args(argv)
    return args.func(args)


def _arg_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="cnp", description="Run and check control network programs.")
    sub = top.add_subparsers(required=True, metavar="COMMAND")

    p_run = sub.add_parser("run", help="execute a program and count its solutions")
    p_run.add_argument("program", help=f"a .cn file or a directory containing {PROGRAM_FILE}")
    p_run.add_argument("--manifest", help=f"primitive manifest (default: {MANIFEST_FILE} beside the program)")
    p_run.add_argument("--var", action="append", default=[], metavar="NAME=VALUE", help="preset a variable")
    p_run.add_argument("--max-solutions", type=int, metavar="N")
    p_run.add_argument("--max-depth", type=int, metavar="D", help="abort when the trail would exceed D entries")
    p_run.add_argument("--trace", metavar="FILE", help="write a JSON-lines event trace")
    p_run.set_defaults(func=cmd_run)

    p_val = sub.add_parser("validate", help="parse and validate a program")
    p_val.add_argument("program", help=f"a .cn file or a directory containing {PROGRAM_FILE}")
    p_val.set_defaults(func=cmd_validate)

    p_fix = sub.add_parser("fixture-worker", help="deterministic child process for protocol tests")
    p_fix.add_argument("mode")
    p_fix.add_argument("args", nargs=argparse.REMAINDER)
    p_fix.set_defaults(func=lambda a: cmd_fixture_worker(a.mode, a.args))
    return top


def _fail(message: str, code: int) -> int:
    print(f"cnp: error: {message}", file=sys.stderr)
    return code


def _resolve_program(spec: str, manifest_opt: str | None) -> tuple[Path, Path | None]:
    program = Path(spec)
    if program.is_dir():
        program = program / PROGRAM_FILE
    if manifest_opt is not None:
        return program, Path(manifest_opt)
    side = program.parent / MANIFEST_FILE
    return program, side if side.exists() else None


def _load_net(program: Path):
    text = program.read_text(encoding="utf-8")
    try:
        return parse(text)
    except ParseError as exc:
        raise SystemExit(_fail(f"{program}:{exc.span}: {exc.message}", 2)) from exc
    except ValidationError as exc:
        for diag in exc.diagnostics:
            print(_format_diagnostic(diag), file=sys.stderr)
        raise SystemExit(2) from exc


def _format_diagnostic(diag) -> str:
    locus = ""
    if diag.subnet is not None:
        locus = f" [net {diag.subnet}" + (f", arrow {diag.arrow}" if diag.arrow is not None else "") + "]"
    return f"{diag.rule}: {diag.message}{locus}"


def cmd_run(args: argparse.Namespace) -> int:
    program, manifest_path = _resolve_program(args.program, args.manifest)
    try:
        net = _load_net(program)
    except OSError as exc:
        return _fail(str(exc), 2)
    except SystemExit as exc:
        return exc.code

    initial_vars = {}
    for assignment in args.var:
        name, eq, value = assignment.partition("=")
        if not eq or not name:
            return _fail(f"--var needs NAME=VALUE, got {assignment!r}", 2)
        initial_vars[name] = value

    try:
        manifest = load_manifest(manifest_path) if manifest_path else Manifest()
        registry = build_registry(manifest, Console(), program.parent)
    except ManifestError as exc:
        return _fail(str(exc), 2)

    trace_file = None
    try:
        if args.trace:
            trace_file = open(args.trace, "w", encoding="utf-8", newline="\n")
        try:
            config = RunConfig(
                max_solutions=args.max_solutions,
                max_depth=args.max_depth,
                trace_sink=trace_file,
                initial_vars=initial_vars,
            )
        except ValueError as exc:
            return _fail(str(exc), 2)
        try:
            result = run(net, registry, config)
        except LoadError as exc:
            return _fail(str(exc), 2)
    finally:
        if trace_file is not None:
            trace_file.close()

    if result.termination is Termination.ABORTED:
        return _fail(result.error or "run aborted", 3)
    if result.termination is Termination.DEPTH_LIMIT:
        return _fail(f"depth limit exceeded after {result.count} solution(s)", 3)
    print(f"Number of solutions: {result.count}")
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    program, _ = _resolve_program(args.program, None)
    try:
        program.read_text(encoding="utf-8")
        _load_net(program)
    except OSError as exc:
        return _fail(str(exc), 2)
    except SystemExit as exc:
        return exc.code
    return 0


def cmd_fixture_worker(mode: str, args: list[str]) -> int:
    """Fixed-behavior child used by the foreign-protocol test suite."""
    if mode == "echo":
        print(" ".join(args))
        return 0
    if mode == "argv-count":
        print(len(args))
        return 0
    if mode == "first-line":
        for arg in args:
            print(arg)
        return 0
    if mode == "test-1":
        print("1")
        return 0
    if mode == "test-0":
        print("0")
        return 0
    if mode == "sleep-then-exit":
        seconds = float(args[0]) if args else 1.0
        marker = Path(args[1]) if len(args) > 1 else None
        if marker is not None:
            with open(marker, "a", encoding="utf-8") as fh:
                fh.write(f"start {time.monotonic_ns()}\n")
        time.sleep(seconds)
        if marker is not None:
            with open(marker, "a", encoding="utf-8") as fh:
                fh.write(f"stop {time.monotonic_ns()}\n")
        return 0
    if mode.startswith("exit-"):
        try:
            return int(mode[len("exit-"):])
        except ValueError:
            pass
    print(f"cnp fixture-worker: unknown mode {mode!r}", file=sys.stderr)
    return 64


if __name__ == "__main__":
    sys.exit(main())
