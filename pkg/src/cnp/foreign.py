"""Foreign primitives: external executables driven over a small wire protocol.

Invocation is plain argv (no shell): bound In values are substituted for
``{1}``..``{n}`` placeholders in the command template. Results come back as
the first stdout line; test primitives answer with the tokens ``1`` (success)
or ``0`` (failure). A nonzero exit code always means a hard error, never
search failure, so crashing programs abort the run loudly.

Also home to the shared scratch-file helpers (``positions.txt``,
``steps.txt``) that file-based primitive packs use to exchange state with
foreign processes.
"""

from __future__ import annotations

import enum
import os
import re
import subprocess
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .primitives import (
    BoundArgs,
    Direction,
    Error,
    Failure,
    Outcome,
    Param,
    ParamMode,
    PrimitiveDef,
    PrimitiveKind,
    Success,
)


class ForeignError(Exception):
    pass


class SpecError(ForeignError):
    """Malformed ForeignPrimitiveSpec."""


class PlaceholderOutOfRange(ForeignError):
    pass


class SpawnError(ForeignError):
    pass


class DecodeError(ForeignError):
    pass


class ProtocolError(ForeignError):
    """Child produced no usable output where the protocol requires one."""


class EmptyJournal(ForeignError):
    pass


class WaitMode(enum.Enum):
    SYNC = "sync"
    DETACHED = "detached"


class CaptureMode(enum.Enum):
    NONE = "none"
    FIRST_LINE = "first-line"
    ALL_LINES = "all-lines"


_PLACEHOLDER_RE = re.compile(r"\{(\d+)\}")


@dataclass(frozen=True)
class TokenMap:
    success_token: str = "1"
    failure_token: str = "0"


@dataclass(frozen=True)
class ForeignPrimitiveSpec:
    """How to run one external-executable primitive.

    ``forward_cmd``/``backward_cmd`` are argv templates; ``param_modes`` gives
    the primitive's signature (In values feed the placeholders, at most the
    ``result_slot`` Out param receives the captured first line).
    """

    name: str
    forward_cmd: tuple[str, ...]
    param_modes: tuple[ParamMode, ...] = ()
    backward_cmd: Optional[tuple[str, ...]] = None
    wait: WaitMode = WaitMode.SYNC
    capture: CaptureMode = CaptureMode.NONE
    result_slot: Optional[int] = None
    test_map: Optional[TokenMap] = None

    def __post_init__(self) -> None:
        if not self.forward_cmd:
            raise SpecError(f"{self.name}: empty forward command")
        if self.wait is WaitMode.DETACHED:
            if self.capture is not CaptureMode.NONE:
                raise SpecError(f"{self.name}: detached launch cannot capture output")
            if self.backward_cmd is not None:
                raise SpecError(f"{self.name}: detached launch cannot have a backward command")
        if self.test_map is not None and self.capture is CaptureMode.NONE:
            raise SpecError(f"{self.name}: a test mapping requires output capture")
        if self.result_slot is not None:
            if self.test_map is not None:
                raise SpecError(f"{self.name}: result_slot and test mapping are mutually exclusive")
            if self.capture is not CaptureMode.FIRST_LINE:
                raise SpecError(f"{self.name}: result_slot requires first-line capture")
            if not (0 <= self.result_slot < len(self.param_modes)):
                raise SpecError(f"{self.name}: result_slot {self.result_slot} out of range")
            if self.param_modes[self.result_slot] is not ParamMode.OUT:
                raise SpecError(f"{self.name}: result_slot must name an out parameter")
        arity = self.in_arity
        for cmd in (self.forward_cmd, self.backward_cmd or ()):
            for token in cmd:
                for m in _PLACEHOLDER_RE.finditer(token):
                    k = int(m.group(1))
                    if not (1 <= k <= arity):
                        raise PlaceholderOutOfRange(
                            f"{self.name}: placeholder {{{k}}} but only {arity} input value(s)"
                        )

    @property
    def in_arity(self) -> int:
        return sum(1 for m in self.param_modes if m is ParamMode.IN)

    def kind(self) -> PrimitiveKind:
        if self.test_map is not None:
            return PrimitiveKind.COMBINED if self.backward_cmd else PrimitiveKind.TEST
        return PrimitiveKind.ACTION


@dataclass(frozen=True)
class CapturedOutput:
    lines: tuple[str, ...]
    exit_code: int


def render_command(template: tuple[str, ...], ins: tuple[str, ...]) -> list[str]:
    """Substitute {1}..{n} with bound In values; each template token stays one
    argv element, so values with spaces survive intact."""
    argv = []
    for token in template:
        def repl(m: re.Match) -> str:
            k = int(m.group(1))
            if not (1 <= k <= len(ins)):
                raise PlaceholderOutOfRange(f"placeholder {{{k}}} but only {len(ins)} input value(s)")
            return ins[k - 1]

        argv.append(_PLACEHOLDER_RE.sub(repl, token))
    return argv


def run_sync(argv: list[str], cwd: Optional[Path] = None, capture: CaptureMode = CaptureMode.NONE) -> CapturedOutput:
    """Run the child to completion. stdout is captured per ``capture`` (UTF-8
    lines); stdin and stderr are inherited so interactive primitives keep
    working and diagnostics stay visible."""
    want_pipe = capture is not CaptureMode.NONE
    try:
        proc = subprocess.run(
            argv,
            cwd=str(cwd) if cwd else None,
            stdout=subprocess.PIPE if want_pipe else None,
        )
    except (FileNotFoundError, NotADirectoryError, PermissionError) as exc:
        raise SpawnError(f"cannot run {argv[0]!r}: {exc}") from exc
    lines: tuple[str, ...] = ()
    if want_pipe:
        try:
            lines = tuple(proc.stdout.decode("utf-8").splitlines())
        except UnicodeDecodeError as exc:
            raise DecodeError(f"{argv[0]}: stdout is not UTF-8: {exc}") from exc
    return CapturedOutput(lines, proc.returncode)


def spawn_detached(argv: list[str], cwd: Optional[Path] = None) -> None:
    """Start the child and return immediately; it is never waited on and never
    undone on backtracking."""
    try:
        subprocess.Popen(argv, cwd=str(cwd) if cwd else None, start_new_session=True)
    except (FileNotFoundError, NotADirectoryError, PermissionError) as exc:
        raise SpawnError(f"cannot run {argv[0]!r}: {exc}") from exc


def interpret_outcome(spec: ForeignPrimitiveSpec, out: CapturedOutput) -> Outcome:
    """Map a finished child to an engine outcome. Nonzero exit is a hard
    error. With a test mapping, the first line must be exactly one of the two
    tokens. Otherwise success, carrying the first line when a result slot is
    declared."""
    if out.exit_code != 0:
        return Error(f"{spec.name}: exited with code {out.exit_code}")
    if spec.test_map is not None:
        token = _first_line(spec, out)
        if token == spec.test_map.success_token:
            return Success()
        if token == spec.test_map.failure_token:
            return Failure()
        return Error(f"{spec.name}: protocol error: unexpected test output {token!r}")
    if spec.result_slot is not None:
        return Success(outs=(_first_line(spec, out),))
    return Success()


def _first_line(spec: ForeignPrimitiveSpec, out: CapturedOutput) -> str:
    if not out.lines:
        raise ProtocolError(f"{spec.name}: no output where a first line is required")
    return out.lines[0]


def make_primitive(spec: ForeignPrimitiveSpec, base_dir: Path, param_names: Optional[tuple[str, ...]] = None) -> PrimitiveDef:
    """Wrap a spec as a registrable primitive. ``base_dir`` becomes the child's
    working directory, so relative program paths and scratch files resolve
    against the network file's directory."""
    names = param_names or tuple(f"p{i + 1}" for i in range(len(spec.param_modes)))
    params = tuple(Param(n, mode) for n, mode in zip(names, spec.param_modes))

    def handler(direction: Direction, bound: BoundArgs, ctx) -> Outcome:
        if direction is Direction.FORWARD:
            argv = render_command(spec.forward_cmd, bound.ins)
            if spec.wait is WaitMode.DETACHED:
                spawn_detached(argv, base_dir)
                return Success()
            try:
                out = run_sync(argv, base_dir, spec.capture)
                return interpret_outcome(spec, out)
            except ForeignError as exc:
                return Error(str(exc))
        if spec.backward_cmd is None:
            return Success()
        argv = render_command(spec.backward_cmd, bound.ins)
        try:
            out = run_sync(argv, base_dir, CaptureMode.NONE)
        except ForeignError as exc:
            return Error(str(exc))
        if out.exit_code != 0:
            return Error(f"{spec.name}: backward command exited with code {out.exit_code}")
        return Success()

    return PrimitiveDef(spec.name, params, spec.kind(), handler)


# --- scratch files shared with foreign processes ------------------------------


def scratch_write_positions(path: Path, monkey: str, box: str) -> None:
    """One line, two space-separated tokens, LF-terminated: the layout the
    foreign readers split on a single space."""
    path.write_text(f"{monkey} {box}\n", encoding="utf-8")


def scratch_read_positions(path: Path) -> tuple[str, str]:
    tokens = path.read_text(encoding="utf-8").strip("\n").split(" ")
    if len(tokens) != 2 or not all(tokens):
        raise ForeignError(f"{path}: malformed positions file")
    return tokens[0], tokens[1]


def scratch_append_step(path: Path, step: str) -> None:
    with open(path, "a", encoding="utf-8", newline="\n") as fh:
        fh.write(step + "\n")


def scratch_pop_step(path: Path) -> str:
    """Remove and return the last journal line; append then pop is an exact
    identity on file content."""
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise EmptyJournal(f"{path}: no journal file") from None
    lines = text.splitlines()
    if not lines:
        raise EmptyJournal(f"{path}: journal is empty")
    last = lines[-1]
    path.write_text("".join(line + "\n" for line in lines[:-1]), encoding="utf-8")
    return last


def scratch_read_steps(path: Path) -> list[str]:
    try:
        return path.read_text(encoding="utf-8").splitlines()
    except FileNotFoundError:
        return []
