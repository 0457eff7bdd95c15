"""Primitive registry and invocation contract.

A primitive is a named handler invoked during arrow traversal with a
direction flag: forward when the engine advances, backward when it revokes
the traversal. Test primitives have no backward part (the host skips the
handler); action and combined primitives must undo their own private effects
on the backward pass. Variable-store effects are always undone by the engine
via the trail, never by handlers.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

from .model import Arg, LiteralInt, LiteralText, PrimitiveCall, VarIn, VarOut

_INT_RE = re.compile(r"-?[0-9]+")


class Direction(enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


class ParamMode(enum.Enum):
    IN = "in"
    OUT = "out"


class ParamKind(enum.Enum):
    TEXT = "text"
    INT = "int"


class PrimitiveKind(enum.Enum):
    ACTION = "action"
    TEST = "test"
    COMBINED = "combined"


@dataclass(frozen=True)
class Param:
    name: str
    mode: ParamMode = ParamMode.IN
    kind: ParamKind = ParamKind.TEXT


@dataclass(frozen=True)
class Success:
    """Outs are the values for the Out params, in declaration order; the
    engine commits them to the store (trailed) after the handler returns."""

    outs: tuple[str, ...] = ()


@dataclass(frozen=True)
class Failure:
    """Logical failure: triggers backtracking. Only legal going forward."""


@dataclass(frozen=True)
class Error:
    """Hard error: aborts the whole run."""

    message: str


Outcome = Union[Success, Failure, Error]

# handler(direction, bound, ctx) -> Outcome | None (None means plain Success)
Handler = Callable[["Direction", "BoundArgs", object], Optional[Outcome]]


@dataclass(frozen=True)
class PrimitiveDef:
    name: str
    params: tuple[Param, ...]
    kind: PrimitiveKind
    handler: Handler

    @property
    def arity(self) -> int:
        return len(self.params)

    def out_params(self) -> tuple[Param, ...]:
        return tuple(p for p in self.params if p.mode is ParamMode.OUT)


@dataclass(frozen=True)
class BoundArgs:
    """Arguments resolved against the store: In values in order (as strings),
    Out slots as the variable names to bind on success."""

    ins: tuple[str, ...] = ()
    out_slots: tuple[str, ...] = ()


class PrimitiveHostError(Exception):
    """Base for registration/binding contract violations."""


class DuplicateName(PrimitiveHostError):
    pass


class UnknownPrimitive(PrimitiveHostError):
    pass


class ArityMismatch(PrimitiveHostError):
    pass


class ModeMismatch(PrimitiveHostError):
    pass


class TypeMismatch(PrimitiveHostError):
    pass


class UnboundVariable(PrimitiveHostError):
    pass


class PrimitiveRegistry:
    """Immutable-after-setup name -> PrimitiveDef map."""

    def __init__(self) -> None:
        self._defs: dict[str, PrimitiveDef] = {}

    def register(self, definition: PrimitiveDef) -> None:
        if definition.name in self._defs:
            raise DuplicateName(f"primitive {definition.name!r} already registered")
        self._defs[definition.name] = definition

    def register_all(self, definitions: Sequence[PrimitiveDef]) -> None:
        for definition in definitions:
            self.register(definition)

    def get(self, name: str) -> PrimitiveDef:
        try:
            return self._defs[name]
        except KeyError:
            raise UnknownPrimitive(f"primitive {name!r} is not registered") from None

    def __contains__(self, name: str) -> bool:
        return name in self._defs

    def names(self) -> list[str]:
        return sorted(self._defs)


def register(registry: PrimitiveRegistry, definition: PrimitiveDef) -> None:
    registry.register(definition)


def check_call(definition: PrimitiveDef, call: PrimitiveCall) -> None:
    """Static load-time check: arity and argument/parameter mode agreement."""
    if len(call.args) != definition.arity:
        raise ArityMismatch(
            f"{call.name} expects {definition.arity} argument(s), call has {len(call.args)}"
        )
    for pos, (arg, param) in enumerate(zip(call.args, definition.params)):
        if isinstance(arg, VarOut) and param.mode is not ParamMode.OUT:
            raise ModeMismatch(f"{call.name} argument {pos + 1}: &{arg.name} in a read-only position")
        if not isinstance(arg, VarOut) and param.mode is ParamMode.OUT:
            raise ModeMismatch(f"{call.name} argument {pos + 1}: writable position needs a &variable")


def bind_args(definition: PrimitiveDef, call: PrimitiveCall, store: dict[str, str]) -> BoundArgs:
    """Resolve a call against the store: literals pass through, $vars read,
    &vars become out slots. Raises on unbound reads and non-integer values in
    Int positions."""
    check_call(definition, call)
    ins: list[str] = []
    outs: list[str] = []
    for pos, (arg, param) in enumerate(zip(call.args, definition.params)):
        if isinstance(arg, VarOut):
            outs.append(arg.name)
            continue
        value = _resolve_in(arg, call.name, pos, store)
        if param.kind is ParamKind.INT and not _INT_RE.fullmatch(value):
            raise TypeMismatch(f"{call.name} argument {pos + 1}: {value!r} is not an integer")
        ins.append(value)
    return BoundArgs(tuple(ins), tuple(outs))


def _resolve_in(arg: Arg, name: str, pos: int, store: dict[str, str]) -> str:
    if isinstance(arg, LiteralText):
        return arg.value
    if isinstance(arg, LiteralInt):
        return str(arg.value)
    if isinstance(arg, VarIn):
        try:
            return store[arg.name]
        except KeyError:
            raise UnboundVariable(f"{name} argument {pos + 1}: variable {arg.name!r} is unbound") from None
    raise ModeMismatch(f"{name} argument {pos + 1}: unexpected argument form")


def invoke(definition: PrimitiveDef, direction: Direction, bound: BoundArgs, ctx) -> Outcome:
    """Run the handler and normalize its result to an Outcome.

    Test primitives are never called backward (host no-op). A raise_failure()
    mark on the context turns any non-error result into Failure. Backward
    invocations may not fail: that is reported as an Error. Exceptions
    escaping the handler propagate; the engine turns them into an abort.
    """
    if direction is Direction.BACKWARD and definition.kind is PrimitiveKind.TEST:
        return Success()
    result = definition.handler(direction, bound, ctx)
    if isinstance(result, Error):
        return result
    if getattr(ctx, "failure_raised", False) or isinstance(result, Failure):
        if direction is Direction.BACKWARD:
            return Error(f"{definition.name}: failure signaled during backward execution")
        return Failure()
    if result is None:
        result = Success()
    if not isinstance(result, Success):
        return Error(f"{definition.name}: handler returned {result!r} instead of an outcome")
    if direction is Direction.FORWARD and len(result.outs) != len(definition.out_params()):
        return Error(
            f"{definition.name}: handler produced {len(result.outs)} out value(s), "
            f"declared {len(definition.out_params())}"
        )
    return result
