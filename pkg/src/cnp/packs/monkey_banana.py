"""Native monkey-and-banana primitives.

The room has three places (Door, Window, Middle); the banana hangs in the
middle. Walk moves the monkey, Push moves monkey and box together, Climb
succeeds only with the box under the banana. Positions and the step journal
are pack-private state; each action primitive is an exact forward/backward
inverse pair, so backtracking restores the scene.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from ..console import Console
from ..primitives import (
    BoundArgs,
    Direction,
    Error,
    Failure,
    Outcome,
    Param,
    PrimitiveDef,
    PrimitiveKind,
    UnboundVariable,
)

PLACES = ("Door", "Window", "Middle")
MONKEY_PLACES = ("Door", "Window")  # the monkey cannot start under the banana

MONKEY_PROMPT = "Where is the Monkey? [Door/Window]"
BOX_PROMPT = "Where is the Box? [Door/Window/Middle]"


@dataclass
class MbState:
    monkey: str | None = None
    box: str | None = None
    steps: list[str] = field(default_factory=list)

    @property
    def step_ptr(self) -> int:
        return len(self.steps)


def read_start_positions(console: Console, ctx) -> tuple[str, str]:
    """Resolve the starting positions from the Monkey/Box variables, falling
    back to interactive prompts; a bad variable value is a hard error."""
    monkey = _place_from_var(ctx, "Monkey", MONKEY_PLACES)
    if monkey is None:
        monkey = _place_from_prompt(console, MONKEY_PROMPT, MONKEY_PLACES)
    box = _place_from_var(ctx, "Box", PLACES)
    if box is None:
        box = _place_from_prompt(console, BOX_PROMPT, PLACES)
    return monkey, box


def _place_from_var(ctx, var: str, allowed: tuple[str, ...]) -> str | None:
    try:
        value = ctx.read_var(var)
    except UnboundVariable:
        return None
    if value not in allowed:
        raise ValueError(f"Sorry, it cannot be at '{value}'")
    return value


def _place_from_prompt(console: Console, prompt: str, allowed: tuple[str, ...]) -> str:
    while True:
        answer = console.ask(prompt)
        if answer in allowed:
            return answer
        console.print(f"Sorry, it cannot be at '{answer}'")


def make_defs(console: Console, base_dir: Path) -> list[PrimitiveDef]:
    state = MbState()

    def init_handler(direction: Direction, bound: BoundArgs, ctx) -> Outcome | None:
        if direction is Direction.FORWARD:
            try:
                state.monkey, state.box = read_start_positions(console, ctx)
            except (ValueError, EOFError) as exc:
                return Error(str(exc))
            state.steps.clear()
            return None
        state.monkey = state.box = None
        state.steps.clear()
        return None

    def walk_handler(direction: Direction, bound: BoundArgs, ctx) -> None:
        start, dest = bound.ins
        if direction is Direction.FORWARD:
            state.steps.append(f"Walk: {start}->{dest}")
            state.monkey = dest
        else:
            state.steps.pop()
            state.monkey = start

    def push_handler(direction: Direction, bound: BoundArgs, ctx) -> Outcome | None:
        start, dest = bound.ins
        step = f"Push: {start}->{dest}"
        if direction is Direction.FORWARD:
            if state.box != start or state.monkey != start:
                return Failure()
            state.steps.append(step)
            state.box = dest
            state.monkey = dest
            return None
        # guarded like the forward's mirror: only revoke a push we recorded
        if state.steps and state.steps[-1] == step:
            state.steps.pop()
            state.box = start
            state.monkey = start
        return None

    def climb_handler(direction: Direction, bound: BoundArgs, ctx) -> Outcome | None:
        if direction is Direction.FORWARD:
            if state.box != state.monkey:
                return Failure()
            state.steps.append("Climb")
            return None
        if state.steps and state.steps[-1] == "Climb":
            state.steps.pop()
        return None

    def print_handler(direction: Direction, bound: BoundArgs, ctx) -> None:
        if direction is not Direction.FORWARD:
            return
        options = ctx.current_options()
        console.print(f"Solution: {options.curr_sol + 1}")
        for step in state.steps:
            console.print(step)

    def at_handler(direction: Direction, bound: BoundArgs, ctx) -> Outcome | None:
        if state.monkey != bound.ins[0]:
            return Failure()
        return None

    two_places = (Param("start"), Param("dest"))
    return [
        PrimitiveDef("Init", (), PrimitiveKind.ACTION, init_handler),
        PrimitiveDef("Walk", two_places, PrimitiveKind.ACTION, walk_handler),
        PrimitiveDef("Push", two_places, PrimitiveKind.COMBINED, push_handler),
        PrimitiveDef("Climb", (), PrimitiveKind.COMBINED, climb_handler),
        PrimitiveDef("Print", (), PrimitiveKind.ACTION, print_handler),
        PrimitiveDef("At", (Param("place"),), PrimitiveKind.TEST, at_handler),
    ]
