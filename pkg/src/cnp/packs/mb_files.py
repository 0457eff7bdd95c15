"""File-backed monkey-and-banana primitives for the multi-language corpus.

Same moves as the in-memory pack, but the scene lives in the shared scratch
files (``positions.txt``, ``steps.txt``) in the network's directory, where
foreign walk/climb processes read and write it between invocations.
"""

from __future__ import annotations

from pathlib import Path

from ..console import Console
from ..foreign import (
    ForeignError,
    scratch_append_step,
    scratch_pop_step,
    scratch_read_positions,
    scratch_read_steps,
    scratch_write_positions,
)
from ..primitives import (
    BoundArgs,
    Direction,
    Error,
    Failure,
    Outcome,
    Param,
    PrimitiveDef,
    PrimitiveKind,
)
from .monkey_banana import read_start_positions

POSITIONS_FILE = "positions.txt"
STEPS_FILE = "steps.txt"


def make_defs(console: Console, base_dir: Path) -> list[PrimitiveDef]:
    positions = base_dir / POSITIONS_FILE
    steps = base_dir / STEPS_FILE

    def init_handler(direction: Direction, bound: BoundArgs, ctx) -> Outcome | None:
        if direction is Direction.FORWARD:
            try:
                monkey, box = read_start_positions(console, ctx)
            except (ValueError, EOFError) as exc:
                return Error(str(exc))
            scratch_write_positions(positions, monkey, box)
            steps.write_text("", encoding="utf-8")
            return None
        # backward = full scene reset; leaves the corpus directory clean
        positions.unlink(missing_ok=True)
        steps.unlink(missing_ok=True)
        return None

    def push_handler(direction: Direction, bound: BoundArgs, ctx) -> Outcome | None:
        start, dest = bound.ins
        step = f"Push: {start}->{dest}"
        monkey, box = scratch_read_positions(positions)
        if direction is Direction.FORWARD:
            if box != start or monkey != start:
                return Failure()
            scratch_write_positions(positions, dest, dest)
            scratch_append_step(steps, step)
            return None
        recorded = scratch_read_steps(steps)
        if recorded and recorded[-1] == step:
            scratch_pop_step(steps)
            scratch_write_positions(positions, start, start)
        return None

    def print_handler(direction: Direction, bound: BoundArgs, ctx) -> None:
        if direction is not Direction.FORWARD:
            return
        options = ctx.current_options()
        console.print(f"Solution: {options.curr_sol + 1}")
        for step in scratch_read_steps(steps):
            console.print(step)

    def at_handler(direction: Direction, bound: BoundArgs, ctx) -> Outcome | None:
        monkey, _ = scratch_read_positions(positions)
        if monkey != bound.ins[0]:
            return Failure()
        return None

    def same_pos_handler(direction: Direction, bound: BoundArgs, ctx) -> Outcome | None:
        monkey, box = scratch_read_positions(positions)
        if monkey != box:
            return Failure()
        return None

    def wrap(handler):
        def guarded(direction: Direction, bound: BoundArgs, ctx) -> Outcome | None:
            try:
                return handler(direction, bound, ctx)
            except (ForeignError, OSError) as exc:
                return Error(str(exc))

        return guarded

    return [
        PrimitiveDef("InitFiles", (), PrimitiveKind.ACTION, wrap(init_handler)),
        PrimitiveDef("PushFiles", (Param("start"), Param("dest")), PrimitiveKind.COMBINED, wrap(push_handler)),
        PrimitiveDef("PrintFiles", (), PrimitiveKind.ACTION, wrap(print_handler)),
        PrimitiveDef("AtFiles", (Param("place"),), PrimitiveKind.TEST, wrap(at_handler)),
        PrimitiveDef("SamePos", (), PrimitiveKind.TEST, wrap(same_pos_handler)),
    ]
