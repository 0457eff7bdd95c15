"""Body-mass-index primitives and the classification rule they share."""

from __future__ import annotations

from pathlib import Path

from ..console import Console
from ..primitives import (
    BoundArgs,
    Direction,
    Error,
    Outcome,
    Param,
    ParamKind,
    ParamMode,
    PrimitiveDef,
    PrimitiveKind,
    Success,
    UnboundVariable,
)

CATEGORIES = ("Thin", "Healthy", "Overweight", "Obese")


class NonPositiveInput(ValueError):
    pass


def category_of(bmi: float) -> str:
    # strict upper bounds: 19 is already Healthy, 25 Overweight, 30 Obese
    if bmi < 19:
        return "Thin"
    if bmi < 25:
        return "Healthy"
    if bmi < 30:
        return "Overweight"
    return "Obese"


def classify_bmi(kg: int, cm: int) -> tuple[float, str]:
    """BMI = kg / (cm/100)^2 and its category."""
    if kg <= 0 or cm <= 0:
        raise NonPositiveInput(f"weight and height must be positive, got kg={kg} cm={cm}")
    meters = cm / 100
    bmi = kg / (meters * meters)
    return bmi, category_of(bmi)


def format_bmi(bmi: float) -> str:
    return f"{bmi:.6f}"


def make_defs(console: Console, base_dir: Path) -> list[PrimitiveDef]:
    def get_values_handler(direction: Direction, bound: BoundArgs, ctx) -> Outcome | None:
        if direction is not Direction.FORWARD:
            return None
        values = []
        for var, prompt in (("kg", "Please insert your weight in kg:"), ("cm", "Please insert your height in cm:")):
            try:
                values.append(ctx.read_var(var))
            except UnboundVariable:
                try:
                    values.append(console.ask(prompt))
                except EOFError as exc:
                    return Error(str(exc))
        return Success(outs=tuple(values))

    def calc_handler(direction: Direction, bound: BoundArgs, ctx) -> Outcome | None:
        if direction is not Direction.FORWARD:
            return None
        bmi, _ = classify_bmi(int(bound.ins[0]), int(bound.ins[1]))
        return Success(outs=(format_bmi(bmi),))

    def print_handler(direction: Direction, bound: BoundArgs, ctx) -> None:
        if direction is not Direction.FORWARD:
            return
        value = float(bound.ins[0])
        console.print(f"Your BMI result is: {bound.ins[0]}. You are: {category_of(value)}")

    return [
        PrimitiveDef(
            "GetValues",
            (Param("kg", ParamMode.OUT), Param("cm", ParamMode.OUT)),
            PrimitiveKind.ACTION,
            get_values_handler,
        ),
        PrimitiveDef(
            "CalcBmi",
            (Param("kg", kind=ParamKind.INT), Param("cm", kind=ParamKind.INT), Param("res", ParamMode.OUT)),
            PrimitiveKind.ACTION,
            calc_handler,
        ),
        PrimitiveDef("PrintBmi", (Param("res"),), PrimitiveKind.ACTION, print_handler),
    ]
