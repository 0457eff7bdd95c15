"""Domain model for control networks.

A control network is a system of directed graphs (subnets) whose arrows carry
sequences of call items. The model is immutable after construction; all
structural checking lives in :func:`validate`, which reports problems as data
rather than raising.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True)
class LiteralText:
    value: str


@dataclass(frozen=True)
class LiteralInt:
    value: int


@dataclass(frozen=True)
class VarIn:
    """Argument read from the variable store at call time (``$name``)."""

    name: str


@dataclass(frozen=True)
class VarOut:
    """Writable argument slot; the primitive binds the variable on success (``&name``)."""

    name: str


Arg = Union[LiteralText, LiteralInt, VarIn, VarOut]


@dataclass(frozen=True)
class PrimitiveCall:
    name: str
    args: tuple[Arg, ...] = ()


@dataclass(frozen=True)
class SubnetCall:
    name: str


CallItem = Union[PrimitiveCall, SubnetCall]


@dataclass(frozen=True)
class State:
    """A node of a subnet.

    ``visit_limit`` caps how many times the state may occur on the active
    search path; ``None`` means unlimited.
    """

    name: str
    visit_limit: Optional[int] = None


@dataclass(frozen=True)
class Arrow:
    """A directed edge labeled with an ordered list of call items.

    ``range_limit`` caps concurrent forward traversals of this arrow on the
    active path; ``None`` means unlimited. Item order is execution order.
    """

    source: str
    target: str
    items: tuple[CallItem, ...] = ()
    range_limit: Optional[int] = None


@dataclass(frozen=True)
class Subnet:
    name: str
    states: tuple[State, ...]
    initial: str
    finals: frozenset[str]
    arrows: tuple[Arrow, ...]

    def state_names(self) -> set[str]:
        return {s.name for s in self.states}


@dataclass(frozen=True, eq=True)
class ControlNetwork:
    """A named collection of subnets; execution starts at ``subnets[main]``."""

    subnets: dict[str, Subnet] = field(hash=False, default_factory=dict)
    main: str = "main"


@dataclass(frozen=True)
class Diagnostic:
    """One validation finding. ``subnet``/``arrow`` locate the offending piece."""

    rule: str
    message: str
    subnet: Optional[str] = None
    arrow: Optional[int] = None


# Rule identifiers used by validate().
NO_MAIN = "NO_MAIN"
NAME_MISMATCH = "NAME_MISMATCH"
BAD_NAME = "BAD_NAME"
DUP_STATE = "DUP_STATE"
NO_FINAL = "NO_FINAL"
UNKNOWN_STATE = "UNKNOWN_STATE"
UNKNOWN_SUBNET = "UNKNOWN_SUBNET"
BAD_VISIT_LIMIT = "BAD_VISIT_LIMIT"
BAD_RANGE = "BAD_RANGE"


def _check_name(diags: list[Diagnostic], name: str, what: str, subnet: Optional[str]) -> None:
    if not NAME_RE.fullmatch(name):
        diags.append(Diagnostic(BAD_NAME, f"{what} name {name!r} is not a valid identifier", subnet))


def validate(net: ControlNetwork) -> list[Diagnostic]:
    """Check every structural invariant; return one diagnostic per violation.

    Pure: never mutates the network, never raises. An empty result means the
    network is safe to serialize and execute (modulo primitive registration,
    which is checked at run setup).
    """
    diags: list[Diagnostic] = []
    if net.main not in net.subnets:
        diags.append(Diagnostic(NO_MAIN, f"no subnet named {net.main!r}"))
    for key, sub in net.subnets.items():
        if key != sub.name:
            diags.append(Diagnostic(NAME_MISMATCH, f"subnet keyed {key!r} is named {sub.name!r}", key))
        _check_name(diags, sub.name, "subnet", sub.name)
        names = sub.state_names()
        seen: set[str] = set()
        for st in sub.states:
            _check_name(diags, st.name, "state", sub.name)
            if st.name in seen:
                diags.append(Diagnostic(DUP_STATE, f"state {st.name!r} declared twice", sub.name))
            seen.add(st.name)
            if st.visit_limit is not None and st.visit_limit < 1:
                diags.append(Diagnostic(BAD_VISIT_LIMIT, f"state {st.name!r} has visit limit {st.visit_limit}", sub.name))
        if sub.initial not in names:
            diags.append(Diagnostic(UNKNOWN_STATE, f"initial state {sub.initial!r} is not declared", sub.name))
        if not sub.finals:
            diags.append(Diagnostic(NO_FINAL, "subnet has no final state", sub.name))
        for fin in sorted(sub.finals):
            if fin not in names:
                diags.append(Diagnostic(UNKNOWN_STATE, f"final state {fin!r} is not declared", sub.name))
        for idx, arrow in enumerate(sub.arrows):
            for endpoint in (arrow.source, arrow.target):
                if endpoint not in names:
                    diags.append(
                        Diagnostic(UNKNOWN_STATE, f"arrow endpoint {endpoint!r} is not declared", sub.name, idx)
                    )
            if arrow.range_limit is not None and arrow.range_limit < 1:
                diags.append(Diagnostic(BAD_RANGE, f"arrow has range {arrow.range_limit}", sub.name, idx))
            for item in arrow.items:
                if isinstance(item, SubnetCall) and item.name not in net.subnets:
                    diags.append(
                        Diagnostic(UNKNOWN_SUBNET, f"call to unknown subnet {item.name!r}", sub.name, idx)
                    )
    return diags
