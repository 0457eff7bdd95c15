"""Execution engine for control networks.

Executes the main subnet as a depth-first nondeterministic search: arrows are
attempted in declaration order, their items run left to right, and logical
failure unwinds the most recent traversal by re-invoking completed items
backward. Every reversible effect (item completion, variable write, subnet
entry/return) is journaled on a trail with strict stack discipline, so the
store is restored exactly when alternatives are revoked.

A session is single threaded and not reentrant: primitives run synchronously
on the caller's thread, and a session may only be handed between threads
between calls. Distinct sessions over the same (immutable) network are
independent.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from .model import ControlNetwork, PrimitiveCall, Subnet, SubnetCall, validate
from .primitives import (
    BoundArgs,
    Direction,
    Error,
    Failure,
    PrimitiveHostError,
    PrimitiveRegistry,
    Success,
    UnboundVariable,
    bind_args,
    check_call,
    invoke,
)


class EngineError(Exception):
    pass


class LoadError(EngineError):
    """Network failed validation or references unknown/mismatched primitives."""


class PrimitiveError(EngineError):
    """A primitive signaled a hard error; the run is aborted."""


class DepthLimitError(EngineError):
    """Pushing one more trail entry would exceed the configured max_depth."""


class WriteDuringBackward(EngineError):
    """Raised by write_var when invoked on a backward pass."""


class SessionFinished(EngineError):
    pass


# --- trail entries ----------------------------------------------------------


@dataclass
class VarWrite:
    name: str
    prev: Optional[str]  # None = variable was unbound


@dataclass
class ItemDone:
    subnet: str
    arrow: int
    item: int
    primitive: str
    bound: BoundArgs
    mark: int  # trail length before the invocation began


@dataclass
class ArrowEntered:
    subnet: str
    arrow: int


@dataclass
class SubnetEntered:
    callee: str


@dataclass
class SubnetReturned:
    callee: str


TrailEntry = Union[VarWrite, ItemDone, ArrowEntered, SubnetEntered, SubnetReturned]


# --- run configuration and results ------------------------------------------


@dataclass
class RunConfig:
    max_solutions: Optional[int] = None
    max_depth: Optional[int] = None
    trace_sink: Optional[object] = None  # anything with .write(str)
    initial_vars: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for label, value in (("max_solutions", self.max_solutions), ("max_depth", self.max_depth)):
            if value is not None and value < 1:
                raise ValueError(f"{label} must be >= 1")


@dataclass(frozen=True)
class OptionsView:
    """Snapshot handed to primitives: which solution is being completed
    (0-based), current trail depth, and the invocation direction."""

    curr_sol: int
    depth: int
    direction: Direction


@dataclass(frozen=True)
class SolutionReport:
    index: int
    path: tuple[tuple[str, int], ...]  # (subnet, arrow index) in traversal order


class Termination(enum.Enum):
    EXHAUSTED = "exhausted"
    SOLUTION_LIMIT = "solution-limit"
    DEPTH_LIMIT = "depth-limit"
    ABORTED = "aborted"


@dataclass(frozen=True)
class RunResult:
    solutions: tuple[SolutionReport, ...]
    termination: Termination
    error: Optional[str] = None

    @property
    def count(self) -> int:
        return len(self.solutions)


# --- primitive-facing context -----------------------------------------------


class PrimitiveContext:
    """Per-invocation facade over the session; do not retain past the call."""

    def __init__(self, session: "Session", direction: Direction):
        self._session = session
        self.direction = direction
        self.failure_raised = False

    def read_var(self, name: str) -> str:
        try:
            return self._session._store[name]
        except KeyError:
            raise UnboundVariable(f"variable {name!r} is unbound") from None

    def write_var(self, name: str, value: str) -> None:
        if self.direction is not Direction.FORWARD:
            raise WriteDuringBackward(f"write to {name!r} during backward execution")
        if not isinstance(value, str):
            raise TypeError(f"variable values are strings, got {type(value).__name__}")
        session = self._session
        session._push(VarWrite(name, session._store.get(name)))
        session._store[name] = value

    def raise_failure(self) -> None:
        """Mark the current forward invocation as failed (checked by the host
        after the handler returns)."""
        self.failure_raised = True

    def current_options(self) -> OptionsView:
        return OptionsView(
            curr_sol=len(self._session._solutions),
            depth=len(self._session._trail),
            direction=self.direction,
        )


# --- the session -------------------------------------------------------------


class Session:
    """One incremental search over a network.

    next_solution() yields solutions in the same order run() reports them and
    returns None at exhaustion (or once max_solutions is reached). Hard
    primitive errors raise PrimitiveError; exceeding max_depth raises
    DepthLimitError. Either ends the session.
    """

    def __init__(self, net: ControlNetwork, registry: PrimitiveRegistry, config: Optional[RunConfig] = None):
        self.net = net
        self.registry = registry
        self.config = config or RunConfig()
        self._check_loadable()
        self._store: dict[str, str] = dict(self.config.initial_vars)
        self._trail: list[TrailEntry] = []
        self._visits: dict[tuple[str, str], int] = {}
        self._live_arrows: dict[tuple[str, int], int] = {}
        self._solutions: list[SolutionReport] = []
        self._termination: Optional[Termination] = None
        self._error: Optional[str] = None
        self._arrows_from: dict[str, dict[str, list[int]]] = {}
        self._visit_limits: dict[tuple[str, str], int] = {}
        for sub in net.subnets.values():
            table: dict[str, list[int]] = {}
            for idx, arrow in enumerate(sub.arrows):
                table.setdefault(arrow.source, []).append(idx)
            self._arrows_from[sub.name] = table
            for st in sub.states:
                if st.visit_limit is not None:
                    self._visit_limits[(sub.name, st.name)] = st.visit_limit
        self._gen = self._solutions_gen()

    # -- public surface --

    def next_solution(self) -> Optional[SolutionReport]:
        if self._termination is not None:
            return None
        limit = self.config.max_solutions
        if limit is not None and len(self._solutions) >= limit:
            self._termination = Termination.SOLUTION_LIMIT
            return None
        try:
            return next(self._gen)
        except StopIteration:
            self._termination = Termination.EXHAUSTED
            return None
        except DepthLimitError as exc:
            self._termination = Termination.DEPTH_LIMIT
            self._error = str(exc)
            raise
        except PrimitiveError as exc:
            self._termination = Termination.ABORTED
            self._error = str(exc)
            raise

    @property
    def solutions(self) -> tuple[SolutionReport, ...]:
        return tuple(self._solutions)

    @property
    def termination(self) -> Optional[Termination]:
        return self._termination

    @property
    def error(self) -> Optional[str]:
        return self._error

    @property
    def trail_depth(self) -> int:
        return len(self._trail)

    def variables(self) -> dict[str, str]:
        return dict(self._store)

    # -- load-time checks --

    def _check_loadable(self) -> None:
        diagnostics = validate(self.net)
        if diagnostics:
            listing = "; ".join(f"{d.rule}: {d.message}" for d in diagnostics)
            raise LoadError(f"network is not valid: {listing}")
        for sub in self.net.subnets.values():
            for ai, arrow in enumerate(sub.arrows):
                for ii, item in enumerate(arrow.items):
                    if not isinstance(item, PrimitiveCall):
                        continue
                    try:
                        check_call(self.registry.get(item.name), item)
                    except PrimitiveHostError as exc:
                        raise LoadError(f"subnet {sub.name!r} arrow {ai} item {ii}: {exc}") from exc

    # -- search ----------------------------------------------------------------
    #
    # The recursion encodes the strategy directly: a state generator yields
    # once per distinct way to reach a final state of its subnet, and every
    # resumption after a yield is a backtrack that continues with the next
    # alternative. Undo code sits on the normal control path after each yield
    # point, which guarantees trail balance without a separate unwinder.

    def _solutions_gen(self) -> Iterator[SolutionReport]:
        main = self.net.subnets[self.net.main]
        self._visit(main.name, main.initial)
        for _ in self._solve(main, main.initial):
            report = SolutionReport(index=len(self._solutions), path=self._live_path())
            self._solutions.append(report)
            self._trace({"ev": "sol", "index": report.index, "path": [list(p) for p in report.path]})
            yield report
        self._unvisit(main.name, main.initial)

    def _solve(self, sub: Subnet, state: str) -> Iterator[None]:
        # Success (final state) is offered before the state's own arrows, so a
        # final state with outgoing arrows first completes, then explores.
        if state in sub.finals:
            yield None
        for idx in self._arrows_from[sub.name].get(state, ()):
            arrow = sub.arrows[idx]
            if not self._arrow_allowed(sub.name, idx, arrow.target, arrow.range_limit):
                continue
            self._push(ArrowEntered(sub.name, idx))
            self._live_arrows[(sub.name, idx)] = self._live_arrows.get((sub.name, idx), 0) + 1
            for _ in self._run_items(sub, idx, arrow.items, 0):
                self._visit(sub.name, arrow.target)
                yield from self._solve(sub, arrow.target)
                self._unvisit(sub.name, arrow.target)
            self._live_arrows[(sub.name, idx)] -= 1
            self._pop(ArrowEntered)

    def _run_items(self, sub: Subnet, arrow_idx: int, items: tuple, i: int) -> Iterator[None]:
        if i == len(items):
            yield None
            return
        item = items[i]
        if isinstance(item, PrimitiveCall):
            if not self._forward_item(sub.name, arrow_idx, i, item):
                return
            yield from self._run_items(sub, arrow_idx, items, i + 1)
            self._backward_item()
        else:
            callee = self.net.subnets[item.name]
            if not self._may_visit(item.name, callee.initial):
                return
            self._push(SubnetEntered(item.name))
            self._trace({"ev": "call", "subnet": item.name})
            self._visit(item.name, callee.initial)
            for _ in self._solve(callee, callee.initial):
                self._push(SubnetReturned(item.name))
                self._trace({"ev": "ret", "subnet": item.name})
                yield from self._run_items(sub, arrow_idx, items, i + 1)
                self._pop(SubnetReturned)
            self._unvisit(item.name, callee.initial)
            self._pop(SubnetEntered)

    def _forward_item(self, sub_name: str, arrow_idx: int, item_idx: int, call: PrimitiveCall) -> bool:
        definition = self.registry.get(call.name)
        mark = len(self._trail)
        locus = f"{sub_name}/arrow {arrow_idx}/item {item_idx} ({call.name})"
        try:
            bound = bind_args(definition, call, self._store)
        except PrimitiveHostError as exc:
            raise PrimitiveError(f"{locus}: {exc}") from exc
        ctx = PrimitiveContext(self, Direction.FORWARD)
        outcome = self._invoke(definition, Direction.FORWARD, bound, ctx, locus)
        if isinstance(outcome, Failure):
            self._rollback_to(mark)
            self._trace({"ev": "fail", "net": sub_name, "arrow": arrow_idx, "item": item_idx})
            return False
        for slot, value in zip(bound.out_slots, outcome.outs):
            ctx.write_var(slot, value)
        self._trace({"ev": "fw", "net": sub_name, "arrow": arrow_idx, "item": item_idx})
        self._push(ItemDone(sub_name, arrow_idx, item_idx, call.name, bound, mark))
        return True

    def _backward_item(self) -> None:
        entry = self._pop(ItemDone)
        definition = self.registry.get(entry.primitive)
        locus = f"{entry.subnet}/arrow {entry.arrow}/item {entry.item} ({entry.primitive})"
        ctx = PrimitiveContext(self, Direction.BACKWARD)
        self._invoke(definition, Direction.BACKWARD, entry.bound, ctx, locus)
        self._trace({"ev": "bw", "net": entry.subnet, "arrow": entry.arrow, "item": entry.item})
        self._rollback_to(entry.mark)

    def _invoke(self, definition, direction: Direction, bound: BoundArgs, ctx, locus: str):
        try:
            outcome = invoke(definition, direction, bound, ctx)
        except (DepthLimitError, PrimitiveError):
            raise
        except Exception as exc:  # handler bug: abort the run, keep the diagnosis
            outcome = Error(f"unhandled {type(exc).__name__}: {exc}")
        if isinstance(outcome, Error):
            raise PrimitiveError(f"{locus}: {outcome.message}")
        return outcome

    # -- bookkeeping --

    def _arrow_allowed(self, sub_name: str, idx: int, target: str, range_limit: Optional[int]) -> bool:
        if range_limit is not None and self._live_arrows.get((sub_name, idx), 0) + 1 > range_limit:
            return False
        return self._may_visit(sub_name, target)

    def _may_visit(self, sub_name: str, state: str) -> bool:
        limit = self._visit_limits.get((sub_name, state))
        return limit is None or self._visits.get((sub_name, state), 0) + 1 <= limit

    def _visit(self, sub_name: str, state: str) -> None:
        key = (sub_name, state)
        self._visits[key] = self._visits.get(key, 0) + 1

    def _unvisit(self, sub_name: str, state: str) -> None:
        self._visits[(sub_name, state)] -= 1

    def _push(self, entry: TrailEntry) -> None:
        limit = self.config.max_depth
        if limit is not None and len(self._trail) + 1 > limit:
            raise DepthLimitError(f"trail would exceed max_depth={limit}")
        self._trail.append(entry)

    def _pop(self, expected: type) -> TrailEntry:
        entry = self._trail.pop()
        assert isinstance(entry, expected), f"trail discipline broken: popped {entry!r}"
        return entry

    def _rollback_to(self, mark: int) -> None:
        while len(self._trail) > mark:
            entry = self._trail.pop()
            assert isinstance(entry, VarWrite), f"trail discipline broken: rolled back {entry!r}"
            if entry.prev is None:
                self._store.pop(entry.name, None)
            else:
                self._store[entry.name] = entry.prev

    def _live_path(self) -> tuple[tuple[str, int], ...]:
        return tuple((e.subnet, e.arrow) for e in self._trail if isinstance(e, ArrowEntered))

    def _trace(self, event: dict) -> None:
        sink = self.config.trace_sink
        if sink is not None:
            sink.write(json.dumps(event, separators=(",", ":")) + "\n")


def run(net: ControlNetwork, registry: PrimitiveRegistry, config: Optional[RunConfig] = None) -> RunResult:
    """Search to completion and summarize. Hard errors and the depth limit are
    reported as terminations rather than raised."""
    session = Session(net, registry, config)
    try:
        while session.next_solution() is not None:
            pass
    except PrimitiveError:
        return RunResult(session.solutions, Termination.ABORTED, session.error)
    except DepthLimitError:
        return RunResult(session.solutions, Termination.DEPTH_LIMIT, session.error)
    return RunResult(session.solutions, session.termination)
