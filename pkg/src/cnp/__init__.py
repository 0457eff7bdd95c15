"""Runtime for control network programs.

A control network is a recursive system of graphs whose arrows carry
primitive calls; running one is a depth-first search with forward/backward
primitive execution and chronological backtracking. Primitives are registered
natively or bridged to external executables over a small argv/stdout
protocol.
"""

from .engine import (
    DepthLimitError,
    LoadError,
    OptionsView,
    PrimitiveError,
    RunConfig,
    RunResult,
    Session,
    SolutionReport,
    Termination,
    WriteDuringBackward,
    run,
)
from .model import (
    Arg,
    Arrow,
    CallItem,
    ControlNetwork,
    Diagnostic,
    LiteralInt,
    LiteralText,
    PrimitiveCall,
    State,
    Subnet,
    SubnetCall,
    VarIn,
    VarOut,
    validate,
)
from .parser import ParseError, SourceSpan, ValidationError, parse, serialize
from .primitives import (
    BoundArgs,
    Direction,
    Error,
    Failure,
    Outcome,
    Param,
    ParamKind,
    ParamMode,
    PrimitiveDef,
    PrimitiveKind,
    PrimitiveRegistry,
    Success,
    bind_args,
    invoke,
    register,
)

__version__ = "0.1.0"
