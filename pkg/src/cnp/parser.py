"""Parser and serializer for the textual ``.cn`` network format.

The format is line oriented: one statement per line, ``#`` comments, blank
lines ignored. ``parse`` is total over strings: every input yields either a
validated network or a positioned error. ``serialize`` emits the canonical
form, which ``parse`` maps back to a structurally identical network.

    net main:
      state A init
      state B final visits=1
      arrow A -> B range=2: Walk("Door", $to); call Room
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .model import (
    Arg,
    Arrow,
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


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


class ParseError(Exception):
    def __init__(self, span: SourceSpan, message: str):
        super().__init__(f"{span}: {message}")
        self.span = span
        self.message = message


class ValidationError(Exception):
    """Raised by parse() when the text is syntactically fine but structurally not."""

    def __init__(self, diagnostics: list[Diagnostic]):
        super().__init__("; ".join(f"{d.rule}: {d.message}" for d in diagnostics))
        self.diagnostics = diagnostics


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t]+)
  | (?P<comment>\#.*)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<int>-?[0-9]+)
  | (?P<string>"(?:\\.|[^"\\])*")
  | (?P<arrowop>->)
  | (?P<punct>[:;,()$&=])
    """,
    re.VERBOSE,
)

_ESCAPES = {'"': '"', "\\": "\\", "n": "\n"}
_UNESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n"}


@dataclass(frozen=True)
class _Token:
    kind: str  # name | int | string | punct ('->' included)
    text: str
    span: SourceSpan


def _lex_line(line: str, lineno: int) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(line):
        m = _TOKEN_RE.match(line, pos)
        span = SourceSpan(lineno, pos + 1)
        if m is None:
            if line[pos] == '"':
                raise ParseError(span, "unterminated string literal")
            raise ParseError(span, f"unexpected character {line[pos]!r}")
        pos = m.end()
        kind = m.lastgroup
        if kind == "ws":
            continue
        if kind == "comment":
            break
        text = m.group()
        if kind == "string":
            text = _unescape(text[1:-1], span)
        elif kind == "arrowop":
            kind = "punct"
        tokens.append(_Token(kind, text, span))
    return tokens


def _unescape(body: str, span: SourceSpan) -> str:
    out = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\":
            i += 1
            if i >= len(body) or body[i] not in _ESCAPES:
                raise ParseError(span, f"unknown escape \\{body[i] if i < len(body) else ''}")
            out.append(_ESCAPES[body[i]])
        else:
            out.append(ch)
        i += 1
    return "".join(out)


def _quote(text: str) -> str:
    return '"' + "".join(_UNESCAPES.get(ch, ch) for ch in text) + '"'


class _Cursor:
    """Token stream for one statement line."""

    def __init__(self, tokens: list[_Token], lineno: int, line_len: int):
        self.tokens = tokens
        self.i = 0
        self.end_span = SourceSpan(lineno, line_len + 1)

    def peek(self) -> _Token | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self) -> _Token | None:
        tok = self.peek()
        if tok is not None:
            self.i += 1
        return tok

    def expect(self, kind: str, text: str | None = None, what: str | None = None) -> _Token:
        tok = self.next()
        want = what or (text if text is not None else kind)
        if tok is None:
            raise ParseError(self.end_span, f"expected {want} before end of line")
        if tok.kind != kind or (text is not None and tok.text != text):
            raise ParseError(tok.span, f"expected {want}, found {tok.text!r}")
        return tok

    def expect_end(self) -> None:
        tok = self.peek()
        if tok is not None:
            raise ParseError(tok.span, f"unexpected trailing {tok.text!r}")

    def take_punct(self, text: str) -> bool:
        tok = self.peek()
        if tok is not None and tok.kind == "punct" and tok.text == text:
            self.i += 1
            return True
        return False


class _SubnetBuilder:
    def __init__(self, name: str, span: SourceSpan):
        self.name = name
        self.span = span
        self.states: list[State] = []
        self.state_names: set[str] = set()
        self.initial: str | None = None
        self.finals: set[str] = set()
        self.arrows: list[Arrow] = []
        self.arrow_spans: list[SourceSpan] = []

    def finish(self) -> Subnet:
        if self.initial is None:
            raise ParseError(self.span, f"subnet {self.name!r} has no init state")
        for arrow, span in zip(self.arrows, self.arrow_spans):
            for endpoint in (arrow.source, arrow.target):
                if endpoint not in self.state_names:
                    raise ParseError(span, f"arrow endpoint {endpoint!r} is not a declared state")
        return Subnet(
            name=self.name,
            states=tuple(self.states),
            initial=self.initial,
            finals=frozenset(self.finals),
            arrows=tuple(self.arrows),
        )


def parse(text: str) -> ControlNetwork:
    """Parse ``.cn`` source into a validated ControlNetwork.

    Raises ParseError (with 1-based line/column) on syntax violations and
    ValidationError when the parsed structure fails validate().
    """
    subnets: dict[str, Subnet] = {}
    order_span: dict[str, SourceSpan] = {}
    builder: _SubnetBuilder | None = None

    def close(b: _SubnetBuilder | None) -> None:
        if b is not None:
            subnets[b.name] = b.finish()

    lines = text.split("\n")
    for lineno, raw in enumerate(lines, start=1):
        tokens = _lex_line(raw, lineno)
        if not tokens:
            continue
        cur = _Cursor(tokens, lineno, len(raw))
        head = cur.expect("name", what="statement keyword")
        if head.text == "net":
            close(builder)
            name = cur.expect("name", what="subnet name")
            cur.expect("punct", ":")
            cur.expect_end()
            if name.text in subnets or (builder and name.text == builder.name):
                raise ParseError(name.span, f"subnet {name.text!r} already declared")
            builder = _SubnetBuilder(name.text, head.span)
            order_span[name.text] = head.span
            continue
        if builder is None:
            raise ParseError(head.span, "expected 'net' declaration")
        if head.text == "state":
            _parse_state(cur, builder)
        elif head.text == "arrow":
            _parse_arrow(cur, builder)
        else:
            raise ParseError(head.span, f"expected 'state' or 'arrow', found {head.text!r}")
    if builder is None:
        raise ParseError(SourceSpan(1, 1), "empty input: expected at least one 'net' declaration")
    close(builder)

    net = ControlNetwork(subnets=subnets, main="main")
    diagnostics = validate(net)
    if diagnostics:
        raise ValidationError(diagnostics)
    return net


def _parse_state(cur: _Cursor, builder: _SubnetBuilder) -> None:
    name = cur.expect("name", what="state name")
    if name.text in builder.state_names:
        raise ParseError(name.span, f"state {name.text!r} already declared")
    visit_limit: int | None = None
    is_init = is_final = False
    while (tok := cur.next()) is not None:
        if tok.kind != "name" or tok.text not in ("init", "final", "visits"):
            raise ParseError(tok.span, f"expected 'init', 'final' or 'visits=', found {tok.text!r}")
        if tok.text == "init":
            if is_init:
                raise ParseError(tok.span, "duplicate 'init' marker")
            if builder.initial is not None:
                raise ParseError(tok.span, f"subnet {builder.name!r} already has init state {builder.initial!r}")
            is_init = True
        elif tok.text == "final":
            if is_final:
                raise ParseError(tok.span, "duplicate 'final' marker")
            is_final = True
        else:
            if visit_limit is not None:
                raise ParseError(tok.span, "duplicate 'visits=' marker")
            cur.expect("punct", "=")
            num = cur.expect("int", what="visit limit")
            visit_limit = int(num.text)
            if visit_limit < 1:
                raise ParseError(num.span, "visit limit must be >= 1")
    builder.states.append(State(name.text, visit_limit))
    builder.state_names.add(name.text)
    if is_init:
        builder.initial = name.text
    if is_final:
        builder.finals.add(name.text)


def _parse_arrow(cur: _Cursor, builder: _SubnetBuilder) -> None:
    span = cur.peek().span if cur.peek() else cur.end_span
    source = cur.expect("name", what="source state")
    cur.expect("punct", "->")
    target = cur.expect("name", what="target state")
    range_limit: int | None = None
    tok = cur.peek()
    if tok is not None and tok.kind == "name" and tok.text == "range":
        cur.next()
        cur.expect("punct", "=")
        num = cur.expect("int", what="range limit")
        range_limit = int(num.text)
        if range_limit < 1:
            raise ParseError(num.span, "range must be >= 1")
    cur.expect("punct", ":")
    items: list[PrimitiveCall | SubnetCall] = []
    if cur.peek() is not None:
        items.append(_parse_item(cur))
        while cur.take_punct(";"):
            items.append(_parse_item(cur))
    cur.expect_end()
    builder.arrows.append(Arrow(source.text, target.text, tuple(items), range_limit))
    builder.arrow_spans.append(span)


def _parse_item(cur: _Cursor) -> PrimitiveCall | SubnetCall:
    name = cur.expect("name", what="primitive or 'call'")
    nxt = cur.peek()
    if name.text == "call" and nxt is not None and nxt.kind == "name":
        return SubnetCall(cur.next().text)
    cur.expect("punct", "(")
    args: list[Arg] = []
    if not cur.take_punct(")"):
        args.append(_parse_arg(cur))
        while cur.take_punct(","):
            args.append(_parse_arg(cur))
        cur.expect("punct", ")")
    return PrimitiveCall(name.text, tuple(args))


def _parse_arg(cur: _Cursor) -> Arg:
    tok = cur.next()
    if tok is None:
        raise ParseError(cur.end_span, "expected argument before end of line")
    if tok.kind == "string":
        return LiteralText(tok.text)
    if tok.kind == "int":
        return LiteralInt(int(tok.text))
    if tok.kind == "punct" and tok.text == "$":
        return VarIn(cur.expect("name", what="variable name").text)
    if tok.kind == "punct" and tok.text == "&":
        return VarOut(cur.expect("name", what="variable name").text)
    raise ParseError(tok.span, f"expected argument, found {tok.text!r}")


def serialize(net: ControlNetwork) -> str:
    """Canonical text for a valid network; parse(serialize(n)) == n."""
    out: list[str] = []
    for idx, sub in enumerate(net.subnets.values()):
        if idx:
            out.append("")
        out.append(f"net {sub.name}:")
        for st in sub.states:
            parts = [f"  state {st.name}"]
            if st.name == sub.initial:
                parts.append("init")
            if st.name in sub.finals:
                parts.append("final")
            if st.visit_limit is not None:
                parts.append(f"visits={st.visit_limit}")
            out.append(" ".join(parts))
        for arrow in sub.arrows:
            head = f"  arrow {arrow.source} -> {arrow.target}"
            if arrow.range_limit is not None:
                head += f" range={arrow.range_limit}"
            head += ":"
            if arrow.items:
                head += " " + "; ".join(_fmt_item(item) for item in arrow.items)
            out.append(head)
    return "\n".join(out) + "\n"


def _fmt_item(item: PrimitiveCall | SubnetCall) -> str:
    if isinstance(item, SubnetCall):
        return f"call {item.name}"
    return f"{item.name}({', '.join(_fmt_arg(a) for a in item.args)})"


def _fmt_arg(arg: Arg) -> str:
    if isinstance(arg, LiteralText):
        return _quote(arg.value)
    if isinstance(arg, LiteralInt):
        return str(arg.value)
    if isinstance(arg, VarIn):
        return f"${arg.name}"
    return f"&{arg.name}"
