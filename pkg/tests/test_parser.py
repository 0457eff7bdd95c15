import pytest

from cnp.model import (
    Arrow,
    ControlNetwork,
    LiteralInt,
    LiteralText,
    PrimitiveCall,
    State,
    Subnet,
    SubnetCall,
    VarIn,
    VarOut,
)
from cnp.parser import ParseError, ValidationError, parse, serialize

MINIMAL = "net main:\n state A init\n state B final\n arrow A -> B:\n"


def test_minimal_program():
    net = parse(MINIMAL)
    assert list(net.subnets) == ["main"]
    sub = net.subnets["main"]
    assert sub.initial == "A"
    assert sub.finals == {"B"}
    assert sub.arrows == (Arrow("A", "B"),)


def test_shipped_corpus_has_two_subnets(mb_corpus):
    net = parse((mb_corpus / "program.cn").read_text())
    assert list(net.subnets) == ["main", "Room"]


def test_undeclared_arrow_endpoint_position():
    text = "net main:\n state A init final\n arrow A -> C:\n"
    with pytest.raises(ParseError) as err:
        parse(text)
    assert err.value.span.line == 3
    assert "'C'" in str(err.value)


def test_items_args_and_options():
    text = (
        'net main:\n'
        '  state A init visits=2\n'
        '  state B final\n'
        '  arrow A -> B range=3: Go("x\\"y\\\\z\\n", -4, $inp, &out); call main\n'
    )
    sub = parse(text).subnets["main"]
    assert sub.states[0] == State("A", visit_limit=2)
    arrow = sub.arrows[0]
    assert arrow.range_limit == 3
    assert arrow.items == (
        PrimitiveCall("Go", (LiteralText('x"y\\z\n'), LiteralInt(-4), VarIn("inp"), VarOut("out"))),
        SubnetCall("main"),
    )


def test_comments_and_blank_lines_ignored():
    text = "# header\n\nnet main:  # trailing\n state A init final # note\n\n"
    assert parse(text).subnets["main"].initial == "A"


def test_hash_inside_string_is_not_a_comment():
    text = 'net main:\n state A init final\n arrow A -> A: P("#x")\n'
    arrow = parse(text).subnets["main"].arrows[0]
    assert arrow.items[0].args == (LiteralText("#x"),)


def test_forward_reference_to_later_state():
    text = "net main:\n state A init\n arrow A -> B:\n state B final\n"
    assert parse(text).subnets["main"].arrows[0].target == "B"


def test_declaration_order_preserved():
    text = (
        "net main:\n state A init\n state B final\n"
        " arrow A -> B: P()\n arrow A -> A: Q()\n arrow A -> B:\n"
    )
    arrows = parse(text).subnets["main"].arrows
    assert [a.items[0].name if a.items else None for a in arrows] == ["P", "Q", None]


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("", "empty input"),
        ("state A init\n", "expected 'net'"),
        ("net main\n", "expected :"),
        ("net main:\n state A init init\n", "duplicate 'init'"),
        ("net main:\n state A init\n state B init final\n", "already has init"),
        ("net main:\n state A final\n", "no init state"),
        ("net main:\n state A init\n state A final\n", "already declared"),
        ("net main:\n state A init final\n arrow A -> A\n", "expected :"),
        ("net main:\n state A init final visits=0\n", ">= 1"),
        ("net main:\n state A init final\n arrow A -> A range=0:\n", ">= 1"),
        ("net main:\n state A init final\n arrow A -> A: P(\n", "expected argument"),
        ('net main:\n state A init final\n arrow A -> A: P("x\n', "unterminated string"),
        ('net main:\n state A init final\n arrow A -> A: P("\\q")\n', "unknown escape"),
        ("net main:\n state A init final\n arrow A -> A: P() Q()\n", "trailing"),
        ("net main:\n state A init final\n arrow A -> A: call\n", "expected ("),
        ("net main:\n state A init final %\n", "unexpected character"),
        ("net one:\n state A init final\nnet one:\n state B init final\n", "already declared"),
        ("net main:\n state A init final\n bogus A\n", "expected 'state' or 'arrow'"),
    ],
)
def test_syntax_errors(text, fragment):
    with pytest.raises(ParseError) as err:
        parse(text)
    assert fragment in str(err.value)


def test_error_spans_are_one_based():
    with pytest.raises(ParseError) as err:
        parse("net main:\n  state A init final %\n")
    assert (err.value.span.line, err.value.span.column) == (2, 22)


def test_structural_problems_become_validation_errors():
    with pytest.raises(ValidationError) as err:
        parse("net main:\n state A init\n")
    assert [d.rule for d in err.value.diagnostics] == ["NO_FINAL"]
    with pytest.raises(ValidationError) as err:
        parse("net other:\n state A init final\n")
    assert [d.rule for d in err.value.diagnostics] == ["NO_MAIN"]
    with pytest.raises(ValidationError) as err:
        parse("net main:\n state A init final\n arrow A -> A: call Rooom\n")
    assert [d.rule for d in err.value.diagnostics] == ["UNKNOWN_SUBNET"]


def test_roundtrip_of_shipped_corpus(mb_corpus):
    source = (mb_corpus / "program.cn").read_text()
    net = parse(source)
    assert parse(serialize(net)) == net


def test_canonical_form_is_a_fixed_point():
    canon = serialize(parse(MINIMAL))
    assert serialize(parse(canon)) == canon


def test_visit_limit_serializes_as_visits_token():
    net = parse("net main:\n state A init visits=1\n state B final\n arrow A -> B:\n")
    assert "  state A init visits=1" in serialize(net).splitlines()


def test_serialize_quotes_and_escapes():
    net = ControlNetwork(
        subnets={
            "main": Subnet(
                "main",
                (State("A"), State("B")),
                "A",
                frozenset({"B"}),
                (Arrow("A", "B", (PrimitiveCall("P", (LiteralText('a"b\\c\nd'),)),)),),
            )
        }
    )
    line = serialize(net).splitlines()[-1]
    assert line == '  arrow A -> B: P("a\\"b\\\\c\\nd")'
    assert parse(serialize(net)) == net
