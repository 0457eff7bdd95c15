"""Round-trip and totality properties of the .cn format."""

import string

from hypothesis import given, settings
from hypothesis import strategies as st

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
    validate,
)
from cnp.parser import ParseError, ValidationError, parse, serialize

names = st.from_regex(r"[A-Za-z_][A-Za-z0-9_]{0,8}", fullmatch=True)
# any text except unpaired surrogates (not encodable); escapes cover " \ and newline
texts = st.text(alphabet=st.characters(exclude_categories=("Cs",)), max_size=12)


def args_strategy():
    return st.one_of(
        texts.map(LiteralText),
        st.integers(-10**6, 10**6).map(LiteralInt),
        names.map(VarIn),
        names.map(VarOut),
    )


@st.composite
def networks(draw) -> ControlNetwork:
    subnet_names = ["main"] + draw(st.lists(names, max_size=2, unique=True).filter(lambda ns: "main" not in ns))
    subnets = {}
    for sub_name in subnet_names:
        state_names = draw(st.lists(names, min_size=1, max_size=5, unique=True))
        finals = frozenset(draw(st.sets(st.sampled_from(state_names), min_size=1)))
        state_pool = st.sampled_from(state_names)
        items = st.one_of(
            st.builds(PrimitiveCall, names, st.lists(args_strategy(), max_size=3).map(tuple)),
            st.sampled_from(subnet_names).map(SubnetCall),
        )
        arrows = draw(
            st.lists(
                st.builds(
                    Arrow,
                    state_pool,
                    state_pool,
                    st.lists(items, max_size=3).map(tuple),
                    st.one_of(st.none(), st.integers(1, 9)),
                ),
                max_size=5,
            )
        )
        states = tuple(
            State(n, draw(st.one_of(st.none(), st.integers(1, 9)))) for n in state_names
        )
        subnets[sub_name] = Subnet(sub_name, states, state_names[0], finals, tuple(arrows))
    return ControlNetwork(subnets=subnets)


@given(networks())
def test_roundtrip_identity(net):
    assert validate(net) == []
    assert parse(serialize(net)) == net


@given(networks())
def test_canonical_fixed_point(net):
    canon = serialize(net)
    assert serialize(parse(canon)) == canon


@settings(max_examples=300)
@given(st.text(alphabet=st.characters(exclude_categories=("Cs",)), max_size=200))
def test_parse_is_total(text):
    try:
        net = parse(text)
    except (ParseError, ValidationError):
        return
    assert validate(net) == []


@settings(max_examples=200)
@given(st.text(alphabet=string.printable + '"\\$&', max_size=120))
def test_parse_is_total_on_format_shaped_noise(text):
    noisy = "net main:\n state A init final\n" + text
    try:
        parse(noisy)
    except (ParseError, ValidationError):
        pass
