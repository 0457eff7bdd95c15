from cnp import model
from cnp.model import (
    Arrow,
    ControlNetwork,
    PrimitiveCall,
    State,
    Subnet,
    SubnetCall,
    validate,
)
from cnp.parser import parse


def net_of(*subnets: Subnet) -> ControlNetwork:
    return ControlNetwork(subnets={s.name: s for s in subnets})


def simple_subnet(name="main", finals=("B",), arrows=(), states=("A", "B")) -> Subnet:
    return Subnet(
        name=name,
        states=tuple(State(s) for s in states),
        initial=states[0],
        finals=frozenset(finals),
        arrows=tuple(arrows),
    )


def rules(diags):
    return [d.rule for d in diags]


def test_shipped_mb_corpus_is_clean(mb_corpus):
    net = parse((mb_corpus / "program.cn").read_text())
    assert validate(net) == []


def test_zero_final_states_flagged():
    sub = simple_subnet(finals=())
    diags = validate(net_of(sub))
    assert rules(diags) == [model.NO_FINAL]
    assert diags[0].subnet == "main"


def test_subnet_call_to_unknown_name():
    sub = simple_subnet(arrows=(Arrow("A", "B", (SubnetCall("Rooom"),)),))
    diags = validate(net_of(sub))
    assert rules(diags) == [model.UNKNOWN_SUBNET]
    assert diags[0].arrow == 0


def test_missing_main_subnet():
    diags = validate(net_of(simple_subnet(name="Other")))
    assert model.NO_MAIN in rules(diags)


def test_arrow_endpoint_not_declared():
    sub = simple_subnet(arrows=(Arrow("A", "C"),))
    assert rules(validate(net_of(sub))) == [model.UNKNOWN_STATE]


def test_duplicate_state_name():
    sub = simple_subnet(states=("A", "A"), finals=("A",))
    assert model.DUP_STATE in rules(validate(net_of(sub)))


def test_bad_limits_and_names():
    sub = Subnet(
        name="main",
        states=(State("A", visit_limit=0), State("B-b")),
        initial="A",
        finals=frozenset({"B-b"}),
        arrows=(Arrow("A", "B-b", (), 0),),
    )
    got = rules(validate(net_of(sub)))
    assert model.BAD_VISIT_LIMIT in got
    assert model.BAD_RANGE in got
    assert model.BAD_NAME in got


def test_key_name_mismatch():
    sub = simple_subnet(name="main")
    net = ControlNetwork(subnets={"other": sub, "main": sub})
    assert model.NAME_MISMATCH in rules(validate(net))


def test_validate_is_pure():
    sub = simple_subnet(finals=())
    net = net_of(sub)
    first = validate(net)
    second = validate(net)
    assert first == second
    assert net.subnets["main"] == sub
