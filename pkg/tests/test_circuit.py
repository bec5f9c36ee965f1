import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from mvcirc.algebra import App, Const, Var, eval_term
from mvcirc.circuit import (
    CeqvInstance,
    Circuit,
    CircuitBuilder,
    CsatInstance,
    McsatInstance,
    ScsatInstance,
    compile_circuit,
    eval_circuit,
    from_term,
    iterated_commutator_circuit,
    parse_circuit,
    random_circuit,
    serialize_circuit,
    to_term,
)
from mvcirc.errors import ForwardReference, ParseError, UnboundInput
from mvcirc.zoo import get


def _term_size(t):
    if isinstance(t, App):
        return 1 + sum(_term_size(a) for a in t.args)
    return 1


def test_eval_meet_join_pair(lat2):
    b = CircuitBuilder("2lattice")
    x, y = b.input("x"), b.input("y")
    c = b.build([b.op("meet", x, y), b.op("join", x, y)])
    assert eval_circuit(lat2, c, {"x": 0, "y": 1}) == (0, 1)


def test_eval_s3_commutator_of_commuting_elements(s3):
    c = iterated_commutator_circuit(s3, 2)
    # rotations commute: [r, r^2] = identity
    assert eval_circuit(s3, c, {"x1": 3, "x2": 4}) == (0,)
    # non-commuting transpositions give a nonidentity element
    assert eval_circuit(s3, c, {"x1": 1, "x2": 2}) != (0,)


def test_shared_gate_evaluates_once(lat2):
    b = CircuitBuilder("2lattice")
    x, y = b.input("x"), b.input("y")
    shared = b.op("meet", x, y)
    c = b.build([b.op("join", shared, x), b.op("meet", shared, y)])
    count = {}
    eval_circuit(lat2, c, {"x": 1, "y": 1}, hook=lambda i, v: count.__setitem__(i, count.get(i, 0) + 1))
    assert all(v == 1 for v in count.values())
    assert len(count) == len(c.gates)


def test_unbound_input(lat2):
    b = CircuitBuilder("2lattice")
    x = b.input("x")
    c = b.build([x])
    with pytest.raises(UnboundInput):
        eval_circuit(lat2, c, {})


# ---------------------------------------------------------------------------
# Gate-count fact for the iterated commutator


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_iterated_commutator_gate_count(s3, n):
    c = iterated_commutator_circuit(s3, n)
    assert c.size == 6 * n - 5


def test_iterated_commutator_semantics(s3):
    # against the unfolded term, for n = 3
    c = iterated_commutator_circuit(s3, 3)
    t = to_term(c, c.outputs[0])
    for asg in itertools.product(range(6), repeat=3):
        env = {"x1": asg[0], "x2": asg[1], "x3": asg[2]}
        assert eval_circuit(s3, c, env) == (eval_term(s3, t, asg),)


def test_to_term_of_shared_circuit_grows(s3):
    c = iterated_commutator_circuit(s3, 3)
    t = to_term(c, c.outputs[0])
    assert _term_size(t) > c.size


# ---------------------------------------------------------------------------
# term <-> circuit


def test_from_term_is_tree_and_matches_eval(z4):
    t = App("mul", (App("inv", (Var(0),)), App("mul", (Var(1), Var(0)))))
    c = from_term(z4, t)
    assert c.size == _term_size(t)
    for asg in itertools.product(range(4), repeat=2):
        env = {"x0": asg[0], "x1": asg[1]}
        assert eval_circuit(z4, c, env) == (eval_term(z4, t, asg),)


def test_from_term_to_term_round_trip(z4):
    t = App("mul", (Var(0), App("inv", (Var(1),))))
    c = from_term(z4, t)
    assert to_term(c, c.outputs[0]) == t


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_from_term_eval_agrees_randomized(data):
    alg = get(data.draw(st.sampled_from(["Z4", "2lattice", "2boolean", "majority"])))
    rng = random.Random(data.draw(st.integers(0, 10 ** 6)))

    def rand_term(depth):
        usable = [op for op in alg.ops if op.arity >= 1]
        if depth == 0 or rng.random() < 0.3:
            return Var(rng.randrange(3)) if rng.random() < 0.7 else Const(rng.randrange(alg.size))
        op = usable[rng.randrange(len(usable))]
        return App(op.name, tuple(rand_term(depth - 1) for _ in range(op.arity)))

    t = rand_term(3)
    c = from_term(alg, t)
    for asg in itertools.product(range(alg.size), repeat=3):
        env = {f"x{i}": asg[i] for i in range(3)}
        assert eval_circuit(alg, c, env)[0] == eval_term(alg, t, asg)


# ---------------------------------------------------------------------------
# Text format


def test_parse_serialize_round_trip(lat2):
    text = "g0 = input x\ng1 = input y\ng2 = meet g0 g1\noutputs: g2 g0\n"
    c = parse_circuit(text, lat2)
    assert serialize_circuit(c) == text
    assert parse_circuit(serialize_circuit(c), lat2) == c


def test_parse_forward_reference():
    with pytest.raises(ForwardReference):
        parse_circuit("g0 = meet g1 g0\ng1 = input x\noutputs: g0\n")


def test_parse_unknown_op(lat2):
    with pytest.raises(ParseError) as exc:
        parse_circuit("g0 = input x\ng1 = frobnicate g0\noutputs: g1\n", lat2)
    assert "frobnicate" in str(exc.value)


def test_parse_system(lat2):
    text = (
        "g0 = input x\ng1 = input y\ng2 = meet g0 g1\ng3 = const 1\n"
        "equation: g2 g3\nequation: g0 g1\n"
    )
    inst = parse_circuit(text, lat2)
    assert isinstance(inst, ScsatInstance)
    assert inst.equations == ((2, 3), (0, 1))


def test_parse_missing_outputs(lat2):
    with pytest.raises(ParseError):
        parse_circuit("g0 = input x\n", lat2)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_random_circuit_round_trips(seed):
    alg = get("majority")
    rng = random.Random(seed)
    c = random_circuit(alg, rng, n_inputs=3, n_gates=9, n_outputs=2)
    text = serialize_circuit(c)
    assert parse_circuit(text, alg) == c
    assert serialize_circuit(parse_circuit(text, alg)) == text


# ---------------------------------------------------------------------------
# Instance validation


def test_instance_output_counts(lat2):
    b = CircuitBuilder("2lattice")
    x = b.input("x")
    one_out = b.build([x])
    with pytest.raises(ValueError):
        CsatInstance(one_out)
    with pytest.raises(ValueError):
        McsatInstance(one_out)
    with pytest.raises(ValueError):
        CeqvInstance(one_out)
    three = b.build([x, x, x])
    McsatInstance(three)  # fine
    with pytest.raises(ValueError):
        CsatInstance(three)


def test_compile_matches_eval(z6):
    rng = random.Random(13)
    for _ in range(20):
        c = random_circuit(z6, rng, 3, 10, 2)
        run = compile_circuit(z6, c)
        names = sorted(c.input_names)
        for asg in itertools.product(range(6), repeat=len(names)):
            env = dict(zip(names, asg))
            assert run(asg) == eval_circuit(z6, c, env)
