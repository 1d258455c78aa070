import pytest
from hypothesis import given, settings, strategies as st

from scmfrqi.circuit import (
    Circuit, Gate, GateKind, RegisterLayout, count_gates, dump_circuit, dump_circuits, h, mcx,
    parse_circuit, parse_circuits, reset, x,
)


def test_layout_indices_cover_register():
    lay = RegisterLayout(q=5, n=2, signed=True)
    assert lay.total == 5 + 4 + 1
    idx = [lay.value(i) for i in range(lay.q)] + [lay.aux] \
        + [lay.pos_y(i) for i in range(2)] + [lay.pos_x(i) for i in range(2)]
    assert sorted(idx) == list(range(lay.total))
    assert lay.sign == 4 and lay.magnitude_bits == 4


def test_gate_invariants():
    with pytest.raises(ValueError):
        mcx(1, [(1, True)])
    with pytest.raises(ValueError):
        mcx(0, [(1, True), (1, False)])
    with pytest.raises(ValueError):
        Gate(GateKind.RESET, 0, ((1, True),))
    with pytest.raises(ValueError):
        Gate(GateKind.HADAMARD, 0, ((1, True),))


def test_circuit_rejects_out_of_range():
    with pytest.raises(ValueError):
        Circuit(RegisterLayout(1, 1), (h(4),))


def test_count_empty_and_hadamard_layer():
    lay = RegisterLayout(1, 2)
    assert sum(count_gates(Circuit(lay)).kinds.values()) == 0
    tally = count_gates(Circuit(lay, tuple(h(k) for k in lay.position_qubits)))
    assert tally["H"] == 4
    assert tally["MCX"] == 0


def test_dump_lines():
    lay = RegisterLayout(3, 1)
    assert dump_circuit(Circuit(lay, (h(3),))).splitlines() == ["LAYOUT q=3 n=1", "H 3"]
    assert str(mcx(0, [(1, True), (2, True)])) == "MCX t=0 c=+1,+2"
    assert str(mcx(0, [(1, False), (2, True)])) == "MCX t=0 c=-1,+2"
    assert str(reset(3)) == "RESET 3" and str(x(2)) == "X 2"


def test_parse_errors():
    with pytest.raises(ValueError, match="before LAYOUT"):
        parse_circuit("H 0\n")
    with pytest.raises(ValueError, match="polarity"):
        parse_circuit("LAYOUT q=1 n=1\nMCX t=0 c=1\n")
    with pytest.raises(ValueError, match="unknown gate"):
        parse_circuit("LAYOUT q=1 n=1\nCZ 0\n")


def test_multi_circuit_file_with_comments():
    a = Circuit(RegisterLayout(2, 1), (h(3), h(4)))
    b = Circuit(RegisterLayout(3, 1, True), (h(4), reset(3)))
    text = dump_circuits([a, b], ["first", "second"])
    assert text.startswith("# first\n")
    assert parse_circuits(text) == [a, b]


@st.composite
def circuits(draw):
    lay = RegisterLayout(draw(st.integers(1, 6)), draw(st.integers(0, 3)), draw(st.booleans()))
    total = lay.total
    gates = []
    for _ in range(draw(st.integers(0, 25))):
        kind = draw(st.sampled_from(["H", "X", "RESET", "MCX"]))
        t = draw(st.integers(0, total - 1))
        if kind == "MCX":
            others = [k for k in range(total) if k != t]
            cs = draw(st.lists(st.sampled_from(others), unique=True, min_size=1, max_size=len(others))) if others else []
            if not cs:
                continue
            gates.append(mcx(t, [(c, draw(st.booleans())) for c in cs]))
        else:
            gates.append(Gate(GateKind(kind), t))
    return Circuit(lay, tuple(gates))


@settings(max_examples=500, deadline=None)
@given(circuits())
def test_dump_parse_round_trip(c):
    assert parse_circuit(dump_circuit(c)) == c
