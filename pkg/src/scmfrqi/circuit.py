"""Gate-list IR for the preparation circuits.

Qubit layout (qubit k is bit k of a basis index)::

    value[0..q)  aux  posY[0..n)  posX[0..n)

When ``signed`` is set, the last value qubit ``value[q-1]`` holds the sign and
the magnitude occupies ``value[0..q-1)``.

Text format, one gate per line::

    LAYOUT q=<q> n=<n> [signed]
    H k | X k | MCX t=k c=+a,-b,... | RESET k

Lines starting with ``#`` are comments. A file may hold several circuits, each
opened by its own ``LAYOUT`` line.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum


class GateKind(str, Enum):
    IDENTITY = "I"
    HADAMARD = "H"
    PAULI_X = "X"
    MCX = "MCX"
    RESET = "RESET"


@dataclass(frozen=True)
class RegisterLayout:
    q: int
    n: int
    signed: bool = False

    def __post_init__(self):
        if self.q < 0 or self.n < 0:
            raise ValueError("register sizes must be non-negative")
        if self.signed and self.q < 1:
            raise ValueError("a signed layout needs at least the sign qubit")

    @property
    def total(self) -> int:
        return self.q + 2 * self.n + 1

    @property
    def magnitude_bits(self) -> int:
        return self.q - 1 if self.signed else self.q

    def value(self, i: int) -> int:
        if not 0 <= i < self.q:
            raise IndexError(f"value qubit {i} out of range")
        return i

    @property
    def sign(self) -> int | None:
        return self.q - 1 if self.signed else None

    @property
    def aux(self) -> int:
        return self.q

    def pos_y(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(f"posY qubit {i} out of range")
        return self.q + 1 + i

    def pos_x(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(f"posX qubit {i} out of range")
        return self.q + 1 + self.n + i

    @property
    def position_qubits(self) -> list[int]:
        return list(range(self.q + 1, self.total))

    def position_controls(self, y: int, x: int) -> tuple[tuple[int, bool], ...]:
        """Polarity-encoded controls selecting position (y, x); bit i of y drives posY[i]."""
        ctrl = [(self.pos_y(i), bool((y >> i) & 1)) for i in range(self.n)]
        ctrl += [(self.pos_x(i), bool((x >> i) & 1)) for i in range(self.n)]
        return tuple(ctrl)

    def region(self, k: int) -> str:
        if k < self.magnitude_bits:
            return "value"
        if k < self.q:
            return "sign"
        if k == self.q:
            return "aux"
        if k < self.total:
            return "pos"
        raise IndexError(k)


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    target: int
    controls: tuple[tuple[int, bool], ...] = ()  # (qubit, positive polarity?)

    def __post_init__(self):
        object.__setattr__(self, "kind", GateKind(self.kind))
        ctrls = tuple((int(q), bool(p)) for q, p in self.controls)
        object.__setattr__(self, "controls", ctrls)
        if ctrls and self.kind is not GateKind.MCX:
            raise ValueError(f"{self.kind.value} gate cannot carry controls")
        idx = [q for q, _ in ctrls]
        if len(set(idx)) != len(idx):
            raise ValueError(f"duplicate control qubits {idx}")
        if self.target in idx:
            raise ValueError(f"target {self.target} is also a control")
        if self.target < 0 or any(q < 0 for q in idx):
            raise ValueError("qubit indices must be non-negative")

    @property
    def qubits(self) -> list[int]:
        return [self.target] + [q for q, _ in self.controls]

    def __str__(self):
        if self.kind is GateKind.MCX:
            cs = ",".join(f"{'+' if p else '-'}{q}" for q, p in self.controls)
            return f"MCX t={self.target} c={cs}"
        return f"{self.kind.value} {self.target}"


def h(k: int) -> Gate:
    return Gate(GateKind.HADAMARD, k)


def x(k: int) -> Gate:
    return Gate(GateKind.PAULI_X, k)


def mcx(target: int, controls) -> Gate:
    return Gate(GateKind.MCX, target, tuple(controls))


def reset(k: int) -> Gate:
    return Gate(GateKind.RESET, k)


@dataclass(frozen=True)
class Circuit:
    layout: RegisterLayout
    gates: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        gates = tuple(self.gates)
        object.__setattr__(self, "gates", gates)
        total = self.layout.total
        for i, g in enumerate(gates):
            bad = [q for q in g.qubits if q >= total]
            if bad:
                raise ValueError(f"gate {i} ({g}) references qubit(s) {bad} >= {total}")

    def __len__(self):
        return len(self.gates)


@dataclass
class GateTally:
    kinds: Counter
    mcx_arity: Counter  # number of controls -> count
    mcx_targets: Counter  # register name of the target -> count

    def __getitem__(self, kind):
        return self.kinds[GateKind(kind)]


def count_gates(c: Circuit) -> GateTally:
    kinds: Counter = Counter()
    arity: Counter = Counter()
    targets: Counter = Counter()
    for g in c.gates:
        kinds[g.kind] += 1
        if g.kind is GateKind.MCX:
            arity[len(g.controls)] += 1
            targets[c.layout.region(g.target)] += 1
    return GateTally(kinds, arity, targets)


def dump_circuit(c: Circuit) -> str:
    head = f"LAYOUT q={c.layout.q} n={c.layout.n}"
    if c.layout.signed:
        head += " signed"
    return "\n".join([head] + [str(g) for g in c.gates]) + "\n"


def dump_circuits(circuits, comments=None) -> str:
    parts = []
    for i, c in enumerate(circuits):
        if comments is not None and comments[i]:
            parts.append(f"# {comments[i]}\n")
        parts.append(dump_circuit(c))
    return "".join(parts)


def _parse_layout(line: str, lineno: int) -> RegisterLayout:
    fields = line.split()[1:]
    kv = {}
    signed = False
    for f in fields:
        if f == "signed":
            signed = True
        elif "=" in f:
            k, v = f.split("=", 1)
            kv[k] = v
        else:
            raise ValueError(f"line {lineno}: bad layout field {f!r}")
    try:
        return RegisterLayout(int(kv["q"]), int(kv["n"]), signed)
    except (KeyError, ValueError) as exc:
        raise ValueError(f"line {lineno}: bad layout header {line!r}") from exc


def _parse_gate(line: str, lineno: int) -> Gate:
    parts = line.split()
    op = parts[0]
    try:
        if op in ("H", "X", "RESET", "I"):
            if len(parts) != 2:
                raise ValueError("expected one qubit index")
            return Gate(GateKind(op), int(parts[1]))
        if op == "MCX":
            if len(parts) != 3 or not parts[1].startswith("t=") or not parts[2].startswith("c="):
                raise ValueError("expected 'MCX t=k c=±a,...'")
            controls = []
            for tok in parts[2][2:].split(","):
                if not tok or tok[0] not in "+-":
                    raise ValueError(f"control {tok!r} lacks a polarity sign")
                controls.append((int(tok[1:]), tok[0] == "+"))
            return Gate(GateKind.MCX, int(parts[1][2:]), tuple(controls))
    except ValueError as exc:
        raise ValueError(f"line {lineno}: {exc}") from exc
    raise ValueError(f"line {lineno}: unknown gate {op!r}")


def parse_circuits(text: str) -> list[Circuit]:
    circuits = []
    layout = None
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("LAYOUT"):
            if layout is not None:
                circuits.append(Circuit(layout, tuple(gates)))
            layout, gates = _parse_layout(line, lineno), []
            continue
        if layout is None:
            raise ValueError(f"line {lineno}: gate before LAYOUT header")
        gates.append(_parse_gate(line, lineno))
    if layout is not None:
        circuits.append(Circuit(layout, tuple(gates)))
    return circuits


def parse_circuit(text: str) -> Circuit:
    circuits = parse_circuits(text)
    if len(circuits) != 1:
        raise ValueError(f"expected exactly one circuit, found {len(circuits)}")
    return circuits[0]
