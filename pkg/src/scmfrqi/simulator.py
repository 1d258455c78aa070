"""Dense statevector simulation of preparation circuits.

A state is an ensemble of weighted pure states so that a measure-and-flip
reset ("physical" mode) can be represented without density matrices. The
"idealized" reset instead relabels aux=1 amplitude onto its aux=0 partner,
which is only legitimate when that partner is empty.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, Gate, GateKind, RegisterLayout
from .errors import CapacityError, CoherenceError, NonBasisEncodingError, ResidualEntanglementError

MAX_QUBITS = 26
EXACT_TOL = 1e-12
ACCUM_TOL = 1e-9
# projections below this squared norm are treated as empty branches
_ZERO_WEIGHT = 1e-24

IDEALIZED = "idealized"
PHYSICAL = "physical"
RESET_MODES = (IDEALIZED, PHYSICAL)


@dataclass
class EnsembleState:
    layout: RegisterLayout
    branches: list[tuple[float, np.ndarray]] = field(default_factory=list)

    @property
    def total_weight(self) -> float:
        return float(sum(w for w, _ in self.branches))

    @property
    def is_pure(self) -> bool:
        return len(self.branches) == 1

    @property
    def vector(self) -> np.ndarray:
        if not self.is_pure:
            raise ValueError(f"state has {len(self.branches)} branches, not a single pure state")
        return self.branches[0][1]


def init_state(layout: RegisterLayout, max_qubits: int = MAX_QUBITS) -> EnsembleState:
    if layout.total > max_qubits:
        raise CapacityError(f"{layout.total} qubits exceeds the simulator guard of {max_qubits}")
    psi = np.zeros(1 << layout.total, dtype=np.complex128)
    psi[0] = 1.0
    return EnsembleState(layout, [(1.0, psi)])


def _bit(indices: np.ndarray, k: int) -> np.ndarray:
    return (indices >> k) & 1


def _control_mask(indices: np.ndarray, controls) -> np.ndarray:
    mask = np.ones(indices.shape, dtype=bool)
    for q, positive in controls:
        mask &= _bit(indices, q) == (1 if positive else 0)
    return mask


def _apply_hadamard(psi: np.ndarray, k: int) -> np.ndarray:
    v = psi.reshape(-1, 2, 1 << k)
    a, b = v[:, 0, :], v[:, 1, :]
    out = np.empty_like(v)
    out[:, 0, :] = (a + b) / np.sqrt(2)
    out[:, 1, :] = (a - b) / np.sqrt(2)
    return out.reshape(-1)


def _apply_mcx(psi: np.ndarray, target: int, controls) -> np.ndarray:
    idx = np.arange(psi.size)
    lo = idx[(_bit(idx, target) == 0) & _control_mask(idx, controls)]
    hi = lo | (1 << target)
    out = psi.copy()
    out[lo], out[hi] = psi[hi], psi[lo]
    return out


def _reset_idealized(psi: np.ndarray, k: int) -> np.ndarray:
    idx = np.arange(psi.size)
    lo = idx[_bit(idx, k) == 0]
    hi = lo | (1 << k)
    moving = np.abs(psi[hi]) > EXACT_TOL
    clash = moving & (np.abs(psi[lo]) >= EXACT_TOL)
    if clash.any():
        i = int(hi[np.argmax(clash)])
        raise CoherenceError(
            f"idealized reset of qubit {k}: basis {i} and its partner {i ^ (1 << k)} both carry amplitude"
        )
    out = psi.copy()
    out[lo] = psi[lo] + psi[hi]
    out[hi] = 0
    return out


def _reset_physical(weight: float, psi: np.ndarray, k: int) -> list[tuple[float, np.ndarray]]:
    idx = np.arange(psi.size)
    one = _bit(idx, k) == 1
    branches = []
    p0 = psi.copy()
    p0[one] = 0
    p1 = np.zeros_like(psi)
    p1[idx[one] ^ (1 << k)] = psi[one]  # project onto aux=1, then flip to 0
    for proj in (p0, p1):
        norm2 = float(np.vdot(proj, proj).real)
        if norm2 > _ZERO_WEIGHT:
            branches.append((weight * norm2, proj / np.sqrt(norm2)))
    return branches


def apply_gate(state: EnsembleState, gate: Gate, reset_mode: str = IDEALIZED) -> EnsembleState:
    if reset_mode not in RESET_MODES:
        raise ValueError(f"reset mode must be one of {RESET_MODES}, got {reset_mode!r}")
    bad = [q for q in gate.qubits if q >= state.layout.total]
    if bad:
        raise ValueError(f"gate {gate} references qubits {bad} outside the layout")

    kind = gate.kind
    if kind is GateKind.IDENTITY:
        return state
    if kind is GateKind.RESET and reset_mode == PHYSICAL:
        branches = []
        for w, psi in state.branches:
            branches.extend(_reset_physical(w, psi, gate.target))
        return EnsembleState(state.layout, branches)

    branches = []
    for w, psi in state.branches:
        if kind is GateKind.HADAMARD:
            psi = _apply_hadamard(psi, gate.target)
        elif kind is GateKind.PAULI_X:
            psi = _apply_mcx(psi, gate.target, ())
        elif kind is GateKind.MCX:
            psi = _apply_mcx(psi, gate.target, gate.controls)
        elif kind is GateKind.RESET:
            psi = _reset_idealized(psi, gate.target)
        else:
            raise ValueError(f"unsupported gate kind {kind}")
        branches.append((w, psi))
    return EnsembleState(state.layout, branches)


def run_circuit(circuit: Circuit, reset_mode: str = IDEALIZED, max_qubits: int = MAX_QUBITS) -> EnsembleState:
    state = init_state(circuit.layout, max_qubits)
    for g in circuit.gates:
        state = apply_gate(state, g, reset_mode)
    return state


@dataclass(frozen=True)
class ExtractedMap:
    block_size: int
    entries: tuple[tuple[int, int, int], ...]
    amplitude_per_position: float

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.block_size, self.block_size), dtype=np.int64)
        for y, x, v in self.entries:
            out[y, x] = v
        return out


def extract_map(state: EnsembleState, tol: float = ACCUM_TOL) -> ExtractedMap:
    """Decode the basis-encoded value stored at each position of a pure state."""
    layout = state.layout
    psi = state.vector
    n, q = layout.n, layout.q
    size = 1 << n
    expected = 1.0 / size

    nz = np.flatnonzero(np.abs(psi) > EXACT_TOL)
    aux_set = _bit(nz, layout.aux) == 1
    if aux_set.any():
        raise ResidualEntanglementError(
            f"aux qubit is 1 in basis state {int(nz[np.argmax(aux_set)])}; register not disentangled"
        )

    values = nz & ((1 << q) - 1)
    pos = nz >> (q + 1)
    ys = pos & (size - 1)
    xs = pos >> n

    found: dict[tuple[int, int], int] = {}
    for i, y, x, v in zip(nz.tolist(), ys.tolist(), xs.tolist(), values.tolist()):
        key = (y, x)
        if key in found:
            raise NonBasisEncodingError(
                f"position (Y={y}, X={x}) holds superposed values {found[key]:#b} and {v:#b}"
            )
        found[key] = v
        if abs(psi[i] - expected) > tol:
            raise NonBasisEncodingError(
                f"position (Y={y}, X={x}) amplitude {psi[i]:.6g} deviates from {expected:.6g}"
            )
    if len(found) != size * size:
        raise NonBasisEncodingError(f"only {len(found)} of {size * size} positions carry amplitude")

    entries = []
    mag_mask = (1 << layout.magnitude_bits) - 1
    for (y, x), pattern in sorted(found.items()):
        value = pattern & mag_mask
        if layout.signed and (pattern >> layout.sign) & 1:
            value = -value
        if value:
            entries.append((y, x, value))
    return ExtractedMap(size, tuple(entries), expected)


def fidelity_report(ideal: EnsembleState, actual: EnsembleState) -> float:
    if ideal.layout != actual.layout:
        raise ValueError("states have different register layouts")
    ref = ideal.vector
    f = sum(w * abs(np.vdot(ref, psi)) ** 2 for w, psi in actual.branches)
    return float(min(max(f, 0.0), 1.0))


def dump_state(state: EnsembleState, tol: float = EXACT_TOL) -> str:
    """``index re im`` per nonzero component; branches separated by ``# branch`` headers."""
    lines = []
    multi = not state.is_pure
    for b, (w, psi) in enumerate(state.branches):
        if multi:
            lines.append(f"# branch {b} weight {w:.17g}")
        for i in np.flatnonzero(np.abs(psi) > tol):
            lines.append(f"{i} {psi[i].real:.17g} {psi[i].imag:.17g}")
    return "\n".join(lines) + "\n"
