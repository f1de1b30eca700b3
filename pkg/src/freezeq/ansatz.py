"""Circuit layouts, gate parameters and circuit execution.

A layout is a list of single-qubit gate slots in optimization order plus one
entangling pattern per circuit layer. Slots are visited column by column:
top to bottom within a parameter layer, then left to right. For the
Rotosolve families every circuit layer contributes two parameter layers (an
``R_X`` column, then an ``R_Y`` column); the free-gate families contribute
one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence, Union

import numpy as np

from . import _kernels
from .errors import ArgumentError, ConfigurationError
from .simcore import (
    PAULI_MATRICES,
    PauliSumOperator,
    StateVector,
    apply_single_qubit,
    apply_two_qubit_entangler,
    expectation,
    prepare_zero,
)

_NORM_TOL = 1e-10
_I2 = PAULI_MATRICES["I"]
_X = PAULI_MATRICES["X"]
_Y = PAULI_MATRICES["Y"]
_Z = PAULI_MATRICES["Z"]


def wrap_angle(theta: float) -> float:
    """Map ``theta`` into ``(-pi, pi]``."""
    r = math.fmod(theta + math.pi, 2 * math.pi)
    if r < 0:
        r += 2 * math.pi
    r -= math.pi
    return math.pi if r <= -math.pi else r


@dataclass(frozen=True)
class Angle:
    theta: float

    def __post_init__(self):
        if not -math.pi < self.theta <= math.pi:
            raise ArgumentError(f"angle {self.theta} outside (-pi, pi]")


@dataclass(frozen=True)
class Axis:
    n: tuple[float, float, float]

    def __post_init__(self):
        n = tuple(float(x) for x in self.n)
        object.__setattr__(self, "n", n)
        if len(n) != 3 or abs(math.fsum(x * x for x in n) - 1.0) > _NORM_TOL:
            raise ArgumentError(f"axis {n} is not a unit 3-vector")

    def as_quaternion(self) -> np.ndarray:
        return np.array((0.0,) + self.n)


@dataclass(frozen=True)
class Quaternion:
    q: tuple[float, float, float, float]

    def __post_init__(self):
        q = tuple(float(x) for x in self.q)
        object.__setattr__(self, "q", q)
        if len(q) != 4 or abs(math.fsum(x * x for x in q) - 1.0) > _NORM_TOL:
            raise ArgumentError(f"quaternion {q} is not a unit 4-vector")

    def as_quaternion(self) -> np.ndarray:
        return np.array(self.q)


GateParam = Union[Angle, Axis, Quaternion]
ParamVector = list  # list[GateParam], aligned with AnsatzSpec.slots


def rotation(theta: float, generator: str) -> np.ndarray:
    """``cos(theta/2) I - i sin(theta/2) H`` for a Pauli generator ``H``."""
    return math.cos(theta / 2) * _I2 - 1j * math.sin(theta / 2) * PAULI_MATRICES[generator]


def axis_gate(n) -> np.ndarray:
    """Rotation by pi about ``n``: ``-i (n . sigma)``."""
    return -1j * (n[0] * _X + n[1] * _Y + n[2] * _Z)


def quaternion_gate(q) -> np.ndarray:
    return q[0] * _I2 - 1j * (q[1] * _X + q[2] * _Y + q[3] * _Z)


def gate_unitary(p: GateParam, generator: str = "X") -> np.ndarray:
    """2x2 unitary of a gate parameter; ``generator`` only matters for angles."""
    if isinstance(p, Angle):
        if generator not in ("X", "Y", "Z"):
            raise ArgumentError(f"angle gates need a Pauli generator, got {generator!r}")
        return rotation(p.theta, generator)
    if isinstance(p, Axis):
        return axis_gate(p.n)
    if isinstance(p, Quaternion):
        return quaternion_gate(p.q)
    raise ArgumentError(f"not a gate parameter: {p!r}")


@dataclass(frozen=True)
class GateSlot:
    qubit: int
    layer: int          # parameter-layer (heat-map column)
    generator: str      # "X", "Y", "Free" or "Quaternion"
    circuit_layer: int  # which entangling block this gate precedes


ROTO_FAMILIES = ("A_roto", "B1", "C1", "D1")
FREE_FAMILIES = ("A_free", "B2", "C2", "D2")
FAMILIES = ROTO_FAMILIES + FREE_FAMILIES


@dataclass(frozen=True)
class AnsatzSpec:
    n_qubits: int
    n_layers: int
    family: str
    slots: tuple[GateSlot, ...]
    entanglers: tuple[tuple[tuple[str, int, int], ...], ...]

    @property
    def n_slots(self) -> int:
        return len(self.slots)

    @property
    def n_param_layers(self) -> int:
        return max(s.layer for s in self.slots) + 1

    @property
    def is_rotosolve(self) -> bool:
        return self.family in ROTO_FAMILIES

    def without_entanglers(self) -> AnsatzSpec:
        """Same gate slots with every entangling layer removed (product-state circuit)."""
        return replace(self, entanglers=tuple(() for _ in self.entanglers))

    def key(self) -> tuple:
        return (self.family, self.n_qubits, self.n_layers)


def entangler_layer(letter: str, n: int) -> tuple[tuple[str, int, int], ...]:
    if n < 2:
        return ()
    if letter == "A":
        return tuple(("CZ", k, k + 1) for k in range(n - 1))
    if letter == "B":
        return tuple(("CNOT", k, k + 1) for k in range(n - 1))
    if letter == "C":
        return tuple(("CNOT", k, k + 1) for k in range(n - 1)) + (("CNOT", n - 1, 0),)
    if letter == "D":
        return tuple(("CNOT", 0, k) for k in range(1, n))
    raise ConfigurationError(f"unknown entangler topology {letter!r}")


def build_ansatz(family: str, n_qubits: int, n_layers: int, free_gate: str = "Free") -> AnsatzSpec:
    """Lay out slots and entanglers for one of the A-D ansatz families.

    ``free_gate`` selects the slot generator for the free-gate families:
    ``"Free"`` (Fraxis axes) or ``"Quaternion"`` (FQS).
    """
    if family not in FAMILIES:
        raise ConfigurationError(f"unknown ansatz family {family!r}; expected one of {FAMILIES}")
    if n_qubits < 1 or n_layers < 1:
        raise ConfigurationError(f"need n_qubits >= 1 and n_layers >= 1, got {n_qubits}, {n_layers}")
    if free_gate not in ("Free", "Quaternion"):
        raise ConfigurationError(f"free_gate must be 'Free' or 'Quaternion', got {free_gate!r}")
    slots = []
    for l in range(n_layers):
        if family in ROTO_FAMILIES:
            for g, col in (("X", 2 * l), ("Y", 2 * l + 1)):
                slots.extend(GateSlot(q, col, g, l) for q in range(n_qubits))
        else:
            slots.extend(GateSlot(q, l, free_gate, l) for q in range(n_qubits))
    ent = entangler_layer(family[0], n_qubits)
    return AnsatzSpec(n_qubits, n_layers, family, tuple(slots), tuple(ent for _ in range(n_layers)))


def slot_unitary(spec: AnsatzSpec, d: int, p: GateParam) -> np.ndarray:
    return gate_unitary(p, spec.slots[d].generator)


def check_params(spec: AnsatzSpec, params: Sequence[GateParam]) -> None:
    if len(params) != spec.n_slots:
        raise ArgumentError(f"{len(params)} parameters for {spec.n_slots} slots")
    for s, p in zip(spec.slots, params):
        want = Angle if s.generator in ("X", "Y") else (Axis if s.generator == "Free" else Quaternion)
        if not isinstance(p, want):
            raise ArgumentError(f"slot with generator {s.generator} needs {want.__name__}, got {p!r}")


def _op_sequence(spec: AnsatzSpec) -> list:
    """Flatten a layout into ("gate", d) and ("ent", kind, c, t) operations."""
    ops = []
    d = 0
    for l in range(spec.n_layers):
        while d < spec.n_slots and spec.slots[d].circuit_layer == l:
            ops.append(("gate", d))
            d += 1
        ops.extend(("ent",) + e for e in spec.entanglers[l])
    return ops


def run_circuit(spec: AnsatzSpec, params: Sequence[GateParam]) -> StateVector:
    check_params(spec, params)
    state = prepare_zero(spec.n_qubits)
    for op in _op_sequence(spec):
        if op[0] == "gate":
            d = op[1]
            apply_single_qubit(state, slot_unitary(spec, d, params[d]), spec.slots[d].qubit)
        else:
            apply_two_qubit_entangler(state, op[1], op[2], op[3])
    return state


def evaluate_energy(spec: AnsatzSpec, params: Sequence[GateParam], H: PauliSumOperator) -> float:
    return expectation(run_circuit(spec, params), H)


class CircuitEvaluator:
    """Energy evaluations of one layout/observable pair with probe accounting.

    ``energy`` runs the whole circuit. ``probe_slot`` evaluates the circuit
    with only slot ``d`` replaced by an arbitrary 2x2 gate; the state just
    before slot ``d`` is cached between consecutive probes of the same slot
    and parameter vector, which leaves the result identical to a full re-run.
    """

    def __init__(self, spec: AnsatzSpec, H: PauliSumOperator):
        if H.n_qubits != spec.n_qubits:
            raise ArgumentError(f"observable width {H.n_qubits} != circuit width {spec.n_qubits}")
        self.spec = spec
        self.H = H
        self.ops = _op_sequence(spec)
        self._pos = {op[1]: i for i, op in enumerate(self.ops) if op[0] == "gate"}
        self.n_probes = 0
        self.n_confirms = 0
        self.n_full = 0
        self._prefix_key = None
        self._prefix = None

    def _run_ops(self, state, params, start, stop):
        spec = self.spec
        n = spec.n_qubits
        amps = state.amplitudes
        for op in self.ops[start:stop]:
            if op[0] == "gate":
                d = op[1]
                _kernels.apply_1q(amps, n, spec.slots[d].qubit, slot_unitary(spec, d, params[d]))
            elif op[1] == "CZ":
                _kernels.apply_cz(amps, n, op[2], op[3])
            else:
                _kernels.apply_cnot(amps, n, op[2], op[3])
        return state

    def state(self, params: Sequence[GateParam]) -> StateVector:
        check_params(self.spec, params)
        return self._run_ops(prepare_zero(self.spec.n_qubits), params, 0, len(self.ops))

    def energy(self, params: Sequence[GateParam], *, confirm: bool = False) -> float:
        if confirm:
            self.n_confirms += 1
        else:
            self.n_full += 1
        return expectation(self.state(params), self.H)

    def prefix_state(self, params: Sequence[GateParam], d: int) -> StateVector:
        """State immediately before slot ``d`` is applied."""
        return self._run_ops(prepare_zero(self.spec.n_qubits), params, 0, self._pos[d])

    def begin_slot(self, params: Sequence[GateParam], d: int) -> None:
        check_params(self.spec, params)
        self._prefix_key = (d, tuple(params))
        self._prefix = self.prefix_state(params, d)

    def probe_slot(self, params: Sequence[GateParam], d: int, gate: np.ndarray) -> float:
        if self._prefix_key != (d, tuple(params)):
            self.begin_slot(params, d)
        self.n_probes += 1
        state = self._prefix.copy()
        _kernels.apply_1q(state.amplitudes, self.spec.n_qubits, self.spec.slots[d].qubit,
                   np.asarray(gate, dtype=np.complex128))
        self._run_ops(state, params, self._pos[d] + 1, len(self.ops))
        return expectation(state, self.H)

    def reset_counters(self) -> None:
        self.n_probes = self.n_confirms = self.n_full = 0
