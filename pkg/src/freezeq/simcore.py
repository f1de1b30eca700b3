"""Exact statevector engine.

Qubit 0 is the leftmost (most significant) tensor factor, so the basis
index bit for qubit ``k`` is ``1 << (n - 1 - k)``. Gates act in place on the
amplitude array through the kernels in :mod:`freezeq._kernels`; dense
``2**n x 2**n`` operators are only built on request (``to_dense``) for
small-width checks and the exact-diagonalization oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import ArgumentError, ConfigurationError

MAX_QUBITS = 24
ENTROPY_LOG_BASE = 2
_EIG_CLIP = 1e-12

PAULI_LETTERS = "IXYZ"
PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class StateVector:
    """An ``n``-qubit pure state stored as ``2**n`` complex amplitudes."""

    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, n_qubits: int, amplitudes: np.ndarray):
        amplitudes = np.ascontiguousarray(amplitudes, dtype=np.complex128)
        if amplitudes.shape != (1 << n_qubits,):
            raise ArgumentError(
                f"expected {1 << n_qubits} amplitudes for {n_qubits} qubits, got {amplitudes.shape}"
            )
        self.n_qubits = n_qubits
        self.amplitudes = amplitudes

    def copy(self) -> StateVector:
        return StateVector(self.n_qubits, self.amplitudes.copy())

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def __repr__(self):
        return f"StateVector(n_qubits={self.n_qubits})"


@dataclass(frozen=True)
class DensityMatrix:
    n_qubits: int
    entries: np.ndarray

    def trace(self) -> float:
        return float(np.trace(self.entries).real)


def prepare_zero(n_qubits: int) -> StateVector:
    if not isinstance(n_qubits, (int, np.integer)) or not 1 <= n_qubits <= MAX_QUBITS:
        raise ConfigurationError(f"register width must be in [1, {MAX_QUBITS}], got {n_qubits}")
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(int(n_qubits), amps)


def from_amplitudes(amplitudes: Sequence[complex]) -> StateVector:
    """Build a state from raw amplitudes (normalised on the way in)."""
    amps = np.asarray(amplitudes, dtype=np.complex128)
    n = int(round(np.log2(amps.size)))
    if amps.size != 1 << n:
        raise ArgumentError(f"amplitude count {amps.size} is not a power of two")
    nrm = np.linalg.norm(amps)
    if nrm == 0:
        raise ArgumentError("zero vector is not a state")
    return StateVector(n, amps / nrm)


def _check_qubit(state: StateVector, qubit: int) -> None:
    if not 0 <= qubit < state.n_qubits:
        raise ArgumentError(f"qubit index {qubit} out of range for {state.n_qubits} qubits")


def apply_single_qubit(state: StateVector, gate: np.ndarray, qubit: int) -> StateVector:
    """Apply a 2x2 unitary to ``qubit`` in place and return ``state``."""
    _check_qubit(state, qubit)
    gate = np.asarray(gate, dtype=np.complex128)
    if gate.shape != (2, 2):
        raise ArgumentError(f"single-qubit gate must be 2x2, got {gate.shape}")
    if not np.allclose(gate.conj().T @ gate, np.eye(2), atol=1e-10, rtol=0):
        raise ArgumentError("single-qubit gate is not unitary")
    _kernels.apply_1q(state.amplitudes, state.n_qubits, qubit, gate)
    return state


def apply_two_qubit_entangler(state: StateVector, kind: str, control: int, target: int) -> StateVector:
    _check_qubit(state, control)
    _check_qubit(state, target)
    if control == target:
        raise ArgumentError("entangler needs two distinct qubits")
    if kind == "CZ":
        _kernels.apply_cz(state.amplitudes, state.n_qubits, control, target)
    elif kind == "CNOT":
        _kernels.apply_cnot(state.amplitudes, state.n_qubits, control, target)
    else:
        raise ArgumentError(f"unknown entangler kind {kind!r}")
    return state


@dataclass(frozen=True)
class PauliString:
    coefficient: float
    ops: str

    def __post_init__(self):
        if not np.isfinite(self.coefficient):
            raise ArgumentError("Pauli coefficient must be finite")
        if not self.ops or any(ch not in PAULI_LETTERS for ch in self.ops):
            raise ArgumentError(f"invalid Pauli string {self.ops!r}")

    def masks(self) -> tuple[int, int, int]:
        """Return ``(xmask, zmask, n_y)`` in the kernel bit convention."""
        n = len(self.ops)
        x = z = ny = 0
        for k, ch in enumerate(self.ops):
            bit = 1 << (n - 1 - k)
            if ch in "XY":
                x |= bit
            if ch in "ZY":
                z |= bit
            if ch == "Y":
                ny += 1
        return x, z, ny


@dataclass(frozen=True)
class PauliSumOperator:
    """Hermitian observable ``sum_k c_k P_k + constant_offset``."""

    terms: tuple[PauliString, ...]
    n_qubits: int
    constant_offset: float = 0.0
    _compiled: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        terms = tuple(self.terms)
        object.__setattr__(self, "terms", terms)
        if self.n_qubits < 1:
            raise ArgumentError("operator width must be positive")
        for t in terms:
            if len(t.ops) != self.n_qubits:
                raise ArgumentError(f"term {t.ops!r} does not have width {self.n_qubits}")
        xs, zs, cs = [], [], []
        for t in terms:
            x, z, ny = t.masks()
            xs.append(x)
            zs.append(z)
            cs.append(t.coefficient * (1j) ** ny)
        compiled = (
            np.array(xs, dtype=np.int64),
            np.array(zs, dtype=np.int64),
            np.array(cs, dtype=np.complex128),
        )
        object.__setattr__(self, "_compiled", compiled)

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[float, str]], constant_offset: float = 0.0,
                   n_qubits: int | None = None) -> PauliSumOperator:
        """Build from ``(coefficient, "XZI...")`` pairs; identity strings fold into the offset."""
        terms = [(float(c), s) for c, s in terms]
        if n_qubits is None:
            if not terms:
                raise ArgumentError("cannot infer width of an empty operator")
            n_qubits = len(terms[0][1])
        offset = float(constant_offset)
        kept = []
        for c, s in terms:
            if len(s) != n_qubits:
                raise ArgumentError(f"term {s!r} does not have width {n_qubits}")
            if set(s) == {"I"}:
                offset += c
            else:
                kept.append(PauliString(c, s))
        return cls(tuple(kept), n_qubits, offset)

    def __add__(self, other):
        if not isinstance(other, PauliSumOperator):
            return NotImplemented
        if other.n_qubits != self.n_qubits:
            raise ArgumentError("width mismatch")
        return PauliSumOperator(self.terms + other.terms, self.n_qubits,
                                self.constant_offset + other.constant_offset)

    def scaled(self, factor: float) -> PauliSumOperator:
        return PauliSumOperator(tuple(PauliString(factor * t.coefficient, t.ops) for t in self.terms),
                                self.n_qubits, factor * self.constant_offset)

    @property
    def is_real(self) -> bool:
        """True when the matrix is real symmetric (even Y count in every term)."""
        return all(t.ops.count("Y") % 2 == 0 for t in self.terms)

    def apply(self, vec: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
        """Matrix-free ``H @ vec`` for a length-``2**n`` vector."""
        vec = np.ascontiguousarray(vec, dtype=np.complex128)
        xs, zs, cs = self._compiled
        res = _kernels.pauli_apply(vec, self.n_qubits, xs, zs, cs, out)
        if self.constant_offset:
            res += self.constant_offset * vec
        return res

    def to_dense(self) -> np.ndarray:
        n = self.n_qubits
        dim = 1 << n
        mat = np.zeros((dim, dim), dtype=np.complex128)
        idx = np.arange(dim, dtype=np.int64)
        xs, zs, cs = self._compiled
        for x, z, c in zip(xs, zs, cs):
            sign = 1.0 - 2.0 * (np.bitwise_count(idx & z) & 1)
            mat[idx ^ x, idx] += c * sign
        mat[idx, idx] += self.constant_offset
        return mat

    def to_json(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "constant_offset": self.constant_offset,
            "terms": [{"coefficient": t.coefficient, "pauli": t.ops} for t in self.terms],
        }

    @classmethod
    def from_json(cls, data: dict) -> PauliSumOperator:
        terms = [(t["coefficient"], t["pauli"]) for t in data["terms"]]
        return cls.from_terms(terms, data.get("constant_offset", 0.0), data.get("n_qubits"))


def expectation(state: StateVector, obs: PauliSumOperator) -> float:
    if state.n_qubits != obs.n_qubits:
        raise ArgumentError(f"state width {state.n_qubits} != observable width {obs.n_qubits}")
    xs, zs, cs = obs._compiled
    val = _kernels.pauli_expectation(state.amplitudes, state.n_qubits, xs, zs, cs)
    if abs(val.imag) >= 1e-10:
        raise ArgumentError(f"expectation has imaginary part {val.imag:.3e}; observable not Hermitian?")
    return float(val.real) + obs.constant_offset


def density_matrix(state: StateVector) -> DensityMatrix:
    psi = state.amplitudes
    return DensityMatrix(state.n_qubits, np.outer(psi, psi.conj()))


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduced density matrix on the ``keep`` qubits (in ascending qubit order)."""
    keep = sorted(set(keep))
    n = rho.n_qubits
    if not keep:
        raise ArgumentError("keep set must be nonempty")
    if keep[0] < 0 or keep[-1] >= n:
        raise ArgumentError(f"keep set {keep} not within register of {n} qubits")
    drop = [q for q in range(n) if q not in keep]
    t = rho.entries.reshape((2,) * (2 * n))
    # bra axes sit at q + n; contract dropped pairs from the highest index down
    for q in sorted(drop, reverse=True):
        m = t.ndim // 2
        t = np.trace(t, axis1=q, axis2=q + m)
    k = len(keep)
    return DensityMatrix(k, t.reshape(1 << k, 1 << k))


def reduced_state(state: StateVector, keep: Iterable[int]) -> DensityMatrix:
    """Partial trace taken directly from the amplitudes (no full density matrix)."""
    keep = sorted(set(keep))
    n = state.n_qubits
    if not keep:
        raise ArgumentError("keep set must be nonempty")
    drop = [q for q in range(n) if q not in keep]
    psi = state.amplitudes.reshape((2,) * n)
    m = np.transpose(psi, keep + drop).reshape(1 << len(keep), -1)
    return DensityMatrix(len(keep), m @ m.conj().T)


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """Entropy in bits; eigenvalues at or below 1e-12 are treated as zero."""
    m = rho.entries
    if not np.allclose(m, m.conj().T, atol=1e-10):
        raise ArgumentError("density matrix is not Hermitian")
    lam = np.linalg.eigvalsh(m)
    lam = lam[lam > _EIG_CLIP]
    return max(0.0, float(-np.sum(lam * np.log2(lam))))
