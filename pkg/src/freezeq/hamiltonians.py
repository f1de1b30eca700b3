"""Benchmark Hamiltonians and the exact ground-energy oracle."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eigen import lanczos_lowest
from .errors import ConfigurationError, ResourceError
from .simcore import PauliSumOperator

DENSE_MAX_QUBITS = 10
ORACLE_MAX_QUBITS = 16


@dataclass(frozen=True)
class HeisenbergParams:
    n_sites: int
    J: float = 1.0
    h: float = 1.0


@dataclass(frozen=True)
class HubbardParams:
    n_sites: int
    t: float = 0.5
    U: float = 0.5


def _string(n: int, ops: dict[int, str]) -> str:
    return "".join(ops.get(k, "I") for k in range(n))


def heisenberg_1d(params: HeisenbergParams) -> PauliSumOperator:
    """Periodic XXX ring with a Z field: ``J sum (XX + YY + ZZ) + h sum Z``."""
    n = params.n_sites
    if n < 3:
        raise ConfigurationError(f"Heisenberg ring needs n_sites >= 3, got {n}")
    terms = []
    for i in range(n):
        j = (i + 1) % n
        for p in "XYZ":
            terms.append((params.J, _string(n, {i: p, j: p})))
    for i in range(n):
        terms.append((params.h, _string(n, {i: "Z"})))
    return PauliSumOperator.from_terms(terms, n_qubits=n)


def fermi_hubbard_chain(params: HubbardParams) -> PauliSumOperator:
    """Open 1 x n Hubbard chain after Jordan-Wigner, two qubits per site.

    Modes are ordered site-major, spin-minor: qubit ``2i`` is site ``i`` spin
    up, qubit ``2i + 1`` is site ``i`` spin down.
    """
    ns = params.n_sites
    if ns < 2:
        raise ConfigurationError(f"Hubbard chain needs n_sites >= 2, got {ns}")
    n = 2 * ns
    terms = []
    offset = 0.0
    # -t (c_p^dag c_q + h.c.) = -t/2 (X Z..Z X + Y Z..Z Y) for p < q
    for i in range(ns - 1):
        for spin in (0, 1):
            p, q = 2 * i + spin, 2 * (i + 1) + spin
            between = {k: "Z" for k in range(p + 1, q)}
            for a in "XY":
                terms.append((-params.t / 2, _string(n, {**between, p: a, q: a})))
    # U n_up n_dn = U/4 (I - Z_up - Z_dn + Z_up Z_dn)
    for i in range(ns):
        up, dn = 2 * i, 2 * i + 1
        offset += params.U / 4
        terms.append((-params.U / 4, _string(n, {up: "Z"})))
        terms.append((-params.U / 4, _string(n, {dn: "Z"})))
        terms.append((params.U / 4, _string(n, {up: "Z", dn: "Z"})))
    terms = [(c, s) for c, s in terms if c != 0.0]
    return PauliSumOperator.from_terms(terms, offset, n_qubits=n)


def exact_ground_energy(H: PauliSumOperator) -> float:
    """Lowest eigenvalue of ``H``: dense for <= 10 qubits, Lanczos up to 16."""
    n = H.n_qubits
    if n > ORACLE_MAX_QUBITS:
        raise ResourceError(f"exact oracle capped at {ORACLE_MAX_QUBITS} qubits, got {n}")
    if n <= DENSE_MAX_QUBITS:
        return float(np.linalg.eigvalsh(H.to_dense())[0])
    dtype = np.float64 if H.is_real else np.complex128
    return lanczos_lowest(H.apply, 1 << n, dtype=dtype, tol=1e-10)


def build_hamiltonian(kind: str, **kw) -> PauliSumOperator:
    """Construct a Hamiltonian from a config-style description."""
    if kind == "heisenberg":
        n = kw.get("n_sites", kw.get("n_qubits"))
        return heisenberg_1d(HeisenbergParams(int(n), float(kw.get("J", 1.0)), float(kw.get("h", 1.0))))
    if kind == "hubbard":
        return fermi_hubbard_chain(HubbardParams(int(kw["n_sites"]), float(kw.get("t", 0.5)),
                                                 float(kw.get("U", 0.5))))
    if kind == "pauli":
        terms = [(t["coefficient"], t["pauli"]) for t in kw["terms"]]
        return PauliSumOperator.from_terms(terms, kw.get("offset", 0.0), kw.get("n_qubits"))
    raise ConfigurationError(f"unknown hamiltonian kind {kind!r}")
