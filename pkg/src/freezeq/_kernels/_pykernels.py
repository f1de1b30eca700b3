"""Numpy implementation of the statevector kernels.

Every routine works on a flat ``complex128`` amplitude vector of length
``2**n``. Qubit ``k`` is the ``k``-th tensor factor from the left, i.e. bit
``n - 1 - k`` of the basis index. Gates are applied in place by viewing the
vector as a 3- or 5-axis array so that no ``2**n x 2**n`` matrix is formed.

Pauli strings are passed in mask form: ``xmask`` has a bit set for every X or
Y factor, ``zmask`` for every Z or Y factor, and the complex coefficient
already carries the ``i**n_y`` phase so that

    P |b> = coeff * (-1)**popcount(b & zmask) |b ^ xmask>
"""

from functools import lru_cache

import numpy as np

__all__ = [
    "apply_1q",
    "apply_cz",
    "apply_cnot",
    "pauli_expectation",
    "pauli_apply",
]


def apply_1q(psi, n, qubit, gate):
    v = psi.reshape(1 << qubit, 2, 1 << (n - qubit - 1))
    a0 = v[:, 0, :].copy()
    a1 = v[:, 1, :].copy()
    v[:, 0, :] = gate[0, 0] * a0 + gate[0, 1] * a1
    v[:, 1, :] = gate[1, 0] * a0 + gate[1, 1] * a1


def _pair_view(psi, n, a, b):
    lo, hi = (a, b) if a < b else (b, a)
    v = psi.reshape(1 << lo, 2, 1 << (hi - lo - 1), 2, 1 << (n - hi - 1))
    return v, a < b


def apply_cz(psi, n, a, b):
    v, _ = _pair_view(psi, n, a, b)
    v[:, 1, :, 1, :] *= -1.0


def apply_cnot(psi, n, control, target):
    v, control_first = _pair_view(psi, n, control, target)
    if control_first:
        tmp = v[:, 1, :, 0, :].copy()
        v[:, 1, :, 0, :] = v[:, 1, :, 1, :]
        v[:, 1, :, 1, :] = tmp
    else:
        tmp = v[:, 0, :, 1, :].copy()
        v[:, 0, :, 1, :] = v[:, 1, :, 1, :]
        v[:, 1, :, 1, :] = tmp


@lru_cache(maxsize=4096)
def _term_tables(n, xmask, zmask):
    idx = np.arange(1 << n, dtype=np.int64)
    perm = idx ^ xmask
    sign = 1.0 - 2.0 * (np.bitwise_count(idx & zmask) & 1)
    perm.flags.writeable = False
    sign.flags.writeable = False
    return perm, sign


def pauli_expectation(psi, n, xmasks, zmasks, coeffs):
    total = 0j
    for x, z, c in zip(xmasks, zmasks, coeffs):
        perm, sign = _term_tables(n, int(x), int(z))
        total += c * np.vdot(psi[perm], sign * psi)
    return total


def pauli_apply(psi, n, xmasks, zmasks, coeffs, out=None):
    if out is None:
        out = np.zeros_like(psi)
    else:
        out[:] = 0
    for x, z, c in zip(xmasks, zmasks, coeffs):
        perm, sign = _term_tables(n, int(x), int(z))
        # out[b ^ x] += c * sign[b] * psi[b]  <=>  out[b] += c * sign[b ^ x] * psi[b ^ x]
        out += c * (sign * psi)[perm]
    return out
