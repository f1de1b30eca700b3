# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled statevector kernels; same contract as ``_pykernels``."""

import numpy as np

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


def apply_1q(double complex[::1] psi, int n, int qubit, gate):
    cdef double complex g00 = gate[0, 0], g01 = gate[0, 1]
    cdef double complex g10 = gate[1, 0], g11 = gate[1, 1]
    cdef Py_ssize_t stride = (<Py_ssize_t>1) << (n - qubit - 1)
    cdef Py_ssize_t dim = psi.shape[0]
    cdef Py_ssize_t base, k, i, j
    cdef double complex a, b
    with nogil:
        base = 0
        while base < dim:
            for k in range(stride):
                i = base + k
                j = i + stride
                a = psi[i]
                b = psi[j]
                psi[i] = g00 * a + g01 * b
                psi[j] = g10 * a + g11 * b
            base += 2 * stride


def apply_cz(double complex[::1] psi, int n, int a, int b):
    cdef Py_ssize_t mask = ((<Py_ssize_t>1) << (n - 1 - a)) | ((<Py_ssize_t>1) << (n - 1 - b))
    cdef Py_ssize_t dim = psi.shape[0], i
    with nogil:
        for i in range(dim):
            if (i & mask) == mask:
                psi[i] = -psi[i]


def apply_cnot(double complex[::1] psi, int n, int control, int target):
    cdef Py_ssize_t cmask = (<Py_ssize_t>1) << (n - 1 - control)
    cdef Py_ssize_t tmask = (<Py_ssize_t>1) << (n - 1 - target)
    cdef Py_ssize_t dim = psi.shape[0], i, j
    cdef double complex tmp
    with nogil:
        for i in range(dim):
            if (i & cmask) and not (i & tmask):
                j = i | tmask
                tmp = psi[i]
                psi[i] = psi[j]
                psi[j] = tmp


def pauli_expectation(double complex[::1] psi, int n, long long[::1] xmasks,
                      long long[::1] zmasks, double complex[::1] coeffs):
    cdef Py_ssize_t dim = psi.shape[0], nterms = xmasks.shape[0]
    cdef Py_ssize_t t, b
    cdef unsigned long long x, z
    cdef double complex acc, total = 0
    cdef double complex amp
    with nogil:
        for t in range(nterms):
            x = <unsigned long long>xmasks[t]
            z = <unsigned long long>zmasks[t]
            acc = 0
            for b in range(dim):
                amp = psi[<Py_ssize_t>(b ^ x)].conjugate() * psi[b]
                if __builtin_popcountll(<unsigned long long>b & z) & 1:
                    acc = acc - amp
                else:
                    acc = acc + amp
            total = total + coeffs[t] * acc
    return complex(total)


def pauli_apply(double complex[::1] psi, int n, long long[::1] xmasks,
                long long[::1] zmasks, double complex[::1] coeffs, out=None):
    if out is None:
        out = np.zeros(psi.shape[0], dtype=np.complex128)
    cdef double complex[::1] res = out
    cdef Py_ssize_t dim = psi.shape[0], nterms = xmasks.shape[0]
    cdef Py_ssize_t t, b
    cdef unsigned long long x, z
    cdef double complex c
    with nogil:
        for b in range(dim):
            res[b] = 0
        for t in range(nterms):
            x = <unsigned long long>xmasks[t]
            z = <unsigned long long>zmasks[t]
            c = coeffs[t]
            for b in range(dim):
                if __builtin_popcountll(<unsigned long long>b & z) & 1:
                    res[<Py_ssize_t>(b ^ x)] -= c * psi[b]
                else:
                    res[<Py_ssize_t>(b ^ x)] += c * psi[b]
    return out
