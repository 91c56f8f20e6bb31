# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled statevector and sampling kernels.

Same contract as ``_pykernels``: gates act in place on a C-contiguous
complex128 state, little-endian qubit numbering.
"""
from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from libc.math cimport cos, sin, sqrt
from libc.stdint cimport int64_t
from numpy.random cimport bitgen_t

BACKEND = "compiled"


def apply_h(double complex[::1] state, int qubit):
    cdef Py_ssize_t n = state.shape[0]
    cdef Py_ssize_t bit = (<Py_ssize_t> 1) << qubit
    cdef Py_ssize_t i, j, base
    cdef double r = 1.0 / sqrt(2.0)
    cdef double complex a, b
    with nogil:
        base = 0
        while base < n:
            for i in range(base, base + bit):
                j = i + bit
                a = state[i]
                b = state[j]
                state[i] = (a + b) * r
                state[j] = (a - b) * r
            base += 2 * bit


def apply_cphase(double complex[::1] state, int control, int target, double theta):
    cdef Py_ssize_t n = state.shape[0]
    cdef Py_ssize_t mask = ((<Py_ssize_t> 1) << control) | ((<Py_ssize_t> 1) << target)
    cdef Py_ssize_t i
    cdef double complex phase = cos(theta) + 1j * sin(theta)
    with nogil:
        for i in range(n):
            if (i & mask) == mask:
                state[i] = state[i] * phase


def apply_swap(double complex[::1] state, int q1, int q2):
    if q1 == q2:
        return
    cdef Py_ssize_t n = state.shape[0]
    cdef Py_ssize_t b1 = (<Py_ssize_t> 1) << q1
    cdef Py_ssize_t b2 = (<Py_ssize_t> 1) << q2
    cdef Py_ssize_t i, j
    cdef double complex tmp
    with nogil:
        for i in range(n):
            # visit each (..1..0..) / (..0..1..) pair once, from the q1-set side
            if (i & b1) and not (i & b2):
                j = (i ^ b1) | b2
                tmp = state[i]
                state[i] = state[j]
                state[j] = tmp


def alias_counts(double[::1] prob, int64_t[::1] alias, bit_generator, Py_ssize_t n_draws,
                 int64_t[::1] counts):
    """Add ``n_draws`` alias-table draws to ``counts``.

    One ``next_double`` per draw: the integer part of ``u * K`` picks the
    column, the fractional part is the coin.
    """
    cdef Py_ssize_t k = prob.shape[0]
    cdef double dk = <double> k
    cdef Py_ssize_t t, j
    cdef double x, frac
    capsule = bit_generator.capsule
    if not PyCapsule_IsValid(capsule, "BitGenerator"):
        raise ValueError("invalid bit generator capsule")
    cdef bitgen_t *rng = <bitgen_t *> PyCapsule_GetPointer(capsule, "BitGenerator")
    with bit_generator.lock, nogil:
        for t in range(n_draws):
            x = rng.next_double(rng.state) * dk
            j = <Py_ssize_t> x
            frac = x - j
            if frac < prob[j]:
                counts[j] += 1
            else:
                counts[alias[j]] += 1
