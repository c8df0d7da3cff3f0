# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; see ``_pykernels`` for the reference semantics."""

from libc.math cimport exp

cdef int EXPONENTIAL = 0
cdef int LINEAR = 1


cdef inline double _utility(int kind, double param, double age) nogil:
    cdef double u
    if kind == EXPONENTIAL:
        return exp(-param * age)
    if kind == LINEAR:
        u = 1.0 - age / param
        return u if u > 0.0 else 0.0
    return 1.0 if age <= param else 0.0


def utility(int kind, double param, double age):
    return _utility(kind, param, age)


def context_sum(const double[:] times, const int[:] tasks, Py_ssize_t start,
                Py_ssize_t stop, double now, int kind, double param,
                const double[:] weights):
    cdef double total = 0.0
    cdef double t, w
    cdef Py_ssize_t i
    with nogil:
        for i in range(start, stop):
            t = times[i]
            if t > now:
                break
            w = weights[tasks[i]]
            if w == 0.0:
                continue
            total += _utility(kind, param, now - t) * w
    return total
