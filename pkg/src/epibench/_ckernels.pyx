# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled SI/SIR stepping kernels.

Same interface and operation order as ``_pykernels``; results are
bit-identical provided the C compiler does not contract multiply-adds.
"""

from libc.math cimport isfinite


def si_euler(double alpha, double h, double[:, ::1] out):
    cdef Py_ssize_t n = out.shape[0] - 1
    cdef Py_ssize_t k
    cdef double flow, i, s
    s = out[0, 0]
    i = out[0, 1]
    for k in range(1, n + 1):
        flow = alpha * s * i
        s = s + h * -flow
        i = i + h * flow
        out[k, 0] = s
        out[k, 1] = i
        if not (isfinite(s) and isfinite(i)):
            return k
    return -1


def si_rk4(double alpha, double h, double[:, ::1] out):
    cdef Py_ssize_t n = out.shape[0] - 1
    cdef Py_ssize_t k
    cdef double f1, f2, f3, f4, half, i, k1s, k2s, k3s, k4s, s, w
    half = 0.5 * h
    w = h / 6.0
    s = out[0, 0]
    i = out[0, 1]
    for k in range(1, n + 1):
        f1 = alpha * s * i
        k1s = -f1
        f2 = alpha * (s + half * k1s) * (i + half * f1)
        k2s = -f2
        f3 = alpha * (s + half * k2s) * (i + half * f2)
        k3s = -f3
        f4 = alpha * (s + h * k3s) * (i + h * f3)
        k4s = -f4
        s = s + w * (k1s + 2.0 * k2s + 2.0 * k3s + k4s)
        i = i + w * (f1 + 2.0 * f2 + 2.0 * f3 + f4)
        out[k, 0] = s
        out[k, 1] = i
        if not (isfinite(s) and isfinite(i)):
            return k
    return -1


def si_pc(double alpha, double h, double[:, ::1] out):
    cdef Py_ssize_t n = out.shape[0] - 1
    cdef Py_ssize_t k
    cdef double f1, f2, half, i, k1s, s
    half = 0.5 * h
    s = out[0, 0]
    i = out[0, 1]
    for k in range(1, n + 1):
        f1 = alpha * s * i
        k1s = -f1
        f2 = alpha * (s + h * k1s) * (i + h * f1)
        s = s + half * (k1s + -f2)
        i = i + half * (f1 + f2)
        out[k, 0] = s
        out[k, 1] = i
        if not (isfinite(s) and isfinite(i)):
            return k
    return -1


def sir_euler(double alpha, double beta, double h, double[:, ::1] out):
    cdef Py_ssize_t n = out.shape[0] - 1
    cdef Py_ssize_t k
    cdef double i, inf, r, rec, s
    s = out[0, 0]
    i = out[0, 1]
    r = out[0, 2]
    for k in range(1, n + 1):
        inf = alpha * s * i
        rec = beta * i
        s = s + h * -inf
        i = i + h * (inf - rec)
        r = r + h * rec
        out[k, 0] = s
        out[k, 1] = i
        out[k, 2] = r
        if not (isfinite(s) and isfinite(i) and isfinite(r)):
            return k
    return -1


def sir_rk4(double alpha, double beta, double h, double[:, ::1] out):
    cdef Py_ssize_t n = out.shape[0] - 1
    cdef Py_ssize_t k
    cdef double a1, a2, a3, a4, b1, b2, b3, b4, half, i, i2, i3, i4, k1i, k1r, k1s, k2i, k2r, k2s, k3i, k3r, k3s, k4i, k4r, k4s, r, s, s2, s3, s4, w
    half = 0.5 * h
    w = h / 6.0
    s = out[0, 0]
    i = out[0, 1]
    r = out[0, 2]
    for k in range(1, n + 1):
        a1 = alpha * s * i
        b1 = beta * i
        k1s = -a1
        k1i = a1 - b1
        k1r = b1
        s2 = s + half * k1s
        i2 = i + half * k1i
        a2 = alpha * s2 * i2
        b2 = beta * i2
        k2s = -a2
        k2i = a2 - b2
        k2r = b2
        s3 = s + half * k2s
        i3 = i + half * k2i
        a3 = alpha * s3 * i3
        b3 = beta * i3
        k3s = -a3
        k3i = a3 - b3
        k3r = b3
        s4 = s + h * k3s
        i4 = i + h * k3i
        a4 = alpha * s4 * i4
        b4 = beta * i4
        k4s = -a4
        k4i = a4 - b4
        k4r = b4
        s = s + w * (k1s + 2.0 * k2s + 2.0 * k3s + k4s)
        i = i + w * (k1i + 2.0 * k2i + 2.0 * k3i + k4i)
        r = r + w * (k1r + 2.0 * k2r + 2.0 * k3r + k4r)
        out[k, 0] = s
        out[k, 1] = i
        out[k, 2] = r
        if not (isfinite(s) and isfinite(i) and isfinite(r)):
            return k
    return -1


def sir_pc(double alpha, double beta, double h, double[:, ::1] out):
    cdef Py_ssize_t n = out.shape[0] - 1
    cdef Py_ssize_t k
    cdef double a1, a2, b1, b2, half, i, ip, k1i, k1r, k1s, r, s, sp
    half = 0.5 * h
    s = out[0, 0]
    i = out[0, 1]
    r = out[0, 2]
    for k in range(1, n + 1):
        a1 = alpha * s * i
        b1 = beta * i
        k1s = -a1
        k1i = a1 - b1
        k1r = b1
        sp = s + h * k1s
        ip = i + h * k1i
        a2 = alpha * sp * ip
        b2 = beta * ip
        s = s + half * (k1s + -a2)
        i = i + half * (k1i + (a2 - b2))
        r = r + half * (k1r + b2)
        out[k, 0] = s
        out[k, 1] = i
        out[k, 2] = r
        if not (isfinite(s) and isfinite(i) and isfinite(r)):
            return k
    return -1
