"""Pure-Python stepping kernels for SI and SIR.

Interface shared with the compiled ``_ckernels`` module: each kernel takes
the rate constants, the step ``h`` and a pre-allocated C-contiguous float64
array ``out`` of shape ``(n + 1, dim)`` whose first row holds the initial
state.  Rows ``1..n`` are filled in place.  The return value is ``-1`` on
success or the index of the first node with a non-finite component.

The floating-point operations and their order mirror
:mod:`epibench.integrators` exactly, so every backend produces bit-identical
trajectories.
"""

from math import isfinite


def si_euler(alpha, h, out):
    n = out.shape[0] - 1
    s = float(out[0, 0])
    i = float(out[0, 1])
    for k in range(1, n + 1):
        flow = alpha * s * i
        s = s + h * -flow
        i = i + h * flow
        out[k, 0] = s
        out[k, 1] = i
        if not (isfinite(s) and isfinite(i)):
            return k
    return -1


def si_rk4(alpha, h, out):
    n = out.shape[0] - 1
    half = 0.5 * h
    w = h / 6.0
    s = float(out[0, 0])
    i = float(out[0, 1])
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


def si_pc(alpha, h, out):
    n = out.shape[0] - 1
    half = 0.5 * h
    s = float(out[0, 0])
    i = float(out[0, 1])
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


def sir_euler(alpha, beta, h, out):
    n = out.shape[0] - 1
    s = float(out[0, 0])
    i = float(out[0, 1])
    r = float(out[0, 2])
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


def sir_rk4(alpha, beta, h, out):
    n = out.shape[0] - 1
    half = 0.5 * h
    w = h / 6.0
    s = float(out[0, 0])
    i = float(out[0, 1])
    r = float(out[0, 2])
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


def sir_pc(alpha, beta, h, out):
    n = out.shape[0] - 1
    half = 0.5 * h
    s = float(out[0, 0])
    i = float(out[0, 1])
    r = float(out[0, 2])
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
