# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: spline sampling, RK4 characteristics, chirp sums.

Every function releases the GIL so callers can split work across threads.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport floor, cos, sin

cnp.import_array()


cdef inline Py_ssize_t _mirror(Py_ssize_t i, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t period = 2 * (n - 1)
    if i < 0:
        i = -i
    i = i % period
    if i >= n:
        i = period - i
    return i


cdef inline void _weights(double t, double* w) noexcept nogil:
    cdef double t2 = t * t
    cdef double t3 = t2 * t
    cdef double u = 1.0 - t
    w[0] = u * u * u / 6.0
    w[1] = (3.0 * t3 - 6.0 * t2 + 4.0) / 6.0
    w[2] = (-3.0 * t3 + 3.0 * t2 + 3.0 * t + 1.0) / 6.0
    w[3] = t3 / 6.0


def sample_bicubic(const double complex[:, ::1] coef, const double[::1] fq, const double[::1] fs, double tol=1e-9):
    cdef Py_ssize_t nq = coef.shape[0], ns = coef.shape[1]
    cdef Py_ssize_t n = fq.shape[0], j, a, b, iq, is_
    cdef double x, y, wq[4]
    cdef double ws[4]
    cdef Py_ssize_t idq[4]
    cdef Py_ssize_t ids[4]
    cdef double complex acc, racc
    out = np.zeros(n, dtype=np.complex128)
    cdef double complex[::1] o = out
    with nogil:
        for j in range(n):
            x = fq[j]
            y = fs[j]
            if x < -tol or x > nq - 1 + tol or y < -tol or y > ns - 1 + tol:
                continue
            if x < 0:
                x = 0
            elif x > nq - 1:
                x = nq - 1
            if y < 0:
                y = 0
            elif y > ns - 1:
                y = ns - 1
            iq = <Py_ssize_t>floor(x)
            is_ = <Py_ssize_t>floor(y)
            _weights(x - iq, wq)
            _weights(y - is_, ws)
            for a in range(4):
                idq[a] = _mirror(iq - 1 + a, nq)
                ids[a] = _mirror(is_ - 1 + a, ns)
            acc = 0
            for a in range(4):
                racc = 0
                for b in range(4):
                    racc = racc + ws[b] * coef[idq[a], ids[b]]
                acc = acc + wq[a] * racc
            o[j] = acc
    return out


def sample_bilinear(const double complex[:, ::1] data, const double[::1] fq, const double[::1] fs, double tol=1e-9):
    cdef Py_ssize_t nq = data.shape[0], ns = data.shape[1]
    cdef Py_ssize_t n = fq.shape[0], j, iq, is_
    cdef double x, y, tq, ts
    out = np.zeros(n, dtype=np.complex128)
    cdef double complex[::1] o = out
    with nogil:
        for j in range(n):
            x = fq[j]
            y = fs[j]
            if x < -tol or x > nq - 1 + tol or y < -tol or y > ns - 1 + tol:
                continue
            x = min(max(x, 0.0), nq - 1.0)
            y = min(max(y, 0.0), ns - 1.0)
            iq = min(<Py_ssize_t>floor(x), nq - 2)
            is_ = min(<Py_ssize_t>floor(y), ns - 2)
            tq = x - iq
            ts = y - is_
            o[j] = ((1 - tq) * (1 - ts) * data[iq, is_] + tq * (1 - ts) * data[iq + 1, is_]
                    + (1 - tq) * ts * data[iq, is_ + 1] + tq * ts * data[iq + 1, is_ + 1])
    return out


cdef void _rk4_step(double h, double m, double k, double qq, double pp,
                    double* qo, double* po) noexcept nogil:
    cdef double k1q, k1p, k2q, k2p, k3q, k3p, k4q, k4p
    k1q = -pp / m
    k1p = k * qq
    k2q = -(pp + 0.5 * h * k1p) / m
    k2p = k * (qq + 0.5 * h * k1q)
    k3q = -(pp + 0.5 * h * k2p) / m
    k3p = k * (qq + 0.5 * h * k2q)
    k4q = -(pp + h * k3p) / m
    k4p = k * (qq + h * k3q)
    qo[0] = qq + h / 6.0 * (k1q + 2 * k2q + 2 * k3q + k4q)
    po[0] = pp + h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p)


def backward_flow_quadratic(q0, p0, double t, double m, double k, Py_ssize_t nsteps):
    cdef double[::1] q = np.array(q0, dtype=np.float64)
    cdef double[::1] p = np.array(p0, dtype=np.float64)
    cdef Py_ssize_t n = q.shape[0], j, s
    cdef double h = t / nsteps
    cdef double a11, a12, a21, a22, qq
    # the system is linear, so one RK4 step is a fixed 2x2 matrix
    _rk4_step(h, m, k, 1.0, 0.0, &a11, &a21)
    _rk4_step(h, m, k, 0.0, 1.0, &a12, &a22)
    with nogil:
        for s in range(nsteps):
            for j in range(n):
                qq = q[j]
                q[j] = a11 * qq + a12 * p[j]
                p[j] = a21 * qq + a22 * p[j]
    return np.asarray(q), np.asarray(p)


def chirp_sum(const double[::1] x_out, const double[::1] x_nodes, const double complex[::1] w_nodes, double c):
    cdef Py_ssize_t n = x_out.shape[0], nn = x_nodes.shape[0], i, j
    cdef double d, ph, re, im
    out = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] o = out
    with nogil:
        for i in range(n):
            re = 0
            im = 0
            for j in range(nn):
                d = x_out[i] - x_nodes[j]
                ph = c * d * d
                re = re + cos(ph) * w_nodes[j].real - sin(ph) * w_nodes[j].imag
                im = im + sin(ph) * w_nodes[j].real + cos(ph) * w_nodes[j].imag
            o[i] = re + 1j * im
    return out
