# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled fixed-step RK4 kernels; see _kernels_py for the reference twins."""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()

BACKEND_NAME = "cython"


cdef inline void _polar_rhs(double r1, double r2, double r3, double theta,
                            double* d1, double* d2, double* d3) nogil:
    cdef double c = cos(theta)
    cdef double s = sin(theta)
    d1[0] = -c * r2
    d2[0] = c * r1 - s * r3
    d3[0] = s * r2


def rk4_polar(r0, double f, double theta0, double dt, Py_ssize_t n_steps):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n_steps + 1, 3))
    cdef double r1 = r0[0], r2 = r0[1], r3 = r0[2]
    cdef double a1, a2, a3, b1, b2, b3, c1, c2, c3, d1, d2, d3
    cdef double t, tm
    cdef Py_ssize_t i
    out[0, 0] = r1; out[0, 1] = r2; out[0, 2] = r3
    with nogil:
        for i in range(n_steps):
            t = i * dt
            tm = theta0 + f * (t + 0.5 * dt)
            _polar_rhs(r1, r2, r3, theta0 + f * t, &a1, &a2, &a3)
            _polar_rhs(r1 + 0.5 * dt * a1, r2 + 0.5 * dt * a2, r3 + 0.5 * dt * a3,
                       tm, &b1, &b2, &b3)
            _polar_rhs(r1 + 0.5 * dt * b1, r2 + 0.5 * dt * b2, r3 + 0.5 * dt * b3,
                       tm, &c1, &c2, &c3)
            _polar_rhs(r1 + dt * c1, r2 + dt * c2, r3 + dt * c3,
                       theta0 + f * (t + dt), &d1, &d2, &d3)
            r1 += dt / 6.0 * (a1 + 2.0 * b1 + 2.0 * c1 + d1)
            r2 += dt / 6.0 * (a2 + 2.0 * b2 + 2.0 * c2 + d2)
            r3 += dt / 6.0 * (a3 + 2.0 * b3 + 2.0 * c3 + d3)
            out[i + 1, 0] = r1; out[i + 1, 1] = r2; out[i + 1, 2] = r3
    return out


cdef inline void _step4_rhs(double* x, double u, double* dx) nogil:
    dx[0] = -x[1]
    dx[1] = x[0] - u * x[2]
    dx[2] = u * x[1] - x[3]
    dx[3] = x[2]


cdef inline void _rk4_step4(double* x, double u0, double um, double u1, double dt) nogil:
    cdef double k1[4], k2[4], k3[4], k4[4], y[4]
    cdef Py_ssize_t j
    _step4_rhs(x, u0, k1)
    for j in range(4): y[j] = x[j] + 0.5 * dt * k1[j]
    _step4_rhs(y, um, k2)
    for j in range(4): y[j] = x[j] + 0.5 * dt * k2[j]
    _step4_rhs(y, um, k3)
    for j in range(4): y[j] = x[j] + dt * k3[j]
    _step4_rhs(y, u1, k4)
    for j in range(4):
        x[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])


def rk4_step4_const(x0, double u, double dt, Py_ssize_t n_steps):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n_steps + 1, 4))
    cdef double x[4]
    cdef Py_ssize_t i, j
    for j in range(4):
        x[j] = x0[j]
        out[0, j] = x[j]
    with nogil:
        for i in range(n_steps):
            _rk4_step4(x, u, u, u, dt)
            for j in range(4):
                out[i + 1, j] = x[j]
    return out


cdef inline double _interp(double[:] us, double h_u, double t) nogil:
    cdef double pos = t / h_u
    cdef Py_ssize_t i = <Py_ssize_t>pos
    cdef double frac
    if i >= us.shape[0] - 1:
        return us[us.shape[0] - 1]
    frac = pos - i
    return us[i] * (1.0 - frac) + us[i + 1] * frac


def rk4_step4_pulse(x0, us, double h_u, double dt, Py_ssize_t n_steps):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n_steps + 1, 4))
    cdef double[:] uv = np.ascontiguousarray(us, dtype=np.float64)
    cdef double x[4]
    cdef double t
    cdef Py_ssize_t i, j
    for j in range(4):
        x[j] = x0[j]
        out[0, j] = x[j]
    with nogil:
        for i in range(n_steps):
            t = i * dt
            _rk4_step4(x, _interp(uv, h_u, t), _interp(uv, h_u, t + 0.5 * dt),
                       _interp(uv, h_u, t + dt), dt)
            for j in range(4):
                out[i + 1, j] = x[j]
    return out


cdef void _chain_rhs(double[:] x, double[:] c, double[:] dx) nogil:
    cdef Py_ssize_t d = x.shape[0]
    cdef Py_ssize_t j
    dx[0] = -c[0] * x[1]
    for j in range(1, d - 1):
        dx[j] = c[j - 1] * x[j - 1] - c[j] * x[j + 1]
    dx[d - 1] = c[d - 2] * x[d - 2]


def rk4_chain_pulse(x0, Py_ssize_t active, us, double h_u, double dt, Py_ssize_t n_steps):
    cdef Py_ssize_t d = len(x0)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n_steps + 1, d))
    cdef double[:] x = np.array(x0, dtype=np.float64)
    cdef double[:] uv = np.ascontiguousarray(us, dtype=np.float64)
    cdef double[:] c = np.zeros(d - 1)
    cdef double[:] k1 = np.empty(d), k2 = np.empty(d), k3 = np.empty(d), k4 = np.empty(d)
    cdef double[:] y = np.empty(d)
    cdef Py_ssize_t i, j, j_active
    cdef double t
    for j in range(0, d - 1, 2):
        c[j] = 1.0
    j_active = 2 * active - 1
    for j in range(d):
        out[0, j] = x[j]
    with nogil:
        for i in range(n_steps):
            t = i * dt
            if active > 0:
                c[j_active] = _interp(uv, h_u, t)
            _chain_rhs(x, c, k1)
            if active > 0:
                c[j_active] = _interp(uv, h_u, t + 0.5 * dt)
            for j in range(d): y[j] = x[j] + 0.5 * dt * k1[j]
            _chain_rhs(y, c, k2)
            for j in range(d): y[j] = x[j] + 0.5 * dt * k2[j]
            _chain_rhs(y, c, k3)
            if active > 0:
                c[j_active] = _interp(uv, h_u, t + dt)
            for j in range(d): y[j] = x[j] + dt * k3[j]
            _chain_rhs(y, c, k4)
            for j in range(d):
                x[j] = x[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
                out[i + 1, j] = x[j]
    return out
