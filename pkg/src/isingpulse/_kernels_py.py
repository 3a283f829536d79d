"""Pure-Python fixed-step RK4 kernels.

Fallback twins of the compiled kernels in _kernels_cy; identical signatures
and identical arithmetic (classical RK4, scalar updates), just slower.  The
backend module picks whichever is available.
"""

import math

import numpy as np

BACKEND_NAME = "python"


def rk4_polar(r0, f, theta0, dt, n_steps):
    """Integrate r' = A(theta) r with theta(t) = theta0 + f t.

    A(theta) rotates (r1,r2) at cos(theta) and (r2,r3) at sin(theta).
    Returns the full trajectory, shape (n_steps+1, 3).
    """
    out = np.empty((n_steps + 1, 3))
    r1, r2, r3 = float(r0[0]), float(r0[1]), float(r0[2])
    out[0] = (r1, r2, r3)
    for i in range(n_steps):
        t = i * dt
        k1 = _polar_rhs(r1, r2, r3, theta0 + f * t)
        k2 = _polar_rhs(
            r1 + 0.5 * dt * k1[0], r2 + 0.5 * dt * k1[1], r3 + 0.5 * dt * k1[2],
            theta0 + f * (t + 0.5 * dt),
        )
        k3 = _polar_rhs(
            r1 + 0.5 * dt * k2[0], r2 + 0.5 * dt * k2[1], r3 + 0.5 * dt * k2[2],
            theta0 + f * (t + 0.5 * dt),
        )
        k4 = _polar_rhs(
            r1 + dt * k3[0], r2 + dt * k3[1], r3 + dt * k3[2],
            theta0 + f * (t + dt),
        )
        r1 += dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        r2 += dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        r3 += dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
        out[i + 1] = (r1, r2, r3)
    return out


def _polar_rhs(r1, r2, r3, theta):
    c, s = math.cos(theta), math.sin(theta)
    return (-c * r2, c * r1 - s * r3, s * r2)


def rk4_step4_const(x0, u, dt, n_steps):
    """Four-state ladder with constant control; trajectory (n_steps+1, 4)."""
    out = np.empty((n_steps + 1, 4))
    x = [float(v) for v in x0]
    out[0] = x
    for i in range(n_steps):
        x = _rk4_step4(x, u, u, u, dt)
        out[i + 1] = x
    return out


def rk4_step4_pulse(x0, us, h_u, dt, n_steps):
    """Four-state ladder driven by a sampled pulse.

    us holds control samples on the uniform grid 0, h_u, 2*h_u, ...;
    values between samples are linear interpolations, values beyond the
    last sample clamp to it.
    """
    out = np.empty((n_steps + 1, 4))
    x = [float(v) for v in x0]
    out[0] = x
    for i in range(n_steps):
        t = i * dt
        x = _rk4_step4(
            x,
            _interp(us, h_u, t),
            _interp(us, h_u, t + 0.5 * dt),
            _interp(us, h_u, t + dt),
            dt,
        )
        out[i + 1] = x
    return out


def _interp(us, h_u, t):
    pos = t / h_u
    i = int(pos)
    if i >= len(us) - 1:
        return float(us[-1])
    frac = pos - i
    return float(us[i]) * (1.0 - frac) + float(us[i + 1]) * frac


def _step4_rhs(x, u):
    return (
        -x[1],
        x[0] - u * x[2],
        u * x[1] - x[3],
        x[2],
    )


def _rk4_step4(x, u0, um, u1, dt):
    k1 = _step4_rhs(x, u0)
    y = [x[j] + 0.5 * dt * k1[j] for j in range(4)]
    k2 = _step4_rhs(y, um)
    y = [x[j] + 0.5 * dt * k2[j] for j in range(4)]
    k3 = _step4_rhs(y, um)
    y = [x[j] + dt * k3[j] for j in range(4)]
    k4 = _step4_rhs(y, u1)
    return [x[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]) for j in range(4)]


def rk4_chain_pulse(x0, active, us, h_u, dt, n_steps):
    """Full bidiagonal ladder of any even dimension with one driven control.

    Couplings alternate 1, u_k, 1, u_k+1, ...; only control index ``active``
    (1-based, 0 for none) is nonzero and follows the sampled pulse.
    """
    d = len(x0)
    out = np.empty((n_steps + 1, d))
    x = np.array(x0, dtype=float)
    out[0] = x
    c = np.zeros(d - 1)
    c[0::2] = 1.0
    j_active = 2 * active - 1  # coupling slot driven by control k
    for i in range(n_steps):
        t = i * dt
        if active > 0:
            c[j_active] = _interp(us, h_u, t)
        k1 = _chain_rhs(x, c)
        if active > 0:
            c[j_active] = _interp(us, h_u, t + 0.5 * dt)
        k2 = _chain_rhs(x + 0.5 * dt * k1, c)
        k3 = _chain_rhs(x + 0.5 * dt * k2, c)
        if active > 0:
            c[j_active] = _interp(us, h_u, t + dt)
        k4 = _chain_rhs(x + dt * k3, c)
        x = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i + 1] = x
    return out


def _chain_rhs(x, c):
    dx = np.empty_like(x)
    dx[0] = -c[0] * x[1]
    dx[1:-1] = c[:-1] * x[:-2] - c[1:] * x[2:]
    dx[-1] = c[-1] * x[-2]
    return dx
