"""Reduced expectation-value dynamics of the transfer problem.

Three ODE systems, all in time units of 1/(pi J):

* the full-chain ladder of dimension 2n-2 (skew bidiagonal, couplings
  alternating 1 and the control amplitudes u_k),
* its four-state window (one transfer step),
* the polar form (r1, r2, r3) of the window with the in-plane angle theta
  as the control.

Controls are dimensionless amplitudes in units of pi*J.  Norm is conserved
by all three flows (skew-symmetric generators); the fixed-step classical
RK4 integrator keeps the drift near machine precision at the default step.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .backend import kernels

DEFAULT_DT = 1e-4
R2_EPS = 1e-12


@dataclass(frozen=True)
class ControlPulse:
    """Sampled control amplitude u(t) with piecewise-linear interpolation.

    times are strictly increasing and start at 0; duration is the last time.
    """

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        u = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or t.shape != u.shape or len(t) < 2:
            raise ValueError("pulse needs matching 1-d time/value arrays, >= 2 samples")
        if np.any(np.diff(t) <= 0):
            raise ValueError("pulse times must be strictly increasing")
        if not np.all(np.isfinite(u)):
            raise ValueError("pulse contains non-finite samples")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", u)

    @property
    def duration(self) -> float:
        return float(self.times[-1])

    def __call__(self, t):
        return np.interp(t, self.times, self.values)

    @staticmethod
    def constant(u: float, duration: float) -> "ControlPulse":
        return ControlPulse(np.array([0.0, duration]), np.array([u, u]))

    def resample(self, n_samples: int) -> "ControlPulse":
        if n_samples < 2:
            raise ValueError("need at least 2 samples")
        t = np.linspace(0.0, self.duration, n_samples)
        return ControlPulse(t, self(t))

    def reversed(self) -> "ControlPulse":
        return ControlPulse(self.duration - self.times[::-1], self.values[::-1])

    def is_constant(self, tol: float = 1e-3, boundary: float = 1e-3) -> bool:
        """True when u varies by at most tol outside a boundary layer at t=0."""
        mask = self.times > boundary
        if not mask.any():
            return True
        core = self.values[mask]
        return float(core.max() - core.min()) <= tol

    def uniform_values(self, n_samples: int | None = None):
        """(h, values) on a uniform grid, as the integrator kernels expect."""
        if n_samples is None and len(self.times) > 1:
            steps = np.diff(self.times)
            if np.allclose(steps, steps[0], rtol=1e-9, atol=1e-12):
                return float(steps[0]), np.ascontiguousarray(self.values)
            n_samples = len(self.times)
        ts = np.linspace(0.0, self.duration, n_samples)
        return float(ts[1] - ts[0]), self(ts)

    def to_csv(self, path) -> None:
        arr = np.column_stack([self.times, self.values])
        np.savetxt(path, arr, delimiter=",", header="t,u", comments="")

    def to_json_dict(self) -> dict:
        return {
            "units": "1/(pi J)",
            "duration": self.duration,
            "samples": [{"t": float(t), "u": float(u)} for t, u in zip(self.times, self.values)],
        }


@dataclass(frozen=True)
class RState:
    """Polar coordinates of the four-state window: r2 = sqrt(x2^2+x3^2) >= 0,
    theta the angle of (x2, x3).  theta_defined is False at the poles
    (r2 below R2_EPS), where theta is a one-sided convention."""

    r1: float
    r2: float
    r3: float
    theta: float
    theta_defined: bool = True

    def vector(self) -> np.ndarray:
        return np.array([self.r1, self.r2, self.r3])


def to_polar(x, theta_fallback: float = 0.0) -> RState:
    """Polar form of a 4-vector; at r2 ~ 0 theta takes the fallback value."""
    x = np.asarray(x, dtype=float)
    r2 = float(np.hypot(x[1], x[2]))
    if r2 < R2_EPS:
        return RState(float(x[0]), r2, float(x[3]), theta_fallback, theta_defined=False)
    return RState(float(x[0]), r2, float(x[3]), float(np.arctan2(x[2], x[1])))


def from_polar(r: RState) -> np.ndarray:
    return np.array(
        [r.r1, r.r2 * np.cos(r.theta), r.r2 * np.sin(r.theta), r.r3]
    )


def chain_rhs(x, controls) -> np.ndarray:
    """Time derivative of the 2n-2 ladder coordinates for given controls u_1..u_{n-2}."""
    x = np.asarray(x, dtype=float)
    d = len(x)
    if d < 4 or d % 2:
        raise ValueError("chain state dimension must be even and >= 4")
    if len(controls) != (d - 2) // 2:
        raise ValueError(
            f"expected {(d - 2) // 2} controls for dimension {d}, got {len(controls)}"
        )
    c = np.empty(d - 1)
    c[0::2] = 1.0
    c[1::2] = controls
    dx = np.empty(d)
    dx[0] = -c[0] * x[1]
    dx[1:-1] = c[:-1] * x[:-2] - c[1:] * x[2:]
    dx[-1] = c[-1] * x[-2]
    return dx


def step4_rhs(x, u: float) -> np.ndarray:
    """Four-state window: dx = (-x2, x1 - u x3, u x2 - x4, x3)."""
    return np.array(
        [-x[1], x[0] - u * x[2], u * x[1] - x[3], x[2]], dtype=float
    )


def r_rhs(r, theta: float) -> np.ndarray:
    """Polar window flow for a given control angle."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([-c * r[1], c * r[0] - s * r[2], s * r[1]])


@dataclass(frozen=True)
class Trajectory:
    """Sampled states of one integration, with the control that produced it."""

    times: np.ndarray
    states: np.ndarray
    control: object = None

    @property
    def duration(self) -> float:
        return float(self.times[-1])

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def norm_drift(self) -> float:
        norms = np.linalg.norm(self.states, axis=1)
        return float(np.max(np.abs(norms - norms[0])))

    def to_csv(self, path) -> None:
        d = self.states.shape[1]
        header = "t," + ",".join(f"x{i+1}" for i in range(d))
        np.savetxt(
            path,
            np.column_stack([self.times, self.states]),
            delimiter=",",
            header=header,
            comments="",
        )

    def to_json_dict(self) -> dict:
        return {
            "units": "1/(pi J)",
            "duration": self.duration,
            "times": self.times.tolist(),
            "states": self.states.tolist(),
        }


def _steps_for(duration: float, dt: float) -> int:
    n = int(round(duration / dt))
    return max(n, 1)


def integrate(rhs, control, x0, duration: float, dt: float = DEFAULT_DT) -> Trajectory:
    """Classical RK4 at fixed step for an arbitrary rhs(x, c).

    control may be a ControlPulse, a callable t -> value, a constant, or
    None (the rhs is called with None).  The step is adjusted so an integer
    number of steps lands exactly on the duration.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    n = _steps_for(duration, dt)
    h = duration / n
    if callable(control):
        cf = control
    elif control is None:
        cf = lambda t: None
    else:
        cval = control
        cf = lambda t: cval
    x = np.asarray(x0, dtype=float)
    out = np.empty((n + 1, len(x)))
    out[0] = x
    times = np.linspace(0.0, duration, n + 1)
    for i in range(n):
        t = times[i]
        k1 = rhs(x, cf(t))
        k2 = rhs(x + 0.5 * h * k1, cf(t + 0.5 * h))
        k3 = rhs(x + 0.5 * h * k2, cf(t + 0.5 * h))
        k4 = rhs(x + h * k3, cf(t + h))
        x = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(x)):
            raise FloatingPointError(f"non-finite state at t={t + h}")
        out[i + 1] = x
    return Trajectory(times, out, control)


def integrate_polar(r0, f: float, duration: float, theta0: float = 0.0,
                    dt: float = DEFAULT_DT) -> Trajectory:
    """Polar window under the linear angle schedule theta = theta0 + f t,
    on the fast kernel path."""
    n = _steps_for(duration, dt)
    states = kernels.rk4_polar(np.asarray(r0, dtype=float), f, theta0, duration / n, n)
    return Trajectory(np.linspace(0.0, duration, n + 1), states, ("theta", theta0, f))


def integrate_step4(x0, pulse: ControlPulse, dt: float = DEFAULT_DT) -> Trajectory:
    """Four-state window under a sampled pulse, on the fast kernel path."""
    n = _steps_for(pulse.duration, dt)
    h_u, us = pulse.uniform_values()
    states = kernels.rk4_step4_pulse(np.asarray(x0, dtype=float), us, h_u, pulse.duration / n, n)
    return Trajectory(np.linspace(0.0, pulse.duration, n + 1), states, pulse)


def integrate_chain(x0, active: int, pulse: ControlPulse | None,
                    duration: float | None = None, dt: float = DEFAULT_DT) -> Trajectory:
    """Full ladder with one driven control (1-based index; 0 = free evolution)."""
    if pulse is None:
        if duration is None:
            raise ValueError("need a duration for free evolution")
        us, h_u = np.zeros(2), duration
    else:
        duration = pulse.duration if duration is None else duration
        h_u, us = pulse.uniform_values()
    n = _steps_for(duration, dt)
    states = kernels.rk4_chain_pulse(
        np.asarray(x0, dtype=float), active, us, h_u, duration / n, n
    )
    return Trajectory(np.linspace(0.0, duration, n + 1), states, pulse)


def u_from_theta(traj: Trajectory, f: float, theta0: float = 0.0) -> ControlPulse:
    """Recover the window control u(t) that realizes the angle schedule
    theta = theta0 + f t along an integrated trajectory.

    u = theta_dot + (x1 x3 + x2 x4) / r2^2; in polar variables the second
    term is (r1 sin(theta) + r3 cos(theta)) / r2.  Near the poles (r2 -> 0)
    samples inside a layer of 10 grid steps are replaced by the one-sided
    limit from outside the layer.
    """
    t = traj.times
    theta = theta0 + f * t
    dt = t[1] - t[0]
    if traj.states.shape[1] == 3:
        r1, r2, r3 = traj.states.T
        num = r1 * np.sin(theta) + r3 * np.cos(theta)
        den = r2
        layer = 10.0 * dt  # r2 grows away from a pole at unit rate
    elif traj.states.shape[1] == 4:
        x1, x2, x3, x4 = traj.states.T
        num = x1 * x3 + x2 * x4
        den = x2**2 + x3**2
        layer = (10.0 * dt) ** 2
    else:
        raise ValueError("need a polar or four-state trajectory")
    # evaluate away from pole layers, extend into them by the one-sided limit
    safe = den > layer
    if not safe.any():
        raise FloatingPointError("trajectory never leaves the polar singularity")
    u = np.empty_like(t)
    u[safe] = f + num[safe] / den[safe]
    idx = np.nonzero(safe)[0]
    u[: idx[0]] = u[idx[0]]
    u[idx[-1] + 1 :] = u[idx[-1]]
    interior_bad = ~safe
    interior_bad[: idx[0]] = False
    interior_bad[idx[-1] + 1 :] = False
    if interior_bad.any():
        u[interior_bad] = np.interp(t[interior_bad], t[safe], u[safe])
    return ControlPulse(t, u)


def reduced_sequence_replay(seq, dt: float = DEFAULT_DT) -> Trajectory:
    """Replay an order-creation sequence in the 2n-2 ladder coordinates.

    Shaped intervals integrate the ladder with the pulse on its control slot
    (a y-drive on spin s is control index s-1), hard y-pulses rotate the
    corresponding coordinate pair instantaneously, delays evolve freely.
    This is the reduced-model side of the reduced-vs-full consistency check;
    only y-controls on spins 2..n-1 and undecoupled delays are replayable.
    """
    from .sequences import Delay, HardPulse, ShapedInterval

    n = seq.chain.n
    d = 2 * n - 2
    x = np.zeros(d)
    x[0] = 1.0
    times = [0.0]
    states = [x.copy()]
    t_now = 0.0
    for el in seq.elements:
        if isinstance(el, HardPulse):
            if el.axis not in ("y", "-y"):
                raise ValueError("reduced replay covers y-axis hard pulses only")
            angle = el.angle if el.axis == "y" else -el.angle
            for s in el.spins:
                if not 2 <= s <= n - 1:
                    raise ValueError(f"spin {s} has no control slot in the ladder")
                i = 2 * s - 3
                ca, sa = np.cos(angle), np.sin(angle)
                x[i], x[i + 1] = ca * x[i] - sa * x[i + 1], sa * x[i] + ca * x[i + 1]
            times.append(t_now)
            states.append(x.copy())
        elif isinstance(el, (Delay, ShapedInterval)):
            if isinstance(el, Delay):
                if el.decoupled:
                    raise ValueError("reduced replay does not model decoupling")
                traj = integrate_chain(x, 0, None, duration=el.duration, dt=dt)
            else:
                if el.axis != "y" or len(el.spins) != 1:
                    raise ValueError("reduced replay needs single-spin y drives")
                (s,) = el.spins
                if not 2 <= s <= n - 1:
                    raise ValueError(f"spin {s} has no control slot in the ladder")
                traj = integrate_chain(x, s - 1, el.pulse, dt=dt)
            x = traj.final.copy()
            times.extend((t_now + traj.times[1:]).tolist())
            states.extend(traj.states[1:])
            t_now += traj.duration
        else:
            raise TypeError(f"unknown element {el!r}")
    return Trajectory(np.array(times), np.array(states))


def pulse_to_json(pulse: ControlPulse, path, extra: dict | None = None) -> None:
    payload = pulse.to_json_dict()
    if extra:
        payload.update(extra)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
