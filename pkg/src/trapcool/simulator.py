"""Propagation of the scaled Ermakov system.

Constant-control segments are propagated in closed form: with ``y = x1**2``
the dynamics reduce to the linear equation ``y'' = 2c - 4u y`` where ``c`` is
the segment invariant.  A fixed-step RK4 integrator handles arbitrary
``u(t)`` and doubles as the reference oracle for the closed form.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .model import DomainError, ProblemSpec, State, segment_invariant

SINGULAR_X1 = 1e-6


class SingularityError(DomainError):
    """Numeric integration approached ``x1 = 0``."""


def _linear_kernels(lam, t):
    """Return ``(C, S, P)`` for ``y'' = -lam*y``: cos-like, sin-like/omega, (1-cos)/omega**2."""
    if lam > 0:
        w = math.sqrt(lam)
        half = math.sin(0.5 * w * t)
        return math.cos(w * t), math.sin(w * t) / w, 2.0 * half * half / lam
    if lam < 0:
        k = math.sqrt(-lam)
        half = math.sinh(0.5 * k * t)
        return math.cosh(k * t), math.sinh(k * t) / k, -2.0 * half * half / lam
    return 1.0, t, 0.5 * t * t


def propagate_constant(s0, u, dt):
    """Exact state after time ``dt`` under constant control ``u``."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    x1, x2 = s0
    c = segment_invariant((x1, x2), u)
    y0, dy0 = x1 * x1, 2.0 * x1 * x2
    lam = 4.0 * u
    C, S, P = _linear_kernels(lam, dt)
    y = y0 * C + dy0 * S + 2.0 * c * P
    dy = -lam * y0 * S + dy0 * C + 2.0 * c * S
    if y <= 0:
        raise DomainError(f"closed-form propagation reached x1**2 = {y}")
    x1n = math.sqrt(y)
    return State(x1n, dy / (2.0 * x1n))


@dataclass
class Trajectory:
    """Sampled record of ``(t, x1, x2, u)``."""

    t: np.ndarray
    x1: np.ndarray
    x2: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        self.t, self.x1, self.x2, self.u = (
            np.asarray(a, dtype=float) for a in (self.t, self.x1, self.x2, self.u)
        )
        if not (len(self.t) == len(self.x1) == len(self.x2) == len(self.u)):
            raise ValueError("trajectory columns differ in length")

    def __len__(self):
        return len(self.t)

    @property
    def endpoint(self) -> State:
        return State(float(self.x1[-1]), float(self.x2[-1]))

    def samples(self):
        return list(zip(self.t.tolist(), self.x1.tolist(), self.x2.tolist(), self.u.tolist()))

    def to_csv(self, path_or_file):
        rows = [[f"{v:.17g}" for v in row] for row in self.samples()]
        _write_csv(path_or_file, ["t", "x1", "x2", "u"], rows)


def _write_csv(path_or_file, header, rows):
    if hasattr(path_or_file, "write"):
        writer = csv.writer(path_or_file, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return
    with open(path_or_file, "w", newline="") as fh:
        _write_csv(fh, header, rows)


def rk4(rhs, y0, t_f, steps, t0=0.0):
    """Classical fixed-step RK4 from ``t0`` to ``t_f``.

    ``y0`` may be any array shape; ``rhs(t, y)`` must return the same shape.
    Returns the sample times and the stacked states (``steps + 1`` rows).
    """
    h = (t_f - t0) / steps
    y = np.array(y0, dtype=float)
    ys = np.empty((steps + 1,) + y.shape)
    ys[0] = y
    for i in range(steps):
        t = t0 + i * h
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        ys[i + 1] = y
    return t0 + h * np.arange(steps + 1), ys


def integrate(spec: ProblemSpec, control, t_f, steps=2000, s0=(1.0, 0.0)) -> Trajectory:
    """RK4 integration of the scaled system under ``control(t)`` on ``[0, t_f]``."""
    if steps < 100:
        raise ValueError(f"steps must be >= 100, got {steps}")
    if t_f <= 0:
        raise ValueError(f"t_f must be positive, got {t_f}")

    def rhs(t, y):
        x1 = y[0]
        if x1 <= SINGULAR_X1:
            raise SingularityError(f"x1 = {x1:.3g} at t = {t:.6g}")
        return np.array([y[1], -control(t) * x1 + 1.0 / x1**3])

    t, ys = rk4(rhs, np.asarray(s0, dtype=float), t_f, steps)
    if np.any(ys[:, 0] <= SINGULAR_X1):
        raise SingularityError("x1 approached zero at the final step")
    u = np.array([control(ti) for ti in t], dtype=float)
    return Trajectory(t, ys[:, 0], ys[:, 1], u)


def simulate_schedule(spec: ProblemSpec, plan, samples_per_segment=50, s0=(1.0, 0.0)) -> Trajectory:
    """Chain closed-form propagation across the constant segments of ``plan``."""
    state = State(*s0)
    t = [0.0]
    x1 = [state.x1]
    x2 = [state.x2]
    segments = list(plan.segments)
    u = [segments[0][1] if segments else spec.u_initial]
    now = 0.0
    for duration, value in segments:
        start = state
        for j in range(1, samples_per_segment + 1):
            state = propagate_constant(start, value, duration * j / samples_per_segment)
            t.append(now + duration * j / samples_per_segment)
            x1.append(state.x1)
            x2.append(state.x2)
            u.append(value)
        now += duration
    return Trajectory(t, x1, x2, u)


def schedule_control(plan):
    """Piecewise-constant ``u(t)`` for a schedule (right-continuous at switches)."""
    edges = np.cumsum([d for d, _ in plan.segments])
    values = [v for _, v in plan.segments]

    def control(t):
        i = int(np.searchsorted(edges, t, side="right"))
        return values[min(i, len(values) - 1)]

    return control


def sample_schedule(plan, times, s0=(1.0, 0.0)):
    """States of ``plan`` at arbitrary sorted times; returns ``(x1, x2, u)`` arrays."""
    times = np.asarray(times, dtype=float)
    out = np.empty((3, len(times)))
    state = State(*s0)
    seg_start = 0.0
    segments = list(plan.segments)
    k = 0
    for i, t in enumerate(times):
        while k < len(segments) - 1 and t > seg_start + segments[k][0]:
            state = propagate_constant(state, segments[k][1], segments[k][0])
            seg_start += segments[k][0]
            k += 1
        value = segments[k][1]
        dt = t - seg_start
        s = propagate_constant(state, value, dt) if dt > 0 else state
        out[:, i] = s.x1, s.x2, value
    return out[0], out[1], out[2]


@dataclass
class VerificationReport:
    endpoint_error: tuple
    max_invariant_drift: float
    feasible: bool
    violations: list = field(default_factory=list)


def verify(traj: Trajectory, spec: ProblemSpec, tol=1e-6) -> VerificationReport:
    """Check endpoint, control bounds, positivity and per-segment invariant drift."""
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    violations = []
    err = (abs(traj.x1[-1] - spec.gamma), abs(traj.x2[-1]))
    if err[0] >= tol or err[1] >= tol:
        violations.append(
            f"endpoint ({traj.x1[-1]:.9g}, {traj.x2[-1]:.9g}) misses "
            f"({spec.gamma:g}, 0) by {max(err):.3g} >= {tol:g}"
        )
    bad_u = (traj.u < -spec.v1) | (traj.u > spec.v2)
    if np.any(bad_u):
        i = int(np.argmax(bad_u))
        violations.append(f"u = {traj.u[i]:.9g} at t = {traj.t[i]:.9g} outside [{-spec.v1:g}, {spec.v2:g}]")
    if np.any(traj.x1 <= 0):
        violations.append("x1 <= 0 reached")

    drift = 0.0
    if np.all(traj.x1 > 0):
        # runs of equal u are constant segments; the sample before a run is its start state
        start = 0
        for i in range(1, len(traj) + 1):
            if i < len(traj) and traj.u[i] == traj.u[start]:
                continue
            if i - start >= 2:
                lo = max(start - 1, 0)
                c = segment_invariant((traj.x1[lo:i], traj.x2[lo:i]), traj.u[start])
                scale = max(1.0, float(np.max(np.abs(c))))
                drift = max(drift, float(np.ptp(c)) / scale)
            start = i
    return VerificationReport(err, drift, not violations, violations)
