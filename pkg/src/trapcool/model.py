"""Scaled Ermakov dynamics for harmonic-trap expansion.

The state is ``(x1, x2) = (b, db/dt)`` with time measured in units of
``1/omega_0`` and the control ``u = omega(t)**2 / omega_0**2``.  A cooling
instance starts at ``(1, 0)`` with ``u = 1`` and must end at ``(gamma, 0)``
with ``u = gamma**-4``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class DomainError(ValueError):
    """State left the admissible region ``x1 > 0``."""


class InfeasibleSpecError(ValueError):
    """A planner's closed-form arguments fall outside their domain."""


@dataclass(frozen=True)
class ProblemSpec:
    """Control bounds ``-v1 <= u <= v2`` and expansion target ``gamma``.

    ``gamma == 1`` is accepted as the degenerate no-op instance.
    """

    v1: float
    v2: float
    gamma: float

    def __post_init__(self):
        for name in ("v1", "v2", "gamma"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ValueError(f"{name} must be a finite real, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.v1 <= 0:
            raise ValueError(f"v1 must be > 0, got {self.v1}")
        if self.v2 < 1:
            raise ValueError(f"v2 must be >= u(0) = 1, got {self.v2}")
        if self.gamma < 1:
            raise ValueError(f"gamma must be >= 1, got {self.gamma}")

    @property
    def u_initial(self) -> float:
        return 1.0

    @property
    def u_final(self) -> float:
        return self.gamma**-4

    def to_dict(self) -> dict:
        return {"v1": self.v1, "v2": self.v2, "gamma": self.gamma}

    @classmethod
    def from_dict(cls, data: dict) -> "ProblemSpec":
        extra = set(data) - {"v1", "v2", "gamma"}
        if extra:
            raise ValueError(f"unknown ProblemSpec keys: {sorted(extra)}")
        missing = {"v1", "v2", "gamma"} - set(data)
        if missing:
            raise ValueError(f"missing ProblemSpec keys: {sorted(missing)}")
        return cls(data["v1"], data["v2"], data["gamma"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "ProblemSpec":
        return cls.from_dict(json.loads(text))


class State(NamedTuple):
    x1: float
    x2: float


def _check_x1(x1):
    if np.any(np.asarray(x1) <= 0):
        raise DomainError(f"x1 must stay positive, got {x1}")


def dynamics(s, u):
    """Right-hand side ``(x2, -u*x1 + 1/x1**3)`` of the scaled system."""
    x1, x2 = s
    _check_x1(x1)
    return (x2, -u * x1 + 1.0 / x1**3)


def segment_invariant(s, u):
    """Quantity ``x2**2 + u*x1**2 + 1/x1**2`` conserved while ``u`` is constant."""
    x1, x2 = s
    _check_x1(x1)
    return x2 * x2 + u * x1 * x1 + 1.0 / (x1 * x1)


def mode_energy(c, n):
    """Average energy of mode ``n`` in units of hbar*omega_0 for invariant value ``c``."""
    if n < 0 or int(n) != n:
        raise ValueError(f"mode index must be a nonnegative integer, got {n}")
    return (2 * n + 1) * c / 4


def _check_s(s):
    s = np.asarray(s, dtype=float)
    if np.any((s < 0) | (s > 1)):
        raise ValueError(f"normalized time must lie in [0, 1], got {s}")
    return s


def ansatz_scaling(s, gamma):
    """Quintic ``b(s)`` with ``b(0)=1``, ``b(1)=gamma`` and flat ends to second order."""
    s = _check_s(s)
    return (gamma - 1) * s**3 * (6 * s**2 - 15 * s + 10) + 1


def ansatz_scaling_derivatives(s, gamma):
    """First and second derivatives of :func:`ansatz_scaling` in ``s``."""
    s = _check_s(s)
    d1 = 30 * (gamma - 1) * s**2 * (s - 1) ** 2
    d2 = 60 * (gamma - 1) * s * (s - 1) * (2 * s - 1)
    return d1, d2


def ansatz_control(s, t_f, gamma):
    """Control that makes the quintic ansatz an exact solution over duration ``t_f``.

    From the Ermakov equation ``b'' / t_f**2 + u b = 1/b**3`` with ``'``
    denoting d/ds.  Values outside ``[-v1, v2]`` are returned as-is.
    """
    if t_f <= 0:
        raise ValueError(f"t_f must be positive, got {t_f}")
    b = ansatz_scaling(s, gamma)
    _, d2 = ansatz_scaling_derivatives(s, gamma)
    return 1.0 / b**4 - d2 / (t_f**2 * b)
