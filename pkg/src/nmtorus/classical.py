"""Classical limits of the torus maps: orbits, phase portraits, Lyapunov exponents.

Kick rules follow from the quantum phases by stationary phase with
2 pi hbar = 1/N: a position kick exp(i theta(q)) shifts p by
theta'(q) / (2 pi N), a momentum kick exp(i theta(p)) shifts q by
-theta'(p) / (2 pi N). The rightmost operator factor acts first.

Step functions accept scalars or numpy arrays (a whole grid of points).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from nmtorus.errors import ValidationError

TWO_PI = 2 * math.pi


def wrap(x):
    """Reduce into [0, 1); floor-based so negative values wrap correctly."""
    y = x - np.floor(x)
    # x slightly below an integer can round to exactly 1.0
    return np.where(y >= 1.0, 0.0, y) if isinstance(y, np.ndarray) else (0.0 if y >= 1.0 else y)


class PhasePoint(NamedTuple):
    q: float
    p: float

    def wrapped(self) -> "PhasePoint":
        return PhasePoint(float(wrap(self.q)), float(wrap(self.p)))


def classical_harper_step(pt, k: float, k_prime: float) -> PhasePoint:
    """q' = q + k' sin(2 pi p), then p' = p - k sin(2 pi q'), both mod 1."""
    q, p = pt
    q1 = wrap(q + k_prime * np.sin(TWO_PI * p))
    p1 = wrap(p - k * np.sin(TWO_PI * q1))
    return PhasePoint(q1, p1)


def harper_jacobian(pt, k: float, k_prime: float) -> np.ndarray:
    q, p = pt
    q1 = q + k_prime * math.sin(TWO_PI * p)
    dq_dp = TWO_PI * k_prime * math.cos(TWO_PI * p)
    shear = -TWO_PI * k * math.cos(TWO_PI * q1)
    return np.array([[1.0, dq_dp], [shear, 1.0 + shear * dq_dp]])


def _pcm_force(q, a: float, K: float):
    return a * q + TWO_PI * K * (np.cos(TWO_PI * q) - np.cos(2 * TWO_PI * q))


def classical_pcm_step(pt, a: float, K: float) -> PhasePoint:
    """p' = p + a q + 2 pi K (cos 2 pi q - cos 4 pi q), then q' = q + a p', both mod 1."""
    q, p = pt
    p1 = wrap(p + _pcm_force(q, a, K))
    q1 = wrap(q + a * p1)
    return PhasePoint(q1, p1)


def pcm_jacobian(pt, a: float, K: float) -> np.ndarray:
    q, _ = pt
    g = a + TWO_PI * K * (-TWO_PI * math.sin(TWO_PI * q) + 2 * TWO_PI * math.sin(2 * TWO_PI * q))
    return np.array([[1.0 + a * g, a], [g, 1.0]])


class ClassicalMap(NamedTuple):
    step: Callable
    jacobian: Callable


HARPER = ClassicalMap(classical_harper_step, harper_jacobian)
PCM = ClassicalMap(classical_pcm_step, pcm_jacobian)
CLASSICAL_MAPS = {"harper": HARPER, "pcm": PCM}


def _resolve(cmap) -> ClassicalMap:
    if isinstance(cmap, str):
        try:
            return CLASSICAL_MAPS[cmap]
        except KeyError:
            raise ValidationError(f"unknown classical map {cmap!r}") from None
    return cmap


def tangent_lyapunov(cmap, params: dict, initial, steps: int, transient: int = 100) -> float:
    """Largest Lyapunov exponent by tangent-vector iteration with renormalization.

    The first ``transient`` steps align the tangent vector and are not
    counted; the result is the mean log stretch over the next ``steps``.
    """
    if steps < 100:
        raise ValidationError(f"steps must be >= 100, got {steps}")
    cmap = _resolve(cmap)
    pt = PhasePoint(*initial).wrapped()
    v = np.array([1.0, 1.0]) / math.sqrt(2)
    total = 0.0
    for i in range(transient + steps):
        v = cmap.jacobian(pt, **params) @ v
        pt = PhasePoint(*map(float, cmap.step(pt, **params)))
        norm = math.hypot(v[0], v[1])
        v /= norm
        if i >= transient:
            total += math.log(norm)
    return total / steps


@dataclass
class Orbit:
    q: np.ndarray
    p: np.ndarray
    initial: PhasePoint
    params: dict = field(default_factory=dict)

    @property
    def points(self) -> list[PhasePoint]:
        return [PhasePoint(float(a), float(b)) for a, b in zip(self.q, self.p)]


def phase_portrait(cmap, params: dict, grid, steps: int) -> list[Orbit]:
    """Iterate every initial condition of ``grid`` for ``steps`` steps.

    Each orbit holds steps + 1 points, the initial condition first.
    """
    cmap = _resolve(cmap)
    grid = np.atleast_2d(np.asarray(grid, dtype=np.float64))
    if grid.size == 0:
        raise ValidationError("phase portrait needs at least one initial condition")
    if steps < 0:
        raise ValidationError("steps must be non-negative")
    q = np.empty((steps + 1, grid.shape[0]))
    p = np.empty_like(q)
    q[0], p[0] = wrap(grid[:, 0]), wrap(grid[:, 1])
    for t in range(steps):
        q[t + 1], p[t + 1] = cmap.step((q[t], p[t]), **params)
    return [
        Orbit(q[:, i].copy(), p[:, i].copy(), PhasePoint(float(q[0, i]), float(p[0, i])), dict(params))
        for i in range(grid.shape[0])
    ]


def initial_grid(nq: int, np_: int | None = None) -> np.ndarray:
    """Cell-centred nq x np_ grid of initial conditions on the unit torus."""
    np_ = nq if np_ is None else np_
    qs = (np.arange(nq) + 0.5) / nq
    ps = (np.arange(np_) + 0.5) / np_
    qq, pp = np.meshgrid(qs, ps, indexing="ij")
    return np.column_stack([qq.ravel(), pp.ravel()])


def circular_spread(x: np.ndarray) -> float:
    """Spread of torus coordinates in [0, 1]: 0 for a point, near 1 for uniform."""
    z = np.exp(1j * TWO_PI * np.asarray(x))
    return float(1.0 - abs(z.mean()))
