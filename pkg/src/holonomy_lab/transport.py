"""Parallel transport along C^1 paths by the exponential midpoint rule.

Each step multiplies by exp(-dt * omega_mid[gamma'_mid]), so iterates stay in
the group up to the roundoff of the closed-form exponentials.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import lie
from .connection import Connection
from .errors import (EndpointMismatch, PathNotClosed, RadiusOutOfRange,
                     StepCountTooSmall)
from .lie import GroupElement

CLOSED_TOL = 1e-12
MIN_STEPS = 8
DEFAULT_STEPS = 4096


@dataclass(frozen=True, eq=False)
class Path:
    """C^1 curve on [0, 1]; ``point`` and ``velocity`` accept arrays of times."""

    point: Callable[[np.ndarray], np.ndarray]
    velocity: Callable[[np.ndarray], np.ndarray]
    dim: int
    label: str = "path"

    def __call__(self, t):
        return self.point(np.asarray(t, float))

    @property
    def start(self) -> np.ndarray:
        return self.point(np.array(0.0))

    @property
    def end(self) -> np.ndarray:
        return self.point(np.array(1.0))

    @property
    def closed(self) -> bool:
        return bool(np.linalg.norm(self.start - self.end) <= CLOSED_TOL)

    def length(self, n: int = 4096) -> float:
        t = (np.arange(n) + 0.5) / n
        return float(np.sum(np.linalg.norm(self.velocity(t), axis=-1)) / n)


def circle(radius: float, center=(0.0, 0.0), turns: int = 1) -> Path:
    """t -> center + r (cos 2 pi k t, sin 2 pi k t)."""
    c = np.asarray(center, float)
    w = 2 * np.pi * turns

    def point(t):
        t = np.asarray(t, float)
        return c + radius * np.stack([np.cos(w * t), np.sin(w * t)], -1)

    def velocity(t):
        t = np.asarray(t, float)
        return radius * w * np.stack([-np.sin(w * t), np.cos(w * t)], -1)

    return Path(point, velocity, 2, f"circle(r={radius})")


def ellipse(a: float, b: float, center=(0.0, 0.0)) -> Path:
    c = np.asarray(center, float)
    w = 2 * np.pi

    def point(t):
        t = np.asarray(t, float)
        return c + np.stack([a * np.cos(w * t), b * np.sin(w * t)], -1)

    def velocity(t):
        t = np.asarray(t, float)
        return w * np.stack([-a * np.sin(w * t), b * np.cos(w * t)], -1)

    return Path(point, velocity, 2, f"ellipse(a={a},b={b})")


def segment(p0, p1) -> Path:
    p0, p1 = np.asarray(p0, float), np.asarray(p1, float)

    def point(t):
        return p0 + np.asarray(t, float)[..., None] * (p1 - p0)

    def velocity(t):
        return np.broadcast_to(p1 - p0, np.shape(t) + p0.shape)

    return Path(point, velocity, len(p0), "segment")


def constant(p) -> Path:
    p = np.asarray(p, float)

    def point(t):
        return np.broadcast_to(p, np.shape(t) + p.shape)

    def velocity(t):
        return np.zeros(np.shape(t) + p.shape)

    return Path(point, velocity, len(p), "constant")


def polynomial(coeffs) -> Path:
    """t -> sum_k c_k t^k with ``coeffs`` of shape (degree + 1, m)."""
    c = np.asarray(coeffs, float)
    powers = np.arange(len(c))

    def point(t):
        t = np.asarray(t, float)
        return (t[..., None] ** powers) @ c

    def velocity(t):
        t = np.asarray(t, float)
        return (powers[1:] * t[..., None] ** powers[:-1]) @ c[1:]

    return Path(point, velocity, c.shape[1], "polynomial")


def sampled(points, times=None) -> Path:
    """Piecewise-linear interpolation of samples; velocity from finite differences."""
    pts = np.asarray(points, float)
    ts = np.linspace(0.0, 1.0, len(pts)) if times is None else np.asarray(times, float)
    vel = np.gradient(pts, ts, axis=0)

    def interp(values, t):
        t = np.asarray(t, float)
        return np.stack([np.interp(t, ts, values[:, j]) for j in range(values.shape[1])], -1)

    return Path(lambda t: interp(pts, t), lambda t: interp(vel, t), pts.shape[1], "sampled")


def reparametrize(path: Path, phi: Callable, dphi: Callable) -> Path:
    """t -> path(phi(t)) for an increasing phi with phi(0) = 0, phi(1) = 1."""

    def point(t):
        return path.point(phi(np.asarray(t, float)))

    def velocity(t):
        t = np.asarray(t, float)
        return path.velocity(phi(t)) * np.asarray(dphi(t))[..., None]

    return Path(point, velocity, path.dim, f"{path.label}∘phi")


def reverse(path: Path) -> Path:
    return Path(lambda t: path.point(1.0 - np.asarray(t, float)),
                lambda t: -path.velocity(1.0 - np.asarray(t, float)),
                path.dim, f"rev({path.label})")


def concatenate(first: Path, second: Path) -> Path:
    """first on [0, 1/2], then second on [1/2, 1], both at double speed."""
    if np.linalg.norm(first.end - second.start) > CLOSED_TOL:
        raise EndpointMismatch(f"{first.label} ends at {first.end}, {second.label} starts at {second.start}")

    def pick(f1, f2, t):
        t = np.asarray(t, float)
        lo = t <= 0.5
        a = f1(np.clip(2 * t, 0.0, 1.0))
        b = f2(np.clip(2 * t - 1, 0.0, 1.0))
        return np.where(lo[..., None], a, b)

    return Path(lambda t: pick(first.point, second.point, t),
                lambda t: 2 * pick(first.velocity, second.velocity, t),
                first.dim, f"{first.label}·{second.label}")


@dataclass(frozen=True, eq=False)
class TransportResult:
    kind: lie.GroupKind
    times: np.ndarray
    mats: np.ndarray  # (N + 1, d, d)
    drift: float
    steps: int

    @property
    def final(self) -> GroupElement:
        return GroupElement(self.kind, self.mats[-1])

    def sample(self, k: int) -> GroupElement:
        return GroupElement(self.kind, self.mats[k])


def _check_steps(steps):
    if steps < MIN_STEPS:
        raise StepCountTooSmall(f"need at least {MIN_STEPS} steps, got {steps}")


def step_generators(conn: Connection, path: Path, steps: int) -> np.ndarray:
    """omega[gamma'] at the step midpoints, shape (N, d, d)."""
    _check_steps(steps)
    t_mid = (np.arange(steps) + 0.5) / steps
    t_all = np.linspace(0.0, 1.0, steps + 1)
    conn.chart.require(path.point(t_all))
    return conn.form(path.point(t_mid), path.velocity(t_mid))


def _accumulate(kind, factors):
    n, d = factors.shape[0], factors.shape[-1]
    mats = np.empty((n + 1, d, d), dtype=kind.dtype)
    mats[0] = np.eye(d)
    p = mats[0]
    for k in range(n):
        p = factors[k] @ p
        mats[k + 1] = p
    return mats


def parallel_transport(conn: Connection, path: Path, steps: int = DEFAULT_STEPS) -> TransportResult:
    """Solve Pt' + omega[gamma'] Pt = 0, Pt(0) = id, on a uniform grid of ``steps``."""
    gens = step_generators(conn, path, steps)
    factors = lie.exp_batch(conn.kind, -gens / steps)
    mats = _accumulate(conn.kind, factors)
    drift = float(np.max(lie.group_deviation(mats)))
    if drift > lie.GROUP_TOL:
        mats = lie.polar_batch(conn.kind, mats)
    return TransportResult(conn.kind, np.linspace(0.0, 1.0, steps + 1), mats, drift, steps)


def holonomy(conn: Connection, loop: Path, steps: int = DEFAULT_STEPS) -> GroupElement:
    if not loop.closed:
        raise PathNotClosed(f"{loop.label} is not closed")
    return parallel_transport(conn, loop, steps).final


def circle_transport(conn: Connection, r: float, steps: int = DEFAULT_STEPS) -> TransportResult:
    """Transport g_r along the circle of radius r about the chart center, based at (r, 0)."""
    chart = conn.chart
    if conn.dim != 2:
        raise ValueError("circle transport needs a planar chart")
    reach = chart.radius if chart.shape == "ball" else min(chart.half_widths)
    if not 0 < r < reach:
        raise RadiusOutOfRange(f"radius {r} not in (0, {reach})")
    return parallel_transport(conn, circle(r, chart.center), steps)


def rk4_transport(conn: Connection, path: Path, steps: int = DEFAULT_STEPS) -> TransportResult:
    """Classical fourth-order Runge-Kutta on the matrix ODE, projected back onto G.

    Kept as an independent reference for the exponential midpoint scheme.
    """
    _check_steps(steps)
    kind, d = conn.kind, conn.kind.dim
    dt = 1.0 / steps
    t = np.linspace(0.0, 1.0, 2 * steps + 1)
    conn.chart.require(path.point(t))
    a = conn.form(path.point(t), path.velocity(t))  # values at every half step
    mats = np.empty((steps + 1, d, d), dtype=kind.dtype)
    mats[0] = np.eye(d)
    y = mats[0]
    drift = 0.0
    for k in range(steps):
        a0, am, a1 = a[2 * k], a[2 * k + 1], a[2 * k + 2]
        k1 = -a0 @ y
        k2 = -am @ (y + 0.5 * dt * k1)
        k3 = -am @ (y + 0.5 * dt * k2)
        k4 = -a1 @ (y + dt * k3)
        y = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        drift = max(drift, float(lie.group_deviation(y)))
        y = lie.polar_batch(kind, y)
        mats[k + 1] = y
    return TransportResult(kind, np.linspace(0.0, 1.0, steps + 1), mats, drift, steps)
