"""Curvature mass over filled disks and the holonomy/curvature checks.

Every check returns a ``VerificationReport`` whose ``lhs``/``rhs`` are the two
sides of the bound being tested.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import lie
from .amplitude import VerificationReport, amplitude, amplitude_of_transport
from .connection import Connection, curvature_batch
from .errors import FillingMissing, OutOfDisk, RadiusOutOfRange
from .transport import DEFAULT_STEPS, Path, circle_transport

DEFAULT_GRID = (256, 256)
MIN_GRID = (16, 32)
# residual constant for the derivative identity, tol = C (h_r^2 + 1/N^2)
LEMMA_CONSTANT = 10.0


@dataclass(frozen=True, eq=False)
class Surface:
    """C^1 map of the closed unit disk; ``jacobian`` returns (..., m, 2)."""

    point: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray]
    dim: int
    label: str = "surface"

    def boundary(self) -> Path:
        def pt(t):
            t = np.asarray(t, float)
            return self.point(np.stack([np.cos(2 * np.pi * t), np.sin(2 * np.pi * t)], -1))

        def vel(t):
            t = np.asarray(t, float)
            q = np.stack([np.cos(2 * np.pi * t), np.sin(2 * np.pi * t)], -1)
            dq = 2 * np.pi * np.stack([-q[..., 1], q[..., 0]], -1)
            return np.einsum("...ij,...j->...i", self.jacobian(q), dq)

        return Path(pt, vel, self.dim, f"boundary({self.label})")


def linear_disk(matrix, offset=None, label: str = "linear-disk") -> Surface:
    """sigma(q) = offset + M q for a (m, 2) matrix M."""
    mat = np.asarray(matrix, float)
    off = np.zeros(mat.shape[0]) if offset is None else np.asarray(offset, float)

    def point(q):
        return off + np.asarray(q, float) @ mat.T

    def jacobian(q):
        return np.broadcast_to(mat, np.shape(q)[:-1] + mat.shape)

    return Surface(point, jacobian, mat.shape[0], label)


def identity_disk() -> Surface:
    return linear_disk(np.eye(2), label="identity-disk")


def scaled_disk(radius: float, center=(0.0, 0.0)) -> Surface:
    return linear_disk(radius * np.eye(2), center, label=f"disk(r={radius})")


def ellipse_disk(a: float, b: float, center=(0.0, 0.0)) -> Surface:
    return linear_disk(np.diag([a, b]), center, label=f"ellipse(a={a},b={b})")


def polynomial_embedding(coeffs, label: str = "polynomial-embedding") -> Surface:
    """sigma(x, y) = sum c_ij x^i y^j with ``coeffs`` of shape (deg+1, deg+1, m)."""
    c = np.asarray(coeffs, float)
    n = c.shape[0]
    pw = np.arange(n)

    def powers(s):
        return s[..., None] ** pw

    def dpowers(s):
        return np.concatenate([np.zeros(s.shape + (1,)), pw[1:] * s[..., None] ** pw[:-1]], -1)

    def point(q):
        q = np.asarray(q, float)
        return np.einsum("...i,...j,ijm->...m", powers(q[..., 0]), powers(q[..., 1]), c)

    def jacobian(q):
        q = np.asarray(q, float)
        px, py = powers(q[..., 0]), powers(q[..., 1])
        dx = np.einsum("...i,...j,ijm->...m", dpowers(q[..., 0]), py, c)
        dy = np.einsum("...i,...j,ijm->...m", px, dpowers(q[..., 1]), c)
        return np.stack([dx, dy], -1)

    return Surface(point, jacobian, c.shape[2], label)


def pullback_curvature_batch(conn: Connection, surface: Surface, q) -> np.ndarray:
    q = np.asarray(q, float)
    jac = surface.jacobian(q)
    return curvature_batch(conn, surface.point(q), jac[..., 0], jac[..., 1])


def pullback_curvature(conn: Connection, surface: Surface, q) -> lie.AlgebraElement:
    q = np.asarray(q, float)
    if np.linalg.norm(q) >= 1.0:
        raise OutOfDisk(f"{q.tolist()} is not in the open unit disk")
    return lie.AlgebraElement(conn.kind, pullback_curvature_batch(conn, surface, q))


def polar_grid(grid):
    """Midpoint nodes and weights r dr dtheta on the unit disk."""
    n_r, n_t = grid
    if n_r < MIN_GRID[0] or n_t < MIN_GRID[1]:
        raise ValueError(f"polar grid must be at least {MIN_GRID}, got {tuple(grid)}")
    r = (np.arange(n_r) + 0.5) / n_r
    th = 2 * np.pi * (np.arange(n_t) + 0.5) / n_t
    rr, tt = np.meshgrid(r, th, indexing="ij")
    nodes = np.stack([rr * np.cos(tt), rr * np.sin(tt)], -1)
    weights = rr * (1.0 / n_r) * (2 * np.pi / n_t)
    return nodes, weights


def curvature_mass(conn: Connection, surface: Surface, grid=DEFAULT_GRID) -> float:
    """Integral of |sigma^* Omega| over the unit disk (midpoint polar rule)."""
    nodes, weights = polar_grid(grid)
    dens = lie.frobenius(pullback_curvature_batch(conn, surface, nodes))
    return float(np.sum(dens * weights))


def theorem_tolerance(rhs: float) -> float:
    return 1e-5 + 1e-3 * rhs


def check_theorem(conn: Connection, surface: Surface, grid=DEFAULT_GRID, steps: int = DEFAULT_STEPS,
                  scenario: str = "theorem") -> VerificationReport:
    """ampl(boundary loop) <= integral of |sigma^* Omega|."""
    lhs = amplitude(conn, surface.boundary(), steps).value
    rhs = curvature_mass(conn, surface, grid)
    tol = theorem_tolerance(rhs)
    return VerificationReport(scenario, lhs, rhs, tol, lhs <= rhs + tol, rhs - lhs,
                              {"N": steps, "grid": f"{grid[0]}x{grid[1]}"})


def check_corollary_planar(conn: Connection, loop: Path, filling: Optional[Surface],
                           grid=DEFAULT_GRID, steps: int = DEFAULT_STEPS,
                           scenario: str = "corollary") -> VerificationReport:
    """ampl(loop) <= length^2 sup|Omega| / (4 pi), sup taken over the filling's probe grid."""
    if filling is None:
        raise FillingMissing("an explicit filling surface is required")
    t = np.linspace(0.0, 1.0, 257)
    if np.max(np.linalg.norm(filling.boundary()(t) - loop(t), axis=-1)) > 1e-9:
        raise FillingMissing("filling boundary does not trace the loop")
    nodes, _ = polar_grid(grid)
    pts = filling.point(nodes)
    e1, e2 = np.eye(conn.dim)[0], np.eye(conn.dim)[1]
    sup = float(np.max(lie.frobenius(curvature_batch(conn, pts, e1, e2))))
    length = loop.length(steps)
    lhs = amplitude(conn, loop, steps).value
    rhs = length ** 2 * sup / (4 * np.pi)
    tol = theorem_tolerance(rhs)
    return VerificationReport(scenario, lhs, rhs, tol, lhs <= rhs + tol, rhs - lhs,
                              {"N": steps, "grid": f"{grid[0]}x{grid[1]}", "length": length, "sup": sup})


def _check_radius(conn: Connection, r: float, h: float):
    chart = conn.chart
    reach = chart.radius if chart.shape == "ball" else min(chart.half_widths)
    if not (0 < h <= r / 10 and r + h < reach):
        raise RadiusOutOfRange(f"need 0 < h_r <= r/10 and r + h_r < {reach}; got r={r}, h_r={h}")


def _unit_circle_frames(t):
    e = np.stack([np.cos(2 * np.pi * t), np.sin(2 * np.pi * t)], -1)
    ie = np.stack([-e[..., 1], e[..., 0]], -1)
    return e, ie


def check_derivative_lemma(conn: Connection, r: float, steps: int = 8192, h_r: float = 1e-3,
                           scenario: str = "lemma") -> VerificationReport:
    """Radial derivative of the circle holonomy against the transported curvature integral.

    Left side: d/dr g_r(1) + w g_r(1) - g_r(1) w with w = omega_(r,0)[e_1], the
    boundary terms that the integration by parts produces. Right side:
    -/+ 2 pi r int_0^1 g_r(1) g_r(t)^-1 Omega(r e)[e, ie] g_r(t) dt. Both signs
    are reported and the closer one is recorded as ``matched_sign``. The same
    distances for the boundary terms with flipped sign are kept in
    ``diagnostics['flipped_boundary']``.
    """
    _check_radius(conn, r, h_r)
    center = np.asarray(conn.chart.center)
    g_plus = circle_transport(conn, r + h_r, steps).final.mat
    g_minus = circle_transport(conn, r - h_r, steps).final.mat
    res = circle_transport(conn, r, steps)
    g1, gt = res.mats[-1], res.mats
    dg = (g_plus - g_minus) / (2 * h_r)
    w = conn.form(center + np.array([r, 0.0]), np.array([1.0, 0.0]))
    boundary = w @ g1 - g1 @ w
    e, ie = _unit_circle_frames(res.times)
    omega = curvature_batch(conn, center + r * e, e, ie)
    integrand = g1 @ lie.dagger(gt) @ omega @ gt
    integral = 2 * np.pi * r * np.trapezoid(integrand, res.times, axis=0)

    lhs = dg + boundary
    dist = {"+": float(lie.frobenius(lhs - integral)), "-": float(lie.frobenius(lhs + integral))}
    sign = min(dist, key=dist.get)
    flipped = dg - boundary
    tol = LEMMA_CONSTANT * (h_r ** 2 + 1.0 / steps ** 2)
    diag = {
        "N": steps, "h_r": h_r, "matched_sign": sign,
        "residual_plus": dist["+"], "residual_minus": dist["-"],
        "flipped_boundary": {"+": float(lie.frobenius(flipped - integral)),
                             "-": float(lie.frobenius(flipped + integral))},
        "boundary_norm": float(lie.frobenius(boundary)),
    }
    return VerificationReport(scenario, float(lie.frobenius(lhs)), float(lie.frobenius(integral)),
                              tol, dist[sign] <= tol, tol - dist[sign], diag)


def radial_tolerance(h_r: float, steps: int) -> float:
    return 1e-4 + 10 * h_r ** 2 + 100.0 / steps ** 2


def circle_curvature_integral(conn: Connection, r: float, n_theta: int = 512) -> float:
    """r * integral over the circle of |Omega(r e^{i theta})[e, ie]| d theta (midpoint rule)."""
    center = np.asarray(conn.chart.center)
    t = (np.arange(n_theta) + 0.5) / n_theta
    e, ie = _unit_circle_frames(t)
    dens = lie.frobenius(curvature_batch(conn, center + r * e, e, ie))
    return float(r * np.sum(dens) * 2 * np.pi / n_theta)


def check_radial_estimate(conn: Connection, r: float, h_r: float = 1e-3, steps: int = DEFAULT_STEPS,
                          n_theta: int = 512, scenario: str = "radial") -> VerificationReport:
    """|ampl(gamma_{r+h}) - ampl(gamma_{r-h})| / 2h <= r int_S1 |Omega(r e^{i theta})|."""
    _check_radius(conn, r, h_r)
    a_plus = amplitude_of_transport(circle_transport(conn, r + h_r, steps)).value
    a_minus = amplitude_of_transport(circle_transport(conn, r - h_r, steps)).value
    lhs = abs(a_plus - a_minus) / (2 * h_r)
    rhs = circle_curvature_integral(conn, r, n_theta)
    tol = radial_tolerance(h_r, steps)
    return VerificationReport(scenario, lhs, rhs, tol, lhs <= rhs + tol, rhs - lhs,
                              {"N": steps, "grid": str(n_theta), "h_r": h_r})


def sweep_radius(conn: Connection, radii, steps: int = DEFAULT_STEPS, grid=(128, 256)) -> list:
    """Rows (r, ampl(gamma_r), mass of B_r, slack, pass) for increasing radii."""
    radii = np.asarray(radii, float)
    if np.any(np.diff(radii) <= 0):
        raise ValueError("radii must be strictly increasing")
    center = np.asarray(conn.chart.center)
    rows = []
    for r in radii:
        amp = amplitude_of_transport(circle_transport(conn, float(r), steps)).value
        mass = curvature_mass(conn, scaled_disk(float(r), center), grid)
        tol = theorem_tolerance(mass)
        rows.append({"r": float(r), "amplitude": amp, "mass": mass, "slack": mass - amp,
                     "tolerance": tol, "pass": amp <= mass + tol})
    return rows
