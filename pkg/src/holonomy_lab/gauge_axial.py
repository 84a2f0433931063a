"""Axial gauge on a box: a gauge change after which omega[v] vanishes.

g solves dg/ds + omega[v] g = 0 along every grid line parallel to v, starting
from g = id on the face of the box where the v-coordinate is smallest. Node
values are interpolated by tensor cubic splines; the interpolant is projected
back onto G and its differential onto the tangent space, so that the
transformed connection stays algebra-valued.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import NdBSpline, make_interp_spline

from . import lie
from .connection import Chart, Connection, GaugeField, gauge_transform
from .errors import ChartNotBox, DirectionNotUnit

UNIT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class AxialGaugeResult:
    gauge: GaugeField
    direction: np.ndarray
    residual: float
    nodes: tuple  # grid coordinates per axis
    values: np.ndarray  # g at the nodes, shape grid + (d, d)
    connection: Connection  # the transformed connection

    @property
    def grid(self) -> tuple:
        return tuple(len(x) for x in self.nodes)


def axial_residual(conn: Connection, v, probes) -> float:
    """max over probe points of |omega_p[v]|."""
    probes = np.asarray(probes, float)
    v = np.broadcast_to(np.asarray(v, float), probes.shape)
    return float(np.max(lie.frobenius(conn.form(probes, v)), initial=0.0))


def _spline_coefficients(nodes, values):
    c = values
    knots = []
    for ax, x in enumerate(nodes):
        s = make_interp_spline(x, np.moveaxis(c, ax, 0), k=3)
        c = np.moveaxis(s.c, 0, ax)
        knots.append(s.t)
    return tuple(knots), c


def _spline_gauge(kind, chart, nodes, values) -> GaugeField:
    m, d = len(nodes), kind.dim
    flat = values.reshape(values.shape[:m] + (d * d,))
    parts = [flat.real] if kind.dtype is float else [flat.real, flat.imag]
    splines = []
    for part in parts:
        knots, c = _spline_coefficients(nodes, part)
        splines.append(NdBSpline(knots, c, 3))

    def evaluate(points, nu=None):
        pts = points.reshape(-1, m)
        out = [s(pts, nu=nu) for s in splines]
        mat = out[0] if len(out) == 1 else out[0] + 1j * out[1]
        return mat.reshape(points.shape[:-1] + (d, d))

    def raw_value(points):
        chart.require(points)
        return evaluate(np.asarray(points, float))

    def value(points):
        return lie.polar_batch(kind, raw_value(points))

    def differential(points):
        points = np.asarray(points, float)
        s = raw_value(points)
        u = lie.polar_batch(kind, s)
        out = []
        for j in range(m):
            nu = tuple(int(i == j) for i in range(m))
            ds = evaluate(points, nu)
            # tangent part at u: u * skew(u^-1 ds)
            out.append(u @ lie.skew_part(kind, lie.dagger(u) @ ds))
        return np.stack(out, axis=-3)

    return GaugeField(kind, m, value, differential, chart=chart)


def _unit_axis(v, dim):
    v = np.asarray(v, float)
    if v.shape != (dim,) or abs(np.linalg.norm(v) - 1.0) > UNIT_TOL:
        raise DirectionNotUnit(f"direction {v.tolist()} is not a unit vector in R^{dim}")
    axes = np.flatnonzero(np.abs(v) > UNIT_TOL)
    if len(axes) != 1:
        return None, 0.0
    return int(axes[0]), float(np.sign(v[axes[0]]))


def _rotation_to(v):
    """Orthogonal Q with Q e_last = v."""
    m = len(v)
    basis = np.eye(m)
    mat = np.column_stack([v] + [basis[:, i] for i in range(m)])
    q, _ = np.linalg.qr(mat)
    q = q[:, list(range(1, m)) + [0]]
    q[:, -1] *= np.sign(q[:, -1] @ v)
    if np.linalg.det(q) < 0:
        q[:, 0] *= -1
    return q


def _rotated_connection(conn: Connection, q: np.ndarray) -> Connection:
    """The connection in coordinates x = center + Q y, on a box inside the original chart."""
    center = np.asarray(conn.chart.center)
    half = min(conn.chart.half_widths) / np.sqrt(conn.dim)

    def coeffs(y):
        a = conn.coeffs(center + np.asarray(y) @ q.T)
        return np.einsum("kj,...kab->...jab", q, a)

    chart = Chart("box", tuple(np.zeros(conn.dim)), half_widths=(half,) * conn.dim)
    return Connection(conn.kind, conn.dim, chart, "rotated", coeffs, None, {"base": conn.family})


def axial_gauge(conn: Connection, v, grid=64, line_steps=None) -> AxialGaugeResult:
    """Gauge field killing omega[v] on the box chart of ``conn``.

    ``grid`` is the node count per axis; ``line_steps`` the number of
    exponential midpoint steps per line (a multiple of grid - 1, default 4x).
    A direction that is not axis aligned is handled by rotating coordinates so
    that it becomes the last axis, which shrinks the working box to one
    inscribed in the original chart.
    """
    if conn.chart.shape != "box":
        raise ChartNotBox("axial gauge needs a box chart")
    axis, sign = _unit_axis(v, conn.dim)
    if axis is None:
        q = _rotation_to(np.asarray(v, float))
        inner = axial_gauge(_rotated_connection(conn, q), np.eye(conn.dim)[-1], grid, line_steps)
        return _rotate_back(conn, inner, q, np.asarray(v, float))

    kind, m, d = conn.kind, conn.dim, conn.kind.dim
    n = (grid,) * m if np.isscalar(grid) else tuple(grid)
    lo, hi = conn.chart.lower, conn.chart.upper
    nodes = tuple(np.linspace(lo[i], hi[i], n[i]) for i in range(m))
    cells = n[axis] - 1
    line_steps = 4 * cells if line_steps is None else int(line_steps)
    if line_steps % cells:
        raise ValueError(f"line_steps must be a multiple of {cells}")
    sub = line_steps // cells

    # transverse nodes, one line each; s runs along sign * e_axis from the seed face
    trans = [nodes[i] for i in range(m) if i != axis]
    mesh = np.stack(np.meshgrid(*trans, indexing="ij"), -1).reshape(-1, m - 1) if m > 1 else np.zeros((1, 0))
    along = nodes[axis] if sign > 0 else nodes[axis][::-1]
    vvec = np.zeros(m)
    vvec[axis] = sign

    def points_at(s):
        col = np.full((len(mesh), 1), s)
        return np.insert(mesh, axis, col[:, 0], axis=1)

    g = np.broadcast_to(np.eye(d, dtype=kind.dtype), (len(mesh), d, d)).copy()
    line_vals = [g.copy()]
    for k in range(cells):
        ds = (along[k + 1] - along[k]) / sub
        for j in range(sub):
            s_mid = along[k] + (j + 0.5) * ds
            a = conn.form(points_at(s_mid), vvec)
            g = lie.exp_batch(kind, -abs(ds) * a) @ g
        line_vals.append(g.copy())
    vals = np.stack(line_vals, 0)  # (n_axis, lines, d, d), ordered along s
    if sign < 0:
        vals = vals[::-1]
    tshape = tuple(n[i] for i in range(m) if i != axis)
    vals = vals.reshape((n[axis],) + tshape + (d, d))
    vals = np.moveaxis(vals, 0, axis)

    # residual at the nodes from second-order finite differences of g
    # differencing g - id keeps the flat case exactly zero
    dg = sign * np.gradient(vals - np.eye(d), nodes[axis][1] - nodes[axis][0], axis=axis, edge_order=2)
    full = np.stack(np.meshgrid(*nodes, indexing="ij"), -1)
    a_v = conn.form(full, np.broadcast_to(vvec, full.shape))
    residual = float(np.max(lie.frobenius(dg + a_v @ vals)))

    gauge = _spline_gauge(kind, conn.chart, nodes, vals)
    return AxialGaugeResult(gauge, vvec, residual, nodes, vals, gauge_transform(conn, gauge))


def _rotate_back(conn, inner: AxialGaugeResult, q, v) -> AxialGaugeResult:
    center = np.asarray(conn.chart.center)
    g_in = inner.gauge

    def value(x):
        return g_in.value((np.asarray(x, float) - center) @ q)

    def differential(x):
        dy = g_in.differential((np.asarray(x, float) - center) @ q)
        return np.einsum("jk,...kab->...jab", q, dy)

    # the rotated box contains this ball, not any larger axis-aligned region
    chart = Chart.ball(center, min(inner.connection.chart.half_widths))
    gauge = GaugeField(conn.kind, conn.dim, value, differential)
    transformed = gauge_transform(conn, gauge)
    transformed = Connection(transformed.kind, transformed.dim, chart, transformed.family,
                             transformed.coeffs, None, transformed.params)
    return AxialGaugeResult(gauge, v, inner.residual, inner.nodes, inner.values, transformed)
