"""Connection 1-forms on Euclidean charts, their curvature, and gauge changes.

A connection is stored through its coefficient matrices A_k(p), so that
omega_p[v] = sum_k v_k A_k(p). Every family evaluates on stacks of points;
families with closed-form derivatives also provide dA_k/dx_j, the others fall
back to central differences.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np

from . import lie
from .errors import OutOfChart
from .lie import AlgebraElement, GroupKind

FD_REL_STEP = 1e-5
CHART_TOL = 1e-12


@dataclass(frozen=True)
class Chart:
    """Axis-aligned box (center, half_widths) or ball (center, radius)."""

    shape: str
    center: tuple
    radius: float = 1.0
    half_widths: Optional[tuple] = None

    def __post_init__(self):
        if self.shape not in ("ball", "box"):
            raise ValueError(f"chart shape must be 'ball' or 'box', got {self.shape!r}")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if self.shape == "box":
            hw = self.half_widths
            if hw is None:
                hw = (self.radius,) * len(self.center)
            hw = tuple(float(h) for h in np.broadcast_to(hw, (len(self.center),)))
            object.__setattr__(self, "half_widths", hw)

    @classmethod
    def ball(cls, center, radius) -> "Chart":
        return cls("ball", tuple(center), float(radius))

    @classmethod
    def box(cls, lower, upper) -> "Chart":
        lo, hi = np.asarray(lower, float), np.asarray(upper, float)
        return cls("box", tuple((lo + hi) / 2), half_widths=tuple((hi - lo) / 2))

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def scale(self) -> float:
        return self.radius if self.shape == "ball" else max(self.half_widths)

    @property
    def lower(self) -> np.ndarray:
        return np.asarray(self.center) - np.asarray(self.half_widths)

    @property
    def upper(self) -> np.ndarray:
        return np.asarray(self.center) + np.asarray(self.half_widths)

    def contains(self, points, margin: float = 0.0) -> np.ndarray:
        p = np.asarray(points, float) - np.asarray(self.center)
        slack = CHART_TOL * self.scale - margin
        if self.shape == "ball":
            return np.linalg.norm(p, axis=-1) <= self.radius + slack
        return np.all(np.abs(p) <= np.asarray(self.half_widths) + slack, axis=-1)

    def require(self, points, margin: float = 0.0):
        if not np.all(self.contains(points, margin)):
            bad = np.asarray(points, float).reshape(-1, self.dim)[
                ~self.contains(points, margin).reshape(-1)
            ][0]
            raise OutOfChart(f"point {bad.tolist()} outside {self.shape} chart")


@dataclass(frozen=True, eq=False)
class Connection:
    """A g-valued 1-form on a chart of R^m.

    ``coeffs(P)`` maps points (..., m) to coefficient matrices (..., m, d, d);
    ``dcoeffs(P)``, when present, returns (..., m, m, d, d) with entry [j, k]
    equal to dA_k/dx_j.
    """

    kind: GroupKind
    dim: int
    chart: Chart
    family: str
    coeffs: Callable[[np.ndarray], np.ndarray]
    dcoeffs: Optional[Callable[[np.ndarray], np.ndarray]] = None
    params: Mapping = field(default_factory=dict)

    @property
    def fd_step(self) -> float:
        return FD_REL_STEP * self.chart.scale

    def coefficient_derivatives(self, points: np.ndarray) -> np.ndarray:
        if self.dcoeffs is not None:
            return self.dcoeffs(points)
        h = self.fd_step
        points = np.asarray(points, float)
        out = []
        for j in range(self.dim):
            e = np.zeros(self.dim)
            e[j] = h
            out.append((self.coeffs(points + e) - self.coeffs(points - e)) / (2 * h))
        return np.stack(out, axis=-4)

    def form(self, points, vectors) -> np.ndarray:
        """omega_p[v] for stacks of points and vectors, shape (..., d, d)."""
        a = self.coeffs(np.asarray(points, float))
        return np.einsum("...k,...kab->...ab", np.asarray(vectors, float), a)


# --- algebra-valued polynomials ----------------------------------------------


def monomials(dim: int, degree: int) -> np.ndarray:
    """Exponent vectors of all monomials of total degree <= degree, graded order."""
    exps = [
        e for d in range(degree + 1) for e in itertools.product(range(d + 1), repeat=dim) if sum(e) == d
    ]
    return np.array(exps, dtype=int).reshape(-1, dim)


def _monomial_values(points: np.ndarray, exps: np.ndarray) -> np.ndarray:
    return np.prod(points[..., None, :] ** exps, axis=-1)


def _monomial_gradients(points: np.ndarray, exps: np.ndarray) -> np.ndarray:
    """Shape (..., m, n_monomials): d/dx_j of every monomial."""
    grads = []
    for j in range(exps.shape[1]):
        lowered = exps.copy()
        lowered[:, j] = np.maximum(lowered[:, j] - 1, 0)
        grads.append(exps[:, j] * _monomial_values(points, lowered))
    return np.stack(grads, axis=-2)


# --- registered families ------------------------------------------------------


def _const_field(kind, dim, B=1.0, generator=None, center=None):
    gen = _generator(kind, generator)
    c = np.zeros(dim) if center is None else np.asarray(center, float)
    B = float(B)

    def coeffs(p):
        q = p - c
        scal = np.zeros(p.shape[:-1] + (dim,))
        scal[..., 0] = -0.5 * B * q[..., 1]
        scal[..., 1] = 0.5 * B * q[..., 0]
        return scal[..., None, None] * gen

    d = np.zeros((dim, dim))
    d[1, 0], d[0, 1] = -0.5 * B, 0.5 * B

    def dcoeffs(p):
        return np.broadcast_to(d[..., None, None] * gen, p.shape[:-1] + (dim, dim) + gen.shape)

    return coeffs, dcoeffs


def _generator(kind, coords):
    if coords is None:
        coords = [1.0] if kind.tag == "U1" else [0.0] * (len(lie.algebra_basis(kind)) - 1) + [1.0]
    return lie.from_coords(kind, coords)


def _zero(kind, dim):
    shape = (dim, kind.dim, kind.dim)

    def coeffs(p):
        return np.zeros(p.shape[:-1] + shape, dtype=kind.dtype)

    def dcoeffs(p):
        return np.zeros(p.shape[:-1] + (dim,) + shape, dtype=kind.dtype)

    return coeffs, dcoeffs


def _constant_coefficients(kind, dim, matrices):
    mats = np.asarray(lie.from_coords(kind, matrices))
    if mats.shape[0] != dim:
        raise ValueError(f"constant-coefficients needs {dim} algebra elements")

    def coeffs(p):
        return np.broadcast_to(mats, p.shape[:-1] + mats.shape)

    def dcoeffs(p):
        return np.zeros(p.shape[:-1] + (dim,) + mats.shape, dtype=mats.dtype)

    return coeffs, dcoeffs


def _polynomial(kind, dim, coefficients, degree=2):
    """coefficients[k][i] are algebra coordinates of monomial i in A_k."""
    exps = monomials(dim, degree)
    c = np.asarray(coefficients, float)
    if c.shape[:2] != (dim, len(exps)):
        raise ValueError(f"polynomial coefficients need shape ({dim}, {len(exps)}, basis)")
    mats = lie.from_coords(kind, c)  # (m, n_mon, d, d)

    def coeffs(p):
        return np.einsum("...i,kiab->...kab", _monomial_values(p, exps), mats)

    def dcoeffs(p):
        return np.einsum("...ji,kiab->...jkab", _monomial_gradients(p, exps), mats)

    return coeffs, dcoeffs


def _gaussian_bump(kind, dim, matrices, center=None, width=0.3, amplitude=1.0):
    mats = np.asarray(lie.from_coords(kind, matrices))
    c = np.zeros(dim) if center is None else np.asarray(center, float)
    s2 = float(width) ** 2
    amplitude = float(amplitude)

    def bump(p):
        return amplitude * np.exp(-np.sum((p - c) ** 2, axis=-1) / (2 * s2))

    def coeffs(p):
        return bump(p)[..., None, None, None] * mats

    def dcoeffs(p):
        grad = -(p - c) / s2 * bump(p)[..., None]
        return grad[..., :, None, None, None] * mats

    return coeffs, dcoeffs


def _pure_gauge(kind, dim, gauge=None):
    g = gauge if isinstance(gauge, GaugeField) else exp_product_gauge(kind, dim, **(gauge or {}))

    def coeffs(p):
        return lie.dagger(g.value(p))[..., None, :, :] @ g.differential(p)

    return coeffs, None


FAMILIES = {
    "zero": _zero,
    "constant-field": _const_field,
    "constant-coefficients": _constant_coefficients,
    "polynomial": _polynomial,
    "gaussian-bump": _gaussian_bump,
    "pure-gauge": _pure_gauge,
}


def make_connection(family: str, kind: GroupKind, chart: Chart, **params) -> Connection:
    if family not in FAMILIES:
        raise ValueError(f"unknown connection family {family!r}")
    coeffs, dcoeffs = FAMILIES[family](kind, chart.dim, **params)
    return Connection(kind, chart.dim, chart, family, coeffs, dcoeffs, dict(params))


def random_polynomial(kind: GroupKind, chart: Chart, rng: np.random.Generator, degree: int = 2,
                      scale: float = 1.0) -> Connection:
    """Polynomial connection with coordinates uniform in [-scale, scale]."""
    n_mon = len(monomials(chart.dim, degree))
    n_basis = len(lie.algebra_basis(kind))
    c = rng.uniform(-scale, scale, size=(chart.dim, n_mon, n_basis))
    return make_connection("polynomial", kind, chart, coefficients=c, degree=degree)


# --- evaluation and curvature -------------------------------------------------


def eval_form(conn: Connection, p, v) -> AlgebraElement:
    p = np.asarray(p, float)
    conn.chart.require(p)
    return AlgebraElement(conn.kind, conn.form(p, v))


def curvature_batch(conn: Connection, points, u, v) -> np.ndarray:
    """Omega_p[u, v] = d omega_p[u, v] + [omega_p[u], omega_p[v]] on stacks."""
    points = np.asarray(points, float)
    u = np.broadcast_to(np.asarray(u, float), points.shape)
    v = np.broadcast_to(np.asarray(v, float), points.shape)
    margin = 0.0 if conn.dcoeffs is not None else conn.fd_step
    conn.chart.require(points, margin)
    a = conn.coeffs(points)
    da = conn.coefficient_derivatives(points)
    # d omega[u, v] = sum_jk u_j v_k (dA_k/dx_j - dA_j/dx_k)
    curl = da - np.swapaxes(da, -4, -3)
    d_omega = np.einsum("...j,...k,...jkab->...ab", u, v, curl)
    wu = np.einsum("...k,...kab->...ab", u, a)
    wv = np.einsum("...k,...kab->...ab", v, a)
    return d_omega + wu @ wv - wv @ wu


@dataclass(frozen=True, eq=False)
class CurvatureValue:
    value: AlgebraElement
    point: np.ndarray
    u: np.ndarray
    v: np.ndarray


def curvature(conn: Connection, p, u, v) -> CurvatureValue:
    val = curvature_batch(conn, p, u, v)
    return CurvatureValue(AlgebraElement(conn.kind, val), np.asarray(p, float),
                          np.asarray(u, float), np.asarray(v, float))


# --- gauge fields -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GaugeField:
    """Map p -> g(p) in G with differential; ``differential`` returns (..., m, d, d)."""

    kind: GroupKind
    dim: int
    value: Callable[[np.ndarray], np.ndarray]
    _differential: Optional[Callable[[np.ndarray], np.ndarray]] = None
    fd_step: float = 1e-5
    chart: Optional[Chart] = None

    def differential(self, points) -> np.ndarray:
        points = np.asarray(points, float)
        if self._differential is not None:
            return self._differential(points)
        h = self.fd_step
        out = []
        for j in range(self.dim):
            e = np.zeros(self.dim)
            e[j] = h
            out.append((self.value(points + e) - self.value(points - e)) / (2 * h))
        return np.stack(out, axis=-3)

    def at(self, p) -> lie.GroupElement:
        return lie.GroupElement(self.kind, self.value(np.asarray(p, float)))


def exp_product_gauge(kind: GroupKind, dim: int, generators=None, phases=None,
                      degree: int = 2) -> GaugeField:
    """g(p) = exp(phi_1(p) T_1) ... exp(phi_r(p) T_r) with polynomial phases.

    ``generators`` are algebra coordinates of the T_i; ``phases[i]`` are the
    coefficients of phi_i over ``monomials(dim, degree)``.
    """
    exps = monomials(dim, degree)
    if generators is None:
        generators = np.eye(len(lie.algebra_basis(kind)))
    gens = lie.from_coords(kind, generators)
    ph = np.zeros((len(gens), len(exps))) if phases is None else np.asarray(phases, float)
    if ph.shape != (len(gens), len(exps)):
        raise ValueError(f"phases need shape ({len(gens)}, {len(exps)})")

    def factors(p):
        phi = _monomial_values(p, exps) @ ph.T  # (..., r)
        return [lie.exp_batch(kind, phi[..., i, None, None] * gens[i]) for i in range(len(gens))]

    def value(p):
        out = np.broadcast_to(np.eye(kind.dim, dtype=kind.dtype), p.shape[:-1] + (kind.dim,) * 2)
        for f in factors(p):
            out = out @ f
        return out

    def differential(p):
        fs = factors(p)
        dphi = np.einsum("...ji,ri->...jr", _monomial_gradients(p, exps), ph)  # (..., m, r)
        eye = np.broadcast_to(np.eye(kind.dim, dtype=kind.dtype), p.shape[:-1] + (kind.dim,) * 2)
        prefix = [eye]
        for f in fs:
            prefix.append(prefix[-1] @ f)
        suffix = [eye]
        for f in reversed(fs):
            suffix.append(f @ suffix[-1])
        suffix = suffix[::-1]
        out = 0
        for i, gen in enumerate(gens):
            term = prefix[i] @ (gen @ fs[i]) @ suffix[i + 1]
            out = out + dphi[..., :, i, None, None] * term[..., None, :, :]
        return out

    return GaugeField(kind, dim, value, differential)


def constant_gauge(g: lie.GroupElement, dim: int) -> GaugeField:
    mat = g.mat

    def value(p):
        return np.broadcast_to(mat, np.shape(p)[:-1] + mat.shape)

    def differential(p):
        return np.zeros(np.shape(p)[:-1] + (dim,) + mat.shape, dtype=mat.dtype)

    return GaugeField(g.kind, dim, value, differential)


def gauge_transform(conn: Connection, g: GaugeField) -> Connection:
    """Connection with omega'_p[v] = g^-1 dg_p[v] + g^-1 omega_p[v] g."""
    if g.kind != conn.kind:
        raise ValueError("gauge field and connection live in different groups")
    chart = g.chart if g.chart is not None else conn.chart

    def coeffs(p):
        gv = g.value(p)
        ginv = lie.dagger(gv)[..., None, :, :]
        return ginv @ g.differential(p) + ginv @ conn.coeffs(p) @ gv[..., None, :, :]

    params = {"base": conn.family, **conn.params}
    return Connection(conn.kind, conn.dim, chart, "gauge-transformed", coeffs, None, params)
