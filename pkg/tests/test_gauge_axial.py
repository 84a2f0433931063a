import numpy as np
import pytest

from holonomy_lab import lie, transport
from holonomy_lab.amplitude import amplitude
from holonomy_lab.connection import Chart, curvature_batch, make_connection, random_polynomial
from holonomy_lab.errors import ChartNotBox, DirectionNotUnit
from holonomy_lab.gauge_axial import axial_gauge, axial_residual
from holonomy_lab.lie import SU2, U1

BOX = Chart.box((-1.0, -1.0), (1.0, 1.0))
BUNDLED = [[[0.2, 0, 0], [0, 0.1, 0], [0, 0, 0.1]], [[0, 0.2, 0], [0, 0, 0.1], [0.1, 0, 0]]]


def probe_points(n=200, seed=0, half=0.95):
    return np.random.default_rng(seed).uniform(-half, half, (n, 2))


def bundled():
    return make_connection("polynomial", SU2, Chart.box((-0.5, -0.5), (0.5, 0.5)),
                           coefficients=BUNDLED, degree=1)


def test_zero_connection_gives_identity():
    res = axial_gauge(make_connection("zero", SU2, BOX), (0.0, 1.0), 16)
    assert res.residual == 0.0
    assert np.allclose(res.values, np.eye(2))
    assert np.allclose(res.gauge.value(probe_points(10)), np.eye(2))


def test_abelian_field_axial_component_removed():
    conn = make_connection("constant-field", U1, BOX, B=1.0)
    res = axial_gauge(conn, (0.0, 1.0), 64)
    # lines integrate exactly here; the node residual only measures the difference stencil
    assert axial_residual(res.connection, (0.0, 1.0), probe_points()) <= 1e-5


def test_direction_and_chart_errors():
    conn = make_connection("constant-field", U1, BOX, B=1.0)
    with pytest.raises(DirectionNotUnit):
        axial_gauge(conn, (0.0, 2.0), 16)
    with pytest.raises(ChartNotBox):
        axial_gauge(make_connection("constant-field", U1, Chart.ball((0, 0), 1.0), B=1.0), (1.0, 0.0), 16)


def test_axial_residual_sanity():
    conn = make_connection("constant-field", U1, BOX, B=1.0)
    # omega = (B/2)(x dy - y dx): the e_2 component vanishes on the line x = 0
    line = np.stack([np.zeros(20), np.linspace(-0.9, 0.9, 20)], -1)
    assert axial_residual(conn, (0.0, 1.0), line) <= 1e-12
    assert axial_residual(conn, (0.0, 1.0), probe_points()) > 0.1


def test_seed_face_carries_identity():
    res = axial_gauge(random_polynomial(SU2, BOX, np.random.default_rng(1), scale=0.3), (0.0, -1.0), 17)
    assert np.allclose(res.values[:, -1], np.eye(2), atol=0)  # largest y is the minimal -y face


def test_nodes_stay_in_group_and_gauge_is_covariant():
    conn = random_polynomial(SU2, BOX, np.random.default_rng(2), scale=0.3)
    res = axial_gauge(conn, (1.0, 0.0), 64)
    assert np.max(lie.group_deviation(res.values)) < 1e-12
    p = probe_points(100, seed=3)
    assert np.max(lie.group_deviation(res.gauge.value(p))) < 1e-12
    om = lie.frobenius(curvature_batch(conn, p, (1, 0), (0, 1)))
    om2 = lie.frobenius(curvature_batch(res.connection, p, (1, 0), (0, 1)))
    assert np.max(np.abs(om - om2)) < 1e-6
    loop = transport.circle(0.6)
    assert abs(amplitude(conn, loop, 4096).value - amplitude(res.connection, loop, 4096).value) < 1e-6


def test_bundled_scenario_converges_at_second_order():
    residuals = [axial_gauge(bundled(), (0.0, 1.0), n).residual for n in (32, 64, 128)]
    assert residuals[1] <= 1e-5
    ratios = [residuals[i] / residuals[i + 1] for i in range(2)]
    assert all(3.0 <= q <= 5.0 for q in ratios), ratios


def test_oblique_direction():
    conn = random_polynomial(SU2, BOX, np.random.default_rng(4), scale=0.3)
    v = np.array([1.0, 1.0]) / np.sqrt(2)
    res = axial_gauge(conn, v, 64)
    inner = probe_points(100, seed=5, half=0.45)
    assert axial_residual(res.connection, v, inner) < 1e-4
    assert axial_residual(conn, v, inner) > 1e-2


def test_circle_boundary_terms_in_axial_gauge():
    # The lemma's boundary terms pair omega at (r, 0) with e_1, the direction of
    # the radial derivative. A gauge axial in e_2 kills omega(r, 0)[e_2] only;
    # the e_1 gauge is the one that makes the boundary terms vanish.
    conn = random_polynomial(SU2, BOX, np.random.default_rng(6), scale=0.3)
    r = 0.5
    p = np.array([r, 0.0])
    e1, e2 = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    along_e2 = axial_gauge(conn, e2, 64).connection
    assert lie.algebra_norm(along_e2.form(p, e2)) <= 1e-5
    assert lie.algebra_norm(along_e2.form(p, e1)) > 1e-2
    along_e1 = axial_gauge(conn, e1, 64).connection
    w = along_e1.form(p, e1)
    g = transport.circle_transport(along_e1, r, 2048).final.mat
    assert lie.algebra_norm(w) <= 1e-5
    assert lie.frobenius(w @ g - g @ w) <= 1e-5
