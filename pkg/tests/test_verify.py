import numpy as np
import pytest

from holonomy_lab import lie, transport, verify
from holonomy_lab.connection import Chart, make_connection, random_polynomial
from holonomy_lab.errors import FillingMissing, OutOfDisk, RadiusOutOfRange
from holonomy_lab.lie import SU2, U1

BALL = Chart.ball((0.0, 0.0), 1.5)
XY = [[0.5, 0.0, 0.0], [0.0, 0.5, 0.0]]


def field(B=1.0, chart=BALL):
    return make_connection("constant-field", U1, chart, B=B)


def test_pullback_curvature_examples():
    disk = verify.identity_disk()
    q = np.array([0.3, -0.4])
    assert lie.algebra_norm(verify.pullback_curvature(make_connection("zero", SU2, BALL), disk, q)) == 0.0
    assert abs(verify.pullback_curvature(field(2.0), disk, q).mat[0, 0] - 2.0j) < 1e-12
    conn = random_polynomial(SU2, BALL, np.random.default_rng(0))
    base = verify.pullback_curvature_batch(conn, disk, 1.3 * q)
    scaled = verify.pullback_curvature_batch(conn, verify.scaled_disk(1.3), q)
    assert np.max(np.abs(scaled - 1.3 ** 2 * base)) < 1e-12
    with pytest.raises(OutOfDisk):
        verify.pullback_curvature(field(), disk, (1.0, 0.0))


def test_curvature_mass_examples():
    disk = verify.identity_disk()
    assert verify.curvature_mass(make_connection("zero", SU2, BALL), disk, (16, 32)) == 0.0
    assert abs(verify.curvature_mass(field(1.0), disk, (256, 256)) - np.pi) < 1e-6
    conn = make_connection("constant-coefficients", SU2, BALL, matrices=XY)
    x, y = conn.coeffs(np.zeros(2))
    expected = lie.algebra_norm(x @ y - y @ x) * np.pi
    assert abs(verify.curvature_mass(conn, disk, (64, 128)) - expected) < 1e-5


def test_polar_grid_floor():
    with pytest.raises(ValueError):
        verify.polar_grid((8, 32))


def test_quadrature_converges_at_second_order():
    conn = random_polynomial(SU2, BALL, np.random.default_rng(1))
    disk = verify.identity_disk()
    m = [verify.curvature_mass(conn, disk, (n, 2 * n)) for n in (16, 32, 64, 128)]
    diffs = np.abs(np.diff(m))
    assert np.all(diffs[:-1] / diffs[1:] > 3.0)


def test_mass_nondecreasing_in_radius():
    conn = random_polynomial(SU2, BALL, np.random.default_rng(2))
    masses = [verify.curvature_mass(conn, verify.scaled_disk(r), (64, 128)) for r in np.linspace(0.1, 1.4, 8)]
    assert np.all(np.diff(masses) >= 0)


def test_theorem_examples():
    rep = verify.check_theorem(make_connection("zero", SU2, BALL), verify.identity_disk(), (16, 32), 64)
    assert rep.passed and rep.lhs == 0.0 and rep.rhs == 0.0
    for B in (0.5, 1.0, 3.0):
        rep = verify.check_theorem(field(B), verify.identity_disk(), (256, 256), 4096)
        assert rep.passed and abs(rep.lhs - B * np.pi) < 1e-5 and abs(rep.rhs - B * np.pi) < 1e-5


def test_theorem_on_curved_embedding():
    # a genuinely nonlinear C^1 filling of a deformed circle
    coeffs = np.zeros((3, 3, 2))
    coeffs[1, 0] = [0.8, 0.1]
    coeffs[0, 1] = [-0.1, 0.7]
    coeffs[2, 0] = [0.0, 0.2]
    coeffs[1, 1] = [0.15, 0.0]
    surface = verify.polynomial_embedding(coeffs)
    conn = random_polynomial(SU2, BALL, np.random.default_rng(3))
    rep = verify.check_theorem(conn, surface, (64, 128), 2048)
    assert rep.passed and rep.slack > 0


def test_corollary_examples():
    r = 0.8
    rep = verify.check_corollary_planar(field(1.0), transport.circle(r), verify.scaled_disk(r), (64, 128), 4096)
    assert rep.passed and abs(rep.lhs - np.pi * r * r) < 1e-5 and abs(rep.rhs - np.pi * r * r) < 1e-5
    rep = verify.check_corollary_planar(field(1.0), transport.ellipse(1.0, 0.5),
                                        verify.ellipse_disk(1.0, 0.5), (64, 128), 4096)
    assert rep.passed and rep.slack >= 0.1 * rep.rhs
    assert abs(rep.lhs - np.pi * 0.5) < 1e-7
    rep = verify.check_corollary_planar(make_connection("zero", U1, BALL), transport.circle(r),
                                        verify.scaled_disk(r), (16, 32), 64)
    assert rep.passed and rep.lhs == 0.0 and rep.rhs == 0.0


def test_corollary_requires_matching_filling():
    with pytest.raises(FillingMissing):
        verify.check_corollary_planar(field(), transport.circle(0.5), None)
    with pytest.raises(FillingMissing):
        verify.check_corollary_planar(field(), transport.circle(0.5), verify.scaled_disk(0.4))


def test_lemma_zero_family():
    rep = verify.check_derivative_lemma(make_connection("zero", SU2, BALL), 0.5, 1024, 1e-3)
    assert rep.lhs == 0.0 and rep.rhs == 0.0 and rep.passed


def test_lemma_abelian_selects_minus_branch():
    rep = verify.check_derivative_lemma(field(0.25), 0.25, 8192, 1e-4)
    assert rep.diagnostics["matched_sign"] == "-"
    assert rep.diagnostics["residual_minus"] <= 1e-8
    assert rep.diagnostics["residual_plus"] > 0.1


def test_lemma_abelian_closed_form_derivative():
    B, r, h = 0.25, 0.25, 1e-4
    g = lambda s: verify.circle_transport(field(B), s, 8192).final.scalar
    exact = -2j * np.pi * r * B * np.exp(-1j * B * np.pi * r * r)
    assert abs((g(r + h) - g(r - h)) / (2 * h) - exact) < 1e-8


def test_lemma_su2_constant_coefficients():
    conn = make_connection("constant-coefficients", SU2, BALL, matrices=XY)
    rep = verify.check_derivative_lemma(conn, 0.5, 8192, 1e-3)
    assert rep.passed and rep.diagnostics["matched_sign"] == "-"
    assert min(rep.diagnostics["residual_plus"], rep.diagnostics["residual_minus"]) <= 1e-5


def test_lemma_literal_boundary_sign_does_not_hold():
    conn = make_connection("constant-coefficients", SU2, BALL, matrices=XY)
    rep = verify.check_derivative_lemma(conn, 0.5, 8192, 1e-3)
    assert rep.diagnostics["boundary_norm"] > 0.1
    assert min(rep.diagnostics["flipped_boundary"].values()) > 100 * rep.tolerance


def test_lemma_radius_checks():
    with pytest.raises(RadiusOutOfRange):
        verify.check_derivative_lemma(field(), 1.49, 256, 0.02)
    with pytest.raises(RadiusOutOfRange):
        verify.check_derivative_lemma(field(), 0.1, 256, 0.05)


def test_radial_examples():
    rep = verify.check_radial_estimate(make_connection("zero", SU2, BALL), 0.5, 1e-3, 256)
    assert rep.passed and rep.lhs == 0.0
    rep = verify.check_radial_estimate(field(1.0), 0.5, 1e-3, 4096)
    assert abs(rep.lhs - np.pi) <= 1e-4 and abs(rep.rhs - np.pi) <= 1e-4 and rep.passed


def test_sweep_examples():
    rows = verify.sweep_radius(make_connection("zero", SU2, BALL), [0.2, 0.5], 256, (16, 32))
    assert all(row["amplitude"] == 0.0 and row["mass"] == 0.0 for row in rows)
    rows = verify.sweep_radius(field(1.0), [0.2, 0.6, 1.0], 4096, (128, 256))
    for row in rows:
        assert abs(row["amplitude"] - np.pi * row["r"] ** 2) < 1e-9
        assert abs(row["slack"]) < 1e-6
    bump = make_connection("gaussian-bump", SU2, BALL, matrices=[[1, 0, 0], [0, 1, 0]], width=0.3, amplitude=2.0)
    rows = verify.sweep_radius(bump, np.linspace(0.1, 1.3, 9), 4096, (64, 128))
    assert all(row["pass"] for row in rows)
    with pytest.raises(ValueError):
        verify.sweep_radius(bump, [0.5, 0.2])
