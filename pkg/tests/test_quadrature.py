"""Quadrature rules on the sphere and radial shells.

Oracles: exact moments of sigma, the geometric-series value of the p=2
Cauchy-kernel norm, and the normalized volume of the ball.
"""

import numpy as np
import pytest

from revcarleson.geometry import CarlesonWindow, NonisotropicBall, SpherePoint
from revcarleson.quadrature import (RadialRule, SphereGrid, integrate_sphere,
                                    integrate_window, radial_rule, refine,
                                    sphere_grid)


@pytest.mark.parametrize("d,res", [(1, 512), (2, 12), (3, 50000)])
def test_weights_normalized(d, res):
    g = sphere_grid(d, res, seed=0)
    assert float(g.weights.sum()) == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(np.linalg.norm(g.nodes, axis=1), 1.0, atol=1e-12)


@pytest.mark.parametrize("d,res,tol", [(1, 256, 1e-12), (2, 12, 1e-10),
                                       (3, 200000, 5e-3)])
def test_first_coordinate_moment(d, res, tol):
    # int |zeta_1|^2 dsigma = 1/d  (coordinates of a uniform point on S^{2d-1})
    g = sphere_grid(d, res, seed=1)
    m = integrate_sphere(lambda z: np.abs(z[:, 0]) ** 2, g)
    assert float(np.real(m)) == pytest.approx(1.0 / d, abs=tol)


def test_holomorphic_mean_value(torus_grid):
    # int <zeta, e1> dsigma = 0 by symmetry
    m = integrate_sphere(lambda z: z[:, 0], torus_grid)
    assert abs(m) < 1e-12


def test_geometric_series_oracle(circle_grid):
    """int 1/|1 - a zeta|^2 dsigma = sum a^{2n} = 1/(1-a^2) for d=1."""
    a = 0.5
    val = integrate_sphere(
        lambda z: 1.0 / np.abs(1.0 - a * z[:, 0]) ** 2, circle_grid)
    assert float(np.real(val)) == pytest.approx(4.0 / 3.0, rel=1e-12)


def test_torus_rule_kernel_norm_d2(torus_grid):
    # int 1/|1 - a zeta_1|^4 dsigma = sum (n+1) a^{2n} = 1/(1-a^2)^2 for d=2
    a = 0.4
    val = integrate_sphere(
        lambda z: 1.0 / np.abs(1.0 - a * z[:, 0]) ** 4, torus_grid)
    # 16 phase nodes alias the a^{2n} tail at n = 16, hence the loose tol
    assert float(np.real(val)) == pytest.approx(1.0 / (1 - a * a) ** 2,
                                                rel=1e-5)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_radial_rule_integrates_volume(d):
    # the Jacobian 2d r^{2d-1} is baked into the weights; full depth gives 1
    rule = radial_rule(d, 40)
    assert float(rule.weights.sum()) == pytest.approx(1.0, abs=1e-10)
    assert np.all(np.diff(rule.nodes) > 0)


def test_radial_rule_partial_depth():
    # shell 1-h <= r < 1 has volume 1 - (1-h)^{2d}
    h = 0.25
    rule = radial_rule(2, 40, depth=h)
    assert float(rule.weights.sum()) == pytest.approx(1 - (1 - h) ** 4,
                                                      rel=1e-10)
    assert rule.nodes.min() >= 1 - h - 1e-12


def test_refine_doubles_resolution(circle_grid):
    g2 = refine(circle_grid)
    assert isinstance(g2, SphereGrid)
    assert g2.resolution == 2 * circle_grid.resolution
    assert g2.scheme == circle_grid.scheme


def test_refine_radial():
    r = radial_rule(1, 8)
    r2 = refine(r)
    assert isinstance(r2, RadialRule)
    assert len(r2.nodes) == 2 * len(r.nodes)


def test_monte_carlo_seeded_reproducible():
    a = sphere_grid(3, 4096, seed=9)
    b = sphere_grid(3, 4096, seed=9)
    assert np.array_equal(a.nodes, b.nodes)
    c = sphere_grid(3, 4096, seed=10)
    assert not np.array_equal(a.nodes, c.nodes)


def test_integrate_window_full_depth_equals_ball_integral(circle_grid):
    # window of depth 1 over the whole sphere is the whole ball
    Q = NonisotropicBall(SpherePoint(np.array([1.0 + 0j])), 2.0)
    S = CarlesonWindow(Q, 1.0)
    rad = radial_rule(1, 32)
    val = integrate_window(lambda z: np.ones(len(z)), S, circle_grid, rad)
    assert float(np.real(val)) == pytest.approx(1.0, rel=1e-8)


def test_integrate_window_shell_mass(circle_grid):
    Q = NonisotropicBall(SpherePoint(np.array([1.0 + 0j])), 0.5)
    h = 0.1
    S = CarlesonWindow(Q, h)
    rad = radial_rule(1, 32, depth=h)
    val = float(np.real(integrate_window(
        lambda z: np.ones(len(z)), S, circle_grid, rad)))
    # product of cap mass and shell volume, up to grid quantization of the cap
    expect = (2 / np.pi) * np.arcsin(0.25) * (1 - (1 - h) ** 2)
    assert val == pytest.approx(expect, rel=5e-3)


def test_integrate_sphere_rejects_nonfinite(circle_grid):
    with pytest.raises(ArithmeticError), np.errstate(divide="ignore"):
        integrate_sphere(lambda z: 1.0 / np.abs(1.0 - z[:, 0]), circle_grid)
