"""Quadrature grids, induced sphere geometry, and surface integrals."""

import numpy as np
import pytest

from ahmass import (
    AdSSchwarzschild,
    Hyperbolic,
    MinkowskiVector,
    PerturbedRound,
    QuadratureGrid,
    SurfaceSample,
    brioschi_curvature,
    coordinate_sphere,
    decay_order,
    embeddability_check,
    integrate_scalar,
    integrate_vector,
    surface_laplacian,
)

GRID = QuadratureGrid(32, 4)


def round_sample(radius_sinh, grid, eps=0.1):
    """Exactly round sample E = sinh^2 R, G = sinh^2 R sin^2 theta."""
    e = np.full(grid.shape, radius_sinh ** 2)
    g = radius_sinh ** 2 * (np.sin(grid.theta) ** 2)[:, None] * np.ones((1, grid.n_phi))
    h = np.full(grid.shape, 2.0 * np.sqrt(1.0 + radius_sinh ** 2) / radius_sinh)
    k = np.full(grid.shape, 1.0 / radius_sinh ** 2)
    return SurfaceSample(eps, e, np.zeros(grid.shape), g, h, k, grid)


def test_round_measure_total():
    ones = np.ones(GRID.shape)
    assert abs(GRID.integrate_round(ones) - 4.0 * np.pi) < 1e-13 * 4.0 * np.pi


def test_quadrature_polynomial_exactness():
    # Gauss-Legendre in cos(theta) is exact through degree 2 n_theta - 1
    x = np.cos(GRID.theta)[:, None] * np.ones((1, GRID.n_phi))
    for k in range(0, 2 * GRID.n_theta, 7):
        got = GRID.integrate_round(x ** k)
        want = 0.0 if k % 2 else 4.0 * np.pi / (k + 1)
        assert abs(got - want) < 1e-13 * (1.0 + abs(want))


def test_hyperbolic_sphere_closed_forms():
    for eps in (0.05, 0.2, 0.4):
        s = coordinate_sphere(Hyperbolic(), eps, GRID)
        assert np.max(np.abs(s.H - 2.0 * np.cosh(eps))) < 1e-10
        assert np.max(np.abs(s.K - np.sinh(eps) ** 2)) < 1e-10
        area = 4.0 * np.pi / np.sinh(eps) ** 2
        assert abs(s.area - area) < 1e-10 * area
        assert np.max(np.abs(s.F)) == 0.0


def test_area_element_round():
    eps = 0.25
    s = coordinate_sphere(Hyperbolic(), eps, GRID)
    want = (np.sin(GRID.theta)[:, None] / np.sinh(eps) ** 2) * np.ones((1, GRID.n_phi))
    assert np.max(np.abs(s.sqrt_det - want)) < 1e-13 / np.sinh(eps) ** 2


def test_odd_field_integrates_to_zero():
    s = round_sample(1.0, GRID)
    w3 = np.cos(GRID.theta)[:, None] * np.ones((1, GRID.n_phi))
    assert abs(integrate_scalar(s, w3)) < 1e-13 * s.area


def test_integrate_vector_constant_and_position():
    s = round_sample(1.0, GRID)
    v = integrate_vector(s, np.broadcast_to(np.array([0.5, -1.0, 2.0, 3.0]), GRID.shape + (4,)))
    assert np.max(np.abs(v.as_array() - s.area * np.array([0.5, -1.0, 2.0, 3.0]))) < 1e-12 * s.area
    th, ph = GRID.theta_mesh, GRID.phi_mesh
    omega = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=-1)
    field = np.concatenate([omega, np.ones(GRID.shape + (1,))], axis=-1)
    v = integrate_vector(s, field)
    assert np.max(np.abs(v.spatial)) < 1e-13 * s.area
    assert v.t == pytest.approx(s.area, rel=1e-13)


def test_reference_difference_vanishes_on_hyperbolic():
    eps = 0.2
    s = coordinate_sphere(Hyperbolic(), eps, GRID)
    th, ph = GRID.theta_mesh, GRID.phi_mesh
    omega = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=-1)
    x = np.concatenate([omega / np.sinh(eps), np.full(GRID.shape + (1,), np.cosh(eps) / np.sinh(eps))], axis=-1)
    integrand = (2.0 * np.cosh(eps) - s.H)[..., None] * x
    v = integrate_vector(s, integrand)
    assert np.max(np.abs(v.as_array())) < 1e-10


def test_embeddability_check():
    assert embeddability_check(coordinate_sphere(Hyperbolic(), 0.1, GRID))
    assert embeddability_check(coordinate_sphere(PerturbedRound(lambda t: 0.1 * np.cos(t)), 0.2, GRID))
    s = round_sample(1.0, GRID)
    flat = SurfaceSample(0.1, s.E, s.F, s.G, s.H, np.full(GRID.shape, -1.0), GRID)
    assert not embeddability_check(flat)


def test_brioschi_round_metric():
    for rs in (0.5, 1.3, 4.0):
        s = round_sample(rs, GRID)
        k = brioschi_curvature(s.E, s.F, s.G, GRID)
        assert np.max(np.abs(k - 1.0 / rs ** 2)) < 1e-9 * (1.0 + 1.0 / rs ** 2)


def test_surface_K_matches_brioschi():
    s = coordinate_sphere(PerturbedRound(lambda t: 0.1 * np.cos(t)), 0.15, GRID)
    k = brioschi_curvature(s.E, s.F, s.G, GRID)
    assert np.max(np.abs(k - s.K)) < 1e-12 * (1.0 + np.max(np.abs(s.K)))


def test_perturbed_round_sample_properties():
    s = coordinate_sphere(PerturbedRound(lambda t: 0.1 * np.cos(t)), 0.1, GRID)
    assert np.max(np.abs(s.F)) == 0.0
    assert np.min(s.K) > -1.0
    assert np.min(s.E) > 0.0 and np.min(s.E * s.G - s.F ** 2) > 0.0


@pytest.mark.parametrize("family,psi_scale", [
    (AdSSchwarzschild(1.0), None),
    (PerturbedRound(lambda t: 0.1 * np.cos(t)), 0.1),
])
def test_mean_curvature_cubic_coefficient(family, psi_scale):
    # (2 cosh eps - H)/eps^3 approaches the trace coefficient of the aspect
    eps = 0.025
    s = coordinate_sphere(family, eps, GRID)
    psi = family.aspect_function()(GRID.theta)[:, None] * np.ones((1, GRID.n_phi))
    resid = np.max(np.abs((2.0 * np.cosh(eps) - s.H) / eps ** 3 - psi))
    assert resid < 0.02 * (1.0 + np.max(np.abs(psi)))


def test_gauss_curvature_expansion_order():
    eps_list = list(np.geomspace(0.2, 0.04, 6))
    vals = []
    for eps in eps_list:
        s = coordinate_sphere(AdSSchwarzschild(1.0), eps, GRID)
        vals.append(np.max(np.abs(s.K - np.sinh(eps) ** 2)))
    assert decay_order(vals, eps_list) >= 4.5


def test_area_growth_toward_round():
    eps_list = np.geomspace(0.2, 0.05, 6)
    vals = [coordinate_sphere(Hyperbolic(), e, GRID).area * e ** 2 for e in eps_list]
    # second order approach to the unit-sphere area
    slope = np.polyfit(np.log(eps_list), np.log(np.abs(np.array(vals) - 4.0 * np.pi)), 1)[0]
    assert abs(vals[-1] - 4.0 * np.pi) < 2e-3 * 4.0 * np.pi
    assert 1.8 < slope < 2.2


def test_surface_laplacian_divergence_free():
    s = coordinate_sphere(PerturbedRound(lambda t: 0.1 * np.cos(t)), 0.2, GRID)
    th, ph = GRID.theta_mesh, GRID.phi_mesh
    for field in (np.exp(np.cos(th)), np.sin(th) ** 2 * np.cos(2 * ph) + np.cos(th)):
        lap = surface_laplacian(s, field)
        assert abs(integrate_scalar(s, lap)) < 1e-9 * (1.0 + s.area)


def test_surface_laplacian_round_eigenfunction():
    eps = 0.3
    s = coordinate_sphere(Hyperbolic(), eps, GRID)
    f = np.cos(GRID.theta_mesh)
    lap = surface_laplacian(s, f)
    # degree-one harmonic on a round sphere of intrinsic radius 1/sinh(eps)
    want = -2.0 * np.sinh(eps) ** 2 * f
    assert np.max(np.abs(lap - want)) < 1e-9


def test_coordinate_sphere_range_checks():
    with pytest.raises(ValueError):
        coordinate_sphere(Hyperbolic(), 0.7, GRID)
    with pytest.raises(ValueError):
        coordinate_sphere(Hyperbolic(), 0.0, GRID)
