"""Asymptotically hyperbolic metrics in collar form and the mass vector of
their boundary expansion.

Every family here is conformal over the round sphere: the metric is

    g = sinh^-2 rho (drho^2 + u(rho, theta) h0),   0 < rho <= rho_max,

with u -> 1 at the boundary rho -> 0.  The third-order coefficient of u is
the mass aspect: u = 1 + rho^3 psi(theta)/3 + O(rho^4) corresponds to the
aspect tensor psi h0, whose trace 2 psi feeds the mass vector.

Families:
  Hyperbolic           u = 1 exactly (reference space).
  AdSSchwarzschild(m)  u = (r(rho) sinh rho)^2 with r the static area
                       radius; obtained from the collar transform below.
  PerturbedRound(psi)  u = 1 + rho^3 psi(theta)/3 + e(rho, theta), psi
                       smooth at the poles, e an optional O(rho^4) tail.
"""

from __future__ import annotations

import functools
import math

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .lorentz import MinkowskiVector, sphere_direction
from .sphere_geometry import QuadratureGrid, barycentric_interpolate, barycentric_weights

__all__ = [
    "MassAspect",
    "AHFamily",
    "Hyperbolic",
    "AdSSchwarzschild",
    "PerturbedRound",
    "CollarSample",
    "ads_collar_transform",
    "metric_at",
    "mass_aspect",
    "wang_mass",
    "scalar_curvature",
    "conformal_collar_scalar_curvature",
]

DEFAULT_RHO_MAX = 0.5

# Least-squares window for extracting the rho^3 coefficient of u - 1.
ASPECT_FIT_WINDOW = (0.02, 0.1)
ASPECT_FIT_POINTS = 12
ASPECT_FIT_RTOL = 1e-6


class MassAspect:
    """Symmetric 2-tensor on the round sphere, sampled on a grid, storing
    the third-order term of the collar expansion.  The trace against the
    round metric is what the mass vector integrates."""

    def __init__(self, h_tt, h_tp, h_pp, grid: QuadratureGrid):
        self.grid = grid
        self.h_tt = grid.as_field(h_tt)
        self.h_tp = grid.as_field(h_tp)
        self.h_pp = grid.as_field(h_pp)
        for a in (self.h_tt, self.h_tp, self.h_pp):
            if not np.all(np.isfinite(a)):
                raise ValueError("mass aspect has non-finite samples")
            a.setflags(write=False)

    @property
    def trace(self) -> np.ndarray:
        """Trace against the round metric, h_tt + h_pp / sin^2 th."""
        s2 = (self.grid.sin_theta ** 2)[:, None]
        return self.h_tt + self.h_pp / s2


class AHFamily:
    """Base class for collar-form families; subclasses provide the
    conformal profile u and its first two radial derivatives."""

    name = "abstract"
    rho_max = DEFAULT_RHO_MAX

    def conformal_factor(self, rho: float, theta) -> np.ndarray:
        raise NotImplementedError

    def conformal_factor_drho(self, rho: float, theta) -> np.ndarray:
        raise NotImplementedError

    def conformal_factor_drho2(self, rho: float, theta) -> np.ndarray:
        raise NotImplementedError

    def aspect_function(self):
        """theta -> rho^3-coefficient profile psi(theta) (aspect = psi h0)."""
        raise NotImplementedError

    def scalar_curvature(self, rho: float, theta) -> np.ndarray:
        raise NotImplementedError


class Hyperbolic(AHFamily):
    """The reference space itself: u = 1, zero mass aspect, curvature -6."""

    name = "hyperbolic"

    def conformal_factor(self, rho, theta):
        self._check(rho)
        return np.ones_like(np.asarray(theta, dtype=float))

    def conformal_factor_drho(self, rho, theta):
        self._check(rho)
        return np.zeros_like(np.asarray(theta, dtype=float))

    conformal_factor_drho2 = conformal_factor_drho

    def aspect_function(self):
        return lambda theta: np.zeros_like(np.asarray(theta, dtype=float))

    def scalar_curvature(self, rho, theta):
        self._check(rho)
        return np.full_like(np.asarray(theta, dtype=float), -6.0)

    def _check(self, rho):
        if not (0.0 < rho <= self.rho_max):
            raise ValueError("rho outside collar range")


def _horizon_radius(m: float) -> float:
    # positive root of r^3 + r - 2m = 0
    if m == 0.0:
        return 0.0
    roots = np.roots([1.0, 0.0, 1.0, -2.0 * m])
    real = roots[np.abs(roots.imag) < 1e-12].real
    return float(np.max(real))


def _ads_tail(m: float, r: float) -> float:
    # integral_r^infty (V^-1/2 - (1+s^2)^-1/2) ds via s = r/x, x in (0, 1]
    def integrand(x):
        s = r / x
        v = 1.0 + s * s - 2.0 * m / s
        return (1.0 / math.sqrt(v) - 1.0 / math.sqrt(1.0 + s * s)) * r / (x * x)

    val, _ = quad(integrand, 0.0, 1.0, epsabs=1e-15, epsrel=1e-13, limit=200)
    return val


@functools.lru_cache(maxsize=4096)
def ads_collar_transform(m: float, rho: float) -> float:
    """Static area radius r of the coordinate sphere {rho = const} in the
    collar form of the AdS-Schwarzschild metric V^-1 dr^2 + r^2 h0,
    V = 1 + r^2 - 2m/r.

    r is the unique solution above the horizon of

        asinh(r) - integral_r^infty (V^-1/2 - (1+s^2)^-1/2) ds
            = -log tanh(rho/2),

    normalized so m = 0 returns exactly 1/sinh rho.  Residual of the
    defining equation at the returned root is below 1e-12.
    """
    if m < 0.0:
        raise ValueError("mass must be nonnegative")
    if rho <= 0.0:
        raise ValueError("rho must be positive")
    if m == 0.0:
        return 1.0 / math.sinh(rho)
    target = -math.log(math.tanh(0.5 * rho))

    def f(r):
        return math.asinh(r) - _ads_tail(m, r) - target

    rh = _horizon_radius(m)
    lo = max(0.5 / math.sinh(rho), rh * (1.0 + 1e-10))
    hi = 3.0 / math.sinh(rho) + 3.0 * m + 3.0
    if f(lo) >= 0.0 or f(hi) <= 0.0:
        raise ValueError("no collar radius in bracket; rho too deep for this mass")
    return float(brentq(f, lo, hi, xtol=1e-14, rtol=8.9e-16))


class AdSSchwarzschild(AHFamily):
    """AdS-Schwarzschild slice of mass m > 0 in collar form; u = w(rho) is
    independent of theta, with w(rho) = (r sinh rho)^2."""

    def __init__(self, mass: float):
        if not (mass > 0.0):
            raise ValueError("mass must be positive")
        self.mass = float(mass)
        self.name = "ads_schwarzschild"

    def _radius(self, rho: float) -> float:
        return ads_collar_transform(self.mass, rho)

    def _profile(self, rho: float):
        # w, w' and w'' from exact differentiation of the defining ODE
        # r'(rho) = -sqrt(V)/sinh(rho)
        r = self._radius(rho)
        sh, ch = math.sinh(rho), math.cosh(rho)
        v = 1.0 + r * r - 2.0 * self.mass / r
        sv = math.sqrt(v)
        p = r * sh
        dp = r * ch - sv
        ddp = -sv * ch / sh + r * sh + (2.0 * r + 2.0 * self.mass / r ** 2) / (2.0 * sh)
        w = p * p
        dw = 2.0 * p * dp
        ddw = 2.0 * (dp * dp + p * ddp)
        return w, dw, ddw

    def _check(self, rho):
        if not (0.0 < rho <= self.rho_max):
            raise ValueError("rho outside collar range")

    def conformal_factor(self, rho, theta):
        self._check(rho)
        w, _, _ = self._profile(rho)
        return np.full_like(np.asarray(theta, dtype=float), w)

    def conformal_factor_drho(self, rho, theta):
        self._check(rho)
        _, dw, _ = self._profile(rho)
        return np.full_like(np.asarray(theta, dtype=float), dw)

    def conformal_factor_drho2(self, rho, theta):
        self._check(rho)
        _, _, ddw = self._profile(rho)
        return np.full_like(np.asarray(theta, dtype=float), ddw)

    def aspect_constant(self, window=ASPECT_FIT_WINDOW, points=ASPECT_FIT_POINTS) -> float:
        """rho^3-coefficient of u - 1 scaled by 3, i.e. the constant psi
        with aspect = psi h0, extracted by a least-squares fit of
        3(w - 1)/rho^3 against {1, rho^2, rho^3} on a log-spaced window.

        The intercept equals twice the mass.  A residual above 1e-6
        relative to the intercept signals an inconsistent family.
        """
        rhos = np.geomspace(window[0], window[1], points)
        y = np.array([3.0 * (self._profile(r)[0] - 1.0) / r ** 3 for r in rhos])
        basis = np.stack([np.ones_like(rhos), rhos ** 2, rhos ** 3], axis=1)
        coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
        resid = np.max(np.abs(basis @ coef - y))
        if resid > ASPECT_FIT_RTOL * abs(coef[0]):
            raise ValueError("aspect fit residual %.3e exceeds tolerance" % resid)
        return float(coef[0])

    def aspect_function(self):
        c = self.aspect_constant()
        return lambda theta: np.full_like(np.asarray(theta, dtype=float), c)

    def scalar_curvature(self, rho, theta):
        self._check(rho)
        # Einstein with the curvature normalization of the reference space
        return np.full_like(np.asarray(theta, dtype=float), -6.0)


# Internal spectral grid for the unit-sphere Laplacian of log u (axisymmetric).
@functools.lru_cache(maxsize=1)
def _axisym_nodes(n: int = 128):
    x, w = np.polynomial.legendre.leggauss(n)
    x = x[::-1].copy()
    w = w[::-1].copy()
    bary = barycentric_weights(x, w)
    dx = x[:, None] - x[None, :]
    np.fill_diagonal(dx, 1.0)
    d = (bary[None, :] / bary[:, None]) / dx
    np.fill_diagonal(d, 0.0)
    np.fill_diagonal(d, -d.sum(axis=1))
    return x, bary, d


def conformal_collar_scalar_curvature(rho, u, u_rho, u_rho2, lap0_log_u):
    """Scalar curvature of g = sinh^-2 rho (drho^2 + u h0) from the profile
    u, its radial derivatives, and the unit-sphere Laplacian of log u.

    The slices {rho = const} are umbilic with principal curvature
    lam = -cosh rho + sinh rho u_rho / (2u) toward the boundary, and

        R_g = R_q - 4 sinh(rho) dlam/drho - 6 lam^2,

    R_q the slice curvature sinh^2 rho (2 - lap0 log u)/u.
    """
    sh, ch = np.sinh(rho), np.cosh(rho)
    lam = -ch + 0.5 * sh * u_rho / u
    lam_rho = -sh + 0.5 * (ch * u_rho / u + sh * (u_rho2 * u - u_rho ** 2) / u ** 2)
    r_q = sh ** 2 * (2.0 - lap0_log_u) / u
    return r_q - 4.0 * sh * lam_rho - 6.0 * lam ** 2


class PerturbedRound(AHFamily):
    """Conformal perturbation u = 1 + rho^3 psi(theta)/3 + e(rho, theta).

    psi must be smooth at the poles (vanishing theta-derivative there,
    enforced by sampling).  The optional tail e is given with its first
    two radial derivatives and must satisfy |e| <= bound * rho^4 on the
    collar, checked on 20 log-spaced radii.
    """

    def __init__(self, psi, e_value=None, e_drho=None, e_drho2=None,
                 remainder_bound: float = 100.0, rho_max: float = DEFAULT_RHO_MAX):
        self.psi = psi
        self.e_value = e_value
        self.e_drho = e_drho
        self.e_drho2 = e_drho2
        self.rho_max = float(rho_max)
        self.name = "perturbed_round"
        self._check_pole_regularity()
        if e_value is not None:
            if e_drho is None:
                raise ValueError("a remainder tail needs its radial derivative")
            self._check_remainder(float(remainder_bound))

    def _check_pole_regularity(self):
        d = 1e-4
        scale = 1.0 + max(abs(float(self.psi(np.array(0.0)))),
                          abs(float(self.psi(np.array(np.pi)))))
        slope0 = abs(float(self.psi(np.array(d))) - float(self.psi(np.array(0.0)))) / d
        slope1 = abs(float(self.psi(np.array(np.pi - d))) - float(self.psi(np.array(np.pi)))) / d
        if slope0 > 1e-3 * scale or slope1 > 1e-3 * scale:
            raise ValueError("psi must have vanishing slope at both poles")

    def _check_remainder(self, bound):
        thetas = np.linspace(0.05, np.pi - 0.05, 33)
        for rho in np.geomspace(1e-3, self.rho_max, 20):
            e = np.asarray(self.e_value(rho, thetas), dtype=float)
            if np.max(np.abs(e)) > bound * rho ** 4:
                raise ValueError("remainder tail exceeds %g * rho^4 at rho=%g" % (bound, rho))

    def _check(self, rho):
        if not (0.0 < rho <= self.rho_max):
            raise ValueError("rho outside collar range")

    def conformal_factor(self, rho, theta):
        self._check(rho)
        th = np.asarray(theta, dtype=float)
        u = 1.0 + rho ** 3 * np.asarray(self.psi(th), dtype=float) / 3.0
        if self.e_value is not None:
            u = u + np.asarray(self.e_value(rho, th), dtype=float)
        return u

    def conformal_factor_drho(self, rho, theta):
        self._check(rho)
        th = np.asarray(theta, dtype=float)
        du = rho ** 2 * np.asarray(self.psi(th), dtype=float)
        if self.e_drho is not None:
            du = du + np.asarray(self.e_drho(rho, th), dtype=float)
        return du

    def conformal_factor_drho2(self, rho, theta):
        self._check(rho)
        th = np.asarray(theta, dtype=float)
        ddu = 2.0 * rho * np.asarray(self.psi(th), dtype=float)
        if self.e_value is not None:
            if self.e_drho2 is None:
                raise ValueError("remainder tail lacks a second radial derivative")
            ddu = ddu + np.asarray(self.e_drho2(rho, th), dtype=float)
        return ddu

    def aspect_function(self):
        return lambda theta: np.asarray(self.psi(np.asarray(theta, dtype=float)), dtype=float)

    def scalar_curvature(self, rho, theta):
        self._check(rho)
        th = np.atleast_1d(np.asarray(theta, dtype=float))
        u = self.conformal_factor(rho, th)
        du = self.conformal_factor_drho(rho, th)
        ddu = self.conformal_factor_drho2(rho, th)
        # lap0 log u spectrally on internal nodes, interpolated to theta
        x, bary, d = _axisym_nodes()
        logu = np.log(self.conformal_factor(rho, np.arccos(x)))
        fx = d @ logu
        lap_nodes = (1.0 - x ** 2) * (d @ fx) - 2.0 * x * fx
        lap = np.atleast_1d(barycentric_interpolate(x, bary, lap_nodes, np.cos(th)))
        out = conformal_collar_scalar_curvature(rho, u, du, ddu, lap)
        return out if np.asarray(theta).ndim else float(out[0])


class CollarSample:
    """Components of h_rho and of the collar metric at one radius, sampled
    on a grid."""

    def __init__(self, rho, u, grid: QuadratureGrid):
        self.rho = float(rho)
        self.grid = grid
        self.u = grid.as_field(u)
        if np.any(self.u <= 0.0):
            raise ValueError("h_rho is not positive definite")
        s2 = (grid.sin_theta ** 2)[:, None]
        sh2 = math.sinh(self.rho) ** 2
        self.h_tt = self.u
        self.h_tp = np.zeros(grid.shape)
        self.h_pp = self.u * s2
        self.g_rr = np.full(grid.shape, 1.0 / sh2)
        self.g_tt = self.h_tt / sh2
        self.g_tp = self.h_tp / sh2
        self.g_pp = self.h_pp / sh2
        for a in (self.u, self.h_tt, self.h_tp, self.h_pp,
                  self.g_rr, self.g_tt, self.g_tp, self.g_pp):
            a.setflags(write=False)


def metric_at(family: AHFamily, rho: float, grid: QuadratureGrid) -> CollarSample:
    """Sample h_rho and g = sinh^-2 rho (drho^2 + h_rho) at one radius."""
    if not (0.0 < rho <= family.rho_max):
        raise ValueError("rho=%g outside the collar range (0, %g]" % (rho, family.rho_max))
    u = family.conformal_factor(rho, grid.theta)
    return CollarSample(rho, u, grid)


def mass_aspect(family: AHFamily, grid: QuadratureGrid) -> MassAspect:
    """Third-order coefficient tensor of the family's collar expansion."""
    psi = np.asarray(family.aspect_function()(grid.theta), dtype=float)
    s2 = grid.sin_theta ** 2
    return MassAspect(psi, 0.0, psi * s2, grid)


def wang_mass(aspect: MassAspect, grid: QuadratureGrid | None = None) -> MinkowskiVector:
    """Mass vector (1/16 pi) (int omega tr dmu0, int tr dmu0) of an aspect
    tensor; omega the unit position on the round sphere."""
    if grid is None:
        grid = aspect.grid
    if grid is not aspect.grid:
        raise ValueError("aspect was sampled on a different grid")
    if grid.n_theta < 16:
        raise ValueError("need n_theta >= 16 to resolve the aspect integrals")
    tr = aspect.trace
    omega = sphere_direction(grid.theta_mesh, grid.phi_mesh)
    c = 1.0 / (16.0 * np.pi)
    comps = [c * grid.integrate_round(omega[..., k] * tr) for k in range(3)]
    comps.append(c * grid.integrate_round(tr))
    return MinkowskiVector(*comps)


def scalar_curvature(family: AHFamily, rho: float, theta):
    """Scalar curvature of the family metric at collar position (rho, theta)."""
    return family.scalar_curvature(rho, theta)
