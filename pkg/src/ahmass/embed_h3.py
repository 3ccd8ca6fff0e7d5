"""Isometric embedding of rotationally symmetric sphere metrics into the
hyperboloid model of hyperbolic 3-space inside R^{3,1}.

A metric E(th) dth^2 + G(th) dphi^2 with Gauss curvature above -1 is
realized as a surface of revolution

    X(th, phi) = (f cos phi, f sin phi, u, w),   f = sqrt(G),
    w = sqrt(1 + f^2 + u^2),

on the hyperboloid <<X, X>> = -1.  Matching E forces the meridian ODE

    u' = (f f' u + s w sqrt(D)) / (1 + f^2),
    D  = (1 + f^2) E - f'^2,

with branch sign s.  Near the poles D and f'^2 cancel catastrophically in
floating point, so the solver never forms D directly: writing
A = G/sin^2, B = (E - A)/sin^2 (both pole-regular) gives the exact
factorization

    D = sin^2 th * [ B + A(1 + E) + x A_x - (1 - x^2) A_x^2 / (4A) ],
    x = cos th,

whose bracket stays bounded away from the difference-of-large-terms trap.
All theta-dependence is handled through Chebyshev interpolants in x, so
the integrand is smooth and the second derivatives of the profile come
from exact differentiation of the ODE, never from differencing.

The translation gauge along the axis is fixed after integration by the
exact boost that zeroes the first axial moment (integral of u f dth);
branch +1 then has the north pole (th = 0) on the positive axis.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.polynomial.chebyshev import Chebyshev
from scipy.integrate import solve_ivp

from .lorentz import LorentzMap, lorentz_inner
from .sphere_geometry import QuadratureGrid, SurfaceSample

__all__ = [
    "RevolutionProfile",
    "EmbeddedSurface",
    "EmbeddingError",
    "embed_round",
    "embed_revolution",
    "embed_surface",
    "mean_curvature_h0",
    "boost_surface",
    "dump_profile_csv",
]

# Integration starts this far from the poles.
POLE_OFFSET = 1e-4
# Local ODE tolerances.
ODE_RTOL = 1e-12
ODE_ATOL = 1e-13
# Hyperboloid constraint allowance per node.
HYPERBOLOID_TOL = 1e-9
# Relative spread below which a profile counts as exactly round.
ROUND_DISPATCH_TOL = 1e-11


class EmbeddingError(RuntimeError):
    """Raised when a metric cannot be realized in the revolution gauge."""


class RevolutionProfile:
    """Meridian samples (f, u, w) of an embedded surface of revolution at
    the grid theta-nodes, together with exact first and second
    derivatives and the branch sign."""

    def __init__(self, grid, branch, f, fp, fpp, u, up, upp, w, wp, wpp,
                 E_target, G_target):
        self.grid = grid
        self.branch = int(branch)
        self.f, self.fp, self.fpp = f, fp, fpp
        self.u, self.up, self.upp = u, up, upp
        self.w, self.wp, self.wpp = w, wp, wpp
        self.E_target = np.asarray(E_target, dtype=float)
        self.G_target = np.asarray(G_target, dtype=float)

        constraint = np.max(np.abs(self.f ** 2 + self.u ** 2 - self.w ** 2 + 1.0))
        if constraint > 1e-10 * (1.0 + np.max(self.w ** 2)):
            raise EmbeddingError("hyperboloid constraint violated (%.3e)" % constraint)
        e_got = self.fp ** 2 + self.up ** 2 - self.wp ** 2
        self.isometry_residual = float(
            np.max(np.abs(e_got - self.E_target)) + np.max(np.abs(self.f ** 2 - self.G_target))
        )

    def induced_metric(self):
        """(E, G) recomputed from the profile."""
        return self.fp ** 2 + self.up ** 2 - self.wp ** 2, self.f ** 2

    def axial_moment(self) -> float:
        """Integral of u f dth; zero in the centered gauge."""
        g = self.grid
        return float(np.sum(g.w_theta * self.u * self.f / g.sin_theta))


class EmbeddedSurface:
    """Embedded image of a coordinate sphere: per-node position X on the
    hyperboloid, inward unit normal, and mean curvature H0 (sum
    convention, geodesic spheres positive)."""

    def __init__(self, grid, X, normal, h0, isometry_residual, surface=None, profile=None):
        self.grid = grid
        self.X = np.asarray(X, dtype=float)
        self.normal = np.asarray(normal, dtype=float)
        self.H0 = grid.as_field(h0)
        self.isometry_residual = float(isometry_residual)
        self.surface = surface
        self.profile = profile
        xx = lorentz_inner(self.X, self.X)
        defect = np.max(np.abs(xx + 1.0))
        if defect > HYPERBOLOID_TOL:
            raise EmbeddingError("embedded nodes leave the hyperboloid (%.3e)" % defect)
        nn = lorentz_inner(self.normal, self.normal)
        if np.max(np.abs(nn - 1.0)) > 1e-8:
            raise EmbeddingError("normal field is not unit spacelike")
        for a in (self.X, self.normal, self.H0):
            a.setflags(write=False)


def _cheb_degree(grid) -> int:
    return min(220, 2 * grid.n_theta + 32)


def _meridian_chebs(E, G, grid):
    """Chebyshev models of the pole-regular combinations A = G/sin^2,
    B = (E - A)/sin^2 and E itself, from node samples."""
    x = grid.x
    s2 = 1.0 - x ** 2
    A = G / s2
    B = (E - A) / s2
    degree = _cheb_degree(grid)

    def model(vals):
        return Chebyshev.interpolate(lambda xq: grid.interp_x(vals, xq), degree,
                                     domain=[-1.0, 1.0])

    return model(A), model(B), model(E)


def embed_revolution(E, G, grid: QuadratureGrid, branch: int = 1,
                     residual_tol: float = 1e-6) -> RevolutionProfile:
    """Embed the axisymmetric metric E dth^2 + G dphi^2 (theta profiles on
    the grid nodes) as a surface of revolution about the x3-axis of the
    hyperboloid, centered so the axial moment of u vanishes.

    branch +1 puts the theta = 0 pole on the positive axis; -1 is the
    mirror image.  Raises EmbeddingError when the discriminant goes
    negative (not realizable in this gauge), when the poles fail to
    close, or when the recomputed metric misses the target by more than
    residual_tol relative to the metric scale.
    """
    E = np.asarray(E, dtype=float)
    G = np.asarray(G, dtype=float)
    if E.shape != (grid.n_theta,) or G.shape != (grid.n_theta,):
        raise ValueError("E and G must be theta profiles on the grid nodes")
    if np.any(E <= 0.0) or np.any(G <= 0.0):
        raise EmbeddingError("metric profiles must be positive")
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")

    A_c, B_c, E_c = _meridian_chebs(E, G, grid)
    Ax_c = A_c.deriv()

    # pole regularity: G/sin^2 must meet E at both poles
    scale = float(np.max(E))
    for xp in (1.0, -1.0):
        if abs(A_c(xp) - E_c(xp)) > 1e-6 * scale:
            raise EmbeddingError("pole regularity violated: G/sin^2 != E at a pole")

    def d_factored(xq):
        a, b, e, ax = A_c(xq), B_c(xq), E_c(xq), Ax_c(xq)
        return b + a * (1.0 + e) + xq * ax - (1.0 - xq ** 2) * ax ** 2 / (4.0 * a)

    probe = np.cos(np.linspace(0.0, np.pi, 2001))
    dvals = d_factored(probe)
    if np.min(dvals) < 0.0:
        raise EmbeddingError(
            "discriminant negative (min %.3e): metric not realizable as a "
            "revolution surface in this gauge" % np.min(dvals)
        )
    D_c = Chebyshev.interpolate(d_factored, _cheb_degree(grid), domain=[-1.0, 1.0])
    Dx_c = D_c.deriv()

    # branch +1 = north pole up after centering = integrate downhill first
    sig = -branch

    def rhs(theta, y):
        xq = math.cos(theta)
        s = math.sin(theta)
        a, ax = A_c(xq), Ax_c(xq)
        p = math.sqrt(a)
        f = s * p
        fp = xq * p - s * s * ax / (2.0 * p)
        dt = d_factored(xq)
        w = math.sqrt(1.0 + f * f + y[0] * y[0])
        return [(f * fp * y[0] + sig * w * s * math.sqrt(dt)) / (1.0 + f * f)]

    x = grid.x
    s = grid.sin_theta
    a, ax = A_c(x), Ax_c(x)
    p = np.sqrt(a)
    q = ax / (2.0 * p)
    q_c = Chebyshev.interpolate(lambda xq: Ax_c(xq) / (2.0 * np.sqrt(A_c(xq))),
                                _cheb_degree(grid), domain=[-1.0, 1.0])
    qx = q_c.deriv()(x)

    f = s * p
    fp = x * p - s ** 2 * q
    fpp = -s * (p + 3.0 * x * q) + s ** 3 * qx

    th0 = POLE_OFFSET
    th1 = math.pi - POLE_OFFSET
    sqrt_d1 = math.sqrt(d_factored(1.0))
    a1 = float(A_c(1.0))

    def solve_from_pole(u_pole):
        w_pole = math.sqrt(1.0 + u_pole ** 2)
        u_start = u_pole + 0.5 * th0 ** 2 * (a1 * u_pole + sig * w_pole * sqrt_d1)
        sol = solve_ivp(rhs, (th0, th1), [u_start], method="DOP853",
                        t_eval=grid.theta, rtol=ODE_RTOL, atol=ODE_ATOL)
        if not sol.success:
            raise EmbeddingError("meridian integration failed: %s" % sol.message)
        return sol.y[0]

    def axial_boost_angle(uu, ww):
        iu = float(np.sum(grid.w_theta * uu * f / s))
        iw = float(np.sum(grid.w_theta * ww * f / s))
        return math.atanh(-iu / iw)

    # The u(0) = 0 representative fixes the centering boost from its
    # axial moment.  Boosting that whole profile would cancel
    # catastrophically at small radii (values grow like 1/eps^2 and the
    # boost coefficients like 1/eps), so only the pole value is boosted
    # and the meridian is re-integrated already centered.
    u_raw = solve_from_pole(0.0)
    chi = axial_boost_angle(u_raw, np.sqrt(1.0 + f ** 2 + u_raw ** 2))

    u = solve_from_pole(math.sinh(chi))
    dt = d_factored(x)
    dtx = Dx_c(x)
    sqrt_dt = np.sqrt(dt)
    w = np.sqrt(1.0 + f ** 2 + u ** 2)
    up = (f * fp * u + sig * w * s * sqrt_dt) / (1.0 + f ** 2)
    wp = (f * fp + u * up) / w

    # u'' by exact differentiation of the ODE right-hand side
    d_s_sqrtD = (2.0 * x * dt - s ** 2 * dtx) / (2.0 * sqrt_dt)
    num_p = (fp ** 2 + f * fpp) * u + f * fp * up + sig * (wp * s * sqrt_dt + w * d_s_sqrtD)
    upp = num_p / (1.0 + f ** 2) - up * 2.0 * f * fp / (1.0 + f ** 2)
    wpp = (fp ** 2 + f * fpp + up ** 2 + u * upp - wp ** 2) / w

    # polish: the remaining boost is tiny, so applying it cannot cancel
    chi2 = axial_boost_angle(u, w)
    ch, sh = math.cosh(chi2), math.sinh(chi2)
    u, w = ch * u + sh * w, sh * u + ch * w
    up, wp = ch * up + sh * wp, sh * up + ch * wp
    upp, wpp = ch * upp + sh * wpp, sh * upp + ch * wpp

    prof = RevolutionProfile(grid, branch, f, fp, fpp, u, up, upp, w, wp, wpp, E, G)
    if prof.isometry_residual > residual_tol * (1.0 + scale):
        raise EmbeddingError(
            "isometry residual %.3e exceeds tolerance" % prof.isometry_residual
        )
    return prof


def mean_curvature_h0(profile: RevolutionProfile) -> np.ndarray:
    """Mean curvature of the embedded revolution surface in hyperbolic
    3-space, from the second fundamental form in the ambient Minkowski
    space; geodesic spheres give +2 coth R (normal on the inner side)."""
    f, fp, fpp = profile.f, profile.fp, profile.fpp
    u, up, upp = profile.u, profile.up, profile.upp
    w, wp, wpp = profile.w, profile.wp, profile.wpp

    # Minkowski cross product of position and meridian tangent, index
    # raised with diag(1, 1, -1) in (f, u, w) components
    cf = u * wp - w * up
    cu = w * fp - f * wp
    cw = f * up - u * fp
    nf, nu, nw = cf, cu, -cw
    norm_sq = nf ** 2 + nu ** 2 - nw ** 2
    if np.any(norm_sq <= 0.0):
        raise EmbeddingError("degenerate tangent plane: normal not spacelike")
    inv = 1.0 / np.sqrt(norm_sq)
    nf, nu, nw = nf * inv, nu * inv, nw * inv
    # orient toward the axis: azimuthal curvature -N_f/f positive
    if np.median(-nf / f) < 0.0:
        nf, nu, nw = -nf, -nu, -nw

    e_ind = fp ** 2 + up ** 2 - wp ** 2
    if np.any(e_ind <= 0.0):
        raise EmbeddingError("degenerate tangent plane: meridian tangent not spacelike")
    ii_t = fpp * nf + upp * nu - wpp * nw
    return ii_t / e_ind - nf / f


def _profile_nodes(profile: RevolutionProfile):
    """Position and inward normal on the full grid, shape (nth, nph, 4)."""
    g = profile.grid
    cph = np.cos(g.phi)[None, :]
    sph = np.sin(g.phi)[None, :]
    f = profile.f[:, None]
    X = np.stack([
        f * cph,
        f * sph,
        np.broadcast_to(profile.u[:, None], g.shape).copy(),
        np.broadcast_to(profile.w[:, None], g.shape).copy(),
    ], axis=-1)

    cf = profile.u * profile.wp - profile.w * profile.up
    cu = profile.w * profile.fp - profile.f * profile.wp
    cw = profile.f * profile.up - profile.u * profile.fp
    nf, nu, nw = cf, cu, -cw
    inv = 1.0 / np.sqrt(nf ** 2 + nu ** 2 - nw ** 2)
    nf, nu, nw = nf * inv, nu * inv, nw * inv
    if np.median(-nf / profile.f) < 0.0:
        nf, nu, nw = -nf, -nu, -nw
    nfc = nf[:, None]
    N = np.stack([
        nfc * cph,
        nfc * sph,
        np.broadcast_to(nu[:, None], g.shape).copy(),
        np.broadcast_to(nw[:, None], g.shape).copy(),
    ], axis=-1)
    return X, N


def embed_round(R: float, grid: QuadratureGrid,
                surface: SurfaceSample | None = None) -> EmbeddedSurface:
    """Geodesic sphere of radius R about the origin of the hyperboloid:
    X = (sinh R omega, cosh R), inward normal -(cosh R omega, sinh R),
    H0 = 2 coth R exactly."""
    if not (R > 0.0):
        raise ValueError("radius must be positive")
    sh, ch = math.sinh(R), math.cosh(R)
    omega = np.stack([
        grid.sin_theta[:, None] * np.cos(grid.phi)[None, :],
        grid.sin_theta[:, None] * np.sin(grid.phi)[None, :],
        np.broadcast_to(grid.x[:, None], grid.shape).copy(),
    ], axis=-1)
    X = np.concatenate([sh * omega, np.full(grid.shape + (1,), ch)], axis=-1)
    N = np.concatenate([-ch * omega, np.full(grid.shape + (1,), -sh)], axis=-1)
    if surface is None:
        E = np.full(grid.shape, sh * sh)
        surface = SurfaceSample(R, E, 0.0, E * (grid.sin_theta ** 2)[:, None],
                                2.0 * ch / sh, 1.0 / sh ** 2, grid)
    return EmbeddedSurface(grid, X, N, 2.0 * ch / sh, 0.0, surface=surface)


def _round_radius(surface: SurfaceSample):
    """Radius R when the induced metric is exactly sinh^2 R h0, else None."""
    E, F, G = surface.E, surface.F, surface.G
    scale = float(np.max(E))
    if np.max(np.abs(F)) > ROUND_DISPATCH_TOL * scale:
        return None
    if np.max(E) - np.min(E) > ROUND_DISPATCH_TOL * scale:
        return None
    s2 = (surface.grid.sin_theta ** 2)[:, None]
    if np.max(np.abs(G - E * s2)) > ROUND_DISPATCH_TOL * scale:
        return None
    return math.asinh(math.sqrt(float(np.mean(E))))


def embed_surface(surface: SurfaceSample, branch: int = 1,
                  residual_tol: float = 1e-6) -> EmbeddedSurface:
    """Isometrically embed a coordinate-sphere sample into the hyperboloid.

    Exactly round samples take the closed geodesic-sphere form (the ODE
    would only add solver noise, which the fifth-order curvature
    comparisons cannot absorb); everything else goes through the
    revolution solver.  Non-axisymmetric input is rejected: the
    general problem is out of scope.
    """
    r = _round_radius(surface)
    if r is not None:
        return embed_round(r, surface.grid, surface=surface)
    if not surface.is_axisymmetric() or np.max(np.abs(surface.F)) > 1e-12 * float(np.max(surface.E)):
        raise EmbeddingError("only rotationally symmetric metrics are supported")
    prof = embed_revolution(surface.E[:, 0], surface.G[:, 0], surface.grid,
                            branch=branch, residual_tol=residual_tol)
    h0 = mean_curvature_h0(prof)
    X, N = _profile_nodes(prof)
    return EmbeddedSurface(surface.grid, X, N, h0, prof.isometry_residual,
                           surface=surface, profile=prof)


def boost_surface(lam: LorentzMap, surf: EmbeddedSurface) -> EmbeddedSurface:
    """Move an embedded surface by a restricted ambient isometry; the
    intrinsic data (induced metric, H0) is untouched."""
    if not isinstance(lam, LorentzMap):
        raise TypeError("expected a LorentzMap")
    if not lam.is_restricted:
        raise ValueError("isometry must be proper and orthochronous")
    X = np.einsum("ab,ijb->ija", lam.matrix, surf.X)
    N = np.einsum("ab,ijb->ija", lam.matrix, surf.normal)
    return EmbeddedSurface(surf.grid, X, N, surf.H0, surf.isometry_residual,
                           surface=surf.surface, profile=surf.profile)


def dump_profile_csv(profile: RevolutionProfile, path) -> None:
    """Write per-node theta, f, u, w, H0 as CSV for external plotting."""
    h0 = mean_curvature_h0(profile)
    rows = np.column_stack([profile.grid.theta, profile.f, profile.u, profile.w, h0])
    np.savetxt(path, rows, delimiter=",", header="theta,f,u,w,H0", comments="")
