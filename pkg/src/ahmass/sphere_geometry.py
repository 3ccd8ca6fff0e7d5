"""Quadrature grids on the round sphere and the induced geometry of
coordinate spheres.

Grid layout: theta nodes are Gauss-Legendre in x = cos theta (so integrals
against sin th dth are plain weighted sums), listed with theta ascending;
phi nodes are uniform on [0, 2pi) with the trapezoid weight 2pi/n_phi.
Scalar fields are arrays of shape (n_theta, n_phi).

Derivatives in theta are spectral: barycentric differentiation on the
Gauss-Legendre nodes, with d/dth = -sin th d/dx.  Derivatives in phi are
spectral via the FFT.  Both are accurate to near machine precision for the
smooth fields produced by the metric families, which the fifth-order
curvature expansions need.
"""

from __future__ import annotations

import numpy as np

from .lorentz import MinkowskiVector

__all__ = [
    "QuadratureGrid",
    "SurfaceSample",
    "coordinate_sphere",
    "brioschi_curvature",
    "integrate_scalar",
    "integrate_vector",
    "surface_laplacian",
    "embeddability_check",
    "barycentric_weights",
    "barycentric_interpolate",
    "EMBEDDABILITY_MARGIN",
]

# Margin above K = -1 demanded by embeddability_check.
EMBEDDABILITY_MARGIN = 1e-8


def barycentric_weights(x: np.ndarray, gl_weights: np.ndarray) -> np.ndarray:
    """Barycentric interpolation weights for Gauss-Legendre nodes:
    alternating sign times sqrt((1 - x^2) w).  Overall scale is
    irrelevant and left unnormalized."""
    w = np.sqrt((1.0 - x ** 2) * gl_weights)
    return w * ((-1.0) ** np.arange(x.size))


def barycentric_interpolate(x_nodes, weights, values, x_query):
    """Evaluate the polynomial interpolant of (x_nodes, values) at x_query
    using the barycentric formula; exact node hits are returned directly."""
    xq = np.atleast_1d(np.asarray(x_query, dtype=float))
    values = np.asarray(values, dtype=float)
    diff = xq[:, None] - x_nodes[None, :]
    out = np.empty_like(xq)
    exact = np.abs(diff) < 1e-15
    hit = exact.any(axis=1)
    if hit.any():
        out[hit] = values[exact[hit].argmax(axis=1)]
    rest = ~hit
    if rest.any():
        c = weights[None, :] / diff[rest]
        out[rest] = (c @ values) / c.sum(axis=1)
    if np.asarray(x_query).ndim == 0:
        return float(out[0])
    return out


def _barycentric_diff_matrix(x: np.ndarray, w: np.ndarray) -> np.ndarray:
    # Differentiation matrix from barycentric weights w.
    dx = x[:, None] - x[None, :]
    np.fill_diagonal(dx, 1.0)
    d = (w[None, :] / w[:, None]) / dx
    np.fill_diagonal(d, 0.0)
    np.fill_diagonal(d, -d.sum(axis=1))
    return d


class QuadratureGrid:
    """Tensor-product quadrature grid on the round sphere.

    Integrating the constant 1 against the round measure returns 4 pi to
    rounding; polynomials in cos theta up to degree 2 n_theta - 1 are
    integrated exactly.  Instances are immutable.
    """

    def __init__(self, n_theta: int = 64, n_phi: int = 4):
        if n_theta < 4:
            raise ValueError("n_theta must be at least 4")
        if n_phi < 1:
            raise ValueError("n_phi must be at least 1")
        self.n_theta = int(n_theta)
        self.n_phi = int(n_phi)

        x, w = np.polynomial.legendre.leggauss(self.n_theta)
        # leggauss returns x ascending; flip so theta = arccos x ascends.
        x = x[::-1].copy()
        w = w[::-1].copy()
        self.x = x
        self.w_theta = w
        self.theta = np.arccos(x)
        self.sin_theta = np.sqrt(1.0 - x ** 2)
        self.phi = 2.0 * np.pi * np.arange(self.n_phi) / self.n_phi
        self.w_phi = 2.0 * np.pi / self.n_phi
        self.bary_w = barycentric_weights(x, w)
        self.deriv_x = _barycentric_diff_matrix(x, self.bary_w)
        self.theta_mesh, self.phi_mesh = np.meshgrid(self.theta, self.phi, indexing="ij")
        for a in (self.x, self.w_theta, self.theta, self.sin_theta, self.phi,
                  self.bary_w, self.deriv_x, self.theta_mesh, self.phi_mesh):
            a.setflags(write=False)

    @property
    def shape(self):
        return (self.n_theta, self.n_phi)

    def as_field(self, values) -> np.ndarray:
        """Broadcast a constant, a theta profile of shape (n_theta,), or a
        full (n_theta, n_phi) array onto the grid."""
        arr = np.asarray(values, dtype=float)
        if arr.ndim == 0:
            return np.full(self.shape, float(arr))
        if arr.shape == (self.n_theta,):
            return np.repeat(arr[:, None], self.n_phi, axis=1)
        if arr.shape == self.shape:
            return arr
        raise ValueError("field shape %r does not fit grid %r" % (arr.shape, self.shape))

    def integrate_round(self, field) -> float:
        """Integral against the round measure sin th dth dphi."""
        f = self.as_field(field)
        return float(self.w_phi * np.einsum("i,ij->", self.w_theta, f))

    def interp_x(self, values, x_query):
        """Evaluate the interpolant of a theta profile (given at the grid
        nodes) at arbitrary x = cos theta."""
        return barycentric_interpolate(self.x, self.bary_w, values, x_query)

    def diff_theta(self, field) -> np.ndarray:
        f = np.asarray(field)
        if f.ndim == 1:
            return -self.sin_theta * (self.deriv_x @ f)
        return -self.sin_theta[:, None] * (self.deriv_x @ f)

    def diff2_theta(self, field) -> np.ndarray:
        f = np.asarray(field)
        fx = self.deriv_x @ f
        fxx = self.deriv_x @ fx
        if f.ndim == 1:
            return (1.0 - self.x ** 2) * fxx - self.x * fx
        s2 = (1.0 - self.x ** 2)[:, None]
        return s2 * fxx - self.x[:, None] * fx

    def _phi_modes(self, field):
        f = self.as_field(field)
        return np.fft.rfft(f, axis=1)

    def diff_phi(self, field) -> np.ndarray:
        fh = self._phi_modes(field)
        m = np.arange(fh.shape[1])
        fh = fh * (1j * m)
        if self.n_phi % 2 == 0:
            fh[:, -1] = 0.0  # Nyquist mode has no well-defined odd derivative
        return np.fft.irfft(fh, n=self.n_phi, axis=1)

    def diff2_phi(self, field) -> np.ndarray:
        fh = self._phi_modes(field)
        m = np.arange(fh.shape[1])
        fh = fh * (-(m.astype(float) ** 2))
        return np.fft.irfft(fh, n=self.n_phi, axis=1)


class SurfaceSample:
    """Induced geometry of one coordinate sphere, sampled on a grid.

    Stores the first fundamental form (E, F, G) in (theta, phi), the area
    element, the mean curvature H (sum-of-principal-curvatures convention,
    normal pointing away from infinity) and the Gauss curvature K.
    """

    def __init__(self, eps, E, F, G, H, K, grid: QuadratureGrid):
        self.eps = float(eps)
        self.grid = grid
        self.E = grid.as_field(E)
        self.F = grid.as_field(F)
        self.G = grid.as_field(G)
        self.H = grid.as_field(H)
        self.K = grid.as_field(K)
        det = self.E * self.G - self.F ** 2
        if np.any(self.E <= 0.0) or np.any(det <= 0.0):
            raise ValueError("degenerate induced metric sample")
        self.sqrt_det = np.sqrt(det)
        for a in (self.E, self.F, self.G, self.H, self.K, self.sqrt_det):
            a.setflags(write=False)

    @property
    def area(self) -> float:
        return integrate_scalar(self, 1.0)

    def is_axisymmetric(self, tol: float = 1e-11) -> bool:
        for a in (self.E, self.F, self.G):
            spread = np.max(a, axis=1) - np.min(a, axis=1)
            if np.max(spread) > tol * (1.0 + np.max(np.abs(a))):
                return False
        return True


def _det3(m):
    # m is a 3x3 nested list of (n_theta, n_phi) arrays
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def brioschi_curvature(E, F, G, grid: QuadratureGrid) -> np.ndarray:
    """Gauss curvature of the metric E dth^2 + 2F dth dphi + G dphi^2 from
    first-fundamental-form data alone, via the Brioschi determinant
    formula.  Spectral derivatives; exact in phi for axisymmetric input."""
    E = grid.as_field(E)
    F = grid.as_field(F)
    G = grid.as_field(G)
    Eu, Ev = grid.diff_theta(E), grid.diff_phi(E)
    Fu, Fv = grid.diff_theta(F), grid.diff_phi(F)
    Gu, Gv = grid.diff_theta(G), grid.diff_phi(G)
    Evv = grid.diff2_phi(E)
    Guu = grid.diff2_theta(G)
    Fuv = grid.diff_phi(grid.diff_theta(F))

    m1 = [
        [-0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev],
        [Fv - 0.5 * Gu, E, F],
        [0.5 * Gv, F, G],
    ]
    zero = np.zeros_like(E)
    m2 = [
        [zero, 0.5 * Ev, 0.5 * Gu],
        [0.5 * Ev, E, F],
        [0.5 * Gu, F, G],
    ]
    det = E * G - F ** 2
    return (_det3(m1) - _det3(m2)) / det ** 2


def coordinate_sphere(family, eps: float, grid: QuadratureGrid) -> SurfaceSample:
    """Level set {rho = eps} of a collar family, with its induced metric,
    area element, mean curvature and Gauss curvature.

    The family must expose rho_max, conformal_factor(rho, theta) and
    conformal_factor_drho(rho, theta); the collar metric is
    sinh^-2 rho (drho^2 + u(rho, theta) h0).  The normal underlying H
    points away from infinity (toward increasing rho), which makes
    geodesic spheres of the reference metric have H = 2 cosh eps > 0.
    """
    if not (0.0 < eps <= family.rho_max):
        raise ValueError("eps=%g outside the collar range (0, %g]" % (eps, family.rho_max))
    u = np.asarray(family.conformal_factor(eps, grid.theta), dtype=float)
    du = np.asarray(family.conformal_factor_drho(eps, grid.theta), dtype=float)
    if np.any(u <= 0.0):
        raise ValueError("degenerate induced metric: conformal factor <= 0")
    sh, ch = np.sinh(eps), np.cosh(eps)
    E = grid.as_field(u / sh ** 2)
    G = E * (grid.sin_theta ** 2)[:, None]
    F = np.zeros(grid.shape)
    H = grid.as_field(2.0 * ch - sh * du / u)
    K = brioschi_curvature(E, F, G, grid)
    return SurfaceSample(eps, E, F, G, H, K, grid)


def integrate_scalar(surface: SurfaceSample, field) -> float:
    """Integral of a scalar field over the surface against its area
    element."""
    g = surface.grid
    f = g.as_field(field)
    if not np.all(np.isfinite(f)):
        raise ValueError("field has non-finite entries")
    weight = surface.sqrt_det / g.sin_theta[:, None]
    return float(g.w_phi * np.einsum("i,ij->", g.w_theta, f * weight))


def integrate_vector(surface: SurfaceSample, field) -> MinkowskiVector:
    """Componentwise surface integral of a vector-valued field given as an
    array of shape (n_theta, n_phi, 4)."""
    arr = np.asarray(field, dtype=float)
    if arr.shape != surface.grid.shape + (4,):
        raise ValueError("expected field of shape %r" % (surface.grid.shape + (4,),))
    comps = [integrate_scalar(surface, arr[..., k]) for k in range(4)]
    return MinkowskiVector(*comps)


def surface_laplacian(surface: SurfaceSample, field) -> np.ndarray:
    """Laplace-Beltrami operator of the surface metric applied to a scalar
    field, for axisymmetric E and G with F = 0.

    Works modewise in phi.  Each Fourier mode is factored as
    sin^p th * (smooth function of cos th), p the mode parity, so every
    theta-derivative acts on a pole-regular function; this keeps spectral
    accuracy through the poles.
    """
    g = surface.grid
    if not surface.is_axisymmetric():
        raise ValueError("surface_laplacian requires an axisymmetric surface")
    if np.max(np.abs(surface.F)) > 1e-12 * (1.0 + np.max(surface.E)):
        raise ValueError("surface_laplacian requires F = 0")
    f = g.as_field(field)

    x = g.x
    s = g.sin_theta
    s2 = 1.0 - x ** 2
    E = surface.E[:, 0]
    A = surface.G[:, 0] / s2  # pole-regular angular coefficient
    j = np.sqrt(E * A)        # area element = sin th * j
    d = g.deriv_x

    fh = np.fft.rfft(f, axis=1)
    out = np.zeros_like(fh)
    for m in range(fh.shape[1]):
        fm = fh[:, m]
        if m % 2 == 0:
            gm = fm
            afn = -s2 * (j / E) * (d @ gm)
            div = -(d @ afn) / j
        else:
            gm = fm / s
            b = (j / E) * (x * gm - s2 * (d @ gm))
            div = (x * b - s2 * (d @ b)) / (s * j)
        lap = div
        if m > 0:
            lap = lap - (m * m) * fm / (A * s2)
        out[:, m] = lap
    return np.fft.irfft(out, n=g.n_phi, axis=1)


def embeddability_check(surface: SurfaceSample, margin: float = EMBEDDABILITY_MARGIN) -> bool:
    """True when the Gauss curvature clears the hyperboloid threshold
    K > -1 by the given margin at every node."""
    return bool(np.min(surface.K) > -1.0 + margin)
