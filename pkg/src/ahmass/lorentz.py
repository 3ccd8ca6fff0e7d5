"""Minkowski space R^{3,1}, the hyperboloid model of H^3, and Lorentz maps.

Vectors are stored in the component order (x1, x2, x3, t), so the pairing is

    <<a, b>> = a1 b1 + a2 b2 + a3 b3 - a_t b_t,

signature (+, +, +, -).  The hyperboloid model is the upper sheet
{<<X, X>> = -1, t >= 1}; the future light cone is {<<v, v>> = 0, t > 0}.
Polar coordinates used by hyperboloid_point follow the unit direction

    omega(theta, phi) = (sin th cos ph, sin th sin ph, cos th),

with theta in [0, pi] measured from the +x3 axis.

Everything in this module is immutable and safe to share across threads.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "MINKOWSKI_METRIC",
    "CausalClass",
    "MinkowskiVector",
    "SpinorParameter",
    "LorentzMap",
    "lorentz_inner",
    "causal_classify",
    "causal_tolerance",
    "hopf_eta",
    "sphere_direction",
    "hyperboloid_point",
    "apply_lorentz",
    "boost",
    "rotation",
]

# Gram matrix of the pairing in (x1, x2, x3, t) order.
MINKOWSKI_METRIC = np.diag([1.0, 1.0, 1.0, -1.0])
MINKOWSKI_METRIC.setflags(write=False)

# ||Lambda^T G Lambda - G|| allowed for a valid Lorentz map.
LORENTZ_MAP_TOL = 1e-12


class CausalClass(enum.Enum):
    """Causal type of a Minkowski vector, with a tolerance band around zero
    and around the light cone."""

    ZERO = "zero"
    FUTURE_TIMELIKE = "future-timelike"
    PAST_TIMELIKE = "past-timelike"
    FUTURE_NULL = "future-null"
    PAST_NULL = "past-null"
    SPACELIKE = "spacelike"

    @property
    def is_future_causal(self) -> bool:
        """True for the classes lying in the closed future cone."""
        return self in (
            CausalClass.ZERO,
            CausalClass.FUTURE_TIMELIKE,
            CausalClass.FUTURE_NULL,
        )


@dataclass(frozen=True)
class MinkowskiVector:
    """A point or vector of R^{3,1} with components (x1, x2, x3, t)."""

    x1: float
    x2: float
    x3: float
    t: float

    def __post_init__(self):
        for name in ("x1", "x2", "x3", "t"):
            v = getattr(self, name)
            if not np.isfinite(v):
                raise ValueError("MinkowskiVector component %s is not finite" % name)

    @classmethod
    def from_array(cls, arr) -> "MinkowskiVector":
        arr = np.asarray(arr, dtype=float)
        if arr.shape != (4,):
            raise ValueError("expected 4 components, got shape %r" % (arr.shape,))
        return cls(float(arr[0]), float(arr[1]), float(arr[2]), float(arr[3]))

    def as_array(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.x3, self.t])

    @property
    def spatial(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.x3])

    @property
    def spatial_norm(self) -> float:
        return float(np.sqrt(self.x1 ** 2 + self.x2 ** 2 + self.x3 ** 2))

    def __add__(self, other: "MinkowskiVector") -> "MinkowskiVector":
        return MinkowskiVector(
            self.x1 + other.x1, self.x2 + other.x2, self.x3 + other.x3, self.t + other.t
        )

    def __sub__(self, other: "MinkowskiVector") -> "MinkowskiVector":
        return MinkowskiVector(
            self.x1 - other.x1, self.x2 - other.x2, self.x3 - other.x3, self.t - other.t
        )

    def __mul__(self, c: float) -> "MinkowskiVector":
        c = float(c)
        return MinkowskiVector(c * self.x1, c * self.x2, c * self.x3, c * self.t)

    __rmul__ = __mul__

    def __neg__(self) -> "MinkowskiVector":
        return self * -1.0


@dataclass(frozen=True)
class SpinorParameter:
    """A pair (z1, z2) in C^2 parametrizing a point of the closed future
    cone through the Hopf-type map hopf_eta."""

    z1: complex
    z2: complex

    def __post_init__(self):
        if not (np.isfinite(self.z1) and np.isfinite(self.z2)):
            raise ValueError("spinor parameter components must be finite")

    @property
    def norm_sq(self) -> float:
        return float(abs(self.z1) ** 2 + abs(self.z2) ** 2)

    @property
    def is_trivial(self) -> bool:
        return self.norm_sq == 0.0


def _as_array4(v) -> np.ndarray:
    if isinstance(v, MinkowskiVector):
        return v.as_array()
    arr = np.asarray(v, dtype=float)
    if arr.shape[-1] != 4:
        raise ValueError("expected trailing dimension 4, got shape %r" % (arr.shape,))
    return arr


def lorentz_inner(a, b):
    """Pairing <<a, b>> = a.x b.x - a_t b_t.

    Accepts MinkowskiVector instances or arrays with trailing dimension 4
    (broadcasting applies); returns a float or an array accordingly.
    """
    aa = _as_array4(a)
    bb = _as_array4(b)
    out = np.sum(aa[..., :3] * bb[..., :3], axis=-1) - aa[..., 3] * bb[..., 3]
    if out.ndim == 0:
        return float(out)
    return out


def causal_tolerance(v) -> float:
    """Default absolute tolerance 1e-9 * (1 + max|component|)."""
    arr = _as_array4(v)
    return 1e-9 * (1.0 + float(np.max(np.abs(arr))))


def causal_classify(v, tol: float | None = None) -> CausalClass:
    """Classify v against the light cone.

    The tolerance is applied to the quadratic form and to the time
    component, so vectors within tol of the cone are tagged null and
    vectors with all components within tol of zero are tagged zero.
    """
    arr = _as_array4(v)
    if arr.ndim != 1:
        raise ValueError("causal_classify takes a single vector")
    if tol is None:
        tol = causal_tolerance(arr)
    if np.max(np.abs(arr)) <= tol:
        return CausalClass.ZERO
    q = float(np.dot(arr[:3], arr[:3]) - arr[3] ** 2)
    t = float(arr[3])
    if abs(q) <= tol:
        if t > tol:
            return CausalClass.FUTURE_NULL
        if t < -tol:
            return CausalClass.PAST_NULL
        # |t| <= tol together with q ~ 0 forces the spatial part ~ 0,
        # which the zero branch above already caught; fall through safely.
        return CausalClass.ZERO
    if q < 0.0:
        return CausalClass.FUTURE_TIMELIKE if t > 0 else CausalClass.PAST_TIMELIKE
    return CausalClass.SPACELIKE


def hopf_eta(z: SpinorParameter) -> MinkowskiVector:
    """Map (z1, z2) to the closed future cone,

        eta(z) = (-(|z1|^2 - |z2|^2), -2 Re(z1 conj z2), 2 Im(z1 conj z2),
                  |z1|^2 + |z2|^2).

    The image is null for every z and zero only for z = 0; the map is onto
    the closed future cone.
    """
    a = abs(z.z1) ** 2
    b = abs(z.z2) ** 2
    cross = z.z1 * np.conj(z.z2)
    return MinkowskiVector(
        -(a - b), -2.0 * float(np.real(cross)), 2.0 * float(np.imag(cross)), a + b
    )


def sphere_direction(theta, phi):
    """Unit direction omega(theta, phi); broadcasts over array input and
    returns an array with trailing dimension 3."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    st = np.sin(theta)
    return np.stack(
        np.broadcast_arrays(st * np.cos(phi), st * np.sin(phi), np.cos(theta)), axis=-1
    )


def hyperboloid_point(r: float, theta: float, phi: float) -> MinkowskiVector:
    """Point (sinh r * omega(theta, phi), cosh r) of the upper hyperboloid;
    requires r >= 0."""
    if r < 0:
        raise ValueError("hyperboloid radius must be nonnegative")
    w = sphere_direction(theta, phi)
    sr = np.sinh(r)
    return MinkowskiVector(
        float(sr * w[..., 0]), float(sr * w[..., 1]), float(sr * w[..., 2]), float(np.cosh(r))
    )


@dataclass(frozen=True)
class LorentzMap:
    """A 4x4 matrix Lambda with Lambda^T G Lambda = G (validated on
    construction).  Use boost() and rotation() to build generators; general
    matrices are accepted but never synthesized here."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=float)
        if mat.shape != (4, 4):
            raise ValueError("Lorentz map must be a 4x4 matrix")
        defect = mat.T @ MINKOWSKI_METRIC @ mat - MINKOWSKI_METRIC
        if np.max(np.abs(defect)) > LORENTZ_MAP_TOL:
            raise ValueError(
                "matrix does not preserve the pairing (defect %.3e)"
                % np.max(np.abs(defect))
            )
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def is_restricted(self) -> bool:
        """Proper (det = +1) and orthochronous (t-t entry >= 1)."""
        return (
            abs(np.linalg.det(self.matrix) - 1.0) <= 1e-9
            and self.matrix[3, 3] >= 1.0 - 1e-12
        )

    def compose(self, other: "LorentzMap") -> "LorentzMap":
        return LorentzMap(self.matrix @ other.matrix)

    def __matmul__(self, other: "LorentzMap") -> "LorentzMap":
        return self.compose(other)

    def inverse(self) -> "LorentzMap":
        # G Lambda^T G is the inverse of any pairing-preserving Lambda.
        return LorentzMap(MINKOWSKI_METRIC @ self.matrix.T @ MINKOWSKI_METRIC)

    @classmethod
    def identity(cls) -> "LorentzMap":
        return cls(np.eye(4))


def boost(axis: int, rapidity: float) -> LorentzMap:
    """Boost of given rapidity mixing spatial axis (0, 1 or 2) with time."""
    if axis not in (0, 1, 2):
        raise ValueError("boost axis must be 0, 1 or 2")
    m = np.eye(4)
    ch, sh = np.cosh(rapidity), np.sinh(rapidity)
    m[axis, axis] = ch
    m[3, 3] = ch
    m[axis, 3] = sh
    m[3, axis] = sh
    return LorentzMap(m)


def rotation(axis: int, angle: float) -> LorentzMap:
    """Spatial rotation by angle about spatial axis (0, 1 or 2)."""
    if axis not in (0, 1, 2):
        raise ValueError("rotation axis must be 0, 1 or 2")
    i, j = [k for k in range(3) if k != axis]
    m = np.eye(4)
    c, s = np.cos(angle), np.sin(angle)
    m[i, i] = c
    m[j, j] = c
    m[i, j] = -s
    m[j, i] = s
    return LorentzMap(m)


def apply_lorentz(lam: LorentzMap, v):
    """Apply Lambda to a MinkowskiVector (returns one) or to an array with
    trailing dimension 4 (returns an array)."""
    if not isinstance(lam, LorentzMap):
        raise TypeError("first argument must be a LorentzMap")
    if isinstance(v, MinkowskiVector):
        return MinkowskiVector.from_array(lam.matrix @ v.as_array())
    arr = _as_array4(v)
    return np.einsum("ab,...b->...a", lam.matrix, arr)
