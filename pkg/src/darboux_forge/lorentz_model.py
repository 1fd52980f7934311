"""Light-cone model of Euclidean space inside Minkowski space.

Euclidean (n+1)-space is realized as the paraboloid section

    E = { p in light cone : <p, w> = 1 }

of the light cone of an (n+3)-dimensional Minkowski space, via

    psi(x) = p0 + D x - (1/2)|x|^2 w.

Hyperspheres of R^(n+1) then correspond to unit-norm vectors v of the
Lorentzian sphere { <v,v> = 1 }: a point q lies on the sphere represented
by v exactly when <v, psi(q)> = 0.  This module holds the embedding, the
sphere <-> vector dictionary, and the congruence-map metric identity.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "HyperplaneError",
    "EuclideanEmbedding",
    "SphereElement",
    "minkowski_dot",
    "standard_embedding",
    "embed_point",
    "embed_tangent",
    "sphere_to_lorentz",
    "lorentz_to_sphere",
    "congruence_map",
    "congruence_induced_metric",
    "congruence_regularity",
]


class HyperplaneError(ValueError):
    """Unit vector orthogonal to w: represents a hyperplane, not a sphere."""


def minkowski_dot(x: np.ndarray, y: np.ndarray) -> float:
    """Scalar product of signature (+,...,+,-): last coordinate timelike."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    return float(np.dot(x[:-1], y[:-1]) - x[-1] * y[-1])


def _metric_diag(m: int) -> np.ndarray:
    g = np.ones(m)
    g[-1] = -1.0
    return g


@dataclass(frozen=True)
class EuclideanEmbedding:
    """Triple (p0, w, D) realizing R^(n+1) on the light cone.

    p0, w are null with <p0,w> = 1, and D maps R^(n+1) isometrically onto
    the Minkowski-orthogonal complement of span{p0, w}.
    """

    p0: np.ndarray
    w: np.ndarray
    D: np.ndarray  # (n+3, n+1), columns spacelike orthonormal

    @property
    def n_ambient(self) -> int:
        return self.D.shape[1]

    def validate(self, tol: float = 1e-12) -> None:
        p0, w, D = self.p0, self.w, self.D
        if abs(minkowski_dot(p0, p0)) > tol or abs(minkowski_dot(w, w)) > tol:
            raise ValueError("p0 and w must be null")
        if abs(minkowski_dot(p0, w) - 1.0) > tol:
            raise ValueError("<p0, w> must equal 1")
        g = _metric_diag(D.shape[0])
        gram = D.T @ (g[:, None] * D)
        if not np.allclose(gram, np.eye(D.shape[1]), atol=tol):
            raise ValueError("D must be isometric for the Minkowski product")
        for v in (p0, w):
            if np.max(np.abs(D.T @ (g * v))) > tol:
                raise ValueError("range of D must be orthogonal to p0 and w")

    def project_spacelike(self, v: np.ndarray) -> np.ndarray:
        """Inverse of D on its range: x with D x = component of v in range(D)."""
        g = _metric_diag(self.D.shape[0])
        return self.D.T @ (g * v)


def standard_embedding(n_ambient: int) -> EuclideanEmbedding:
    """Default triple: D = inclusion into the first n+1 coordinates,
    p0 = (0,..,0, 1/2, 1/2), w = (0,..,0, 1, -1)."""
    m = n_ambient + 2
    p0 = np.zeros(m)
    p0[-2:] = 0.5
    w = np.zeros(m)
    w[-2] = 1.0
    w[-1] = -1.0
    D = np.zeros((m, n_ambient))
    D[:n_ambient, :] = np.eye(n_ambient)
    return EuclideanEmbedding(p0=p0, w=w, D=D)


def embed_point(E: EuclideanEmbedding, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return E.p0 + E.D @ x - 0.5 * float(np.dot(x, x)) * E.w


def embed_tangent(E: EuclideanEmbedding, x: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Differential of the embedding at x applied to v: D v - <x,v> w."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    return E.D @ v - float(np.dot(x, v)) * E.w


@dataclass(frozen=True)
class SphereElement:
    """Hypersphere of R^(n+1) with an orientation (sign of the unit normal;
    +1 means inward) and its unit-norm Lorentz representative."""

    center: np.ndarray
    radius: float
    orientation: int
    lorentz_rep: np.ndarray

    def to_json(self) -> dict:
        return {
            "center": [float(c) for c in self.center],
            "radius": float(self.radius),
            "orientation": int(self.orientation),
        }


def sphere_to_lorentz(
    E: EuclideanEmbedding, center: np.ndarray, radius: float, orientation: int = 1
) -> SphereElement:
    """Unit Lorentz representative of a hypersphere.

    With the inward normal (orientation +1) the representative is
    (1/R) psi(center) + (R/2) w, which equals H psi(f) + psi_* N for every
    point f of the sphere (H = 1/R, N inward).  Orientation -1 negates it.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    if orientation not in (-1, 1):
        raise ValueError("orientation must be +1 or -1")
    center = np.asarray(center, dtype=float)
    v = (embed_point(E, center) + 0.5 * radius**2 * E.w) / radius
    return SphereElement(
        center=center,
        radius=float(radius),
        orientation=orientation,
        lorentz_rep=orientation * v,
    )


def lorentz_to_sphere(
    E: EuclideanEmbedding, v: np.ndarray, tol: float = 1e-9
) -> SphereElement:
    """Inverse dictionary.  Raises HyperplaneError when <v,w> = 0."""
    v = np.asarray(v, dtype=float)
    if abs(minkowski_dot(v, v) - 1.0) > tol:
        raise ValueError("not a unit vector of the Lorentzian sphere")
    vw = minkowski_dot(v, E.w)
    if abs(vw) < 1e-12:
        raise HyperplaneError("vector represents a hyperplane (orthogonal to w)")
    radius = 1.0 / abs(vw)
    orientation = 1 if vw > 0 else -1
    vp = minkowski_dot(v, E.p0)
    spacelike = v - vw * E.p0 - vp * E.w
    center = orientation * radius * E.project_spacelike(spacelike)
    return sphere_to_lorentz(E, center, radius, orientation)


def congruence_map(
    E: EuclideanEmbedding, point: np.ndarray, normal: np.ndarray, alpha: float
) -> np.ndarray:
    """Evaluate s = alpha psi(f) + psi_* N, the tangent-sphere family of
    radius 1/alpha as a map into the Lorentzian sphere."""
    return alpha * embed_point(E, point) + embed_tangent(E, point, normal)


def congruence_induced_metric(jet, forms, alpha: float, X: np.ndarray, Y: np.ndarray) -> float:
    """<(A - alpha I)X, (A - alpha I)Y> in the induced metric: the metric
    pulled back by the congruence map."""
    B = forms.shape - alpha * np.eye(forms.shape.shape[0])
    BX = B @ np.asarray(X, dtype=float)
    BY = B @ np.asarray(Y, dtype=float)
    return float(BX @ forms.metric @ BY)


def congruence_regularity(forms, alpha: float, tol: float) -> bool:
    """True iff alpha stays away from every principal curvature by > tol."""
    return bool(np.min(np.abs(forms.principal_curvatures - alpha)) > tol)
