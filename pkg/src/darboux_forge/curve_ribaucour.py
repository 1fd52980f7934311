"""Ribaucour transform machinery for unit-speed curves in the three model
geometries: the plane (c = 0), the unit sphere in R^3 (c = 1) and the
hyperboloid model of the hyperbolic plane in Lorentz 3-space (c = -1).

The driving system for the auxiliary functions h = (h1, h2, h3) along a
curve of geodesic curvature k is

    h1' = k h2 + (A - c) h3,   h2' = -k h1,   h3' = h1,

whose first integral h1^2 + h2^2 + (c - A) h3^2 is pinned to zero for the
transform to land back in the same geometry.  The transformed curve is the
reflection of the position in the vector h1 T + h2 n + c h3 phi.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Sequence, Union

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.interpolate import CubicSpline

from .lorentz_model import HyperplaneError

__all__ = [
    "CurveQc",
    "RibaucourState",
    "EnvelopedCircle",
    "metric_diag",
    "space_dot",
    "ode_rhs",
    "first_integral",
    "project_initial_state",
    "integrate_states",
    "reflection_vector",
    "ribaucour_curve_transform",
    "enveloped_circle",
    "plane_circle",
    "plane_ellipse",
    "sphere_circle",
    "hyperbolic_circle",
    "horocycle",
    "from_curvature",
    "curve_from_spec",
]

H3_MIN = 1e-8


def metric_diag(c: float) -> np.ndarray:
    """Diagonal of the ambient inner product for the model of curvature c."""
    if c == 0:
        return np.ones(2)
    if c > 0:
        return np.ones(3)
    return np.array([1.0, 1.0, -1.0])


def space_dot(c: float, x: np.ndarray, y: np.ndarray) -> float:
    return float(np.sum(metric_diag(c) * np.asarray(x) * np.asarray(y)))


def _rot90(v: np.ndarray) -> np.ndarray:
    return np.array([-v[1], v[0]])


def _model_normal(c: float, phi: np.ndarray, tang: np.ndarray) -> np.ndarray:
    """Unit normal completing {tangent, normal} positively in the model."""
    if c == 0:
        return _rot90(tang)
    if c > 0:
        return np.cross(phi, tang)
    # Lorentz cross: <G(a x b), w>_L = det[a, b, w]
    return metric_diag(c) * np.cross(phi, tang)


@dataclass(frozen=True)
class CurveQc:
    """Unit-speed curve in the model space of curvature c.

    position/tangent/normal_frame/curvature are callables of arclength.
    """

    c: float
    position: Callable[[float], np.ndarray]
    tangent: Callable[[float], np.ndarray]
    normal_frame: Callable[[float], np.ndarray]
    curvature: Callable[[float], float]
    name: str = ""

    def frenet(self, s: float):
        return (self.position(s), self.tangent(s),
                self.normal_frame(s), self.curvature(s))


@dataclass(frozen=True)
class RibaucourState:
    s: float
    h: np.ndarray
    A: float


@dataclass(frozen=True)
class EnvelopedCircle:
    """Circle touched by both curves at parameter s.

    model "plane": Euclidean data in R^2.
    model "ambient-sphere": Euclidean center/radius in R^3 of the sphere whose
        intersection with the unit sphere is the circle.
    model "half-plane": Euclidean data in upper half-plane coordinates.
    """

    c: float
    center: np.ndarray
    radius: float
    model: str


def ode_rhs(state: RibaucourState, k: float, c: float) -> np.ndarray:
    h1, h2, h3 = state.h
    return np.array([k * h2 + (state.A - c) * h3, -k * h1, h1])


def first_integral(h: Sequence[float], A: float, c: float) -> float:
    h1, h2, h3 = h
    return float(h1 * h1 + h2 * h2 + (c - A) * h3 * h3)


def project_initial_state(h0: Sequence[float], A: float, c: float) -> np.ndarray:
    """Rescale (h1, h2) so the first integral vanishes; h3 is kept."""
    if A <= c:
        raise ValueError("infeasible: A must exceed c")
    h1, h2, h3 = (float(v) for v in h0)
    if abs(h3) < H3_MIN:
        raise ValueError("h3 too close to zero: transform undefined")
    plane = h1 * h1 + h2 * h2
    if plane <= 0:
        raise ValueError("h1 and h2 cannot both vanish")
    t = math.sqrt((A - c) * h3 * h3 / plane)
    return np.array([t * h1, t * h2, h3])


def _rk4(curve: CurveQc, h0: np.ndarray, A: float, s0: float, s1: float,
         nsteps: int) -> np.ndarray:
    # extended precision: solutions grow like e^(sqrt(A-c) s) along the
    # first-integral cone and float64 roundoff alone would breach the
    # drift budget at that scale
    c = curve.c
    step = np.longdouble(s1 - s0) / nsteps
    out = np.empty((nsteps + 1, 3), dtype=np.longdouble)
    out[0] = h0
    h = np.array(h0, dtype=np.longdouble)
    gap = np.longdouble(A - c)

    def f(s, h):
        k = np.longdouble(curve.curvature(float(s)))
        return np.array([k * h[1] + gap * h[2], -k * h[0], h[0]])

    s = np.longdouble(s0)
    for i in range(nsteps):
        k1 = f(s, h)
        k2 = f(s + step / 2, h + step / 2 * k1)
        k3 = f(s + step / 2, h + step / 2 * k2)
        k4 = f(s + step, h + step * k3)
        h = h + (step / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        s = np.longdouble(s0) + (i + 1) * step
        out[i + 1] = h
    return out


def integrate_states(
    curve: CurveQc,
    h0: Sequence[float],
    A: float,
    s_range: tuple,
    step: float = 1e-3,
    drift_tol: float = 1e-9,
) -> List[RibaucourState]:
    """Integrate the driving system along the curve with classical RK4.

    The step is halved (at most eight times) until the first integral drifts
    by no more than drift_tol from its initial value.
    """
    if A <= curve.c:
        raise ValueError("infeasible: A must exceed c")
    s0, s1 = float(s_range[0]), float(s_range[1])
    if not s1 > s0:
        raise ValueError("empty arclength range")
    h0 = np.asarray(h0, dtype=np.longdouble)
    k0 = h0[0] ** 2 + h0[1] ** 2 + np.longdouble(curve.c - A) * h0[2] ** 2
    base = max(1, math.ceil((s1 - s0) / step))
    for refine in range(9):
        nsteps = base * 2**refine
        traj = _rk4(curve, h0, A, s0, s1, nsteps)
        drift = float(np.abs(traj[:, 0] ** 2 + traj[:, 1] ** 2
                             + np.longdouble(curve.c - A) * traj[:, 2] ** 2
                             - k0).max())
        if drift <= drift_tol:
            break
    else:
        raise RuntimeError(f"first integral drift {drift:.3e} exceeds {drift_tol}")
    grid = np.linspace(s0, s1, nsteps + 1)
    # h stays in extended precision so the stored first integral is honest
    return [RibaucourState(s=float(s), h=traj[i].copy(), A=A)
            for i, s in enumerate(grid)]


def reflection_vector(curve: CurveQc, state: RibaucourState) -> np.ndarray:
    """h1 T + h2 n + c h3 phi at the state's arclength."""
    phi, tang, nor, _ = curve.frenet(state.s)
    h1, h2, h3 = state.h
    return h1 * tang + h2 * nor + curve.c * h3 * phi


def ribaucour_curve_transform(curve: CurveQc,
                              states: List[RibaucourState]) -> CurveQc:
    """Transformed curve with analytic first and second derivatives.

    h is interpolated between the integration nodes by a cubic spline; the
    position is the reflection phi - 2 h3 gamma / <gamma, gamma> and the
    derivatives use the on-shell identities gamma' = A h3 T and
    <gamma, gamma> = A h3^2.
    """
    if len(states) < 2:
        raise ValueError("need at least two states")
    c = curve.c
    A = states[0].A
    s_nodes = np.array([st.s for st in states])
    H = np.array([st.h for st in states], dtype=float)
    if np.abs(H[:, 2]).min() < H3_MIN:
        raise ValueError("h3 too close to zero: transform undefined")
    spline = CubicSpline(s_nodes, H)
    lo, hi = s_nodes[0], s_nodes[-1]
    gdiag = metric_diag(c)

    def h_at(s: float) -> np.ndarray:
        if s < lo - 1e-9 or s > hi + 1e-9:
            raise ValueError(f"arclength {s} outside integrated range")
        return spline(s)

    def position(s: float) -> np.ndarray:
        h1, h2, h3 = h_at(s)
        phi, tang, nor, _ = curve.frenet(s)
        gamma = h1 * tang + h2 * nor + c * h3 * phi
        gg = float(np.sum(gdiag * gamma * gamma))
        return phi - (2 * h3 / gg) * gamma

    def tangent(s: float) -> np.ndarray:
        h1, h2, h3 = h_at(s)
        phi, tang, nor, _ = curve.frenet(s)
        gamma = h1 * tang + h2 * nor + c * h3 * phi
        return -tang + (2 * h1 / (A * h3 * h3)) * gamma

    def second(s: float) -> np.ndarray:
        h1, h2, h3 = h_at(s)
        phi, tang, nor, k = curve.frenet(s)
        gamma = h1 * tang + h2 * nor + c * h3 * phi
        h1p = k * h2 + (A - c) * h3
        return (-k * nor + c * phi
                + (2 / A) * (h1p - 2 * h1 * h1 / h3) * gamma / (h3 * h3)
                + (2 * h1 / h3) * tang)

    def normal_frame(s: float) -> np.ndarray:
        return _model_normal(c, position(s), tangent(s))

    def curvature(s: float) -> float:
        return float(np.sum(gdiag * second(s) * normal_frame(s)))

    return CurveQc(c=c, position=position, tangent=tangent,
                   normal_frame=normal_frame, curvature=curvature,
                   name=f"ribaucour({curve.name})")


def _two_tangent_circle(p, t, pt, tt):
    """Center and radius of the circle through p and pt tangent to t and tt."""
    m = np.column_stack([_rot90(t), -_rot90(tt)])
    rhs = pt - p
    scale = max(1.0, float(np.abs(m).max()))
    if abs(np.linalg.det(m)) < 1e-12 * scale * scale:
        raise HyperplaneError("tangent lines parallel: enveloped circle is a line")
    rho = np.linalg.solve(m, rhs)
    center = p + rho[0] * _rot90(t)
    return center, abs(float(rho[0]))


def _halfplane_point(x: np.ndarray) -> np.ndarray:
    d = x[2] - x[1]
    if d <= 1e-12:
        raise ValueError("point outside the hyperboloid chart")
    return np.array([x[0] / d, 1.0 / d])


def _halfplane_tangent(x: np.ndarray, v: np.ndarray) -> np.ndarray:
    d = x[2] - x[1]
    vd = v[2] - v[1]
    return np.array([v[0] / d - x[0] * vd / d**2, -vd / d**2])


def enveloped_circle(curve: CurveQc, transformed: CurveQc,
                     s: float) -> EnvelopedCircle:
    """Circle tangent to both curves at the corresponding points.

    For c = 1 the circle is returned as the Euclidean sphere data (center
    m/d, radius sqrt(1-d^2)/|d|) of its supporting plane <x, m> = d; a great
    circle (d ~ 0) has no such sphere and raises HyperplaneError.
    """
    p = curve.position(s)
    t = curve.tangent(s)
    pt = transformed.position(s)
    tt = transformed.tangent(s)
    c = curve.c
    if c == 0:
        center, radius = _two_tangent_circle(p, t, pt, tt)
        return EnvelopedCircle(c=c, center=center, radius=radius, model="plane")
    if c > 0:
        rows = np.array([
            [p[0], p[1], p[2], -1.0],
            [pt[0], pt[1], pt[2], -1.0],
            [t[0], t[1], t[2], 0.0],
            [tt[0], tt[1], tt[2], 0.0],
        ])
        _, _, vh = np.linalg.svd(rows)
        null = vh[-1]
        m, d = null[:3], null[3]
        norm = np.linalg.norm(m)
        if norm < 1e-14:
            raise HyperplaneError("degenerate plane section")
        m, d = m / norm, d / norm
        if abs(d) < 1e-9:
            raise HyperplaneError("great circle: no finite supporting sphere")
        center = m / d
        radius = math.sqrt(max(1.0 - d * d, 0.0)) / abs(d)
        return EnvelopedCircle(c=c, center=center, radius=radius,
                               model="ambient-sphere")
    hp = _halfplane_point(p)
    ht = _halfplane_tangent(p, t)
    hpt = _halfplane_point(pt)
    htt = _halfplane_tangent(pt, tt)
    ht = ht / np.linalg.norm(ht)
    htt = htt / np.linalg.norm(htt)
    center, radius = _two_tangent_circle(hp, ht, hpt, htt)
    return EnvelopedCircle(c=c, center=center, radius=radius, model="half-plane")


# ---------------------------------------------------------------------------
# stock curves

def plane_circle(radius: float = 1.0) -> CurveQc:
    if radius <= 0:
        raise ValueError("radius must be positive")
    r = float(radius)

    def position(s):
        return np.array([r * math.cos(s / r), r * math.sin(s / r)])

    def tangent(s):
        return np.array([-math.sin(s / r), math.cos(s / r)])

    return CurveQc(c=0.0, position=position, tangent=tangent,
                   normal_frame=lambda s: _rot90(tangent(s)),
                   curvature=lambda s: 1.0 / r,
                   name=f"circle:R={r:g}")


def plane_ellipse(a: float = 2.0, b: float = 1.0,
                  laps: float = 2.5) -> CurveQc:
    """Ellipse (a cos t, b sin t) reparameterized by arclength."""
    if a <= 0 or b <= 0:
        raise ValueError("semi-axes must be positive")

    def speed(t):
        return math.hypot(a * math.sin(t), b * math.cos(t))

    perimeter = quad(speed, 0, 2 * math.pi, limit=200)[0]
    span = laps * perimeter
    fwd = solve_ivp(lambda s, t: [1.0 / speed(t[0])], (0, span), [0.0],
                    dense_output=True, rtol=1e-12, atol=1e-12,
                    max_step=perimeter / 50)
    bwd = solve_ivp(lambda s, t: [1.0 / speed(t[0])], (0, -span), [0.0],
                    dense_output=True, rtol=1e-12, atol=1e-12,
                    max_step=perimeter / 50)

    def t_of(s):
        if s >= 0:
            return float(fwd.sol(min(s, span))[0])
        return float(bwd.sol(max(s, -span))[0])

    def position(s):
        t = t_of(s)
        return np.array([a * math.cos(t), b * math.sin(t)])

    def tangent(s):
        t = t_of(s)
        v = np.array([-a * math.sin(t), b * math.cos(t)])
        return v / np.linalg.norm(v)

    def curvature(s):
        t = t_of(s)
        return a * b / (a * a * math.sin(t) ** 2 + b * b * math.cos(t) ** 2) ** 1.5

    return CurveQc(c=0.0, position=position, tangent=tangent,
                   normal_frame=lambda s: _rot90(tangent(s)),
                   curvature=curvature, name=f"ellipse:a={a:g},b={b:g}")


def sphere_circle(height: float = 0.5) -> CurveQc:
    """Small circle z = height on the unit sphere; geodesic curvature h/rho."""
    if not -1 < height < 1:
        raise ValueError("height must lie strictly between -1 and 1")
    d = float(height)
    rho = math.sqrt(1.0 - d * d)

    def position(s):
        return np.array([rho * math.cos(s / rho), rho * math.sin(s / rho), d])

    def tangent(s):
        return np.array([-math.sin(s / rho), math.cos(s / rho), 0.0])

    def normal_frame(s):
        return np.cross(position(s), tangent(s))

    return CurveQc(c=1.0, position=position, tangent=tangent,
                   normal_frame=normal_frame,
                   curvature=lambda s: d / rho,
                   name=f"sphere_circle:d={d:g}")


def hyperbolic_circle(radius: float = 1.0) -> CurveQc:
    """Metric circle of hyperbolic radius r about the hyperboloid vertex."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    r = float(radius)
    sh, ch = math.sinh(r), math.cosh(r)

    def position(s):
        return np.array([sh * math.cos(s / sh), sh * math.sin(s / sh), ch])

    def tangent(s):
        return np.array([-math.sin(s / sh), math.cos(s / sh), 0.0])

    def normal_frame(s):
        return metric_diag(-1.0) * np.cross(position(s), tangent(s))

    return CurveQc(c=-1.0, position=position, tangent=tangent,
                   normal_frame=normal_frame,
                   curvature=lambda s: ch / sh,
                   name=f"hyperbolic_circle:r={r:g}")


def horocycle() -> CurveQc:
    """Unit-speed horocycle on the hyperboloid; constant curvature 1."""

    def position(s):
        return np.array([s, s * s / 2, s * s / 2 + 1.0])

    def tangent(s):
        return np.array([1.0, s, s])

    def normal_frame(s):
        return metric_diag(-1.0) * np.cross(position(s), tangent(s))

    def curvature(s):
        n = normal_frame(s)
        return float(np.sum(metric_diag(-1.0) * np.array([0.0, 1.0, 1.0]) * n))

    return CurveQc(c=-1.0, position=position, tangent=tangent,
                   normal_frame=normal_frame, curvature=curvature,
                   name="horocycle")


def from_curvature(c: float, k: Union[float, Callable[[float], float]],
                   s_range: tuple = (-7.0, 7.0)) -> CurveQc:
    """Curve with prescribed geodesic curvature, by integrating the frame
    equations phi' = T, T' = k n - c phi, n' = -k T from a canonical start."""
    kf = k if callable(k) else (lambda s, _k=float(k): _k)
    dim = 2 if c == 0 else 3
    if c == 0:
        y0 = np.array([0.0, 0.0, 1.0, 0.0, 0.0, 1.0])
    else:
        y0 = np.array([0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0])

    def rhs(s, y):
        phi, tang, nor = y[:dim], y[dim:2 * dim], y[2 * dim:]
        ks = kf(s)
        return np.concatenate([tang, ks * nor - c * phi, -ks * tang])

    lo, hi = float(s_range[0]), float(s_range[1])
    fwd = solve_ivp(rhs, (0.0, hi), y0, dense_output=True,
                    rtol=1e-12, atol=1e-13, max_step=0.1)
    bwd = solve_ivp(rhs, (0.0, lo), y0, dense_output=True,
                    rtol=1e-12, atol=1e-13, max_step=0.1)

    def state(s):
        if s >= 0:
            return fwd.sol(min(s, hi))
        return bwd.sol(max(s, lo))

    return CurveQc(
        c=float(c),
        position=lambda s: state(s)[:dim],
        tangent=lambda s: state(s)[dim:2 * dim],
        normal_frame=lambda s: state(s)[2 * dim:],
        curvature=lambda s: float(kf(s)),
        name="from_curvature",
    )


_CURVE_FACTORIES = {
    "circle": (plane_circle, {"R": "radius", "radius": "radius"}),
    "ellipse": (plane_ellipse, {"a": "a", "b": "b"}),
    "sphere_circle": (sphere_circle, {"d": "height", "height": "height"}),
    "hyperbolic_circle": (hyperbolic_circle, {"r": "radius", "radius": "radius"}),
    "horocycle": (horocycle, {}),
}


def curve_from_spec(text: str) -> CurveQc:
    """Parse "name" or "name:key=val,key=val" into a stock curve."""
    name, _, args = text.partition(":")
    name = name.strip()
    if name not in _CURVE_FACTORIES:
        known = ", ".join(sorted(_CURVE_FACTORIES))
        raise ValueError(f"unknown curve {name!r} (known: {known})")
    factory, keymap = _CURVE_FACTORIES[name]
    kwargs = {}
    if args.strip():
        for item in args.split(","):
            key, _, val = item.partition("=")
            key = key.strip()
            if key not in keymap:
                raise ValueError(f"unknown parameter {key!r} for curve {name!r}")
            kwargs[keymap[key]] = float(val)
    return factory(**kwargs)
