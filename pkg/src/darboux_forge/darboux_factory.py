"""Hypersurface pairs enveloping a common sphere congruence.

Three constructions, each driven by a curve-level Ribaucour transform:

  cylinder   over a plane curve,            f(s, t)    = (phi(s), t)
  cone       over a unit-sphere curve,      f(s, t, u) = (t gamma(s), u), t > 0
  rotation   over a hyperbolic-plane curve, f(s, y)    = (g1(s), g2(s) w(y))

with w(y) the inverse stereographic chart of the unit sphere factor.  The
partner hypersurface is the same construction over the transformed curve;
the enveloped circles of the curve pair lift to the sphere congruence.
"""
from __future__ import annotations

import math
from typing import Callable, List, Optional, Sequence

import numpy as np
import scipy.linalg
from scipy.optimize import least_squares

from .curve_ribaucour import (
    CurveQc,
    EnvelopedCircle,
    RibaucourState,
    curve_from_spec,
    enveloped_circle,
    integrate_states,
    project_initial_state,
    ribaucour_curve_transform,
)
from .hypersurface import ImmersionJet, ParamImmersion
from .lorentz_model import SphereElement, sphere_to_lorentz, standard_embedding

__all__ = [
    "DarbouxPair",
    "build_cylinder",
    "build_cone_cylinder",
    "build_rotation",
    "lift_congruence",
    "darboux_partner",
    "build_pair_from_inputs",
    "halfplane_profile",
    "mobius_mismatch",
    "FAMILIES",
]

FAMILIES = ("cylinder", "cone", "rotation")

_FAMILY_CURVE_C = {"cylinder": 0.0, "cone": 1.0, "rotation": -1.0}


# ---------------------------------------------------------------------------
# sphere-factor chart (inverse stereographic projection, any dimension)

def _stereo_point(y: np.ndarray) -> np.ndarray:
    rho = float(np.dot(y, y))
    q = 1.0 + rho
    return np.concatenate([2.0 * y, [2.0 - q]]) / q


def _stereo_first(y: np.ndarray) -> np.ndarray:
    """Columns d omega / d y_i; shape (m+1, m)."""
    m = y.size
    rho = float(np.dot(y, y))
    q = 1.0 + rho
    out = np.zeros((m + 1, m))
    for i in range(m):
        out[:m, i] = -4.0 * y[i] * y / q**2
        out[i, i] += 2.0 / q
        out[m, i] = -4.0 * y[i] / q**2
    return out


def _stereo_second(y: np.ndarray) -> np.ndarray:
    """d^2 omega; shape (m+1, m, m)."""
    m = y.size
    rho = float(np.dot(y, y))
    q = 1.0 + rho
    out = np.zeros((m + 1, m, m))
    for i in range(m):
        for j in range(m):
            blk = 16.0 * y[i] * y[j] * y / q**3
            blk[i] += -4.0 * y[j] / q**2
            blk[j] += -4.0 * y[i] / q**2
            if i == j:
                blk += -4.0 * y / q**2
            out[:m, i, j] = blk
            out[m, i, j] = 16.0 * y[i] * y[j] / q**3
            if i == j:
                out[m, i, j] += -4.0 / q**2
    return out


# ---------------------------------------------------------------------------
# half-plane profile of a Lorentz hyperboloid curve

def halfplane_profile(curve: CurveQc) -> Callable[[float], tuple]:
    """Map a c = -1 curve to upper half-plane coordinates.

    Returns a callable s -> (g, g', g'') of 2-vectors.  The chart is
    (x1, x2, x3) -> (x1/D, 1/D) with D = x3 - x2, positive on the upper
    hyperboloid sheet; unit hyperbolic speed makes |g'| equal the height g2.
    """
    if curve.c >= 0:
        raise ValueError("half-plane profile needs a curve with c = -1")

    def profile(s: float):
        phi, tang, nor, k = curve.frenet(s)
        acc = k * nor + phi  # phi'' = k n - c phi with c = -1
        d = phi[2] - phi[1]
        if d <= 1e-12:
            raise ValueError("curve leaves the upper hyperboloid sheet chart")
        td = tang[2] - tang[1]
        ad = acc[2] - acc[1]
        g = np.array([phi[0] / d, 1.0 / d])
        gp = np.array([tang[0] / d - phi[0] * td / d**2, -td / d**2])
        gpp = np.array([
            -2.0 * tang[0] * td / d**2 + 2.0 * phi[0] * td**2 / d**3
            + acc[0] / d - phi[0] * ad / d**2,
            2.0 * td**2 / d**3 - ad / d**2,
        ])
        return g, gp, gpp

    return profile


# ---------------------------------------------------------------------------
# surface builders

def _curve_second(curve: CurveQc, s: float) -> np.ndarray:
    phi, tang, nor, k = curve.frenet(s)
    return k * nor - curve.c * phi


def build_cylinder(plane_curve: CurveQc, n: int = 3,
                   s_range: tuple = (-10.0, 10.0)) -> ParamImmersion:
    """Cylinder (phi(s), t) in R^(n+1) over a plane curve; params (s, t)."""
    if plane_curve.c != 0:
        raise ValueError("cylinder family needs a plane curve (c = 0)")
    if n < 2:
        raise ValueError("hypersurface dimension must be at least 2")
    m = n + 1

    def ev(u):
        s, rest = u[0], u[1:]
        return np.concatenate([plane_curve.position(s), rest])

    def jt(u):
        s, rest = u[0], u[1:]
        point = np.concatenate([plane_curve.position(s), rest])
        first = np.zeros((m, n))
        first[:2, 0] = plane_curve.tangent(s)
        for i in range(1, n):
            first[1 + i, i] = 1.0
        second = np.zeros((m, n, n))
        second[:2, 0, 0] = _curve_second(plane_curve, s)
        return ImmersionJet(param=np.asarray(u, float), point=point,
                            first=first, second=second)

    lo = np.concatenate([[s_range[0]], np.full(n - 1, -2.0)])
    hi = np.concatenate([[s_range[1]], np.full(n - 1, 2.0)])
    return ParamImmersion(n, ev, jt, domain=(lo, hi),
                          name=f"cylinder[{plane_curve.name}]")


def build_cone_cylinder(spherical_curve: CurveQc, n: int = 3,
                        s_range: tuple = (-10.0, 10.0)) -> ParamImmersion:
    """Cone (t gamma(s), u) over a unit-sphere curve; params (s, t, u), t > 0."""
    if spherical_curve.c <= 0:
        raise ValueError("cone family needs a spherical curve (c = 1)")
    if n < 2:
        raise ValueError("hypersurface dimension must be at least 2")
    m = n + 1

    def check_t(t):
        if t <= 0:
            raise ValueError("cone parameter t must be positive (vertex at t = 0)")

    def ev(u):
        s, t, rest = u[0], u[1], u[2:]
        check_t(t)
        return np.concatenate([t * spherical_curve.position(s), rest])

    def jt(u):
        s, t, rest = u[0], u[1], u[2:]
        check_t(t)
        gam = spherical_curve.position(s)
        point = np.concatenate([t * gam, rest])
        first = np.zeros((m, n))
        first[:3, 0] = t * spherical_curve.tangent(s)
        first[:3, 1] = gam
        for i in range(2, n):
            first[1 + i, i] = 1.0
        second = np.zeros((m, n, n))
        second[:3, 0, 0] = t * _curve_second(spherical_curve, s)
        second[:3, 0, 1] = spherical_curve.tangent(s)
        second[:3, 1, 0] = second[:3, 0, 1]
        return ImmersionJet(param=np.asarray(u, float), point=point,
                            first=first, second=second)

    lo = np.concatenate([[s_range[0], 0.25], np.full(n - 2, -2.0)])
    hi = np.concatenate([[s_range[1], 2.5], np.full(n - 2, 2.0)])
    return ParamImmersion(n, ev, jt, domain=(lo, hi),
                          name=f"cone[{spherical_curve.name}]")


def build_rotation(hyperbolic_curve: CurveQc, n: int = 3,
                   s_range: tuple = (-10.0, 10.0)) -> ParamImmersion:
    """Rotation hypersurface (g1(s), g2(s) omega(y)) over a c = -1 curve.

    The curve is converted to its upper half-plane profile internally; unit
    hyperbolic speed of the source curve is assumed (stock curves satisfy it).
    """
    if hyperbolic_curve.c >= 0:
        raise ValueError("rotation family needs a hyperbolic curve (c = -1)")
    if n < 2:
        raise ValueError("hypersurface dimension must be at least 2")
    m = n + 1
    profile = halfplane_profile(hyperbolic_curve)

    def ev(u):
        s, y = u[0], u[1:]
        g, _, _ = profile(s)
        w = _stereo_point(y)
        return np.concatenate([[g[0]], g[1] * w])

    def jt(u):
        s, y = u[0], np.asarray(u[1:], float)
        g, gp, gpp = profile(s)
        w = _stereo_point(y)
        dw = _stereo_first(y)
        d2w = _stereo_second(y)
        point = np.concatenate([[g[0]], g[1] * w])
        first = np.zeros((m, n))
        first[0, 0] = gp[0]
        first[1:, 0] = gp[1] * w
        first[1:, 1:] = g[1] * dw
        second = np.zeros((m, n, n))
        second[0, 0, 0] = gpp[0]
        second[1:, 0, 0] = gpp[1] * w
        second[1:, 0, 1:] = gp[1] * dw
        second[1:, 1:, 0] = gp[1] * dw
        second[1:, 1:, 1:] = g[1] * d2w
        return ImmersionJet(param=np.asarray(u, float), point=point,
                            first=first, second=second)

    lo = np.concatenate([[s_range[0]], np.full(n - 1, -1.3)])
    hi = np.concatenate([[s_range[1]], np.full(n - 1, 1.3)])
    return ParamImmersion(n, ev, jt, domain=(lo, hi),
                          name=f"rotation[{hyperbolic_curve.name}]")


_BUILDERS = {
    "cylinder": build_cylinder,
    "cone": build_cone_cylinder,
    "rotation": build_rotation,
}


def lift_congruence(family: str, circle: EnvelopedCircle, n: int = 3,
                    transverse: Optional[Sequence[float]] = None) -> SphereElement:
    """Lift a curve-level enveloped circle to a congruence sphere in R^(n+1).

    transverse holds the non-arclength parameters of the lift point
    (cylinder: translation block, cone: (t, translation), rotation: chart
    point y of the sphere factor); defaults pick the base member.
    """
    if family not in _BUILDERS:
        raise ValueError(f"unknown family {family!r}")
    emb = standard_embedding(n + 1)
    if family == "cylinder":
        rest = np.zeros(n - 1) if transverse is None else np.asarray(transverse, float)
        center = np.concatenate([circle.center, rest])
        radius = circle.radius
    elif family == "cone":
        if transverse is None:
            transverse = np.concatenate([[1.0], np.zeros(n - 2)])
        transverse = np.asarray(transverse, float)
        t, rest = transverse[0], transverse[1:]
        if t <= 0:
            raise ValueError("cone parameter t must be positive (vertex at t = 0)")
        center = np.concatenate([t * circle.center, rest])
        radius = t * circle.radius
    else:
        y = np.zeros(n - 1) if transverse is None else np.asarray(transverse, float)
        w = _stereo_point(y)
        center = np.concatenate([[circle.center[0]], circle.center[1] * w])
        radius = circle.radius
    return sphere_to_lorentz(emb, center, radius, orientation=1)


class DarbouxPair:
    """Two immersions of the same parameter domain enveloping one sphere
    congruence, together with the curve data that produced them."""

    def __init__(self, family: str, n: int, curve: CurveQc,
                 transformed: CurveQc, states: List[RibaucourState],
                 f: ParamImmersion, f_tilde: ParamImmersion,
                 inputs: Optional[dict] = None):
        self.family = family
        self.n = n
        self.curve = curve
        self.transformed = transformed
        self.states = states
        self.f = f
        self.f_tilde = f_tilde
        self.inputs = dict(inputs or {})
        self.s_range = (states[0].s, states[-1].s)
        if family == "rotation":
            self._profile = halfplane_profile(curve)
            self._profile_t = halfplane_profile(transformed)
        else:
            self._profile = None
            self._profile_t = None

    def base_circle(self, s: float) -> EnvelopedCircle:
        return enveloped_circle(self.curve, self.transformed, s)

    def congruence(self, s: float) -> SphereElement:
        return lift_congruence(self.family, self.base_circle(s), self.n)

    def sphere_at(self, u) -> SphereElement:
        u = np.asarray(u, dtype=float)
        return lift_congruence(self.family, self.base_circle(u[0]), self.n,
                               transverse=u[1:])

    def conformal_factor(self, s: float) -> float:
        """Exponent phi(s) with metric(f_tilde) = e^(2 phi) metric(f)."""
        if self.family != "rotation":
            return 0.0
        g2 = self._profile(s)[0][1]
        g2t = self._profile_t(s)[0][1]
        return math.log(g2t / g2)

    def to_json(self, table_rows: int = 121) -> dict:
        s0, s1 = self.s_range
        rows = min(table_rows, len(self.states))
        s_tab = np.linspace(s0, s1, rows)
        table = []
        for s in s_tab:
            el = self.congruence(float(s))
            table.append({"s": float(s), "center": el.center.tolist(),
                          "radius": float(el.radius)})
        return {
            "format": "darboux-forge/pair-v1",
            "family": self.family,
            "n": self.n,
            "curve": self.curve.name,
            "A": float(self.states[0].A),
            "h0": [float(v) for v in self.inputs.get("h0", self.states[0].h)],
            "s_range": [float(s0), float(s1)],
            "step": float(self.inputs.get("step", 1e-3)),
            "congruence": table,
            "conformal_factor": [
                {"s": float(s), "phi": self.conformal_factor(float(s))}
                for s in s_tab
            ],
        }


def darboux_partner(family: str, curve: CurveQc, A: float,
                    h0: Sequence[float], n: int = 3,
                    s_range: tuple = (0.0, 2 * math.pi),
                    step: float = 1e-3,
                    self_check: bool = True) -> DarbouxPair:
    """Run the full construction for one family and return the pair.

    h0 is projected onto the first-integral zero set before integrating.
    A quick envelope self-check runs on a coarse grid unless disabled; a
    failure there means the inputs left the admissible range and raises.
    """
    if family not in _BUILDERS:
        raise ValueError(f"unknown family {family!r} (known: {', '.join(FAMILIES)})")
    want_c = _FAMILY_CURVE_C[family]
    if curve.c != want_c:
        raise ValueError(f"family {family!r} needs a curve with c = {want_c:g}, "
                         f"got c = {curve.c:g}")
    h = project_initial_state(h0, A, curve.c)
    states = integrate_states(curve, h, A, s_range, step)
    transformed = ribaucour_curve_transform(curve, states)
    f = _BUILDERS[family](curve, n, s_range=s_range)
    f_tilde = _BUILDERS[family](transformed, n, s_range=s_range)
    pair = DarbouxPair(family, n, curve, transformed, states, f, f_tilde,
                       inputs={"h0": list(h0), "step": step, "A": A})
    if self_check:
        from . import verifier

        grid = verifier.sample_grid(pair, counts=(7, 3))
        for surf in (pair.f, pair.f_tilde):
            rep = verifier.check_envelope(surf, pair.sphere_at, grid)
            if not rep.passed:
                raise RuntimeError(
                    f"self-check failed for {surf.name}: envelope residual "
                    f"{rep.max_residual:.3e} exceeds {rep.tolerance:.1e}")
    return pair


def build_pair_from_inputs(family: str, curve_spec: str, A: float,
                           h0: Sequence[float], n: int = 3,
                           s_range: tuple = (0.0, 2 * math.pi),
                           step: float = 1e-3) -> DarbouxPair:
    """Deterministic rebuild from the primitive inputs (used for round trips)."""
    curve = curve_from_spec(curve_spec)
    return darboux_partner(family, curve, A, h0, n=n,
                           s_range=s_range, step=step)


# ---------------------------------------------------------------------------
# conformal-congruence mismatch

def _skew_from(params: np.ndarray, dim: int) -> np.ndarray:
    x = np.zeros((dim, dim))
    iu = np.triu_indices(dim, 1)
    x[iu] = params
    return x - x.T


def _umeyama(x: np.ndarray, y: np.ndarray, allow_reflection: bool):
    """Best similarity y ~ b + s R x in least squares."""
    mx, my = x.mean(axis=0), y.mean(axis=0)
    xc, yc = x - mx, y - my
    cov = yc.T @ xc / len(x)
    u, d, vt = np.linalg.svd(cov)
    sign = np.ones(len(d))
    if not allow_reflection and np.linalg.det(u @ vt) < 0:
        sign[-1] = -1.0
    rot = u @ np.diag(sign) @ vt
    var = float(np.sum(xc * xc)) / len(x)
    scale = float(np.sum(d * sign)) / var if var > 0 else 1.0
    if scale <= 0:
        scale = 1e-6
    return rot, scale, my - scale * rot @ mx


def _mobius_apply(params: np.ndarray, x: np.ndarray, dim: int,
                  inversion: bool, flip: bool) -> np.ndarray:
    nrot = dim * (dim - 1) // 2
    b = params[:dim]
    logs = params[dim]
    q = scipy.linalg.expm(_skew_from(params[dim + 1:dim + 1 + nrot], dim))
    if inversion:
        p0 = params[dim + 1 + nrot:]
        z = x - p0
        z = z / np.maximum(np.sum(z * z, axis=1, keepdims=True), 1e-14)
    else:
        z = x
    if flip:
        z = z.copy()
        z[:, -1] = -z[:, -1]
    return b + math.exp(logs) * z @ q.T


def mobius_mismatch(f: ParamImmersion, g: ParamImmersion, samples,
                    center_hints: Sequence = (), seed: int = 0,
                    restarts: int = 3) -> float:
    """Normalized rms distance of g's samples from the best conformal
    transformation of R^(n+1) applied to f's samples.

    Both the similarity branch and the inversion branch (15 parameters for
    a 4-dimensional ambient space) are optimized from several starts; a
    value near machine precision certifies the two immersions differ by a
    conformal ambient transformation, a large value rules it out.
    """
    x = np.array([f.evaluate(u) for u in samples], dtype=float)
    y = np.array([g.evaluate(u) for u in samples], dtype=float)
    dim = x.shape[1]
    nrot = dim * (dim - 1) // 2
    spread = float(np.sqrt(np.mean(np.sum((y - y.mean(0)) ** 2, axis=1))))
    if spread < 1e-14:
        raise ValueError("degenerate sample cloud")
    rng = np.random.default_rng(seed)

    def run(params0, inversion, flip):
        def resid(p):
            return (_mobius_apply(p, x, dim, inversion, flip) - y).ravel() / spread

        sol = least_squares(resid, params0, method="trf", xtol=1e-15,
                            ftol=1e-15, gtol=1e-15, max_nfev=300)
        return float(np.sqrt(np.mean(np.sum(
            (_mobius_apply(sol.x, x, dim, inversion, flip) - y) ** 2, axis=1)))
            / spread)

    best = np.inf
    for allow_reflection in (False, True):
        rot, scale, b = _umeyama(x, y, allow_reflection)
        direct = float(np.sqrt(np.mean(
            np.sum((x @ (scale * rot).T + b - y) ** 2, axis=1))) / spread)
        best = min(best, direct)

    centroid = x.mean(axis=0)
    cloud = float(np.sqrt(np.mean(np.sum((x - centroid) ** 2, axis=1))))
    p0_candidates = [np.asarray(h, dtype=float) for h in center_hints]
    for _ in range(restarts):
        p0_candidates.append(centroid + cloud * rng.uniform(-1.5, 1.5, size=dim))
    for p0 in p0_candidates:
        z = x - p0
        nz = np.sum(z * z, axis=1, keepdims=True)
        if nz.min() < 1e-12:
            continue
        zi = z / nz
        for flip in (False, True):
            zf = zi.copy()
            if flip:
                zf[:, -1] = -zf[:, -1]
            rot, scale, b = _umeyama(zf, y, False)
            if scale <= 0:
                continue
            params0 = np.concatenate([b, [math.log(scale)], np.zeros(nrot), p0])
            try:
                params0[dim + 1:dim + 1 + nrot] = \
                    scipy.linalg.logm(rot)[np.triu_indices(dim, 1)].real
            except Exception:
                pass
            best = min(best, run(params0, inversion=True, flip=flip))
            if best < 1e-12:
                return best
    return best
