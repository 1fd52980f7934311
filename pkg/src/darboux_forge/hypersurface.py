"""Parameterized-hypersurface kernel.

Jets, first/second fundamental forms, principal curvatures, inversions of
R^(n+1), and the closed-form law relating shape operators across an
inversion.  Everything downstream (factories, verifier) sits on these.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.linalg

__all__ = [
    "DomainError",
    "ImmersionJet",
    "FundamentalForms",
    "ParamImmersion",
    "InversionSpec",
    "jet_eval",
    "fundamental_forms",
    "apply_inversion",
    "invert_point",
    "invert_surface",
    "inversion_shape_law",
    "conformal_factor_field",
    "get_surface",
    "SURFACE_BUILDERS",
]


class DomainError(ValueError):
    """Parameter point outside (or too close to the edge of) the chart."""


@dataclass(frozen=True)
class ImmersionJet:
    """2-jet of a hypersurface patch at one parameter point.

    point: (n+1,);  first: (n+1, n) columns df/du_i;
    second: (n+1, n, n) symmetric in the parameter indices.
    """

    param: np.ndarray
    point: np.ndarray
    first: np.ndarray
    second: np.ndarray
    fd_error_estimate: Optional[float] = None

    @property
    def ndim(self) -> int:
        return self.first.shape[1]


@dataclass(frozen=True)
class FundamentalForms:
    metric: np.ndarray
    normal: np.ndarray
    shape: np.ndarray
    principal_curvatures: np.ndarray
    principal_frame: np.ndarray  # columns, g-orthonormal

    @property
    def second_form(self) -> np.ndarray:
        return self.metric @ self.shape


class ParamImmersion:
    """A hypersurface patch: evaluate(u) -> R^(n+1), optional analytic jet.

    domain is a box (lo, hi); finite differencing needs interior margin.
    """

    def __init__(
        self,
        ndim: int,
        evaluate: Callable[[np.ndarray], np.ndarray],
        jet: Optional[Callable[[np.ndarray], ImmersionJet]] = None,
        domain: Optional[tuple] = None,
        name: str = "",
    ):
        self.ndim = ndim
        self._evaluate = evaluate
        self._jet = jet
        if domain is None:
            domain = (np.full(ndim, -np.inf), np.full(ndim, np.inf))
        self.domain = (np.asarray(domain[0], float), np.asarray(domain[1], float))
        self.name = name

    def evaluate(self, u: np.ndarray) -> np.ndarray:
        return np.asarray(self._evaluate(np.asarray(u, dtype=float)), dtype=float)

    def jet(self, u: np.ndarray) -> Optional[ImmersionJet]:
        if self._jet is None:
            return None
        return self._jet(np.asarray(u, dtype=float))

    def without_analytic_jet(self) -> "ParamImmersion":
        """Same surface, pointwise evaluation only (forces finite differences)."""
        return ParamImmersion(self.ndim, self._evaluate, None, self.domain, self.name)


def _check_interior(surface: ParamImmersion, u: np.ndarray, margin: float) -> None:
    lo, hi = surface.domain
    if np.any(u < lo + margin) or np.any(u > hi - margin):
        raise DomainError(f"parameter {u} too close to the domain boundary")


def jet_eval(surface: ParamImmersion, u, step: float = 1e-4) -> ImmersionJet:
    """2-jet at u: analytic if the surface supplies one, else central finite
    differences of order 2 with a Richardson consistency estimate at 2*step."""
    if step <= 0:
        raise ValueError("step must be positive")
    u = np.asarray(u, dtype=float)
    _check_interior(surface, u, 2 * step)
    analytic = surface.jet(u)
    if analytic is not None:
        return analytic

    n = surface.ndim
    f0 = surface.evaluate(u)
    m = f0.shape[0]

    def fd(hstep):
        first = np.empty((m, n))
        second = np.empty((m, n, n))
        plus = []
        minus = []
        for i in range(n):
            e = np.zeros(n)
            e[i] = hstep
            fp = surface.evaluate(u + e)
            fm = surface.evaluate(u - e)
            plus.append(fp)
            minus.append(fm)
            first[:, i] = (fp - fm) / (2 * hstep)
            second[:, i, i] = (fp - 2 * f0 + fm) / hstep**2
        for i in range(n):
            for j in range(i + 1, n):
                ei = np.zeros(n); ei[i] = hstep
                ej = np.zeros(n); ej[j] = hstep
                fpp = surface.evaluate(u + ei + ej)
                fpm = surface.evaluate(u + ei - ej)
                fmp = surface.evaluate(u - ei + ej)
                fmm = surface.evaluate(u - ei - ej)
                mixed = (fpp - fpm - fmp + fmm) / (4 * hstep**2)
                second[:, i, j] = mixed
                second[:, j, i] = mixed
        return first, second

    first, second = fd(step)
    first2, _ = fd(2 * step)
    scale = 1.0 + float(np.max(np.abs(first)))
    estimate = float(np.max(np.abs(first - first2))) / scale
    return ImmersionJet(param=u, point=f0, first=first, second=second,
                        fd_error_estimate=estimate)


def fundamental_forms(jet: ImmersionJet, orientation: int = 1) -> FundamentalForms:
    """Metric, unit normal, shape operator and principal data at a jet.

    The normal sign makes det([first | normal]) carry the sign of
    `orientation`; orientation -1 returns the exact negation of the
    orientation +1 shape data.
    """
    if orientation not in (-1, 1):
        raise ValueError("orientation must be +1 or -1")
    J = jet.first
    n = J.shape[1]
    g = J.T @ J
    U, s, _ = np.linalg.svd(J, full_matrices=True)
    if s[-1] < 1e-12 * max(1.0, s[0]):
        raise ValueError("rank-deficient jet: not an immersion")
    normal = U[:, -1]
    if np.linalg.det(np.column_stack([J, normal])) < 0:
        normal = -normal
    II = np.einsum("a,aij->ij", normal, jet.second)
    shape = np.linalg.solve(g, II)
    evals, evecs = scipy.linalg.eigh(II, g)  # g-orthonormal eigenvectors
    if orientation == -1:
        normal = -normal
        II = -II
        shape = -shape
        evals = -evals[::-1]
        evecs = evecs[:, ::-1]
    return FundamentalForms(
        metric=g,
        normal=normal,
        shape=shape,
        principal_curvatures=evals,
        principal_frame=evecs,
    )


@dataclass(frozen=True)
class InversionSpec:
    """Inversion of R^(n+1) in the sphere of center p0 and radius r."""

    p0: np.ndarray
    r: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "p0", np.asarray(self.p0, dtype=float))
        if self.r <= 0:
            raise ValueError("inversion radius must be positive")


def invert_point(spec: InversionSpec, p: np.ndarray) -> np.ndarray:
    d = np.asarray(p, dtype=float) - spec.p0
    rho2 = float(np.dot(d, d))
    if rho2 < 1e-30:
        raise ValueError("inversion center hit")
    return spec.p0 + (spec.r**2 / rho2) * d


def apply_inversion(spec: InversionSpec, jet: ImmersionJet) -> ImmersionJet:
    """Exact chain rule through the closed-form inversion."""
    d = jet.point - spec.p0
    rho2 = float(np.dot(d, d))
    if rho2 < 1e-30:
        raise ValueError("inversion center hit")
    r2 = spec.r**2
    point = spec.p0 + (r2 / rho2) * d

    dd = jet.first.T @ d  # <d, f_i>
    first = (r2 / rho2) * jet.first - (2 * r2 / rho2**2) * np.outer(d, dd)

    n = jet.ndim
    second = np.empty_like(jet.second)
    for i in range(n):
        for j in range(n):
            vi = jet.first[:, i]
            vj = jet.first[:, j]
            fij = jet.second[:, i, j]
            div = float(np.dot(d, vi))
            djv = float(np.dot(d, vj))
            vij = float(np.dot(vi, vj))
            dfij = float(np.dot(d, fij))
            term = (-2 * r2 / rho2**2) * (djv * vi + div * vj + vij * d)
            term += (8 * r2 / rho2**3) * div * djv * d
            term += (r2 / rho2) * fij - (2 * r2 / rho2**2) * dfij * d
            second[:, i, j] = term
    return ImmersionJet(param=jet.param, point=point, first=first, second=second,
                        fd_error_estimate=jet.fd_error_estimate)


def invert_surface(spec: InversionSpec, surface: ParamImmersion,
                   step: float = 1e-4) -> ParamImmersion:
    """Image of a whole patch under the inversion, with jets obtained by
    the exact chain rule through the source's jets."""

    def ev(u):
        return invert_point(spec, surface.evaluate(u))

    def jt(u):
        return apply_inversion(spec, jet_eval(surface, u, step))

    return ParamImmersion(surface.ndim, ev, jt, surface.domain,
                          name=f"inverted({surface.name})")


def inversion_shape_law(
    spec: InversionSpec, jet: ImmersionJet, forms: FundamentalForms
) -> FundamentalForms:
    """Predicted fundamental forms of the inverted surface, in the same
    coordinate frame: r^2 A~ = |f-p0|^2 A + 2<f-p0,N> I, metric scaled by
    r^4/|f-p0|^4, normal reflected in the radial direction."""
    d = jet.point - spec.p0
    rho2 = float(np.dot(d, d))
    if rho2 < 1e-30:
        raise ValueError("inversion center hit")
    r2 = spec.r**2
    ell = float(np.dot(d, forms.normal))
    n = forms.shape.shape[0]
    shape = (rho2 * forms.shape + 2 * ell * np.eye(n)) / r2
    metric = (r2**2 / rho2**2) * forms.metric
    pcurv = (forms.principal_curvatures * rho2 + 2 * ell) / r2
    normal = forms.normal - (2 * ell / rho2) * d
    frame = (rho2 / r2) * forms.principal_frame  # rescaled to stay g~-orthonormal
    return FundamentalForms(
        metric=metric,
        normal=normal,
        shape=shape,
        principal_curvatures=pcurv,
        principal_frame=frame,
    )


def conformal_factor_field(
    f: ParamImmersion,
    g: ParamImmersion,
    samples,
    tol: float = 1e-6,
    step: float = 1e-4,
):
    """Pointwise least-squares conformal factor between induced metrics.

    Returns (phi, anisotropy): phi[i] with metric_g ~ e^(2 phi) metric_f at
    sample i, and the max relative Frobenius residual of that fit.
    """
    phis = []
    worst = 0.0
    for u in samples:
        gf = _metric_at(f, u, step)
        gg = _metric_at(g, u, step)
        denom = float(np.sum(gf * gf))
        if denom < 1e-30:
            raise ValueError("degenerate metric in conformal factor fit")
        factor = float(np.sum(gf * gg)) / denom
        if factor <= 0:
            raise ValueError("nonpositive conformal factor fit")
        resid = np.linalg.norm(gg - factor * gf) / np.linalg.norm(gg)
        worst = max(worst, float(resid))
        phis.append(0.5 * np.log(factor))
    return np.array(phis), worst


def _metric_at(surface: ParamImmersion, u, step: float) -> np.ndarray:
    J = jet_eval(surface, u, step).first
    return J.T @ J


# ---------------------------------------------------------------------------
# named surfaces (CLI / test registry)

def _sphere_surface() -> ParamImmersion:
    def ev(u):
        th, ph = u
        return np.array([
            np.sin(th) * np.cos(ph),
            np.sin(th) * np.sin(ph),
            np.cos(th),
        ])

    def jt(u):
        th, ph = u
        st, ct = np.sin(th), np.cos(th)
        sp, cp = np.sin(ph), np.cos(ph)
        point = np.array([st * cp, st * sp, ct])
        first = np.array([
            [ct * cp, -st * sp],
            [ct * sp, st * cp],
            [-st, 0.0],
        ])
        second = np.empty((3, 2, 2))
        second[:, 0, 0] = [-st * cp, -st * sp, -ct]
        second[:, 0, 1] = [-ct * sp, ct * cp, 0.0]
        second[:, 1, 0] = second[:, 0, 1]
        second[:, 1, 1] = [-st * cp, -st * sp, 0.0]
        return ImmersionJet(param=np.asarray(u, float), point=point,
                            first=first, second=second)

    return ParamImmersion(2, ev, jt, domain=(np.array([0.2, -10.0]),
                                             np.array([np.pi - 0.2, 10.0])),
                          name="sphere")


def _cylinder_surface() -> ParamImmersion:
    def ev(u):
        th, z = u
        return np.array([np.cos(th), np.sin(th), z])

    def jt(u):
        th, z = u
        point = np.array([np.cos(th), np.sin(th), z])
        first = np.array([[-np.sin(th), 0.0], [np.cos(th), 0.0], [0.0, 1.0]])
        second = np.zeros((3, 2, 2))
        second[:, 0, 0] = [-np.cos(th), -np.sin(th), 0.0]
        return ImmersionJet(param=np.asarray(u, float), point=point,
                            first=first, second=second)

    return ParamImmersion(2, ev, jt, name="cylinder")


def _torus_surface() -> ParamImmersion:
    R, r = 2.0, 1.0

    def ev(u):
        a, b = u
        w = R + r * np.cos(b)
        return np.array([w * np.cos(a), w * np.sin(a), r * np.sin(b)])

    return ParamImmersion(2, ev, None, name="torus")


def _paraboloid_surface() -> ParamImmersion:
    def ev(u):
        x, y = u
        return np.array([x, y, 0.5 * (x * x + y * y)])

    def jt(u):
        x, y = u
        point = np.array([x, y, 0.5 * (x * x + y * y)])
        first = np.array([[1.0, 0.0], [0.0, 1.0], [x, y]])
        second = np.zeros((3, 2, 2))
        second[2, 0, 0] = 1.0
        second[2, 1, 1] = 1.0
        return ImmersionJet(param=np.asarray(u, float), point=point,
                            first=first, second=second)

    return ParamImmersion(2, ev, jt, name="graph:paraboloid")


def _random_graph_surface(seed: int) -> ParamImmersion:
    """Graph z = cubic polynomial with small random coefficients; analytic jets."""
    rng = np.random.default_rng(seed)
    # coefficients for monomials x^a y^b with 2 <= a+b <= 3 (flat to first order at 0)
    monos = [(2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (1, 2), (0, 3)]
    coef = rng.uniform(-0.3, 0.3, size=len(monos))

    def height(x, y):
        return sum(c * x**a * y**b for c, (a, b) in zip(coef, monos))

    def hx(x, y):
        return sum(c * a * x ** (a - 1) * y**b for c, (a, b) in zip(coef, monos) if a)

    def hy(x, y):
        return sum(c * b * x**a * y ** (b - 1) for c, (a, b) in zip(coef, monos) if b)

    def hxx(x, y):
        return sum(c * a * (a - 1) * x ** (a - 2) * y**b
                   for c, (a, b) in zip(coef, monos) if a >= 2)

    def hxy(x, y):
        return sum(c * a * b * x ** (a - 1) * y ** (b - 1)
                   for c, (a, b) in zip(coef, monos) if a and b)

    def hyy(x, y):
        return sum(c * b * (b - 1) * x**a * y ** (b - 2)
                   for c, (a, b) in zip(coef, monos) if b >= 2)

    def ev(u):
        x, y = u
        return np.array([x, y, height(x, y)])

    def jt(u):
        x, y = u
        point = np.array([x, y, height(x, y)])
        first = np.array([[1.0, 0.0], [0.0, 1.0], [hx(x, y), hy(x, y)]])
        second = np.zeros((3, 2, 2))
        second[2, 0, 0] = hxx(x, y)
        second[2, 0, 1] = hxy(x, y)
        second[2, 1, 0] = second[2, 0, 1]
        second[2, 1, 1] = hyy(x, y)
        return ImmersionJet(param=np.asarray(u, float), point=point,
                            first=first, second=second)

    return ParamImmersion(2, ev, jt,
                          domain=(np.array([-0.8, -0.8]), np.array([0.8, 0.8])),
                          name=f"graph:random:{seed}")


SURFACE_BUILDERS = {
    "sphere": _sphere_surface,
    "cylinder": _cylinder_surface,
    "torus": _torus_surface,
    "graph:paraboloid": _paraboloid_surface,
}


def get_surface(name: str) -> ParamImmersion:
    """Registry lookup; "graph:random:<seed>" builds a seeded random graph."""
    if name in SURFACE_BUILDERS:
        return SURFACE_BUILDERS[name]()
    if name.startswith("graph:random:"):
        return _random_graph_surface(int(name.rsplit(":", 1)[1]))
    raise KeyError(f"unknown surface {name!r}")
