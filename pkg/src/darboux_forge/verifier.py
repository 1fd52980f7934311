"""Independent numerical checks for constructed hypersurface pairs.

Everything here recomputes its quantities from jets and finite differences
rather than trusting the factory's internal formulas: tangency of the sphere
congruence, conformality of the correspondence, the squared-shape-operator
relation, the distributed radius/curvature identity, and recovery of the
transform data (scale function, enveloping vector field, its normalization)
straight from the two immersions.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np
import scipy.sparse
from scipy.sparse.linalg import lsqr

from ._util import worker_count
from .hypersurface import ParamImmersion, fundamental_forms, jet_eval
from .lorentz_model import SphereElement

__all__ = [
    "CheckReport",
    "Grid",
    "sample_grid",
    "check_envelope",
    "check_common_congruence",
    "check_conformality",
    "check_b_squared",
    "check_radius_trace",
    "recover_ribaucour_data",
    "check_darboux_condition",
    "weyl_product_check",
    "weyl_display_quadratic_residual",
    "run_all",
    "DEFAULT_TOLS",
]

DEFAULT_TOLS = {
    "envelope": 1e-6,
    "common_congruence": 1e-6,
    "conformality": 1e-6,
    "b_squared": 1e-5,
    "radius_trace": 1e-6,
    "darboux": 1e-3,
    "weyl": 1e-6,
}


@dataclass(frozen=True)
class CheckReport:
    name: str
    max_residual: float
    tolerance: float
    passed: bool
    samples: int
    detail: str = ""

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "samples": self.samples,
        }
        if self.detail:
            out["detail"] = self.detail
        return out

    def __str__(self) -> str:
        state = "pass" if self.passed else "FAIL"
        extra = f" ({self.detail})" if self.detail else ""
        return (f"{self.name}: {state}  max residual {self.max_residual:.3e} "
                f"vs tol {self.tolerance:.1e} on {self.samples} samples{extra}")


def _report(name: str, residual: float, tol: float, samples: int,
            detail: str = "") -> CheckReport:
    residual = float(residual)
    return CheckReport(name=name, max_residual=residual, tolerance=float(tol),
                       passed=bool(residual <= tol), samples=samples,
                       detail=detail)


@dataclass(frozen=True)
class Grid:
    """Product grid over the parameter box; axes are 1-d sample arrays."""

    axes: tuple

    @property
    def shape(self) -> tuple:
        return tuple(len(a) for a in self.axes)

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def points(self) -> np.ndarray:
        return np.array(list(itertools.product(*self.axes)))

    def spacing(self, axis: int) -> float:
        a = self.axes[axis]
        return float(a[1] - a[0]) if len(a) > 1 else 0.0

    def to_json(self) -> dict:
        return {
            "shape": list(self.shape),
            "lo": [float(a[0]) for a in self.axes],
            "hi": [float(a[-1]) for a in self.axes],
        }


def sample_grid(pair, counts=(9, 3), margin: float = 0.05,
                transverse_halfwidth: Optional[float] = None) -> Grid:
    """Grid over the pair's parameter box, strictly interior.

    counts = (along the arclength axis, along each remaining axis).  A
    transverse_halfwidth shrinks the non-arclength axes symmetrically about
    their midpoint, which the derivative-hungry checks use for accuracy.
    """
    lo, hi = pair.f.domain
    axes = []
    for i in range(len(lo)):
        a, b = float(lo[i]), float(hi[i])
        pad = margin * (b - a)
        a, b = a + pad, b - pad
        if i > 0 and transverse_halfwidth is not None:
            mid = 0.5 * (a + b)
            a, b = mid - transverse_halfwidth, mid + transverse_halfwidth
        axes.append(np.linspace(a, b, counts[0] if i == 0 else counts[1]))
    return Grid(axes=tuple(axes))


def _as_points(grid) -> np.ndarray:
    if isinstance(grid, Grid):
        return grid.points
    return np.asarray(grid, dtype=float)


# ---------------------------------------------------------------------------
# tangency checks

def check_envelope(f: ParamImmersion,
                   congruence: Callable[[np.ndarray], SphereElement],
                   grid, tol: float = 1e-6, step: float = 1e-4) -> CheckReport:
    """The congruence sphere at u touches f at u: distance to the center
    equals the radius and the radial vector is normal to the surface."""
    pts = _as_points(grid)
    worst = 0.0
    for u in pts:
        jet = jet_eval(f, u, step)
        el = congruence(u)
        d = jet.point - el.center
        nd = np.linalg.norm(d)
        resid = abs(nd - el.radius)
        dhat = d / nd
        for i in range(jet.first.shape[1]):
            x = jet.first[:, i]
            resid += abs(float(dhat @ x)) / np.linalg.norm(x)
        worst = max(worst, resid)
    return _report("envelope", worst, tol, len(pts))


def check_common_congruence(pair, grid, tol: float = 1e-6,
                            step: float = 1e-4) -> CheckReport:
    """Both immersions reach the same sphere center at each parameter point:
    f + R N and f~ + R N~ agree for one choice of the two normal signs."""
    pts = _as_points(grid)
    worst = 0.0
    for u in pts:
        jf = jet_eval(pair.f, u, step)
        jg = jet_eval(pair.f_tilde, u, step)
        nf = fundamental_forms(jf).normal
        ng = fundamental_forms(jg).normal
        radius = pair.sphere_at(u).radius
        best = min(
            np.linalg.norm((jf.point + sa * radius * nf)
                           - (jg.point + sb * radius * ng))
            for sa in (1.0, -1.0) for sb in (1.0, -1.0)
        )
        worst = max(worst, best)
    return _report("common_congruence", worst, tol, len(pts))


def check_conformality(pair, grid, tol: float = 1e-6,
                       step: float = 1e-4) -> CheckReport:
    """Induced metrics differ by a scalar field, and that field matches the
    pair's declared factor along the arclength direction."""
    pts = _as_points(grid)
    worst = 0.0
    for u in pts:
        gf = jet_eval(pair.f, u, step).first
        gg = jet_eval(pair.f_tilde, u, step).first
        a = gf.T @ gf
        b = gg.T @ gg
        factor = float(np.sum(a * b)) / float(np.sum(a * a))
        aniso = np.linalg.norm(b - factor * a) / np.linalg.norm(b)
        declared = math.exp(2.0 * pair.conformal_factor(float(u[0])))
        drift = abs(factor - declared) / declared
        worst = max(worst, float(aniso), drift)
    return _report("conformality", worst, tol, len(pts))


def _orthonormal_b(jet, forms, alpha: float) -> np.ndarray:
    """A - alpha I conjugated into a metric-orthonormal frame (symmetric)."""
    chol = np.linalg.cholesky(forms.metric)
    a = chol.T @ forms.shape @ np.linalg.inv(chol.T)
    return a - alpha * np.eye(a.shape[0])


def check_b_squared(f: ParamImmersion, f_tilde: ParamImmersion,
                    alpha: Callable[[np.ndarray], SphereElement], grid,
                    tol: float = 1e-5, step: float = 1e-4) -> CheckReport:
    """(A~ - a~ I)^2 = e^(-2 phi) (A - a I)^2 with a the signed inverse
    congruence radius seen from each surface and phi the pointwise
    conformal exponent between the induced metrics."""
    pts = _as_points(grid)
    worst = 0.0
    for u in pts:
        jf = jet_eval(f, u, step)
        jg = jet_eval(f_tilde, u, step)
        ff = fundamental_forms(jf)
        fg = fundamental_forms(jg)
        el = alpha(u)
        af = math.copysign(1.0 / el.radius,
                           float((el.center - jf.point) @ ff.normal))
        ag = math.copysign(1.0 / el.radius,
                           float((el.center - jg.point) @ fg.normal))
        bf = _orthonormal_b(jf, ff, af)
        bg = _orthonormal_b(jg, fg, ag)
        factor = (float(np.sum(ff.metric * fg.metric))
                  / float(np.sum(ff.metric * ff.metric)))
        lhs = bg @ bg
        rhs = (bf @ bf) / factor
        resid = np.linalg.norm(lhs - rhs, 2) / max(1.0, np.linalg.norm(rhs, 2))
        worst = max(worst, float(resid))
    return _report("b_squared", worst, tol, len(pts))


def check_radius_trace(pair, grid, tol: float = 1e-6,
                       step: float = 1e-4) -> CheckReport:
    """Distributed curvature identity along the arclength direction:

        w k + w~ k~ = (w + w~) / R,

    where k is the normal curvature toward the congruence center, w the
    arclength speed |df/ds| of each member and R the sphere radius."""
    pts = _as_points(grid)
    worst = 0.0
    for u in pts:
        el = pair.sphere_at(u)
        total_w = 0.0
        lhs = 0.0
        for surf in (pair.f, pair.f_tilde):
            jet = jet_eval(surf, u, step)
            forms = fundamental_forms(jet)
            sgn = math.copysign(1.0, float((el.center - jet.point) @ forms.normal))
            gss = float(jet.first[:, 0] @ jet.first[:, 0])
            kappa = sgn * float(jet.second[:, 0, 0] @ forms.normal) / gss
            w = math.sqrt(gss)
            lhs += w * kappa
            total_w += w
        resid = abs(lhs - total_w / el.radius)
        worst = max(worst, resid)
    return _report("radius_trace", worst, tol, len(pts))


# ---------------------------------------------------------------------------
# transform-data recovery

def _edges(shape) -> List[tuple]:
    strides = []
    acc = 1
    for extent in reversed(shape):
        strides.append(acc)
        acc *= extent
    strides = list(reversed(strides))
    out = []
    for idx in np.ndindex(*shape):
        flat = sum(i * s for i, s in zip(idx, strides))
        for axis, extent in enumerate(shape):
            if idx[axis] + 1 < extent:
                out.append((flat, flat + strides[axis], axis))
    return out


def recover_ribaucour_data(pair, grid, with_residual: bool = False):
    """Split the displacement f - f~ into (phi, F, nu) with
    f~ = f - 2 phi nu F and nu <F, F> = 1, up to the global gauge
    (phi, F, nu) -> (t phi, t F, nu / t^2).

    The log of the scale relating F to the displacement satisfies an exact
    differential identity; it is integrated over all grid edges in least
    squares (Simpson rule per edge), which also averages out the gauge
    holonomy a non-pair would exhibit.  with_residual appends the worst
    per-edge inconsistency of that integration.
    """
    if not isinstance(grid, Grid):
        raise TypeError("recover_ribaucour_data needs a structured Grid")
    pts = grid.points
    m = len(pts)
    delta = np.empty((m, pts.shape[1] + 1))
    for i, u in enumerate(pts):
        delta[i] = pair.f.evaluate(u) - pair.f_tilde.evaluate(u)
    nd2 = np.sum(delta * delta, axis=1)
    if nd2.min() < 1e-20:
        raise ValueError("surfaces touch: displacement vanished on the grid")

    def integrand(u, axis):
        jet = jet_eval(pair.f, u)
        jett = jet_eval(pair.f_tilde, u)
        d = jet.point - jett.point
        return 2.0 * float(d @ jet.first[:, axis]) / float(d @ d)

    edges = _edges(grid.shape)
    rows, cols, vals, rhs = [], [], [], []
    for r, (i, j, axis) in enumerate(edges):
        ui, uj = pts[i], pts[j]
        mid = 0.5 * (ui + uj)
        h = uj[axis] - ui[axis]
        simpson = (h / 6.0) * (integrand(ui, axis) + 4.0 * integrand(mid, axis)
                               + integrand(uj, axis))
        rows += [r, r]
        cols += [j, i]
        vals += [1.0, -1.0]
        rhs.append(simpson - (math.log(nd2[j]) - math.log(nd2[i])))
    # gauge: log scale vanishes at the first node
    r = len(edges)
    rows.append(r)
    cols.append(0)
    vals.append(1.0)
    rhs.append(0.0)
    mat = scipy.sparse.csr_matrix((vals, (rows, cols)), shape=(r + 1, m))
    rhs = np.array(rhs)
    loglam = lsqr(mat, rhs, atol=1e-13, btol=1e-13, iter_lim=20000)[0]
    lam = np.exp(loglam - loglam[0])
    big_f = lam[:, None] * delta
    phi = 0.5 * lam * nd2
    nu = 1.0 / (lam * lam * nd2)
    if with_residual:
        residual = float(np.abs(mat @ loglam - rhs).max())
        return phi, big_f, nu, residual
    return phi, big_f, nu


def _seven_point(fm3, fm2, fm1, fp1, fp2, fp3, h):
    # 6th-order central first derivative
    return (fp3 - 9.0 * fp2 + 45.0 * fp1
            - 45.0 * fm1 + 9.0 * fm2 - fm3) / (60.0 * h)


def check_darboux_condition(pair, grid, tol: float = 1e-3) -> CheckReport:
    """Recover (phi, F, nu), extract the tangent endomorphism S with
    dF = df o S by least squares, cluster its eigenvalues, and test
    (lambda + mu) phi = <F, F> for one eigenvalue from each cluster.

    A single eigenvalue cluster is the signature of an inversion-like
    (trivial) correspondence and is reported in the detail string.
    """
    if not isinstance(grid, Grid):
        raise TypeError("check_darboux_condition needs a structured Grid")
    if min(grid.shape) < 7:
        raise ValueError("each grid axis needs at least 7 nodes for the stencil")
    phi, big_f, nu = recover_ribaucour_data(pair, grid)
    shape = grid.shape
    ndim = grid.ndim
    strides = []
    acc = 1
    for extent in reversed(shape):
        strides.append(acc)
        acc *= extent
    strides = list(reversed(strides))
    pts = grid.points

    ident_worst = 0.0
    gaps, totals, withins, tangency = [], [], [], []
    eig_lo_all, eig_hi_all = [], []
    abs_eig_max = 0.0
    n_interior = 0
    for idx in np.ndindex(*shape):
        if any(i < 3 or i > extent - 4 for i, extent in zip(idx, shape)):
            continue
        flat = sum(i * s for i, s in zip(idx, strides))
        dfmat = np.empty((big_f.shape[1], ndim))
        for axis in range(ndim):
            s = strides[axis]
            h = grid.spacing(axis)
            dfmat[:, axis] = _seven_point(
                big_f[flat - 3 * s], big_f[flat - 2 * s], big_f[flat - s],
                big_f[flat + s], big_f[flat + 2 * s], big_f[flat + 3 * s], h)
        jet = jet_eval(pair.f, pts[flat])
        jac = jet.first
        smat = np.linalg.lstsq(jac, dfmat, rcond=None)[0]
        tangency.append(np.linalg.norm(dfmat - jac @ smat)
                        / max(1.0, np.linalg.norm(dfmat)))
        eigs = np.sort(np.real(np.linalg.eigvals(smat)))
        abs_eig_max = max(abs_eig_max, float(np.abs(eigs).max()))
        diffs = np.diff(eigs)
        cut = int(np.argmax(diffs)) if len(diffs) else 0
        lo_cluster, hi_cluster = eigs[:cut + 1], eigs[cut + 1:]
        gaps.append(float(diffs[cut]) if len(diffs) else 0.0)
        totals.append(float(eigs[-1] - eigs[0]))
        withins.append(max(
            float(lo_cluster.max() - lo_cluster.min()) if len(lo_cluster) else 0.0,
            float(hi_cluster.max() - hi_cluster.min()) if len(hi_cluster) else 0.0,
        ))
        eig_lo_all.append(float(np.mean(lo_cluster)))
        eig_hi_all.append(float(np.mean(hi_cluster)))
        lam_mu = float(np.mean(lo_cluster) + np.mean(hi_cluster))
        ff = float(big_f[flat] @ big_f[flat])
        ident = abs(lam_mu * phi[flat] - ff) / max(abs(ff), 1e-12)
        ident_worst = max(ident_worst, ident)
        n_interior += 1

    if n_interior == 0:
        raise ValueError("grid too small: no interior 5-point stencil")
    # classifier thresholds: generous floors absorb differencing noise
    thr = max(10.0 * float(np.median(tangency)), 1e-6 * (1.0 + abs_eig_max))
    med_gap = float(np.median(gaps))
    med_total = float(np.median(totals))
    med_within = float(np.median(withins))
    if med_total <= thr:
        lam = float(np.mean(eig_lo_all + eig_hi_all))
        detail = f"single-cluster; eigenvalue ~ {lam:.6g}"
        passed = False  # inversion-like: not a genuine two-sheet transform
    elif med_gap >= thr and med_gap >= 10.0 * med_within:
        detail = (f"two-cluster; lambda ~ {np.mean(eig_hi_all):.6g}, "
                  f"mu ~ {np.mean(eig_lo_all):.6g}")
        passed = ident_worst <= tol
    else:
        detail = "indeterminate"
        passed = False
    return CheckReport(name="darboux_condition", max_residual=float(ident_worst),
                       tolerance=float(tol), passed=passed,
                       samples=n_interior, detail=detail)


# ---------------------------------------------------------------------------
# curvature tensor of the product geometry

def _product_metric(c: float, x: np.ndarray) -> np.ndarray:
    def factor(u, v, k):
        return (1.0 + 0.25 * k * (u * u + v * v)) ** -2

    a = factor(x[0], x[1], c)
    b = factor(x[2], x[3], 1.0)
    return np.diag([a, a, b, b])


def _fd4(fun, x: np.ndarray, h: float):
    """4th order first derivatives of a matrix-valued map; axis-indexed list."""
    out = []
    for i in range(x.size):
        e = np.zeros(x.size)
        e[i] = h
        out.append((-fun(x + 2 * e) + 8 * fun(x + e)
                    - 8 * fun(x - e) + fun(x - 2 * e)) / (12 * h))
    return out


def _christoffel(c: float, x: np.ndarray, h: float = 1e-3) -> np.ndarray:
    g = _product_metric(c, x)
    ginv = np.linalg.inv(g)
    dg = np.stack(_fd4(lambda p: _product_metric(c, p), x, h))
    gamma = 0.5 * (np.einsum("lm,jmk->ljk", ginv, dg)
                   + np.einsum("lm,kmj->ljk", ginv, dg)
                   - np.einsum("lm,mjk->ljk", ginv, dg))
    return gamma


def _weyl_tensor(c: float, x: np.ndarray, h: float = 1e-3):
    g = _product_metric(c, x)
    ginv = np.linalg.inv(g)
    gamma = _christoffel(c, x, h)
    dgamma = np.stack(_fd4(lambda p: _christoffel(c, p, h), x, h))
    # R^l_{ijk} = d_i G^l_{jk} - d_j G^l_{ik} + G^l_{im} G^m_{jk} - G^l_{jm} G^m_{ik}
    riem_up = (np.einsum("iljk->lijk", dgamma[:, :, :, :])
               - np.einsum("jlik->lijk", dgamma[:, :, :, :])
               + np.einsum("lim,mjk->lijk", gamma, gamma)
               - np.einsum("ljm,mik->lijk", gamma, gamma))
    riem = np.einsum("lm,mijk->ijkl", g, riem_up)
    ric = np.einsum("jl,jxzl->xz", ginv, riem)
    scal = float(np.einsum("xz,xz->", ginv, ric))
    n = 4
    corr = (np.einsum("ik,jl->ijkl", g, ric) - np.einsum("il,jk->ijkl", g, ric)
            + np.einsum("jl,ik->ijkl", g, ric) - np.einsum("jk,il->ijkl", g, ric)
            ) / (n - 2)
    sc = scal * (np.einsum("ik,jl->ijkl", g, g)
                 - np.einsum("il,jk->ijkl", g, g)) / ((n - 1) * (n - 2))
    weyl = riem + corr - sc
    return weyl, g, ginv, ric, scal


def _frame_weyl(weyl: np.ndarray, g: np.ndarray) -> np.ndarray:
    scale = 1.0 / np.sqrt(np.diag(g))
    return np.einsum("ijkl,i,j,k,l->ijkl", weyl, scale, scale, scale, scale)


def _true_quadratic(c: float, a: np.ndarray, b: np.ndarray) -> float:
    p = a[0] * b[1] - a[1] * b[0]
    s = a[2] * b[3] - a[3] * b[2]
    pa = a[0] ** 2 + a[1] ** 2
    pb = b[0] ** 2 + b[1] ** 2
    return (c * p * p + s * s - 0.5 * (c - 1.0) * (pa + pb)
            + (c - 2.0) / 3.0)


def _display_quadratic(c: float, a: np.ndarray, b: np.ndarray) -> float:
    p = a[0] * b[1] - a[1] * b[0]
    s = a[2] * b[3] - a[3] * b[2]
    return (1.0 + c) / 3.0 * (p * p + s * s)


def _random_orthonormal_pairs(count: int, seed: int):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        a = rng.normal(size=4)
        b = rng.normal(size=4)
        a /= np.linalg.norm(a)
        b -= (b @ a) * a
        nb = np.linalg.norm(b)
        if nb < 1e-3:
            continue
        out.append((a, b / nb))
    return out


def weyl_product_check(c: float, grid, tol: float = 1e-6,
                       seed: int = 0) -> CheckReport:
    """Conformal curvature of the product of a curvature-c surface with the
    unit sphere, evaluated by finite differences in conformal charts.

    Frozen expectations: block components +/-(1+c)/3, mixed sectional parts
    -(1+c)/6, vanishing cross-block components, trace-freeness, scalar
    curvature 2c + 2, and the quadratic form of W(X,Y,Y,X) on orthonormal
    pairs."""
    if c <= -1:
        raise ValueError("factor curvature must exceed -1")
    pts = _as_points(grid)
    want = (1.0 + c) / 3.0
    pairs = _random_orthonormal_pairs(6, seed)
    worst = 0.0
    for x in pts:
        weyl, g, ginv, ric, scal = _weyl_tensor(c, np.asarray(x, float))
        wf = _frame_weyl(weyl, g)
        comp = [
            (wf[0, 1, 1, 0], want),
            (wf[2, 3, 3, 2], want),
            (wf[0, 1, 0, 1], -want),
            (wf[0, 2, 2, 0], -(1.0 + c) / 6.0),
            (wf[0, 3, 3, 0], -(1.0 + c) / 6.0),
            (wf[1, 2, 2, 1], -(1.0 + c) / 6.0),
            (wf[1, 3, 3, 1], -(1.0 + c) / 6.0),
            (wf[0, 1, 2, 3], 0.0),
            (wf[0, 2, 1, 3], 0.0),
        ]
        for got, expect in comp:
            worst = max(worst, abs(float(got) - expect))
        trace = np.einsum("ik,ijkl->jl", ginv, weyl)
        worst = max(worst, float(np.abs(trace).max()))
        worst = max(worst, abs(scal - (2.0 * c + 2.0)))
        for a, b in pairs:
            got = float(np.einsum("ijkl,i,j,k,l->", wf, a, b, b, a))
            worst = max(worst, abs(got - _true_quadratic(c, a, b)))
    return _report("weyl_product", worst, tol,
                   len(pts) * (9 + 1 + 1 + len(pairs)),
                   detail=f"c={c:g}")


def weyl_display_quadratic_residual(c: float, grid, seed: int = 0) -> float:
    """Worst deviation of W(X,Y,Y,X) from the (1+c)/3 (P^2 + S^2) closed
    form over random orthonormal pairs.  Genuinely nonzero: the closed form
    omits the mixed-block part of the tensor."""
    pts = _as_points(grid)
    pairs = _random_orthonormal_pairs(8, seed)
    worst = 0.0
    for x in pts:
        weyl, g, _, _, _ = _weyl_tensor(c, np.asarray(x, float))
        wf = _frame_weyl(weyl, g)
        for a, b in pairs:
            got = float(np.einsum("ijkl,i,j,k,l->", wf, a, b, b, a))
            worst = max(worst, abs(got - _display_quadratic(c, a, b)))
    return worst


# ---------------------------------------------------------------------------
# orchestration

def run_all(pair, grid: Optional[Grid] = None, tols: Optional[dict] = None,
            darboux_grid: Optional[Grid] = None) -> dict:
    """Full check battery for a pair; returns the report dictionary."""
    tols = {**DEFAULT_TOLS, **(tols or {})}
    if grid is None:
        grid = sample_grid(pair, counts=(9, 3))
    if darboux_grid is None:
        darboux_grid = sample_grid(pair, counts=(41, 7),
                                   transverse_halfwidth=0.15)
    jobs = [
        lambda: check_envelope(pair.f, pair.sphere_at, grid,
                               tol=tols["envelope"]),
        lambda: check_envelope(pair.f_tilde, pair.sphere_at, grid,
                               tol=tols["envelope"]),
        lambda: check_common_congruence(pair, grid,
                                        tol=tols["common_congruence"]),
        lambda: check_conformality(pair, grid, tol=tols["conformality"]),
        lambda: check_b_squared(pair.f, pair.f_tilde, pair.sphere_at, grid,
                                tol=tols["b_squared"]),
        lambda: check_radius_trace(pair, grid, tol=tols["radius_trace"]),
        lambda: check_darboux_condition(pair, darboux_grid,
                                        tol=tols["darboux"]),
    ]
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        reports = list(pool.map(lambda job: job(), jobs))
    # name the two envelope rows apart
    named = []
    for k, rep in enumerate(reports):
        if rep.name == "envelope":
            suffix = "f" if k == 0 else "f_tilde"
            rep = CheckReport(name=f"envelope[{suffix}]",
                              max_residual=rep.max_residual,
                              tolerance=rep.tolerance, passed=rep.passed,
                              samples=rep.samples, detail=rep.detail)
        named.append(rep)
    return {
        "checks": [rep.to_json() for rep in named],
        "pass": all(rep.passed for rep in named),
        "grid": grid.to_json(),
    }
