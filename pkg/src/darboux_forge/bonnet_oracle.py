"""Numerical oracle for the surface-with-prescribed-mean-curvature frame
identities (flat, spherical and hyperbolic ambient space forms).

A jet of data (u, H, h, k, eps) with the compatibility relations baked in
determines, through closed-form coefficient vectors in the adapted moving
frame, a candidate second immersion together with its normal direction.
This module evaluates the first-order identities (tangency, the metric
coefficients of the candidate) and the second-order pairing terms
T(A, B) = <D_A(F_* B), N> by forward-mode differentiation of the frame
coefficients plus the connection tables, and compares them against the
closed forms.  Two variants of the mixed compatibility relation are
supported; several closed forms hold only under the corrected one, which
the check reports explicitly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Dict

import numpy as np

from .verifier import CheckReport

__all__ = [
    "BonnetJet",
    "make_admissible_jet",
    "bonnet_frame",
    "first_order_identity_check",
    "second_order_identity_check",
    "second_order_terms",
    "cross_display_residual",
    "cross_true_residual",
    "norm_display_residual",
    "BRANCHES",
]

BRANCHES = ("corrected", "printed")


class _Dual:
    """Value with first derivatives along the two surface parameters."""

    __slots__ = ("v", "x", "y")

    def __init__(self, v, x=0.0, y=0.0):
        self.v = float(v)
        self.x = float(x)
        self.y = float(y)

    def __add__(self, o):
        if isinstance(o, _Dual):
            return _Dual(self.v + o.v, self.x + o.x, self.y + o.y)
        return _Dual(self.v + o, self.x, self.y)

    __radd__ = __add__

    def __neg__(self):
        return _Dual(-self.v, -self.x, -self.y)

    def __sub__(self, o):
        return self + (-o if isinstance(o, _Dual) else -o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if isinstance(o, _Dual):
            return _Dual(self.v * o.v, self.x * o.v + self.v * o.x,
                         self.y * o.v + self.v * o.y)
        return _Dual(self.v * o, self.x * o, self.y * o)

    __rmul__ = __mul__

    def __truediv__(self, o):
        if isinstance(o, _Dual):
            inv = 1.0 / o.v
            q = self.v * inv
            return _Dual(q, (self.x - q * o.x) * inv, (self.y - q * o.y) * inv)
        return self * (1.0 / o)

    def __rtruediv__(self, o):
        inv = 1.0 / self.v
        q = o * inv
        return _Dual(q, -q * self.x * inv, -q * self.y * inv)


def _dexp(d: _Dual) -> _Dual:
    e = math.exp(d.v)
    return _Dual(e, e * d.x, e * d.y)


def _dsqrt(d: _Dual) -> _Dual:
    r = math.sqrt(d.v)
    half = 0.5 / r
    return _Dual(r, half * d.x, half * d.y)


@dataclass(frozen=True)
class BonnetJet:
    """2-jet data at a point: u_jet and H_jet are
    (value, d_x, d_y, d_xx, d_xy, d_yy); h and k are the off-mean entries
    of the second fundamental form, eps the sign of the off-diagonal."""

    c: float
    u_jet: np.ndarray
    H_jet: np.ndarray
    h: float
    k: float
    eps: int
    branch: str = "printed"


def make_admissible_jet(seed: int, c: float,
                        branch: str = "printed") -> BonnetJet:
    """Random jet satisfying the compatibility relations.

    The mixed second derivative of H is solved from the chosen branch of
    the compatibility relation, the derivatives of h are implied, and the
    trace of the second derivative of u follows from the curvature
    constraint of the ambient space form."""
    if branch not in BRANCHES:
        raise ValueError(f"branch must be one of {BRANCHES}")
    if c not in (-1.0, 0.0, 1.0) and c not in (-1, 0, 1):
        raise ValueError("c must be -1, 0 or 1")
    rng = np.random.default_rng(seed)
    k = float(rng.uniform(0.5, 2.0))
    sign = 1.0 if rng.random() < 0.5 else -1.0
    if c == -1:
        hmean = sign * rng.uniform(1.2, 2.5)
    else:
        hmean = sign * rng.uniform(0.5, 2.0)
    hx_, hy_ = rng.uniform(-1, 1, 2)
    hxx_, hyy_ = rng.uniform(-1, 1, 2)
    u, ux, uy, uxy, uyy = rng.uniform(-1, 1, 5)
    if branch == "printed":
        hxy_ = -(hx_ * uy + hy_ + hx_) / 2.0
    else:
        hxy_ = -(hx_ * uy + hy_ * ux) / 2.0
    hsmall = float(rng.uniform(-1, 1))
    eu = math.exp(u)
    # trace constraint on u; inert for every checked identity
    uxx = -2.0 * eu * (hmean**2 - (hsmall**2 + k**2) / eu**2) - uyy
    eps = 1 if rng.random() < 0.5 else -1
    return BonnetJet(
        c=float(c),
        u_jet=np.array([u, ux, uy, uxx, uxy, uyy]),
        H_jet=np.array([hmean, hx_, hy_, hxx_, hxy_, hyy_]),
        h=hsmall,
        k=k,
        eps=eps,
        branch=branch,
    )


class _Engine:
    """Coefficient vectors and connection tables for one jet."""

    def __init__(self, jet: BonnetJet):
        c = jet.c
        u0, ux0, uy0, uxx0, uxy0, uyy0 = jet.u_jet
        H0, Hx0, Hy0, Hxx0, Hxy0, Hyy0 = jet.H_jet
        eu0 = math.exp(u0)
        u = _Dual(u0, ux0, uy0)
        ux = _Dual(ux0, uxx0, uxy0)
        uy = _Dual(uy0, uxy0, uyy0)
        H = _Dual(H0, Hx0, Hy0)
        Hx = _Dual(Hx0, Hxx0, Hxy0)
        Hy = _Dual(Hy0, Hxy0, Hyy0)
        # derivatives of h are implied by those of H
        h = _Dual(jet.h, Hx0 * eu0, -Hy0 * eu0)
        k = _Dual(jet.k)
        eps = float(jet.eps)
        eu = _dexp(u)
        self.c = c
        self.dim = 3 if c == 0 else 4
        self.gram = np.array([eu0, eu0, 1.0]) if c == 0 else \
            np.array([eu0, eu0, 1.0, c])
        zero = _Dual(0.0)

        def vec(*comps):
            comps = list(comps) + [zero] * (self.dim - len(comps))
            return comps

        if c == 0:
            FX = vec(-h / (eu * H), -(eps * k) / (eu * H), -Hx / (H * H))
            FY = vec(-(eps * k) / (eu * H), h / (eu * H), -Hy / (H * H))
            N = vec(eps * k * Hy + h * Hx, eps * k * Hx - h * Hy,
                    -H * (k * k + h * h))
        else:
            S = 1.0 / _dsqrt(H * H + 1.0) if c > 0 else 1.0 / _dsqrt(H * H - 1.0)
            Cc = H * S
            Rx = -(S * S) * Hx
            Ry = -(S * S) * Hy
            FX = vec(-(S * h) / eu, -(eps * k * S) / eu, Cc * Rx,
                     (-c) * S * Rx)
            FY = vec(-(eps * k * S) / eu, (S * h) / eu, Cc * Ry,
                     (-c) * S * Ry)
            N = vec(h * Rx + eps * k * Ry, -(h * Ry - eps * k * Rx),
                    S * (h * h + k * k) * Cc, (-c) * (S * S) * (h * h + k * k))
            self.S0, self.C0 = S.v, Cc.v
            self.Rx0, self.Ry0 = Rx.v, Ry.v
        self.FX, self.FY, self.N = FX, FY, N
        self.u0, self.ux0, self.uy0, self.eu0 = u0, ux0, uy0, eu0
        self.H0, self.Hx0, self.Hy0 = H0, Hx0, Hy0
        self.h0, self.k0, self.eps0 = jet.h, jet.k, eps

        # connection tables: row j holds the frame coefficients of the
        # x- (resp. y-) derivative of frame vector j
        hm, hs, kk = H0, jet.h, jet.k
        tx = np.zeros((self.dim, self.dim))
        ty = np.zeros((self.dim, self.dim))
        tx[0, :3] = [ux0 / 2, -uy0 / 2, hm * eu0 + hs]
        tx[1, :3] = [uy0 / 2, ux0 / 2, eps * kk]
        tx[2, :2] = [-(hm + hs / eu0), -eps * kk / eu0]
        ty[0, :3] = [uy0 / 2, ux0 / 2, eps * kk]
        ty[1, :3] = [-ux0 / 2, uy0 / 2, hm * eu0 - hs]
        ty[2, :2] = [-eps * kk / eu0, -(hm - hs / eu0)]
        if c != 0:
            tx[0, 3] = -c * eu0
            ty[1, 3] = -c * eu0
            tx[3, 0] = 1.0
            ty[3, 1] = 1.0
        self.tx, self.ty = tx, ty

    def values(self, comps) -> np.ndarray:
        return np.array([d.v for d in comps])

    def ip(self, a: np.ndarray, b: np.ndarray) -> float:
        return float(np.sum(self.gram * a * b))

    def covariant(self, comps, along_x: bool) -> np.ndarray:
        table = self.tx if along_x else self.ty
        slot = np.array([d.x if along_x else d.y for d in comps])
        vals = self.values(comps)
        return slot + vals @ table

    def pairing(self) -> Dict[str, float]:
        nv = self.values(self.N)
        return {
            "XX": self.ip(self.covariant(self.FX, True), nv),
            "YY": self.ip(self.covariant(self.FY, False), nv),
            "XY": self.ip(self.covariant(self.FY, True), nv),
            "YX": self.ip(self.covariant(self.FX, False), nv),
        }


def bonnet_frame(jet: BonnetJet) -> Dict[str, np.ndarray]:
    """Frame coefficients of the two candidate tangents and the normal."""
    eng = _Engine(jet)
    return {
        "F_X": eng.values(eng.FX),
        "F_Y": eng.values(eng.FY),
        "N": eng.values(eng.N),
    }


def _first_order_displays(eng: _Engine) -> Dict[str, float]:
    h2k2 = eng.h0**2 + eng.k0**2
    if eng.c == 0:
        return {
            "xx": h2k2 / (eng.eu0 * eng.H0**2) + eng.Hx0**2 / eng.H0**4,
            "yy": h2k2 / (eng.eu0 * eng.H0**2) + eng.Hy0**2 / eng.H0**4,
            "xy": eng.Hx0 * eng.Hy0 / eng.H0**4,
            "nsq": h2k2 * (eng.H0**2 * h2k2
                           + eng.eu0 * (eng.Hx0**2 + eng.Hy0**2)),
        }
    return {
        "xx": eng.S0**2 * h2k2 / eng.eu0 + eng.Rx0**2,
        "yy": eng.S0**2 * h2k2 / eng.eu0 + eng.Ry0**2,
        "xy": eng.Rx0 * eng.Ry0,
        "nsq": h2k2 * (eng.S0**2 * h2k2
                       + eng.eu0 * (eng.Rx0**2 + eng.Ry0**2)),
    }


def first_order_identity_check(jet: BonnetJet, tol: float = 1e-10) -> CheckReport:
    """Tangency of the normal, the closed forms of the induced metric
    coefficients and the squared normal length, and equality of all four
    scalars across the sign eps (the closed forms are eps-free)."""
    eng = _Engine(jet)
    flip = _Engine(replace(jet, eps=-jet.eps))
    fx = eng.values(eng.FX)
    fy = eng.values(eng.FY)
    nv = eng.values(eng.N)
    disp = _first_order_displays(eng)
    scale = max(1.0, abs(disp["xx"]), abs(disp["nsq"]))
    quads = [eng.ip(fx, fx), eng.ip(fy, fy), eng.ip(fx, fy), eng.ip(nv, nv)]
    fxf = flip.values(flip.FX)
    fyf = flip.values(flip.FY)
    nvf = flip.values(flip.N)
    quads_flip = [flip.ip(fxf, fxf), flip.ip(fyf, fyf), flip.ip(fxf, fyf),
                  flip.ip(nvf, nvf)]
    residuals = [
        abs(eng.ip(fx, nv)) / scale,
        abs(eng.ip(fy, nv)) / scale,
        abs(quads[0] - disp["xx"]) / scale,
        abs(quads[1] - disp["yy"]) / scale,
        abs(quads[2] - disp["xy"]) / scale,
        abs(quads[3] - disp["nsq"]) / scale,
    ]
    residuals += [abs(a - b) / scale for a, b in zip(quads, quads_flip)]
    worst = max(residuals)
    return CheckReport(name="bonnet_first_order", max_residual=float(worst),
                       tolerance=tol, passed=bool(worst <= tol),
                       samples=len(residuals), detail=f"c={jet.c:g}")


def norm_display_residual(jet: BonnetJet) -> float:
    """Deviation of <N, N> from the flat-case printed closed form
    (h^2+k^2)(H^2 + e^u (H_x^2 + H_y^2)); genuinely nonzero, the inner
    factor (h^2+k^2) is missing from that display."""
    if jet.c != 0:
        raise ValueError("printed-norm comparison only differs in the flat case")
    eng = _Engine(jet)
    nv = eng.values(eng.N)
    h2k2 = eng.h0**2 + eng.k0**2
    printed = h2k2 * (eng.H0**2 + eng.eu0 * (eng.Hx0**2 + eng.Hy0**2))
    return abs(eng.ip(nv, nv) - printed) / max(1.0, abs(printed))


def second_order_terms(jet: BonnetJet) -> Dict[str, float]:
    """Raw pairing terms for both signs of eps (keys XX, YY, XY, YX and
    the same with suffix _flip)."""
    eng = _Engine(jet)
    flip = _Engine(replace(jet, eps=-jet.eps))
    out = eng.pairing()
    out.update({f"{key}_flip": val for key, val in flip.pairing().items()})
    return out


def _cross_display(jet: BonnetJet) -> float:
    eng = _Engine(jet)
    h2k2 = eng.h0**2 + eng.k0**2
    grad2 = eng.Hx0**2 + eng.Hy0**2
    if jet.c == 0:
        return jet.eps * (jet.k / eng.H0) * (eng.eu0 * grad2 + eng.H0**2 * h2k2)
    return -jet.eps * (jet.k / eng.S0) * (eng.eu0 * grad2
                                          + eng.S0**2 * eng.C0**2 * h2k2)


def _cross_true(jet: BonnetJet) -> float:
    eng = _Engine(jet)
    h2k2 = eng.h0**2 + eng.k0**2
    if jet.c == 0:
        return _cross_display(jet)
    grad2 = eng.Rx0**2 + eng.Ry0**2
    return -jet.eps * (jet.k / eng.S0) * (eng.eu0 * grad2 + eng.S0**2 * h2k2)


def cross_display_residual(jet: BonnetJet) -> float:
    """Relative deviation of T(X, Y) from the printed closed form."""
    t = second_order_terms(jet)["XY"]
    disp = _cross_display(jet)
    return abs(t - disp) / max(1.0, abs(disp))


def cross_true_residual(jet: BonnetJet) -> float:
    """Relative deviation of T(X, Y) from the derived closed form (equals
    the printed one in the flat case)."""
    t = second_order_terms(jet)["XY"]
    want = _cross_true(jet)
    return abs(t - want) / max(1.0, abs(want))


def second_order_identity_check(jet: BonnetJet, tol: float = 1e-10) -> CheckReport:
    """Structure of the second-order pairing terms.

    Checked for any admissible jet: the diagonal terms do not depend on
    the sign eps.  Under the corrected compatibility branch additionally:
    symmetry of the mixed term, oddness in eps, agreement with the derived
    closed form, and its nonvanishing."""
    terms = second_order_terms(jet)
    scale = 1.0 + max(abs(v) for v in terms.values())
    residuals = [
        abs(terms["XX"] - terms["XX_flip"]) / scale,
        abs(terms["YY"] - terms["YY_flip"]) / scale,
    ]
    detail = f"c={jet.c:g}; branch={jet.branch}"
    if jet.branch == "corrected":
        residuals.append(abs(terms["XY"] - terms["YX"]) / scale)
        residuals.append(abs(terms["XY"] + terms["XY_flip"]) / scale)
        residuals.append(cross_true_residual(jet))
        if abs(terms["XY"]) <= 1e-6 * scale:
            residuals.append(1.0)  # mixed term must not vanish
            detail += "; mixed term vanished"
    worst = max(residuals)
    return CheckReport(name="bonnet_second_order", max_residual=float(worst),
                       tolerance=tol, passed=bool(worst <= tol),
                       samples=len(residuals), detail=detail)
