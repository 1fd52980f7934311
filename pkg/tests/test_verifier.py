import math

import numpy as np
import pytest
from scipy.interpolate import CubicSpline

from darboux_forge.lorentz_model import SphereElement
from darboux_forge.verifier import (
    CheckReport,
    DEFAULT_TOLS,
    Grid,
    check_b_squared,
    check_common_congruence,
    check_conformality,
    check_darboux_condition,
    check_envelope,
    check_radius_trace,
    recover_ribaucour_data,
    run_all,
    sample_grid,
    weyl_display_quadratic_residual,
    weyl_product_check,
)


class _Proxy:
    """Pair stand-in with selected attributes overridden."""

    def __init__(self, pair, **overrides):
        self._pair = pair
        self._overrides = overrides

    def __getattr__(self, name):
        if name in self._overrides:
            return self._overrides[name]
        return getattr(self._pair, name)


# --------------------------------------------------------------------------
# grids and reports

def test_grid_points_are_row_major():
    g = Grid(axes=(np.array([0.0, 1.0]), np.array([10.0, 20.0, 30.0])))
    assert g.shape == (2, 3)
    pts = g.points
    assert pts.shape == (6, 2)
    # last axis varies fastest
    assert np.allclose(pts[0], [0.0, 10.0])
    assert np.allclose(pts[1], [0.0, 20.0])
    assert np.allclose(pts[3], [1.0, 10.0])
    assert g.spacing(1) == pytest.approx(10.0)


def test_sample_grid_stays_interior(cylinder_pair):
    g = sample_grid(cylinder_pair, counts=(5, 3))
    lo, hi = cylinder_pair.f.domain
    pts = g.points
    assert np.all(pts >= lo + 1e-12) and np.all(pts <= hi - 1e-12)
    narrow = sample_grid(cylinder_pair, counts=(5, 3), transverse_halfwidth=0.1)
    assert narrow.spacing(1) == pytest.approx(0.1)


def test_report_serialization():
    rep = CheckReport(name="demo", max_residual=1e-9, tolerance=1e-6,
                      passed=True, samples=12, detail="note")
    doc = rep.to_json()
    assert doc["pass"] is True
    assert doc["name"] == "demo"
    assert "demo" in str(rep) and "note" in str(rep)


# --------------------------------------------------------------------------
# tangency battery

def test_battery_passes_on_cylinder(cylinder_pair):
    out = run_all(cylinder_pair)
    assert out["pass"] is True
    names = [rep["name"] for rep in out["checks"]]
    assert names == ["envelope[f]", "envelope[f_tilde]", "common_congruence",
                     "conformality", "b_squared", "radius_trace",
                     "darboux_condition"]
    by_name = {rep["name"]: rep for rep in out["checks"]}
    assert by_name["darboux_condition"]["detail"].startswith("two-cluster")
    # default tolerances are the documented ones
    assert by_name["envelope[f]"]["tolerance"] == DEFAULT_TOLS["envelope"]


def test_envelope_detects_wrong_radius(cylinder_pair):
    grid = sample_grid(cylinder_pair, counts=(5, 3))

    def inflated(u):
        el = cylinder_pair.sphere_at(u)
        return SphereElement(center=el.center, radius=1.01 * el.radius,
                             orientation=el.orientation,
                             lorentz_rep=el.lorentz_rep)

    good = check_envelope(cylinder_pair.f, cylinder_pair.sphere_at, grid)
    bad = check_envelope(cylinder_pair.f, inflated, grid)
    assert good.passed and not bad.passed
    assert bad.max_residual > 1e-3


def test_radius_trace_detects_wrong_radius(cone_pair):
    grid = sample_grid(cone_pair, counts=(5, 3))

    def inflated(u):
        el = cone_pair.sphere_at(u)
        return SphereElement(center=el.center, radius=1.02 * el.radius,
                             orientation=el.orientation,
                             lorentz_rep=el.lorentz_rep)

    bad = check_radius_trace(_Proxy(cone_pair, sphere_at=inflated), grid)
    assert not bad.passed


def test_conformality_detects_wrong_declared_factor(rotation_pair):
    grid = sample_grid(rotation_pair, counts=(5, 3))
    lying = _Proxy(rotation_pair,
                   conformal_factor=lambda s: rotation_pair.conformal_factor(s) + 0.05)
    assert check_conformality(rotation_pair, grid).passed
    assert not check_conformality(lying, grid).passed


def test_checks_are_symmetric_under_swap(rotation_pair):
    """Exchanging the two members (and flipping the sign of the declared
    conformal exponent) leaves every tangency check passing."""
    swapped = _Proxy(rotation_pair,
                     f=rotation_pair.f_tilde,
                     f_tilde=rotation_pair.f,
                     conformal_factor=lambda s: -rotation_pair.conformal_factor(s))
    grid = sample_grid(rotation_pair, counts=(7, 3))
    assert check_common_congruence(swapped, grid).passed
    assert check_conformality(swapped, grid).passed
    assert check_radius_trace(swapped, grid).passed
    assert check_b_squared(swapped.f, swapped.f_tilde, swapped.sphere_at,
                           grid).passed


# --------------------------------------------------------------------------
# transform-data recovery

def test_recover_round_trips_the_displacement(cylinder_pair):
    grid = sample_grid(cylinder_pair, counts=(15, 3))
    phi, big_f, nu, residual = recover_ribaucour_data(cylinder_pair, grid,
                                                      with_residual=True)
    assert residual <= 1e-4
    pts = grid.points
    for i, u in enumerate(pts):
        delta = cylinder_pair.f.evaluate(u) - cylinder_pair.f_tilde.evaluate(u)
        assert np.allclose(2.0 * phi[i] * nu[i] * big_f[i], delta, atol=1e-10)
        assert nu[i] * float(big_f[i] @ big_f[i]) == pytest.approx(1.0,
                                                                   abs=1e-12)


def test_recovered_scale_follows_the_driving_variable(cylinder_pair):
    """Up to the global gauge the recovered scalar is the third component of
    the driving system, so their ratio must be constant on the grid.

    The constancy defect is pure Simpson truncation of the edge integrals,
    so it must also shrink at 4th order when the arclength axis refines."""
    states = cylinder_pair.states
    spline = CubicSpline([st.s for st in states],
                         [float(st.h[2]) for st in states])

    def deviation(counts):
        grid = sample_grid(cylinder_pair, counts=counts)
        phi, _, _ = recover_ribaucour_data(cylinder_pair, grid)
        ratios = phi / spline(grid.points[:, 0])
        return np.max(np.abs(ratios / ratios[0] - 1.0))

    coarse = deviation((15, 3))
    fine = deviation((61, 3))
    assert fine < 1e-6
    # spacing shrinks 14/60: a 4th-order defect drops by ~337
    assert coarse / fine > 100.0


def test_recover_requires_structured_grid(cylinder_pair):
    with pytest.raises(TypeError):
        recover_ribaucour_data(cylinder_pair, np.zeros((4, 3)))


# --------------------------------------------------------------------------
# transform condition

def test_darboux_condition_two_cluster(cylinder_pair):
    grid = sample_grid(cylinder_pair, counts=(21, 7),
                       transverse_halfwidth=0.15)
    rep = check_darboux_condition(cylinder_pair, grid)
    assert rep.passed
    assert rep.detail.startswith("two-cluster")
    assert rep.max_residual <= 1e-3


def test_darboux_condition_flags_inversion_as_trivial(inversion_control):
    grid = Grid(axes=(np.linspace(0.4, np.pi - 0.4, 25),
                      np.linspace(-1.0, 1.0, 9)))
    rep = check_darboux_condition(inversion_control, grid)
    assert not rep.passed
    assert rep.detail.startswith("single-cluster")


def test_darboux_condition_grid_guards(cylinder_pair):
    with pytest.raises(ValueError, match="at least 7"):
        check_darboux_condition(cylinder_pair,
                                sample_grid(cylinder_pair, counts=(9, 5)))
    with pytest.raises(TypeError):
        check_darboux_condition(cylinder_pair, np.zeros((40, 3)))


# --------------------------------------------------------------------------
# conformal curvature of the product geometry

WEYL_POINTS = np.array([
    [0.1, -0.2, 0.3, 0.05],
    [-0.3, 0.2, -0.1, 0.25],
])


@pytest.mark.parametrize("c", [0.0, 1.0, -0.5])
def test_weyl_product_constants(c):
    rep = weyl_product_check(c, WEYL_POINTS)
    assert rep.passed, rep
    assert rep.max_residual <= 1e-6


def test_weyl_rejects_degenerate_factor():
    with pytest.raises(ValueError):
        weyl_product_check(-1.0, WEYL_POINTS)


def test_weyl_block_quadratic_misses_mixed_planes():
    # the two-term closed form drops the mixed-block components, so the
    # deviation must stay bounded away from zero
    got = weyl_display_quadratic_residual(0.0, WEYL_POINTS[:1])
    assert got > 0.05
