import math

import numpy as np
import pytest

from darboux_forge._util import stable_json
from darboux_forge.curve_ribaucour import (
    hyperbolic_circle,
    plane_circle,
    sphere_circle,
)
from darboux_forge.darboux_factory import (
    FAMILIES,
    build_cone_cylinder,
    build_cylinder,
    build_pair_from_inputs,
    build_rotation,
    darboux_partner,
    lift_congruence,
    mobius_mismatch,
)
from darboux_forge.hypersurface import jet_eval
from darboux_forge.lorentz_model import minkowski_dot


def test_family_list():
    assert set(FAMILIES) == {"cylinder", "cone", "rotation"}


# --------------------------------------------------------------------------
# builders

@pytest.mark.parametrize("builder,curve,u", [
    (build_cylinder, plane_circle(1.0), [0.7, 0.3, -0.2]),
    (build_cone_cylinder, sphere_circle(0.5), [0.7, 1.2, 0.3]),
    (build_rotation, hyperbolic_circle(1.0), [0.7, 0.2, -0.4]),
])
def test_builder_jets_match_finite_differences(builder, curve, u):
    surf = builder(curve, n=3)
    blind = surf.without_analytic_jet()
    exact = jet_eval(surf, np.array(u))
    fd = jet_eval(blind, np.array(u))
    assert exact.point.shape == (4,)
    assert np.allclose(exact.first, fd.first, atol=1e-6)
    assert np.allclose(exact.second, fd.second, atol=1e-4)


def test_builders_validate_the_curve_geometry():
    with pytest.raises(ValueError):
        build_cylinder(sphere_circle(0.5))
    with pytest.raises(ValueError):
        build_cone_cylinder(plane_circle(1.0))
    with pytest.raises(ValueError):
        build_rotation(plane_circle(1.0))
    with pytest.raises(ValueError):
        build_cylinder(plane_circle(1.0), n=1)


def test_cone_evaluation_rejects_nonpositive_t():
    cone = build_cone_cylinder(sphere_circle(0.5), n=3)
    with pytest.raises(ValueError, match="t must be positive"):
        cone.evaluate(np.array([0.0, -1.0, 0.0]))


def test_builder_dimensions_scale_with_n():
    surf = build_cylinder(plane_circle(1.0), n=5)
    u = np.array([0.3, 0.1, -0.1, 0.2, 0.0])
    assert surf.evaluate(u).shape == (6,)
    jet = jet_eval(surf, u)
    assert jet.first.shape == (6, 5)


# --------------------------------------------------------------------------
# congruence lift

def test_lift_radius_scales_on_the_cone(cone_pair):
    pair_circle = cone_pair.base_circle(0.5)
    el1 = lift_congruence("cone", pair_circle, n=3, transverse=[1.0, 0.0])
    el2 = lift_congruence("cone", pair_circle, n=3, transverse=[2.0, 0.0])
    assert el2.radius == pytest.approx(2.0 * el1.radius)
    assert np.allclose(el2.center[:3], 2.0 * el1.center[:3])
    with pytest.raises(ValueError, match="t must be positive"):
        lift_congruence("cone", pair_circle, n=3, transverse=[0.0, 0.0])
    with pytest.raises(ValueError, match="unknown family"):
        lift_congruence("helix", pair_circle)


def test_lift_representative_is_unit(cylinder_pair):
    el = cylinder_pair.sphere_at(np.array([0.5, 0.3, -0.2]))
    assert minkowski_dot(el.lorentz_rep, el.lorentz_rep) == pytest.approx(1.0)
    assert el.radius > 0


def test_cylinder_lift_keeps_translation_block(cylinder_pair):
    base = cylinder_pair.base_circle(0.5)
    el = cylinder_pair.sphere_at(np.array([0.5, 0.7, -0.4]))
    assert np.allclose(el.center[:2], base.center)
    assert np.allclose(el.center[2:], [0.7, -0.4])
    assert el.radius == pytest.approx(base.radius)


# --------------------------------------------------------------------------
# pairs

def test_partner_validates_family_and_curve():
    with pytest.raises(ValueError, match="needs a curve with c = 1"):
        darboux_partner("cone", plane_circle(1.0), 2.0, (1.0, 1.0, 1.0))
    with pytest.raises(ValueError, match="unknown family"):
        darboux_partner("plane", plane_circle(1.0), 2.0, (1.0, 1.0, 1.0))


def test_partner_conformal_factor_by_family(all_pairs):
    for family, pair in all_pairs.items():
        vals = [pair.conformal_factor(s) for s in (0.0, 1.0, 3.0)]
        if family == "rotation":
            assert max(abs(v) for v in vals) > 1e-3
        else:
            assert vals == [0.0, 0.0, 0.0]


def test_pair_json_shape(cylinder_pair):
    doc = cylinder_pair.to_json(table_rows=11)
    assert doc["format"] == "darboux-forge/pair-v1"
    assert doc["family"] == "cylinder"
    assert doc["curve"] == "circle:R=1"
    assert doc["A"] == 2.0
    assert len(doc["congruence"]) == 11
    assert len(doc["conformal_factor"]) == 11
    row = doc["congruence"][0]
    assert set(row) == {"s", "center", "radius"}
    assert len(row["center"]) == 4


def test_rebuild_from_inputs_is_deterministic():
    a = build_pair_from_inputs("cylinder", "circle:R=1", 2.0, (1.0, 1.0, 1.0),
                               s_range=(0.0, 1.0))
    b = build_pair_from_inputs("cylinder", "circle:R=1", 2.0, (1.0, 1.0, 1.0),
                               s_range=(0.0, 1.0))
    assert stable_json(a.to_json(table_rows=7)) == stable_json(b.to_json(table_rows=7))


# --------------------------------------------------------------------------
# conformal-congruence mismatch witness

def _samples_for(surface, count, seed):
    rng = np.random.default_rng(seed)
    lo, hi = surface.domain
    span = hi - lo
    return rng.uniform(lo + 0.08 * span, hi - 0.08 * span,
                       size=(count, len(lo)))


def test_mismatch_large_for_genuine_pairs(cylinder_pair):
    samples = _samples_for(cylinder_pair.f, 40, seed=3)
    assert mobius_mismatch(cylinder_pair.f, cylinder_pair.f_tilde,
                           samples) > 1e-3


def test_mismatch_tiny_for_similarity_control(cylinder_pair):
    f = cylinder_pair.f
    # rotate, scale and translate the same surface
    theta = 0.7
    rot = np.eye(4)
    rot[0, 0] = rot[1, 1] = math.cos(theta)
    rot[0, 1] = -math.sin(theta)
    rot[1, 0] = math.sin(theta)
    shift = np.array([0.3, -1.0, 0.2, 2.0])
    from darboux_forge.hypersurface import ParamImmersion

    g = ParamImmersion(f.ndim, lambda u: 1.7 * rot @ f.evaluate(u) + shift,
                       None, domain=f.domain, name="moved")
    samples = _samples_for(f, 30, seed=4)
    assert mobius_mismatch(f, g, samples) < 1e-10


def test_mismatch_tiny_for_inversion_control(inversion_control):
    samples = np.column_stack([
        np.random.default_rng(5).uniform(0.5, np.pi - 0.5, 30),
        np.random.default_rng(6).uniform(-1.0, 1.0, 30),
    ])
    got = mobius_mismatch(inversion_control.f, inversion_control.f_tilde,
                          samples,
                          center_hints=(np.array([0.0, 0.0, 3.0]),))
    assert got < 1e-10
