import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from darboux_forge.hypersurface import (
    DomainError,
    InversionSpec,
    ParamImmersion,
    apply_inversion,
    conformal_factor_field,
    fundamental_forms,
    get_surface,
    inversion_shape_law,
    invert_point,
    invert_surface,
    jet_eval,
)


# --------------------------------------------------------------------------
# jets

def test_analytic_jet_is_used_verbatim():
    sph = get_surface("sphere")
    u = np.array([1.1, 0.3])
    jet = jet_eval(sph, u)
    assert jet.fd_error_estimate is None
    assert np.allclose(jet.point, [np.sin(1.1) * np.cos(0.3),
                                   np.sin(1.1) * np.sin(0.3), np.cos(1.1)])


def test_fd_jet_matches_analytic_jet():
    sph = get_surface("sphere")
    blind = sph.without_analytic_jet()
    for u in ([1.1, 0.3], [0.7, -2.0], [2.2, 4.0]):
        exact = jet_eval(sph, np.array(u))
        fd = jet_eval(blind, np.array(u))
        assert fd.fd_error_estimate is not None
        assert np.allclose(fd.first, exact.first, atol=1e-7)
        assert np.allclose(fd.second, exact.second, atol=1e-5)


def test_fd_jet_against_symbolic_torus():
    """The registry torus has no analytic jet; check the finite-difference
    2-jet against a symbolic derivative oracle."""
    sympy = pytest.importorskip("sympy")
    a, b = sympy.symbols("a b", real=True)
    R, r = 2, 1
    w = R + r * sympy.cos(b)
    f = sympy.Matrix([w * sympy.cos(a), w * sympy.sin(a), r * sympy.sin(b)])
    vars_ = (a, b)
    first = sympy.lambdify(vars_, f.jacobian(sympy.Matrix(vars_)), "numpy")
    seconds = {
        (i, j): sympy.lambdify(vars_, f.diff(vars_[i]).diff(vars_[j]), "numpy")
        for i in range(2) for j in range(2)
    }
    torus = get_surface("torus")
    for u in ([0.4, 1.0], [2.0, -0.7], [5.0, 3.0]):
        jet = jet_eval(torus, np.array(u))
        assert np.allclose(jet.first, first(*u), atol=1e-7)
        for (i, j), fun in seconds.items():
            assert np.allclose(jet.second[:, i, j],
                               np.asarray(fun(*u)).ravel(), atol=1e-5)


def test_jet_domain_guard():
    sph = get_surface("sphere")
    with pytest.raises(DomainError):
        jet_eval(sph, np.array([0.2, 0.0]))  # on the boundary
    with pytest.raises(ValueError):
        jet_eval(sph, np.array([1.0, 0.0]), step=0.0)


# --------------------------------------------------------------------------
# fundamental forms

def test_sphere_forms_frozen_point():
    jet = jet_eval(get_surface("sphere"), np.array([np.pi / 2, 0.0]))
    forms = fundamental_forms(jet)
    assert np.allclose(forms.metric, np.eye(2), atol=1e-14)
    assert np.allclose(forms.normal, [1.0, 0.0, 0.0], atol=1e-14)
    assert np.allclose(forms.principal_curvatures, [-1.0, -1.0], atol=1e-12)


def test_sphere_metric_off_equator():
    th = 1.0
    jet = jet_eval(get_surface("sphere"), np.array([th, 2.0]))
    forms = fundamental_forms(jet)
    assert np.allclose(forms.metric, np.diag([1.0, np.sin(th) ** 2]), atol=1e-14)


def test_cylinder_principal_curvatures():
    jet = jet_eval(get_surface("cylinder"), np.array([0.7, 0.1]))
    forms = fundamental_forms(jet)
    assert np.allclose(sorted(forms.principal_curvatures), [-1.0, 0.0], atol=1e-12)


def test_paraboloid_umbilic_at_origin():
    jet = jet_eval(get_surface("graph:paraboloid"), np.array([0.0, 0.0]))
    forms = fundamental_forms(jet)
    assert np.allclose(forms.normal, [0.0, 0.0, 1.0])
    assert np.allclose(forms.shape, np.eye(2), atol=1e-14)


def test_orientation_flip_negates_shape_data():
    jet = jet_eval(get_surface("sphere"), np.array([1.2, 0.5]))
    plus = fundamental_forms(jet, orientation=1)
    minus = fundamental_forms(jet, orientation=-1)
    assert np.allclose(plus.normal, -minus.normal)
    assert np.allclose(plus.shape, -minus.shape)
    assert np.allclose(plus.principal_curvatures,
                       -minus.principal_curvatures[::-1])
    assert np.allclose(plus.metric, minus.metric)


def test_principal_frame_is_metric_orthonormal():
    jet = jet_eval(get_surface("torus"), np.array([0.4, 1.0]))
    forms = fundamental_forms(jet)
    gram = forms.principal_frame.T @ forms.metric @ forms.principal_frame
    assert np.allclose(gram, np.eye(2), atol=1e-9)


def test_rank_deficient_jet_rejected():
    collapsed = ParamImmersion(
        2,
        lambda u: np.array([u[0], u[0], 0.0]),
        None,
        name="fold",
    )
    with pytest.raises(ValueError, match="immersion"):
        fundamental_forms(jet_eval(collapsed, np.array([0.1, 0.2])))


# --------------------------------------------------------------------------
# inversions

@given(st.floats(-2.0, 2.0), st.floats(-2.0, 2.0), st.floats(0.5, 3.0))
@settings(max_examples=60, deadline=None)
def test_invert_point_is_involutive(x, y, r):
    spec = InversionSpec(np.array([0.1, -0.2]), r)
    p = np.array([x, y])
    if np.linalg.norm(p - spec.p0) < 1e-3:
        return
    assert np.allclose(invert_point(spec, invert_point(spec, p)), p, atol=1e-9)


def test_invert_point_fixes_the_sphere():
    spec = InversionSpec(np.array([1.0, 2.0, -0.5]), 1.7)
    d = np.array([2.0, -1.0, 2.0]) / 3.0
    p = spec.p0 + spec.r * d
    assert np.allclose(invert_point(spec, p), p, atol=1e-14)
    with pytest.raises(ValueError):
        invert_point(spec, spec.p0)


def test_inversion_spec_validation():
    with pytest.raises(ValueError):
        InversionSpec(np.zeros(3), 0.0)


def test_apply_inversion_matches_finite_differences():
    """Chain-rule jet of the inversion against a finite-difference jet of
    the composed map: two independent derivative routes."""
    spec = InversionSpec(np.array([0.0, 0.0, 3.0]), 2.0)
    sph = get_surface("sphere")
    composed = ParamImmersion(
        2,
        lambda u: invert_point(spec, sph.evaluate(u)),
        None,
        domain=sph.domain,
        name="composed",
    )
    for u in ([1.0, 0.4], [1.8, -0.9]):
        exact = apply_inversion(spec, jet_eval(sph, np.array(u)))
        fd = jet_eval(composed, np.array(u))
        assert np.allclose(exact.first, fd.first, atol=1e-7)
        assert np.allclose(exact.second, fd.second, atol=1e-4)


def test_invert_surface_wraps_domain_and_name():
    sph = get_surface("sphere")
    inv = invert_surface(InversionSpec(np.array([0.0, 0.0, 3.0]), 2.0), sph)
    assert inv.name == "inverted(sphere)"
    assert inv.ndim == 2
    lo, hi = inv.domain
    assert np.allclose(lo, sph.domain[0]) and np.allclose(hi, sph.domain[1])
    u = np.array([1.3, 0.2])
    jet = jet_eval(inv, u)
    assert np.allclose(jet.point, inv.evaluate(u))


def test_shape_law_predicts_inverted_curvatures():
    spec = InversionSpec(np.array([0.0, 0.0, 3.0]), 2.0)
    sph = get_surface("sphere")
    inv = invert_surface(spec, sph)
    for u in ([1.0, 0.3], [2.0, -1.0]):
        jet = jet_eval(sph, np.array(u))
        predicted = inversion_shape_law(spec, jet, fundamental_forms(jet))
        got = fundamental_forms(jet_eval(inv, np.array(u)))
        pk = np.sort(predicted.principal_curvatures)
        gk = np.sort(got.principal_curvatures)
        match = min(np.max(np.abs(pk - gk)), np.max(np.abs(pk + gk[::-1])))
        assert match < 1e-8
        assert np.allclose(predicted.metric, got.metric, atol=1e-9)


def test_conformal_factor_of_inversion_is_exact():
    spec = InversionSpec(np.array([0.0, 0.0, 3.0]), 2.0)
    sph = get_surface("sphere")
    inv = invert_surface(spec, sph)
    samples = np.array([[1.0, 0.0], [1.5, 0.7], [0.8, -0.5]])
    phi, aniso = conformal_factor_field(sph, inv, samples)
    assert aniso < 1e-9
    for u, got in zip(samples, phi):
        rho2 = float(np.sum((sph.evaluate(u) - spec.p0) ** 2))
        assert got == pytest.approx(np.log(spec.r**2 / rho2), abs=1e-9)


# --------------------------------------------------------------------------
# registry

def test_registry_names_and_errors():
    for name in ("sphere", "cylinder", "torus", "graph:paraboloid"):
        surf = get_surface(name)
        assert surf.name == name
    with pytest.raises(KeyError):
        get_surface("klein-bottle")


def test_random_graph_is_seed_deterministic():
    a = get_surface("graph:random:7")
    b = get_surface("graph:random:7")
    c = get_surface("graph:random:8")
    u = np.array([0.2, -0.3])
    assert np.allclose(a.evaluate(u), b.evaluate(u))
    assert not np.allclose(a.evaluate(u), c.evaluate(u))
    # flat to first order at the origin by construction
    jet = jet_eval(a, np.zeros(2))
    assert np.allclose(jet.first, [[1, 0], [0, 1], [0, 0]], atol=1e-14)
