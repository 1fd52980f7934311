import numpy as np
import pytest

from darboux_forge.lorentz_model import (
    EuclideanEmbedding,
    HyperplaneError,
    congruence_induced_metric,
    congruence_map,
    congruence_regularity,
    embed_point,
    embed_tangent,
    lorentz_to_sphere,
    minkowski_dot,
    sphere_to_lorentz,
    standard_embedding,
)


def test_minkowski_signature():
    v = np.array([1.0, 2.0, 3.0])
    assert minkowski_dot(v, v) == pytest.approx(1 + 4 - 9)
    e_last = np.array([0.0, 0.0, 1.0])
    assert minkowski_dot(e_last, e_last) == -1.0


def test_standard_embedding_triple():
    E = standard_embedding(4)
    E.validate()
    assert minkowski_dot(E.p0, E.p0) == pytest.approx(0.0, abs=1e-15)
    assert minkowski_dot(E.w, E.w) == pytest.approx(0.0, abs=1e-15)
    assert minkowski_dot(E.p0, E.w) == pytest.approx(1.0)
    # spacelike block: orthonormal and orthogonal to both null vectors
    for i in range(4):
        for j in range(4):
            want = 1.0 if i == j else 0.0
            assert minkowski_dot(E.D[:, i], E.D[:, j]) == pytest.approx(want)
        assert minkowski_dot(E.D[:, i], E.p0) == pytest.approx(0.0)
        assert minkowski_dot(E.D[:, i], E.w) == pytest.approx(0.0)


def test_embedded_points_are_isotropic():
    E = standard_embedding(3)
    rng = np.random.default_rng(0)
    for x in rng.normal(size=(20, 3)) * 3.0:
        p = embed_point(E, x)
        assert abs(minkowski_dot(p, p)) < 1e-12 * (1 + x @ x) ** 2
        assert minkowski_dot(p, E.w) == pytest.approx(1.0)


def test_embedding_is_isometric():
    """Tangent map preserves the Euclidean inner product (flat metric in
    the light-cone chart normalized by <psi, w> = 1)."""
    E = standard_embedding(3)
    rng = np.random.default_rng(1)
    for _ in range(20):
        x = rng.normal(size=3)
        v = rng.normal(size=3)
        u = rng.normal(size=3)
        got = minkowski_dot(embed_tangent(E, x, v), embed_tangent(E, x, u))
        assert got == pytest.approx(float(v @ u), abs=1e-12)


def test_embedded_point_differential_consistency():
    # directional finite difference of embed_point reproduces embed_tangent
    E = standard_embedding(3)
    x = np.array([0.3, -0.7, 1.1])
    v = np.array([0.5, 0.2, -0.4])
    h = 1e-6
    fd = (embed_point(E, x + h * v) - embed_point(E, x - h * v)) / (2 * h)
    assert np.allclose(fd, embed_tangent(E, x, v), atol=1e-8)


def test_sphere_dictionary_round_trip():
    E = standard_embedding(3)
    rng = np.random.default_rng(2)
    for _ in range(25):
        center = rng.normal(size=3) * 2.0
        radius = float(rng.uniform(0.1, 5.0))
        orientation = 1 if rng.random() < 0.5 else -1
        el = sphere_to_lorentz(E, center, radius, orientation)
        assert minkowski_dot(el.lorentz_rep, el.lorentz_rep) == pytest.approx(1.0)
        back = lorentz_to_sphere(E, el.lorentz_rep)
        assert np.allclose(back.center, center, atol=1e-10)
        assert back.radius == pytest.approx(radius)
        assert back.orientation == orientation


def test_sphere_representative_decomposition():
    """v = (1/R) psi(f) + psi_* N at every point f of the sphere, with N the
    inward unit normal for orientation +1."""
    E = standard_embedding(3)
    center = np.array([1.0, -2.0, 0.5])
    radius = 1.5
    el = sphere_to_lorentz(E, center, radius, orientation=1)
    rng = np.random.default_rng(3)
    for _ in range(10):
        d = rng.normal(size=3)
        d /= np.linalg.norm(d)
        f = center + radius * d
        inward = -d
        v = embed_point(E, f) / radius + embed_tangent(E, f, inward)
        assert np.allclose(v, el.lorentz_rep, atol=1e-12)


def test_orientation_flip_negates_representative():
    E = standard_embedding(3)
    plus = sphere_to_lorentz(E, [0.0, 0.0, 1.0], 2.0, orientation=1)
    minus = sphere_to_lorentz(E, [0.0, 0.0, 1.0], 2.0, orientation=-1)
    assert np.allclose(plus.lorentz_rep + minus.lorentz_rep, 0.0)


def test_invalid_sphere_inputs():
    E = standard_embedding(3)
    with pytest.raises(ValueError):
        sphere_to_lorentz(E, [0.0, 0.0, 0.0], -1.0)
    with pytest.raises(ValueError):
        sphere_to_lorentz(E, [0.0, 0.0, 0.0], 1.0, orientation=2)
    with pytest.raises(ValueError):
        lorentz_to_sphere(E, np.zeros(5))


def test_hyperplane_vector_rejected():
    # unit vectors orthogonal to w represent hyperplanes, not spheres
    E = standard_embedding(3)
    v = E.D[:, 0].copy()
    assert abs(minkowski_dot(v, E.w)) < 1e-15
    with pytest.raises(HyperplaneError):
        lorentz_to_sphere(E, v)


def test_congruence_map_matches_sphere_representative():
    """alpha psi(f) + psi_* N equals the representative of the tangent
    sphere of radius 1/alpha centered at f + N / alpha."""
    E = standard_embedding(3)
    f = np.array([0.2, 0.4, -1.0])
    n = np.array([3.0, 0.0, 4.0]) / 5.0
    alpha = 0.8
    got = congruence_map(E, f, n, alpha)
    el = sphere_to_lorentz(E, f + n / alpha, 1.0 / alpha, orientation=1)
    assert np.allclose(got, el.lorentz_rep, atol=1e-12)
    assert minkowski_dot(got, got) == pytest.approx(1.0)


def test_congruence_metric_and_regularity():
    class Forms:
        pass

    forms = Forms()
    forms.shape = np.diag([2.0, -1.0])
    forms.metric = np.eye(2)
    forms.principal_curvatures = np.array([-1.0, 2.0])
    x = np.array([1.0, 0.0])
    got = congruence_induced_metric(None, forms, 0.5, x, x)
    assert got == pytest.approx((2.0 - 0.5) ** 2)
    assert congruence_regularity(forms, 0.5, tol=1e-6)
    assert not congruence_regularity(forms, 2.0, tol=1e-6)


def test_validate_rejects_broken_triple():
    E = standard_embedding(2)
    bad = EuclideanEmbedding(p0=E.p0, w=2.0 * E.w, D=E.D)
    with pytest.raises(ValueError):
        bad.validate()
