"""Generated feature surfaces: registry, validity, orientation, noise."""

import numpy as np
import pytest

from gaussfeat.datagen import (
    CLASSES,
    N_CLASSES,
    add_normal_noise,
    class_by_id,
    class_names,
    gen_feature_surface,
    gen_sample,
    random_rotation,
    sample_rng,
)
from gaussfeat.errors import ConfigError
from gaussfeat.mesh import (
    bounding_ball_radius,
    build_edge_adjacency,
    connected_components,
    edge_concavity_values,
)

from conftest import make_grid_patch


def test_registry_has_24_distinct_classes():
    assert N_CLASSES == 24
    names = class_names()
    assert len(set(names)) == 24
    assert [c.id for c in CLASSES] == list(range(24))
    assert class_by_id("through_hole").id == class_by_id(1).id == 1


def test_registry_rejects_unknown():
    with pytest.raises(ConfigError):
        class_by_id("waffle_iron")
    with pytest.raises(ConfigError):
        class_by_id(24)
    with pytest.raises(ConfigError):
        class_by_id(-1)


@pytest.mark.parametrize("cls", CLASSES, ids=[c.name for c in CLASSES])
def test_every_class_builds_a_valid_open_surface(cls):
    mesh = gen_sample(11, cls.id, 0)
    assert mesh.n_faces > 0
    assert np.isfinite(mesh.vertices).all()
    assert mesh.face_areas.min() > 0.0
    adj = build_edge_adjacency(mesh)
    assert adj.is_manifold()
    assert adj.is_oriented()
    # every machining surface is open at its mouth
    assert len(adj.boundary_edges()) > 0
    assert len(connected_components(mesh, adjacency=adj)) == 1


@pytest.mark.parametrize("cls", CLASSES, ids=[c.name for c in CLASSES])
def test_every_class_is_deterministic_per_seed(cls):
    a = gen_sample(3, cls.id, 5)
    b = gen_sample(3, cls.id, 5)
    assert np.array_equal(a.vertices, b.vertices)
    assert np.array_equal(a.faces, b.faces)
    c = gen_sample(4, cls.id, 5)
    assert a.vertices.shape != c.vertices.shape or \
        not np.allclose(a.vertices, c.vertices)


def test_pocket_floor_faces_up_walls_face_in():
    rng = sample_rng(0, 10, 0)
    mesh = gen_feature_surface("rectangular_pocket", rng, rigid_motion=False)
    nz = mesh.face_normals[:, 2]
    floor = nz > 0.999999
    walls = np.abs(nz) < 1e-9
    assert floor.sum() >= 2
    assert walls.sum() >= 8
    assert floor.sum() + walls.sum() == mesh.n_faces
    depth = -mesh.vertices[:, 2].min()
    assert np.allclose(mesh.face_centroids[floor][:, 2], -depth)
    # wall normals aim at the pocket interior
    c = mesh.face_centroids[walls]
    n = mesh.face_normals[walls]
    assert (np.einsum("ij,ij->i", n, c[:, :3] * [1, 1, 0]) < 0.0).all()


def test_through_hole_walls_face_the_axis():
    rng = sample_rng(0, 1, 0)
    mesh = gen_feature_surface("through_hole", rng, rigid_motion=False)
    c = mesh.face_centroids.copy()
    c[:, 2] = 0.0
    c /= np.linalg.norm(c, axis=1, keepdims=True)
    dots = np.einsum("ij,ij->i", mesh.face_normals, c)
    assert dots.max() < -0.97


def test_round_is_purely_convex():
    rng = sample_rng(0, 19, 0)
    mesh = gen_feature_surface("round", rng, rigid_motion=False)
    _, _, values = edge_concavity_values(mesh)
    eps = 1e-9 * mesh.bbox_diagonal()
    assert (values < eps).all()
    assert (values < -eps).any()


def test_pocket_has_concave_creases():
    rng = sample_rng(0, 10, 0)
    mesh = gen_feature_surface("rectangular_pocket", rng, rigid_motion=False)
    _, _, values = edge_concavity_values(mesh)
    assert (values > 1e-9 * mesh.bbox_diagonal()).any()


def test_tessellation_density_varies_across_samples():
    counts = {gen_sample(0, 1, i).n_faces for i in range(10)}
    assert len(counts) > 1


def test_rigid_motion_moves_but_preserves_area():
    posed = gen_sample(9, 11, 2)
    flat = gen_feature_surface(
        "circular_end_pocket", sample_rng(9, 11, 2), rigid_motion=False)
    assert posed.total_area() == pytest.approx(flat.total_area(), rel=1e-9)
    assert not np.allclose(posed.vertices[0], flat.vertices[0])


def test_random_rotation_is_orthonormal():
    rng = np.random.default_rng(5)
    for _ in range(10):
        q = random_rotation(rng)
        assert np.allclose(q @ q.T, np.eye(3), atol=1e-12)
        assert np.linalg.det(q) == pytest.approx(1.0, abs=1e-12)


def test_zero_noise_returns_the_same_mesh():
    mesh = gen_sample(2, 7, 0)
    out = add_normal_noise(mesh, 0.0, np.random.default_rng(0))
    assert out is mesh


def test_negative_noise_rejected():
    mesh = gen_sample(2, 7, 0)
    with pytest.raises(ConfigError):
        add_normal_noise(mesh, -0.1, np.random.default_rng(0))


def test_noise_displacement_scale():
    # mean |displacement| of N(0, s^2) along unit normals is s * sqrt(2/pi)
    mesh = make_grid_patch(40, 40)
    f = 0.01
    noisy = add_normal_noise(mesh, f, np.random.default_rng(123))
    disp = np.linalg.norm(noisy.vertices - mesh.vertices, axis=1)
    expected = f * bounding_ball_radius(mesh.vertices) * np.sqrt(2.0 / np.pi)
    assert disp.mean() == pytest.approx(expected, rel=0.05)
    assert np.array_equal(noisy.faces, mesh.faces)


def test_noise_is_deterministic():
    mesh = gen_sample(2, 5, 1)
    a = add_normal_noise(mesh, 0.002, np.random.default_rng(77))
    b = add_normal_noise(mesh, 0.002, np.random.default_rng(77))
    assert np.array_equal(a.vertices, b.vertices)


def test_sample_streams_are_independent():
    # drawing sample (5, 3, 0) never changes what (5, 3, 1) produces
    first = gen_sample(5, 3, 1)
    _ = gen_sample(5, 3, 0)
    again = gen_sample(5, 3, 1)
    assert np.array_equal(first.vertices, again.vertices)
