import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rcpaint.scene import (
    Camera, CameraKey, DirectionalLight, InvalidScene, Material, Scene, Sphere, TriangleMesh,
    equirect_lookup, equirect_uv, film_point, local_to_world, trace,
)

IDENTITY = dict(eye=(0, 0, 0), right=(1, 0, 0), up=(0, 1, 0), forward=(0, 0, 1))


def cam(**kw):
    base = dict(IDENTITY, film_distance=2.0, film_half_width=0.8, film_half_height=0.6)
    base.update(kw)
    return Camera(**base)


def test_film_point_examples():
    c = cam(eye=(1.0, 2.0, 3.0))
    center = np.array([1.0, 2.0, 5.0])
    np.testing.assert_array_equal(film_point(c, 0.5, 0.5), center)
    np.testing.assert_allclose(film_point(c, 1.0, 0.5), center + [0.8, 0, 0], atol=1e-15)
    np.testing.assert_allclose(film_point(c, 0.5, 0.0), center + [0, 0.6, 0], atol=1e-15)


@settings(max_examples=200, deadline=None)
@given(st.tuples(*[st.floats(0, 1)] * 4))
def test_film_point_affine(uvs):
    u1, v1, u2, v2 = uvs
    c = cam(eye=(0.3, -1.0, 2.0))
    p = film_point(c, u1, v1) + film_point(c, u2, v2) - 2 * film_point(c, (u1 + u2) / 2, (v1 + v2) / 2)
    np.testing.assert_allclose(p, 0, atol=1e-9)


def test_local_to_world_examples():
    c = cam()
    np.testing.assert_array_equal(local_to_world(c, (0, 0, 0)), [0, 0, 0])
    np.testing.assert_array_equal(local_to_world(c, (1, 0, 0)), [1, 0, 0])
    c2 = Camera((0, 0, 0), (1, 0, 0), (0, 0, 1), (0, -1, 0))
    np.testing.assert_array_equal(local_to_world(c2, (0, 2, 0)), [0, 0, 2])


def test_camera_rejects_skewed_basis():
    with pytest.raises(InvalidScene):
        Camera((0, 0, 0), (1, 0, 0), (0.1, 1, 0), (0, 0, 1))


def test_look_at_aspect_and_basis():
    c = Camera.look_at((1, 2, 3), (1, 2, 10), (0, 1, 0), 90.0, 320, 200)
    np.testing.assert_allclose(c.right, [1, 0, 0], atol=1e-15)
    np.testing.assert_allclose(c.up, [0, 1, 0], atol=1e-15)
    assert math.isclose(c.film_half_width, 1.0)
    assert abs(c.film_half_width / c.film_half_height - 320 / 200) < 1e-12


def test_equirect_uv_poles_and_forward():
    assert equirect_uv(np.array([0.0, 1.0, 0.0]))[1] == 0.0
    assert equirect_uv(np.array([0.0, -1.0, 0.0]))[1] == 1.0
    u, v = equirect_uv(np.array([0.0, 0.0, 1.0]))
    assert (u, v) == (0.5, 0.5)


def test_equirect_lookup_rows():
    img = np.zeros((4, 8, 3))
    img[0] = (1, 0, 0)
    img[-1] = (0, 0, 1)
    img[1:3, 3:5] = (0, 1, 0)
    np.testing.assert_array_equal(equirect_lookup(np.array([0.0, 1.0, 0.0]), img), [1, 0, 0])
    np.testing.assert_array_equal(equirect_lookup(np.array([0.0, -1.0, 0.0]), img), [0, 0, 1])
    np.testing.assert_array_equal(equirect_lookup(np.array([0.0, 0.0, 1.0]), img), [0, 1, 0])


def test_equirect_wraps_horizontally():
    img = np.zeros((2, 4, 3))
    img[:, 0] = 1.0
    img[:, 3] = 0.0
    # u = 0 lies halfway between the last and first column centers
    d = np.array([-1e-300, 0.0, -1.0])
    np.testing.assert_allclose(equirect_lookup(d / np.linalg.norm(d), img), [0.5] * 3, atol=1e-12)


def scene_with(*prims, env=None):
    return Scene(environment=np.full((4, 8, 3), 0.25) if env is None else env, primitives=prims)


def test_trace_sphere_hit():
    s = scene_with(Sphere((0, 0, 5), 1.0))
    out = trace(s, np.zeros(3), np.array([0.0, 0.0, 1.0]))
    assert out.depth[()] == 4.0
    np.testing.assert_array_equal(out.normal, [0, 0, -1])
    assert out.object_id[()] == 1
    np.testing.assert_array_equal(out.position, [0, 0, 4])


def test_trace_miss_is_environment():
    env = np.random.default_rng(0).random((8, 16, 3))
    s = scene_with(env=env)
    d = np.array([0.3, 0.4, 0.866])
    d /= np.linalg.norm(d)
    out = trace(s, np.zeros(3), d)
    assert out.object_id[()] == 0 and out.depth[()] == np.inf
    np.testing.assert_array_equal(out.color, equirect_lookup(d, env))
    np.testing.assert_array_equal(out.normal, -d)


def test_trace_nearest_hit():
    s = scene_with(Sphere((0, 0, 8), 1.0), Sphere((0, 0, 4), 1.0))
    out = trace(s, np.zeros(3), np.array([0.0, 0.0, 1.0]))
    assert out.depth[()] == 3.0 and out.object_id[()] == 2


def test_trace_lambert_shading():
    s = Scene(environment=np.zeros((2, 2, 3)), primitives=[Sphere((0, 0, 5), 1.0, Material((0.5, 0.5, 0.5)))],
              light=DirectionalLight((0, 0, 1), 0.6), ambient=0.1)
    out = trace(s, np.zeros(3), np.array([0.0, 0.0, 1.0]))
    np.testing.assert_allclose(out.color, [0.5 * (0.1 + 0.6)] * 3, atol=1e-15)
    s2 = Scene(environment=np.zeros((2, 2, 3)), primitives=[Sphere((0, 0, 5), 1.0, Material((1, 1, 1)))],
               light=DirectionalLight((0, 0, 1), 5.0), ambient=0.5)
    assert trace(s2, np.zeros(3), np.array([0.0, 0.0, 1.0])).color.max() == 1.0


def test_trace_triangle_mesh():
    mesh = TriangleMesh([[-1, -1, 3], [1, -1, 3], [0, 1, 3]], [[0, 1, 2]])
    s = scene_with(mesh)
    out = trace(s, np.zeros(3), np.array([0.0, 0.0, 1.0]))
    assert out.depth[()] == 3.0 and out.object_id[()] == 1
    np.testing.assert_allclose(out.normal, [0, 0, -1])
    miss = trace(s, np.zeros(3), np.array([0.0, 0.0, -1.0]))
    assert miss.object_id[()] == 0


def test_degenerate_geometry_rejected():
    with pytest.raises(InvalidScene):
        Sphere((0, 0, 0), 0.0)
    with pytest.raises(InvalidScene):
        TriangleMesh([[0, 0, 0], [1, 0, 0], [2, 0, 0]], [[0, 1, 2]])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.floats(-2, 2), st.floats(-2, 2), st.floats(3, 20), st.floats(0.1, 2)),
                min_size=1, max_size=5))
def test_nearest_hit_property(spheres):
    prims = [Sphere(s[:3], s[3]) for s in spheres]
    s = scene_with(*prims)
    rng = np.random.default_rng(len(spheres))
    d = rng.normal(size=(64, 3)) * [0.2, 0.2, 1] + [0, 0, 2]
    d /= np.linalg.norm(d, axis=-1, keepdims=True)
    o = np.zeros((64, 3))
    out = trace(s, o, d)
    for p in prims:
        assert np.all(out.depth <= p.intersect(o, d))


def test_trace_is_deterministic(sphere_scene):
    d = np.random.default_rng(3).normal(size=(500, 3))
    d /= np.linalg.norm(d, axis=-1, keepdims=True)
    a = trace(sphere_scene, np.zeros((500, 3)), d)
    b = trace(sphere_scene, np.zeros((500, 3)), d)
    assert a.identical(b)
    # subsets give the same bits as the full batch
    assert a[100:137].identical(trace(sphere_scene, np.zeros((37, 3)), d[100:137]))


def test_camera_path_interpolation():
    keys = [CameraKey(0, (0, 0, 0), (0, 0, 1)), CameraKey(10, (10, 0, 0), (11, 0, 0))]
    s = Scene(environment=np.zeros((1, 1, 3)), camera_path=keys)
    c0 = s.camera_at(-3, 64, 32)
    np.testing.assert_allclose(c0.forward, [0, 0, 1])
    c5 = s.camera_at(5, 64, 32)
    np.testing.assert_allclose(c5.eye, [5, 0, 0])
    h = math.sqrt(0.5)
    np.testing.assert_allclose(c5.forward, [h, 0, h], atol=1e-12)
    basis = np.stack([c5.right, c5.up, c5.forward])
    np.testing.assert_allclose(basis @ basis.T, np.eye(3), atol=1e-12)
    np.testing.assert_allclose(s.camera_at(99, 64, 32).forward, [1, 0, 0], atol=1e-15)


def test_empty_camera_path():
    with pytest.raises(InvalidScene):
        Scene(environment=np.zeros((1, 1, 3))).camera_at(0, 4, 4)
