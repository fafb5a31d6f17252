"""Scene description, camera model and the ray tracer.

Everything here is vectorized over rays: ``origins`` and ``directions`` are
``(..., 3)`` arrays and :func:`trace` returns a :class:`FrameBuffer` of the
leading shape.  Vector arithmetic is spelled out per component so the result
of a pixel never depends on how many pixels share the call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.transform import Rotation, Slerp

from .imaging import FrameBuffer, bilinear_rgb, clamp_color

HIT_EPSILON = 1e-4


class InvalidScene(ValueError):
    pass


def dot(a, b):
    return a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1] + a[..., 2] * b[..., 2]


def cross(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    return np.stack(
        [
            a[..., 1] * b[..., 2] - a[..., 2] * b[..., 1],
            a[..., 2] * b[..., 0] - a[..., 0] * b[..., 2],
            a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0],
        ],
        axis=-1,
    )


def norm(a):
    return np.sqrt(dot(a, a))


def normalize(a):
    a = np.asarray(a, dtype=np.float64)
    return a / norm(a)[..., None]


@dataclass(frozen=True)
class Camera:
    eye: np.ndarray
    right: np.ndarray
    up: np.ndarray
    forward: np.ndarray
    film_distance: float = 1.0
    film_half_width: float = 1.0
    film_half_height: float = 1.0

    def __post_init__(self):
        for name in ("eye", "right", "up", "forward"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=np.float64))
        basis = np.stack([self.right, self.up, self.forward])
        if not np.allclose(basis @ basis.T, np.eye(3), atol=1e-6):
            raise InvalidScene("camera basis must be orthonormal")
        if min(self.film_distance, self.film_half_width, self.film_half_height) <= 0:
            raise InvalidScene("film distance and extents must be positive")

    @classmethod
    def look_at(cls, eye, look, up=(0.0, 1.0, 0.0), fov: float = 60.0,
                width: int = 1, height: int = 1) -> "Camera":
        """Pinhole camera with horizontal field of view ``fov`` degrees, film at distance 1."""
        eye = np.asarray(eye, dtype=np.float64)
        forward = normalize(np.asarray(look, dtype=np.float64) - eye)
        right = cross(np.asarray(up, dtype=np.float64), forward)
        if norm(right) < 1e-12:
            raise InvalidScene("camera up vector is parallel to the view direction")
        right = normalize(right)
        true_up = cross(forward, right)
        if not 0.0 < fov < 180.0:
            raise InvalidScene(f"fov must be in (0, 180) degrees, got {fov}")
        half_w = math.tan(math.radians(fov) / 2.0)
        return cls(eye, right, true_up, forward, 1.0, half_w, half_w * height / width)

    def with_aspect(self, width: int, height: int) -> "Camera":
        return Camera(self.eye, self.right, self.up, self.forward, self.film_distance,
                      self.film_half_width, self.film_half_width * height / width)


def film_point(camera: Camera, u, v) -> np.ndarray:
    """World position of texture coordinate (u, v) on the film plane.

    Image v grows downward while camera up points up, hence the minus sign.
    """
    u = np.asarray(u, dtype=np.float64)[..., None]
    v = np.asarray(v, dtype=np.float64)[..., None]
    center = camera.eye + camera.film_distance * camera.forward
    return (center
            + (2.0 * u - 1.0) * camera.film_half_width * camera.right
            - (2.0 * v - 1.0) * camera.film_half_height * camera.up)


def local_to_world(camera: Camera, v_local) -> np.ndarray:
    v = np.asarray(v_local, dtype=np.float64)
    return (v[..., 0:1] * camera.right
            + v[..., 1:2] * camera.up
            + v[..., 2:3] * camera.forward)


def equirect_uv(direction):
    d = np.asarray(direction, dtype=np.float64)
    u = 0.5 + np.arctan2(d[..., 0], d[..., 2]) / (2.0 * math.pi)
    v = 0.5 - np.arcsin(np.clip(d[..., 1], -1.0, 1.0)) / math.pi
    return u, v


def equirect_lookup(direction, image: np.ndarray) -> np.ndarray:
    """Bilinear color of a lat-long image in ``direction``; wraps in u, clamps in v."""
    h, w = image.shape[:2]
    u, v = equirect_uv(direction)
    x = u * w - 0.5
    x0f = np.floor(x)
    fx = x - x0f
    x0 = x0f.astype(np.int64) % w
    x1 = (x0 + 1) % w
    y = np.clip(v * h - 0.5, 0.0, h - 1.0)
    y0f = np.floor(y)
    fy = y - y0f
    y0 = y0f.astype(np.int64)
    y1 = np.minimum(y0 + 1, h - 1)
    return bilinear_rgb(image, x0, x1, fx, y0, y1, fy)


@dataclass(frozen=True)
class Material:
    albedo: tuple[float, float, float] = (0.8, 0.8, 0.8)
    texture: np.ndarray | None = None
    texture_path: str | None = None

    def shade_albedo(self, local_dir) -> np.ndarray:
        """Albedo per hit; textured spheres look up their outward normal."""
        if self.texture is None:
            return np.broadcast_to(np.asarray(self.albedo, dtype=np.float64), local_dir.shape)
        return equirect_lookup(local_dir, self.texture)


@dataclass(frozen=True)
class Sphere:
    center: tuple[float, float, float]
    radius: float
    material: Material = field(default_factory=Material)

    def __post_init__(self):
        if not self.radius > 0:
            raise InvalidScene(f"sphere radius must be positive, got {self.radius}")

    def intersect(self, origins, directions):
        """Nearest t > epsilon per ray, ``inf`` on miss."""
        c = np.asarray(self.center, dtype=np.float64)
        oc = origins - c
        b = dot(oc, directions)
        cc = dot(oc, oc) - self.radius * self.radius
        disc = b * b - cc
        hit = disc >= 0.0
        sq = np.sqrt(np.where(hit, disc, 0.0))
        t0 = -b - sq
        t1 = -b + sq
        t = np.where(t0 > HIT_EPSILON, t0, np.where(t1 > HIT_EPSILON, t1, np.inf))
        return np.where(hit, t, np.inf)

    def normal_at(self, points):
        return normalize(points - np.asarray(self.center, dtype=np.float64))


@dataclass(frozen=True)
class TriangleMesh:
    vertices: np.ndarray
    triangles: np.ndarray
    material: Material = field(default_factory=Material)
    source: str | None = None

    def __post_init__(self):
        vs = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        tris = np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        object.__setattr__(self, "vertices", vs)
        object.__setattr__(self, "triangles", tris)
        if tris.size and (tris.min() < 0 or tris.max() >= len(vs)):
            raise InvalidScene("triangle index out of range")
        a, b, c = vs[tris[:, 0]], vs[tris[:, 1]], vs[tris[:, 2]]
        if np.any(norm(cross(b - a, c - a)) <= 0.0):
            raise InvalidScene("mesh contains a degenerate triangle")

    def intersect(self, origins, directions):
        """Nearest t and the index of the triangle hit (-1 on miss)."""
        best = np.full(origins.shape[:-1], np.inf)
        which = np.full(origins.shape[:-1], -1, dtype=np.int64)
        vs = self.vertices
        for k, (ia, ib, ic) in enumerate(self.triangles):
            a = vs[ia]
            e1 = vs[ib] - a
            e2 = vs[ic] - a
            p = cross(directions, e2)
            det = dot(p, e1)
            ok = np.abs(det) > 1e-12
            inv = 1.0 / np.where(ok, det, 1.0)
            s = origins - a
            bu = dot(s, p) * inv
            q = cross(s, e1)
            bv = dot(directions, q) * inv
            t = dot(q, e2) * inv
            hit = ok & (bu >= 0.0) & (bv >= 0.0) & (bu + bv <= 1.0) & (t > HIT_EPSILON) & (t < best)
            best = np.where(hit, t, best)
            which = np.where(hit, k, which)
        return best, which

    def face_normals(self) -> np.ndarray:
        vs = self.vertices
        a, b, c = (vs[self.triangles[:, n]] for n in range(3))
        return normalize(cross(b - a, c - a))


@dataclass(frozen=True)
class DirectionalLight:
    direction: tuple[float, float, float] = (0.0, -1.0, 0.0)
    intensity: float = 1.0

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=np.float64)
        if norm(d) == 0.0:
            raise InvalidScene("light direction must be nonzero")
        if self.intensity < 0:
            raise InvalidScene("light intensity must be >= 0")
        object.__setattr__(self, "direction", tuple(float(x) for x in normalize(d)))


@dataclass(frozen=True)
class CameraKey:
    """A camera keyframe as written in scene files."""

    frame: int
    eye: tuple[float, float, float]
    look: tuple[float, float, float]
    up: tuple[float, float, float] = (0.0, 1.0, 0.0)
    fov: float = 60.0

    def camera(self, width: int, height: int) -> Camera:
        return Camera.look_at(self.eye, self.look, self.up, self.fov, width, height)


@dataclass(frozen=True)
class Scene:
    environment: np.ndarray
    primitives: tuple = ()
    light: DirectionalLight = field(default_factory=DirectionalLight)
    ambient: float = 0.2
    camera_path: tuple[CameraKey, ...] = ()
    environment_path: str | None = None

    def __post_init__(self):
        env = clamp_color(self.environment)
        if env.ndim != 3 or env.shape[2] != 3:
            raise InvalidScene("environment must be an HxWx3 image")
        object.__setattr__(self, "environment", env)
        object.__setattr__(self, "primitives", tuple(self.primitives))
        object.__setattr__(self, "camera_path", tuple(sorted(self.camera_path, key=lambda k: k.frame)))
        if not 0.0 <= self.ambient <= 1.0:
            raise InvalidScene(f"ambient must be in [0, 1], got {self.ambient}")

    def camera_at(self, frame: float, width: int, height: int) -> Camera:
        """Camera at ``frame``: eye and fov lerp, basis slerps between keyframes."""
        keys = self.camera_path
        if not keys:
            raise InvalidScene("scene has no camera keyframes")
        if frame <= keys[0].frame or len(keys) == 1:
            return keys[0].camera(width, height)
        if frame >= keys[-1].frame:
            return keys[-1].camera(width, height)
        k = max(n for n in range(len(keys)) if keys[n].frame <= frame)
        a, b = keys[k], keys[k + 1]
        ca, cb = a.camera(width, height), b.camera(width, height)
        s = (frame - a.frame) / (b.frame - a.frame)
        rots = Rotation.from_matrix(np.stack([
            np.column_stack([ca.right, ca.up, ca.forward]),
            np.column_stack([cb.right, cb.up, cb.forward]),
        ]))
        m = Slerp([0.0, 1.0], rots)([s]).as_matrix()[0]
        # re-orthonormalize
        fwd = normalize(m[:, 2])
        right = normalize(cross(m[:, 1], fwd))
        up = cross(fwd, right)
        eye = (1.0 - s) * ca.eye + s * cb.eye
        half_w = (1.0 - s) * ca.film_half_width + s * cb.film_half_width
        return Camera(eye, right, up, fwd, 1.0, half_w, half_w * height / width)


def trace(scene: Scene, origins, directions) -> FrameBuffer:
    """Nearest-hit G-buffer record for every ray.

    Hits are Lambert-shaded by one directional light plus ambient.  Misses
    return the environment color, infinite depth, normal = -direction and
    object id 0.
    """
    origins = np.asarray(origins, dtype=np.float64)
    directions = np.asarray(directions, dtype=np.float64)
    shape = directions.shape[:-1]
    best = np.full(shape, np.inf)
    obj = np.zeros(shape, dtype=np.int64)
    tri = np.full(shape, -1, dtype=np.int64)
    for oid, prim in enumerate(scene.primitives, start=1):
        if isinstance(prim, Sphere):
            t = prim.intersect(origins, directions)
            closer = t < best
        else:
            t, which = prim.intersect(origins, directions)
            closer = t < best
            tri = np.where(closer, which, tri)
        best = np.where(closer, t, best)
        obj = np.where(closer, oid, obj)

    miss = obj == 0
    env = equirect_lookup(directions, scene.environment)
    color = env
    normal = -directions
    position = np.full(shape + (3,), np.nan)
    if not np.all(miss):
        t_safe = np.where(miss, 0.0, best)
        points = origins + t_safe[..., None] * directions
        normal = np.array(normal)
        albedo = np.zeros(shape + (3,))
        for oid, prim in enumerate(scene.primitives, start=1):
            m = obj == oid
            if not np.any(m):
                continue
            if isinstance(prim, Sphere):
                n = prim.normal_at(points[m])
                albedo[m] = prim.material.shade_albedo(n)
            else:
                n = prim.face_normals()[tri[m]]
                # face toward the incoming ray
                n = np.where((dot(n, directions[m]) > 0.0)[..., None], -n, n)
                albedo[m] = prim.material.shade_albedo(n)
            normal[m] = n
        to_light = -np.asarray(scene.light.direction)
        lambert = np.maximum(0.0, dot(normal, to_light))
        shaded = albedo * (scene.ambient + scene.light.intensity * lambert)[..., None]
        color = np.where(miss[..., None], env, np.clip(shaded, 0.0, 1.0))
        position = np.where(miss[..., None], np.nan, points)
    return FrameBuffer(color, best, normal, obj, position)


def primary_rays(camera: Camera, u, v):
    """Ordinary pinhole rays through the film at (u, v)."""
    p = film_point(camera, u, v)
    origins = np.broadcast_to(camera.eye, p.shape)
    return origins, normalize(p - camera.eye)
