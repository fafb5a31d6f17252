"""Line-oriented scene files.

Grammar, one statement per line, ``#`` starts a comment::

    env <image-path>
    sphere cx cy cz r [albedo r g b | tex <path>]
    mesh <obj-path> [albedo r g b]
    light dx dy dz intensity
    ambient a
    camera frame=<n> eye=<x,y,z> look=<x,y,z> up=<x,y,z> fov=<deg>

Paths are relative to the scene file.  Parsing produces a :class:`SceneSpec`
(plain values, comparable and re-serializable); :func:`build_scene` loads the
referenced files into a renderable :class:`~rcpaint.scene.Scene`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import fileio
from .scene import CameraKey, DirectionalLight, Material, Scene, Sphere, TriangleMesh

Vec3 = tuple[float, float, float]


class SceneParseError(ValueError):
    def __init__(self, lineno: int, line: str, message: str):
        super().__init__(f"line {lineno}: {message}: {line.strip()!r}")
        self.lineno = lineno
        self.line = line


@dataclass(frozen=True)
class SphereSpec:
    center: Vec3
    radius: float
    albedo: Vec3 | None = None
    texture: str | None = None


@dataclass(frozen=True)
class MeshSpec:
    path: str
    albedo: Vec3 | None = None


@dataclass(frozen=True)
class SceneSpec:
    env: str | None = None
    primitives: tuple = ()
    light: tuple[Vec3, float] = ((0.0, -1.0, 0.0), 1.0)
    ambient: float = 0.2
    cameras: tuple[CameraKey, ...] = field(default_factory=tuple)


def _floats(tokens, n, lineno, line):
    if len(tokens) < n:
        raise SceneParseError(lineno, line, f"expected {n} numbers")
    try:
        return tuple(float(t) for t in tokens[:n])
    except ValueError:
        raise SceneParseError(lineno, line, "malformed number") from None


def _material_tail(tokens, lineno, line, allow_tex=True):
    if not tokens:
        return None, None
    if tokens[0] == "albedo" and len(tokens) == 4:
        return _floats(tokens[1:], 3, lineno, line), None
    if allow_tex and tokens[0] == "tex" and len(tokens) == 2:
        return None, tokens[1]
    raise SceneParseError(lineno, line, "unexpected trailing tokens")


def _vec(text, lineno, line):
    parts = text.split(",")
    if len(parts) != 3:
        raise SceneParseError(lineno, line, "expected x,y,z")
    return _floats(parts, 3, lineno, line)


def _camera(tokens, lineno, line) -> CameraKey:
    fields = {}
    for tok in tokens:
        key, sep, value = tok.partition("=")
        if not sep or key not in ("frame", "eye", "look", "up", "fov"):
            raise SceneParseError(lineno, line, f"bad camera field {tok!r}")
        fields[key] = value
    if "eye" not in fields or "look" not in fields:
        raise SceneParseError(lineno, line, "camera needs eye= and look=")
    try:
        frame = int(fields.get("frame", "0"))
    except ValueError:
        raise SceneParseError(lineno, line, "frame must be an integer") from None
    up = _vec(fields["up"], lineno, line) if "up" in fields else (0.0, 1.0, 0.0)
    fov = _floats([fields.get("fov", "60")], 1, lineno, line)[0]
    return CameraKey(frame, _vec(fields["eye"], lineno, line), _vec(fields["look"], lineno, line), up, fov)


def parse_scene(text: str) -> SceneSpec:
    env = None
    prims = []
    light = ((0.0, -1.0, 0.0), 1.0)
    ambient = 0.2
    cameras = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = line.split("#", 1)[0].split()
        if not tokens:
            continue
        kw, args = tokens[0], tokens[1:]
        if kw == "env":
            if len(args) != 1:
                raise SceneParseError(lineno, line, "env takes one path")
            env = args[0]
        elif kw == "sphere":
            nums = _floats(args, 4, lineno, line)
            if nums[3] <= 0:
                raise SceneParseError(lineno, line, "sphere radius must be positive")
            albedo, tex = _material_tail(args[4:], lineno, line)
            prims.append(SphereSpec(nums[:3], nums[3], albedo, tex))
        elif kw == "mesh":
            if not args:
                raise SceneParseError(lineno, line, "mesh needs a path")
            albedo, _ = _material_tail(args[1:], lineno, line, allow_tex=False)
            prims.append(MeshSpec(args[0], albedo))
        elif kw == "light":
            if len(args) != 4:
                raise SceneParseError(lineno, line, "light takes dx dy dz intensity")
            nums = _floats(args, 4, lineno, line)
            if nums[3] < 0 or nums[:3] == (0.0, 0.0, 0.0):
                raise SceneParseError(lineno, line, "light needs a nonzero direction and intensity >= 0")
            light = (nums[:3], nums[3])
        elif kw == "ambient":
            if len(args) != 1:
                raise SceneParseError(lineno, line, "ambient takes one number")
            ambient = _floats(args, 1, lineno, line)[0]
            if not 0.0 <= ambient <= 1.0:
                raise SceneParseError(lineno, line, "ambient must be in [0, 1]")
        elif kw == "camera":
            cameras.append(_camera(args, lineno, line))
        else:
            raise SceneParseError(lineno, line, f"unknown keyword {kw!r}")
    return SceneSpec(env, tuple(prims), light, ambient, tuple(cameras))


def _fmt(xs) -> str:
    return " ".join(repr(float(x)) for x in xs)


def format_scene(spec: SceneSpec) -> str:
    lines = []
    if spec.env is not None:
        lines.append(f"env {spec.env}")
    for p in spec.primitives:
        if isinstance(p, SphereSpec):
            tail = ""
            if p.albedo is not None:
                tail = " albedo " + _fmt(p.albedo)
            elif p.texture is not None:
                tail = f" tex {p.texture}"
            lines.append(f"sphere {_fmt(p.center)} {p.radius!r}{tail}")
        else:
            tail = " albedo " + _fmt(p.albedo) if p.albedo is not None else ""
            lines.append(f"mesh {p.path}{tail}")
    lines.append(f"light {_fmt(spec.light[0])} {float(spec.light[1])!r}")
    lines.append(f"ambient {float(spec.ambient)!r}")
    for c in spec.cameras:
        vec = lambda v: ",".join(repr(float(x)) for x in v)  # noqa: E731
        lines.append(f"camera frame={c.frame} eye={vec(c.eye)} look={vec(c.look)} up={vec(c.up)} fov={float(c.fov)!r}")
    return "\n".join(lines) + "\n"


def read_scene_spec(path) -> SceneSpec:
    return parse_scene(Path(path).read_text())


def build_scene(spec: SceneSpec, base_dir=".") -> Scene:
    """Load referenced images and meshes.  Raises OSError for missing files."""
    base = Path(base_dir)
    env = fileio.read_png(base / spec.env) if spec.env else np.zeros((1, 1, 3))
    prims = []
    for p in spec.primitives:
        if isinstance(p, SphereSpec):
            if p.texture is not None:
                mat = Material(texture=fileio.read_png(base / p.texture), texture_path=p.texture)
            else:
                mat = Material(albedo=p.albedo) if p.albedo is not None else Material()
            prims.append(Sphere(p.center, p.radius, mat))
        else:
            vs, tris = fileio.read_obj(base / p.path)
            mat = Material(albedo=p.albedo) if p.albedo is not None else Material()
            prims.append(TriangleMesh(vs, tris, mat, source=p.path))
    return Scene(
        environment=env,
        primitives=prims,
        light=DirectionalLight(*spec.light),
        ambient=spec.ambient,
        camera_path=spec.cameras,
        environment_path=spec.env,
    )


def load_scene(path) -> Scene:
    path = Path(path)
    return build_scene(read_scene_spec(path), path.parent)


def make_environment(width: int = 512, height: int = 256) -> np.ndarray:
    """A colorful lat-long test texture: smooth hue bands, a checker and a horizon."""
    lon = (np.arange(width) + 0.5) / width * 2.0 * np.pi
    lat = (0.5 - (np.arange(height) + 0.5) / height) * np.pi
    lon, lat = np.meshgrid(lon, lat)
    r = 0.5 + 0.5 * np.sin(3.0 * lon + 1.3 * np.cos(2.0 * lat))
    g = 0.5 + 0.5 * np.sin(5.0 * lat + 0.7 * np.sin(4.0 * lon))
    b = 0.5 + 0.5 * np.cos(2.0 * lon - 3.0 * lat)
    img = np.stack([r, g, b], axis=-1)
    checker = ((np.floor(lon / (np.pi / 8)) + np.floor(lat / (np.pi / 8))) % 2)[..., None]
    img = 0.75 * img + 0.25 * checker
    img[lat < -0.05] *= 0.6
    return np.clip(img, 0.0, 1.0)


def example_spec(env: str = "env.png", spheres: bool = True) -> SceneSpec:
    prims = ()
    if spheres:
        prims = (
            SphereSpec((0.0, 0.0, 5.0), 1.0, albedo=(0.9, 0.2, 0.2)),
            SphereSpec((-2.2, -0.4, 6.5), 0.8, albedo=(0.2, 0.8, 0.3)),
            SphereSpec((2.0, 0.6, 7.0), 1.2, albedo=(0.25, 0.35, 0.95)),
        )
    cams = (
        CameraKey(0, (0.0, 0.0, 0.0), (0.0, 0.0, 1.0), (0.0, 1.0, 0.0), 60.0),
    )
    return SceneSpec(env, prims, ((-0.4, -1.0, 0.6), 1.0), 0.2, cams)


def write_example(directory, spheres: bool = True, env_size=(512, 256)) -> Path:
    """Write ``env.png`` and ``scene.scn`` into ``directory``; return the scene path."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    fileio.write_png(d / "env.png", make_environment(*env_size))
    path = d / "scene.scn"
    path.write_text(format_scene(example_spec("env.png", spheres)))
    return path
