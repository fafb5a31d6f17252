"""Recursive camera painting in ray-traced mode.

Each pass reassigns a camera (a ray) to every (u, v) from the previous pass's
G-buffer and traces the scene again.  Pass 1 starts from a mid-gray seed, so
it reproduces a conventional render.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from . import rng
from .displacement import DepthFocus, DisplacementMapping, NormalTangent, Null, evaluate
from .imaging import FrameBuffer, GBufferSample, InvalidDimensions, pixel_centers, sample_bilinear
from .scene import Camera, InvalidScene, Scene, film_point, norm, primary_rays, trace

DEGENERATE_RAY = 1e-9
THREADS_ENV = "RCP_THREADS"


@dataclass(frozen=True)
class RecursionConfig:
    iterations: int = 6
    samples_per_pixel: int = 1
    rng_seed: int = 0
    pixel_mapping: DisplacementMapping = field(default_factory=Null)
    eye_mapping: DisplacementMapping = field(default_factory=Null)
    temporal_mode: Literal["restart", "carry"] = "restart"

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if self.samples_per_pixel < 1:
            raise ValueError(f"samples_per_pixel must be >= 1, got {self.samples_per_pixel}")
        if self.temporal_mode not in ("restart", "carry"):
            raise ValueError(f"unknown temporal mode {self.temporal_mode!r}")


def worker_count(threads: int | None = None) -> int:
    """Explicit ``threads``, else ``$RCP_THREADS``, else the CPU count."""
    if threads is None:
        env = os.environ.get(THREADS_ENV)
        if env is None:
            return os.cpu_count() or 1
        try:
            threads = int(env)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be a positive integer, got {env!r}") from None
    if threads < 1:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {threads}")
    return threads


def seed_buffer(width: int, height: int, mapping: DisplacementMapping, camera: Camera) -> FrameBuffer:
    """The starting image: mid-gray, with aux channels chosen so every mapping yields zero."""
    depth = mapping.z0 if isinstance(mapping, DepthFocus) else 0.0
    s = GBufferSample((0.5, 0.5, 0.5), depth, tuple(camera.forward), 0, (np.nan,) * 3)
    return FrameBuffer.filled(width, height, s)


def reassign_ray(camera: Camera, u, v, prev: FrameBuffer,
                 pixel_mapping: DisplacementMapping, eye_mapping: DisplacementMapping):
    """Per-(u, v) rays from displaced eye and film points.

    Falls back to the undisplaced pinhole ray where the displaced points
    coincide.
    """
    film = film_point(camera, u, v)
    eye = camera.eye + evaluate(eye_mapping, prev, camera, u, v)
    target = film + evaluate(pixel_mapping, prev, camera, u, v)
    d = target - eye
    length = norm(d)
    bad = length < DEGENERATE_RAY
    if np.any(bad):
        eye = np.where(bad[..., None], camera.eye, eye)
        d = np.where(bad[..., None], film - camera.eye, d)
        length = norm(d)
    return eye, d / length[..., None]


def _jitter_uv(width, height, rows, pass_index, sample_index, seed):
    j = np.arange(height)[rows][:, None]
    i = np.arange(width)[None, :]
    if sample_index == 0:
        xu = xv = 0.5
    else:
        xu = rng.uniform(seed, pass_index, i, j, sample_index, 0)
        xv = rng.uniform(seed, pass_index, i, j, sample_index, 1)
    u = (i + xu) / width
    v = (j + xv) / height
    shape = (len(range(height)[rows]), width)
    return np.broadcast_to(u, shape), np.broadcast_to(v, shape)


def _render_rows(scene, camera, prev, cfg, pass_index, rows) -> FrameBuffer:
    width, height = prev.width, prev.height
    loops = cfg.pixel_mapping.loops if isinstance(cfg.pixel_mapping, NormalTangent) else 1
    color_sum = None
    first = None
    for k in range(cfg.samples_per_pixel):
        u, v = _jitter_uv(width, height, rows, pass_index, k, cfg.rng_seed)
        data = sample_bilinear(prev, u, v)
        for _ in range(loops):
            origins, dirs = reassign_ray(camera, u, v, data, cfg.pixel_mapping, cfg.eye_mapping)
            data = trace(scene, origins, dirs)
        if first is None:
            first = data
            color_sum = data.color.copy()
        else:
            color_sum = color_sum + data.color
    color = color_sum / cfg.samples_per_pixel
    return FrameBuffer(color, first.depth, first.normal, first.object_id, first.position)


def _bands(height: int, workers: int) -> list[slice]:
    n = max(1, min(workers, height))
    edges = np.linspace(0, height, n + 1).round().astype(int)
    return [slice(a, b) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def render_pass(scene: Scene, camera: Camera, prev: FrameBuffer, cfg: RecursionConfig,
                pass_index: int, threads: int | None = None) -> FrameBuffer:
    """One application of the painting process: I_n from I_{n-1}.

    Rows are split into bands across worker threads; all randomness is keyed
    by (seed, pass, pixel, sample) so the bands never affect the result.
    """
    if prev.depth.ndim != 2:
        raise InvalidDimensions("previous buffer must be a 2-D frame")
    workers = worker_count(threads)
    bands = _bands(prev.height, workers)
    if len(bands) == 1:
        return _render_rows(scene, camera, prev, cfg, pass_index, bands[0])
    with ThreadPoolExecutor(max_workers=len(bands)) as pool:
        parts = list(pool.map(lambda rows: _render_rows(scene, camera, prev, cfg, pass_index, rows), bands))
    return FrameBuffer.stack_rows(parts)


def _check_camera(camera: Camera, width: int, height: int) -> None:
    if width < 1 or height < 1:
        raise InvalidDimensions(f"frame size must be at least 1x1, got {width}x{height}")
    if abs(camera.film_half_width / camera.film_half_height - width / height) > 1e-6:
        raise InvalidDimensions("camera film aspect does not match the frame size")


def render_recursive(scene: Scene, camera: Camera, cfg: RecursionConfig, width: int, height: int,
                     start: FrameBuffer | None = None, threads: int | None = None) -> list[FrameBuffer]:
    """[I_0, I_1, ..., I_k] with k = cfg.iterations.

    ``start`` replaces the gray seed as I_0 (used by carry-mode walk-throughs).
    """
    _check_camera(camera, width, height)
    if start is None:
        start = seed_buffer(width, height, cfg.pixel_mapping, camera)
    elif start.shape != (height, width):
        raise InvalidDimensions(f"start buffer is {start.width}x{start.height}, expected {width}x{height}")
    frames = [start]
    for n in range(1, cfg.iterations + 1):
        frames.append(render_pass(scene, camera, frames[-1], cfg, n, threads))
    return frames


def render_walkthrough(scene: Scene, cfg: RecursionConfig, frames, width: int, height: int,
                       threads: int | None = None, on_frame=None) -> list[FrameBuffer]:
    """Final-iteration buffer for each frame index in ``frames``.

    ``on_frame(f, stack)`` is called with every frame's full iteration stack.
    """
    if not scene.camera_path:
        raise InvalidScene("scene has no camera keyframes")
    out = []
    carried = None
    for f in frames:
        camera = scene.camera_at(f, width, height)
        start = carried if cfg.temporal_mode == "carry" else None
        stack = render_recursive(scene, camera, cfg, width, height, start=start, threads=threads)
        if on_frame is not None:
            on_frame(f, stack)
        carried = stack[-1]
        out.append(stack[-1])
    return out


def plain_render(scene: Scene, camera: Camera, width: int, height: int) -> FrameBuffer:
    """Conventional one-ray-per-pixel-center render, for comparison."""
    u, v = pixel_centers(width, height)
    return trace(scene, *primary_rays(camera, u, v))
