"""Per-sample render records, frame buffers and continuous (u, v) sampling.

A :class:`FrameBuffer` stores its channels as parallel numpy arrays (struct of
arrays).  The same class is used for whole frames and for batches of samples
taken from a frame, since both are just grids of G-buffer records.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Pixel offsets below this (in pixel units) snap to the pixel center, so that
# uv = (i + 0.5) / width reproduces pixel i bit-exactly despite rounding.
CENTER_SNAP = 1e-9


class InvalidDimensions(ValueError):
    pass


def clamp_color(c):
    return np.clip(np.asarray(c, dtype=np.float64), 0.0, 1.0)


@dataclass(frozen=True)
class GBufferSample:
    """One render record: what a single (u, v) saw."""

    color: tuple[float, float, float]
    depth: float
    normal: tuple[float, float, float]
    object_id: int
    position: tuple[float, float, float]

    def __post_init__(self):
        if not self.depth >= 0.0:
            raise ValueError(f"depth must be >= 0, got {self.depth}")
        if np.isfinite(self.depth) and abs(float(np.linalg.norm(self.normal)) - 1.0) > 1e-6:
            raise ValueError("normal must be unit length for finite depth")
        color = tuple(float(x) for x in clamp_color(self.color))
        object.__setattr__(self, "color", color)
        object.__setattr__(self, "normal", tuple(float(x) for x in self.normal))
        object.__setattr__(self, "position", tuple(float(x) for x in self.position))


class FrameBuffer:
    """A grid of G-buffer records.

    ``color`` is clamped to [0, 1] on construction.  ``depth`` is Euclidean
    distance along the ray (``inf`` for environment hits), ``object_id`` is 0
    for the environment and ``position`` is NaN where depth is infinite.
    """

    __slots__ = ("color", "depth", "normal", "object_id", "position")

    def __init__(self, color, depth, normal, object_id, position):
        color = np.asarray(color, dtype=np.float64)
        shape = color.shape[:-1]
        self.color = np.clip(color, 0.0, 1.0)
        self.depth = np.broadcast_to(np.asarray(depth, dtype=np.float64), shape).copy()
        self.normal = np.broadcast_to(np.asarray(normal, dtype=np.float64), shape + (3,)).copy()
        self.object_id = np.broadcast_to(np.asarray(object_id, dtype=np.int64), shape).copy()
        self.position = np.broadcast_to(np.asarray(position, dtype=np.float64), shape + (3,)).copy()
        if color.shape[-1] != 3:
            raise ValueError("color must have a trailing axis of length 3")

    @classmethod
    def filled(cls, width: int, height: int, sample: GBufferSample) -> "FrameBuffer":
        if width < 1 or height < 1:
            raise InvalidDimensions(f"frame size must be at least 1x1, got {width}x{height}")
        shape = (height, width)
        return cls(
            np.broadcast_to(np.asarray(sample.color), shape + (3,)),
            sample.depth,
            sample.normal,
            sample.object_id,
            sample.position,
        )

    @classmethod
    def from_rgb(cls, rgb) -> "FrameBuffer":
        """Wrap a color image; auxiliary channels get environment defaults."""
        rgb = np.asarray(rgb, dtype=np.float64)
        if rgb.ndim != 3 or rgb.shape[2] != 3 or rgb.shape[0] < 1 or rgb.shape[1] < 1:
            raise InvalidDimensions(f"expected an HxWx3 image, got shape {rgb.shape}")
        shape = rgb.shape[:2]
        return cls(rgb, np.inf, (0.0, 0.0, 1.0), 0, np.full(shape + (3,), np.nan))

    @property
    def shape(self) -> tuple[int, ...]:
        return self.depth.shape

    @property
    def width(self) -> int:
        return self.depth.shape[1]

    @property
    def height(self) -> int:
        return self.depth.shape[0]

    def __getitem__(self, index) -> "FrameBuffer":
        return FrameBuffer(
            self.color[index], self.depth[index], self.normal[index],
            self.object_id[index], self.position[index],
        )

    def sample(self, i: int, j: int) -> GBufferSample:
        """Record of pixel column ``i``, row ``j``."""
        return GBufferSample(
            tuple(self.color[j, i]), float(self.depth[j, i]), tuple(self.normal[j, i]),
            int(self.object_id[j, i]), tuple(self.position[j, i]),
        )

    def channels(self):
        return self.color, self.depth, self.normal, self.object_id, self.position

    def identical(self, other: "FrameBuffer") -> bool:
        """Bitwise equality of every channel (NaN positions compare equal)."""
        return all(
            a.shape == b.shape and a.tobytes() == b.tobytes()
            for a, b in zip(self.channels(), other.channels())
        )

    def copy(self) -> "FrameBuffer":
        return FrameBuffer(*(c.copy() for c in self.channels()))

    @staticmethod
    def stack_rows(parts: list["FrameBuffer"]) -> "FrameBuffer":
        return FrameBuffer(*(np.concatenate(cs, axis=0) for cs in zip(*(p.channels() for p in parts))))


def _axis_coords(t: np.ndarray, n: int):
    """Split continuous coordinates into (lower index, upper index, fraction)."""
    x = t * n - 0.5
    r = np.rint(x)
    x = np.where(np.abs(x - r) < CENTER_SNAP, r, x)
    x = np.clip(x, 0.0, n - 1.0)
    i0 = np.floor(x)
    f = x - i0
    i0 = i0.astype(np.int64)
    i1 = np.minimum(i0 + 1, n - 1)
    return i0, i1, f


def _lerp(a, b, f):
    # exact when a == b, and when f == 0
    return a + f * (b - a)


def bilinear_rgb(img: np.ndarray, x0, x1, fx, y0, y1, fy) -> np.ndarray:
    """Bilinear blend of four texels, bounded by their channel extrema."""
    c00 = img[y0, x0]
    c10 = img[y0, x1]
    c01 = img[y1, x0]
    c11 = img[y1, x1]
    fx = fx[..., None]
    fy = fy[..., None]
    top = _lerp(c00, c10, fx)
    bottom = _lerp(c01, c11, fx)
    out = _lerp(top, bottom, fy)
    lo = np.minimum(np.minimum(c00, c10), np.minimum(c01, c11))
    hi = np.maximum(np.maximum(c00, c10), np.maximum(c01, c11))
    return np.clip(out, lo, hi)


def check_uv(u, v) -> None:
    u = np.asarray(u)
    v = np.asarray(v)
    if not (np.all(u >= 0.0) and np.all(u <= 1.0) and np.all(v >= 0.0) and np.all(v <= 1.0)):
        raise ValueError("texture coordinates must lie in [0, 1]; resolve boundaries first")


def sample_bilinear(fb: FrameBuffer, u, v) -> FrameBuffer:
    """Sample ``fb`` at continuous coordinates ``(u, v)`` (arrays of one shape).

    Color is bilinear between the four nearest pixel centers (pixel ``i`` is
    centered at ``u = (i + 0.5) / width``).  Depth, normal, id and position
    come from the nearest center, ties going to the lower index.
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    check_uv(u, v)
    x0, x1, fx = _axis_coords(u, fb.width)
    y0, y1, fy = _axis_coords(v, fb.height)
    color = bilinear_rgb(fb.color, x0, x1, fx, y0, y1, fy)
    xn = np.where(fx > 0.5, x1, x0)
    yn = np.where(fy > 0.5, y1, y0)
    return FrameBuffer(
        color, fb.depth[yn, xn], fb.normal[yn, xn], fb.object_id[yn, xn], fb.position[yn, xn]
    )


def sample_at(fb: FrameBuffer, u: float, v: float) -> GBufferSample:
    """Scalar convenience wrapper around :func:`sample_bilinear`."""
    s = sample_bilinear(fb, np.array([u]), np.array([v]))
    return GBufferSample(
        tuple(s.color[0]), float(s.depth[0]), tuple(s.normal[0]),
        int(s.object_id[0]), tuple(s.position[0]),
    )


def pixel_centers(width: int, height: int, rows: slice = slice(None)):
    """(u, v) grids of pixel centers, shape (rows, width)."""
    j = np.arange(height, dtype=np.float64)[rows]
    i = np.arange(width, dtype=np.float64)
    u = (i + 0.5) / width
    v = (j + 0.5) / height
    return np.broadcast_to(u, (len(j), width)), np.broadcast_to(v[:, None], (len(j), width))
