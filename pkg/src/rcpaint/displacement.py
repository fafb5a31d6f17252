"""Displacement mappings: previous render data -> offset of a ray's film point.

All evaluators take struct-of-arrays inputs (colors ``(..., 3)``, depths
``(...)``) and return ``(..., 3)`` vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import rng
from .imaging import FrameBuffer
from .scene import Camera, cross, local_to_world


@dataclass(frozen=True)
class Null:
    """No displacement."""


@dataclass(frozen=True)
class AffineColor:
    """``matrix @ rgb + bias`` in the camera's local (right, up, forward) frame."""

    matrix: np.ndarray = field(default_factory=lambda: np.zeros((3, 3)))
    bias: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.float64)
        b = np.asarray(self.bias, dtype=np.float64)
        if m.shape != (3, 3) or b.shape != (3,):
            raise ValueError("affine color map needs a 3x3 matrix and a 3-vector bias")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "bias", b)

    @classmethod
    def canonical(cls, lam: float) -> "AffineColor":
        """lam * (2 * rgb - 1): mid-gray stays put, R pushes right, G pushes up."""
        if not lam > 0:
            raise ValueError(f"lambda must be positive, got {lam}")
        return cls(2.0 * lam * np.eye(3), np.full(3, -lam))

    def __eq__(self, other):
        return (isinstance(other, AffineColor)
                and np.array_equal(self.matrix, other.matrix)
                and np.array_equal(self.bias, other.bias))

    __hash__ = None


@dataclass(frozen=True)
class DepthFocus:
    lam: float
    z0: float = 5.0
    depth_clamp: float = 100.0

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        if not self.z0 >= 0:
            raise ValueError(f"z0 must be >= 0, got {self.z0}")
        if not self.depth_clamp > self.z0:
            raise ValueError("depth_clamp must exceed z0")


@dataclass(frozen=True)
class NormalTangent:
    lam: float
    loops: int = 1
    noise_amplitude: float = 0.0
    noise_seed: int = 0

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        if self.loops < 1:
            raise ValueError(f"loops must be >= 1, got {self.loops}")
        if self.noise_amplitude < 0:
            raise ValueError("noise amplitude must be >= 0")


DisplacementMapping = Null | AffineColor | DepthFocus | NormalTangent


def eval_color_affine(matrix, bias, color) -> np.ndarray:
    m = np.asarray(matrix, dtype=np.float64)
    b = np.asarray(bias, dtype=np.float64)
    c = np.asarray(color, dtype=np.float64)
    r, g, bl = c[..., 0], c[..., 1], c[..., 2]
    return np.stack(
        [m[k, 0] * r + m[k, 1] * g + m[k, 2] * bl + b[k] for k in range(3)], axis=-1
    )


def centered(color) -> np.ndarray:
    return 2.0 * np.asarray(color, dtype=np.float64) - 1.0


def eval_depth_focus(lam: float, z0: float, depth_clamp: float, color, depth) -> np.ndarray:
    """lam * |min(depth, clamp) - z0| * (2 rgb - 1); infinite depth is clamped first."""
    z = np.minimum(np.asarray(depth, dtype=np.float64), depth_clamp)
    scale = lam * np.abs(z - z0)
    return scale[..., None] * centered(color)


def eval_normal_tangent(lam: float, noise_amplitude: float, noise_seed: int,
                        camera_forward, normal, u=None, v=None) -> np.ndarray:
    """lam * (forward x normal), plus optional hash noise keyed on (u, v).

    Both operands are world vectors, so the result is world-space.
    """
    normal = np.asarray(normal, dtype=np.float64)
    fwd = np.broadcast_to(np.asarray(camera_forward, dtype=np.float64), normal.shape)
    out = lam * cross(fwd, normal)
    if noise_amplitude > 0:
        if u is None or v is None:
            raise ValueError("noise needs texture coordinates")
        out = out + noise_amplitude * rng.hash3(u, v, noise_seed)
    return out


def evaluate(mapping: DisplacementMapping, prev: FrameBuffer, camera: Camera, u, v) -> np.ndarray:
    """World-space displacement for samples ``prev`` taken at (u, v)."""
    shape = prev.shape + (3,)
    match mapping:
        case Null():
            return np.zeros(shape)
        case AffineColor(matrix=m, bias=b):
            return local_to_world(camera, eval_color_affine(m, b, prev.color))
        case DepthFocus(lam=lam, z0=z0, depth_clamp=dc):
            return local_to_world(camera, eval_depth_focus(lam, z0, dc, prev.color, prev.depth))
        case NormalTangent(lam=lam, noise_amplitude=amp, noise_seed=seed):
            return eval_normal_tangent(lam, amp, seed, camera.forward, prev.normal, u, v)
    raise TypeError(f"unknown displacement mapping {mapping!r}")
