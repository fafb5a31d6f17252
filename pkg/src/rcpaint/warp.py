"""Screen-space painting: with a fixed eye the recursion becomes image resampling.

Each pass fetches every pixel's color from a position offset by its own
red/green channels, with off-screen fetches folded back by an edge mode.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import imaging
from .imaging import FrameBuffer, pixel_centers

EdgeMode = Literal["clamp", "wrap", "mirror"]
EDGE_MODES = ("clamp", "wrap", "mirror")


@dataclass(frozen=True)
class WarpParams:
    max_smudge_px: float = 4.0
    edge_mode: EdgeMode = "mirror"
    use_depth: bool = False
    z0: float = 5.0
    depth_clamp: float = 100.0
    iterations: int = 6

    def __post_init__(self):
        if not self.max_smudge_px >= 0:
            raise ValueError(f"max_smudge_px must be >= 0, got {self.max_smudge_px}")
        if self.edge_mode not in EDGE_MODES:
            raise ValueError(f"unknown edge mode {self.edge_mode!r}")
        if self.use_depth and not self.depth_clamp > self.z0:
            raise ValueError("depth_clamp must exceed z0")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")


def boundary_resolve(x, mode: EdgeMode):
    """Fold coordinates into [0, 1]."""
    x = np.asarray(x, dtype=np.float64)
    if mode == "clamp":
        return np.clip(x, 0.0, 1.0)
    if mode == "wrap":
        w = x - np.floor(x)
        return np.where(w >= 1.0, 0.0, w)
    if mode == "mirror":
        p = x - 2.0 * np.floor(x / 2.0)
        # p can round up to 2.0 for tiny negative x
        p = np.where(p >= 2.0, 0.0, p)
        return np.where(p <= 1.0, p, 2.0 - p)
    raise ValueError(f"unknown edge mode {mode!r}")


def warp_delta(data: FrameBuffer, params: WarpParams, width: int, height: int):
    """(du, dv) per sample.  Channels are centered so mid-gray stays put;
    green is negated so G = 1 moves content up the screen."""
    bx = 2.0 * data.color[..., 0] - 1.0
    by = -(2.0 * data.color[..., 1] - 1.0)
    scale = params.max_smudge_px
    if params.use_depth:
        z = np.minimum(data.depth, params.depth_clamp)
        scale = scale * np.abs(z - params.z0)
    return bx * scale / width, by * scale / height


def warp_pass(image: FrameBuffer, params: WarpParams) -> FrameBuffer:
    u, v = pixel_centers(image.width, image.height)
    here = image
    du, dv = warp_delta(here, params, image.width, image.height)
    u2 = boundary_resolve(u + du, params.edge_mode)
    v2 = boundary_resolve(v + dv, params.edge_mode)
    # looked up through the module so tests can instrument fetches
    return imaging.sample_bilinear(image, u2, v2)


def warp_recursive(image: FrameBuffer, params: WarpParams) -> list[FrameBuffer]:
    out = [image]
    for _ in range(params.iterations):
        out.append(warp_pass(out[-1], params))
    return out
