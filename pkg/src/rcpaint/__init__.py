"""Recursive camera painting.

Every pixel gets its own camera, derived from what the previous render saw
at that pixel; repeating the render smudges the image like paint.
"""

from .displacement import AffineColor, DepthFocus, NormalTangent, Null
from .imaging import FrameBuffer, GBufferSample, sample_bilinear
from .recursion import RecursionConfig, render_pass, render_recursive, render_walkthrough, seed_buffer
from .scene import Camera, Scene, Sphere, TriangleMesh, trace
from .warp import WarpParams, boundary_resolve, warp_pass, warp_recursive

__all__ = [
    "AffineColor", "DepthFocus", "NormalTangent", "Null",
    "FrameBuffer", "GBufferSample", "sample_bilinear",
    "RecursionConfig", "render_pass", "render_recursive", "render_walkthrough", "seed_buffer",
    "Camera", "Scene", "Sphere", "TriangleMesh", "trace",
    "WarpParams", "boundary_resolve", "warp_pass", "warp_recursive",
]
