"""Image and mesh files: 8-bit PNG, portable float maps, Wavefront OBJ."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image


def to_8bit(rgb) -> np.ndarray:
    """Quantize [0, 1] colors.  Stored colors are already display-encoded."""
    return np.round(np.clip(np.asarray(rgb, dtype=np.float64), 0.0, 1.0) * 255.0).astype(np.uint8)


def write_png(path, rgb) -> None:
    Image.fromarray(to_8bit(rgb), mode="RGB").save(path, format="PNG")


def read_png(path) -> np.ndarray:
    with Image.open(path) as im:
        arr = np.asarray(im.convert("RGB"), dtype=np.float64)
    return arr / 255.0


def write_pfm(path, data) -> None:
    """Little-endian PFM (scale -1.0), rows stored bottom to top."""
    data = np.asarray(data, dtype="<f4")
    if data.ndim == 2:
        tag = b"Pf"
    elif data.ndim == 3 and data.shape[2] == 3:
        tag = b"PF"
    else:
        raise ValueError(f"PFM needs HxW or HxWx3 data, got {data.shape}")
    h, w = data.shape[:2]
    with open(path, "wb") as f:
        f.write(tag + b"\n%d %d\n-1.0\n" % (w, h))
        f.write(np.ascontiguousarray(data[::-1]).tobytes())


def read_pfm(path) -> np.ndarray:
    with open(path, "rb") as f:
        tag = f.readline().strip()
        w, h = (int(x) for x in f.readline().split())
        scale = float(f.readline())
        channels = {b"PF": 3, b"Pf": 1}[tag]
        dtype = "<f4" if scale < 0 else ">f4"
        arr = np.frombuffer(f.read(), dtype=dtype, count=w * h * channels)
    arr = arr.reshape((h, w, channels) if channels == 3 else (h, w))
    return arr[::-1].astype(np.float32)


def read_obj(path):
    """Vertices and triangles of an OBJ file; polygons are fan-triangulated."""
    vertices = []
    faces = []
    for raw in Path(path).read_text().splitlines():
        parts = raw.split("#", 1)[0].split()
        if not parts:
            continue
        if parts[0] == "v":
            vertices.append([float(x) for x in parts[1:4]])
        elif parts[0] == "f":
            idx = []
            for tok in parts[1:]:
                k = int(tok.split("/")[0])
                idx.append(k - 1 if k > 0 else len(vertices) + k)
            for n in range(1, len(idx) - 1):
                faces.append([idx[0], idx[n], idx[n + 1]])
    return np.array(vertices, dtype=np.float64).reshape(-1, 3), np.array(faces, dtype=np.int64).reshape(-1, 3)
