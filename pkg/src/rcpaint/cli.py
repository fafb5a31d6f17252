"""Command line front end.

``rcpaint render`` runs ray or warp mode and writes
``frame_%04d_iter_%02d.png`` per iteration (plus depth/normal PFMs with
``--dump-aux``).  ``rcpaint example`` writes a ready-to-render scene.

Exit codes: 0 ok, 2 flag or scene errors, 3 I/O errors, 4 invalid
dimensions or configuration.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import fileio, report
from .displacement import AffineColor, DepthFocus, NormalTangent, Null
from .imaging import FrameBuffer, InvalidDimensions
from .recursion import RecursionConfig, plain_render, render_walkthrough, worker_count
from .scene import InvalidScene
from .scenefile import SceneParseError, load_scene, write_example
from .warp import EDGE_MODES, WarpParams, warp_recursive

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_CONFIG = 4


class UsageError(Exception):
    pass


def _size(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise argparse.ArgumentTypeError(f"size must look like 256x256, got {text!r}") from None


def _frames(text: str) -> range:
    try:
        if ":" in text:
            a, b = text.split(":")
            return range(int(a), int(b) + 1)
        return range(int(text), int(text) + 1)
    except ValueError:
        raise argparse.ArgumentTypeError(f"frames must be N or A:B, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rcpaint", description="Recursive camera painting renderer.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("render", help="render a scene or warp an image")
    src = r.add_argument_group("input")
    src.add_argument("--scene", type=Path, help="scene file")
    src.add_argument("--input", type=Path, help="input PNG (warp mode)")
    src.add_argument("--mode", choices=("ray", "warp"), default="ray")
    r.add_argument("-o", "--output", type=Path, default=Path("out"))
    r.add_argument("--size", type=_size, default=(256, 256), help="WxH (default 256x256)")
    r.add_argument("--iterations", type=int, default=6)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--spp", type=int, default=1, help="samples per pixel")
    r.add_argument("--frames", type=_frames, default=None, help="N or A:B (default: camera keyframe span)")
    r.add_argument("--temporal", choices=("restart", "carry"), default="restart")

    m = r.add_argument_group("displacement")
    m.add_argument("--mapping", choices=("color", "depth", "normal", "affine", "null"), default="color")
    m.add_argument("--lambda", dest="lam", type=float, default=0.3)
    m.add_argument("--affine", type=str, default=None,
                   help="12 comma-separated numbers: row-major 3x3 matrix then bias")
    m.add_argument("--z0", type=float, default=5.0)
    m.add_argument("--depth-clamp", type=float, default=100.0)
    m.add_argument("--loops", type=int, default=1)
    m.add_argument("--noise", type=float, default=0.0, help="hash noise amplitude (normal mapping)")
    m.add_argument("--noise-seed", type=int, default=0)
    m.add_argument("--eye-lambda", type=float, default=None,
                   help="also displace the eye with the color map of this strength")

    w = r.add_argument_group("warp")
    w.add_argument("--edge-mode", choices=EDGE_MODES, default="mirror")
    w.add_argument("--max-smudge", type=float, default=None,
                   help="pixels (default lambda * min(W, H) / 10)")
    w.add_argument("--use-depth", action="store_true")

    o = r.add_argument_group("output")
    o.add_argument("--dump-aux", action="store_true", help="write depth and normal PFMs")
    o.add_argument("--dump-iterations", action=argparse.BooleanOptionalAction, default=True,
                   help="write every iteration, not only the last")
    o.add_argument("--report", action="store_true", help="write report.csv and report.png")

    e = sub.add_parser("example", help="write an example scene and environment map")
    e.add_argument("-o", "--output", type=Path, default=Path("example"))
    e.add_argument("--no-spheres", action="store_true", help="environment only")
    return p


def _pixel_mapping(args):
    if args.mapping == "null":
        return Null()
    if args.mapping == "color":
        return AffineColor.canonical(args.lam)
    if args.mapping == "affine":
        if args.affine is None:
            raise UsageError("--mapping affine needs --affine")
        try:
            vals = [float(x) for x in args.affine.split(",")]
        except ValueError:
            raise UsageError(f"--affine: malformed number in {args.affine!r}") from None
        if len(vals) != 12:
            raise UsageError(f"--affine needs 12 numbers, got {len(vals)}")
        return AffineColor(np.array(vals[:9]).reshape(3, 3), np.array(vals[9:]))
    if args.mapping == "depth":
        return DepthFocus(args.lam, args.z0, args.depth_clamp)
    return NormalTangent(args.lam, args.loops, args.noise, args.noise_seed)


def _write_frame(out: Path, frame: int, stack: list[FrameBuffer], args) -> None:
    last = len(stack) - 1
    for n, fb in enumerate(stack):
        if not args.dump_iterations and n != last:
            continue
        stem = out / f"frame_{frame:04d}_iter_{n:02d}"
        fileio.write_png(stem.with_suffix(".png"), fb.color)
        if args.dump_aux:
            fileio.write_pfm(f"{stem}_depth.pfm", fb.depth)
            fileio.write_pfm(f"{stem}_normal.pfm", fb.normal)


def _run_render(args) -> int:
    if args.iterations < 1 or args.spp < 1:
        raise ValueError("--iterations and --spp must be >= 1")
    width, height = args.size
    if width < 1 or height < 1:
        raise InvalidDimensions(f"--size must be at least 1x1, got {width}x{height}")
    worker_count()  # validates RCP_THREADS early

    scene = None
    if args.mode == "ray" and args.scene is None:
        raise UsageError("ray mode needs --scene")
    if args.mode == "warp" and args.scene is None and args.input is None:
        raise UsageError("warp mode needs --input or --scene")
    if args.scene is not None and (args.mode == "ray" or args.input is None):
        if not args.scene.is_file():
            raise FileNotFoundError(f"scene file not found: {args.scene}")
        scene = load_scene(args.scene)
        if not scene.camera_path:
            raise InvalidScene(f"{args.scene}: no camera line")

    if args.frames is not None:
        frames = args.frames
    elif scene is not None:
        frames = range(scene.camera_path[0].frame, scene.camera_path[-1].frame + 1)
    else:
        frames = range(0, 1)

    args.output.mkdir(parents=True, exist_ok=True)
    rows = []
    first_stack = None

    def finish(f, stack, t0):
        nonlocal first_stack
        _write_frame(args.output, f, stack, args)
        rows.extend((f, n, v) for n, v in enumerate(report.iteration_changes(stack), start=1))
        if first_stack is None:
            first_stack = stack
        print(f"frame {f:04d}\titerations {len(stack) - 1}\t{time.perf_counter() - t0:.3f}s", flush=True)

    if args.mode == "ray":
        eye = AffineColor.canonical(args.eye_lambda) if args.eye_lambda is not None else Null()
        cfg = RecursionConfig(args.iterations, args.spp, args.seed, _pixel_mapping(args), eye, args.temporal)
        clock = [time.perf_counter()]

        def on_frame(f, stack):
            finish(f, stack, clock[0])
            clock[0] = time.perf_counter()

        render_walkthrough(scene, cfg, frames, width, height, on_frame=on_frame)
    else:
        smudge = args.max_smudge if args.max_smudge is not None else args.lam * min(width, height) / 10.0
        params = WarpParams(smudge, args.edge_mode, args.use_depth, args.z0, args.depth_clamp, args.iterations)
        for f in frames:
            t0 = time.perf_counter()
            if scene is None:
                if not args.input.is_file():
                    raise FileNotFoundError(f"input image not found: {args.input}")
                start = FrameBuffer.from_rgb(fileio.read_png(args.input))
            else:
                start = plain_render(scene, scene.camera_at(f, width, height), width, height)
            finish(f, warp_recursive(start, params), t0)

    if args.report:
        report.write_report(args.output, rows, first_stack, title=f"{args.mode} mode")
    return EXIT_OK


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        if args.command == "example":
            path = write_example(args.output, spheres=not args.no_spheres)
            print(path)
            return EXIT_OK
        return _run_render(args)
    except (UsageError, SceneParseError, InvalidScene) as e:
        print(f"rcpaint: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"rcpaint: I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        print(f"rcpaint: invalid configuration: {e}", file=sys.stderr)
        return EXIT_CONFIG


def main() -> None:
    sys.exit(run())
