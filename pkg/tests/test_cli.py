import hashlib

import numpy as np
import pytest

from rcpaint import fileio
from rcpaint.cli import run
from rcpaint.scenefile import write_example


@pytest.fixture(scope="module")
def example(tmp_path_factory):
    return write_example(tmp_path_factory.mktemp("scene"))


def digest(d):
    return {p.name: hashlib.sha256(p.read_bytes()).hexdigest() for p in sorted(d.iterdir())}


def test_ray_mode_writes_every_iteration(example, tmp_path, capsys):
    out = tmp_path / "out"
    code = run(["render", "--scene", str(example), "--mode", "ray", "--iterations", "6", "--lambda", "0.3",
                "--size", "48x32", "--seed", "1", "-o", str(out)])
    assert code == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == [f"frame_0000_iter_{n:02d}.png" for n in range(7)]
    for n in range(7):
        assert fileio.read_png(out / f"frame_0000_iter_{n:02d}.png").shape == (32, 48, 3)
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 1 and lines[0].startswith("frame 0000\titerations 6\t")


def test_same_seed_same_bytes(example, tmp_path):
    args = ["render", "--scene", str(example), "--size", "32x32", "--seed", "4", "--spp", "2", "--dump-aux"]
    assert run(args + ["-o", str(tmp_path / "a")]) == 0
    assert run(args + ["-o", str(tmp_path / "b")]) == 0
    assert digest(tmp_path / "a") == digest(tmp_path / "b")


def test_aux_dumps(example, tmp_path):
    assert run(["render", "--scene", str(example), "--size", "16x8", "--iterations", "1", "--dump-aux",
                "-o", str(tmp_path)]) == 0
    depth = fileio.read_pfm(tmp_path / "frame_0000_iter_01_depth.pfm")
    normal = fileio.read_pfm(tmp_path / "frame_0000_iter_01_normal.pfm")
    assert depth.shape == (8, 16) and normal.shape == (8, 16, 3)
    assert np.isinf(depth).any() and np.isfinite(depth).any()


def test_final_only(example, tmp_path):
    assert run(["render", "--scene", str(example), "--size", "8x8", "--iterations", "3", "--no-dump-iterations",
                "-o", str(tmp_path)]) == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["frame_0000_iter_03.png"]


@pytest.mark.parametrize("mapping", ["null", "depth", "normal"])
def test_other_mappings_run(example, tmp_path, mapping):
    assert run(["render", "--scene", str(example), "--size", "16x16", "--iterations", "2", "--mapping", mapping,
                "--loops", "2", "--noise", "0.05", "-o", str(tmp_path)]) == 0


def test_affine_mapping_flag(example, tmp_path):
    base = ["render", "--scene", str(example), "--size", "8x8", "--iterations", "1", "-o", str(tmp_path),
            "--mapping", "affine"]
    assert run(base + ["--affine", "0.6,0,0,0,0.6,0,0,0,0.6,-0.3,-0.3,-0.3"]) == 0
    assert run(base) == 2
    assert run(base + ["--affine", "1,2,3"]) == 2


def test_warp_mode_from_image(tmp_path):
    img = np.random.default_rng(0).integers(0, 256, (20, 30, 3)) / 255.0
    fileio.write_png(tmp_path / "in.png", img)
    out = tmp_path / "out"
    assert run(["render", "--mode", "warp", "--input", str(tmp_path / "in.png"), "--iterations", "3",
                "--edge-mode", "wrap", "-o", str(out)]) == 0
    np.testing.assert_array_equal(fileio.read_png(out / "frame_0000_iter_00.png"), img)
    assert fileio.read_png(out / "frame_0000_iter_03.png").shape == (20, 30, 3)


def test_warp_mode_from_scene(example, tmp_path):
    assert run(["render", "--mode", "warp", "--scene", str(example), "--size", "24x16", "--iterations", "2",
                "--use-depth", "-o", str(tmp_path)]) == 0
    assert len(list(tmp_path.glob("*.png"))) == 3


def test_report_outputs(example, tmp_path):
    assert run(["render", "--scene", str(example), "--size", "16x16", "--iterations", "3", "--report",
                "-o", str(tmp_path)]) == 0
    rows = (tmp_path / "report.csv").read_text().splitlines()
    assert rows[0] == "frame,iteration,mean_abs_change"
    assert [r.split(",")[1] for r in rows[1:]] == ["1", "2", "3"]
    assert (tmp_path / "report.png").read_bytes()[:4] == b"\x89PNG"


def test_walkthrough_frames(tmp_path):
    scene = tmp_path / "walk.scn"
    fileio.write_png(tmp_path / "env.png", np.random.default_rng(0).random((8, 16, 3)))
    scene.write_text("env env.png\ncamera frame=0 eye=0,0,0 look=0,0,1\ncamera frame=2 eye=0,0,0 look=1,0,1\n")
    out = tmp_path / "out"
    assert run(["render", "--scene", str(scene), "--size", "8x8", "--iterations", "1", "--temporal", "carry",
                "-o", str(out)]) == 0
    assert sorted(p.name for p in out.glob("*iter_01.png")) == [f"frame_{f:04d}_iter_01.png" for f in range(3)]


def test_missing_scene_exit_3(tmp_path, capsys):
    missing = tmp_path / "missing.scn"
    assert run(["render", "--scene", str(missing), "-o", str(tmp_path)]) == 3
    assert "missing.scn" in capsys.readouterr().err


def test_parse_error_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.scn"
    bad.write_text("ambient 0.2\nsphere 0 0 oops 1\n")
    assert run(["render", "--scene", str(bad), "-o", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert "line 2" in err and "sphere 0 0 oops 1" in err


def test_flag_errors_exit_2(example, tmp_path):
    assert run(["render", "--scene", str(example), "--size", "big"]) == 2
    assert run(["render", "--mode", "ray", "-o", str(tmp_path)]) == 2
    assert run(["render", "--mode", "warp", "-o", str(tmp_path)]) == 2
    assert run(["nonsense"]) == 2


def test_config_errors_exit_4(example, tmp_path, monkeypatch):
    base = ["render", "--scene", str(example), "-o", str(tmp_path)]
    assert run(base + ["--size", "0x16"]) == 4
    assert run(base + ["--iterations", "0"]) == 4
    assert run(base + ["--lambda", "-1"]) == 4
    assert run(base + ["--mapping", "depth", "--z0", "10", "--depth-clamp", "5"]) == 4
    monkeypatch.setenv("RCP_THREADS", "0")
    assert run(base + ["--size", "4x4"]) == 4


def test_no_camera_exit_2(tmp_path):
    fileio.write_png(tmp_path / "env.png", np.zeros((2, 2, 3)))
    (tmp_path / "s.scn").write_text("env env.png\n")
    assert run(["render", "--scene", str(tmp_path / "s.scn"), "-o", str(tmp_path / "o")]) == 2


def test_example_command(tmp_path):
    assert run(["example", "-o", str(tmp_path / "ex")]) == 0
    assert (tmp_path / "ex" / "scene.scn").is_file() and (tmp_path / "ex" / "env.png").is_file()
