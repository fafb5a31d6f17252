import numpy as np
import pytest

from rcpaint.scene import Camera, DirectionalLight, Material, Scene, Sphere
from rcpaint.scenefile import make_environment

ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")


@pytest.fixture(scope="session")
def env_image():
    return make_environment(256, 128)


@pytest.fixture
def camera_128():
    return Camera.look_at((0, 0, 0), (0, 0, 1), (0, 1, 0), 60.0, 128, 128)


@pytest.fixture
def env_scene(env_image):
    return Scene(environment=env_image)


@pytest.fixture
def sphere_scene(env_image):
    return Scene(
        environment=env_image,
        primitives=[
            Sphere((0.0, 0.0, 5.0), 1.0, Material((0.9, 0.2, 0.2))),
            Sphere((-2.2, -0.4, 6.5), 0.8, Material((0.2, 0.8, 0.3))),
            Sphere((2.0, 0.6, 7.0), 1.2, Material((0.25, 0.35, 0.95))),
        ],
        light=DirectionalLight((-0.4, -1.0, 0.6), 1.0),
        ambient=0.2,
    )


@pytest.fixture
def gray_scene():
    return Scene(environment=np.full((16, 32, 3), 0.5))
