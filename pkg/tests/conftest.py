from pathlib import Path

import numpy as np
import pytest

from scmfrqi.imageio import Image, save_image

CORPUS_NAMES = ("astronaut", "coffee", "chelsea", "camera")

_criteria: dict[int, list[tuple[str, str]]] = {}


@pytest.fixture(scope="session")
def corpus(tmp_path_factory) -> dict[str, Path]:
    """Sample photographs from scikit-image, written out as PPM/PGM files."""
    from skimage import data

    root = tmp_path_factory.mktemp("corpus")
    paths = {}
    for name in CORPUS_NAMES:
        arr = getattr(data, name)()
        img = Image(np.moveaxis(arr, 2, 0) if arr.ndim == 3 else arr)
        path = root / (f"{name}.ppm" if img.channels == 3 else f"{name}.pgm")
        save_image(img, path)
        paths[name] = path
    return paths


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    n = getattr(report, "criterion", None)
    if n is not None:
        _criteria.setdefault(n, []).append((report.nodeid.split("::")[-1], report.outcome))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        rep.criterion = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        results = _criteria[n]
        ok = all(o == "passed" for _, o in results)
        names = ", ".join(name for name, _ in results)
        terminalreporter.write_line(f"AC{n}: {'PASS' if ok else 'FAIL'}  ({names})")
