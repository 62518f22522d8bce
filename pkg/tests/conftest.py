import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def wave_problem():
    from arlequin.cells import locate_atoms
    from arlequin.demo import wave_demo
    from arlequin.topology import build_coupling_map

    pb = wave_demo()
    cmap = build_coupling_map(pb.mesh, locate_atoms(pb.mesh, pb.atoms), pb.anchors)
    return pb, cmap


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "REPORT", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
