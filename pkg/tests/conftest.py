import numpy as np
import pytest

from rkinterp import BergmanBall, HardyBall, HardyDisc, HardyPolydisc
from rkinterp.seqgen import random_separated

SPACES = {
    "disc": HardyDisc(),
    "bidisc": HardyPolydisc(2),
    "ball2": HardyBall(2),
    "bergman_disc": BergmanBall(1, 0),
    "bergman_disc_k1": BergmanBall(1, 1),
}


@pytest.fixture(params=sorted(SPACES))
def any_space(request):
    return SPACES[request.param]


def random_sequence(space, count, seed, min_sep=0.2, max_radius=0.8):
    return random_separated(space, count, min_sep, seed, max_radius=max_radius)


def random_points(n, count, rng, radius=0.95):
    """``count`` points uniformly distributed in the radius-``radius`` ball of C^n."""
    v = rng.standard_normal((count, n)) + 1j * rng.standard_normal((count, n))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return radius * rng.uniform(0, 1, (count, 1)) * v


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE = {}


def record(criterion: int, passed: bool, detail: str):
    ACCEPTANCE[criterion] = (passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for c in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[c]
        terminalreporter.write_line(f"criterion {c}: {'PASS' if passed else 'FAIL'} - {detail}")
