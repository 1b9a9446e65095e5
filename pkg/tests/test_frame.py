import numpy as np
import pytest

from rkinterp import (HardyBall, HardyDisc, HardyPolydisc, OptimizerConfig, build_grid, build_gram, frame_bounds,
                      grammian_lower_bound, spectral_bounds)
from rkinterp.errors import ConfigurationError, EmptySequenceError
from rkinterp.frame import frame_problem
from rkinterp.gram import eigenvalues, random_unit_vectors
from rkinterp.spaces import PointSeq, make_sequence

from conftest import random_sequence

R3 = np.sqrt(3) / 2
TWO_POINT = make_sequence(HardyDisc(), [0, R3])
FAST = OptimizerConfig(restarts=4, max_iters=500)


def test_config_validation():
    with pytest.raises(ConfigurationError):
        OptimizerConfig(restarts=0)
    with pytest.raises(ConfigurationError):
        OptimizerConfig(tol=0)
    with pytest.raises(ConfigurationError):
        OptimizerConfig.from_dict({"restart": 3})
    cfg = OptimizerConfig(restarts=3)
    assert OptimizerConfig.from_dict(cfg.to_dict()) == cfg


@pytest.mark.parametrize("p", [1.5, 2, 4])
def test_single_constant_kernel(p):
    fr = frame_bounds(HardyDisc(), p, make_sequence(HardyDisc(), [0]), FAST)
    assert fr.lower == pytest.approx(1, abs=1e-12) and fr.upper == pytest.approx(1, abs=1e-12)


def test_empty_sequence():
    with pytest.raises(EmptySequenceError):
        frame_bounds(HardyDisc(), 2, PointSeq(HardyDisc(), np.zeros((0, 1))), FAST)


def test_two_point_p2_matches_spectrum():
    fr = frame_bounds(HardyDisc(), 2, TWO_POINT, FAST)
    assert fr.converged
    assert fr.lower == pytest.approx(np.sqrt(0.5), abs=1e-4)
    assert fr.upper == pytest.approx(np.sqrt(1.5), abs=1e-4)
    assert fr.reference.lower == pytest.approx(np.sqrt(0.5), abs=1e-12)


def test_p4_bracketed_by_random_search():
    p = 4.0
    q = p / (p - 1)
    cfg = OptimizerConfig()
    grid = build_grid(HardyDisc(), cfg.grid_resolution or 512)
    fr = frame_bounds(HardyDisc(), p, TWO_POINT, cfg, grid=grid)
    problem = frame_problem(HardyDisc(), p, TWO_POINT, cfg, grid)
    V = random_unit_vectors(2, 100_000, q, np.random.default_rng(0))
    vals = np.sum(grid.weights[:, None] * np.abs(problem.op.K @ V.T) ** q, axis=0) ** (1 / q)
    assert vals.min() >= fr.lower - 1e-3
    assert vals.max() <= fr.upper + 1e-3
    # the optimizer does not lose to brute force
    assert fr.lower <= vals.min() + 1e-9
    assert fr.upper >= vals.max() - 1e-9


@pytest.mark.parametrize("space", [HardyDisc(), HardyPolydisc(2), HardyBall(2)], ids=str)
def test_p2_agreement(space):
    for seed in range(3):
        seq = random_sequence(space, 4, seed=100 + seed)
        fr = frame_bounds(space, 2, seq, FAST)
        ref = fr.reference
        assert fr.lower == pytest.approx(ref.lower, rel=1e-3)
        assert fr.upper == pytest.approx(ref.upper, rel=1e-3)


@pytest.mark.parametrize("p", [1.5, 3])
def test_sandwich_basis_vectors(p):
    space = HardyBall(2)
    seq = random_sequence(space, 4, seed=7)
    cfg = OptimizerConfig(restarts=3, max_iters=500, grid_resolution=16)
    fr = frame_bounds(space, p, seq, cfg)
    problem = frame_problem(space, p, seq, cfg)
    for i in range(4):
        e = np.zeros(4, dtype=complex)
        e[i] = 1
        v = problem.value(e)
        assert fr.lower - 1e-12 <= v <= fr.upper + 1e-12


def test_restart_monotonicity():
    space = HardyDisc()
    seq = random_sequence(space, 5, seed=8)
    reports = [frame_bounds(space, 3, seq, OptimizerConfig(restarts=r, max_iters=300, grid_resolution=256))
               for r in (1, 2, 4, 8)]
    for a, b in zip(reports, reports[1:]):
        assert b.upper >= a.upper
        assert b.lower <= a.lower


def test_phase_invariance():
    space = HardyPolydisc(2)
    seq = random_sequence(space, 3, seed=9)
    problem = frame_problem(space, 4, seq, OptimizerConfig(grid_resolution=16))
    rng = np.random.default_rng(0)
    mu = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    for theta in np.linspace(0, 2 * np.pi, 7):
        assert problem.value(np.exp(1j * theta) * mu) == pytest.approx(problem.value(mu), abs=1e-10)


def test_quotient_gradient_matches_finite_differences():
    space = HardyDisc()
    seq = random_sequence(space, 4, seed=10)
    problem = frame_problem(space, 3, seq, OptimizerConfig(grid_resolution=128))
    rng = np.random.default_rng(1)
    mu = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    _, g = problem.value_and_grad(mu)
    h = 1e-6
    for i in range(4):
        for unit, slot in ((1, 1), (1j, 1j)):
            e = np.zeros(4, dtype=complex)
            e[i] = h * unit
            d = (problem.value(mu + e) - problem.value(mu - e)) / (2 * h)
            part = g[i].real if slot == 1 else g[i].imag
            assert part == pytest.approx(d, rel=1e-5, abs=1e-9)


def test_nonconvergence_is_flagged():
    seq = random_sequence(HardyDisc(), 6, seed=11)
    fr = frame_bounds(HardyDisc(), 3, seq, OptimizerConfig(restarts=2, max_iters=1))
    assert not fr.converged


def test_grammian_lower_bound_examples():
    D = HardyDisc()
    assert grammian_lower_bound(D, 3, make_sequence(D, [0.2]), FAST) == pytest.approx(1)
    assert grammian_lower_bound(D, 2, TWO_POINT, FAST) == pytest.approx(0.5, abs=1e-6)


@pytest.mark.parametrize("space", [HardyDisc(), HardyPolydisc(2), HardyBall(2)], ids=str)
def test_grammian_lower_bound_is_lambda_min_at_p2(space):
    seq = random_sequence(space, 5, seed=12)
    G = build_gram(space, 2, seq)
    assert grammian_lower_bound(space, 2, seq, OptimizerConfig(restarts=4)) == pytest.approx(eigenvalues(G)[0], abs=1e-6)
    assert spectral_bounds(G).lower ** 2 == pytest.approx(eigenvalues(G)[0], rel=1e-12)
