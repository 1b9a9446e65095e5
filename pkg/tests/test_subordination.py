import numpy as np
import pytest

from rkinterp import (BergmanBall, OptimizerConfig, build_grid, build_gram, embed_point, frame_bounds,
                      kernel_agreement_check, lift_norm_ratio, spectral_bounds)
from rkinterp.errors import UnsupportedSpaceError
from rkinterp.gram import dual_system
from rkinterp.kernels import KernelCoeffs
from rkinterp.quadrature import function_norm
from rkinterp.spaces import HardyDisc, PointSeq, make_sequence
from rkinterp.subordination import LiftMap, embed_sequence, kernel_agreement_many, lift_carleson_check

from conftest import random_points, random_sequence

# measured once at resolutions 16, 32 and 64 (all within 3e-16 of 1) and frozen
KERNEL_RATIO_Q4 = 1.0
KERNEL_RATIO_TOL = 1e-10


def test_lift_map_dimensions():
    assert LiftMap(BergmanBall(2, 1)).target.n == 4
    with pytest.raises(UnsupportedSpaceError):
        LiftMap(HardyDisc())


def test_embed_examples():
    assert np.array_equal(embed_point(LiftMap(BergmanBall(1, 0)), 0), [0, 0])
    assert np.array_equal(embed_point(LiftMap(BergmanBall(1, 0)), 0.5), [0.5, 0])
    assert np.array_equal(embed_point(LiftMap(BergmanBall(2, 1)), (0.3, 0.4j)), [0.3, 0.4j, 0, 0])


def test_kernel_agreement_examples():
    lift = LiftMap(BergmanBall(1, 0))
    assert kernel_agreement_check(lift, 0, 0) == 0
    assert kernel_agreement_check(lift, 0.5, 0.5) == 0


@pytest.mark.parametrize("n,k", [(1, 0), (1, 1), (2, 1)])
def test_kernel_agreement_random(n, k):
    rng = np.random.default_rng(n * 10 + k)
    lift = LiftMap(BergmanBall(n, k))
    assert np.max(kernel_agreement_many(lift, random_points(n, 1000, rng), random_points(n, 1000, rng))) <= 1e-14


@pytest.mark.parametrize("q", [1, 2, 4])
def test_constant_ratio_is_one(q):
    lift = LiftMap(BergmanBall(1, 1))
    f = KernelCoeffs(lift.source, 2, make_sequence(lift.source, [0]), [1])
    assert lift_norm_ratio(lift, f, q, 8) == pytest.approx(1, abs=1e-13)


def test_monomial_ratios():
    src, tgt = build_grid(BergmanBall(1, 0), 16), build_grid(LiftMap(BergmanBall(1, 0)).target, 16)
    for m in range(11):
        a = function_norm(lambda Z: Z[:, 0] ** m, src, 2)
        b = function_norm(lambda Z: Z[:, 0] ** m, tgt, 2)
        assert b / a == pytest.approx(1, abs=1e-3)
        assert a ** 2 == pytest.approx(1 / (m + 1), rel=1e-10)


def test_kernel_ratio_q4_frozen():
    lift = LiftMap(BergmanBall(1, 0))
    f = KernelCoeffs(lift.source, 4 / 3, make_sequence(lift.source, [0.5]), [1])
    assert lift_norm_ratio(lift, f, 4, 32) == pytest.approx(KERNEL_RATIO_Q4, abs=KERNEL_RATIO_TOL)


@pytest.mark.parametrize("n,k", [(1, 0), (1, 1), (2, 1)])
def test_embedded_gram_equality(n, k):
    lift = LiftMap(BergmanBall(n, k))
    seq = random_sequence(lift.source, 6, seed=n + k)
    for p in (2, 3):
        G = build_gram(lift.source, p, seq).entries
        H = build_gram(lift.target, p, embed_sequence(lift, seq)).entries
        assert np.max(np.abs(G - H)) <= 1e-14


def test_frame_and_dual_commute_with_embedding():
    lift = LiftMap(BergmanBall(1, 0))
    seq = random_sequence(lift.source, 4, seed=3)
    lifted = embed_sequence(lift, seq)
    a = spectral_bounds(build_gram(lift.source, 2, seq))
    b = spectral_bounds(build_gram(lift.target, 2, lifted))
    assert abs(a.lower - b.lower) <= 1e-10 and abs(a.upper - b.upper) <= 1e-10
    cfg = OptimizerConfig(restarts=2, max_iters=300, grid_resolution=32)
    fa = frame_bounds(lift.source, 2, seq, cfg)
    fb = frame_bounds(lift.target, 2, lifted, cfg)
    assert abs(fa.reference.lower - fb.reference.lower) <= 1e-10
    assert np.allclose(dual_system(lift.source, 3, seq).dual_coeffs, dual_system(lift.target, 3, lifted).dual_coeffs,
                       atol=1e-12)


def test_lift_carleson_examples():
    lift = LiftMap(BergmanBall(1, 0))
    src, tgt = lift_carleson_check(lift, make_sequence(lift.source, [0]), 4)
    assert src.box_constant > 0 and tgt.box_constant > 0
    empty = PointSeq(lift.source, np.zeros((0, 1)))
    src, tgt = lift_carleson_check(lift, empty, 4)
    assert src.box_constant == 0 and tgt.box_constant == 0
    seq = random_sequence(lift.source, 5, seed=4)
    w = np.linspace(0.1, 1, 5)
    s1, t1 = lift_carleson_check(lift, seq, 6, w)
    s3, t3 = lift_carleson_check(lift, seq, 6, 3 * w)
    assert s3.box_constant == pytest.approx(3 * s1.box_constant)
    assert t3.box_constant == pytest.approx(3 * t1.box_constant)
