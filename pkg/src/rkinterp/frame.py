"""Hilbertian/besselian constants for general p by projected gradient.

Both constants are extreme values of the homogeneous quotient

    R(mu) = ||A mu||_{L^q(w)} / ||mu||_{l^q},   q = p',

over mu in C^N, where ``A`` holds the normalized kernels k_{a,p'} sampled
on a quadrature grid (frame constants) or the transposed Grammian with
unit weights (Grammian lower bound).  Iterates live on the l^q unit
sphere: step along the gradient of R, then rescale (an exact retraction).
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigurationError, EmptySequenceError
from .gram import OPTIMIZED, FrameReport, build_gram, spectral_bounds
from .kernels import conjugate_exponent
from .quadrature import DenseSynthesis, build_grid, synthesis_matrix
from .spaces import BERGMAN_BALL, HARDY_BALL, HARDY_DISC, HARDY_POLYDISC, PointSeq, Space

ARMIJO = 1e-4
BACKTRACK = 0.5
MAX_BACKTRACKS = 60

# angular nodes per axis when OptimizerConfig.grid_resolution is None
DEFAULT_RESOLUTION = {
    (HARDY_DISC, 1): 512,
    (HARDY_POLYDISC, 1): 512,
    (HARDY_POLYDISC, 2): 64,
    (HARDY_BALL, 1): 512,
    (HARDY_BALL, 2): 48,
    (BERGMAN_BALL, 1): 256,
}


def default_resolution(space: Space) -> int:
    return DEFAULT_RESOLUTION.get((space.kind, space.n), 16)


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 32
    max_iters: int = 2000
    step_init: float = 1.0
    tol: float = 1e-8
    seed: int = 0
    grid_resolution: Optional[int] = None
    grid_radial: Optional[int] = None

    def __post_init__(self):
        if self.restarts < 1:
            raise ConfigurationError("restarts must be >= 1")
        if self.max_iters < 1:
            raise ConfigurationError("max_iters must be >= 1")
        if not self.tol > 0:
            raise ConfigurationError("tol must be positive")
        if not self.step_init > 0:
            raise ConfigurationError("step_init must be positive")

    def to_dict(self) -> dict:
        return {
            "restarts": self.restarts,
            "max_iters": self.max_iters,
            "step_init": self.step_init,
            "tol": self.tol,
            "seed": self.seed,
            "grid_resolution": self.grid_resolution,
            "grid_radial": self.grid_radial,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "OptimizerConfig":
        unknown = set(d) - set(cls().to_dict())
        if unknown:
            raise ConfigurationError(f"unknown optimizer fields: {sorted(unknown)}")
        return cls(**d)


class QuotientProblem:
    """R(mu) = ||A mu||_{q,w} / ||mu||_q with its packed complex gradient.

    ``A`` is a matrix (sampled synthesis, unit weights by default) or any
    operator exposing ``N`` and ``value_and_grad(mu)`` for the numerator.
    """

    def __init__(self, A, q: float, weights: Optional[np.ndarray] = None):
        self.q = float(q)
        if isinstance(A, np.ndarray):
            w = np.ones(A.shape[0]) if weights is None else weights
            A = DenseSynthesis(A, w, self.q)
        self.op = A
        self.N = A.N

    def seq_norm(self, mu):
        return float(np.sum(np.abs(mu) ** self.q) ** (1.0 / self.q))

    def normalize(self, mu):
        return mu / self.seq_norm(mu)

    def value(self, mu) -> float:
        return self.value_and_grad(mu)[0]

    def value_and_grad(self, mu):
        J, gJ = self.op.value_and_grad(mu)
        s = self.seq_norm(mu)
        a = np.abs(mu)
        gs = np.zeros_like(mu)
        live = a > 0
        gs[live] = a[live] ** (self.q - 2) * mu[live] * s ** (1 - self.q)
        return J / s, gJ / s - (J / s ** 2) * gs


def _start_vector(N: int, q: float, k: int, seed: int) -> np.ndarray:
    if k == 0:
        return np.full(N, N ** (-1.0 / q), dtype=np.complex128)
    rng = np.random.default_rng([seed, k])
    v = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    return v / np.sum(np.abs(v) ** q) ** (1.0 / q)


def _rdot(x, y) -> float:
    return float(np.real(np.vdot(x, y)))


def optimize(problem: QuotientProblem, start: np.ndarray, maximize: bool, cfg: OptimizerConfig):
    """Projected gradient with Barzilai-Borwein trial steps and Armijo backtracking.

    Returns (value, iterations, converged).
    """
    sign = -1.0 if maximize else 1.0
    mu = problem.normalize(start)
    val, g = problem.value_and_grad(mu)
    step = cfg.step_init
    for it in range(1, cfg.max_iters + 1):
        gg = _rdot(g, g)
        if gg <= (cfg.tol * max(val, 1e-300)) ** 2:
            return val, it - 1, True
        t = step
        for _ in range(MAX_BACKTRACKS):
            cand = problem.normalize(mu - sign * t * g)
            cval, cg = problem.value_and_grad(cand)
            if sign * (cval - val) <= -ARMIJO * t * gg:
                break
            t *= BACKTRACK
        else:
            # no admissible step: stationary to working precision
            return val, it, True
        s = cand - mu
        y = cg - g
        change = abs(cval - val) / max(abs(val), 1e-300)
        mu, val, g = cand, cval, cg
        sy = _rdot(s, y)
        ss = _rdot(s, s)
        bb = ss / abs(sy) if sy != 0 else t * 2
        step = float(np.clip(bb, 1e-10, 1e10))
        if change < cfg.tol and _rdot(g, g) <= (np.sqrt(cfg.tol) * max(val, 1e-300)) ** 2:
            return val, it, True
    return val, cfg.max_iters, False


def extreme_values(problem: QuotientProblem, cfg: OptimizerConfig) -> FrameReport:
    """Min and max of the quotient over ``cfg.restarts`` starts each."""
    lowers, uppers = [], []
    iterations = 0
    converged = True
    for k in range(cfg.restarts):
        start = _start_vector(problem.N, problem.q, k, cfg.seed)
        hi, it_hi, ok_hi = optimize(problem, start, True, cfg)
        lo, it_lo, ok_lo = optimize(problem, start, False, cfg)
        uppers.append(hi)
        lowers.append(lo)
        iterations += it_hi + it_lo
        converged = converged and ok_hi and ok_lo
    return FrameReport(
        lower=float(min(lowers)),
        upper=float(max(uppers)),
        method=OPTIMIZED,
        restarts_used=cfg.restarts,
        iterations=iterations,
        converged=converged,
    )


def frame_problem(space: Space, p: float, seq: PointSeq, cfg: OptimizerConfig, grid=None) -> QuotientProblem:
    """Quotient for mu -> ||sum_a mu_a k_{a,p'}||_{p'} / ||mu||_{l^p'}."""
    pc = conjugate_exponent(p)
    if grid is None:
        res = cfg.grid_resolution or default_resolution(space)
        grid = build_grid(space, res, cfg.grid_radial)
    A = synthesis_matrix(space, pc, seq, grid)
    return QuotientProblem(A, pc, grid.weights)


def frame_bounds(space: Space, p: float, seq: PointSeq, cfg: OptimizerConfig = OptimizerConfig(),
                 grid=None, problem: Optional[QuotientProblem] = None) -> FrameReport:
    """Estimate the p'-hilbertian (upper) and p'-besselian (lower) constants.

    ``problem`` overrides the default sampled quotient (for instance a
    graded grid or the diagonal bidisc operator).  For p = 2 the exact
    spectral constants are attached as ``reference``.
    """
    if len(seq) == 0:
        raise EmptySequenceError("sequence is empty")
    if problem is None:
        problem = frame_problem(space, p, seq, cfg, grid)
    report = extreme_values(problem, cfg)
    if float(p) == 2.0:
        report.reference = spectral_bounds(build_gram(space, 2.0, seq))
    return report


def grammian_lower_bound(space: Space, p: float, seq: PointSeq, cfg: OptimizerConfig = OptimizerConfig()) -> float:
    """Estimate inf ||G mu||_{l^p'} over the l^p' unit sphere."""
    G = build_gram(space, p, seq).entries
    pc = conjugate_exponent(p)
    # (G mu)_b = sum_a mu_a G[a, b]
    problem = QuotientProblem(G.T, pc)
    lows = []
    for k in range(cfg.restarts):
        lo, _, _ = optimize(problem, _start_vector(problem.N, pc, k, cfg.seed), False, cfg)
        lows.append(lo)
    return float(min(lows))


def objective(space: Space, p: float, seq: PointSeq, mu, grid) -> float:
    """Frame objective ||sum mu_a k_{a,p'}||_{p'} / ||mu||_{p'} (diagnostic helper)."""
    problem = frame_problem(space, p, seq, OptimizerConfig(), grid)
    return problem.value(np.asarray(mu, dtype=np.complex128))
