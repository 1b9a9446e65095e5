"""Sequence generators and the upper uniform density estimate.

Density convention (Seip): for a disc sequence S,

    D+(S) = limsup_{r->1} sup_z  sum_{1/2 < rho(z,a) < r} log(1/rho(z,a)) / log(1/(1-r)),

and S is interpolating for the standard Bergman space A^p(D) iff S is
separated and D+(S) < 1/p.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigurationError, SaturationError, UnsupportedSpaceError
from .spaces import (CDTYPE, HARDY_DISC, RDTYPE, HardyDisc, HardyPolydisc, PointSeq, Space, _pseudo,
                     sq_norm)

DENSITY_CONVENTION = "Seip upper uniform density D+; A^p(D) interpolating iff separated and D+ < 1/p"
DEFAULT_LADDER = (0.9, 0.99, 0.999)
DEFAULT_CENTERS = 64
SAMPLING_BUDGET = 200_000


@dataclass(frozen=True)
class LatticeParams:
    """Ring m = 1..rings has radius 1 - sigma^-m and ceil(angular_density * 2 pi sigma^m) points."""

    sigma: float = 2.0
    angular_density: float = 1.0
    rings: int = 4
    seed: Optional[int] = None

    def __post_init__(self):
        if not self.sigma > 1:
            raise ConfigurationError(f"sigma must exceed 1, got {self.sigma}")
        if not self.angular_density > 0:
            raise ConfigurationError(f"angular_density must be positive, got {self.angular_density}")
        if int(self.rings) != self.rings or self.rings < 1:
            raise ConfigurationError(f"rings must be a positive integer, got {self.rings}")

    def to_dict(self) -> dict:
        return {"sigma": self.sigma, "angular_density": self.angular_density, "rings": self.rings, "seed": self.seed}


@dataclass
class DensityEstimate:
    value: float
    r_ladder: list
    sup_centers: int
    per_radius: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"value": self.value, "r_ladder": list(self.r_ladder), "sup_centers": self.sup_centers,
                "per_radius": list(self.per_radius), "convention": DENSITY_CONVENTION}


def ring_counts(params: LatticeParams) -> list:
    return [max(1, int(np.ceil(params.angular_density * 2 * np.pi * params.sigma ** m)))
            for m in range(1, params.rings + 1)]


def seip_lattice(params: LatticeParams, space: Space = None) -> PointSeq:
    """Hyperbolic lattice ordered ring by ring (inner first), then by angle.

    Same-ring neighbours are about 1/(2 * angular_density) apart in the
    pseudohyperbolic metric.  With ``params.seed`` set each ring is rotated
    by a random fraction of its angular spacing.
    """
    space = HardyDisc() if space is None else space
    if space.n != 1:
        raise UnsupportedSpaceError(f"lattices live in the disc, not {space}")
    rng = None if params.seed is None else np.random.default_rng(params.seed)
    pts = []
    sigma = RDTYPE(params.sigma)
    for m, count in enumerate(ring_counts(params), start=1):
        r = 1 - sigma ** (-m)
        offset = 0.0 if rng is None else rng.uniform(0, 1)
        theta = 2 * np.pi * (np.arange(count, dtype=RDTYPE) + RDTYPE(offset)) / count
        pts.append(r * np.exp(1j * theta).astype(CDTYPE))
    return PointSeq(space, np.concatenate(pts)[:, None])


def _center_indices(seq: PointSeq, centers: int, seed: int) -> np.ndarray:
    """Sample centers among the points with probability proportional to 1 - |a|^2.

    This is roughly uniform over the rings of a hyperbolic lattice instead
    of concentrating on the outermost (most populous) ring.
    """
    N = len(seq)
    if centers >= N:
        return np.arange(N)
    w = (1 - sq_norm(seq.points)).astype(np.float64)
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(N, size=centers, replace=False, p=w / w.sum()))


def density_estimate(seq: PointSeq, r_ladder: Sequence[float] = DEFAULT_LADDER,
                     centers: int = DEFAULT_CENTERS, seed: int = 0) -> DensityEstimate:
    """Finite-truncation estimate of D+(S); centers are drawn from the sequence itself."""
    ladder = [float(r) for r in r_ladder]
    if not ladder or any(not (0.5 < r < 1) for r in ladder):
        raise ConfigurationError("every ladder radius must lie in (1/2, 1)")
    if centers < 1:
        raise ConfigurationError("centers must be >= 1")
    if seq.space.n != 1:
        raise UnsupportedSpaceError("density estimates are defined for disc sequences")
    if len(seq) == 0:
        return DensityEstimate(0.0, ladder, 0, [0.0] * len(ladder))
    idx = _center_indices(seq, centers, seed)
    Z = seq.points[idx, 0]
    A = seq.points[:, 0]
    best = np.zeros(len(ladder))
    for z in Z:
        rho = _pseudo(seq.space, np.full((len(A), 1), z), A[:, None]).astype(np.float64)
        for i, r in enumerate(ladder):
            sel = (rho > 0.5) & (rho < r)
            val = np.sum(np.log(1.0 / rho[sel])) / np.log(1.0 / (1.0 - r))
            best[i] = max(best[i], val)
    return DensityEstimate(float(best.max()), ladder, len(idx), best.tolist())


def radial_geometric(count: int, base: float = 0.5) -> PointSeq:
    """r_k = 1 - base^k for k = 1..count on the positive real axis."""
    if int(count) != count or count < 1:
        raise ConfigurationError(f"count must be a positive integer, got {count}")
    if not 0 < base < 1:
        raise ConfigurationError(f"base must lie in (0, 1), got {base}")
    k = np.arange(1, count + 1)
    r = 1 - RDTYPE(base) ** k.astype(RDTYPE)
    return PointSeq(HardyDisc(), r.astype(CDTYPE)[:, None])


def diagonal_embed(seq: PointSeq) -> PointSeq:
    """{a} -> {(a, a)} in the bidisc."""
    if seq.space.kind != HARDY_DISC:
        raise UnsupportedSpaceError(f"diagonal embedding needs a HardyDisc sequence, got {seq.space}")
    return PointSeq(HardyPolydisc(2), np.concatenate([seq.points, seq.points], axis=1), seq.labels)


def _sample_point(space: Space, rng, max_radius: float) -> np.ndarray:
    n = space.n
    if space.is_polydisc:
        r = max_radius * np.sqrt(rng.uniform(0, 1, n))
        return r * np.exp(2j * np.pi * rng.uniform(0, 1, n))
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    return max_radius * rng.uniform(0, 1) ** (1.0 / (2 * n)) * v


def random_separated(space: Space, count: int, min_sep: float, seed: int,
                     max_radius: float = 0.8, budget: int = SAMPLING_BUDGET) -> PointSeq:
    """Rejection sampling (uniform in volume, modulus <= ``max_radius``) with pairwise distance >= min_sep."""
    if not 0 < min_sep < 1:
        raise ConfigurationError(f"min_sep must lie in (0, 1), got {min_sep}")
    if int(count) != count or count < 1:
        raise ConfigurationError(f"count must be a positive integer, got {count}")
    if not 0 < max_radius < 1:
        raise ConfigurationError(f"max_radius must lie in (0, 1), got {max_radius}")
    rng = np.random.default_rng(seed)
    pts = []
    for _ in range(budget):
        z = _sample_point(space, rng, max_radius).astype(CDTYPE)
        if pts:
            P = np.array(pts)
            d = _pseudo(space, P, np.broadcast_to(z, P.shape))
            if np.min(d) < min_sep:
                continue
        pts.append(z)
        if len(pts) == count:
            return PointSeq(space, np.array(pts))
    raise SaturationError(
        f"placed {len(pts)} of {count} points with separation {min_sep} after {budget} draws; "
        "reduce count or min_sep"
    )
