"""Lifting A_k^p(B_n) to H^p(B_{n+k+1}) by zero padding.

A function f on B_n is lifted to f~(z, zeta) = f(z) on B_{n+k+1}.  With
normalized measures the push-forward of the sphere measure of
S^{2(n+k+1)-1} onto B_n is exactly the normalized weight (1-|z|^2)^k dm,
so the two norms agree for every exponent; the quadrature ratio below
measures the remaining discretization error.
"""

from dataclasses import dataclass

import numpy as np

from .carleson import box_constant
from .errors import UnsupportedSpaceError
from .kernels import KernelCoeffs, kernel_matrix
from .quadrature import build_grid, space_norm
from .spaces import BERGMAN_BALL, CDTYPE, HardyBall, PointSeq, Space, as_point, check_points


@dataclass(frozen=True)
class LiftMap:
    source: Space

    def __post_init__(self):
        if self.source.kind != BERGMAN_BALL:
            raise UnsupportedSpaceError(f"lifts start from a Bergman ball, not {self.source}")

    @property
    def target(self) -> Space:
        return HardyBall(self.source.n + self.source.k + 1)

    @property
    def padding(self) -> int:
        return self.source.k + 1


def embed_points(lift: LiftMap, P) -> np.ndarray:
    P = check_points(lift.source, P)
    return np.concatenate([P, np.zeros((len(P), lift.padding), dtype=CDTYPE)], axis=1)


def embed_point(lift: LiftMap, a) -> np.ndarray:
    """(a_1, ..., a_n) -> (a_1, ..., a_n, 0, ..., 0) in B_{n+k+1}."""
    return embed_points(lift, as_point(lift.source, a)[None, :])[0]


def embed_sequence(lift: LiftMap, seq: PointSeq) -> PointSeq:
    if seq.space != lift.source:
        raise UnsupportedSpaceError(f"sequence lives in {seq.space}, lift expects {lift.source}")
    return PointSeq(lift.target, embed_points(lift, seq.points), seq.labels)


def lift_coeffs(lift: LiftMap, f: KernelCoeffs) -> KernelCoeffs:
    """f~ in the target: same coefficients on the embedded kernels."""
    return KernelCoeffs(lift.target, f.p, embed_sequence(lift, f.seq), f.coeffs)


def kernel_agreement_check(lift: LiftMap, a, z) -> float:
    """|k_a(z) - k~_{a~}(z~)|, both being 1/(1 - conj(a).z)^(n+k+1)."""
    a = as_point(lift.source, a)[None, :]
    z = as_point(lift.source, z)[None, :]
    src = kernel_matrix(lift.source, check_points(lift.source, a), check_points(lift.source, z))
    tgt = kernel_matrix(lift.target, embed_points(lift, a), embed_points(lift, z))
    return float(np.abs(src - tgt)[0, 0])


def kernel_agreement_many(lift: LiftMap, A, Z) -> np.ndarray:
    """Discrepancies for matching rows of ``A`` and ``Z``."""
    A = check_points(lift.source, A)
    Z = check_points(lift.source, Z)
    src = np.array([kernel_matrix(lift.source, A[i:i + 1], Z[i:i + 1])[0, 0] for i in range(len(A))])
    tgt = np.array([kernel_matrix(lift.target, embed_points(lift, A[i:i + 1]), embed_points(lift, Z[i:i + 1]))[0, 0]
                    for i in range(len(A))])
    return np.abs(src - tgt).astype(np.float64)


def lift_norm_ratio(lift: LiftMap, f: KernelCoeffs, q: float, res: int, radial=None) -> float:
    """||f~||_{H^q(B_{n+k+1})} / ||f||_{A_k^q(B_n)}, both by quadrature."""
    if f.space != lift.source:
        raise UnsupportedSpaceError(f"f lives in {f.space}, lift expects {lift.source}")
    src = space_norm(f, build_grid(lift.source, res, radial), q)
    tgt = space_norm(lift_coeffs(lift, f), build_grid(lift.target, res, radial), q)
    return tgt / src


def lift_carleson_check(lift: LiftMap, seq: PointSeq, depth: int, weights=None) -> tuple:
    """Box constants of mu_S in the Bergman ball and of its extension by zero in the Hardy ball."""
    if seq.space != lift.source:
        raise UnsupportedSpaceError(f"sequence lives in {seq.space}, lift expects {lift.source}")
    source_report = box_constant(seq, depth, weights)
    target_report = box_constant(embed_sequence(lift, seq), depth, weights)
    return source_report, target_report
