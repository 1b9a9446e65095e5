"""Domains, points and the pseudohyperbolic metric.

Points are stored in numpy extended precision (``clongdouble``).  Sequences
such as ``1 - 2**-k`` for ``k`` up to 60 are not representable in binary64
(they round to 1.0), while every closed-form quantity used downstream only
needs ``1 - |a|**2`` and ``1 - conj(a).z`` to a few digits.  On platforms
where ``longdouble`` is plain binary64 this degrades gracefully to double
precision.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionError, DomainError

CDTYPE = np.clongdouble
RDTYPE = np.longdouble

HARDY_DISC = "HardyDisc"
HARDY_POLYDISC = "HardyPolydisc"
HARDY_BALL = "HardyBall"
BERGMAN_BALL = "BergmanBall"
KINDS = (HARDY_DISC, HARDY_POLYDISC, HARDY_BALL, BERGMAN_BALL)


@dataclass(frozen=True)
class Space:
    """A function space on the disc, the polydisc D^n or the ball B_n.

    ``k`` is the exponent of the weight (1 - |z|^2)^k and is only
    meaningful for ``BergmanBall``.
    """

    kind: str
    n: int = 1
    k: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown space kind {self.kind!r}")
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"dimension must be a positive integer, got {self.n}")
        if int(self.k) != self.k or self.k < 0:
            raise DomainError(f"weight exponent must be a nonnegative integer, got {self.k}")
        if self.kind == HARDY_DISC and self.n != 1:
            raise DomainError("HardyDisc has dimension 1")
        if self.kind != BERGMAN_BALL and self.k != 0:
            raise DomainError("only BergmanBall carries a weight exponent")

    @property
    def is_polydisc(self) -> bool:
        return self.kind in (HARDY_DISC, HARDY_POLYDISC)

    @property
    def is_ball(self) -> bool:
        return self.kind in (HARDY_BALL, BERGMAN_BALL)

    @property
    def kernel_power(self) -> int:
        """Exponent m in k_a(z) = 1/(1 - conj(a).z)^m (per factor for the polydisc)."""
        if self.kind == BERGMAN_BALL:
            return self.n + self.k + 1
        if self.kind == HARDY_BALL:
            return self.n
        return 1

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.kind != HARDY_DISC:
            d["n"] = self.n
        if self.kind == BERGMAN_BALL:
            d["k"] = self.k
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Space":
        return cls(d["kind"], int(d.get("n", 1)), int(d.get("k", 0)))

    def __str__(self):
        if self.kind == HARDY_DISC:
            return "HardyDisc"
        if self.kind == BERGMAN_BALL:
            return f"BergmanBall(n={self.n},k={self.k})"
        return f"{self.kind}(n={self.n})"


def HardyDisc() -> Space:
    return Space(HARDY_DISC)


def HardyPolydisc(n: int) -> Space:
    return Space(HARDY_POLYDISC, n)


def HardyBall(n: int) -> Space:
    return Space(HARDY_BALL, n)


def BergmanBall(n: int, k: int = 0) -> Space:
    return Space(BERGMAN_BALL, n, k)


def as_point(space: Space, a) -> np.ndarray:
    """Coerce ``a`` to a 1-D extended-precision coordinate array."""
    arr = np.atleast_1d(np.asarray(a, dtype=CDTYPE))
    if arr.ndim != 1 or arr.shape[0] != space.n:
        raise DimensionError(space.n, arr.shape[-1] if arr.ndim else 0)
    return arr


def sq_norm(a: np.ndarray) -> np.ndarray:
    """|a|^2 along the last axis, in the input precision."""
    return np.sum(a.real * a.real + a.imag * a.imag, axis=-1)


def point_in_domain(space: Space, a) -> bool:
    a = as_point(space, a)
    if space.is_polydisc:
        return bool(np.all(np.abs(a) < 1))
    return bool(sq_norm(a) < 1)


def _in_closed_domain(space: Space, z: np.ndarray, slack: float = 1e-12) -> np.ndarray:
    if space.is_polydisc:
        return np.all(np.abs(z) <= 1 + slack, axis=-1)
    return sq_norm(z) <= 1 + slack


def check_points(space: Space, pts, closed: bool = False) -> np.ndarray:
    """Validate an array of points of shape (N, n); returns it as ``CDTYPE``."""
    arr = np.asarray(pts, dtype=CDTYPE)
    if arr.ndim == 1:
        arr = arr.reshape(-1, space.n) if space.n > 1 or arr.size == 0 else arr[:, None]
    if arr.ndim != 2 or arr.shape[1] != space.n:
        raise DimensionError(space.n, arr.shape[-1])
    if closed:
        ok = _in_closed_domain(space, arr)
    elif space.is_polydisc:
        ok = np.all(np.abs(arr) < 1, axis=-1)
    else:
        ok = sq_norm(arr) < 1
    if not np.all(ok):
        bad = int(np.flatnonzero(~ok)[0])
        raise DomainError(f"point #{bad} = {arr[bad]} lies outside {space}")
    return arr


@dataclass
class PointSeq:
    """A finite ordered sequence of distinct points of ``space``."""

    space: Space
    points: np.ndarray
    labels: Optional[list] = field(default=None)

    def __post_init__(self):
        self.points = check_points(self.space, self.points)
        if self.labels is not None and len(self.labels) != len(self.points):
            raise DomainError("labels and points differ in length")
        if len(self.points) > 1:
            # exact coordinate equality only; near-coincidence is left to conditioning checks
            view = np.ascontiguousarray(self.points).view(np.dtype((np.void, self.points.dtype.itemsize * self.space.n)))
            if len(np.unique(view)) != len(self.points):
                raise DomainError("sequence contains repeated points")

    def __len__(self):
        return len(self.points)

    def __getitem__(self, idx):
        return self.points[idx]

    def head(self, count: int) -> "PointSeq":
        labels = None if self.labels is None else self.labels[:count]
        return PointSeq(self.space, self.points[:count], labels)

    def with_space(self, space: Space) -> "PointSeq":
        return PointSeq(space, self.points, self.labels)

    def as_complex128(self) -> np.ndarray:
        return self.points.astype(np.complex128)


def make_sequence(space: Space, points: Sequence, labels=None) -> PointSeq:
    return PointSeq(space, points, labels)


def _disc_distance(a, b):
    num = np.abs(a - b)
    den = np.abs(1 - np.conj(a) * b)
    return num / den


def pseudohyperbolic_distance(space: Space, a, b) -> float:
    """|phi_a(b)| for the involution phi_a exchanging 0 and a.

    For the polydisc the maximum of the coordinatewise disc distances is
    returned.
    """
    a = as_point(space, a)
    b = as_point(space, b)
    check_points(space, np.stack([a, b]))
    return float(_pseudo(space, a[None, :], b[None, :])[0])


def _pseudo(space: Space, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Vectorised distance between matching rows (broadcasting allowed)."""
    if space.is_polydisc or space.n == 1:
        d = _disc_distance(A, B)
        return np.clip(np.max(d, axis=-1), 0, 1)
    inner = np.sum(np.conj(A) * B, axis=-1)
    one_minus = 1 - inner
    ratio = (1 - sq_norm(A)) * (1 - sq_norm(B)) / (one_minus.real ** 2 + one_minus.imag ** 2)
    d = np.sqrt(np.clip(1 - ratio, 0, 1))
    same = np.all(A == B, axis=-1)
    return np.where(same, 0, d)


def pairwise_distances(seq: PointSeq) -> np.ndarray:
    """Matrix of pseudohyperbolic distances, returned as float64."""
    P = seq.points
    return _pseudo(seq.space, P[:, None, :], P[None, :, :]).astype(np.float64)


def disc_automorphism(w: complex, theta: float = 0.0):
    """z -> e^{i theta} (w - z) / (1 - conj(w) z), an automorphism of the disc."""
    w = CDTYPE(w)
    rot = np.exp(1j * RDTYPE(theta)).astype(CDTYPE)

    def phi(z):
        z = np.asarray(z, dtype=CDTYPE)
        return rot * (w - z) / (1 - np.conj(w) * z)

    return phi
