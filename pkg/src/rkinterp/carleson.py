"""Carleson diagnostics for the atomic measure mu_S = sum_a chi_a delta_a.

Box families (all levels l = 0..depth, so families are nested in depth):

disc
    arcs Q of length h = 2*pi*2^-l starting at multiples of h, plus the
    same arcs shifted by h/2; T(Q) = {1 - |z| <= 2^-l, arg z in Q};
    capacity 2^-l.  Level 0 is the whole disc.
ball (Hardy and Bergman)
    Koranyi boxes {z : |1 - z.conj(zeta)| < h} with h = 2^(1-l) and
    capacity h^m, m = n for H^p(B_n) and m = n+k+1 for A_k^p(B_n).
    Centers: +-e_j, +-i e_j and the radial projections of the points.
polydisc
    products of disc boxes with independent levels per coordinate.  This
    is a necessary-only proxy: the true polydisc condition is over open
    sets, not rectangles.
"""

from dataclasses import dataclass
from itertools import product
from typing import Optional

import numpy as np

from .errors import ConfigurationError, ResourceGuardError, UnsupportedSpaceError
from .kernels import chi_values
from .spaces import HARDY_DISC, PointSeq, _disc_distance

MAX_DEPTH = 30
POLYDISC_NOTE = "product-box proxy: necessary condition only, strictly weaker than the polydisc Carleson condition"


@dataclass
class CarlesonReport:
    box_constant: float
    box_family_depth: int
    worst_box: dict
    family: str
    delta: Optional[float] = None
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "box_constant": self.box_constant,
            "box_family_depth": self.box_family_depth,
            "worst_box": self.worst_box,
            "family": self.family,
            "delta": self.delta,
            "note": self.note,
        }


def delta_product(seq: PointSeq) -> float:
    """inf_b prod_{a != b} |(a - b) / (1 - conj(a) b)| for a disc sequence."""
    if seq.space.kind != HARDY_DISC:
        raise UnsupportedSpaceError(f"the Carleson product is defined on the disc, not {seq.space}")
    z = seq.points[:, 0]
    if len(z) <= 1:
        return 1.0
    D = _disc_distance(z[:, None], z[None, :])
    np.fill_diagonal(D, 1)
    return float(np.min(np.prod(D, axis=1)))


def carleson_measure_weights(seq: PointSeq) -> np.ndarray:
    """Masses chi_a of mu_S, so that sum_a |<f, k_{a,p'}>|^p = int |f|^p dmu_S."""
    return chi_values(seq.space, seq.points).astype(np.float64)


def _grouped_max(keys: np.ndarray, weights: np.ndarray):
    """Largest weight sum over rows of ``keys`` sharing a value; (sum, representative index)."""
    _, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    sums = np.bincount(inverse.reshape(-1), weights=weights)
    j = int(np.argmax(sums))
    return float(sums[j]), int(first[j])


def _arc_keys(defect, angles, level, shift):
    """Arc index of each point at ``level`` (or -1 when outside the tent); ``defect`` is 1 - |z|."""
    h = 2.0 ** -level
    inside = defect <= h
    idx = np.floor((angles / (2 * np.pi) + shift * h) / h).astype(np.int64) % (2 ** level)
    return np.where(inside, idx, -1)


def _disc_family(z, w, depth):
    # 1 - |z| in extended precision, since |z| may round to 1 in double
    defect = (1 - np.abs(z)).astype(np.float64)
    angles = np.mod(np.angle(z.astype(np.complex128)), 2 * np.pi)
    best, box = 0.0, None
    for level in range(depth + 1):
        cap = 2.0 ** -level
        for shift in ((0.0,) if level == 0 else (0.0, 0.5)):
            keys = _arc_keys(defect, angles, level, shift)
            live = keys >= 0
            if not np.any(live):
                continue
            mass, rep = _grouped_max(keys[live][:, None], w[live])
            if mass / cap > best:
                j = int(keys[live][rep])
                h = 2 * np.pi * cap
                best = mass / cap
                box = {"level": level, "arc_start": (j - shift) * h, "arc_length": h, "capacity": cap}
    return best, box


def _polydisc_family(P, w, depth):
    n = P.shape[1]
    if (depth + 1) ** n * 2 ** n > 5_000_000:
        raise ResourceGuardError(f"polydisc box family with depth {depth} in dimension {n} is too large")
    defect = (1 - np.abs(P)).astype(np.float64)
    angles = np.mod(np.angle(P.astype(np.complex128)), 2 * np.pi)
    best, box = 0.0, None
    for levels in product(range(depth + 1), repeat=n):
        cap = float(np.prod([2.0 ** -l for l in levels]))
        shifts = [(0.0,) if l == 0 else (0.0, 0.5) for l in levels]
        for sh in product(*shifts):
            keys = np.stack([_arc_keys(defect[:, j], angles[:, j], levels[j], sh[j]) for j in range(n)], axis=1)
            live = np.all(keys >= 0, axis=1)
            if not np.any(live):
                continue
            mass, rep = _grouped_max(keys[live], w[live])
            if mass / cap > best:
                best = mass / cap
                box = {"levels": list(levels), "arc_index": keys[live][rep].tolist(), "shifts": list(sh), "capacity": cap}
    return best, box


def ball_centers(P: np.ndarray) -> np.ndarray:
    """Deterministic boundary net: +-e_j, +-i e_j and radial projections of the points."""
    n = P.shape[1]
    eye = np.eye(n, dtype=np.complex128)
    fixed = np.concatenate([eye, -eye, 1j * eye, -1j * eye])
    Pd = P.astype(np.complex128)
    r = np.sqrt(np.sum(np.abs(Pd) ** 2, axis=1))
    proj = Pd[r > 0] / r[r > 0, None]
    return np.concatenate([fixed, proj])


def _ball_family(P, w, depth, cap_power):
    centers = ball_centers(P)
    # |1 - z.conj(zeta)| for every point and center, in extended precision
    dist = np.abs(1 - P @ np.conj(centers.astype(P.dtype)).T).astype(np.float64)
    best, box = 0.0, None
    for level in range(depth + 1):
        h = 2.0 ** (1 - level)
        cap = h ** cap_power
        masses = (dist < h).T.astype(np.float64) @ w
        j = int(np.argmax(masses))
        if masses[j] / cap > best:
            best = masses[j] / cap
            c = centers[j]
            box = {"level": level, "center": [[float(x.real), float(x.imag)] for x in c], "size": h, "capacity": cap}
    return best, box


def box_constant(seq: PointSeq, depth: int, weights=None) -> CarlesonReport:
    """Max over the box family of mu(T(Q)) / cap(Q): a lower estimate of the Carleson constant."""
    if int(depth) != depth or depth < 1:
        raise ConfigurationError(f"depth must be a positive integer, got {depth}")
    if depth > MAX_DEPTH:
        raise ResourceGuardError(f"depth {depth} exceeds the limit {MAX_DEPTH}")
    space = seq.space
    w = carleson_measure_weights(seq) if weights is None else np.asarray(weights, dtype=np.float64)
    if len(w) != len(seq):
        raise ConfigurationError("one weight per point is required")
    delta = delta_product(seq) if space.kind == HARDY_DISC else None
    if len(seq) == 0:
        family = "disc-arcs" if space.kind == HARDY_DISC else ("polydisc-product" if space.is_polydisc else "koranyi")
        return CarlesonReport(0.0, int(depth), {}, family, delta,
                              POLYDISC_NOTE if family == "polydisc-product" else "")
    if space.kind == HARDY_DISC or (space.is_polydisc and space.n == 1):
        best, box = _disc_family(seq.points[:, 0], w, depth)
        return CarlesonReport(best, int(depth), box, "disc-arcs", delta)
    if space.is_polydisc:
        best, box = _polydisc_family(seq.points, w, depth)
        return CarlesonReport(best, int(depth), box, "polydisc-product", None, POLYDISC_NOTE)
    best, box = _ball_family(seq.points, w, depth, space.kernel_power)
    return CarlesonReport(best, int(depth), box, "koranyi", None)
