"""Grammians, spectral frame bounds, dual systems and the extension operator.

For a finite sequence S the pairing matrix

    M[c, b] = <k_{c,p}, k_{b,p'}> = conj(G[b, c])

determines the dual system rho_a = sum_c A[c, a] k_{c,p} through
M^T A = I, and the extension operator E(lam) = sum_a lam_a rho_a has
coefficients A @ lam in the basis k_{c,p}.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DegenerateConfigurationError, EmptySequenceError, WrongMethodError
from .kernels import KernelCoeffs, chi_values, gram_matrix_entries
from .quadrature import QuadratureGrid, build_grid, lq_norm, synthesis_matrix
from .spaces import RDTYPE, PointSeq, Space

CONDITION_LIMIT = 1e12

EIGEN2 = "Eigen2"
OPTIMIZED = "Optimized"


@dataclass
class FrameReport:
    """Lower/upper synthesis constants of the normalized kernels.

    ``Optimized`` reports are inner estimates: the reported upper never
    exceeds the true constant and the reported lower is never below it.
    """

    lower: float
    upper: float
    method: str
    restarts_used: int = 0
    iterations: int = 0
    converged: bool = True
    reference: Optional["FrameReport"] = None

    def to_dict(self) -> dict:
        d = {
            "lower": self.lower,
            "upper": self.upper,
            "method": self.method,
            "restarts_used": self.restarts_used,
            "iterations": self.iterations,
            "converged": self.converged,
        }
        if self.reference is not None:
            d["reference"] = self.reference.to_dict()
        return d


@dataclass
class GramMatrix:
    space: Space
    p: float
    seq: PointSeq
    entries: np.ndarray

    def __len__(self):
        return len(self.entries)


@dataclass
class DualSystem:
    """rho_a = sum_c dual_coeffs[c, a] k_{c,p}."""

    space: Space
    p: float
    seq: PointSeq
    dual_coeffs: np.ndarray
    pairing: np.ndarray
    condition: float
    norms: Optional[np.ndarray] = field(default=None)

    def biorthogonality_residual(self) -> float:
        N = len(self.seq)
        return float(np.max(np.abs(self.pairing.T @ self.dual_coeffs - np.eye(N))))


def _require_points(seq: PointSeq):
    if len(seq) == 0:
        raise EmptySequenceError("sequence is empty")


def build_gram(space: Space, p: float, seq: PointSeq) -> GramMatrix:
    _require_points(seq)
    return GramMatrix(space, float(p), seq, gram_matrix_entries(space, p, seq.points))


def eigenvalues(G: GramMatrix) -> np.ndarray:
    if G.p != 2:
        raise WrongMethodError("eigenvalues are only meaningful for the Hermitian p = 2 Grammian")
    H = (G.entries + G.entries.conj().T) / 2
    return np.linalg.eigvalsh(H)


def spectral_bounds(G: GramMatrix) -> FrameReport:
    """Exact besselian/hilbertian constants of {k_{a,2}}: sqrt of the extreme eigenvalues."""
    if G.p != 2:
        raise WrongMethodError(
            f"spectral bounds need p = 2 (got p = {G.p}); use rkinterp.frame.frame_bounds"
        )
    lam = eigenvalues(G)
    return FrameReport(
        lower=float(np.sqrt(max(lam[0], 0.0))),
        upper=float(np.sqrt(max(lam[-1], 0.0))),
        method=EIGEN2,
    )


def pairing_matrix(space: Space, p: float, seq: PointSeq) -> np.ndarray:
    """M[c, b] = <k_{c,p}, k_{b,p'}>."""
    return gram_matrix_entries(space, p, seq.points).conj().T


def _checked_solve(M: np.ndarray, rhs: np.ndarray, what: str):
    cond = float(np.linalg.cond(M))
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise DegenerateConfigurationError(
            f"{what} is numerically singular (condition number {cond:.3e} > {CONDITION_LIMIT:.0e})",
            condition=cond,
        )
    return np.linalg.solve(M, rhs), cond


def dual_system(space: Space, p: float, seq: PointSeq, grid: Optional[QuadratureGrid] = None,
                resolution: Optional[int] = None) -> DualSystem:
    """Biorthogonal system {rho_a} inside span{k_{a,p}}.

    When ``grid`` (or ``resolution``) is given, the p-norms of the rho_a are
    also computed by quadrature (dual-boundedness diagnostic).
    """
    _require_points(seq)
    p = float(p)
    M = pairing_matrix(space, p, seq)
    A, cond = _checked_solve(M.T, np.eye(len(seq), dtype=np.complex128), "pairing matrix")
    ds = DualSystem(space, p, seq, A, M, cond)
    if grid is None and resolution is not None:
        grid = build_grid(space, resolution)
    if grid is not None:
        K = synthesis_matrix(space, p, seq, grid)
        vals = K @ A
        ds.norms = np.array([lq_norm(vals[:, a], grid.weights, p) for a in range(len(seq))])
    return ds


def min_norm_interpolant(space: Space, seq: PointSeq, target) -> tuple:
    """Minimal-H^2-norm f with <f, k_{a,2}> = target_a.

    The minimizer lies in span{k_{a,2}}; its coefficients c solve
    sum_a c_a G[a, b] = target_b.  Returns (KernelCoeffs, norm).
    """
    _require_points(seq)
    lam = np.asarray(target, dtype=np.complex128).reshape(-1)
    if len(lam) != len(seq):
        raise ValueError(f"{len(lam)} target values for {len(seq)} points")
    G = gram_matrix_entries(space, 2.0, seq.points)
    c, _ = _checked_solve(G.T, lam, "Grammian")
    norm_sq = np.real(np.vdot(c, G.T @ c))
    return KernelCoeffs(space, 2.0, seq, c), float(np.sqrt(max(norm_sq, 0.0)))


def extension_coeffs(ds: DualSystem, lam) -> KernelCoeffs:
    lam = np.asarray(lam, dtype=np.complex128).reshape(-1)
    if len(lam) != len(ds.seq):
        raise ValueError(f"lambda has length {len(lam)}, expected {len(ds.seq)}")
    return KernelCoeffs(ds.space, ds.p, ds.seq, ds.dual_coeffs @ lam)


def apply_extension(ds: DualSystem, lam, z) -> complex:
    """E(lam)(z) = sum_a lam_a rho_a(z)."""
    return extension_coeffs(ds, lam)(z)


def pairing_with_kernels(f: KernelCoeffs) -> np.ndarray:
    """<f, k_{b,p'}> for each point b of f.seq, by exact pairing algebra."""
    return pairing_matrix(f.space, f.p, f.seq).T @ f.coeffs


def restrict(space: Space, p: float, seq: PointSeq, func: Callable) -> np.ndarray:
    """Restriction operator: <f, k_{a,p'}> = chi_a^(1/p) f(a)."""
    values = np.asarray(func(seq.points.astype(np.complex128)), dtype=np.complex128)
    scale = (chi_values(space, seq.points) ** (RDTYPE(1) / RDTYPE(p))).astype(np.float64)
    return scale * values


def project(ds: DualSystem, func: Callable) -> KernelCoeffs:
    """P f = E({<f, k_{a,p'}>}), a projection onto span{k_{a,p}}."""
    return extension_coeffs(ds, restrict(ds.space, ds.p, ds.seq, func))


def idempotence_residual(ds: DualSystem, probes: int, seed: int) -> float:
    """max |P(P f) - P f| over ``probes`` random kernel combinations f.

    Each f combines two normalized kernels at random points of the domain
    (independent of S); residuals are measured on the coefficients in the
    basis k_{c,p}, relative to the size of P f.
    """
    rng = np.random.default_rng(seed)
    n = ds.space.n
    worst = 0.0
    for _ in range(probes):
        v = rng.standard_normal((2, n)) + 1j * rng.standard_normal((2, n))
        v *= (0.9 * rng.uniform(0, 1, (2, 1))) / np.linalg.norm(v, axis=1, keepdims=True)
        f = KernelCoeffs(ds.space, ds.p, PointSeq(ds.space, v), rng.standard_normal(2) + 0j)
        once = project(ds, f)
        twice = project(ds, once)
        scale = max(1.0, float(np.max(np.abs(once.coeffs))))
        worst = max(worst, float(np.max(np.abs(twice.coeffs - once.coeffs))) / scale)
    return worst


def random_unit_vectors(N: int, count: int, q: float, rng: np.random.Generator) -> np.ndarray:
    """``count`` complex Gaussian vectors normalized in l^q, shape (count, N)."""
    V = rng.standard_normal((count, N)) + 1j * rng.standard_normal((count, N))
    norms = np.sum(np.abs(V) ** q, axis=1) ** (1.0 / q)
    return V / norms[:, None]


def extension_norm_estimate(ds: DualSystem, grid: QuadratureGrid, trials: int, seed: int) -> float:
    """Lower estimate of the l^p -> L^p norm of the extension operator.

    Maximum of ||E(lam)||_p over the canonical basis and ``trials`` seeded
    random unit vectors; nondecreasing in ``trials``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    N = len(ds.seq)
    K = synthesis_matrix(ds.space, ds.p, ds.seq, grid) @ ds.dual_coeffs
    best = max(lq_norm(K[:, a], grid.weights, ds.p) for a in range(N))
    rng = np.random.default_rng(seed)
    for lam in random_unit_vectors(N, trials, ds.p, rng):
        best = max(best, lq_norm(K @ lam, grid.weights, ds.p))
    return float(best)
