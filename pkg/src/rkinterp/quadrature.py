"""Tensor-product quadrature for Hardy boundary norms and Bergman volume norms.

All measures are normalized to total mass one.

Grids
-----
* circle: ``resolution`` equispaced angles (trapezoid rule).
* torus ``T^n``: tensor product of circle rules.
* sphere ``S^{2n-1}``: z_j = sqrt(s_j) e^{i t_j}; the angles use the circle
  rule and (s_1, ..., s_n), which is uniform on the simplex, is generated
  by stick breaking with Gauss-Jacobi nodes for the weights (1-u)^(n-1-j).
  For n = 2 this is the Hopf parametrisation with Gauss-Legendre in
  s_1 = |z_1|^2.
* Bergman ball: s = |z|^2 with Gauss-Jacobi weight (1-s)^k s^(n-1),
  tensored with the sphere rule.

Angular axes use ``resolution`` nodes; Gauss axes use ``radial`` nodes,
which defaults to ``max(4, resolution // 2)``.

Graded grids (``graded_grid``) serve sequences that approach the boundary:
the radial variable is split into dyadic panels 1 - s in [2^-(j+1), 2^-j]
and the angular count doubles from panel to panel, so a kernel at
distance delta from the boundary is resolved with about
``angular * 2^depth`` angles once 2^-depth <= delta.  The grid depends
only on ``depth`` (no a-posteriori refinement).
"""

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from numba import njit
from scipy.special import roots_jacobi, roots_legendre

from .errors import ConfigurationError, ResourceGuardError, UnsupportedExponentError
from .kernels import KernelCoeffs, normalized_kernel_matrix
from .spaces import BERGMAN_BALL, HARDY_BALL, PointSeq, Space, sq_norm

MIN_RESOLUTION = 4
MAX_NODES = 4_000_000
ZERO_CUTOFF = 1e-14


@dataclass
class QuadratureGrid:
    space: Space
    nodes: np.ndarray
    weights: np.ndarray
    resolution: tuple = field(default=())

    def __len__(self):
        return len(self.weights)


def circle_rule(m: int):
    theta = 2 * np.pi * np.arange(m) / m
    return np.exp(1j * theta), np.full(m, 1.0 / m)


def unit_interval_jacobi(m: int, alpha: float, beta: float = 0.0):
    """Nodes/weights on [0, 1] for the weight (1-u)^alpha u^beta, normalized to sum 1."""
    x, w = roots_jacobi(m, alpha, beta)
    u = (1 + x) / 2
    return u, w / w.sum()


def _tensor(*rules):
    """Tensor a list of 1-D (nodes, weights) pairs; returns flattened arrays."""
    grids = np.meshgrid(*[r[0] for r in rules], indexing="ij")
    wgrids = np.meshgrid(*[r[1] for r in rules], indexing="ij")
    nodes = [g.reshape(-1) for g in grids]
    weights = np.prod(np.stack([w.reshape(-1) for w in wgrids]), axis=0)
    return nodes, weights


def sphere_rule(n: int, angular: int, radial: int):
    """Points on S^{2n-1} in C^n with normalized surface weights."""
    circles = [circle_rule(angular) for _ in range(n)]
    sticks = [unit_interval_jacobi(radial, float(n - 1 - j)) for j in range(1, n)]
    parts, weights = _tensor(*(sticks + circles))
    us, phases = parts[: n - 1], parts[n - 1:]
    moduli_sq = []
    rest = np.ones_like(weights)
    for u in us:
        moduli_sq.append(rest * u)
        rest = rest * (1 - u)
    moduli_sq.append(rest)
    nodes = np.stack([np.sqrt(s) * e for s, e in zip(moduli_sq, phases)], axis=1)
    return nodes.astype(np.complex128), weights


def build_grid(space: Space, resolution: int, radial: Optional[int] = None) -> QuadratureGrid:
    """Deterministic quadrature grid for ``space``."""
    if int(resolution) != resolution or resolution < MIN_RESOLUTION:
        raise ConfigurationError(f"resolution must be an integer >= {MIN_RESOLUTION}, got {resolution}")
    resolution = int(resolution)
    radial = max(MIN_RESOLUTION, resolution // 2) if radial is None else int(radial)
    if radial < MIN_RESOLUTION:
        raise ConfigurationError(f"radial resolution must be >= {MIN_RESOLUTION}, got {radial}")
    n = space.n
    if space.is_polydisc:
        count = resolution ** n
    else:
        count = radial ** (n - 1) * resolution ** n * (radial if space.kind == BERGMAN_BALL else 1)
    if count > MAX_NODES:
        raise ResourceGuardError(f"a {space} grid at resolution {resolution} has {count} nodes (limit {MAX_NODES})")
    if space.is_polydisc:
        parts, weights = _tensor(*[circle_rule(resolution) for _ in range(n)])
        nodes = np.stack(parts, axis=1)
        return QuadratureGrid(space, nodes, weights, (resolution,) * n)
    if space.kind == BERGMAN_BALL:
        s, ws = unit_interval_jacobi(radial, float(space.k), float(n - 1))
        sph, wsph = sphere_rule(n, resolution, radial)
        nodes = (np.sqrt(s)[:, None, None] * sph[None, :, :]).reshape(-1, n)
        weights = (ws[:, None] * wsph[None, :]).reshape(-1)
        return QuadratureGrid(space, nodes, weights, (radial,) + (radial,) * (n - 1) + (resolution,) * n)
    nodes, weights = sphere_rule(n, resolution, radial)
    return QuadratureGrid(space, nodes, weights, (radial,) * (n - 1) + (resolution,) * n)


def _legendre_panel(m: int, lo: float, hi: float):
    x, w = roots_legendre(m)
    return lo + (hi - lo) * (1 + x) / 2, w * (hi - lo) / 2


def _graded_radial(depth: int, panel: int, k: int):
    """Panels in s = |z|^2 for the normalized weight (k+1)(1-s)^k ds.

    Returns a list of (s nodes, weights, panel index); the last panel
    [1 - 2^-depth, 1] uses Gauss-Jacobi so the endpoint weight is exact.
    """
    out = []
    for j in range(depth):
        s, w = _legendre_panel(panel, 1 - 2.0 ** -j, 1 - 2.0 ** -(j + 1))
        out.append((s, w * (k + 1) * (1 - s) ** k, j))
    # s = 1 - h u with u weighted by u^k
    h = 2.0 ** -depth
    u, wu = unit_interval_jacobi(panel + 2, 0.0, float(k))
    out.append((1 - h * u, wu * h ** (k + 1), depth))
    return out


def graded_depth(seq: PointSeq, margin: int = 1) -> int:
    """Smallest depth with 2^-depth below the largest boundary proximity, plus ``margin``."""
    defect = float(np.min(1 - np.sqrt(sq_norm(seq.points)))) if len(seq) else 0.5
    return max(1, int(np.ceil(np.log2(1.0 / max(defect, 1e-300))))) + margin


def graded_grid(space: Space, depth: int, angular: int = 16, panel: int = 4, transverse: int = 4) -> QuadratureGrid:
    """Boundary-graded grid for the disc, A_k^p(D) and H^p(B_2).

    * disc / one-dimensional polydisc: ``angular * 2^depth`` equispaced angles.
    * A_k^p(D): dyadic panels in s = |z|^2, panel j carrying
      ``angular * 2^min(j+1, depth)`` angles.
    * H^p(B_2): z = (sqrt(t) e^{i x}, sqrt(1-t) e^{i y}); t is graded like s
      (graded toward the circle |z_1| = 1), x like the Bergman angle and y
      uses ``transverse`` equispaced angles.
    """
    if int(depth) != depth or depth < 1:
        raise ConfigurationError(f"depth must be a positive integer, got {depth}")
    if angular < MIN_RESOLUTION or panel < 2 or transverse < 1:
        raise ConfigurationError("graded grids need angular >= 4, panel >= 2 and transverse >= 1")
    depth = int(depth)
    if space.is_polydisc and space.n == 1:
        e, w = circle_rule(angular * 2 ** depth)
        return QuadratureGrid(space, e[:, None], w, (angular * 2 ** depth,))
    if space.n != 1 and not (space.kind == HARDY_BALL and space.n == 2):
        raise ConfigurationError(f"graded grids are available for the disc and B_2, not {space}")
    k = space.k if space.kind == BERGMAN_BALL else 0
    nodes, weights = [], []
    for s, ws, j in _graded_radial(depth, panel, k):
        e, we = circle_rule(angular * 2 ** min(j + 1, depth))
        r = np.sqrt(s)
        if space.kind == BERGMAN_BALL:
            nodes.append((r[:, None] * e[None, :]).reshape(-1, 1))
            weights.append((ws[:, None] * we[None, :]).reshape(-1))
        else:
            f, wf = circle_rule(transverse)
            z1 = np.broadcast_to(r[:, None, None] * e[None, :, None], (len(s), len(e), len(f)))
            z2 = np.broadcast_to(np.sqrt(1 - s)[:, None, None] * f[None, None, :], z1.shape)
            nodes.append(np.stack([z1.reshape(-1), z2.reshape(-1)], axis=1))
            weights.append((ws[:, None, None] * we[None, :, None] * wf[None, None, :]).reshape(-1))
    res = (depth, angular, panel) if space.kind == BERGMAN_BALL else (depth, angular, panel, transverse)
    return QuadratureGrid(space, np.concatenate(nodes), np.concatenate(weights), res)


def _check_match(space: Space, grid: QuadratureGrid):
    if space != grid.space:
        raise ConfigurationError(f"function lives in {space} but the grid discretises {grid.space}")


def lq_norm(values: np.ndarray, weights: np.ndarray, q: float) -> float:
    """(sum_j w_j |v_j|^q)^(1/q)."""
    if q < 1:
        raise UnsupportedExponentError(f"norm exponent must be >= 1, got {q}")
    a = np.abs(values)
    scale = a.max() if a.size else 0.0
    if scale == 0:
        return 0.0
    return float(scale * np.dot(weights, (a / scale) ** q) ** (1.0 / q))


def function_norm(func: Union[Callable, np.ndarray], grid: QuadratureGrid, q: float) -> float:
    """Norm of an arbitrary function sampled on the grid nodes.

    ``func`` is either a callable taking the (M, n) node array or the
    precomputed values; this is the path used for monomials in tests.
    """
    values = func(grid.nodes) if callable(func) else np.asarray(func)
    return lq_norm(values, grid.weights, q)


def synthesis_matrix(space: Space, p: float, seq: PointSeq, grid: QuadratureGrid) -> np.ndarray:
    """Values of the normalized kernels k_{a,p} at the grid nodes, shape (M, N)."""
    _check_match(space, grid)
    return normalized_kernel_matrix(space, p, seq.points, grid.nodes)


def evaluate_on_grid(f: KernelCoeffs, grid: QuadratureGrid) -> np.ndarray:
    return synthesis_matrix(f.space, f.p, f.seq, grid) @ f.coeffs


def space_norm(f: KernelCoeffs, grid: QuadratureGrid, q: float) -> float:
    if not np.all(np.isfinite(f.coeffs)):
        raise ConfigurationError("coefficients must be finite")
    return lq_norm(evaluate_on_grid(f, grid), grid.weights, q)


def lq_norm_gradient(K: np.ndarray, coeffs: np.ndarray, weights: np.ndarray, q: float):
    """Value and packed gradient of mu -> (sum_j w_j |(K mu)_j|^q)^(1/q).

    The gradient is returned as d/dRe(mu_a) + i d/dIm(mu_a).  Nodes where
    |K mu| < 1e-14 contribute nothing.
    """
    if not q > 1:
        raise UnsupportedExponentError(f"gradient needs q > 1, got {q}")
    f = K @ coeffs
    a = np.abs(f)
    F = float(np.dot(weights, a ** q))
    if F == 0.0:
        return 0.0, np.zeros(K.shape[1], dtype=np.complex128)
    value = F ** (1.0 / q)
    live = a >= ZERO_CUTOFF
    phi = np.zeros_like(f)
    phi[live] = weights[live] * a[live] ** (q - 2) * f[live]
    grad = (K.conj().T @ phi) * F ** (1.0 / q - 1.0)
    return value, grad


def norm_gradient(f: KernelCoeffs, grid: QuadratureGrid, q: float) -> np.ndarray:
    """Gradient of ``space_norm(f, grid, q)`` with respect to the coefficients.

    Packed as complex numbers: real part is the derivative along Re(coeff),
    imaginary part the derivative along Im(coeff).
    """
    if not q > 1:
        raise UnsupportedExponentError(f"gradient needs q > 1, got {q}")
    K = synthesis_matrix(f.space, f.p, f.seq, grid)
    return lq_norm_gradient(K, f.coeffs, grid.weights, q)[1]


class DenseSynthesis:
    """mu -> ||K mu||_{L^q(w)} for a sampled synthesis matrix ``K``."""

    def __init__(self, K: np.ndarray, weights: np.ndarray, q: float):
        self.K = np.ascontiguousarray(K, dtype=np.complex128)
        self.weights = np.asarray(weights, dtype=np.float64)
        self.q = float(q)
        self.N = self.K.shape[1]

    def value_and_grad(self, mu):
        return lq_norm_gradient(self.K, mu, self.weights, self.q)


@njit(cache=True, fastmath=True)
def _divided_difference_sums(g, dg, zeta, recip, w, q, cutoff):
    """Phi = sum_ij w_i w_j |F_ij|^q for F_ij = (g_i - g_j)/(zeta_i - zeta_j), F_ii = dg_i.

    ``zeta`` are the m-th roots of unity and recip[k] = 1/(1 - zeta_k), so
    1/(zeta_i - zeta_j) = conj(zeta_i) recip[j - i].  Also returns
    r_i = sum_j phi_ij / conj(zeta_i - zeta_j) and the diagonal phi_ii, where
    phi_ij = w_i w_j |F_ij|^(q-2) F_ij.
    """
    M = g.shape[0]
    phi_total = 0.0
    r = np.zeros(M, dtype=np.complex128)
    diag = np.zeros(M, dtype=np.complex128)
    e = 0.5 * q - 1.0
    c2 = cutoff * cutoff
    for i in range(M):
        F = dg[i]
        a2 = F.real * F.real + F.imag * F.imag
        if a2 > c2:
            t = w[i] * w[i] * np.exp(e * np.log(a2))
            phi_total += t * a2
            diag[i] = t * F
        zi = zeta[i].conjugate()
        gi = g[i]
        acc = 0j
        for j in range(i + 1, M):
            inv = zi * recip[j - i]
            F = (gi - g[j]) * inv
            a2 = F.real * F.real + F.imag * F.imag
            if a2 > c2:
                t = w[i] * w[j] * np.exp(e * np.log(a2))
                phi_total += 2.0 * t * a2
                d = t * F * inv.conjugate()
                acc += d
                r[j] -= d
        r[i] += acc
    return phi_total, r, diag


class DiagonalTorusSynthesis:
    """mu -> ||sum_a mu_a k_{(a,a),p}||_{L^q(T^2)} for diagonal bidisc points.

    With u_a(z) = 1/(1 - conj(a) z) and v_a(z) = z u_a(z),

        u_a(z) u_a(w) = (v_a(z) - v_a(w)) / (z - w),

    so every combination of diagonal kernels is the divided difference of a
    one-variable function g.  Sampling g on ``m`` equispaced boundary
    angles gives the m x m tensor trapezoid rule at O(m N + m^2) cost per
    evaluation instead of O(m^2 N).
    """

    def __init__(self, p: float, seq: PointSeq, m: int, q: float):
        from .kernels import chi_values, conjugate_exponent
        if not (seq.space.is_polydisc and seq.space.n == 2):
            raise ConfigurationError(f"diagonal synthesis needs bidisc points, not {seq.space}")
        P = seq.points
        if np.any(P[:, 0] != P[:, 1]):
            raise ConfigurationError("points must lie on the diagonal {(a, a)}")
        if int(m) != m or m < MIN_RESOLUTION:
            raise ConfigurationError(f"resolution must be an integer >= {MIN_RESOLUTION}, got {m}")
        pc = conjugate_exponent(p)
        c = (chi_values(seq.space, P) ** (1 / np.longdouble(pc))).astype(np.float64)
        a = P[:, 0].astype(np.complex128)
        self.zeta, w = circle_rule(int(m))
        self.recip = np.zeros(int(m), dtype=np.complex128)
        self.recip[1:] = 1.0 / (1.0 - self.zeta[1:])
        u = 1.0 / (1.0 - np.conj(a)[None, :] * self.zeta[:, None])
        self.V = np.ascontiguousarray(c[None, :] * self.zeta[:, None] * u)
        self.U2 = np.ascontiguousarray(c[None, :] * u * u)
        self.w = w
        self.q = float(q)
        self.N = len(a)

    def value_and_grad(self, mu):
        if not self.q > 1:
            raise UnsupportedExponentError(f"gradient needs q > 1, got {self.q}")
        g = self.V @ mu
        dg = self.U2 @ mu
        total, r, diag = _divided_difference_sums(g, dg, self.zeta, self.recip, self.w, self.q, ZERO_CUTOFF)
        if total == 0.0:
            return 0.0, np.zeros(self.N, dtype=np.complex128)
        grad = (2 * (self.V.conj().T @ r) + self.U2.conj().T @ diag) * total ** (1.0 / self.q - 1.0)
        return total ** (1.0 / self.q), grad
