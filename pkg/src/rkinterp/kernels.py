"""Reproducing kernels, the chi normalizer and Gram entries.

Conventions
-----------
* Polydisc ``D^n``:  k_a(z) = prod_j 1 / (1 - conj(a_j) z_j)
* Hardy ball ``B_n``: k_a(z) = 1 / (1 - conj(a).z)^n
* Bergman ball ``A_k``: k_a(z) = 1 / (1 - conj(a).z)^(n+k+1)

``chi(a) = 1 / k_a(a)`` and the normalized kernel is
``k_{a,p} = chi(a)^(1/p') k_a``, which has unit norm when p = 2.  Measures
are normalized to total mass one, so ``<k_a, k_b> = k_a(b)`` exactly.
"""

from dataclasses import dataclass

import numpy as np

from .errors import SingularityError, UnsupportedExponentError
from .spaces import CDTYPE, RDTYPE, PointSeq, Space, as_point, check_points, sq_norm

POLE_EPS = 1e-300


def conjugate_exponent(p: float) -> float:
    """p' with 1/p + 1/p' = 1."""
    p = float(p)
    if not p > 1:
        raise UnsupportedExponentError(f"exponent must satisfy p > 1, got {p}")
    return p / (p - 1.0)


@dataclass
class KernelCoeffs:
    """f = sum_a coeffs[a] * k_{a,p} for the points of ``seq``."""

    space: Space
    p: float
    seq: PointSeq
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=np.complex128).reshape(-1)
        if len(self.coeffs) != len(self.seq):
            raise ValueError(f"{len(self.coeffs)} coefficients for {len(self.seq)} points")
        conjugate_exponent(self.p)

    def __call__(self, z) -> np.ndarray:
        Z = np.asarray(z)
        single = Z.ndim == 1 and self.space.n > 1 or Z.ndim == 0
        Z = check_points(self.space, np.atleast_1d(Z) if Z.ndim == 0 else Z, closed=True)
        vals = normalized_kernel_matrix(self.space, self.p, self.seq.points, Z) @ self.coeffs
        return vals[0] if single else vals


def _factors(space: Space, A: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """1 - conj(a).z (ball) or the per-coordinate factors (polydisc).

    ``A`` has shape (N, n) and ``Z`` shape (M, n); the result is (N, M) for
    the ball and (N, M, n) for the polydisc.
    """
    if space.is_polydisc:
        return 1 - np.conj(A)[:, None, :] * Z[None, :, :]
    return 1 - np.conj(A) @ Z.T


def kernel_matrix(space: Space, A, Z) -> np.ndarray:
    """K[i, j] = k_{A_i}(Z_j), evaluated in the precision of the inputs."""
    A = np.asarray(A)
    Z = np.asarray(Z)
    w = _factors(space, A, Z)
    if np.any(np.abs(w) < POLE_EPS):
        raise SingularityError("kernel pole: 1 - conj(a).z vanishes")
    if space.is_polydisc:
        return 1 / np.prod(w, axis=-1)
    return w ** (-space.kernel_power)


def chi_values(space: Space, A) -> np.ndarray:
    """Vectorised chi over the rows of ``A`` (returns the input real precision)."""
    A = np.asarray(A)
    if space.is_polydisc:
        return np.prod(1 - (A.real * A.real + A.imag * A.imag), axis=-1)
    return (1 - sq_norm(A)) ** space.kernel_power


def eval_kernel(space: Space, a, z) -> complex:
    a = check_points(space, as_point(space, a)[None, :])
    z = check_points(space, as_point(space, z)[None, :], closed=True)
    return complex(kernel_matrix(space, a, z)[0, 0])


def chi(space: Space, a) -> float:
    a = check_points(space, as_point(space, a)[None, :])
    return float(chi_values(space, a)[0])


def normalized_kernel_matrix(space: Space, p: float, A, Z) -> np.ndarray:
    """K[j, i] = k_{A_i, p}(Z_j) as complex128 (rows are evaluation points)."""
    pc = conjugate_exponent(p)
    A = np.asarray(A, dtype=CDTYPE)
    scale = chi_values(space, A) ** (RDTYPE(1) / RDTYPE(pc))
    if np.iscomplexobj(Z) and np.asarray(Z).dtype == np.complex128:
        # evaluation nodes already at double precision: work in double for speed
        K = kernel_matrix(space, A.astype(np.complex128), np.asarray(Z))
        return (K * scale.astype(np.float64)[:, None]).T
    K = kernel_matrix(space, A, np.asarray(Z, dtype=CDTYPE))
    return (K * scale[:, None]).T.astype(np.complex128)


def eval_normalized_kernel(space: Space, p: float, a, z) -> complex:
    a = check_points(space, as_point(space, a)[None, :])
    z = check_points(space, as_point(space, z)[None, :], closed=True)
    return complex(normalized_kernel_matrix(space, p, a, z)[0, 0])


def gram_matrix_entries(space: Space, p: float, A, B=None) -> np.ndarray:
    """G[i, j] = <k_{A_i,p'}, k_{B_j,p}> = chi_i^(1/p) chi_j^(1/p') k_{A_i}(B_j)."""
    pc = conjugate_exponent(p)
    A = np.asarray(A, dtype=CDTYPE)
    B = A if B is None else np.asarray(B, dtype=CDTYPE)
    left = chi_values(space, A) ** (RDTYPE(1) / RDTYPE(p))
    right = chi_values(space, B) ** (RDTYPE(1) / RDTYPE(pc))
    G = left[:, None] * kernel_matrix(space, A, B) * right[None, :]
    return G.astype(np.complex128)


def gram_entry(space: Space, p: float, a, b) -> complex:
    a = check_points(space, as_point(space, a)[None, :])
    b = check_points(space, as_point(space, b)[None, :])
    return complex(gram_matrix_entries(space, p, a, b)[0, 0])
