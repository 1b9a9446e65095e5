"""Reproducing kernels, Gram matrices and interpolation diagnostics for
Hardy and weighted Bergman spaces on the disc, polydisc and ball."""

__version__ = "0.1.0"

from .spaces import (BergmanBall, HardyBall, HardyDisc, HardyPolydisc, PointSeq, Space, make_sequence,
                     point_in_domain, pseudohyperbolic_distance)
from .kernels import chi, conjugate_exponent, eval_kernel, eval_normalized_kernel, gram_entry
from .quadrature import QuadratureGrid, build_grid, graded_grid, norm_gradient, space_norm
from .gram import (DualSystem, FrameReport, apply_extension, build_gram, dual_system, eigenvalues,
                   min_norm_interpolant, spectral_bounds)
from .frame import OptimizerConfig, frame_bounds, grammian_lower_bound
from .carleson import CarlesonReport, box_constant, delta_product
from .subordination import LiftMap, embed_point, kernel_agreement_check, lift_norm_ratio
from .seqgen import (DensityEstimate, LatticeParams, density_estimate, diagonal_embed, radial_geometric,
                     random_separated, seip_lattice)

__all__ = [
    "__version__",
    "BergmanBall",
    "HardyBall",
    "HardyDisc",
    "HardyPolydisc",
    "PointSeq",
    "Space",
    "make_sequence",
    "point_in_domain",
    "pseudohyperbolic_distance",
    "chi",
    "conjugate_exponent",
    "eval_kernel",
    "eval_normalized_kernel",
    "gram_entry",
    "QuadratureGrid",
    "build_grid",
    "graded_grid",
    "norm_gradient",
    "space_norm",
    "DualSystem",
    "FrameReport",
    "apply_extension",
    "build_gram",
    "dual_system",
    "eigenvalues",
    "min_norm_interpolant",
    "spectral_bounds",
    "OptimizerConfig",
    "frame_bounds",
    "grammian_lower_bound",
    "CarlesonReport",
    "box_constant",
    "delta_product",
    "LiftMap",
    "embed_point",
    "kernel_agreement_check",
    "lift_norm_ratio",
    "DensityEstimate",
    "LatticeParams",
    "density_estimate",
    "diagonal_embed",
    "radial_geometric",
    "random_separated",
    "seip_lattice",
]
