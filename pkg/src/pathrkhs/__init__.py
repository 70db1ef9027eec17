"""Gaussian-process path regularity via kernel spectra."""

__version__ = "0.1.0"

from .analysis import (EXISTS, INCONCLUSIVE, NOT_EXISTS, dominance_trace, estimate_decay,
                       finite_rank_difference, rkhs_path_verdict, summability_test,
                       tensor_verdict)
from .domain import Domain
from .kernels import (Kernel, add_finite_rank, make_brownian_bridge, make_circle_kernel,
                      make_fbm, make_matern, make_ou, make_riemann_liouville, make_wiener,
                      tensor)
from .quadrature import circle_uniform, gauss_legendre, tensor_rule, uniform_midpoint
from .reproduce import reproduce_paper_table
from .sampling import kl_sample, norm_stats
from .spectral import decompose, fft_spectrum, nystrom_decompose, nystrom_extend, power_kernel
from .specs import kernel_from_json

__all__ = [
    "EXISTS", "INCONCLUSIVE", "NOT_EXISTS", "Domain", "Kernel", "add_finite_rank",
    "circle_uniform", "decompose", "dominance_trace", "estimate_decay", "fft_spectrum",
    "finite_rank_difference", "gauss_legendre", "kernel_from_json", "kl_sample",
    "make_brownian_bridge", "make_circle_kernel", "make_fbm", "make_matern", "make_ou",
    "make_riemann_liouville", "make_wiener", "norm_stats", "nystrom_decompose",
    "nystrom_extend", "power_kernel", "reproduce_paper_table", "rkhs_path_verdict",
    "summability_test", "tensor", "tensor_rule", "tensor_verdict", "uniform_midpoint",
]
