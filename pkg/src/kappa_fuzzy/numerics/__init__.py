"""Dense linear algebra, quadrature, finite differences and the DFT."""
from .finite_diff import fin_diff, stencil_weights
from .fourier import (derivative_matrix, dft, spectral_derivative, spectral_shift,
                      trig_interpolate, wavenumbers)
from .linalg import (EigResult, LstsqInfo, as_matrix, eig_general, eig_hermitian, expm,
                     hessenberg, pinv_least_squares, schur)
from .quadrature import (Quadrature, gauss_legendre, half_line_rule, quad_integrate,
                         trapezoid_rule)

__all__ = [
    "EigResult", "LstsqInfo", "Quadrature", "as_matrix", "derivative_matrix", "dft",
    "eig_general", "eig_hermitian", "expm", "fin_diff", "gauss_legendre",
    "half_line_rule", "hessenberg", "pinv_least_squares", "quad_integrate", "schur",
    "spectral_derivative", "spectral_shift", "stencil_weights", "trapezoid_rule",
    "trig_interpolate", "wavenumbers",
]
