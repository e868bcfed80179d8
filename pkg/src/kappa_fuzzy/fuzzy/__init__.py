"""Coherent states, dequantization, the star product and the fuzzy Laplacian."""
from .quantization import (BReport, ComderReport, QuantizeResult, b_operator, comder_check,
                           convergence_order, dequantize, hermite_probes, quantize_ls,
                           sampling_matrix, star)
from .spectrum import (ModeMatch, SpectralReport, ad, config_hash, default_lambda_grid,
                       fuzzy_laplacian, laplacian_action, mode_compare, spectral_report)
from .states import CoherentFamily, InitialState, coherent_state, group_action, radial_deviation

__all__ = [
    "BReport", "CoherentFamily", "ComderReport", "InitialState", "ModeMatch", "QuantizeResult",
    "SpectralReport", "ad", "b_operator", "coherent_state", "comder_check", "config_hash",
    "convergence_order", "default_lambda_grid", "dequantize", "fuzzy_laplacian",
    "group_action", "hermite_probes", "laplacian_action", "mode_compare", "quantize_ls",
    "radial_deviation", "sampling_matrix", "spectral_report", "star",
]
