"""The group R^D_kappa: elements, Haar data and the group algebra."""
from .algebra import GridFunction, convolve, involution
from .elements import (ExpElement, HaarData, SplitElement, exp_multiply_arrays,
                       exp_to_split_arrays, from_split, inverse, modular, multiply_exp,
                       multiply_split, phi, split_inverse_arrays, split_multiply_arrays,
                       split_to_exp_arrays, to_split)

__all__ = [
    "ExpElement", "GridFunction", "HaarData", "SplitElement", "convolve",
    "exp_multiply_arrays", "exp_to_split_arrays", "from_split", "involution", "inverse",
    "modular", "multiply_exp", "multiply_split", "phi", "split_inverse_arrays",
    "split_multiply_arrays", "split_to_exp_arrays", "to_split",
]
