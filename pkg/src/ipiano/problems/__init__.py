"""Benchmark objectives: 2-D toy, filter-bank denoising, mask optimization."""

from .toy import ToyProblem, toy_f_grad, toy_objective, toy_stationary_points
from .mrf import (ConvBank, MRFModel, dct_filter_bank, default_mrf_model,
                  mrf_f_grad, mrf_lipschitz_bound, mrf_objective)
from .compression import (CompressionModel, compression_f_grad,
                          compression_objective, compression_reconstruct,
                          mask_density, mse)
from .images import (GaussianNoise, SaltPepperNoise, add_noise, read_image,
                     read_pgm, synthetic_image, write_image, write_pgm)

__all__ = [
    "ToyProblem", "toy_f_grad", "toy_objective", "toy_stationary_points",
    "ConvBank", "MRFModel", "dct_filter_bank", "default_mrf_model",
    "mrf_f_grad", "mrf_lipschitz_bound", "mrf_objective",
    "CompressionModel", "compression_f_grad", "compression_objective",
    "compression_reconstruct", "mask_density", "mse",
    "GaussianNoise", "SaltPepperNoise", "add_noise", "read_image",
    "read_pgm", "synthetic_image", "write_image", "write_pgm",
]
