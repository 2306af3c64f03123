"""Exact counting and uniform sampling of Young tableaux with walls.

Three independent counting routes are provided: closed-form formulas, a
brute-force linear-extension oracle for small shapes, and the density
method, which integrates a tower of exact polynomials block by block and
also drives the uniform sampler.
"""

from .density import (
    BlockSpec,
    DensityTower,
    count_fillings,
    derive_kernel,
    iterate_recurrence,
    load_tower,
    polyo_2nx3_block,
    save_tower,
)
from .errors import CapacityError, ConsistencyError, DensityError, UsageError, YoungWallsError
from .exactmath import MultivariatePolynomial, Polynomial
from .kernels import BACKEND
from .models import MODELS, get_model
from .sampler import Sampler, make_rng, sample_polyomino, sample_tableau_rejection
from .shapes import Poset, ShapeSpec, build_poset, count_linear_extensions, is_valid_filling

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BlockSpec",
    "CapacityError",
    "ConsistencyError",
    "DensityError",
    "DensityTower",
    "MODELS",
    "MultivariatePolynomial",
    "Polynomial",
    "Poset",
    "Sampler",
    "ShapeSpec",
    "UsageError",
    "YoungWallsError",
    "build_poset",
    "count_fillings",
    "count_linear_extensions",
    "derive_kernel",
    "get_model",
    "is_valid_filling",
    "iterate_recurrence",
    "load_tower",
    "make_rng",
    "polyo_2nx3_block",
    "sample_polyomino",
    "sample_tableau_rejection",
    "save_tower",
]
