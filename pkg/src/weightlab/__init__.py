"""Numerical toolkit for Muckenhoupt weights, weighted norms and classical operators on grids."""

from .errors import (
    ConfigurationError,
    DegenerateWeightError,
    DimensionError,
    DomainError,
    GridRangeError,
    HypothesisViolation,
    ParseError,
    WeightlabError,
)
from .grid import Cube, CubeFamily, Grid, GridFunction, average, enumerate_cubes, integrate, read_grid, write_grid
from .norms import (
    NormKind,
    NormSpec,
    bmo_inf_norm,
    bmo_norm,
    evaluate_norm,
    lebesgue_norm,
    morrey_norm,
    norm,
    weak_lebesgue_norm,
    weak_morrey_norm,
)
from .operators import (
    cesaro_average,
    convolve_radial,
    hardy_average,
    hilbert,
    maximal,
    maximal_dominates_profiles,
    riesz,
)
from .profiles import PsiProfile, RadialProfile, parse_psi, parse_radial
from .weights import (
    Weight,
    a1_constant,
    ainfty_constant,
    ap_constant,
    conjugate,
    dual_weight,
    weighted_measure,
)

__version__ = "0.1.0"
