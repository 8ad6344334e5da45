"""Composition operators on Hardy spaces of Dirichlet series.

Truncated operator sections and their spectra, reproducing-kernel Gram
bounds, partial-sum and multiplier norms, and a Littlewood-Paley functional
evaluated by quadrature over random characters.
"""

from importlib.metadata import PackageNotFoundError, version

from ._ext import BACKEND
from .dirichlet import DirichletPolynomial, evaluate, multiply, norm
from .discmaps import DiscMap, TMap
from .errors import (
    ClassGError,
    CompopError,
    CoverageError,
    DomainError,
    MethodError,
    NumericalFailure,
    ResourceGuardError,
)
from .kernels import PointSequence, carleson_const_h2, gram, interp_const_h2
from .littlewood_paley import LPQuadratureSpec, lp_functional
from .operator import TruncatedOperator, assemble, assemble_disc
from .spectral import approx_numbers_h2, eigenvalues, fit_decay
from .symbols import Symbol, make_symbol, parse_symbol

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DirichletPolynomial", "evaluate", "multiply", "norm",
    "DiscMap", "TMap",
    "ClassGError", "CompopError", "CoverageError", "DomainError", "MethodError", "NumericalFailure",
    "ResourceGuardError",
    "PointSequence", "carleson_const_h2", "gram", "interp_const_h2",
    "LPQuadratureSpec", "lp_functional",
    "TruncatedOperator", "assemble", "assemble_disc",
    "approx_numbers_h2", "eigenvalues", "fit_decay",
    "Symbol", "make_symbol", "parse_symbol",
    "__version__",
]
