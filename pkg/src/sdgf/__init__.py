"""Spark-deficient Gabor frames from Zauner eigenvectors, and star-DGT experiments."""

__version__ = "0.1.0"

from .gabor import (  # noqa: E402
    GaborOperator,
    Lattice,
    Window,
    analysis_pair,
    dgt,
    dgt_adjoint,
    gabor_atom,
    make_lattice,
    make_window,
    operator_norm,
)
from .zauner import ZaunerParams, apply_zauner, star_window, validate_dimension, zauner_unitary  # noqa: E402

__all__ = [
    "GaborOperator",
    "Lattice",
    "Window",
    "ZaunerParams",
    "analysis_pair",
    "apply_zauner",
    "dgt",
    "dgt_adjoint",
    "gabor_atom",
    "make_lattice",
    "make_window",
    "operator_norm",
    "star_window",
    "validate_dimension",
    "zauner_unitary",
]
