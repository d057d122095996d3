"""Dephasing and trajectory noise in a harmonic-trap Stern-Gerlach interferometer."""

from .physics import (
    Arm,
    DerivedQuantities,
    ExperimentParams,
    derive_quantities,
    table1_params,
)
from .spectra import Custom, Flicker, White, evaluate_psd, normalize
from .transfer import TransferKind, f_dev, f_dev_loop, f_ho

__all__ = [
    "Arm",
    "Custom",
    "DerivedQuantities",
    "ExperimentParams",
    "Flicker",
    "TransferKind",
    "White",
    "derive_quantities",
    "evaluate_psd",
    "f_dev",
    "f_dev_loop",
    "f_ho",
    "normalize",
    "table1_params",
]

__version__ = "0.1.0"
