"""Qudit toric code decoders, percolation studies, and threshold estimation."""

from .enhance import DEFAULT_DEPTH, enhanced_hdrg_decode, init_step
from .hdrg import RegionParams, hdrg_decode
from .lattice import (
    CodeParams,
    DecoderContractError,
    ErrorConfig,
    NoiseParams,
    SyndromeSet,
    compute_syndrome,
    is_success,
    logical_class,
    make_rng,
    move_charge,
    sample_errors,
)
from .percolation import PercolationSample, percolation_sample, site_percolation_sample, spans
from .sdrg import sdrg_decode
from .stats import (
    CurvePoint,
    FitResult,
    estimate_success,
    fit_threshold,
    hashing_threshold,
    read_curve_csv,
    write_curve_csv,
)

__all__ = [
    "CodeParams",
    "CurvePoint",
    "DEFAULT_DEPTH",
    "DecoderContractError",
    "ErrorConfig",
    "FitResult",
    "NoiseParams",
    "PercolationSample",
    "RegionParams",
    "SyndromeSet",
    "compute_syndrome",
    "enhanced_hdrg_decode",
    "estimate_success",
    "fit_threshold",
    "hashing_threshold",
    "hdrg_decode",
    "init_step",
    "is_success",
    "logical_class",
    "make_rng",
    "move_charge",
    "percolation_sample",
    "read_curve_csv",
    "sample_errors",
    "sdrg_decode",
    "site_percolation_sample",
    "spans",
    "write_curve_csv",
]

__version__ = "0.1.0"
