"""Spanning-cluster Monte Carlo over syndrome fields and plain site occupancy.

A sample "spans" when one orthogonally-connected cluster of occupied
plaquettes touches every column or every row of the torus (the periodic stand-
in for side-to-side crossing; the site-percolation mode reproduces the known
square-lattice threshold 0.5927 with this rule, which is how the detector is
calibrated).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .enhance import init_step
from .hdrg import RegionParams
from .lattice import CodeParams, NoiseParams, SyndromeSet, compute_syndrome, make_rng, sample_errors

_AXIS = {0: None, 1: "horizontal", 2: "vertical", 3: "both"}


@dataclass(frozen=True)
class PercolationSample:
    """Outcome of one spanning trial.

    ``span_axis``: "horizontal" = some cluster occupies every column,
    "vertical" = every row, "both", or None.
    """

    spans: bool
    largest_cluster: int
    span_axis: str | None


def _scan(occ: np.ndarray) -> PercolationSample:
    flag, largest, kind = _kernels.spans_occupied(np.ascontiguousarray(occ))
    return PercolationSample(bool(flag), int(largest), _AXIS[int(kind)])


def spans(W: SyndromeSet) -> bool:
    """True iff the charged plaquettes contain a spanning cluster."""
    return _scan(W.charges != 0).spans


def _resolve_rng(seed):
    if isinstance(seed, tuple):
        return make_rng(*seed)
    return make_rng(int(seed), 0)


def percolation_sample(
    params: CodeParams,
    noise: NoiseParams,
    seed,
    depth: RegionParams | None = None,
) -> PercolationSample:
    """Sample errors, measure, optionally thin with the path search, and scan.

    ``seed`` is either a plain integer or a (master_seed, sample_index) pair;
    the pair form gives scheduler-independent streams for parallel sweeps.
    """
    err = sample_errors(params, noise, _resolve_rng(seed))
    W = compute_syndrome(err)
    if depth is not None and depth != RegionParams(0, 0):
        W, _ = init_step(W, depth)
    return _scan(W.charges != 0)


def site_percolation_sample(L: int, p: float, seed) -> bool:
    """Standard site percolation on the L x L torus: occupy with probability p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"occupation probability must lie in [0, 1], got {p}")
    occ = _resolve_rng(seed).random(size=(L, L)) < p
    return _scan(occ).spans
