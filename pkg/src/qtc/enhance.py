"""Initialization search: dissect dense syndromes along short neutral paths.

Before cluster decoding starts, each plaquette is scanned for a nearby neutral
sub-cluster: a monotone staircase path from the plaquette to a target on the
outer layer Q_{r,s} of the region R_{r,s} whose summed charge vanishes mod d.
The first such path found is annihilated on the spot.  Levels run in ascending
order (1,0), (1,1), ... up to a configurable depth; depth (0,0) disables the
search entirely.  Running the search and then the cluster decoder on what is
left is the enhanced decoder.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .hdrg import RegionParams, hdrg_decode, region_offsets
from .lattice import ErrorConfig, SyndromeSet

DEFAULT_DEPTH = RegionParams(2, 1)


@dataclass(frozen=True)
class QSet:
    """The outer layer of R_{r,s}: targets probed at one search level."""

    rp: RegionParams
    offsets: tuple

    @property
    def size(self) -> int:
        return len(self.offsets)


@dataclass(frozen=True)
class SearchRectangle:
    """Minimal axis-aligned rectangle spanned by a plaquette and a target.

    ``disp`` is the displacement walked from ``u``; paths stay inside the
    rectangle, so each one visits exactly a + b + 1 plaquettes where (a, b)
    are the rectangle dimensions.
    """

    u: tuple
    disp: tuple
    L: int

    @classmethod
    def from_corners(cls, u, q, L) -> "SearchRectangle":
        """Build from two plaquettes using the minimum-image displacement."""
        dr = (q[0] - u[0]) % L
        if dr > L // 2:
            dr -= L
        dc = (q[1] - u[1]) % L
        if dc > L // 2:
            dc -= L
        return cls((u[0] % L, u[1] % L), (dr, dc), L)

    @property
    def q(self) -> tuple:
        return ((self.u[0] + self.disp[0]) % self.L, (self.u[1] + self.disp[1]) % self.L)

    @property
    def dims(self) -> tuple:
        return (abs(self.disp[0]), abs(self.disp[1]))


def q_set(rp: RegionParams) -> QSet:
    """Offsets of R_{r,s} minus the previous level's region, lex sorted.

    Always 4 or 8 offsets, each at taxi-cab distance exactly r + s.
    """
    if rp.r < 1:
        raise ValueError("the empty region has no outer layer")
    inner = RegionParams(rp.r, rp.s - 1) if rp.s > 0 else RegionParams(rp.r - 1, rp.r - 1)
    outer = set(region_offsets(rp)) - set(region_offsets(inner))
    return QSet(rp, tuple(sorted(outer)))


def _step_sequences(a: int, b: int) -> list:
    """All orderings of a row-steps (0) and b column-steps (1), lex order."""
    n = a + b
    seqs = []
    for ones in reversed(list(itertools.combinations(range(n), b))):
        seq = [0] * n
        for i in ones:
            seq[i] = 1
        seqs.append(tuple(seq))
    return seqs


def enumerate_paths(rect: SearchRectangle) -> list:
    """Every monotone staircase path from u to q, as plaquette lists.

    Paths appear in lexicographic order with row steps preferred; the count is
    the binomial coefficient (a+b choose a).
    """
    dr, dc = rect.disp
    a, b = abs(dr), abs(dc)
    sr = 1 if dr > 0 else -1
    sc = 1 if dc > 0 else -1
    L = rect.L
    paths = []
    for seq in _step_sequences(a, b):
        r, c = rect.u
        path = [(r, c)]
        for step in seq:
            if step == 0:
                r = (r + sr) % L
            else:
                c = (c + sc) % L
            path.append((r, c))
        paths.append(path)
    return paths


@lru_cache(maxsize=None)
def _level_tables(r: int, s: int):
    """Packed per-level search tables for the sweep kernel."""
    offs = q_set(RegionParams(r, s)).offsets
    q_r = np.array([o[0] for o in offs], dtype=np.int64)
    q_c = np.array([o[1] for o in offs], dtype=np.int64)
    plen = r + s
    all_seqs = [list(_step_sequences(abs(dr), abs(dc))) for dr, dc in offs]
    n_paths = sum(len(x) for x in all_seqs)
    steps = np.zeros((n_paths, plen), dtype=np.int8)
    step_len = np.full(n_paths, plen, dtype=np.int64)
    q_start = np.zeros(len(offs) + 1, dtype=np.int64)
    k = 0
    for qi, seqs in enumerate(all_seqs):
        for seq in seqs:
            steps[k, :] = seq
            k += 1
        q_start[qi + 1] = k
    return q_r, q_c, q_start, steps, step_len


def init_levels(depth: RegionParams) -> list:
    """Ascending level labels (1,0), (1,1), ... up to and including depth."""
    if depth == RegionParams(0, 0):
        return []
    out = []
    rp = RegionParams(1, 0)
    while True:
        out.append(rp)
        if rp == depth:
            return out
        rp = rp.next_level()


def init_step(W: SyndromeSet, depth: RegionParams = DEFAULT_DEPTH, trace: list | None = None):
    """Run the path search up to ``depth``; return (residual syndromes, correction).

    Scans all plaquettes row-major at every level; at each one the first
    neutral path (in target order, then path order) is annihilated and the
    scan moves on.  The number of charged plaquettes never grows and the total
    charge mod d is unchanged.
    """
    params = W.params
    charges = W.charges.astype(np.int64).copy()
    acc_h = np.zeros((params.L, params.L), dtype=np.int64)
    acc_v = np.zeros((params.L, params.L), dtype=np.int64)
    for level, rp in enumerate(init_levels(depth), start=1):
        q_r, q_c, q_start, steps, step_len = _level_tables(rp.r, rp.s)
        hits = _kernels.init_level_sweep(
            charges, params.d, acc_h, acc_v, q_r, q_c, q_start, steps, step_len
        )
        if trace is not None:
            trace.append({"init_level": level, "r": rp.r, "s": rp.s, "annihilated_paths": int(hits)})
    residual = SyndromeSet(params, charges)
    return residual, ErrorConfig(params, acc_h % params.d, acc_v % params.d)


def enhanced_hdrg_decode(
    W: SyndromeSet, depth: RegionParams = DEFAULT_DEPTH, trace: list | None = None
) -> ErrorConfig:
    """Path search followed by cluster decoding of the residual syndromes."""
    residual, head = init_step(W, depth, trace)
    tail = hdrg_decode(residual, trace)
    return ErrorConfig.from_array(W.params, head.to_array() + tail.to_array())
