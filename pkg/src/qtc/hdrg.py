"""Cluster decoder with an escalating schedule of connectivity regions.

Level l connects charged plaquettes whose displacement lies in the region
R_{r,s} = {taxi-cab norm <= r+s} ∩ {sup norm <= r}, with (r,s) stepping
through (1,0), (1,1), (2,0), (2,1), (2,2), (3,0), ...  Neutral clusters are
swept into single plaquettes and removed; charged clusters survive to the next
level.  Decoding terminates because the syndrome set as a whole is neutral and
the regions eventually span the torus.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .lattice import (
    CodeParams,
    DecoderContractError,
    ErrorConfig,
    SyndromeSet,
    compute_syndrome,
    move_charge,
)


@dataclass(frozen=True)
class RegionParams:
    """Level label (r, s), 0 <= s <= r.  (0, 0) denotes the empty region."""

    r: int
    s: int

    def __post_init__(self):
        if self.r < 0 or not 0 <= self.s <= self.r:
            raise ValueError(f"need 0 <= s <= r, got (r, s) = ({self.r}, {self.s})")

    def next_level(self) -> "RegionParams":
        if self.s < self.r:
            return RegionParams(self.r, self.s + 1)
        return RegionParams(self.r + 1, 0)


@dataclass
class Cluster:
    """A connected set of charged plaquettes.

    ``members`` lists ((row, col), charge) in row-major order; ``total_charge``
    is the member sum mod d.  Neutral clusters (total 0) can be annihilated.
    """

    members: list
    total_charge: int

    @property
    def is_neutral(self) -> bool:
        return self.total_charge == 0

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass
class Partition:
    """Disjoint clusters covering a syndrome set at one level."""

    clusters: list
    level: RegionParams


def region_offsets(rp: RegionParams) -> list:
    """All nonzero offsets of R_{r,s}, lexicographically sorted.

    Symmetric under negation; sizes run 4, 8, 12, ... as the level grows.
    """
    r, s = rp.r, rp.s
    out = []
    for dr in range(-r, r + 1):
        for dc in range(-r, r + 1):
            if (dr or dc) and abs(dr) + abs(dc) <= r + s:
                out.append((dr, dc))
    return out


def level_params(l: int) -> RegionParams:
    """The (r, s) label of decoding level l >= 1: (1,0), (1,1), (2,0), ..."""
    if l < 1:
        raise ValueError(f"levels are numbered from 1, got {l}")
    rp = RegionParams(1, 0)
    for _ in range(l - 1):
        rp = rp.next_level()
    return rp


def partition(W: SyndromeSet, rp: RegionParams) -> Partition:
    """Maximal clusters of charged plaquettes under R_{r,s}-connectivity.

    Connectivity wraps around the torus.  Output order is canonical: clusters
    sorted by their first row-major member, members row-major within a cluster.
    """
    offs = region_offsets(rp)
    offs_r = np.array([o[0] for o in offs], dtype=np.int64)
    offs_c = np.array([o[1] for o in offs], dtype=np.int64)
    rows, cols, root = _kernels.partition_roots(W.charges, offs_r, offs_c)
    d = W.params.d
    order = np.argsort(root, kind="mergesort")
    clusters = []
    n = rows.size
    i0 = 0
    while i0 < n:
        rt = root[order[i0]]
        members = []
        total = 0
        i1 = i0
        while i1 < n and root[order[i1]] == rt:
            i = order[i1]
            q = int(W.charges[rows[i], cols[i]])
            members.append(((int(rows[i]), int(cols[i])), q))
            total += q
            i1 += 1
        clusters.append(Cluster(members, total % d))
        i0 = i1
    return Partition(clusters, rp)


def _staircase(acc: ErrorConfig, frm, to, charge: int) -> None:
    """Row-first minimum-image staircase transport between two plaquettes."""
    L, d = acc.params.L, acc.params.d
    if charge % d == 0:
        return
    dr = (to[0] - frm[0]) % L
    if dr > L // 2:
        dr -= L
    dc = (to[1] - frm[1]) % L
    if dc > L // 2:
        dc -= L
    r, c = frm
    sr = 1 if dr > 0 else -1
    for _ in range(abs(dr)):
        nr = (r + sr) % L
        move_charge(acc, (r, c), (nr, c), charge)
        r = nr
    sc = 1 if dc > 0 else -1
    for _ in range(abs(dc)):
        nc = (c + sc) % L
        move_charge(acc, (r, c), (r, nc), charge)
        c = nc


def annihilate_neutral(cluster: Cluster, acc: ErrorConfig) -> ErrorConfig:
    """Sweep a neutral cluster, recording the transport chain in ``acc``.

    Charges are fused member-to-member in row-major order; afterwards the
    cluster's plaquettes carry no residual syndrome.  Charged clusters are
    rejected.
    """
    d = acc.params.d
    if cluster.total_charge % d != 0:
        raise ValueError("only neutral clusters can be annihilated")
    carry = 0
    prev = None
    for pos, q in cluster.members:
        if prev is not None:
            _staircase(acc, prev, pos, carry)
        carry = (carry + q) % d
        prev = pos
    return acc


def hdrg_decode(W: SyndromeSet, trace: list | None = None) -> ErrorConfig:
    """Decode a syndrome set; the returned correction reproduces it exactly.

    With ``trace`` (a list), per-level cluster records are appended as dicts
    and the slower pure-Python composition of :func:`partition` and
    :func:`annihilate_neutral` is used; otherwise everything runs in one fused
    kernel.  Both paths produce identical corrections.
    """
    params = W.params
    if int(W.charges.sum()) % params.d != 0:
        raise ValueError("syndrome set carries net charge; not a valid measurement")
    if trace is None:
        charges = W.charges.astype(np.int64).copy()
        acc_h = np.zeros((params.L, params.L), dtype=np.int64)
        acc_v = np.zeros((params.L, params.L), dtype=np.int64)
        if _kernels.hdrg_sweep(charges, params.d, acc_h, acc_v) < 0:
            raise DecoderContractError("cluster sweep failed to terminate")
        return ErrorConfig(params, acc_h % params.d, acc_v % params.d)

    acc = ErrorConfig.zeros(params)
    S = W.copy()
    rp = RegionParams(1, 0)
    level = 1
    while S.n_charged:
        part = partition(S, rp)
        record = {"level": level, "r": rp.r, "s": rp.s, "clusters": []}
        for cluster in part.clusters:
            record["clusters"].append(
                {
                    "members": [[pos[0], pos[1], q] for pos, q in cluster.members],
                    "charge": cluster.total_charge,
                    "annihilated": cluster.is_neutral,
                }
            )
            if cluster.is_neutral:
                annihilate_neutral(cluster, acc)
                for pos, _ in cluster.members:
                    S.charges[pos] = 0
        trace.append(record)
        rp = rp.next_level()
        level += 1
        if level > 3 * params.L:  # unreachable; guards against silent spin
            raise DecoderContractError("cluster sweep failed to terminate")
    return acc


def decode_error(err: ErrorConfig, trace: list | None = None) -> ErrorConfig:
    """Convenience: measure ``err`` and decode the resulting syndrome."""
    return hdrg_decode(compute_syndrome(err), trace)
