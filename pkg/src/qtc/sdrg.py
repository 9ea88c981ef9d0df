"""Soft-decisions RG decoder built from minimal two-face cells.

The lattice is halved one axis at a time (even levels pair rows, odd levels
pair columns).  Each cell covers two adjacent faces and five edges; writing
edge values in cell-local slot coordinates, the chains

    t  = (0,0,0, 1, 0)      transport: moves the first face's charge onto the
                            second across the shared slot-4 edge
    l1 = (1,0,0, 1, 0)      the coarse edge crossing the cell along the merge
                            axis (slots 1 and 4)
    l2 = (0,0,0, 0, 1)      the coarse edge crossing the other way (slot 5)
    s1 = (0,1,0, 1,-1)      truncated vertex operators: adding them changes
    s2 = (0,0,1,-1, 0)      no class, so classes are labelled (h1, h2)

form a basis of Z_d^5.  Conditioning on the first face's charge a, every
consistent edge configuration is a.t + h1.l1 + h2.l2 + mu.s1 + nu.s2, and the
class table P(h1, h2) is the prior-weighted sum over (mu, nu).  Slots 2 and 3
are shared with the neighboring cells along the merge axis; their priors are
replaced by belief-propagation messages before the table is taken.

Each current edge carries a probability vector over multiples of its physical
chain (a +1-coefficient set of level-0 edges).  Slot lookups flip the index of
horizontal-type edges, h being the orientation that enters cells negatively;
coarse priors inherit the matching flip, so the convention is level-uniform.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lattice import CodeParams, ErrorConfig, NoiseParams, SyndromeSet

_CHUNK_ELEMENTS = 20_000_000  # cap on cells x d^3 intermediate size
_MAX_D4 = 250_000_000  # class-table memory guard


def cell_basis(d: int) -> np.ndarray:
    """The five cell chains (t, l1, l2, s1, s2) as rows over Z_d.

    Checked invertible mod d at every call; the integer determinant is +-1, so
    the chains form a basis for every d.
    """
    basis = np.array(
        [
            [0, 0, 0, 1, 0],
            [1, 0, 0, 1, 0],
            [0, 0, 0, 0, 1],
            [0, 1, 0, 1, -1],
            [0, 0, 1, -1, 0],
        ],
        dtype=np.int64,
    )
    det = round(float(np.linalg.det(basis)))
    if det % d == 0:
        raise ValueError(f"cell chains degenerate mod d={d}")
    return basis % d


# ---------------------------------------------------------------------------
# distribution helpers ("Dist" = non-negative length-d vector summing to 1)


def uniform_dist(d: int) -> np.ndarray:
    return np.full(d, 1.0 / d)


def noise_prior(d: int, p: float) -> np.ndarray:
    """Level-0 edge prior: weight 1-p on 0, p split over the d-1 nonzero values."""
    out = np.full(d, p / (d - 1))
    out[0] = 1.0 - p
    return out


def _check_dist(name: str, x: np.ndarray, d: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (d,):
        raise ValueError(f"{name} must have length {d}, got shape {x.shape}")
    if np.any(x < 0) or not np.isfinite(x).all():
        raise ValueError(f"{name} has negative or non-finite entries")
    if abs(float(x.sum()) - 1.0) > 1e-9:
        raise ValueError(f"{name} is not normalized (sum {x.sum():.3g})")
    return x


def _norm_last(x: np.ndarray) -> np.ndarray:
    """Normalize along the last axis; exact-zero rows become uniform."""
    tot = x.sum(axis=-1, keepdims=True)
    zero = tot == 0.0
    if np.any(zero):
        x = np.where(zero, 1.0, x)
        tot = np.where(zero, float(x.shape[-1]), tot)
    return x / tot


def _flip(p: np.ndarray) -> np.ndarray:
    """p[..., x] -> p[..., (-x) mod d]."""
    d = p.shape[-1]
    return np.ascontiguousarray(p[..., (-np.arange(d)) % d])


def _sub_table(d: int) -> np.ndarray:
    ar = np.arange(d)
    return (ar[:, None] - ar[None, :]) % d


def _add_table(d: int) -> np.ndarray:
    ar = np.arange(d)
    return (ar[:, None] + ar[None, :]) % d


# ---------------------------------------------------------------------------
# batched cell computations (flattened batch of n cells)


def _class_tables_flat(A, P1, Ql, Qr, P4, P5, d):
    """P(h1, h2) per cell: [n, d, d], normalized."""
    n = A.shape[0]
    out = np.empty((n, d, d))
    sub = _sub_table(d)
    add = _add_table(d)
    step = max(1, _CHUNK_ELEMENTS // (d * d * d))
    rows = np.arange(d)
    for i0 in range(0, n, step):
        sl = slice(i0, min(n, i0 + step))
        m = sl.stop - sl.start
        # F[y] = sum_nu Qr(nu) P4((y - nu) % d)
        F = np.einsum("nv,nyv->ny", Qr[sl], P4[sl][:, sub])
        # FA[h1, mu] = F[(a + h1 + mu) % d]
        shift = (A[sl, None, None] + add[None]) % d
        FA = F[np.arange(m)[:, None, None], shift]
        T = Ql[sl][:, None, :] * FA  # [m, h1, mu]
        P5M = P5[sl][:, sub]  # [m, h2, mu]
        out[sl] = P1[sl][:, :, None] * np.einsum("nhm,nkm->nhk", T, P5M)
    return _norm_last(out.reshape(n, d * d)).reshape(n, d, d)


def _messages_flat(A, P1, P2, P3, P4, Ql, Qr, d):
    """Outgoing (L, R) per cell, marginalizing the receiver's own slot out."""
    n = A.shape[0]
    sub = _sub_table(d)
    add = _add_table(d)
    ar = np.arange(d)
    ndx = np.arange(n)[:, None]
    F = np.einsum("nv,nyv->ny", Qr, P4[:, sub])
    W1 = np.einsum("nh,nyh->ny", P1, F[:, add])
    Lm = P2 * W1[ndx, (A[:, None] + ar[None]) % d]
    F2 = np.einsum("nm,nym->ny", Ql, P4[:, add])
    W2 = np.einsum("nh,nyh->ny", P1, F2[:, add])
    Rm = P3 * W2[ndx, (A[:, None] - ar[None]) % d]
    return _norm_last(Lm), _norm_last(Rm)


# ---------------------------------------------------------------------------
# single-cell API


def cell_class_probs(p1, p4, p5, q_l, q_r, a: int) -> np.ndarray:
    """Class table P(h1, h2) of one cell with face charge ``a``: [d, d].

    ``p1``, ``p4``, ``p5`` are the in-cell slot priors; ``q_l``, ``q_r`` the
    incoming messages standing in for the shared slots 2 and 3.  Inputs must
    be normalized.
    """
    d = len(np.atleast_1d(p1))
    args = [
        _check_dist(name, x, d)
        for name, x in (("p1", p1), ("p4", p4), ("p5", p5), ("q_l", q_l), ("q_r", q_r))
    ]
    p1, p4, p5, q_l, q_r = (x[None] for x in args)
    A = np.array([int(a) % d], dtype=np.int64)
    return _class_tables_flat(A, p1, q_l, q_r, p4, p5, d)[0]


def cell_marginals(ct: np.ndarray):
    """Row and column marginals of a class table: (over h1, over h2)."""
    return ct.sum(axis=1), ct.sum(axis=0)


def compute_messages(p1, p2, p3, p4, p5, q_l, q_r, a: int):
    """Outgoing (L, R) messages of one cell.

    L marginalizes slot 2 using its prior ``p2`` and the incoming ``q_r`` but
    never ``q_l`` (and symmetrically for R), so no cell echoes a neighbor's
    message straight back.
    """
    d = len(np.atleast_1d(p1))
    arrs = [np.asarray(x, dtype=np.float64)[None] for x in (p1, p2, p3, p4, q_l, q_r)]
    p1, p2, p3, p4, q_l, q_r = arrs
    A = np.array([int(a) % d], dtype=np.int64)
    Lm, Rm = _messages_flat(A, p1, p2, p3, p4, q_l, q_r, d)
    return Lm[0], Rm[0]


# ---------------------------------------------------------------------------
# levels


@dataclass
class RGLevel:
    """One rung of the hierarchy: edge priors, charges, and physical chains.

    ``ph``/``pv`` hold one probability vector per current horizontal-/
    vertical-type edge ([rows, cols, d]); ``ch_h``/``ch_v`` map each edge to
    the flat level-0 edge indices of its physical chain; ``S`` carries the
    current charges.  ``msg_l``/``msg_r`` cache the message state.
    """

    lam: int
    params: CodeParams
    S: np.ndarray
    ph: np.ndarray
    pv: np.ndarray
    ch_h: np.ndarray
    ch_v: np.ndarray
    msg_l: np.ndarray | None = field(default=None, repr=False)
    msg_r: np.ndarray | None = field(default=None, repr=False)

    @property
    def shape(self) -> tuple:
        return self.S.shape

    @property
    def merges_rows(self) -> bool:
        return self.lam % 2 == 0

    @property
    def cell_shape(self) -> tuple:
        rows, cols = self.shape
        return (rows // 2, cols) if self.merges_rows else (rows, cols // 2)


def make_level0(W: SyndromeSet, noise: NoiseParams) -> RGLevel:
    params = W.params
    L, d = params.L, params.d
    prior = noise_prior(d, noise.p)
    ph = np.broadcast_to(prior, (L, L, d)).copy()
    pv = ph.copy()
    flat = np.arange(L * L, dtype=np.int64).reshape(L, L, 1)
    return RGLevel(0, params, W.charges.copy(), ph, pv, flat.copy(), flat + L * L)


def _slot_views(level: RGLevel):
    """Per-cell slot priors [n, d] and face charges [n] for the current level."""
    if level.merges_rows:
        A = level.S[0::2, :]
        P1 = _flip(level.ph[0::2, :])
        P2 = level.pv[0::2, :]
        P3 = np.roll(level.pv, -1, axis=1)[0::2, :]
        P4 = _flip(level.ph[1::2, :])
        P5 = level.pv[1::2, :]
    else:
        A = level.S[:, 0::2]
        P1 = level.pv[:, 0::2]
        P2 = _flip(level.ph[:, 0::2])
        P3 = _flip(np.roll(level.ph, -1, axis=0)[:, 0::2])
        P4 = level.pv[:, 1::2]
        P5 = _flip(level.ph[:, 1::2])
    d = level.params.d
    flat = lambda x: np.ascontiguousarray(x).reshape(-1, d)
    return A.ravel().astype(np.int64), flat(P1), flat(P2), flat(P3), flat(P4), flat(P5)


def bp_rounds(level: RGLevel, rounds: int = 5):
    """Synchronous message passing along the merge axis; stores and returns messages.

    Messages restart from uniform (rounds=0 leaves them there).  Each round
    every cell emits (L, R) from the current incoming pair, then all messages
    shift one cell left/right (even levels) or up/down (odd levels) at once.
    """
    if rounds < 0:
        raise ValueError("rounds must be non-negative")
    d = level.params.d
    cells = level.cell_shape
    A, P1, P2, P3, P4, P5 = _slot_views(level)
    axis = 1 if level.merges_rows else 0
    Ql = np.full(cells + (d,), 1.0 / d)
    Qr = np.full(cells + (d,), 1.0 / d)
    for _ in range(rounds):
        Lm, Rm = _messages_flat(A, P1, P2, P3, P4, Ql.reshape(-1, d), Qr.reshape(-1, d), d)
        Ql = np.roll(Rm.reshape(cells + (d,)), 1, axis=axis)
        Qr = np.roll(Lm.reshape(cells + (d,)), -1, axis=axis)
    level.msg_l, level.msg_r = Ql, Qr
    return Ql, Qr


def class_tables(level: RGLevel) -> np.ndarray:
    """Class tables of every cell at this level: [cell_rows, cell_cols, d, d]."""
    d = level.params.d
    cells = level.cell_shape
    A, P1, _, _, P4, P5 = _slot_views(level)
    if level.msg_l is None:
        Ql = np.full((A.size, d), 1.0 / d)
        Qr = np.full((A.size, d), 1.0 / d)
    else:
        Ql = level.msg_l.reshape(-1, d)
        Qr = level.msg_r.reshape(-1, d)
    return _class_tables_flat(A, P1, Ql, Qr, P4, P5, d).reshape(cells + (d, d))


def coarse_grain(level: RGLevel, acc: np.ndarray | None = None):
    """Merge cells into the next level; record transports in ``acc``.

    Returns (next_level, acc) where ``acc`` accumulates raw physical edge
    values (reduce mod d when building the final correction).  Coarse edge
    priors are the class-table marginals; coarse charges are the per-cell
    face sums.
    """
    params = level.params
    d = params.d
    if acc is None:
        acc = np.zeros(2 * params.L * params.L, dtype=np.int64)
    PH = class_tables(level)
    m1 = PH.sum(axis=-1)
    m2 = PH.sum(axis=-2)
    if level.merges_rows:
        A = level.S[0::2, :]
        S2 = (A + level.S[1::2, :]) % d
        carrier = level.ch_h[1::2]  # slot-4 edges, entering cells negatively
        np.add.at(acc, carrier.ravel(), np.repeat(-A.ravel(), carrier.shape[-1]))
        ch_h = np.concatenate([level.ch_h[0::2], level.ch_h[1::2]], axis=-1)
        ch_v = level.ch_v[1::2].copy()
        ph, pv = _flip(m1), m2
    else:
        A = level.S[:, 0::2]
        S2 = (A + level.S[:, 1::2]) % d
        carrier = level.ch_v[:, 1::2]  # slot-4 edges, entering cells positively
        np.add.at(acc, carrier.ravel(), np.repeat(A.ravel(), carrier.shape[-1]))
        ch_v = np.concatenate([level.ch_v[:, 0::2], level.ch_v[:, 1::2]], axis=-1)
        ch_h = level.ch_h[:, 1::2].copy()
        ph, pv = _flip(m2), m1
    nxt = RGLevel(level.lam + 1, params, S2, _norm_last(ph), _norm_last(pv), ch_h, ch_v)
    return nxt, acc


def sdrg_decode(
    W: SyndromeSet, noise: NoiseParams, rounds: int = 5, trace: list | None = None
) -> ErrorConfig:
    """Full hierarchical decode; the correction reproduces W exactly.

    Alternates message passing and coarse graining until one cell remains,
    then applies the most likely multiple of each of the two surviving chains
    (ties break to the smallest value).  Requires L a power of two; rejects d
    whose d^4 class tables would not fit in memory.
    """
    params = W.params
    L, d = params.L, params.d
    if L & (L - 1):
        raise ValueError(f"hierarchical decoding needs L a power of two, got L={L}")
    if d**4 > _MAX_D4:
        raise ValueError(
            f"d={d} needs d^4 = {d**4} class-table entries, over the {_MAX_D4} limit"
        )
    if int(W.charges.sum()) % d != 0:
        raise ValueError("syndrome set carries net charge; not a valid measurement")
    cell_basis(d)
    level = make_level0(W, noise)
    acc = np.zeros(2 * L * L, dtype=np.int64)
    while level.shape != (1, 1):
        bp_rounds(level, rounds)
        if trace is not None:
            trace.append(
                {
                    "lam": level.lam,
                    "shape": list(level.shape),
                    "n_charged": int(np.count_nonzero(level.S)),
                    "class_tables": class_tables(level).tolist(),
                }
            )
        level, acc = coarse_grain(level, acc)
    if int(level.S[0, 0]) % d != 0:
        raise RuntimeError("uncleared charge at the last level")  # unreachable
    k_h = int(np.argmax(level.ph[0, 0]))
    k_v = int(np.argmax(level.pv[0, 0]))
    acc[level.ch_h[0, 0]] += k_h
    acc[level.ch_v[0, 0]] += k_v
    if trace is not None:
        trace.append(
            {
                "lam": level.lam,
                "shape": [1, 1],
                "final_h": level.ph[0, 0].tolist(),
                "final_v": level.pv[0, 0].tolist(),
                "applied": [k_h, k_v],
            }
        )
    return ErrorConfig.from_array(params, acc)
