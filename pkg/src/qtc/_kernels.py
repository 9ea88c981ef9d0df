"""Integer inner loops shared by the decoders and the percolation sampler.

Everything here is written in the numba-compatible subset of Python/numpy.
With ``QTC_NUMBA=1`` (the default) the functions are compiled with
``numba.njit``; setting ``QTC_NUMBA=0`` runs the identical code uncompiled on
plain numpy arrays, which is the slow-but-dependency-light fallback path.
Both paths do exactly the same integer arithmetic in the same order, so their
outputs are bit-identical (tests assert this).
"""

from __future__ import annotations

import os

import numpy as np


def _jit_enabled() -> bool:
    flag = os.environ.get("QTC_NUMBA", "1").strip().lower()
    return flag not in ("0", "false", "off", "no")


USING_NUMBA = False
if _jit_enabled():
    try:
        from numba import njit

        USING_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a hard dep, but stay usable
        pass

if not USING_NUMBA:

    def njit(*args, **kwargs):  # no-op decorator: the pure-numpy fallback path
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap


# ---------------------------------------------------------------------------
# clustering


@njit(cache=True)
def _find(parent, a):
    while parent[a] != a:
        parent[a] = parent[parent[a]]  # path halving
        a = parent[a]
    return a


@njit(cache=True)
def collect_charged(charges):
    """Charged plaquettes in row-major order: (rows, cols) plus index grid."""
    L = charges.shape[0]
    idx = np.full((L, L), -1, dtype=np.int64)
    n = 0
    for r in range(L):
        for c in range(L):
            if charges[r, c] != 0:
                idx[r, c] = n
                n += 1
    rows = np.empty(n, dtype=np.int64)
    cols = np.empty(n, dtype=np.int64)
    k = 0
    for r in range(L):
        for c in range(L):
            if charges[r, c] != 0:
                rows[k] = r
                cols[k] = c
                k += 1
    return rows, cols, idx


@njit(cache=True)
def partition_roots(charges, offs_r, offs_c):
    """Union-find roots of charged plaquettes under offset-connectivity.

    Two charged plaquettes are connected when one sits at any of the given
    offsets from the other (all coordinates wrap).  Roots are canonical: the
    root of a cluster is its first member in row-major order.
    """
    L = charges.shape[0]
    rows, cols, idx = collect_charged(charges)
    n = rows.size
    parent = np.arange(n)
    for i in range(n):
        for j in range(offs_r.size):
            rr = (rows[i] + offs_r[j]) % L
            cc = (cols[i] + offs_c[j]) % L
            t = idx[rr, cc]
            if t >= 0 and t != i:
                a = _find(parent, i)
                b = _find(parent, t)
                if a < b:
                    parent[b] = a
                elif b < a:
                    parent[a] = b
    for i in range(n):
        parent[i] = _find(parent, i)
    return rows, cols, parent


@njit(cache=True)
def _move_step(r1, c1, r2, c2, charge, L, acc_h, acc_v):
    """Record one unit transport between orthogonally adjacent plaquettes."""
    dr = (r2 - r1) % L
    dc = (c2 - c1) % L
    if dc == 0 and dr == 1:  # down
        acc_h[(r1 + 1) % L, c1] -= charge
    elif dc == 0 and dr == L - 1:  # up
        acc_h[r1, c1] += charge
    elif dr == 0 and dc == 1:  # right
        acc_v[r1, (c1 + 1) % L] += charge
    else:  # left
        acc_v[r1, c1] -= charge


@njit(cache=True)
def _move_staircase(r1, c1, r2, c2, charge, L, d, acc_h, acc_v):
    """Transport along the row-first minimum-image staircase from 1 to 2."""
    if charge % d == 0:
        return
    dr = (r2 - r1) % L
    if dr > L // 2:
        dr -= L
    dc = (c2 - c1) % L
    if dc > L // 2:
        dc -= L
    r, c = r1, c1
    sr = 1 if dr > 0 else -1
    for _ in range(abs(dr)):
        nr = (r + sr) % L
        _move_step(r, c, nr, c, charge, L, acc_h, acc_v)
        r = nr
    sc = 1 if dc > 0 else -1
    for _ in range(abs(dc)):
        nc = (c + sc) % L
        _move_step(r, c, r, nc, charge, L, acc_h, acc_v)
        c = nc
    # target reached at (r2, c2) by construction


@njit(cache=True)
def annihilate_members(rows, cols, members, charges, d, acc_h, acc_v):
    """Sweep a neutral cluster: fuse charges into the next member in turn.

    ``members`` indexes into rows/cols in row-major order.  After the sweep all
    member plaquettes are zeroed in ``charges`` and the transports are recorded
    in the accumulators (raw int64; reduce mod d at the end of decoding).
    """
    L = charges.shape[0]
    i0 = members[0]
    carry = charges[rows[i0], cols[i0]] % d
    charges[rows[i0], cols[i0]] = 0
    pr, pc = rows[i0], cols[i0]
    for k in range(1, members.size):
        i = members[k]
        r, c = rows[i], cols[i]
        _move_staircase(pr, pc, r, c, carry, L, d, acc_h, acc_v)
        carry = (carry + charges[r, c]) % d
        charges[r, c] = 0
        pr, pc = r, c
    return carry  # 0 for a neutral cluster


@njit(cache=True)
def region_offset_arrays(r, s):
    """Nonzero offsets with |dr|+|dc| <= r+s and max(|dr|,|dc|) <= r, lex order."""
    count = 0
    for dr in range(-r, r + 1):
        for dc in range(-r, r + 1):
            if dr == 0 and dc == 0:
                continue
            if abs(dr) + abs(dc) <= r + s:
                count += 1
    offs_r = np.empty(count, dtype=np.int64)
    offs_c = np.empty(count, dtype=np.int64)
    k = 0
    for dr in range(-r, r + 1):
        for dc in range(-r, r + 1):
            if dr == 0 and dc == 0:
                continue
            if abs(dr) + abs(dc) <= r + s:
                offs_r[k] = dr
                offs_c[k] = dc
                k += 1
    return offs_r, offs_c


@njit(cache=True)
def hdrg_sweep(charges, d, acc_h, acc_v):
    """Run the escalating-level cluster decoder to completion.

    Mutates ``charges`` to all-zero and records the correction in the
    accumulators.  Returns the number of levels consumed (-1 never happens for
    a charge-neutral input; kept as a tripwire).
    """
    L = charges.shape[0]
    r_lvl, s_lvl = 1, 0
    levels = 0
    while True:
        offs_r, offs_c = region_offset_arrays(r_lvl, s_lvl)
        rows, cols, root = partition_roots(charges, offs_r, offs_c)
        n = rows.size
        if n == 0:
            return levels
        levels += 1
        order = np.argsort(root, kind="mergesort")  # clusters by first member, members row-major
        i0 = 0
        while i0 < n:
            rt = root[order[i0]]
            i1 = i0
            total = 0
            while i1 < n and root[order[i1]] == rt:
                total += charges[rows[order[i1]], cols[order[i1]]]
                i1 += 1
            if total % d == 0:
                annihilate_members(rows, cols, order[i0:i1], charges, d, acc_h, acc_v)
            i0 = i1
        if s_lvl == r_lvl:
            r_lvl += 1
            s_lvl = 0
        else:
            s_lvl += 1
        if r_lvl > L:  # cannot trigger: by r ~ L/2 everything is one neutral cluster
            return -1


# ---------------------------------------------------------------------------
# initialization search (path dissection of dense syndromes)


@njit(cache=True)
def init_level_sweep(charges, d, acc_h, acc_v, q_r, q_c, q_start, steps, step_len):
    """One search level: scan every plaquette, annihilate first neutral path.

    ``q_r``/``q_c`` are the target offsets in fixed order; paths for target j
    occupy rows ``q_start[j]:q_start[j+1]`` of ``steps`` (0 = row step toward
    the target, 1 = column step), with true lengths in ``step_len``.  For each
    start plaquette the scan stops at the first path whose summed charge is
    0 mod d; that path is swept (charges fused into the far end) and the scan
    moves on.  Returns the number of annihilations that actually moved charge
    (an all-empty path also stops the scan for its plaquette, but is free).
    """
    L = charges.shape[0]
    hits = 0
    for ur in range(L):
        for uc in range(L):
            done = False
            for qi in range(q_r.size):
                if done:
                    break
                sr = 1 if q_r[qi] > 0 else -1
                sc = 1 if q_c[qi] > 0 else -1
                for pi in range(q_start[qi], q_start[qi + 1]):
                    total = charges[ur, uc]
                    occupied = charges[ur, uc] != 0
                    r, c = ur, uc
                    for si in range(step_len[pi]):
                        if steps[pi, si] == 0:
                            r = (r + sr) % L
                        else:
                            c = (c + sc) % L
                        total += charges[r, c]
                        if charges[r, c] != 0:
                            occupied = True
                    if total % d == 0:
                        carry = charges[ur, uc] % d
                        charges[ur, uc] = 0
                        r, c = ur, uc
                        for si in range(step_len[pi]):
                            pr, pc = r, c
                            if steps[pi, si] == 0:
                                r = (r + sr) % L
                            else:
                                c = (c + sc) % L
                            if carry % d != 0:
                                _move_step(pr, pc, r, c, carry, L, acc_h, acc_v)
                            carry = (carry + charges[r, c]) % d
                            charges[r, c] = 0
                        if occupied:
                            hits += 1
                        done = True
                        break
    return hits


# ---------------------------------------------------------------------------
# percolation


@njit(cache=True)
def spans_occupied(occ):
    """Cluster scan of a toroidal occupancy grid under orthogonal adjacency.

    Returns (spans, largest, kind): whether any 4-connected component touches
    every column or every row, the size of the largest component, and a
    bitmask (1 = some component covers all columns, 2 = all rows).
    """
    L = occ.shape[0]
    idx = np.full((L, L), -1, dtype=np.int64)
    n = 0
    for r in range(L):
        for c in range(L):
            if occ[r, c]:
                idx[r, c] = n
                n += 1
    if n == 0:
        return 0, 0, 0
    rows = np.empty(n, dtype=np.int64)
    cols = np.empty(n, dtype=np.int64)
    k = 0
    for r in range(L):
        for c in range(L):
            if occ[r, c]:
                rows[k] = r
                cols[k] = c
                k += 1
    parent = np.arange(n)
    for i in range(n):
        r, c = rows[i], cols[i]
        t = idx[(r + 1) % L, c]
        if t >= 0:
            a, b = _find(parent, i), _find(parent, t)
            if a < b:
                parent[b] = a
            elif b < a:
                parent[a] = b
        t = idx[r, (c + 1) % L]
        if t >= 0:
            a, b = _find(parent, i), _find(parent, t)
            if a < b:
                parent[b] = a
            elif b < a:
                parent[a] = b
    lab = np.full(n, -1, dtype=np.int64)
    nlab = 0
    for i in range(n):
        if _find(parent, i) == i:
            lab[i] = nlab
            nlab += 1
    row_seen = np.zeros((nlab, L), dtype=np.uint8)
    col_seen = np.zeros((nlab, L), dtype=np.uint8)
    sizes = np.zeros(nlab, dtype=np.int64)
    for i in range(n):
        la = lab[_find(parent, i)]
        row_seen[la, rows[i]] = 1
        col_seen[la, cols[i]] = 1
        sizes[la] += 1
    kind = 0
    for la in range(nlab):
        full_rows = True
        full_cols = True
        for x in range(L):
            if row_seen[la, x] == 0:
                full_rows = False
            if col_seen[la, x] == 0:
                full_cols = False
        if full_cols:
            kind |= 1
        if full_rows:
            kind |= 2
    largest = 0
    for la in range(nlab):
        if sizes[la] > largest:
            largest = sizes[la]
    return (1 if kind else 0), largest, kind


def warmup():
    """Trigger compilation of all kernels on a tiny instance (no-op results)."""
    charges = np.zeros((4, 4), dtype=np.int64)
    charges[0, 0], charges[0, 1] = 1, 1
    acc_h = np.zeros((4, 4), dtype=np.int64)
    acc_v = np.zeros((4, 4), dtype=np.int64)
    hdrg_sweep(charges.copy(), 2, acc_h, acc_v)
    q_r = np.array([1], dtype=np.int64)
    q_c = np.array([0], dtype=np.int64)
    q_start = np.array([0, 1], dtype=np.int64)
    steps = np.zeros((1, 1), dtype=np.int8)
    step_len = np.array([1], dtype=np.int64)
    init_level_sweep(charges.copy(), 2, acc_h, acc_v, q_r, q_c, q_start, steps, step_len)
    spans_occupied(charges != 0)
