"""Monte Carlo success estimation, scaling fits, and hashing-bound thresholds."""

from __future__ import annotations

import csv
import json
import math
import multiprocessing
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .enhance import DEFAULT_DEPTH, enhanced_hdrg_decode
from .hdrg import RegionParams, hdrg_decode
from .lattice import (
    CodeParams,
    NoiseParams,
    _is_prime,
    compute_syndrome,
    is_success,
    make_rng,
    sample_errors,
)
from .sdrg import sdrg_decode

CURVE_HEADER = "d,L,p,n_success,n_total"

DECODERS = ("hdrg", "enhanced", "sdrg")

_CHUNK = 512  # trials per worker job; any value gives the same totals


@dataclass(frozen=True)
class CurvePoint:
    d: int
    L: int
    p: float
    n_success: int
    n_total: int

    def __post_init__(self):
        if not 0 <= self.n_success <= self.n_total:
            raise ValueError("need 0 <= n_success <= n_total")
        if self.n_total < 1:
            raise ValueError("n_total must be positive")

    @property
    def p_succ(self):
        return self.n_success / self.n_total

    @property
    def sigma(self):
        q = self.p_succ
        return math.sqrt(q * (1.0 - q) / self.n_total)


def _normalize_depth(depth):
    if depth is None:
        return DEFAULT_DEPTH
    if isinstance(depth, RegionParams):
        return depth
    return RegionParams(*depth)


def decode_with(decoder, W, noise, depth=None, rounds=5):
    """Dispatch one syndrome to the named decoder."""
    if decoder == "hdrg":
        return hdrg_decode(W)
    if decoder == "enhanced":
        return enhanced_hdrg_decode(W, depth=_normalize_depth(depth))
    if decoder == "sdrg":
        return sdrg_decode(W, noise, rounds=rounds)
    raise ValueError(f"unknown decoder {decoder!r}; expected one of {DECODERS}")


def _count_successes(args):
    decoder, params, noise, master_seed, start, stop, depth, rounds = args
    wins = 0
    for i in range(start, stop):
        e = sample_errors(params, noise, make_rng(master_seed, i))
        corr = decode_with(decoder, compute_syndrome(e), noise, depth, rounds)
        wins += is_success(e, corr)
    return wins


def estimate_success(decoder, params, noise, n_trials, master_seed,
                     depth=None, rounds=5, workers=1):
    """Fraction of n_trials independent sample->decode->check trials that succeed.

    Trial i draws its error from the stream keyed by (master_seed, i), so the
    resulting CurvePoint is identical for any worker count or chunking.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be positive")
    if decoder not in DECODERS:
        raise ValueError(f"unknown decoder {decoder!r}; expected one of {DECODERS}")
    jobs = [
        (decoder, params, noise, master_seed, lo, min(lo + _CHUNK, n_trials), depth, rounds)
        for lo in range(0, n_trials, _CHUNK)
    ]
    if workers and workers > 1:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(workers) as pool:
            wins = sum(pool.map(_count_successes, jobs))
    else:
        wins = sum(map(_count_successes, jobs))
    return CurvePoint(params.d, params.L, noise.p, wins, n_trials)


# ---------------------------------------------------------------------------
# finite-size-scaling fit


NU_BOUNDS = (0.5, 5.0)
MU_BOUNDS = (0.1, 5.0)


@dataclass
class FitResult:
    A: float
    B: float
    C: float
    D: float
    p_th: float
    nu: float
    mu: float
    rss: float
    degenerate: bool
    extrapolated: bool
    bounds: dict
    metadata: dict = field(default_factory=dict)

    def to_json(self):
        out = {k: getattr(self, k) for k in ("A", "B", "C", "D", "p_th", "nu", "mu", "rss")}
        out["degenerate"] = self.degenerate
        out["extrapolated"] = self.extrapolated
        out["bounds"] = {k: list(v) for k, v in self.bounds.items()}
        out["metadata"] = self.metadata
        return json.dumps(out, indent=2)


def _design(pvals, Lvals, p_th, nu, mu):
    x = (pvals - p_th) * Lvals ** (1.0 / nu)
    return np.column_stack([np.ones_like(x), x, x * x, Lvals ** (-1.0 / mu)])


def _profile(pvals, Lvals, y, sigma, theta):
    """Weighted LSQ for the linear coefficients at fixed (p_th, nu, mu)."""
    p_th, nu, mu = theta
    M = _design(pvals, Lvals, p_th, nu, mu)
    w = 1.0 / sigma
    beta, _, rank, _ = np.linalg.lstsq(M * w[:, None], y * w, rcond=None)
    r = (y - M @ beta) * w
    return float(r @ r), beta, rank


def fit_threshold(points, L_subset=None):
    """Fit p_succ = A + Bx + Cx^2 + D L^(-1/mu), x = (p - p_th) L^(1/nu).

    The three nonlinear parameters are found by a coarse grid plus simplex
    polish; (A,B,C,D) are profiled out by weighted linear least squares at
    every candidate.  Weights use binomial sigmas with the success fraction
    clipped to [1/(2N), 1-1/(2N)] so saturated points keep finite weight.
    """
    pts = list(points)
    if L_subset is not None:
        keep = set(L_subset)
        pts = [pt for pt in pts if pt.L in keep]
    if len({pt.L for pt in pts}) < 3:
        raise ValueError("need at least 3 distinct L")
    if len({pt.p for pt in pts}) < 4:
        raise ValueError("need at least 4 distinct p")

    pvals = np.array([pt.p for pt in pts])
    Lvals = np.array([pt.L for pt in pts], dtype=float)
    N = np.array([pt.n_total for pt in pts], dtype=float)
    y = np.array([pt.p_succ for pt in pts])
    yc = np.clip(y, 1.0 / (2 * N), 1.0 - 1.0 / (2 * N))
    sigma = np.sqrt(yc * (1.0 - yc) / N)

    p_lo, p_hi = float(pvals.min()), float(pvals.max())
    bounds = {"p_th": (p_lo, p_hi), "nu": NU_BOUNDS, "mu": MU_BOUNDS}

    # success fractions identical across L at every p leave the crossing point
    # unconstrained; flag it rather than reporting an arbitrary minimum
    degenerate = all(
        np.ptp(y[pvals == p]) < 1e-15 and len(set(Lvals[pvals == p])) > 1
        for p in np.unique(pvals)
    )

    p_grid = np.linspace(p_lo, p_hi, 17)
    nu_grid = np.geomspace(*NU_BOUNDS, 7)
    mu_grid = np.geomspace(*MU_BOUNDS, 7)
    best = None
    for nu in nu_grid:
        for mu in mu_grid:
            for p_th in p_grid:
                rss = _profile(pvals, Lvals, y, sigma, (p_th, nu, mu))[0]
                if best is None or rss < best[0]:
                    best = (rss, (p_th, nu, mu))

    res = minimize(
        lambda th: _profile(pvals, Lvals, y, sigma, th)[0],
        x0=np.array(best[1]),
        method="Nelder-Mead",
        bounds=[bounds["p_th"], NU_BOUNDS, MU_BOUNDS],
        options={"xatol": 1e-7, "fatol": 1e-12, "maxiter": 4000},
    )
    p_th, nu, mu = (float(v) for v in res.x)
    rss, beta, rank = _profile(pvals, Lvals, y, sigma, (p_th, nu, mu))
    if rank < 4:
        degenerate = True

    # a flat profile in p_th means the data never pin the crossing
    prof = [_profile(pvals, Lvals, y, sigma, (pt, nu, mu))[0] for pt in p_grid]
    if (max(prof) - min(prof)) <= 1e-6 * max(min(prof), 1e-300):
        degenerate = True

    span = p_hi - p_lo
    extrapolated = p_th <= p_lo + 1e-9 * span or p_th >= p_hi - 1e-9 * span
    A, B, C, D = (float(b) for b in beta)
    meta = {
        "n_points": len(pts),
        "d_values": sorted({int(pt.d) for pt in pts}),
        "L_values": sorted({int(pt.L) for pt in pts}),
        "L_subset": sorted(int(x) for x in L_subset) if L_subset is not None else None,
    }
    return FitResult(A, B, C, D, p_th, nu, mu, rss, degenerate, extrapolated, bounds, meta)


# ---------------------------------------------------------------------------
# hashing bounds


def _entropy_term(q):
    return 0.0 if q == 0.0 else -q * math.log2(q)


def _bisect(f, lo, hi, tol=1e-9):
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo < 0.0) == (fhi < 0.0):
        raise ValueError(f"no root in ({lo}, {hi})")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if (f(mid) < 0.0) == (flo < 0.0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def hashing_threshold(d, model="independent"):
    """Error rate at which the hashing-bound rate R = log2(d) - H hits zero.

    independent: X and Z channels each carry rate p over d-1 symmetric
    nonidentity outcomes, so the joint entropy is twice the single-channel
    entropy H_d(p) = -(1-p)log2(1-p) - p log2(p/(d-1)).
    depolarizing (d=2 only): H({1-p, p/3, p/3, p/3}) = 1.
    """
    if model == "independent":
        if not _is_prime(d):
            raise ValueError("independent model needs prime d")
        target = math.log2(d)

        def f(p):
            h = _entropy_term(1.0 - p) + _entropy_term(p) + p * math.log2(d - 1)
            return 2.0 * h - target

        return _bisect(f, 1e-12, (d - 1) / d - 1e-12)
    if model == "depolarizing":
        if d != 2:
            raise ValueError("depolarizing model is defined for d=2")

        def f(p):
            return _entropy_term(1.0 - p) + _entropy_term(p) + p * math.log2(3.0) - 1.0

        return _bisect(f, 1e-12, 0.75 - 1e-12)
    raise ValueError(f"unknown model {model!r}")


# ---------------------------------------------------------------------------
# curve files


def write_curve_csv(path, points, comments=()):
    """Write points under the standard header, preceded by '#' comment lines."""
    with open(path, "w", newline="") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        w = csv.writer(fh)
        w.writerow(CURVE_HEADER.split(","))
        for pt in points:
            w.writerow([pt.d, pt.L, repr(pt.p), pt.n_success, pt.n_total])


def read_curve_csv(path):
    points = []
    with open(path, newline="") as fh:
        rows = csv.reader(line for line in fh if not line.startswith("#"))
        header = next(rows)
        if header != CURVE_HEADER.split(","):
            raise ValueError(f"unexpected curve header {header!r}")
        for row in rows:
            if not row:
                continue
            d, L, p, ns, nt = row
            points.append(CurvePoint(int(d), int(L), float(p), int(ns), int(nt)))
    return points
