"""Qudit toric code lattice: geometry, noise, syndromes and logical classes.

Conventions used throughout the package
---------------------------------------
The code lives on an L x L square lattice with periodic boundaries.  Qudits of
prime dimension d sit on the 2*L*L edges.  ``h[r, c]`` is the exponent of the
X-type error on the horizontal edge joining vertex (r, c) to (r, c+1 mod L);
``v[r, c]`` the one on the vertical edge joining (r, c) to (r+1 mod L, c).
Plaquette (r, c) is the face with corners (r, c) and (r+1, c+1).

Only X errors are simulated (Z errors decode independently on the dual
lattice by symmetry).  Each edge contributes its value with a + sign to one
adjacent plaquette and a - sign to the other:

    S[r, c] = h[r, c] - h[r+1, c] + v[r, c+1] - v[r, c]   (mod d)

so a single error X^a creates a charge pair {a, -a} and the total charge on
the torus is always 0 mod d.

Serialized edge order (used by ``ErrorConfig.to_array``) is the horizontal
block first, row-major, then the vertical block, row-major.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "CodeParams",
    "NoiseParams",
    "ErrorConfig",
    "SyndromeSet",
    "DecoderContractError",
    "make_rng",
    "sample_errors",
    "compute_syndrome",
    "logical_class",
    "is_success",
    "move_charge",
]


class DecoderContractError(RuntimeError):
    """A decoder returned a correction that does not reproduce the syndrome."""


def _is_prime(n: int) -> bool:
    # deterministic Miller-Rabin, valid far beyond any dimension we simulate
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    r, s = n - 1, 0
    while r % 2 == 0:
        r //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, r, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class CodeParams:
    """Lattice size L and qudit dimension d (d must be prime)."""

    L: int
    d: int

    def __post_init__(self):
        if self.L < 2:
            raise ValueError(f"lattice size must be >= 2, got L={self.L}")
        if not _is_prime(self.d):
            raise ValueError(f"qudit dimension must be prime, got d={self.d}")

    @property
    def n_edges(self) -> int:
        return 2 * self.L * self.L

    @property
    def n_plaquettes(self) -> int:
        return self.L * self.L


@dataclass(frozen=True)
class NoiseParams:
    """Independent X noise: an edge is X^j (j uniform in 1..d-1) with prob p."""

    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"error rate must lie in [0, 1], got p={self.p}")


@dataclass
class ErrorConfig:
    """An X-error (or correction) configuration: one Z_d entry per edge."""

    params: CodeParams
    h: np.ndarray  # [L, L] int64, horizontal edges
    v: np.ndarray  # [L, L] int64, vertical edges

    @classmethod
    def zeros(cls, params: CodeParams) -> "ErrorConfig":
        L = params.L
        return cls(params, np.zeros((L, L), dtype=np.int64), np.zeros((L, L), dtype=np.int64))

    def to_array(self) -> np.ndarray:
        """Serialize: horizontal block row-major, then vertical block row-major."""
        return np.concatenate([self.h.ravel(), self.v.ravel()])

    @classmethod
    def from_array(cls, params: CodeParams, flat: np.ndarray) -> "ErrorConfig":
        L = params.L
        flat = np.asarray(flat, dtype=np.int64) % params.d
        if flat.shape != (2 * L * L,):
            raise ValueError(f"expected {2 * L * L} edge values, got shape {flat.shape}")
        return cls(params, flat[: L * L].reshape(L, L).copy(), flat[L * L :].reshape(L, L).copy())

    def sub(self, other: "ErrorConfig") -> "ErrorConfig":
        """Edge-wise difference self - other mod d (the residual operator)."""
        d = self.params.d
        return ErrorConfig(self.params, (self.h - other.h) % d, (self.v - other.v) % d)

    def copy(self) -> "ErrorConfig":
        return ErrorConfig(self.params, self.h.copy(), self.v.copy())

    @property
    def weight(self) -> int:
        return int(np.count_nonzero(self.h) + np.count_nonzero(self.v))


@dataclass
class SyndromeSet:
    """Plaquette charges.  ``charges[r, c]`` in Z_d; zero means unlit."""

    params: CodeParams
    charges: np.ndarray  # [L, L] int64

    @classmethod
    def zeros(cls, params: CodeParams) -> "SyndromeSet":
        return cls(params, np.zeros((params.L, params.L), dtype=np.int64))

    def nonzero(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Charged plaquettes in row-major order: (rows, cols, charges)."""
        rows, cols = np.nonzero(self.charges)
        return rows, cols, self.charges[rows, cols]

    @property
    def n_charged(self) -> int:
        return int(np.count_nonzero(self.charges))

    def total_charge(self) -> int:
        return int(self.charges.sum() % self.params.d)

    def copy(self) -> "SyndromeSet":
        return SyndromeSet(self.params, self.charges.copy())


def make_rng(master_seed: int, sample_index: int) -> np.random.Generator:
    """Counter-based generator keyed by (master seed, sample index).

    Each Monte Carlo trial gets its own key, so results do not depend on how
    trials are distributed over workers.
    """
    key = np.array([master_seed % 2**64, sample_index % 2**64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_errors(params: CodeParams, noise: NoiseParams, rng: np.random.Generator) -> ErrorConfig:
    """Draw an i.i.d. X-error configuration.

    Stream layout is fixed (uniforms for both edge blocks, then exponents) so a
    given generator state always yields the same configuration.
    """
    L, d = params.L, params.d
    u = rng.random(size=(2, L, L))
    k = rng.integers(1, d, size=(2, L, L), dtype=np.int64)  # all-ones when d == 2
    e = np.where(u < noise.p, k, 0)
    return ErrorConfig(params, e[0], e[1])


def compute_syndrome(err: ErrorConfig) -> SyndromeSet:
    """Oriented plaquette charges of an error configuration."""
    d = err.params.d
    h, v = err.h, err.v
    charges = (h - np.roll(h, -1, axis=0) + np.roll(v, -1, axis=1) - v) % d
    return SyndromeSet(err.params, charges)


def logical_class(err: ErrorConfig) -> tuple[int, int]:
    """Winding pair (w1, w2) of a syndrome-free configuration.

    w1 sums the horizontal edges of row 0, w2 the vertical edges of column 0;
    for trivial-syndrome configurations these sums are independent of the row /
    column chosen.  (0, 0) means the configuration acts trivially on the
    encoded information.
    """
    syn = compute_syndrome(err)
    if syn.n_charged:
        raise ValueError("logical class is only defined for trivial-syndrome configurations")
    d = err.params.d
    return int(err.h[0, :].sum() % d), int(err.v[:, 0].sum() % d)


def is_success(error: ErrorConfig, correction: ErrorConfig) -> bool:
    """True iff the correction undoes the error up to stabilizers.

    Requires syndrome(correction) == syndrome(error); a mismatch is a decoder
    bug, reported as :class:`DecoderContractError` rather than counted as a
    logical failure.
    """
    se = compute_syndrome(error)
    sc = compute_syndrome(correction)
    if not np.array_equal(se.charges, sc.charges):
        raise DecoderContractError("correction does not reproduce the measured syndrome")
    return logical_class(error.sub(correction)) == (0, 0)


def move_charge(acc: ErrorConfig, frm: tuple[int, int], to: tuple[int, int], charge: int) -> None:
    """Transport ``charge`` between adjacent plaquettes, recording it in ``acc``.

    Updates ``acc`` on the shared edge so that, re-evaluating the residual
    syndrome (measured minus syndrome(acc)), the charge at ``frm`` decreases by
    ``charge`` and the charge at ``to`` increases by the same amount.
    """
    L, d = acc.params.L, acc.params.d
    r1, c1 = frm[0] % L, frm[1] % L
    r2, c2 = to[0] % L, to[1] % L
    dr = (r2 - r1) % L
    dc = (c2 - c1) % L
    if dc == 0 and dr == 1:  # down: shared edge h(r1+1, c1)
        acc.h[(r1 + 1) % L, c1] = (acc.h[(r1 + 1) % L, c1] - charge) % d
    elif dc == 0 and dr == L - 1:  # up: shared edge h(r1, c1)
        acc.h[r1, c1] = (acc.h[r1, c1] + charge) % d
    elif dr == 0 and dc == 1:  # right: shared edge v(r1, c1+1)
        acc.v[r1, (c1 + 1) % L] = (acc.v[r1, (c1 + 1) % L] + charge) % d
    elif dr == 0 and dc == L - 1:  # left: shared edge v(r1, c1)
        acc.v[r1, c1] = (acc.v[r1, c1] - charge) % d
    else:
        raise ValueError(f"plaquettes {frm} and {to} are not adjacent on the torus")
