"""Conventions of the code lattice: syndromes, classes, transport, sampling."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qtc.lattice import (
    CodeParams,
    DecoderContractError,
    ErrorConfig,
    NoiseParams,
    _is_prime,
    compute_syndrome,
    is_success,
    logical_class,
    make_rng,
    move_charge,
    sample_errors,
)


def random_error(params, p, seed):
    return sample_errors(params, NoiseParams(p), make_rng(seed, 0))


def apply_stabilizer(err, r, c, a):
    """Add ``a`` times the vertex operator at (r, c) to ``err`` in place."""
    L, d = err.params.L, err.params.d
    err.h[r, c] = (err.h[r, c] + a) % d
    err.h[r, (c - 1) % L] = (err.h[r, (c - 1) % L] - a) % d
    err.v[r, c] = (err.v[r, c] + a) % d
    err.v[(r - 1) % L, c] = (err.v[(r - 1) % L, c] - a) % d


# ---------------------------------------------------------------------------
# parameter validation


@pytest.mark.parametrize("d", [2, 3, 5, 7, 101, 1009])
def test_prime_dimensions_accepted(d):
    assert CodeParams(4, d).d == d


@pytest.mark.parametrize("d", [0, 1, 4, 6, 8, 9, 15, 1000])
def test_composite_dimensions_rejected(d):
    with pytest.raises(ValueError):
        CodeParams(4, d)


def test_tiny_lattice_rejected():
    with pytest.raises(ValueError):
        CodeParams(1, 3)


def test_edge_and_plaquette_counts():
    params = CodeParams(6, 3)
    assert params.n_edges == 72
    assert params.n_plaquettes == 36


def test_noise_rate_validated():
    NoiseParams(0.0)
    NoiseParams(1.0)
    with pytest.raises(ValueError):
        NoiseParams(-0.01)
    with pytest.raises(ValueError):
        NoiseParams(1.01)


def test_is_prime_matches_trial_division():
    def slow(n):
        if n < 2:
            return False
        f = 2
        while f * f <= n:
            if n % f == 0:
                return False
            f += 1
        return True

    for n in range(200):
        assert _is_prime(n) == slow(n), n
    assert _is_prime(15485863)  # the 10^6-th prime
    assert not _is_prime(15485862)
    assert not _is_prime(3215031751)  # strong pseudoprime to bases 2,3,5,7


# ---------------------------------------------------------------------------
# serialization


def test_flat_layout_places_edges_where_documented():
    params = CodeParams(5, 7)
    e = ErrorConfig.zeros(params)
    e.h[1, 2] = 3
    e.v[2, 1] = 4
    flat = e.to_array()
    assert flat.shape == (2 * 25,)
    assert flat[1 * 5 + 2] == 3
    assert flat[25 + 2 * 5 + 1] == 4
    assert flat.sum() == 7


@given(seed=st.integers(0, 2**32 - 1), L=st.integers(2, 6), d=st.sampled_from([2, 3, 5, 7]))
@settings(max_examples=40, deadline=None)
def test_serialization_roundtrip(seed, L, d):
    params = CodeParams(L, d)
    e = random_error(params, 0.4, seed)
    back = ErrorConfig.from_array(params, e.to_array())
    assert np.array_equal(back.h, e.h)
    assert np.array_equal(back.v, e.v)


def test_from_array_rejects_bad_shape():
    params = CodeParams(4, 3)
    with pytest.raises(ValueError):
        ErrorConfig.from_array(params, np.zeros(31, dtype=np.int64))


def test_sub_is_elementwise_difference_mod_d():
    params = CodeParams(4, 5)
    a = random_error(params, 0.5, 11)
    b = random_error(params, 0.5, 12)
    diff = a.sub(b)
    assert np.array_equal(diff.to_array(), (a.to_array() - b.to_array()) % 5)


# ---------------------------------------------------------------------------
# syndrome structure


def test_single_horizontal_edge_charges_the_two_adjacent_faces():
    params = CodeParams(8, 5)
    for (r, c, a) in [(0, 0, 1), (3, 5, 2), (7, 7, 4), (0, 2, 3)]:
        e = ErrorConfig.zeros(params)
        e.h[r, c] = a
        S = compute_syndrome(e).charges
        assert S[r, c] == a
        assert S[(r - 1) % 8, c] == (-a) % 5
        assert np.count_nonzero(S) == 2


def test_single_vertical_edge_charges_the_two_adjacent_faces():
    params = CodeParams(8, 5)
    for (r, c, a) in [(0, 0, 1), (2, 6, 3), (7, 0, 4)]:
        e = ErrorConfig.zeros(params)
        e.v[r, c] = a
        S = compute_syndrome(e).charges
        assert S[r, (c - 1) % 8] == a
        assert S[r, c] == (-a) % 5
        assert np.count_nonzero(S) == 2


@given(seed=st.integers(0, 2**32 - 1), L=st.integers(2, 8), d=st.sampled_from([2, 3, 5, 7]))
@settings(max_examples=60, deadline=None)
def test_total_charge_vanishes(seed, L, d):
    params = CodeParams(L, d)
    e = random_error(params, 0.5, seed)
    S = compute_syndrome(e)
    assert S.total_charge() == 0


@given(sa=st.integers(0, 2**32 - 1), sb=st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_syndrome_is_linear(sa, sb):
    params = CodeParams(6, 5)
    a = random_error(params, 0.4, sa)
    b = random_error(params, 0.4, sb)
    ab = ErrorConfig.from_array(params, a.to_array() + b.to_array())
    Sa = compute_syndrome(a).charges
    Sb = compute_syndrome(b).charges
    assert np.array_equal(compute_syndrome(ab).charges, (Sa + Sb) % 5)


def test_vertex_operators_are_syndrome_free():
    params = CodeParams(6, 7)
    e = ErrorConfig.zeros(params)
    for (r, c, a) in [(0, 0, 1), (5, 5, 3), (2, 4, 6), (0, 3, 2)]:
        apply_stabilizer(e, r, c, a)
        assert compute_syndrome(e).n_charged == 0
    assert e.weight > 0
    assert logical_class(e) == (0, 0)


def test_nonzero_lists_charges_in_row_major_order():
    params = CodeParams(4, 3)
    e = ErrorConfig.zeros(params)
    e.h[2, 1] = 1
    e.h[0, 3] = 2
    rows, cols, q = compute_syndrome(e).nonzero()
    flat = rows * 4 + cols
    assert np.all(np.diff(flat) > 0)
    assert q.size == 4


# ---------------------------------------------------------------------------
# logical classes


def test_column_of_horizontal_edges_is_a_logical_cycle():
    params = CodeParams(6, 5)
    e = ErrorConfig.zeros(params)
    e.h[:, 2] = 3
    assert compute_syndrome(e).n_charged == 0
    assert logical_class(e) == (3, 0)


def test_row_of_vertical_edges_is_the_other_logical_cycle():
    params = CodeParams(6, 5)
    e = ErrorConfig.zeros(params)
    e.v[4, :] = 2
    assert compute_syndrome(e).n_charged == 0
    assert logical_class(e) == (0, 2)


def test_logical_class_requires_trivial_syndrome():
    params = CodeParams(4, 3)
    e = ErrorConfig.zeros(params)
    e.h[1, 1] = 1
    with pytest.raises(ValueError):
        logical_class(e)


@given(seed=st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_winding_sums_are_row_and_column_independent(seed):
    """For trivial-syndrome configurations every row gives the same w1 etc."""
    L, d = 6, 7
    params = CodeParams(L, d)
    rng = np.random.default_rng(seed)
    e = ErrorConfig.zeros(params)
    for _ in range(10):
        apply_stabilizer(e, int(rng.integers(L)), int(rng.integers(L)), int(rng.integers(1, d)))
    e.h[:, 1] = (e.h[:, 1] + rng.integers(d)) % d
    e.v[3, :] = (e.v[3, :] + rng.integers(d)) % d
    assert compute_syndrome(e).n_charged == 0
    w1, w2 = logical_class(e)
    for r in range(L):
        assert int(e.h[r, :].sum() % d) == w1
    for c in range(L):
        assert int(e.v[:, c].sum() % d) == w2


# ---------------------------------------------------------------------------
# success predicate


def test_success_accepts_exact_and_stabilizer_equivalent_corrections():
    params = CodeParams(6, 5)
    e = random_error(params, 0.2, 99)
    assert is_success(e, e.copy())
    twisted = e.copy()
    apply_stabilizer(twisted, 2, 3, 4)
    assert is_success(e, twisted)


def test_success_rejects_corrections_off_by_a_logical():
    params = CodeParams(6, 5)
    e = random_error(params, 0.2, 7)
    bad = e.copy()
    bad.h[:, 0] = (bad.h[:, 0] + 1) % 5
    assert compute_syndrome(bad).n_charged == compute_syndrome(e).n_charged
    assert not is_success(e, bad)


def test_success_raises_on_syndrome_mismatch():
    params = CodeParams(4, 3)
    e = ErrorConfig.zeros(params)
    e.h[1, 1] = 1
    with pytest.raises(DecoderContractError):
        is_success(e, ErrorConfig.zeros(params))


# ---------------------------------------------------------------------------
# charge transport


def test_moving_a_charge_onto_its_partner_reconstructs_the_error():
    params = CodeParams(8, 5)
    e = ErrorConfig.zeros(params)
    e.h[3, 4] = 2  # charges: +2 at (3,4), -2 at (2,4)
    acc = ErrorConfig.zeros(params)
    move_charge(acc, (3, 4), (2, 4), 2)  # move the +2 up onto the -2
    assert np.array_equal(acc.h, e.h)
    assert np.array_equal(acc.v, e.v)


@pytest.mark.parametrize(
    "frm,to", [((2, 2), (3, 2)), ((2, 2), (1, 2)), ((2, 2), (2, 3)), ((2, 2), (2, 1)), ((0, 0), (5, 0)), ((0, 5), (0, 0))]
)
def test_move_charge_updates_residual_syndrome(frm, to):
    params = CodeParams(6, 7)
    acc = ErrorConfig.zeros(params)
    move_charge(acc, frm, to, 3)
    S = compute_syndrome(acc).charges
    assert S[frm] == 3  # so the residual W - S(acc) drops by 3 at frm ...
    assert S[to] == (-3) % 7  # ... and gains 3 at to
    assert np.count_nonzero(S) == 2


def test_move_charge_rejects_non_adjacent_plaquettes():
    params = CodeParams(6, 3)
    acc = ErrorConfig.zeros(params)
    with pytest.raises(ValueError):
        move_charge(acc, (0, 0), (1, 1), 1)
    with pytest.raises(ValueError):
        move_charge(acc, (0, 0), (0, 0), 1)


def test_transport_around_a_loop_changes_the_logical_class():
    params = CodeParams(6, 5)
    acc = ErrorConfig.zeros(params)
    for r in range(6):
        move_charge(acc, (r, 2), ((r + 1) % 6, 2), 1)
    assert compute_syndrome(acc).n_charged == 0
    assert logical_class(acc) == ((-1) % 5, 0)


def test_worked_transport_example_d3():
    params = CodeParams(4, 3)
    acc = ErrorConfig.zeros(params)
    move_charge(acc, (1, 1), (1, 2), 2)  # rightward move touches v(1, 2)
    assert acc.v[1, 2] == 2
    assert acc.weight == 1
    move_charge(acc, (1, 2), (1, 1), 2)  # moving back cancels exactly
    assert acc.weight == 0


# ---------------------------------------------------------------------------
# sampling and seeding


def test_rng_streams_are_reproducible_and_keyed():
    a1 = make_rng(123, 5).random(8)
    a2 = make_rng(123, 5).random(8)
    b = make_rng(123, 6).random(8)
    c = make_rng(124, 5).random(8)
    assert np.array_equal(a1, a2)
    assert not np.array_equal(a1, b)
    assert not np.array_equal(a1, c)


def test_sample_errors_extremes():
    params = CodeParams(8, 3)
    zero = sample_errors(params, NoiseParams(0.0), make_rng(0, 0))
    assert zero.weight == 0
    full = sample_errors(params, NoiseParams(1.0), make_rng(0, 0))
    assert full.weight == 2 * 64
    flat = full.to_array()
    assert flat.min() >= 1 and flat.max() <= 2


def test_sample_errors_marginal_rate():
    params = CodeParams(64, 5)
    counts = 0
    trials = 30
    for i in range(trials):
        counts += sample_errors(params, NoiseParams(0.1), make_rng(2024, i)).weight
    n = trials * 2 * 64 * 64
    rate = counts / n
    sigma = np.sqrt(0.1 * 0.9 / n)
    assert abs(rate - 0.1) < 5 * sigma


def test_sample_errors_uses_all_exponents_uniformly():
    params = CodeParams(64, 7)
    e = sample_errors(params, NoiseParams(1.0), make_rng(4, 0))
    hist = np.bincount(e.to_array(), minlength=7)
    assert hist[0] == 0
    assert hist[1:].min() > 0.8 * 2 * 64 * 64 / 6
