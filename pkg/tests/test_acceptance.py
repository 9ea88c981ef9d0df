"""Desk-scale acceptance campaigns for the headline results.

Every test prints one "ACCEPTANCE <n> ...: PASS/FAIL" line with the measured
numbers (visible with -s, and in the captured output of any failure).  All
seeds are fixed; campaigns run on one core in tens of minutes total.
"""

import itertools

import numpy as np
import pytest

from qtc.lattice import (
    CodeParams,
    NoiseParams,
    compute_syndrome,
    make_rng,
    sample_errors,
)
from qtc.percolation import percolation_sample, site_percolation_sample
from qtc.sdrg import cell_class_probs, compute_messages, sdrg_decode
from qtc.stats import CurvePoint, estimate_success, fit_threshold, hashing_threshold

pytestmark = pytest.mark.acceptance

SEED = 20260825
SIZES = (16, 32, 64)


def report(num, name, ok, detail):
    print(f"\nACCEPTANCE {num} {name}: {'PASS' if ok else 'FAIL'} - {detail}")
    return ok


def campaign(decoder, d, Ls, ps, n, seed, **kw):
    return [
        estimate_success(decoder, CodeParams(L, d), NoiseParams(float(p)), n, seed, **kw)
        for L in Ls
        for p in ps
    ]


def grid(a, b, step):
    return [round(p, 10) for p in np.arange(a, b + step / 2, step)]


def crossing_of(pairs):
    """Linear-interpolated sign changes of the difference of two size curves.

    Only the stretch between the difference's extrema is scanned, so noise
    flips in the saturated tails (both curves near 0 or 1) are ignored.
    """
    roots = []
    for ps, g in pairs:
        i0, i1 = sorted((int(np.argmax(g)), int(np.argmin(g))))
        seg_p, seg_g = ps[i0:i1 + 1], g[i0:i1 + 1]
        for (p1, g1), (p2, g2) in zip(zip(seg_p, seg_g), zip(seg_p[1:], seg_g[1:])):
            if g1 == g2 or (g1 < 0) == (g2 < 0):
                continue
            roots.append(p1 + (p2 - p1) * (-g1) / (g2 - g1))
    return roots


def test_criterion_01_qubit_hdrg_threshold():
    pts = campaign("hdrg", 2, SIZES, grid(0.06, 0.10, 0.005), 10000, SEED)
    fit = fit_threshold(pts)
    ok = 0.075 <= fit.p_th <= 0.095
    assert report(1, "qubit hdrg threshold", ok,
                  f"p_th={fit.p_th:.4f} target [0.075, 0.095] nu={fit.nu:.2f}")


def test_criterion_02_threshold_rises_with_dimension():
    p2 = fit_threshold(campaign("hdrg", 2, SIZES, grid(0.06, 0.10, 0.005), 10000, SEED)).p_th
    p3 = fit_threshold(campaign("hdrg", 3, SIZES, grid(0.105, 0.145, 0.005), 10000, SEED)).p_th
    p5 = fit_threshold(campaign("hdrg", 5, SIZES, grid(0.115, 0.155, 0.005), 10000, SEED)).p_th
    ok = p2 < p3 < p5
    assert report(2, "threshold rises with d", ok,
                  f"p_th(2)={p2:.4f} < p_th(3)={p3:.4f} < p_th(5)={p5:.4f}")


def test_criterion_03_high_d_saturation():
    ps = grid(0.14, 0.175, 0.005)
    f101 = fit_threshold(campaign("hdrg", 101, SIZES, ps, 5000, SEED))
    f1009 = fit_threshold(campaign("hdrg", 1009, SIZES, ps, 5000, SEED))
    ok = (0.15 <= f101.p_th <= 0.21 and 0.15 <= f1009.p_th <= 0.21
          and abs(f101.p_th - f1009.p_th) < 0.02)
    assert report(3, "high-d saturation", ok,
                  f"p_th(101)={f101.p_th:.4f} p_th(1009)={f1009.p_th:.4f} "
                  f"target [0.15, 0.21], gap < 0.02")


def spanning_fraction(d, L, p, n, seed, site=False):
    if site:
        return sum(site_percolation_sample(L, p, (seed, i)) for i in range(n)) / n
    params, noise = CodeParams(L, d), NoiseParams(p)
    return sum(percolation_sample(params, noise, (seed, i)).spans for i in range(n)) / n


def test_criterion_04a_qubit_spanning_symmetry():
    n, L = 10000, 64
    details, ok = [], True
    for p in (0.35, 0.45):
        f1 = spanning_fraction(2, L, p, n, SEED)
        f2 = spanning_fraction(2, L, 1 - p, n, SEED + 1)
        sig = np.sqrt(f1 * (1 - f1) / n + f2 * (1 - f2) / n)
        ok &= abs(f1 - f2) <= max(3 * sig, 1e-12)
        details.append(f"f({p})={f1:.4f} f({1 - p})={f2:.4f} 3sig={3 * sig:.4f}")
    assert report("4a", "qubit spanning symmetry", ok, "; ".join(details))


def test_criterion_04b_high_d_percolation_threshold():
    Ls, ps, n = (32, 64, 128), grid(0.14, 0.22, 0.01), 10000
    curves = {L: [spanning_fraction(101, L, p, n, SEED + L) for p in ps] for L in Ls}
    pairs = [
        (ps, [a - b for a, b in zip(curves[L1], curves[L2])])
        for L1, L2 in itertools.combinations(Ls, 2)
    ]
    roots = crossing_of(pairs)
    est = float(np.mean(roots)) if roots else float("nan")
    ok = bool(roots) and abs(est - 0.18) <= 0.02
    assert report("4b", "high-d percolation threshold", ok,
                  f"crossings={[f'{r:.3f}' for r in roots]} mean={est:.4f} target 0.18+-0.02")


def test_criterion_04c_site_mode_calibration():
    Ls, ps, n = (32, 64, 128), grid(0.58, 0.61, 0.005), 10000
    curves = {L: [spanning_fraction(0, L, p, n, SEED + L, site=True) for p in ps] for L in Ls}
    pairs = [
        (ps, [a - b for a, b in zip(curves[L1], curves[L2])])
        for L1, L2 in itertools.combinations(Ls, 2)
    ]
    roots = crossing_of(pairs)
    est = float(np.mean(roots)) if roots else float("nan")
    ok = bool(roots) and abs(est - 0.5927) <= 0.005
    assert report("4c", "site percolation calibration", ok,
                  f"crossings={[f'{r:.4f}' for r in roots]} mean={est:.4f} target 0.5927+-0.005")


def test_criterion_05_enhanced_direction_checks():
    n = 1000
    plain2 = fit_threshold(campaign("hdrg", 2, SIZES, grid(0.06, 0.10, 0.005), n, SEED)).p_th
    init2 = fit_threshold(campaign("enhanced", 2, SIZES, grid(0.04, 0.09, 0.005), n, SEED,
                                   depth=(1, 0))).p_th
    qubit_ok = init2 < plain2

    d7 = []
    for L in (16, 32):
        a = estimate_success("hdrg", CodeParams(L, 7), NoiseParams(0.20), n, SEED)
        b = estimate_success("enhanced", CodeParams(L, 7), NoiseParams(0.20), n, SEED,
                             depth=(2, 1))
        d7.append((L, a.p_succ, b.p_succ))
    # pooled over the two sizes; per-size values are reported below
    d7_ok = sum(b for _, _, b in d7) > sum(a for _, a, _ in d7)

    enh101 = fit_threshold(campaign("enhanced", 101, SIZES, grid(0.20, 0.26, 0.01), n, SEED,
                                    depth=(2, 1))).p_th
    high_ok = enh101 > 0.21

    ok = qubit_ok and d7_ok and high_ok
    assert report(5, "enhanced direction checks", ok,
                  f"d=2: init {init2:.4f} < plain {plain2:.4f} ({qubit_ok}); "
                  f"d=7 p=0.20: {['L%d %.3f->%.3f' % t for t in d7]} ({d7_ok}); "
                  f"d=101 init(2,1): p_th={enh101:.4f} > 0.21 ({high_ok})")


# brute-force reference for the five-edge cell, independent of the decoder path
def _cell_coeffs(e, d):
    e1, e2, e3, e4, e5 = e
    return (e4 - e1 - e2 + e3) % d, e1, (e5 + e2) % d


def _oracle_table(d, a, p1, ql, qr, p4, p5):
    tab = np.zeros((d, d))
    for e in itertools.product(range(d), repeat=5):
        ca, h1, h2 = _cell_coeffs(e, d)
        if ca == a % d:
            tab[h1, h2] += p1[e[0]] * ql[e[1]] * qr[e[2]] * p4[e[3]] * p5[e[4]]
    return tab / tab.sum()


def _oracle_msgs(d, a, p1, p2, p3, p4, p5, ql, qr):
    Lm, Rm = np.zeros(d), np.zeros(d)
    for e in itertools.product(range(d), repeat=5):
        if _cell_coeffs(e, d)[0] == a % d:
            Lm[e[1]] += p1[e[0]] * p2[e[1]] * qr[e[2]] * p4[e[3]] * p5[e[4]]
            Rm[e[2]] += p1[e[0]] * ql[e[1]] * p3[e[2]] * p4[e[3]] * p5[e[4]]
    return Lm / Lm.sum(), Rm / Rm.sum()


def test_criterion_06_cell_oracle_equivalence():
    worst = 0.0
    for d in (2, 3, 5):
        rng = np.random.default_rng(SEED + d)
        for _ in range(100):
            p1, p2, p3, p4, p5, ql, qr = (rng.dirichlet(np.ones(d)) for _ in range(7))
            a = int(rng.integers(d))
            tab = cell_class_probs(p1, p4, p5, ql, qr, a)
            worst = max(worst, float(np.abs(tab - _oracle_table(d, a, p1, ql, qr, p4, p5)).max()))
            Lg, Rg = compute_messages(p1, p2, p3, p4, p5, ql, qr, a)
            Lw, Rw = _oracle_msgs(d, a, p1, p2, p3, p4, p5, ql, qr)
            worst = max(worst, float(np.abs(Lg - Lw).max()), float(np.abs(Rg - Rw).max()))
    ok = worst <= 1e-12
    assert report(6, "cell oracle equivalence", ok,
                  f"max |difference| = {worst:.2e} over 300 instances (d in 2,3,5), target 1e-12")


def test_criterion_07_sdrg_contract_and_crossing():
    combos = list(itertools.product((2, 3, 5), (8, 16)))
    rates = (0.02, 0.05, 0.08, 0.11)
    per, checked = 1667, 0
    for d, L in combos:
        params = CodeParams(L, d)
        for i in range(per):
            noise = NoiseParams(rates[i % len(rates)])
            W = compute_syndrome(sample_errors(params, noise, make_rng(SEED + 10 * d + L, i)))
            corr = sdrg_decode(W, noise)
            assert np.array_equal(compute_syndrome(corr).charges, W.charges)
            checked += 1

    ps = (0.04, 0.065, 0.09, 0.115, 0.14)
    f16 = [estimate_success("sdrg", CodeParams(16, 3), NoiseParams(p), 2000, SEED).p_succ
           for p in ps]
    f32 = [estimate_success("sdrg", CodeParams(32, 3), NoiseParams(p), 2000, SEED).p_succ
           for p in ps]
    g = [a - b for a, b in zip(f16, f32)]
    roots = crossing_of([(ps, g)])
    ok = bool(roots) and all(0.04 <= r <= 0.14 for r in roots)
    assert report(7, "sdrg contract and qutrit crossing", ok,
                  f"{checked} syndromes reproduced exactly; f16={f16} f32={f32} "
                  f"crossings={[f'{r:.3f}' for r in roots]} target in [0.04, 0.14]")


def test_criterion_08_hashing_bounds():
    primes = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67,
              71, 73, 79, 83, 89, 97]
    ind2 = hashing_threshold(2, "independent")
    dep2 = hashing_threshold(2, "depolarizing")
    seq = [hashing_threshold(q) for q in primes]
    big = hashing_threshold(15485863)
    huge = hashing_threshold(2**1279 - 1)
    checks = [
        ("independent(2)", abs(ind2 - 0.110028) < 1e-6, f"{ind2:.6f}"),
        ("depolarizing(2)", abs(dep2 - 0.1893) < 5e-4, f"{dep2:.6f}"),
        ("monotone 2..97", all(a < b for a, b in zip(seq, seq[1:])), f"{seq[0]:.4f}..{seq[-1]:.4f}"),
        ("limit at 15485863", abs(big - 0.5) < 1e-3, f"{big:.6f}"),
    ]
    ok = all(c[1] for c in checks)
    report(8, "hashing bounds", ok,
           "; ".join(f"{name}={'ok' if good else 'FAIL'} ({val})" for name, good, val in checks)
           + f"; note: gap to 0.5 closes as ~1/log2(d) - at 2^1279-1 the value is {huge:.6f}")
    for name, good, val in checks:
        assert good, (f"{name} = {val}: the bound approaches 0.5 only logarithmically in d, "
                      f"so this tolerance needs ~1000-bit d (2^1279-1 gives {huge:.6f}); "
                      "see the decisions ledger")


def test_criterion_09_fit_roundtrip_ensemble():
    truth = dict(A=0.9, B=-2.0, C=-10.0, D=0.05, p_th=0.084, nu=1.85, mu=0.46)
    Ls, ps, n = (16, 32, 64), grid(0.06, 0.10, 0.005), 10000
    hits = 0
    for trial in range(100):
        rng = np.random.default_rng(SEED + trial)
        pts = []
        for L in Ls:
            for p in ps:
                x = (p - truth["p_th"]) * L ** (1 / truth["nu"])
                y = (truth["A"] + truth["B"] * x + truth["C"] * x * x
                     + truth["D"] * L ** (-1 / truth["mu"]))
                pts.append(CurvePoint(2, L, p, int(rng.binomial(n, min(max(y, 0), 1))), n))
        fit = fit_threshold(pts)
        hits += abs(fit.p_th - truth["p_th"]) <= 1e-3
    ok = hits >= 95
    assert report(9, "fit roundtrip ensemble", ok,
                  f"{hits}/100 trials within 1e-3 of p_th=0.084, target >= 95")


def test_criterion_10_campaign_determinism():
    params, noise = CodeParams(16, 3), NoiseParams(0.08)
    runs = [
        campaign("hdrg", 3, (8, 16), (0.05, 0.08), 300, SEED, workers=w)
        for w in (1, 2, 4)
    ]
    point_ok = runs[0] == runs[1] == runs[2]
    single = [estimate_success("sdrg", params, noise, 60, SEED, workers=w) for w in (1, 3)]
    sdrg_ok = single[0] == single[1]
    ok = point_ok and sdrg_ok
    assert report(10, "determinism across workers", ok,
                  f"hdrg campaign identical for 1/2/4 workers ({point_ok}); "
                  f"sdrg point identical for 1/3 workers ({sdrg_ok})")
