"""Acceptance criteria 1-13.

Each test prints one ``PASS criterion k: ...`` or ``FAIL criterion k: ...``
line (shown even without ``-s``) and then asserts the same condition.
Monte Carlo criteria use trials 0..9 of one base seed; trial streams are
independent (Philox keyed by ``SeedSequence([seed, trial])``).
"""

import math
import time

import numpy as np
import pytest

from freedeform import freeconv as F
from freedeform import simlab as L
from freedeform.measures import Atomic, MarchenkoPastur, Semicircle, dirac
from freedeform.models import DeformedModel
from freedeform.spiked import (
    OUTLIER,
    SpikedDeformation,
    classify_spikes,
    isotropic_outliers,
    separation_map,
)
from freedeform.support import component_masses_contour, phi, support_intervals, varphi

SEEDS = 10
BASE_SEED = 20240


@pytest.fixture
def verdict(capsys):
    def report(k, ok, detail, t0):
        line = f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail} ({time.perf_counter() - t0:.1f}s)"
        with capsys.disabled():
            print("\n" + line, flush=True)
        assert ok, line

    return report


def mc(model, N, spikes=(), p=None, track=0, predictions=(), vectors=True, side="nu"):
    """Trials 0..9 of ``model`` with support-based outlier extraction."""
    spec, coords = L.ensemble_for(model, N, spikes, side=side, p=p, seed=BASE_SEED)
    desc = support_intervals(model)
    proj = [(0, coords[0])] if track and vectors else []
    return L.run_trials(spec, SEEDS, support=desc, predictions=list(predictions), projections=proj), desc


# ---------------------------------------------------------------------------
# closed-form and cross-route checks
# ---------------------------------------------------------------------------


def test_criterion_01_semicircle_oracle(verdict):
    t0 = time.perf_counter()
    z = np.linspace(-3, 3, 200) + 0.01j
    got = F.deformed_wigner_g(dirac(0.0), 1.0, z)
    closed = (z - np.sqrt(z - 2) * np.sqrt(z + 2)) / 2
    err = float(np.max(np.abs(got - closed)))
    verdict(1, err <= 1e-9 and time.perf_counter() - t0 < 1.0, f"semicircle max error {err:.2e}", t0)


def test_criterion_02_marchenko_pastur_oracle(verdict):
    t0 = time.perf_counter()
    z = np.linspace(-0.5, 6.5, 200) + 0.01j
    errs = []
    for c in (0.25, 0.5, 1.0):
        got = F.sample_cov_g(dirac(1.0), c, z)
        errs.append(float(np.max(np.abs(got - MarchenkoPastur(c).stieltjes(z)))))
    ok = max(errs) <= 1e-9 and time.perf_counter() - t0 < 1.0
    verdict(2, ok, "MP max errors " + ", ".join(f"{e:.2e}" for e in errs), t0)


def test_criterion_03_semicircle_stability(verdict):
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    z = rng.uniform(-4, 4, 100) + 1j * rng.uniform(0.01, 3, 100)
    res = F.additive_subordination(Semicircle(1.0), Semicircle(1.0), z)
    err = float(np.max(np.abs(res.g - Semicircle(math.sqrt(2)).stieltjes(z))))
    verdict(3, err <= 1e-8 and time.perf_counter() - t0 < 5.0, f"sc+sc vs sc(sqrt 2) max error {err:.2e}", t0)


def test_criterion_04_free_cumulant_additivity(verdict):
    t0 = time.perf_counter()
    rng = np.random.default_rng(42)

    def rand():
        k = rng.integers(1, 5)
        w = rng.uniform(0.2, 1, k)
        return Atomic(rng.uniform(-2, 2, k), w / w.sum())

    worst = 0.0
    for _ in range(20):
        mu, nu = rand(), rand()
        dens = F.convolve_density(DeformedModel.isotropic_additive(mu, nu))
        got = np.array(F.cumulants_from_moments([dens.moment(k) for k in range(1, 7)]))
        want = np.array(F.free_cumulant_oracle(mu, 6)) + np.array(F.free_cumulant_oracle(nu, 6))
        worst = max(worst, float(np.max(np.abs(got - want))))
    verdict(4, worst <= 1e-4, f"worst cumulant error over 20 pairs {worst:.2e}", t0)


# ---------------------------------------------------------------------------
# Monte Carlo transitions
# ---------------------------------------------------------------------------


def test_criterion_05_peche_transition(verdict):
    t0 = time.perf_counter()
    model = DeformedModel.additive(dirac(0.0), 1.0)
    sup, _ = mc(model, 2000, [(2.0, 1)], track=1, predictions=[2.5])
    top = np.mean([r.eigenvalues[0] for r in sup])
    ov = np.mean([r.overlaps[0] for r in sup])
    sub, _ = mc(model, 2000, [(0.5, 1)], vectors=False)
    top_sub = np.mean([r.eigenvalues[0] for r in sub])
    clean = sum(not r.outliers for r in sub)
    ok = abs(top - 2.5) <= 0.10 and abs(ov - 0.75) <= 0.05 and abs(top_sub - 2.0) <= 0.05 and clean >= 9
    detail = f"theta=2 mean l1 {top:.4f}, overlap {ov:.4f}; theta=0.5 mean l1 {top_sub:.4f}, no outlier in {clean}/10"
    verdict(5, ok, detail, t0)


def test_criterion_06_bbp_transition(verdict):
    t0 = time.perf_counter()
    model = DeformedModel.multiplicative(dirac(1.0), 0.5)
    sup, _ = mc(model, 2000, [(3.0, 1)], p=4000, predictions=[3.75])
    top = np.mean([r.eigenvalues[0] for r in sup])
    sub, _ = mc(model, 2000, [(1.5, 1)], p=4000)
    top_sub = np.mean([r.eigenvalues[0] for r in sub])
    clean = sum(not r.outliers for r in sub)
    edge = (1 + math.sqrt(0.5)) ** 2
    ok = abs(top - 3.75) <= 0.10 and abs(top_sub - edge) <= 0.05 and clean >= 9
    verdict(6, ok, f"pi=3 mean l1 {top:.4f}; pi=1.5 mean l1 {top_sub:.4f} (edge {edge:.4f}), no outlier in {clean}/10", t0)


def test_criterion_07_information_plus_noise(verdict):
    t0 = time.perf_counter()
    model = DeformedModel.info_plus_noise(dirac(0.0), 0.25, 1.0)
    rep = classify_spikes(SpikedDeformation(model, [(1.0, 1)]))
    res, _ = mc(model, 500, [(1.0, 1)], p=2000)
    top = np.mean([r.eigenvalues[0] for r in res])
    ok = rep.outcomes[0].classification == OUTLIER and abs(top - 2.5) <= 0.10
    verdict(7, ok, f"mean l1 {top:.4f} against 2.5", t0)


def test_criterion_08_many_to_one_outliers(verdict):
    t0 = time.perf_counter()
    mu, nu = Atomic([-1.0, 1.0]), Semicircle(0.5)
    preds = isotropic_outliers(mu, nu, 10.0, side="nu")
    model = DeformedModel.isotropic_additive(mu, nu)
    res, _ = mc(model, 1000, [(10.0, 1)], predictions=preds)
    good = 0
    for r in res:
        hits = [p for _, p, d in r.outliers if p is not None and d <= 0.10]
        good += len(r.outliers) == 2 and len(set(hits)) == 2
    ok = len(preds) == 2 and good >= 9
    verdict(8, ok, f"predictions {', '.join(f'{p:.4f}' for p in preds)}; two matched outliers in {good}/10", t0)


def test_criterion_09_exact_separation(verdict):
    t0 = time.perf_counter()
    N = 1000
    model = DeformedModel.additive(Atomic([-1.0, 1.0]), 0.5)
    sep = separation_map(SpikedDeformation(model, []), -0.1, 0.1, n=N)
    res, _ = mc(model, N, vectors=False)
    good = sum(int(np.sum(r.eigenvalues > 0.1)) == N // 2 and int(np.sum(r.eigenvalues >= -0.1)) == N // 2 for r in res)
    ok = sep.split == N // 2 and good >= 9
    verdict(9, ok, f"predicted split {sep.split}; exactly N/2 above the probe in {good}/10", t0)


# ---------------------------------------------------------------------------
# bulk and support
# ---------------------------------------------------------------------------

ESD_MODELS = {
    "additive nu=(d-1+d1)/2 sigma=1": (DeformedModel.additive(Atomic([-1.0, 1.0]), 1.0), None),
    "multiplicative nu=(d1+d4)/2 c=0.5": (DeformedModel.multiplicative(Atomic([1.0, 4.0]), 0.5), 4000),
    "info-plus-noise nu=(d1+d4)/2 sigma=1 c=0.25": (DeformedModel.info_plus_noise(Atomic([1.0, 4.0]), 0.25, 1.0), 8000),
}


def test_criterion_10_esd_fit(verdict):
    t0 = time.perf_counter()
    out, ok = [], True
    for name, (model, p) in ESD_MODELS.items():
        res, _ = mc(model, 2000, p=p, vectors=False)
        pooled = np.concatenate([r.eigenvalues for r in res])
        ks = L.empirical_stats(pooled, F.convolve_density(model))[0]
        ok &= ks <= 0.02
        out.append(f"{name}: KS {ks:.4f}")
    verdict(10, ok, "; ".join(out), t0)


def test_criterion_11_support_round_trip_and_mass(verdict):
    t0 = time.perf_counter()
    worst = 0.0
    for model in (
        DeformedModel.additive(Atomic([-1.0, 1.0]), 0.5),
        DeformedModel.multiplicative(Atomic([1.0, 4.0]), 0.5),
        DeformedModel.info_plus_noise(Atomic([1.0, 4.0]), 0.25, 1.0),
    ):
        d = support_intervals(model)
        pts = []
        for lo, hi in [(d.lo - 3.0, d.lo)] + d.gaps() + [(d.hi, d.hi + 3.0)]:
            if model.kind != "additive" and lo < 0:
                lo = min(0.5 * hi, hi - 1e-3) if hi > 0 else hi
            pts.append(np.linspace(lo, hi, 36)[1:-1])
        x = np.concatenate(pts)[:100]
        worst = max(worst, float(np.max(np.abs(phi(model, varphi(model, x)) - x))))
    mass_err = 0.0
    for nu, blocks in ((Atomic([-1.0, 1.0]), 2), (Atomic([-2.0, 0.0, 3.0], [0.3, 0.3, 0.4]), 3)):
        model = DeformedModel.additive(nu, 0.5)
        d = support_intervals(model)
        assert len(d.intervals) == blocks
        contour = component_masses_contour(lambda z: model.stieltjes(z), [(iv.lo, iv.hi) for iv in d.intervals])
        blocks_nu = [nu.mass_between(q, p) for q, p in d.preimage_intervals]
        mass_err = max(mass_err, float(np.max(np.abs(np.asarray(contour) - blocks_nu))))
    ok = worst <= 1e-6 and mass_err <= 1e-6
    verdict(11, ok, f"phi(varphi(x)) - x max {worst:.2e}; component mass vs nu block max {mass_err:.2e}", t0)


def test_criterion_12_regular_edge_exponent(verdict):
    t0 = time.perf_counter()
    model = ESD_MODELS["additive nu=(d-1+d1)/2 sigma=1"][0]
    iv = support_intervals(model).intervals[-1]
    eps = np.logspace(-3, -6, 40)
    dens = F.convolve_density(model, grid=iv.hi - eps)
    slope = float(np.polyfit(np.log(eps), np.log(dens.values), 1)[0])
    verdict(12, iv.hi_regular and abs(slope - 0.5) <= 0.1, f"log-slope at right edge {iv.hi:.6f} is {slope:.4f}", t0)


# ---------------------------------------------------------------------------
# fluctuations
# ---------------------------------------------------------------------------


@pytest.mark.slow
def test_criterion_13_fluctuation_rates(verdict):
    t0 = time.perf_counter()
    model = DeformedModel.additive(dirac(0.0), 1.0)
    edge_specs = [L.ensemble_for(model, n, seed=BASE_SEED)[0] for n in (500, 2000)]
    spike_specs = [L.ensemble_for(model, n, [(2.0, 1)], seed=BASE_SEED)[0] for n in (500, 2000)]
    rows_e, s_edge = L.fluctuation_scan(edge_specs, trials=100)
    rows_o, s_out = L.fluctuation_scan(spike_specs, trials=100)
    ok = -0.8 <= s_edge <= -0.5 and -0.65 <= s_out <= -0.35
    detail = f"regular edge slope {s_edge:.3f} (std {rows_e[0][2]:.4f} -> {rows_e[1][2]:.4f}); "
    detail += f"outlier slope {s_out:.3f} (std {rows_o[0][2]:.4f} -> {rows_o[1][2]:.4f})"
    verdict(13, ok, detail, t0)
