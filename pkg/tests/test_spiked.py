import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freedeform.errors import DomainError, GapError, NotAnOutlier
from freedeform.measures import Atomic, Semicircle, dirac
from freedeform.models import DeformedModel
from freedeform.spiked import (
    OUTLIER,
    QUANTILE,
    STICK_LEFT,
    STICK_RIGHT,
    SpikedDeformation,
    classify_spikes,
    deformation_measure,
    isotropic_outliers,
    isotropic_overlap,
    overlap,
    separation_map,
)
from freedeform.support import admissible_set, phi, support_intervals

BERNOULLI = Atomic([-1.0, 1.0])


def outcome(model, theta):
    return classify_spikes(SpikedDeformation(model, [(theta, 1)])).outcomes[0]


def test_peche_outlier():
    o = outcome(DeformedModel.additive(dirac(0.0), 1.0), 2.0)
    assert o.classification == OUTLIER
    assert o.rho_values[0] == pytest.approx(2.5)
    assert o.overlaps[0] == pytest.approx(0.75)


def test_peche_subcritical_sticks():
    o = outcome(DeformedModel.additive(dirac(0.0), 1.0), 0.5)
    assert o.classification == STICK_RIGHT
    assert o.rho_values[0] == pytest.approx(2.0, abs=1e-9)


def test_negative_spike_sticks_left():
    o = outcome(DeformedModel.additive(dirac(0.0), 1.0), -0.5)
    assert o.classification == STICK_LEFT
    assert o.rho_values[0] == pytest.approx(-2.0, abs=1e-9)


def test_bbp():
    m = DeformedModel.multiplicative(dirac(1.0), 0.5)
    rep = classify_spikes(SpikedDeformation(m, [(3.0, 1), (1.5, 2)]))
    hi, lo = rep.outcomes
    assert hi.classification == OUTLIER and hi.rho_values[0] == pytest.approx(3.75)
    assert hi.overlaps[0] == pytest.approx(0.7)
    assert lo.classification == STICK_RIGHT
    assert lo.rho_values[0] == pytest.approx((1 + math.sqrt(0.5)) ** 2, abs=1e-9)
    assert lo.multiplicity == 2


def test_info_plus_noise_outlier():
    o = outcome(DeformedModel.info_plus_noise(dirac(0.0), 0.25, 1.0), 1.0)
    assert o.rho_values[0] == pytest.approx(2.5)
    assert 0 < o.overlaps[0] <= 1


def test_quantile_case():
    # sigma = 2 glues both atoms into one block; a spike between them is absorbed
    m = DeformedModel.additive(BERNOULLI, 2.0)
    o = outcome(m, 0.25)
    assert o.classification == QUANTILE
    assert o.alpha == pytest.approx(0.5)
    assert o.rho_values[0] == pytest.approx(0.0, abs=1e-6)


def test_critical_spike_is_flagged():
    o = outcome(DeformedModel.multiplicative(dirac(1.0), 0.5), 1 + math.sqrt(0.5))
    assert o.classification == STICK_RIGHT
    assert o.critical


def test_spike_in_support_rejected():
    with pytest.raises(DomainError):
        SpikedDeformation(DeformedModel.additive(BERNOULLI, 1.0), [(1.0, 1)])


def test_overlap_contract():
    sd = SpikedDeformation(DeformedModel.additive(dirac(0.0), 1.0), [(2.0, 1), (3.0, 1)])
    assert overlap(sd, 2.0, 2.0) == pytest.approx(0.75)
    assert overlap(sd, 2.0, 3.0) == 0.0
    with pytest.raises(NotAnOutlier):
        overlap(sd, 0.5, 0.5)


def test_report_json():
    rep = classify_spikes(SpikedDeformation(DeformedModel.additive(dirac(0.0), 1.0), [(2.0, 1)])).to_dict()
    assert rep["model_digest"]
    assert rep["solver"]["tol"] == 1e-12
    assert rep["spikes"][0]["classification"] == "Outlier"


MODELS = [
    DeformedModel.additive(Atomic([-1.0, 0.5, 2.0], [0.3, 0.3, 0.4]), 0.6),
    DeformedModel.additive(BERNOULLI, 2.0),
    DeformedModel.multiplicative(Atomic([1.0, 4.0]), 0.5),
    DeformedModel.info_plus_noise(Atomic([1.0, 4.0]), 0.25, 1.0),
]


@settings(max_examples=100)
@given(st.sampled_from(range(4)), st.floats(-8, 8))
def test_outlier_iff_admissible(k, theta):
    m = MODELS[k]
    if m.kind != "additive" and theta <= 0:
        return
    if any(abs(theta - lo) < 1e-6 or abs(theta - hi) < 1e-6 for lo, hi in m.nu.components()):
        return
    if any(lo <= theta <= hi for lo, hi in m.nu.components()):
        return
    sets = admissible_set(m)
    if any(abs(theta - e) < 1e-7 for ab in sets for e in ab):
        return
    o = outcome(m, theta)
    inside = any(lo < theta < hi for lo, hi in sets)
    assert (o.classification == OUTLIER) == inside
    if inside:
        assert 0 < o.overlaps[0] <= 1


def test_continuity_at_threshold():
    m = DeformedModel.multiplicative(dirac(1.0), 0.5)
    edge = (1 + math.sqrt(0.5)) ** 2
    o = outcome(m, 1 + math.sqrt(0.5) + 1e-5)
    assert o.classification == OUTLIER
    assert abs(o.rho_values[0] - edge) < 1e-4
    assert o.overlaps[0] < 1e-2


def test_isotropic_trivial_bulk():
    assert isotropic_outliers(dirac(0.0), BERNOULLI, 3.0) == [pytest.approx(3.0)]
    assert isotropic_overlap(dirac(0.0), BERNOULLI, 3.0, 3.0) == pytest.approx(1.0, abs=1e-6)


def test_isotropic_matches_iid_for_semicircle():
    rho = isotropic_outliers(Semicircle(1.0), BERNOULLI, 3.0)
    assert len(rho) == 1
    assert rho[0] == pytest.approx(phi(DeformedModel.additive(BERNOULLI, 1.0), 3.0), abs=1e-8)
    sd = SpikedDeformation(DeformedModel.additive(BERNOULLI, 1.0), [(3.0, 1)])
    assert isotropic_overlap(Semicircle(1.0), BERNOULLI, 3.0, rho[0]) == pytest.approx(overlap(sd, 3.0, 3.0), abs=1e-6)


def test_isotropic_overlap_semicircle_point_mass():
    rho = isotropic_outliers(Semicircle(1.0), dirac(0.0), 2.0)
    assert rho == [pytest.approx(2.5)]
    assert isotropic_overlap(Semicircle(1.0), dirac(0.0), 2.0, rho[0]) == pytest.approx(0.75, abs=1e-6)


def test_one_spike_two_outliers():
    mu, nu = BERNOULLI, Semicircle(0.5)
    rho = isotropic_outliers(mu, nu, 10.0)
    assert len(rho) == 2
    # g = g_nu(10) at both roots; g_mu(w) = w / (w^2 - 1) = g has two solutions w,
    # and rho = w - 1/g + 10 since the two subordination functions sum to rho + 1/g
    g10 = (10 - math.sqrt(99)) / 0.5
    disc = math.sqrt(1 + 4 * g10 * g10)
    expect = sorted(w - 1 / g10 + 10.0 for w in ((1 - disc) / (2 * g10), (1 + disc) / (2 * g10)))
    assert np.allclose(rho, expect, atol=1e-7)
    ov = [isotropic_overlap(mu, nu, 10.0, r) for r in rho]
    assert all(0 < a <= 1 for a in ov)
    assert abs(ov[0] - ov[1]) > 0.1


def test_isotropic_scan_is_resolution_stable():
    a = isotropic_outliers(BERNOULLI, Semicircle(0.5), 10.0, points=1024)
    b = isotropic_outliers(BERNOULLI, Semicircle(0.5), 10.0, points=2048)
    assert np.allclose(a, b, atol=1e-9)


def test_isotropic_overlap_rejects_non_solutions():
    with pytest.raises(ValueError):
        isotropic_overlap(Semicircle(1.0), dirac(0.0), 2.0, 3.0)


def test_separation_symmetric_split():
    sd = SpikedDeformation(DeformedModel.additive(BERNOULLI, 0.5), [])
    res = separation_map(sd, -0.1, 0.1, n=1000)
    assert res.split == 500
    assert res.phi_a == pytest.approx(-res.phi_b)


def test_separation_outlier_split():
    sd = SpikedDeformation(DeformedModel.multiplicative(dirac(1.0), 0.5), [(3.0, 1)])
    assert separation_map(sd, 3.0, 3.2, n=100).split == 1


def test_separation_needs_a_gap():
    sd = SpikedDeformation(DeformedModel.additive(BERNOULLI, 0.5), [])
    with pytest.raises(GapError):
        separation_map(sd, 0.5, 0.6, n=10)


def test_separation_infers_size():
    sd = SpikedDeformation(DeformedModel.additive(Atomic([-1.0, 1.0], [0.25, 0.75]), 0.5), [])
    res = separation_map(sd, -0.1, 0.1)
    assert res.n == 4 and res.split == 3


def test_deformation_measure_weights():
    sd = SpikedDeformation(DeformedModel.additive(BERNOULLI, 0.5), [(5.0, 2)])
    m = deformation_measure(sd, 10)
    assert m.atom_mass(5.0) == pytest.approx(0.2)
    assert m.atom_mass(1.0) == pytest.approx(0.4)
