import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freedeform.errors import NotHermitian, ShapeError
from freedeform.measures import Atomic, MarchenkoPastur, Semicircle, dirac
from freedeform.models import DeformedModel
from freedeform.simlab import (
    EnsembleSpec,
    build_deformed,
    deformation_eigenvalues,
    empirical_stats,
    ensemble_for,
    fluctuation_scan,
    haar_unitary,
    hermitian_eig,
    match_outliers,
    measure_overlaps,
    outlier_extract,
    rng_for,
    run_trials,
    sample_matrix,
    simulate,
)
from freedeform.support import support_intervals


def test_eig_of_diagonal():
    w, V = hermitian_eig(np.diag([3.0, 1.0, 2.0]))
    assert w.tolist() == [3.0, 2.0, 1.0]
    assert np.allclose(np.abs(V), [[1, 0, 0], [0, 0, 1], [0, 1, 0]])


def test_eig_of_swap():
    w, V = hermitian_eig(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(w, [1.0, -1.0])
    assert np.allclose(np.abs(V[:, 0]), [2**-0.5, 2**-0.5])
    assert V[0, 1] * V[1, 1] < 0


def test_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        hermitian_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ShapeError):
        hermitian_eig(np.zeros((2, 3)))


@settings(max_examples=10)
@given(st.integers(0, 2**32))
def test_eig_residuals_on_random_gue(seed):
    spec = EnsembleSpec("additive", 128, [0.0] * 128, seed=seed)
    M = build_deformed(spec)
    w, V = hermitian_eig(M)
    assert np.all(np.diff(w) <= 0)
    assert np.max(np.linalg.norm(M @ V - V * w, axis=0)) <= 1e-8 * np.max(np.abs(w))
    assert np.max(np.abs(V.conj().T @ V - np.eye(128))) <= 1e-10


def test_top_vectors_only():
    spec = EnsembleSpec("additive", 64, [0.0] * 63 + [3.0], seed=2)
    w, V = hermitian_eig(build_deformed(spec), top=2)
    assert V.shape == (64, 2)


def test_gue_edge():
    spec = EnsembleSpec("additive", 512, [0.0] * 512, seed=11)
    w, _ = hermitian_eig(build_deformed(spec), vectors=False)
    assert 1.8 <= w[0] <= 2.2


def test_wishart_edges():
    spec = EnsembleSpec("multiplicative", 512, [1.0] * 512, p=2048, seed=11)
    w, _ = hermitian_eig(build_deformed(spec), vectors=False)
    assert w[0] == pytest.approx(2.25, abs=0.1)
    assert w[-1] == pytest.approx(0.25, abs=0.05)


def test_rademacher_is_hermitian():
    spec = EnsembleSpec("additive", 8, [0.0] * 8, entry_dist="rademacher", seed=1)
    M = build_deformed(spec)
    assert np.allclose(M, M.conj().T)
    assert abs(np.trace(M).imag) == 0.0


def test_trivial_builds():
    spec = EnsembleSpec("additive", 16, [0.0] * 16, seed=4)
    assert np.array_equal(build_deformed(spec), sample_matrix(spec))
    spec = EnsembleSpec("multiplicative", 16, [1.0] * 16, p=32, seed=4)
    X = sample_matrix(spec)
    assert np.allclose(build_deformed(spec), X @ X.conj().T / 32)
    spec = EnsembleSpec("info_plus_noise", 16, [1.0] * 16, p=32, sigma=0.7, seed=4)
    w, _ = hermitian_eig(build_deformed(spec), vectors=False)
    assert w[-1] >= -1e-12


def test_spec_validation():
    with pytest.raises(ValueError):
        EnsembleSpec("additive", 4, [0.0] * 4)
    with pytest.raises(ValueError):
        EnsembleSpec("additive", 5000, [0.0] * 5000)
    with pytest.raises(ValueError):
        EnsembleSpec("multiplicative", 16, [1.0] * 16, p=8)
    with pytest.raises(ShapeError):
        EnsembleSpec("additive", 16, [0.0] * 15)
    with pytest.raises(ShapeError):
        EnsembleSpec("isotropic_additive", 16, [0.0] * 16)


def test_reproducible():
    spec = EnsembleSpec("additive", 64, [0.0] * 64, seed=123)
    a = hermitian_eig(build_deformed(spec, 3), vectors=False)[0]
    b = hermitian_eig(build_deformed(spec, 3), vectors=False)[0]
    assert np.array_equal(a, b)
    c = hermitian_eig(build_deformed(spec, 4), vectors=False)[0]
    assert not np.array_equal(a, c)


def test_thread_count_does_not_change_results():
    spec = EnsembleSpec("additive", 64, [0.0] * 64, seed=5)
    a = [r.eigenvalues for r in run_trials(spec, 4, threads=1)]
    b = [r.eigenvalues for r in run_trials(spec, 4, threads=3)]
    assert all(np.array_equal(x, y) for x, y in zip(a, b))


def test_haar_conjugation_preserves_spectrum():
    U = haar_unitary(64, rng_for(9))
    assert np.allclose(U.conj().T @ U, np.eye(64), atol=1e-12)
    d = np.repeat([1.0, -1.0], 32)
    w, _ = hermitian_eig((U * d) @ U.conj().T, vectors=False)
    assert np.allclose(w, np.sort(d)[::-1], atol=1e-10)


def test_haar_phases_are_uniform():
    # the phase fix makes diagonal entries rotation invariant: E[U_11] = 0
    vals = np.array([haar_unitary(4, rng_for(1, t))[0, 0] for t in range(2000)])
    assert abs(vals.mean()) < 0.05


def test_empirical_stats_extremes():
    ks, _ = empirical_stats(np.array([-5.0, -4.0]), Atomic([5.0]))
    assert ks == 1.0
    ks, _ = empirical_stats(np.array([-1.0, 1.0]), Atomic([-1.0, 1.0]))
    assert ks == pytest.approx(0.0, abs=1e-12)


def test_empirical_stats_self_sample():
    sc = Semicircle(1.0)
    x = np.array([sc.quantile(p) for p in rng_for(0).uniform(size=2000)])
    assert empirical_stats(x, sc)[0] < 0.05


def test_overlaps_without_noise():
    A = np.diag([5.0, 1.0, 0.0, 0.0])
    w, V = hermitian_eig(A)
    assert measure_overlaps(V, [0], [0]) == [pytest.approx(1.0)]
    assert measure_overlaps(V, [1], [0]) == [pytest.approx(0.0)]
    with pytest.raises(IndexError):
        measure_overlaps(V, [7], [0])


def test_outlier_extract_and_matching():
    d = support_intervals(DeformedModel.additive(dirac(0.0), 1.0))
    vals = outlier_extract(np.array([2.6, 2.02, 0.0, -2.3]), d)
    assert vals == [2.6, -2.3]
    rows, ambiguous = match_outliers(vals, [2.5])
    assert rows[0][1] == 2.5 and rows[1][1] is None
    assert not ambiguous
    _, ambiguous = match_outliers([2.5], [2.45, 2.55])
    assert ambiguous


def test_deformation_eigenvalues():
    a = deformation_eigenvalues(Atomic([-1.0, 1.0]), 10, [(4.0, 2)])
    assert a.tolist() == [-1.0] * 4 + [1.0] * 4 + [4.0, 4.0]


def test_ensemble_for_kinds():
    spec, coords = ensemble_for(DeformedModel.multiplicative(dirac(1.0), 0.5), 16, [(3.0, 1)])
    assert spec.p == 32 and coords == [[15]]
    spec, coords = ensemble_for(DeformedModel.isotropic_additive(Atomic([-1.0, 1.0]), Semicircle(0.5)), 16, [(10.0, 1)])
    assert spec.a_spec[-1] == 10.0 and sorted(set(spec.b_spec)) == [-1.0, 1.0]


def test_peche_small_scale():
    m = DeformedModel.additive(dirac(0.0), 1.0)
    spec, coords = ensemble_for(m, 400, [(2.0, 1)], seed=1)
    r = simulate(spec, support=support_intervals(m), predictions=[2.5], projections=[(0, coords[0])])
    assert len(r.outliers) == 1
    assert r.outliers[0][0] == pytest.approx(2.5, abs=0.2)
    assert 0.5 < r.overlaps[0] < 1.0
    assert r.to_dict()["spec_hash"] == spec.digest()


def test_fluctuation_scan_contract():
    spec = EnsembleSpec("additive", 16, [0.0] * 16)
    with pytest.raises(ValueError):
        fluctuation_scan([spec, EnsembleSpec("additive", 32, [0.0] * 32)], trials=1)
    with pytest.raises(ValueError):
        fluctuation_scan([spec], trials=100)


def test_fluctuation_scan_small():
    specs = [EnsembleSpec("additive", n, [0.0] * n, seed=3) for n in (16, 64)]
    rows, slope = fluctuation_scan(specs, trials=50)
    assert [r[0] for r in rows] == [16, 64]
    assert slope < 0


def test_isotropic_multiplicative_build():
    spec, _ = ensemble_for(DeformedModel.isotropic_multiplicative(MarchenkoPastur(0.5), Atomic([1.0, 3.0])), 32)
    w, _ = hermitian_eig(build_deformed(spec), vectors=False)
    assert w[-1] >= -1e-10
