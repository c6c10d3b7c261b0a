"""Seeded Monte Carlo for deformed ensembles and the statistics compared with predictions."""

from __future__ import annotations

import hashlib
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.linalg as sla

from . import models as M
from .errors import NotHermitian, ShapeError
from .measures import Measure

MIN_N = 8
MAX_N = 4096
OUTLIER_MARGIN = 0.05
MATCH_GAP = 0.15
HERMITIAN_TOL = 1e-10
RESIDUAL_TOL = 1e-8
ORTHO_TOL = 1e-10

ENTRY_DISTS = ("gaussian", "rademacher")
RECTANGULAR = (M.MULTIPLICATIVE, M.INFO_PLUS_NOISE)


@dataclass(frozen=True)
class EnsembleSpec:
    """One random-matrix ensemble.

    ``a_spec`` lists the N eigenvalues of the deformation (for info_plus_noise
    the eigenvalues of A A^*). Isotropic kinds also need ``b_spec``, the spectrum
    of the factor conjugated by a Haar unitary.
    """

    kind: str
    N: int
    a_spec: tuple
    p: int | None = None
    sigma: float = 1.0
    entry_dist: str = "gaussian"
    b_spec: tuple | None = None
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "a_spec", tuple(float(x) for x in self.a_spec))
        if self.b_spec is not None:
            object.__setattr__(self, "b_spec", tuple(float(x) for x in self.b_spec))
        if self.kind not in M.KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if not MIN_N <= self.N <= MAX_N:
            raise ValueError(f"N must lie in [{MIN_N}, {MAX_N}] for dense simulation")
        if self.entry_dist not in ENTRY_DISTS:
            raise ValueError(f"entry_dist must be one of {ENTRY_DISTS}")
        if len(self.a_spec) != self.N:
            raise ShapeError(f"a_spec has {len(self.a_spec)} entries, expected N={self.N}")
        if self.kind in RECTANGULAR:
            if self.p is None or self.p < self.N:
                raise ValueError("rectangular kinds need p >= N")
            if min(self.a_spec) < 0:
                raise ValueError("deformation must be positive semidefinite for this kind")
        if self.kind in M.ISOTROPIC_KINDS:
            if self.b_spec is None or len(self.b_spec) != self.N:
                raise ShapeError("isotropic kinds need b_spec with N entries")
            if self.kind == M.ISOTROPIC_MULTIPLICATIVE and min(self.a_spec + self.b_spec) < 0:
                raise ValueError("isotropic multiplicative kind needs nonnegative spectra")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    @property
    def c(self) -> float | None:
        return self.N / self.p if self.p else None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["a_spec"] = list(self.a_spec)
        d["b_spec"] = None if self.b_spec is None else list(self.b_spec)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "EnsembleSpec":
        keys = ("kind", "N", "a_spec", "p", "sigma", "entry_dist", "b_spec", "seed")
        return cls(**{k: d[k] for k in keys if k in d})

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class SimResult:
    eigenvalues: np.ndarray
    outliers: list = field(default_factory=list)
    overlaps: list = field(default_factory=list)
    ks_distance: float | None = None
    seed: int = 0
    trial: int = 0
    spec_hash: str = ""
    wallclock: float = 0.0
    ambiguous: bool = False

    def to_dict(self) -> dict:
        return {
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "outliers": [list(o) for o in self.outliers],
            "overlaps": [float(x) for x in self.overlaps],
            "ks_distance": self.ks_distance,
            "seed": int(self.seed),
            "trial": int(self.trial),
            "spec_hash": self.spec_hash,
            "wallclock": self.wallclock,
            "ambiguous": self.ambiguous,
        }


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------


def rng_for(seed: int, trial: int = 0) -> np.random.Generator:
    """Counter-based stream keyed by (seed, trial); independent of execution order."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(trial)])))


def _complex_entries(rng, shape, dist):
    # real and imaginary parts with variance 1/2 each
    if dist == "gaussian":
        return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    signs = rng.integers(0, 2, size=(2,) + tuple(shape)) * 2.0 - 1.0
    return (signs[0] + 1j * signs[1]) / np.sqrt(2.0)


def wigner(N: int, sigma: float, rng, dist: str = "gaussian") -> np.ndarray:
    """W = X / sqrt(N), X Hermitian with diagonal variance sigma^2 and E|X_ij|^2 = sigma^2."""
    X = _complex_entries(rng, (N, N), dist)
    X = np.triu(X, 1)
    if dist == "gaussian":
        d = rng.standard_normal(N)
    else:
        d = rng.integers(0, 2, size=N) * 2.0 - 1.0
    H = X + X.conj().T + np.diag(d.astype(complex))
    return (sigma / np.sqrt(N)) * H


def haar_unitary(N: int, rng) -> np.ndarray:
    """Haar unitary from QR of a complex Ginibre matrix, with the phase of diag(R) fixed."""
    Z = _complex_entries(rng, (N, N), "gaussian")
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def sample_matrix(spec: EnsembleSpec, trial: int = 0) -> np.ndarray:
    """Random factor of the ensemble: W (additive), X (rectangular kinds) or U (isotropic)."""
    rng = rng_for(spec.seed, trial)
    if spec.kind == M.ADDITIVE:
        return wigner(spec.N, spec.sigma, rng, spec.entry_dist)
    if spec.kind in RECTANGULAR:
        return _complex_entries(rng, (spec.N, spec.p), spec.entry_dist)
    return haar_unitary(spec.N, rng)


def build_deformed(spec: EnsembleSpec, trial: int = 0) -> np.ndarray:
    """The deformed matrix M_N of the ensemble."""
    R = sample_matrix(spec, trial)
    a = np.asarray(spec.a_spec)
    if spec.kind == M.ADDITIVE:
        R[np.diag_indices(spec.N)] += a
        return R
    if spec.kind == M.MULTIPLICATIVE:
        S = (R @ R.conj().T) / spec.p
        d = np.sqrt(a)
        return d[:, None] * S * d[None, :]
    if spec.kind == M.INFO_PLUS_NOISE:
        Y = (spec.sigma / np.sqrt(spec.p)) * R
        Y[np.arange(spec.N), np.arange(spec.N)] += np.sqrt(a)
        return Y @ Y.conj().T
    b = np.asarray(spec.b_spec)
    B = (R * b[None, :]) @ R.conj().T
    if spec.kind == M.ISOTROPIC_ADDITIVE:
        B[np.diag_indices(spec.N)] += a
        return B
    d = np.sqrt(a)
    return d[:, None] * B * d[None, :]


def deformation_eigenvalues(nu: Measure, N: int, spikes=()) -> np.ndarray:
    """Deterministic spectrum of a size-N deformation: quantiles of ``nu`` plus spikes."""
    spikes = [(float(t), int(k)) for t, k in spikes]
    r = sum(k for _, k in spikes)
    if r >= N:
        raise ShapeError("more spikes than matrix size")
    n = N - r
    bulk = np.array([nu.quantile((i + 0.5) / n) for i in range(n)], dtype=float)
    out = [bulk] + [np.full(k, t) for t, k in spikes]
    return np.concatenate(out)


def ensemble_for(model, N: int, spikes=(), side: str = "nu", p: int | None = None, entry_dist: str = "gaussian", seed: int = 0):
    """EnsembleSpec realizing ``model`` at size N, and the coordinates of each spike.

    The deformation spectrum is the quantile discretization of ``nu`` with
    the spikes appended; for isotropic kinds ``nu`` sits on the diagonal
    factor and ``mu`` on the Haar-rotated one.
    """
    spikes = [(float(t), int(k)) for t, k in spikes]
    r = sum(k for _, k in spikes)
    coords, pos = [], N - r
    for _, k in spikes:
        coords.append(list(range(pos, pos + k)))
        pos += k
    kind = model.kind
    if kind in M.ISOTROPIC_KINDS:
        a = deformation_eigenvalues(model.nu, N, spikes if side == "nu" else ())
        b = deformation_eigenvalues(model.mu, N, spikes if side == "mu" else ())
        if side == "mu":
            coords = []  # spikes on the rotated factor have no coordinate eigenspace
        return EnsembleSpec(kind, N, a, b_spec=b, entry_dist=entry_dist, seed=seed), coords
    a = deformation_eigenvalues(model.nu, N, spikes)
    if kind == M.ADDITIVE:
        return EnsembleSpec(kind, N, a, sigma=model.sigma, entry_dist=entry_dist, seed=seed), coords
    p = int(p) if p is not None else int(round(N / model.c))
    sigma = model.sigma if kind == M.INFO_PLUS_NOISE else 1.0
    return EnsembleSpec(kind, N, a, p=p, sigma=sigma, entry_dist=entry_dist, seed=seed), coords


# ---------------------------------------------------------------------------
# eigensolver
# ---------------------------------------------------------------------------


def hermitian_eig(Mx, vectors: bool = True, top: int | None = None):
    """Eigenvalues in decreasing order and, optionally, orthonormal eigenvectors.

    ``top`` keeps only the eigenvectors of the ``top`` largest eigenvalues.
    Residuals and orthonormality of the returned pairs are checked.
    """
    Mx = np.asarray(Mx)
    if Mx.ndim != 2 or Mx.shape[0] != Mx.shape[1]:
        raise ShapeError("matrix must be square")
    scale = max(1.0, float(np.max(np.abs(Mx)))) if Mx.size else 1.0
    if np.max(np.abs(Mx - Mx.conj().T)) > HERMITIAN_TOL * scale:
        raise NotHermitian("matrix is not Hermitian within tolerance")
    n = Mx.shape[0]
    if not vectors:
        w = sla.eigvalsh(Mx, driver="evr", check_finite=True)[::-1]
        norm = max(1.0, float(np.max(np.abs(w))))
        # cheap consistency check when no vectors are available
        if abs(w.sum() - np.trace(Mx).real) > RESIDUAL_TOL * norm * n:
            raise ArithmeticError("eigenvalue trace check failed")
        return w, None
    w, V = sla.eigh(Mx, driver="evr")
    w, V = w[::-1], V[:, ::-1]
    if top is not None:
        V = V[:, :top]
    k = V.shape[1]
    norm = max(1.0, float(np.max(np.abs(w))))
    res = np.linalg.norm(Mx @ V - V * w[None, :k], axis=0)
    if np.max(res, initial=0.0) > RESIDUAL_TOL * norm:
        raise ArithmeticError(f"eigen residual {np.max(res):.3e} exceeds tolerance")
    G = V.conj().T @ V
    if np.max(np.abs(G - np.eye(k)), initial=0.0) > ORTHO_TOL:
        raise ArithmeticError("eigenvectors are not orthonormal within tolerance")
    return w, V


# ---------------------------------------------------------------------------
# statistics
# ---------------------------------------------------------------------------


def empirical_stats(eigs, predicted: Measure, bins: int = 64, grid=None):
    """Kolmogorov distance to ``predicted`` and a density histogram of ``eigs``."""
    x = np.sort(np.asarray(eigs, dtype=float))
    n = x.size
    pts = x if grid is None else np.union1d(x, np.asarray(grid, dtype=float))
    F = np.clip(np.asarray(predicted.cdf(pts), dtype=float), 0.0, 1.0)
    # left limits matter when the prediction has atoms
    F_left = np.clip(np.asarray(predicted.cdf(np.nextafter(pts, -np.inf)), dtype=float), 0.0, 1.0)
    hi = np.searchsorted(x, pts, side="right") / n
    lo = np.searchsorted(x, pts, side="left") / n
    ks = float(max(np.max(np.abs(hi - F)), np.max(np.abs(lo - F_left))))
    counts, edges = np.histogram(x, bins=bins, density=True)
    return min(ks, 1.0), (counts, edges)


def measure_overlaps(eigvectors, outlier_indices, spike_indices) -> list[float]:
    """Squared norms of the coordinate projections of the selected eigenvectors."""
    V = np.asarray(eigvectors)
    sp = np.asarray(list(spike_indices), dtype=int)
    out = []
    for i in outlier_indices:
        if not -V.shape[1] <= i < V.shape[1]:
            raise IndexError(f"eigenvector index {i} out of range")
        v = V[:, i]
        out.append(float(np.clip(np.sum(np.abs(v[sp]) ** 2) / np.sum(np.abs(v) ** 2), 0.0, 1.0)))
    return out


def outlier_extract(eigs, support, margin: float = OUTLIER_MARGIN) -> list[float]:
    """Eigenvalues farther than ``margin`` from every support interval."""
    if margin <= 0:
        raise ValueError("margin must be positive")
    x = np.asarray(eigs, dtype=float)
    d = support.distance(x)
    return [float(v) for v in x[d > margin]]


def match_outliers(values, predictions, gap: float = MATCH_GAP):
    """Nearest-prediction matching; returns rows (value, prediction, distance) and an ambiguity flag."""
    preds = np.asarray(sorted(predictions), dtype=float)
    rows, used, ambiguous = [], {}, False
    for v in values:
        if preds.size == 0:
            rows.append((float(v), None, None))
            continue
        d = np.abs(preds - v)
        j = int(np.argmin(d))
        if d[j] > gap:
            rows.append((float(v), None, None))
            continue
        close = np.flatnonzero(d <= gap)
        if close.size > 1 or j in used:
            ambiguous = True
        used[j] = used.get(j, 0) + 1
        rows.append((float(v), float(preds[j]), float(d[j])))
    return rows, ambiguous


# ---------------------------------------------------------------------------
# runs
# ---------------------------------------------------------------------------


def default_threads() -> int:
    return os.cpu_count() or 1


def simulate(
    spec: EnsembleSpec,
    trial: int = 0,
    support=None,
    predicted: Measure | None = None,
    predictions=(),
    projections=(),
    margin: float = OUTLIER_MARGIN,
) -> SimResult:
    """One trial: build, diagonalize and measure.

    ``projections`` holds pairs (eigenvector index, spike coordinates); each
    yields the squared projection of that eigenvector on the coordinates,
    i.e. on the spike eigenspace of a diagonal deformation.
    """
    t0 = time.perf_counter()
    Mx = build_deformed(spec, trial)
    projections = [(int(i), list(ix)) for i, ix in projections]
    track = 1 + max((i for i, _ in projections), default=-1)
    w, V = hermitian_eig(Mx, vectors=track > 0, top=track if track > 0 else None)
    outl, ambiguous = [], False
    if support is not None:
        vals = outlier_extract(w, support, margin)
        outl, ambiguous = match_outliers(vals, predictions)
    overlaps = [measure_overlaps(V, [i], ix)[0] for i, ix in projections]
    ks = None
    if predicted is not None:
        ks = empirical_stats(w, predicted)[0]
    return SimResult(
        eigenvalues=w,
        outliers=outl,
        overlaps=overlaps,
        ks_distance=ks,
        seed=spec.seed,
        trial=trial,
        spec_hash=spec.digest(),
        wallclock=time.perf_counter() - t0,
        ambiguous=ambiguous,
    )


def run_trials(spec: EnsembleSpec, trials: int, threads: int | None = None, **kw) -> list[SimResult]:
    """Independent trials in a thread pool; results are returned in trial order."""
    threads = max(1, min(threads or default_threads(), trials))
    if threads == 1:
        return [simulate(spec, t, **kw) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(lambda t: simulate(spec, t, **kw), range(trials)))


def top_eigenvalues(spec: EnsembleSpec, trials: int, threads: int | None = None) -> np.ndarray:
    """Largest eigenvalue of each trial."""
    res = run_trials(spec, trials, threads)
    return np.array([r.eigenvalues[0] for r in res])


def fluctuation_scan(specs, trials: int, threads: int | None = None):
    """Rows (N, mean lambda_1, std lambda_1) and the log-log slope of std against N."""
    specs = list(specs)
    if len(specs) < 2 or len({s.N for s in specs}) < 2:
        raise ValueError("fluctuation_scan needs at least two matrix sizes")
    if trials < 50:
        raise ValueError("fluctuation_scan needs at least 50 trials per size")
    rows = []
    for s in specs:
        top = top_eigenvalues(s, trials, threads)
        rows.append((s.N, float(top.mean()), float(top.std(ddof=1))))
    logn = np.log([r[0] for r in rows])
    logs = np.log([r[2] for r in rows])
    slope = float(np.polyfit(logn, logs, 1)[0])
    return rows, slope
