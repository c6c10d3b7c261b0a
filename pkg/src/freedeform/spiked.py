"""Outliers and eigenvector overlaps of spiked deformations."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import optimize

from . import freeconv as F
from . import models as M
from . import support as S
from .errors import DomainError, GapError, NotAnOutlier
from .measures import Atomic, Measure, Mixture, dirac
from .models import DeformedModel

OUTLIER = "Outlier"
STICK_RIGHT = "StickRight"
STICK_LEFT = "StickLeft"
QUANTILE = "Quantile"

SCAN_PER_GAP = 1024
CRITICAL_TOL = 1e-9


@dataclass(frozen=True)
class SpikedDeformation:
    """Bulk model plus spikes ``(theta, multiplicity)`` carried by the ``side`` factor."""

    model: DeformedModel
    spikes: tuple
    side: str = "nu"

    def __post_init__(self):
        sp = tuple(sorted(((float(t), int(k)) for t, k in self.spikes), key=lambda s: -s[0]))
        thetas = [t for t, _ in sp]
        if len(set(thetas)) != len(thetas):
            raise ValueError("spike values must be distinct")
        if any(k < 1 for _, k in sp):
            raise ValueError("multiplicities must be positive")
        if self.side not in ("nu", "mu"):
            raise ValueError("side must be 'nu' or 'mu'")
        if self.model.iid and self.side != "nu":
            raise ValueError("spikes of the i.i.d. kinds live on the deformation nu")
        host = self.model.nu if self.side == "nu" else self.model.mu
        for t in thetas:
            if self.model.kind in (M.MULTIPLICATIVE, M.INFO_PLUS_NOISE) and t <= 0:
                raise DomainError(f"spike {t} must be positive for the {self.model.kind} model")
            for lo, hi in host.components():
                if lo - 1e-9 <= t <= hi + 1e-9:
                    raise DomainError(f"spike {t} lies in the support of the bulk deformation")
        object.__setattr__(self, "spikes", sp)

    @property
    def rank(self) -> int:
        return sum(k for _, k in self.spikes)


@dataclass(frozen=True)
class SpikeOutcome:
    theta: float
    multiplicity: int
    classification: str
    rho_values: tuple
    overlaps: tuple
    critical: bool = False
    alpha: float | None = None
    notes: tuple = ()


@dataclass(frozen=True)
class OutlierReport:
    outcomes: tuple
    model_digest: str
    solver: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "model_digest": self.model_digest,
            "solver": self.solver,
            "spikes": [
                {
                    "theta": o.theta,
                    "multiplicity": o.multiplicity,
                    "classification": o.classification,
                    "rho_values": list(o.rho_values),
                    "predicted_overlap": list(o.overlaps),
                    "critical": o.critical,
                    "alpha": o.alpha,
                    "notes": list(o.notes),
                }
                for o in self.outcomes
            ],
        }


# ---------------------------------------------------------------------------
# i.i.d. kinds
# ---------------------------------------------------------------------------


def _alpha(model, theta):
    val, der, Sv = S._checked(model, np.array([theta]))
    val, der, Sv = float(val[0]), float(der[0]), float(Sv[0])
    if model.kind == M.ADDITIVE:
        return der
    if model.kind == M.MULTIPLICATIVE:
        return theta * der / val
    return der / Sv


def classify_spikes(sd: SpikedDeformation, cfg: F.SolverConfig = F.DEFAULT) -> OutlierReport:
    """Where the eigenvalues generated by each spike go, with predicted overlaps."""
    model = sd.model
    if not model.iid:
        raise ValueError("classify_spikes handles the i.i.d. kinds; use isotropic_outliers")
    adm = S._admissible_raw(model)
    desc = S.support_intervals(model, cfg)
    comps = model.nu.components()
    scale = S._scale(model)
    mu_law = None
    out = []
    for theta, k in sd.spikes:
        tol = CRITICAL_TOL * (scale + abs(theta))
        inside = [(lo, hi) for lo, hi, _, _ in adm if lo + tol < theta < hi - tol]
        if inside:
            rho = float(S._raw(model, np.array([theta]))[0][0])
            out.append(SpikeOutcome(theta, k, OUTLIER, (rho,), (_alpha(model, theta),)))
            continue
        # locate the block of R \ O containing theta
        blk = None
        for (q, p), iv in zip(desc.preimage_intervals, desc.intervals):
            if q - tol <= theta <= p + tol:
                blk = (q, p, iv)
                break
        if blk is None:
            raise DomainError(f"spike {theta} is not covered by any block of the support description")
        q, p, iv = blk
        critical = abs(theta - q) <= tol or abs(theta - p) <= tol
        inner = [(lo, hi) for lo, hi in comps if lo >= q - tol and hi <= p + tol]
        if all(hi < theta for _, hi in inner):
            out.append(SpikeOutcome(theta, k, STICK_RIGHT, (iv.hi,), (0.0,), critical))
        elif all(lo > theta for lo, _ in inner):
            out.append(SpikeOutcome(theta, k, STICK_LEFT, (iv.lo,), (0.0,), critical))
        else:
            if mu_law is None:
                mu_law = F.convolve_density(model, cfg=cfg)
            a = float(model.nu.cdf(theta))
            out.append(SpikeOutcome(theta, k, QUANTILE, (float(mu_law.quantile(a)),), (0.0,), critical, alpha=a))
    return OutlierReport(tuple(out), model.digest(), asdict(cfg))


def overlap(sd: SpikedDeformation, theta_j: float, theta_l: float, cfg: F.SolverConfig = F.DEFAULT) -> float:
    """Limit of the squared projection of an outlier eigenvector for ``theta_j``
    onto the eigenspace of ``theta_l``."""
    rep = classify_spikes(SpikedDeformation(sd.model, [(theta_j, 1)], sd.side), cfg)
    o = rep.outcomes[0]
    if o.classification != OUTLIER:
        raise NotAnOutlier(f"spike {theta_j} is classified {o.classification}")
    if theta_j != theta_l:
        return 0.0
    return float(o.overlaps[0])


# ---------------------------------------------------------------------------
# isotropic kinds
# ---------------------------------------------------------------------------


def _iso_model(mu, nu, kind):
    if kind in ("additive", M.ISOTROPIC_ADDITIVE):
        return DeformedModel.isotropic_additive(mu, nu)
    if kind in ("multiplicative", M.ISOTROPIC_MULTIPLICATIVE):
        return DeformedModel.isotropic_multiplicative(mu, nu)
    raise ValueError(f"unknown isotropic kind {kind!r}")


def _scan_grid(desc, theta, scan, n):
    lo_k, hi_k = desc.lo, desc.hi
    reach = 10.0 * (1.0 + abs(theta))
    lo_s, hi_s = (lo_k - reach, hi_k + reach) if scan is None else scan
    pieces = [(lo_s, lo_k)] + desc.gaps() + [(hi_k, hi_s)]
    atoms = sorted(a for a, _ in desc.atoms)
    # split gaps at atoms of the limit law
    segs = []
    for a, b in pieces:
        cuts = [a] + [x for x in atoms if a < x < b] + [b]
        segs += list(zip(cuts[:-1], cuts[1:]))
    grids = []
    for a, b in segs:
        a, b = max(a, lo_s), min(b, hi_s)
        if b <= a:
            continue
        pad = 1e-7 * (1.0 + max(abs(a), abs(b)))
        if b - a <= 2 * pad:
            continue
        k = np.arange(n)
        # Chebyshev-like spacing resolves the fast variation of omega near edges
        grids.append(a + pad + (b - a - 2 * pad) * 0.5 * (1.0 - np.cos(np.pi * k / (n - 1))))
    return grids


def isotropic_outliers(
    mu: Measure,
    nu: Measure,
    theta: float,
    scan=None,
    side: str = "nu",
    kind: str = "additive",
    cfg: F.SolverConfig = F.DEFAULT,
    points: int = SCAN_PER_GAP,
) -> list[float]:
    """All real solutions off the support of ``omega_side(rho) = theta``.

    ``omega_nu`` is the subordination function with ``g = g_nu(omega_nu)``;
    a spike of the factor whose spectrum tends to ``nu`` uses ``side="nu"``.
    The count is exact with respect to the scan grid (``points`` per gap and ray).
    """
    model = _iso_model(mu, nu, kind)
    host = nu if side == "nu" else mu
    for lo, hi in host.components():
        if lo - 1e-9 <= theta <= hi + 1e-9:
            raise DomainError(f"spike {theta} lies in the support of the {side} factor")
    desc = S.support_intervals(model, cfg)
    grids = _scan_grid(desc, theta, scan, points)
    flat = np.concatenate(grids)
    omega = np.real(S.isotropic_omega(model, flat, cfg, side))
    roots = []
    pos = 0
    tol_f = 1e-6 * (1.0 + abs(theta))

    def f(x):
        return float(np.real(S.isotropic_omega(model, np.array([x]), cfg, side))[0]) - theta

    for grid in grids:
        vals = omega[pos : pos + grid.size] - theta
        pos += grid.size
        for i in np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) <= 0):
            a, b = grid[i], grid[i + 1]
            if vals[i] == 0:
                r = a
            else:
                r = optimize.brentq(f, a, b, xtol=1e-13, rtol=4 * np.finfo(float).eps)
            # a sign change across a pole of omega is not a solution
            if abs(f(r)) <= tol_f:
                roots.append(float(r))
    roots = sorted(set(roots))
    dedup = []
    for r in roots:
        if not dedup or r - dedup[-1] > 1e-9 * (1 + abs(r)):
            dedup.append(r)
    return dedup


def isotropic_overlap(
    mu: Measure,
    nu: Measure,
    theta: float,
    rho: float,
    side: str = "nu",
    kind: str = "additive",
    cfg: F.SolverConfig = F.DEFAULT,
    h: float = 1e-5,
) -> float:
    """Limit ``1 / omega'(rho)`` of the squared projection on the spike eigenspace."""
    model = _iso_model(mu, nu, kind)

    def w(x):
        return np.real(S.isotropic_omega(model, np.asarray(x, dtype=float), cfg, side))

    w0 = float(w(np.array([rho]))[0])
    if abs(w0 - theta) > 1e-6 * (1.0 + abs(theta)):
        raise ValueError(f"rho={rho} does not solve omega(rho) = theta (omega = {w0})")
    pts = np.array([rho - h, rho + h, rho - h / 2, rho + h / 2])
    v = w(pts)
    d1 = (v[1] - v[0]) / (2 * h)
    d2 = (v[3] - v[2]) / h
    deriv = (4 * d2 - d1) / 3
    return float(1.0 / deriv)


# ---------------------------------------------------------------------------
# exact separation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeparationResult:
    phi_a: float
    phi_b: float
    split: int
    n: int


def _infer_n(nu: Atomic, limit: int = 100_000) -> int:
    w = nu.weights
    start = int(round(1.0 / w.min()))
    for n in range(max(1, start), limit):
        x = w * n
        if np.all(np.abs(x - np.round(x)) < 1e-9 * n):
            return n
    raise ValueError("cannot infer the matrix size from nu_N; pass n explicitly")


def deformation_measure(sd: SpikedDeformation, n: int) -> Measure:
    """Spectral measure of the size-``n`` deformation: bulk ``nu`` plus spikes."""
    r = sd.rank
    if not sd.spikes:
        return sd.model.nu
    if r >= n:
        raise ValueError("more spikes than matrix size")
    nu = sd.model.nu
    if isinstance(nu, Atomic):
        loc = np.concatenate([nu.locations, [t for t, _ in sd.spikes]])
        w = np.concatenate([nu.weights * (1 - r / n), [k / n for _, k in sd.spikes]])
        return Atomic(loc, w / w.sum())
    parts = [(1 - r / n, nu)] + [(k / n, dirac(t)) for t, k in sd.spikes]
    return Mixture(parts)


def separation_map(sd: SpikedDeformation, a: float, b: float, n: int | None = None, cfg: F.SolverConfig = F.DEFAULT):
    """Images of a gap ``[a, b]`` of the deterministic equivalent and the index split.

    Exactly ``split`` eigenvalues of the deformation exceed ``phi_b``, hence
    (eventually) exactly ``split`` eigenvalues of M_N exceed ``b``.
    """
    if not sd.model.iid:
        raise ValueError("separation_map handles the i.i.d. kinds")
    if a > b:
        raise ValueError("need a <= b")
    if n is None:
        if not isinstance(sd.model.nu, Atomic) or sd.spikes:
            raise ValueError("pass the matrix size n")
        n = _infer_n(sd.model.nu)
    nu_n = deformation_measure(sd, n)
    model_n = sd.model.with_nu(nu_n)
    desc = S.support_intervals(model_n, cfg)
    if np.any(desc.distance(np.array([a, b])) <= 0) or any(a <= iv.hi and b >= iv.lo for iv in desc.intervals):
        raise GapError(f"[{a}, {b}] meets the deterministic-equivalent support")
    pa, pb = (float(v) for v in S.varphi(model_n, np.array([a, b]), cfg))
    above = 1.0 - float(nu_n.cdf(pb))
    split = int(round(n * above))
    return SeparationResult(pa, pb, split, int(n))
