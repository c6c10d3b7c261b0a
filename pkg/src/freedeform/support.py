"""Supports of the limiting laws through the maps phi and their inverses.

For the three i.i.d. kinds the support is read off from the sign of
``phi'`` on the complement of ``supp(nu)``: the admissible set ``O`` is
where ``phi' > 0`` (and ``1 + c sigma^2 g_nu > 0`` for the
information-plus-noise model), each connected block ``[u, v]`` of ``R \\ O``
maps to the interval ``[phi(u-), phi(v+)]`` and carries the mass
``nu([u, v])``.

For the isotropic kinds no closed-form phi exists. Their support is located
by scanning the boundary values of the Stieltjes transform, and component
masses come from a contour integral of ``g`` around each component.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from . import freeconv as F
from . import models as M
from .errors import ComponentOverflow, DomainError
from .measures import Atomic, Measure
from .models import DeformedModel

PROBES = 512
EDGE_PROBES = 48
RAY_PROBES = 600
MAX_CONTINUOUS_COMPONENTS = 16
MAX_ATOMS = 10_000
LIMIT_STEPS = (1e-4, 1e-5, 1e-6)

__all__ = [
    "DeformedModel",
    "Interval",
    "SupportDescription",
    "phi",
    "phi_prime",
    "varphi",
    "admissible_set",
    "support_intervals",
    "mobile_edges",
    "component_masses_contour",
]


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    mass: float
    lo_regular: bool
    hi_regular: bool


@dataclass(frozen=True)
class SupportDescription:
    intervals: tuple
    preimage_intervals: tuple
    atom_at_zero: float | None = None
    admissible: tuple = ()
    atoms: tuple = ()
    notes: tuple = field(default_factory=tuple)

    def _points(self):
        pts = [iv.lo for iv in self.intervals] + [iv.hi for iv in self.intervals] + [a for a, _ in self.atoms]
        if self.atom_at_zero:
            pts.append(0.0)
        return pts

    @property
    def lo(self) -> float:
        return min(self._points())

    @property
    def hi(self) -> float:
        return max(self._points())

    def distance(self, x) -> np.ndarray:
        """Distance from each ``x`` to the support (intervals and atoms)."""
        x = np.asarray(x, dtype=float)
        d = np.full(x.shape, np.inf)
        for iv in self.intervals:
            d = np.minimum(d, np.maximum(0.0, np.maximum(iv.lo - x, x - iv.hi)))
        pts = [a for a, _ in self.atoms]
        if self.atom_at_zero:
            pts.append(0.0)
        for a in pts:
            d = np.minimum(d, np.abs(x - a))
        return d

    def gaps(self) -> list[tuple[float, float]]:
        return [(a.hi, b.lo) for a, b in zip(self.intervals[:-1], self.intervals[1:])]

    def total_mass(self) -> float:
        return sum(iv.mass for iv in self.intervals) + (self.atom_at_zero or 0.0) + sum(m for _, m in self.atoms)

    def to_dict(self) -> dict:
        return {
            "intervals": [
                {"lo": iv.lo, "hi": iv.hi, "mass": iv.mass, "lo_regular": iv.lo_regular, "hi_regular": iv.hi_regular}
                for iv in self.intervals
            ],
            "preimage_intervals": [[_num(u), _num(v)] for u, v in self.preimage_intervals],
            "atom_at_zero": self.atom_at_zero,
            "atoms": [[a, m] for a, m in self.atoms],
            "admissible": [[_num(a), _num(b)] for a, b in self.admissible],
            "notes": list(self.notes),
        }

    def csv_rows(self):
        yield ("interval", "lo", "hi", "mass", "lo_regular", "hi_regular")
        for i, iv in enumerate(self.intervals):
            yield (i, iv.lo, iv.hi, iv.mass, int(iv.lo_regular), int(iv.hi_regular))


def _num(x):
    # JSON has no infinities
    if math.isinf(x):
        return "-inf" if x < 0 else "inf"
    return x


# ---------------------------------------------------------------------------
# phi and its derivative
# ---------------------------------------------------------------------------


def _require_iid(model):
    if not model.iid:
        raise ValueError(f"phi is single-valued only for the i.i.d. kinds, not {model.kind!r}")


def _raw(model, u):
    """(phi, phi', S) at real points already known to be off supp(nu)."""
    uc = np.asarray(u, dtype=float).astype(complex)
    g = model.nu._g(uc).real
    dg = model.nu._dg(uc).real
    u = uc.real
    k = model.kind
    if k == M.ADDITIVE:
        s2 = model.sigma**2
        return u + s2 * g, 1.0 + s2 * dg, np.ones_like(u)
    c = model.c
    if k == M.MULTIPLICATIVE:
        return u * (1 - c) + c * u * u * g, (1 - c) + 2 * c * u * g + c * u * u * dg, np.ones_like(u)
    s2 = model.sigma**2
    S = 1.0 + c * s2 * g
    dS = c * s2 * dg
    val = u * S * S + s2 * (1 - c) * S
    der = S * S + 2 * u * S * dS + s2 * (1 - c) * dS
    return val, der, S


def _checked(model, u):
    model.nu.stieltjes(np.asarray(u, dtype=float))  # raises DomainError on supp(nu)
    return _raw(model, u)


def phi(model: DeformedModel, u):
    """phi_1(u) = u + sigma^2 g_nu(u); phi_2(u) = u(1-c) + c u^2 g_nu(u);
    phi_3(u) = u S^2 + sigma^2 (1-c) S with S = 1 + c sigma^2 g_nu(u)."""
    _require_iid(model)
    val = _checked(model, u)[0]
    return val[()] if np.ndim(val) == 0 else val


def phi_prime(model: DeformedModel, u):
    """Exact derivative of :func:`phi`."""
    _require_iid(model)
    val = _checked(model, u)[1]
    return val[()] if np.ndim(val) == 0 else val


def varphi(model: DeformedModel, x, cfg: F.SolverConfig = F.DEFAULT, side: str = "nu"):
    """Inverse of phi off the support, written through the limiting transform.

    For isotropic kinds this is the real-extended subordination function
    paired with ``nu`` (``side="nu"``) or with ``mu`` (``side="mu"``).
    """
    x = np.asarray(x, dtype=float)
    k = model.kind
    if k in M.ISOTROPIC_KINDS:
        return isotropic_omega(model, x, cfg, side)
    g = F.model_g(model, x, cfg).real
    if k == M.ADDITIVE:
        out = x - model.sigma**2 * g
    elif k == M.MULTIPLICATIVE:
        c = model.c
        out = 1.0 / g if c == 1 else x / ((1 - c) + c * x * g)
    else:
        c, s2 = model.c, model.sigma**2
        s = 1.0 - c * s2 * g
        out = x * s * s - (1 - c) * s2 * s
    return out[()] if np.ndim(out) == 0 else out


def isotropic_omega(model: DeformedModel, x, cfg: F.SolverConfig = F.DEFAULT, side: str = "nu"):
    """Subordination function of an isotropic model, in the Stieltjes variable."""
    if side not in ("nu", "mu"):
        raise ValueError("side must be 'nu' or 'mu'")
    if model.kind == M.ISOTROPIC_ADDITIVE:
        _, w_mu, w_nu = F.additive_g(model.mu, model.nu, x, cfg, return_omega=True)
    elif model.kind == M.ISOTROPIC_MULTIPLICATIVE:
        _, w_mu, w_nu = F.multiplicative_g(model.mu, model.nu, x, cfg, return_omega=True)
    else:
        raise ValueError("isotropic_omega needs an isotropic model")
    w = w_nu if side == "nu" else w_mu
    if np.ndim(x) == 0:
        return complex(w).real if complex(w).imag == 0 else w
    return w.real if np.all(w.imag == 0) else w


# ---------------------------------------------------------------------------
# admissible set
# ---------------------------------------------------------------------------


def _gaps_of(nu: Measure):
    comps = nu.components()
    n_cont = sum(1 for lo, hi in comps if hi > lo)
    n_atoms = len(comps) - n_cont
    if n_cont > MAX_CONTINUOUS_COMPONENTS:
        raise ComponentOverflow(f"supp(nu) has {n_cont} continuous components (limit {MAX_CONTINUOUS_COMPONENTS})")
    if n_atoms > MAX_ATOMS:
        raise ComponentOverflow(f"supp(nu) has {n_atoms} atoms (limit {MAX_ATOMS})")
    ends = [(-math.inf, comps[0][0])]
    ends += [(comps[i][1], comps[i + 1][0]) for i in range(len(comps) - 1)]
    ends.append((comps[-1][1], math.inf))
    return comps, ends


def _scale(model):
    s = max(1.0, abs(model.nu.support_lo), abs(model.nu.support_hi))
    if model.sigma:
        s = max(s, model.sigma**2)
    return s


def _maybe_open(model, ends):
    """Discard interior gaps where two neighbouring atoms alone force phi' <= 0."""
    nu = model.nu
    if not isinstance(nu, Atomic) or model.kind == M.INFO_PLUS_NOISE:
        return list(range(len(ends)))
    loc, w = nu.locations, nu.weights
    keep = [0, len(ends) - 1]
    if loc.size > 1:
        L = np.diff(loc)
        if model.kind == M.ADDITIVE:
            A, B, k = w[:-1], w[1:], model.sigma**2
        else:
            A, B, k = w[:-1] * loc[:-1] ** 2, w[1:] * loc[1:] ** 2, model.c
        bound = k * (np.cbrt(A) + np.cbrt(B)) ** 3 / L**2
        keep += (np.flatnonzero(bound < 1.0) + 1).tolist()
    return sorted(set(keep))


def _predicate(model, u):
    _, d, S = _raw(model, u)
    return (d > 0) & (S > 0)


def _bisect(model, false_pts, true_pts):
    a = np.asarray(false_pts, dtype=float).copy()
    b = np.asarray(true_pts, dtype=float).copy()
    for _ in range(200):
        mid = 0.5 * (a + b)
        live = (mid != a) & (mid != b)
        if not np.any(live):
            break
        p = _predicate(model, mid)
        a = np.where(live & ~p, mid, a)
        b = np.where(live & p, mid, b)
    return b


def _probe_points(a, b, scale, ray_len):
    if math.isinf(a) and math.isinf(b):
        raise ValueError("empty support")
    if math.isinf(a):
        d = np.geomspace(4e-9 * max(1.0, abs(b)), ray_len, RAY_PROBES)
        return b - d[::-1]
    if math.isinf(b):
        d = np.geomspace(4e-9 * max(1.0, abs(a)), ray_len, RAY_PROBES)
        return a + d
    L = b - a
    dmin = 4e-9 * max(1.0, abs(a), abs(b))
    if L <= 4 * dmin:
        return np.array([0.5 * (a + b)])
    k = np.arange(1, PROBES + 1)
    cheb = a + L * 0.5 * (1.0 - np.cos(np.pi * k / (PROBES + 1)))
    geo = np.geomspace(dmin, L / 4, EDGE_PROBES)
    pts = np.concatenate([a + geo, cheb, b - geo])
    pts = pts[(pts > a + 0.5 * dmin) & (pts < b - 0.5 * dmin)]
    return np.unique(pts)


def _admissible_raw(model):
    """List of (lo, hi, lo_kind, hi_kind) with kinds in {'inf', 'supp', 'phi', 'S'}."""
    _require_iid(model)
    comps, ends = _gaps_of(model.nu)
    scale = _scale(model)
    ray_len = 10.0 * (1.0 + scale)
    idx = _maybe_open(model, ends)
    probes = [_probe_points(*ends[i], scale, ray_len) for i in idx]
    # make sure the far ends of the rays are admissible
    for j, i in enumerate(idx):
        a, b = ends[i]
        if math.isinf(a) or math.isinf(b):
            sign = -1.0 if math.isinf(a) else 1.0
            base = b if math.isinf(a) else a
            far = probes[j][0] if math.isinf(a) else probes[j][-1]
            extra = []
            length = abs(far - base)
            for _ in range(60):
                if _predicate(model, np.array([base + sign * length]))[0]:
                    break
                length *= 2
                extra.append(base + sign * length)
            else:
                raise DomainError("phi' does not become positive at infinity")
            if extra:
                probes[j] = np.unique(np.concatenate([probes[j], extra]))
    flat = np.concatenate(probes)
    _, dflat, Sflat = _raw(model, flat)
    Pflat = (dflat > 0) & (Sflat > 0)
    out = []
    bis_f, bis_t, slots = [], [], []
    pos = 0
    for j, i in enumerate(idx):
        a, b = ends[i]
        u = probes[j]
        n = u.size
        d, S, P = dflat[pos : pos + n], Sflat[pos : pos + n], Pflat[pos : pos + n].copy()
        pos += n
        runs = _runs(P)
        runs += _bumps(model, u, d, S, P)
        for lo_i, hi_i, lo_pt, hi_pt in runs:
            rec = [None, None, None, None]
            # left boundary
            if lo_pt is not None:
                rec[0], rec[2] = lo_pt
            elif lo_i == 0:
                rec[0], rec[2] = (a, "inf" if math.isinf(a) else "supp")
            else:
                slots.append((len(out), 0, "S" if S[lo_i - 1] <= 0 else "phi"))
                bis_f.append(u[lo_i - 1])
                bis_t.append(u[lo_i])
            if hi_pt is not None:
                rec[1], rec[3] = hi_pt
            elif hi_i == n - 1:
                rec[1], rec[3] = (b, "inf" if math.isinf(b) else "supp")
            else:
                slots.append((len(out), 1, "S" if S[hi_i + 1] <= 0 else "phi"))
                bis_f.append(u[hi_i + 1])
                bis_t.append(u[hi_i])
            out.append(rec)
    if bis_f:
        roots = _bisect(model, bis_f, bis_t)
        for (k, side, kind), r in zip(slots, roots):
            out[k][side] = float(r)
            out[k][side + 2] = kind
    out = sorted((tuple(r) for r in out), key=lambda r: r[0])
    return out


def _runs(P):
    runs = []
    n = P.size
    i = 0
    while i < n:
        if P[i]:
            j = i
            while j + 1 < n and P[j + 1]:
                j += 1
            runs.append((i, j, None, None))
            i = j + 1
        else:
            i += 1
    return runs


def _bumps(model, u, d, S, P):
    """Admissible pieces narrower than the probe spacing, found by maximising phi'."""
    found = []
    for i in range(1, u.size - 1):
        if P[i - 1] or P[i] or P[i + 1] or S[i] <= 0:
            continue
        if not (d[i] >= d[i - 1] and d[i] >= d[i + 1]):
            continue
        lo, hi = u[i - 1], u[i + 1]
        res = optimize.minimize_scalar(
            lambda t: -_raw(model, np.array([t]))[1][0], bounds=(lo, hi), method="bounded", options={"xatol": 1e-13}
        )
        t = float(res.x)
        if _predicate(model, np.array([t]))[0]:
            left = float(_bisect(model, [lo], [t])[0])
            right = float(_bisect(model, [hi], [t])[0])
            kl = "S" if _raw(model, np.array([lo]))[2][0] <= 0 else "phi"
            kr = "S" if _raw(model, np.array([hi]))[2][0] <= 0 else "phi"
            found.append((i, i, (left, kl), (right, kr)))
    return found


def admissible_set(model: DeformedModel) -> list[tuple[float, float]]:
    """Open intervals whose union is the admissible set O."""
    return [(lo, hi) for lo, hi, _, _ in _admissible_raw(model)]


# ---------------------------------------------------------------------------
# support intervals
# ---------------------------------------------------------------------------


def _one_sided(model, u, kind, direction):
    """phi(u-) (direction -1) or phi(u+) (direction +1)."""
    if kind == "supp":
        hs = np.asarray(LIMIT_STEPS)
        vals = _raw(model, u + direction * hs)[0]
        return float(F._extrapolate_zero(hs, vals))
    val = float(_raw(model, np.array([u]))[0][0])
    if kind == "S" and abs(val) < 1e-10 * _scale(model):
        val = 0.0
    return val


def support_intervals(model: DeformedModel, cfg: F.SolverConfig = F.DEFAULT) -> SupportDescription:
    """Support of the limiting law with component masses and edge regularity."""
    if not model.iid:
        return _isotropic_support(model, cfg)
    adm = _admissible_raw(model)
    notes = []
    raw = []
    for (lo0, q, _, qk), (p, hi1, pk, _) in zip(adm[:-1], adm[1:]):
        a = _one_sided(model, q, qk, -1)
        b = _one_sided(model, p, pk, +1)
        mass = model.nu.mass_between(q, p)
        raw.append([a, b, mass, qk, pk, q, p])
    atom0 = None
    if model.kind == M.MULTIPLICATIVE and model.nu.atom_mass(0.0) > 0:
        atom0 = model.nu.atom_mass(0.0)
        for r in raw:
            if r[5] <= 0.0 <= r[6]:
                r[2] -= atom0
    intervals, pre = [], []
    for a, b, mass, qk, pk, q, p in raw:
        if mass <= 1e-15 and (b - a) <= 1e-12 * _scale(model):
            continue
        if mass <= 1e-15:
            notes.append(f"dropped a block [{q}, {p}] carrying no mass of nu")
            continue
        hard = model.kind != M.ADDITIVE
        lo_reg = qk != "supp" and not (hard and a == 0.0)
        hi_reg = pk != "supp" and not (hard and b == 0.0)
        if hard and abs(a) < 1e-12 * _scale(model):
            a, lo_reg = 0.0, False
        intervals.append(Interval(float(a), float(b), float(mass), bool(lo_reg), bool(hi_reg)))
        pre.append((float(q), float(p)))
    for x, y in zip(intervals[:-1], intervals[1:]):
        if not (x.lo <= x.hi < y.lo <= y.hi):
            notes.append("support intervals are not strictly ordered; numerical resolution exhausted")
    if model.kind == M.INFO_PLUS_NOISE and model.c < 1 and intervals and intervals[0].lo != 0.0:
        notes.append("left-most edge: eigenvalue convergence there is only established when it equals 0")
    return SupportDescription(
        intervals=tuple(intervals),
        preimage_intervals=tuple(pre),
        atom_at_zero=atom0,
        admissible=tuple((lo, hi) for lo, hi, _, _ in adm),
        notes=tuple(notes),
    )


def mobile_edges(model: DeformedModel, cfg: F.SolverConfig = F.DEFAULT) -> SupportDescription:
    """Support of the deterministic equivalent built on an atomic ``nu_N``."""
    if not isinstance(model.nu, Atomic):
        raise ValueError("mobile_edges expects the empirical (atomic) deformation nu_N")
    if model.nu.locations.size > MAX_ATOMS:
        raise ComponentOverflow(f"nu_N has more than {MAX_ATOMS} atoms")
    return support_intervals(model, cfg)


# ---------------------------------------------------------------------------
# isotropic kinds
# ---------------------------------------------------------------------------

SCAN_POINTS = 4096
SCAN_HEIGHTS = (1e-9, 1e-10)
DENSITY_THRESHOLD = 1e-12


def _continuous_part(model, z, cfg, atoms):
    g = F.model_g(model, z, cfg)
    for a, m in atoms:
        g = g - m / (z - a)
    return g


def _inside(model, x, cfg, atoms):
    # off the support -Im g shrinks in proportion to the height, on it it does not
    x = np.asarray(x, dtype=float)
    d1, d2 = (-_continuous_part(model, x + 1j * y, cfg, atoms).imag / np.pi for y in SCAN_HEIGHTS)
    return (d2 > DENSITY_THRESHOLD) & (d2 > 0.5 * d1)


def _iso_range(model):
    mu, nu = model.mu, model.nu
    if model.kind == M.ISOTROPIC_ADDITIVE:
        return mu.support_lo + nu.support_lo, mu.support_hi + nu.support_hi
    return mu.support_lo * nu.support_lo, mu.support_hi * nu.support_hi


def component_masses_contour(g_eval, intervals, nodes: int = 4096):
    """Mass of each interval as ``(1 / 2 pi i) oint g(z) dz`` on a circle around it.

    Circles cross the real line midway into the neighbouring gaps, where ``g``
    is analytic. Nodes are placed off the real axis.
    """
    ivs = list(intervals)
    out = []
    for k, (lo, hi) in enumerate(ivs):
        left_gap = lo - ivs[k - 1][1] if k > 0 else max(1.0, hi - lo)
        right_gap = ivs[k + 1][0] - hi if k + 1 < len(ivs) else max(1.0, hi - lo)
        pad = 0.5 * min(left_gap, right_gap)
        c, r = 0.5 * (lo + hi), 0.5 * (hi - lo) + pad
        t = 2 * np.pi * (np.arange(nodes // 2) + 0.5) / nodes
        z = c + r * np.exp(1j * t)
        gz = g_eval(z)
        dz = 1j * r * np.exp(1j * t)
        half = gz * dz
        total = half.sum() + np.conj(half).sum() * -1  # lower half via g(conj z) = conj g(z), dz mirrored
        out.append(float((total * (2 * np.pi / nodes) / (2j * np.pi)).real))
    return out


def _single_atom(m: Measure):
    if isinstance(m, Atomic) and m.locations.size == 1:
        return float(m.locations[0])
    return None


def _shifted_support(model, a, other, other_side):
    """A Dirac factor only shifts (or scales) the other law."""
    add = model.kind == M.ISOTROPIC_ADDITIVE
    atoms = F.atoms_of(model)
    intervals, pre = [], []
    if add or a > 0:
        for lo, hi in other.components():
            if hi <= lo:
                continue
            mass = other.mass_between(lo, hi) - sum(other.atom_mass(x) for x in (lo, hi))
            ends = (lo + a, hi + a) if add else (lo * a, hi * a)
            # edges come from edges of the other factor: never regular
            intervals.append(Interval(float(ends[0]), float(ends[1]), float(mass), False, False))
            pre.append((float(lo), float(hi)) if other_side == "nu" else (a, a))
    return SupportDescription(
        intervals=tuple(intervals),
        preimage_intervals=tuple(pre),
        atoms=tuple((float(x), float(m)) for x, m in atoms),
        notes=("one factor is a point mass; the law is the other factor shifted or scaled",),
    )


def _isotropic_support(model, cfg):
    for m, other, side in ((model.mu, model.nu, "nu"), (model.nu, model.mu, "mu")):
        a = _single_atom(m)
        if a is not None:
            return _shifted_support(model, a, other, side)
    atoms = F.atoms_of(model)
    lo, hi = _iso_range(model)
    width = max(hi - lo, 1e-3)
    x = np.linspace(lo - 1e-3 * width, hi + 1e-3 * width, SCAN_POINTS)
    ins = _inside(model, x, cfg, atoms)
    runs = _runs(ins)
    ivs = []
    for i, j, _, _ in runs:
        a = x[i] if i == 0 else _bisect_inside(model, x[i - 1], x[i], cfg, atoms)
        b = x[j] if j == x.size - 1 else _bisect_inside(model, x[j + 1], x[j], cfg, atoms)
        ivs.append((float(a), float(b)))
    if not ivs and not atoms:
        raise DomainError("no support found on the scan range")

    def g_cont(z):
        return _continuous_part(model, z, cfg, atoms)

    masses = component_masses_contour(g_cont, ivs) if ivs else []
    intervals, pre = [], []
    for (a, b), m in zip(ivs, masses):
        d = 1e-7 * (1.0 + abs(a))
        ua = isotropic_omega(model, np.array([a - d]), cfg)[0]
        vb = isotropic_omega(model, np.array([b + d]), cfg)[0]
        wa = isotropic_omega(model, np.array([a - d]), cfg, "mu")[0]
        wb = isotropic_omega(model, np.array([b + d]), cfg, "mu")[0]
        lo_reg = _off(model.nu, ua) and _off(model.mu, wa)
        hi_reg = _off(model.nu, vb) and _off(model.mu, wb)
        intervals.append(Interval(a, b, m, lo_reg, hi_reg))
        pre.append((float(np.real(ua)), float(np.real(vb))))
    notes = []
    if model.kind == M.ISOTROPIC_MULTIPLICATIVE:
        notes.append("isotropic multiplicative outliers use the additive root-scan by analogy")
    return SupportDescription(
        intervals=tuple(intervals),
        preimage_intervals=tuple(pre),
        atoms=tuple((float(a), float(m)) for a, m in atoms),
        notes=tuple(notes),
    )


def _off(m: Measure, w, tol=1e-6):
    w = complex(w)
    if abs(w.imag) > tol:
        return False
    return all(not (lo - tol <= w.real <= hi + tol) for lo, hi in m.components())


def _bisect_inside(model, out_pt, in_pt, cfg, atoms):
    a, b = float(out_pt), float(in_pt)
    for _ in range(60):
        mid = 0.5 * (a + b)
        if mid in (a, b):
            break
        if _inside(model, np.array([mid]), cfg, atoms)[0]:
            b = mid
        else:
            a = mid
    return 0.5 * (a + b)
