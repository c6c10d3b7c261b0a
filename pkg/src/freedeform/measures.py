"""Compactly supported probability measures and their scalar transforms.

Every transform accepts a scalar or an array of complex arguments and
returns an array of the same shape (a Python scalar for scalar input).
Arguments with positive imaginary part are always valid; real arguments
must stay at least ``GUARD`` away from every support component.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .errors import DomainError, EvaluationError, NoConvergence, RangeError

GUARD = 1e-9
DENSITY_FLOOR = 1e-12
MASS_TOL = 1e-12
_CHUNK = 2_000_000


def _as_complex(z):
    arr = np.asarray(z, dtype=complex)
    return arr, arr.ndim == 0


def _out(arr, scalar):
    return arr[()] if scalar else arr


def _check_domain(m: "Measure", z: np.ndarray) -> None:
    real = z.imag == 0
    if not np.any(real):
        return
    x = z.real[real]
    for lo, hi in m.components():
        bad = (x > lo - GUARD) & (x < hi + GUARD)
        if np.any(bad):
            raise DomainError(
                f"real argument {x[bad][0]!r} lies on the support component [{lo}, {hi}]"
            )


class Measure:
    """Base class. Subclasses implement the raw transforms."""

    # -- interface implemented by subclasses ---------------------------------
    def _g(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _dg(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _jrem(self, z: np.ndarray) -> np.ndarray:
        """``1/g(z) - z``, overridden where it can be formed without cancellation."""
        return 1.0 / self._g(z) - z

    def components(self) -> list[tuple[float, float]]:
        """Closed connected components of the support, sorted."""
        raise NotImplementedError

    def cdf(self, x):
        raise NotImplementedError

    def moment(self, k: int) -> float:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    # -- shared behaviour ------------------------------------------------------
    @property
    def support_lo(self) -> float:
        return self.components()[0][0]

    @property
    def support_hi(self) -> float:
        return self.components()[-1][1]

    def stieltjes(self, z):
        zz, scalar = _as_complex(z)
        _check_domain(self, zz)
        return _out(self._g(zz), scalar)

    def stieltjes_deriv(self, z):
        zz, scalar = _as_complex(z)
        _check_domain(self, zz)
        return _out(self._dg(zz), scalar)

    def atom_mass(self, x: float) -> float:
        return 0.0

    def mass_between(self, lo: float, hi: float) -> float:
        """Mass of the closed interval [lo, hi]."""
        left = self.cdf(np.nextafter(lo, -np.inf)) if np.isfinite(lo) else 0.0
        return float(self.cdf(hi) - left)

    def quantile(self, p: float) -> float:
        """``inf{x : cdf(x) >= p}`` located to adjacent floating-point numbers."""
        if not 0.0 <= p <= 1.0:
            raise RangeError(f"quantile level {p} outside [0, 1]")
        lo, hi = self.support_lo, self.support_hi
        if p == 0.0:
            return lo
        if self.cdf(lo) >= p:
            return lo
        a, b = lo, hi
        for _ in range(2000):
            mid = 0.5 * (a + b)
            if mid <= a or mid >= b:
                break
            if self.cdf(mid) >= p:
                b = mid
            else:
                a = mid
        return b

    def __add__(self, other):  # pragma: no cover - guard against misuse
        return NotImplemented


# ---------------------------------------------------------------------------
# Atomic measures
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Atomic(Measure):
    """Finite sum of point masses. Equal locations are merged on construction."""

    locations: np.ndarray
    weights: np.ndarray

    def __init__(self, locations, weights=None):
        loc = np.atleast_1d(np.asarray(locations, dtype=float))
        if weights is None:
            w = np.full(loc.shape, 1.0 / loc.size)
        else:
            w = np.atleast_1d(np.asarray(weights, dtype=float))
        if loc.shape != w.shape or loc.ndim != 1 or loc.size == 0:
            raise ValueError("locations and weights must be non-empty 1-D arrays of equal length")
        if not np.all(np.isfinite(loc)):
            raise ValueError("atom locations must be finite")
        if np.any(w <= 0):
            raise ValueError("atom weights must be strictly positive")
        if abs(w.sum() - 1.0) > MASS_TOL * max(1, w.size):
            raise ValueError(f"atom weights sum to {w.sum()!r}, expected 1")
        order = np.argsort(loc, kind="stable")
        loc, w = loc[order], w[order]
        uniq, inv = np.unique(loc, return_inverse=True)
        if uniq.size != loc.size:
            w = np.bincount(inv, weights=w)
            loc = uniq
        loc.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_samples(cls, samples) -> "Atomic":
        """Empirical measure of a sample (duplicates merged)."""
        s = np.asarray(samples, dtype=float).ravel()
        return cls(s, np.full(s.size, 1.0 / s.size))

    def _pairwise(self, z, fn):
        out = np.empty(z.shape, dtype=complex)
        flat, res = z.ravel(), out.reshape(-1)
        step = max(1, _CHUNK // self.locations.size)
        for i in range(0, flat.size, step):
            res[i : i + step] = fn(flat[i : i + step, None] - self.locations[None, :]) @ self.weights
        return out

    def _g(self, z):
        return self._pairwise(z, lambda d: 1.0 / d)

    def _dg(self, z):
        return self._pairwise(z, lambda d: -1.0 / (d * d))

    def _jrem(self, z):
        # 1 - z g(z) = -sum w x / (z - x)
        g = self._g(z)
        num = np.empty(z.shape, dtype=complex)
        flat, res = z.ravel(), num.reshape(-1)
        wx = self.weights * self.locations
        step = max(1, _CHUNK // self.locations.size)
        for i in range(0, flat.size, step):
            res[i : i + step] = (1.0 / (flat[i : i + step, None] - self.locations[None, :])) @ wx
        return -num / g

    def psi(self, z):
        """Moment-generating function evaluated directly from the atoms."""
        zz, scalar = _as_complex(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = zz.ravel()[:, None] * self.locations[None, :]
            bad = np.abs(1.0 - t) < GUARD
            if np.any(bad & (zz.ravel()[:, None].imag == 0)):
                raise DomainError("1/z lies on the support")
            val = (t / (1.0 - t)) @ self.weights
        return _out(val.reshape(zz.shape), scalar)

    def components(self):
        return [(float(x), float(x)) for x in self.locations]

    def atom_mass(self, x):
        idx = np.searchsorted(self.locations, x)
        if idx < self.locations.size and self.locations[idx] == x:
            return float(self.weights[idx])
        return 0.0

    def cdf(self, x):
        xx = np.asarray(x, dtype=float)
        cum = np.concatenate([[0.0], np.cumsum(self.weights)])
        cum[-1] = 1.0
        val = cum[np.searchsorted(self.locations, xx, side="right")]
        return val[()] if xx.ndim == 0 else val

    def quantile(self, p):
        if not 0.0 <= p <= 1.0:
            raise RangeError(f"quantile level {p} outside [0, 1]")
        cum = np.cumsum(self.weights)
        cum[-1] = 1.0
        idx = int(np.searchsorted(cum, p - 1e-14, side="left"))
        return float(self.locations[min(idx, self.locations.size - 1)])

    def moment(self, k):
        return float(np.sum(self.weights * self.locations ** k))

    def to_dict(self):
        return {
            "kind": "atomic",
            "parameters": {},
            "atoms": [[float(x), float(w)] for x, w in zip(self.locations, self.weights)],
        }


def dirac(a: float = 0.0) -> Atomic:
    return Atomic([a], [1.0])


# ---------------------------------------------------------------------------
# Densities on a grid (piecewise-linear interpolant plus separate atoms)
# ---------------------------------------------------------------------------


def _q_log(r):
    """(1+r) log(1+r) - r, accurate for small |r|."""
    small = np.abs(r) < 1e-2
    out = np.empty_like(r)
    rs = r[small]
    out[small] = rs**2 * (0.5 + rs * (-1 / 6 + rs * (1 / 12 + rs * (-1 / 20 + rs * (1 / 30 - rs / 42)))))
    rb = r[~small]
    out[~small] = (1 + rb) * np.log1p(rb) - rb
    return out


def _p_log(r):
    """r - log(1+r), accurate for small |r|."""
    small = np.abs(r) < 1e-2
    out = np.empty_like(r)
    rs = r[small]
    out[small] = rs**2 * (0.5 + rs * (-1 / 3 + rs * (1 / 4 + rs * (-1 / 5 + rs * (1 / 6 - rs / 7)))))
    rb = r[~small]
    out[~small] = rb - np.log1p(rb)
    return out


@dataclass(frozen=True, eq=False)
class GridDensity(Measure):
    """Density given by linear interpolation of ``values`` on ``grid``.

    Point masses are carried separately in ``atom_locations``/``atom_weights``
    and never smeared onto the grid. ``mass`` is the exact integral of the
    interpolant plus the atoms; it is *not* forced to one, because densities
    recovered by Stieltjes inversion carry a small quadrature defect that is
    reported rather than hidden. Distribution functions divide by ``mass``.
    """

    grid: np.ndarray
    values: np.ndarray
    atom_locations: np.ndarray = field(default_factory=lambda: np.empty(0))
    atom_weights: np.ndarray = field(default_factory=lambda: np.empty(0))
    mass_tol: float | None = MASS_TOL

    def __post_init__(self):
        x = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        al = np.atleast_1d(np.asarray(self.atom_locations, dtype=float))
        aw = np.atleast_1d(np.asarray(self.atom_weights, dtype=float))
        if x.ndim != 1 or x.shape != v.shape or x.size < 8:
            raise ValueError("grid and values must be 1-D of equal length >= 8")
        if not np.all(np.diff(x) > 0):
            raise ValueError("grid must be strictly increasing")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ValueError("density values must be finite and nonnegative")
        if al.shape != aw.shape or np.any(aw <= 0):
            raise ValueError("atoms need matching locations and strictly positive weights")
        if np.unique(al).size != al.size:
            raise ValueError("atom locations must be pairwise distinct")
        for name, arr in (("grid", x), ("values", v), ("atom_locations", al), ("atom_weights", aw)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.mass_tol is not None and abs(self.mass - 1.0) > self.mass_tol:
            raise ValueError(f"total mass {self.mass!r} differs from 1 by more than {self.mass_tol}")

    @property
    def continuous_mass(self) -> float:
        return float(np.sum(0.5 * (self.values[1:] + self.values[:-1]) * np.diff(self.grid)))

    @property
    def mass(self) -> float:
        return self.continuous_mass + float(self.atom_weights.sum())

    def normalized(self) -> "GridDensity":
        s = self.mass
        return GridDensity(self.grid, self.values / s, self.atom_locations, self.atom_weights / s)

    def _cells(self):
        a, b = self.grid[:-1], self.grid[1:]
        h = b - a
        s = (self.values[1:] - self.values[:-1]) / h
        keep = (self.values[1:] > 0) | (self.values[:-1] > 0)
        return a[keep], b[keep], h[keep], self.values[:-1][keep], s[keep]

    def _cell_sum(self, z, kernel):
        a, b, h, f0, s = self._cells()
        out = np.zeros(z.shape, dtype=complex)
        flat, res = z.ravel(), out.reshape(-1)
        n = max(1, a.size)
        step = max(1, _CHUNK // n)
        for i in range(0, flat.size, step):
            zc = flat[i : i + step, None]
            res[i : i + step] = kernel(zc, a, b, h, f0, s).sum(axis=1)
        if self.atom_weights.size:
            d = z[..., None] - self.atom_locations
            if kernel is _g_kernel:
                out = out + (1.0 / d) @ self.atom_weights
            else:
                out = out - (1.0 / (d * d)) @ self.atom_weights
        return out

    def _g(self, z):
        return self._cell_sum(z, _g_kernel)

    def _dg(self, z):
        return self._cell_sum(z, _dg_kernel)

    def components(self):
        comps = []
        pos = np.flatnonzero(self.values > DENSITY_FLOOR)
        if pos.size:
            runs = np.split(pos, np.flatnonzero(np.diff(pos) > 1) + 1)
            step = float(np.median(np.diff(self.grid)))
            for run in runs:
                lo = self.grid[max(run[0] - 1, 0)]
                hi = self.grid[min(run[-1] + 1, self.grid.size - 1)]
                if comps and lo - comps[-1][1] < 2 * step:
                    comps[-1] = (comps[-1][0], float(hi))
                else:
                    comps.append((float(lo), float(hi)))
        for x in self.atom_locations:
            if not any(lo <= x <= hi for lo, hi in comps):
                comps.append((float(x), float(x)))
        if not comps:
            raise ValueError("measure has empty support")
        return sorted(comps)

    def atom_mass(self, x):
        hit = self.atom_locations == x
        return float(self.atom_weights[hit].sum() / self.mass)

    def cdf(self, x):
        xx = np.asarray(x, dtype=float)
        g, v = self.grid, self.values
        cell = np.concatenate([[0.0], np.cumsum(0.5 * (v[1:] + v[:-1]) * np.diff(g))])
        i = np.clip(np.searchsorted(g, xx, side="right") - 1, 0, g.size - 2)
        t = np.clip(xx - g[i], 0.0, g[i + 1] - g[i])
        slope = (v[i + 1] - v[i]) / (g[i + 1] - g[i])
        partial = v[i] * t + 0.5 * slope * t * t
        cont = np.where(xx < g[0], 0.0, np.where(xx >= g[-1], cell[-1], cell[i] + partial))
        if self.atom_weights.size:
            cont = cont + (self.atom_locations[None, :] <= xx[..., None]) @ self.atom_weights
        val = np.minimum(cont / self.mass, 1.0)
        val = np.where(xx >= self.support_hi, 1.0, val)
        return val[()] if xx.ndim == 0 else val

    def moment(self, k):
        a, b = self.grid[:-1], self.grid[1:]
        fa = self.values[:-1]
        s = (self.values[1:] - fa) / (b - a)
        c0 = fa - s * a
        cont = np.sum(c0 * (b ** (k + 1) - a ** (k + 1)) / (k + 1) + s * (b ** (k + 2) - a ** (k + 2)) / (k + 2))
        atoms = float(np.sum(self.atom_weights * self.atom_locations**k))
        return float((cont + atoms) / self.mass)

    def to_dict(self):
        return {
            "kind": "grid",
            "parameters": {},
            "atoms": [[float(x), float(w)] for x, w in zip(self.atom_locations, self.atom_weights)],
            "grid": [float(x) for x in self.grid],
            "values": [float(v) for v in self.values],
        }


def _g_kernel(z, a, b, h, f0, s):
    # exact integral of the linear interpolant against 1/(z - x) on [a, b]
    zb = z - b
    r = h / zb
    log_ratio = np.log1p(r)
    return f0 * log_ratio + s * zb * _q_log(r)


def _dg_kernel(z, a, b, h, f0, s):
    # minus the exact integral against 1/(z - x)^2
    za, zb = z - a, z - b
    r = h / zb
    return -(f0 * h / (za * zb) + s * _p_log(r))


# ---------------------------------------------------------------------------
# Named closed forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Semicircle(Measure):
    """Centered semicircle law with variance ``sigma**2`` on [-2 sigma, 2 sigma]."""

    sigma: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")

    def _g(self, z):
        a = 2.0 * self.sigma
        # product of principal roots has its cut exactly on [-a, a]
        return 2.0 / (z + np.sqrt(z - a) * np.sqrt(z + a))

    def _dg(self, z):
        g = self._g(z)
        return g / (2 * self.sigma**2 * g - z)

    def _jrem(self, z):
        return -self.sigma**2 * self._g(z)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        s2 = self.sigma**2
        return np.sqrt(np.clip(4 * s2 - x * x, 0, None)) / (2 * np.pi * s2)

    def components(self):
        return [(-2.0 * self.sigma, 2.0 * self.sigma)]

    def cdf(self, x):
        xx = np.clip(np.asarray(x, dtype=float) / (2 * self.sigma), -1.0, 1.0)
        val = 0.5 + (xx * np.sqrt(1 - xx * xx) + np.arcsin(xx)) / np.pi
        return val[()] if np.ndim(val) == 0 else val

    def moment(self, k):
        if k % 2:
            return 0.0
        n = k // 2
        return math.comb(2 * n, n) / (n + 1) * self.sigma ** (2 * n)

    def to_dict(self):
        return {"kind": "semicircle", "parameters": {"sigma": self.sigma}}


@dataclass(frozen=True)
class MarchenkoPastur(Measure):
    """Marchenko-Pastur law with ratio ``c`` in (0, 1] and unit mean."""

    c: float = 1.0

    def __post_init__(self):
        if not 0 < self.c <= 1:
            raise ValueError("c must lie in (0, 1]")

    @property
    def edges(self) -> tuple[float, float]:
        r = math.sqrt(self.c)
        return (1 - r) ** 2, (1 + r) ** 2

    def _g(self, z):
        a, b = self.edges
        # stable form of the root of c z g^2 - (z + c - 1) g + 1 = 0 with Im g < 0
        return 2.0 / (z + self.c - 1 + np.sqrt(z - a) * np.sqrt(z - b))

    def _dg(self, z):
        g = self._g(z)
        c = self.c
        return (g - c * g * g) / (2 * c * z * g - (z + c - 1))

    def density(self, x):
        x = np.asarray(x, dtype=float)
        a, b = self.edges
        with np.errstate(divide="ignore", invalid="ignore"):
            d = np.sqrt(np.clip((b - x) * (x - a), 0, None)) / (2 * np.pi * self.c * x)
        return np.where((x > a) & (x < b), d, 0.0)

    def components(self):
        return [self.edges]

    def cdf(self, x):
        xx = np.asarray(x, dtype=float)
        val = np.vectorize(self._cdf_scalar, otypes=[float])(xx)
        return val[()] if xx.ndim == 0 else val

    def _cdf_scalar(self, x):
        a, b = self.edges
        if x <= a:
            return 0.0
        if x >= b:
            return 1.0
        c = self.c
        if a > 0:
            f = lambda t: math.sqrt(b - t) / (2 * math.pi * c * t)  # noqa: E731
            val, _ = integrate.quad(f, a, x, weight="alg", wvar=(0.5, 0.0), epsabs=1e-14, epsrel=1e-13)
        else:
            f = lambda t: math.sqrt(b - t) / (2 * math.pi * c)  # noqa: E731
            val, _ = integrate.quad(f, a, x, weight="alg", wvar=(-0.5, 0.0), epsabs=1e-14, epsrel=1e-13)
        return min(max(val, 0.0), 1.0)

    def moment(self, k):
        if k == 0:
            return 1.0
        # Narayana polynomials
        return float(sum(math.comb(k, j) * math.comb(k - 1, j) / (j + 1) * self.c**j for j in range(k)))

    def to_dict(self):
        return {"kind": "marchenko_pastur", "parameters": {"c": self.c}}


@dataclass(frozen=True, eq=False)
class Mixture(Measure):
    """Convex combination of measures."""

    parts: tuple

    def __init__(self, parts: Sequence[tuple[float, Measure]]):
        parts = tuple((float(w), m) for w, m in parts)
        if not parts or any(w <= 0 for w, _ in parts):
            raise ValueError("mixture weights must be strictly positive")
        if abs(sum(w for w, _ in parts) - 1.0) > MASS_TOL * len(parts):
            raise ValueError("mixture weights must sum to 1")
        object.__setattr__(self, "parts", parts)

    def _g(self, z):
        return sum(w * m._g(z) for w, m in self.parts)

    def _dg(self, z):
        return sum(w * m._dg(z) for w, m in self.parts)

    def components(self):
        comps = sorted(c for _, m in self.parts for c in m.components())
        merged = [comps[0]]
        for lo, hi in comps[1:]:
            if lo <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(hi, merged[-1][1]))
            else:
                merged.append((lo, hi))
        return merged

    def atom_mass(self, x):
        return sum(w * m.atom_mass(x) for w, m in self.parts)

    def cdf(self, x):
        return sum(w * m.cdf(x) for w, m in self.parts)

    def moment(self, k):
        return sum(w * m.moment(k) for w, m in self.parts)

    def to_dict(self):
        return {
            "kind": "mixture",
            "parameters": {"parts": [{"weight": w, "measure": m.to_dict()} for w, m in self.parts]},
        }


# ---------------------------------------------------------------------------
# Module-level operations
# ---------------------------------------------------------------------------


def stieltjes(m: Measure, z):
    """Cauchy-Stieltjes transform ``int dm(x) / (z - x)``."""
    return m.stieltjes(z)


def j_transform(m: Measure, z):
    """Reciprocal Cauchy transform ``1 / g_m(z)``."""
    g = np.asarray(m.stieltjes(z))
    if np.any(g == 0):
        raise ZeroDivisionError("Stieltjes transform vanishes")
    return 1.0 / g if g.ndim else complex(1.0 / g)


def psi_eta(m: Measure, z):
    """Moment-generating function ``psi`` and eta transform ``psi / (1 + psi)``."""
    zz, scalar = _as_complex(z)
    if np.any(zz == 0):
        raise DomainError("psi_eta requires z != 0")
    if isinstance(m, Atomic):
        psi = np.asarray(m.psi(zz))
    else:
        w = 1.0 / zz
        psi = w * np.asarray(m.stieltjes(w)) - 1.0
    eta = psi / (1.0 + psi)
    return _out(psi, scalar), _out(eta, scalar)


def h_c_transform(m: Measure, c: float, z):
    """Rectangular transform ``(c/z) g(1/z)^2 + (1-c) g(1/z)`` of the law ``m`` on R+."""
    if not 0 < c <= 1:
        raise RangeError("c must lie in (0, 1]")
    zz, scalar = _as_complex(z)
    if np.any(zz == 0):
        raise DomainError("h_c_transform requires z != 0")
    g = np.asarray(m.stieltjes(1.0 / zz))
    return _out(c / zz * g * g + (1 - c) * g, scalar)


def density_from_g(g_eval: Callable, grid, y: float = 1e-6, **kw) -> GridDensity:
    """Recover a density by Stieltjes inversion ``max(0, -Im g(x + iy) / pi)``.

    The returned measure is not renormalized; its ``mass`` attribute reports
    the recovered continuous mass. Extra keyword arguments (atoms) are passed
    to :class:`GridDensity`.
    """
    x = np.asarray(grid, dtype=float)
    if not y > 0:
        raise RangeError("inversion height must be positive")
    try:
        g = np.asarray(g_eval(x + 1j * y), dtype=complex)
    except NoConvergence:
        raise
    except Exception as exc:  # noqa: BLE001 - re-raised with context
        raise EvaluationError(f"Stieltjes evaluator failed: {exc}") from exc
    if g.shape != x.shape or not np.all(np.isfinite(g)):
        raise EvaluationError("Stieltjes evaluator returned non-finite values")
    vals = np.maximum(0.0, -g.imag / np.pi)
    return GridDensity(x, vals, mass_tol=None, **kw)


def cdf(m: Measure, x):
    return m.cdf(x)


def quantile(m: Measure, p: float) -> float:
    return m.quantile(p)


def moments(m: Measure, k: int) -> float:
    if k < 0:
        raise RangeError("moment order must be nonnegative")
    if k == 0:
        return 1.0
    return m.moment(k)


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def measure_from_dict(d: dict) -> Measure:
    kind = d["kind"]
    params = d.get("parameters", {}) or {}
    if kind == "atomic":
        atoms = np.asarray(d["atoms"], dtype=float).reshape(-1, 2)
        return Atomic(atoms[:, 0], atoms[:, 1])
    if kind == "grid":
        atoms = np.asarray(d.get("atoms") or [], dtype=float).reshape(-1, 2)
        return GridDensity(
            np.asarray(d["grid"], float),
            np.asarray(d["values"], float),
            atoms[:, 0],
            atoms[:, 1],
            mass_tol=None,
        )
    if kind == "semicircle":
        return Semicircle(float(params["sigma"]))
    if kind == "marchenko_pastur":
        return MarchenkoPastur(float(params["c"]))
    if kind == "mixture":
        return Mixture([(p["weight"], measure_from_dict(p["measure"])) for p in params["parts"]])
    raise ValueError(f"unknown measure kind {kind!r}")


def measure_to_json(m: Measure) -> str:
    return json.dumps(m.to_dict())


def measure_from_json(s: str) -> Measure:
    return measure_from_dict(json.loads(s))
