"""Deformed random matrix model descriptions."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace

from .measures import MarchenkoPastur, Measure, Semicircle, measure_from_dict

ADDITIVE = "additive"
MULTIPLICATIVE = "multiplicative"
INFO_PLUS_NOISE = "info_plus_noise"
ISOTROPIC_ADDITIVE = "isotropic_additive"
ISOTROPIC_MULTIPLICATIVE = "isotropic_multiplicative"

IID_KINDS = (ADDITIVE, MULTIPLICATIVE, INFO_PLUS_NOISE)
ISOTROPIC_KINDS = (ISOTROPIC_ADDITIVE, ISOTROPIC_MULTIPLICATIVE)
KINDS = IID_KINDS + ISOTROPIC_KINDS


@dataclass(frozen=True)
class DeformedModel:
    """A deformation ``nu`` combined with a bulk law.

    additive          M = W + A,                         needs ``sigma``
    multiplicative    M = A^1/2 S A^1/2,                 needs ``c``
    info_plus_noise   M = (sigma X / sqrt p + A)(...)^*, needs ``sigma`` and ``c``
    isotropic_*       M = A + U^* B U or A^1/2 U^* B U A^1/2, needs ``mu``
    """

    kind: str
    nu: Measure
    mu: Measure | None = None
    sigma: float | None = None
    c: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.kind in (ADDITIVE, INFO_PLUS_NOISE):
            if self.sigma is None or not self.sigma > 0:
                raise ValueError(f"{self.kind} model needs sigma > 0")
        if self.kind in (MULTIPLICATIVE, INFO_PLUS_NOISE):
            if self.c is None or not 0 < self.c <= 1:
                raise ValueError(f"{self.kind} model needs c in (0, 1]")
            if self.nu.support_lo < 0:
                raise ValueError(f"{self.kind} model needs nu supported on [0, inf)")
        if self.kind == ADDITIVE and self.mu is None:
            object.__setattr__(self, "mu", Semicircle(self.sigma))
        elif self.kind in (MULTIPLICATIVE, INFO_PLUS_NOISE) and self.mu is None:
            object.__setattr__(self, "mu", MarchenkoPastur(self.c))
        elif self.kind in ISOTROPIC_KINDS:
            if self.mu is None:
                raise ValueError(f"{self.kind} model needs the bulk measure mu")
            if self.kind == ISOTROPIC_MULTIPLICATIVE and min(self.mu.support_lo, self.nu.support_lo) < 0:
                raise ValueError("isotropic multiplicative model needs measures on [0, inf)")

    # constructors -----------------------------------------------------------
    @classmethod
    def additive(cls, nu, sigma):
        return cls(ADDITIVE, nu, sigma=float(sigma))

    @classmethod
    def multiplicative(cls, nu, c):
        return cls(MULTIPLICATIVE, nu, c=float(c))

    @classmethod
    def info_plus_noise(cls, nu, c, sigma):
        return cls(INFO_PLUS_NOISE, nu, sigma=float(sigma), c=float(c))

    @classmethod
    def isotropic_additive(cls, mu, nu):
        return cls(ISOTROPIC_ADDITIVE, nu, mu=mu)

    @classmethod
    def isotropic_multiplicative(cls, mu, nu):
        return cls(ISOTROPIC_MULTIPLICATIVE, nu, mu=mu)

    @property
    def iid(self) -> bool:
        return self.kind in IID_KINDS

    def with_nu(self, nu: Measure) -> "DeformedModel":
        return replace(self, nu=nu)

    def stieltjes(self, z, cfg=None):
        """Stieltjes transform of the limiting spectral law."""
        from . import freeconv

        return freeconv.model_g(self, z, cfg)

    # serialization -----------------------------------------------------------
    def to_dict(self) -> dict:
        d = {"kind": self.kind, "nu": self.nu.to_dict()}
        if self.kind in ISOTROPIC_KINDS:
            d["mu"] = self.mu.to_dict()
        if self.sigma is not None:
            d["sigma"] = self.sigma
        if self.c is not None:
            d["c"] = self.c
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "DeformedModel":
        mu = measure_from_dict(d["mu"]) if d.get("mu") is not None else None
        if d["kind"] in IID_KINDS:
            mu = None
        return cls(d["kind"], measure_from_dict(d["nu"]), mu=mu, sigma=d.get("sigma"), c=d.get("c"))

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]
