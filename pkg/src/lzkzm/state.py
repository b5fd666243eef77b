"""Single-qubit state algebra: density matrices, Bloch vectors, pure states.

Conventions: ``rho00 = (1 + sz)/2``, ``rho11 = (1 - sz)/2``,
``Re rho01 = sx/2``, ``Im rho01 = -sy/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# evolved states are checked against STATE_TOL, algebraic identities use 1e-12
STATE_TOL = 1e-9


class InvalidStateError(ValueError):
    pass


@dataclass(frozen=True)
class DensityMatrix2:
    """2x2 Hermitian, unit-trace state stored as its four real degrees of freedom."""

    rho00: float
    rho11: float
    re01: float = 0.0
    im01: float = 0.0

    def __post_init__(self):
        tol = STATE_TOL
        vals = (self.rho00, self.rho11, self.re01, self.im01)
        if not all(math.isfinite(v) for v in vals):
            raise InvalidStateError(f"non-finite density matrix entries {vals}")
        if abs(self.rho00 + self.rho11 - 1.0) > tol:
            raise InvalidStateError(f"trace {self.rho00 + self.rho11!r} != 1")
        if self.rho00 < -tol or self.rho11 < -tol:
            raise InvalidStateError(f"negative population ({self.rho00}, {self.rho11})")
        if self.re01**2 + self.im01**2 > self.rho00 * self.rho11 + tol:
            raise InvalidStateError("coherence violates positivity |rho01|^2 <= rho00*rho11")

    @property
    def rho01(self) -> complex:
        return complex(self.re01, self.im01)

    @property
    def rho10(self) -> complex:
        return complex(self.re01, -self.im01)

    @property
    def trace(self) -> float:
        return self.rho00 + self.rho11

    def as_array(self) -> np.ndarray:
        """Real 4-vector ``(rho00, rho11, re01, im01)`` used by the kernels."""
        return np.array([self.rho00, self.rho11, self.re01, self.im01])

    def matrix(self) -> np.ndarray:
        return np.array([[self.rho00, self.rho01], [self.rho10, self.rho11]], dtype=complex)

    def eigenvalues(self) -> tuple[float, float]:
        b = bloch_from_density(self, check=False)
        r = math.sqrt(b.sx**2 + b.sy**2 + b.sz**2)
        return 0.5 * (1.0 - r), 0.5 * (1.0 + r)

    @classmethod
    def from_array(cls, a) -> "DensityMatrix2":
        return cls(float(a[0]), float(a[1]), float(a[2]), float(a[3]))

    @classmethod
    def from_pure(cls, psi: "PureState2") -> "DensityMatrix2":
        c = psi.a0 * psi.a1.conjugate()
        return cls(abs(psi.a0) ** 2, abs(psi.a1) ** 2, c.real, c.imag)

    @classmethod
    def maximally_mixed(cls) -> "DensityMatrix2":
        return cls(0.5, 0.5)

    def to_json(self) -> dict:
        return {"rho00": self.rho00, "rho11": self.rho11, "re01": self.re01, "im01": self.im01}

    @classmethod
    def from_json(cls, d: dict) -> "DensityMatrix2":
        return cls(float(d["rho00"]), float(d["rho11"]), float(d.get("re01", 0.0)), float(d.get("im01", 0.0)))


@dataclass(frozen=True)
class BlochVector:
    sx: float
    sy: float
    sz: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.sx, self.sy, self.sz)):
            raise InvalidStateError("non-finite Bloch vector")
        if self.norm2 > 1.0 + STATE_TOL:
            raise InvalidStateError(f"|b|^2 = {self.norm2!r} exceeds 1")

    @property
    def norm2(self) -> float:
        return self.sx**2 + self.sy**2 + self.sz**2

    def as_array(self) -> np.ndarray:
        return np.array([self.sx, self.sy, self.sz])

    def to_json(self) -> dict:
        return {"sx": self.sx, "sy": self.sy, "sz": self.sz}

    @classmethod
    def from_json(cls, d: dict) -> "BlochVector":
        return cls(float(d["sx"]), float(d["sy"]), float(d["sz"]))


@dataclass(frozen=True)
class PureState2:
    """Amplitudes on the diabatic basis ``|0>``, ``|1>``."""

    a0: complex
    a1: complex

    def __post_init__(self):
        n = abs(self.a0) ** 2 + abs(self.a1) ** 2
        if abs(n - 1.0) > STATE_TOL:
            raise InvalidStateError(f"pure state norm {n!r} != 1")

    def overlap(self, other: "PureState2") -> complex:
        """<self|other>"""
        return self.a0.conjugate() * other.a0 + self.a1.conjugate() * other.a1


def bloch_from_density(rho: DensityMatrix2, check: bool = True) -> BlochVector:
    sx = 2.0 * rho.re01
    sy = -2.0 * rho.im01
    sz = rho.rho00 - rho.rho11
    if not check:
        return _unchecked_bloch(sx, sy, sz)
    return BlochVector(sx, sy, sz)


def _unchecked_bloch(sx: float, sy: float, sz: float) -> BlochVector:
    b = object.__new__(BlochVector)
    object.__setattr__(b, "sx", sx)
    object.__setattr__(b, "sy", sy)
    object.__setattr__(b, "sz", sz)
    return b


def density_from_bloch(b: BlochVector) -> DensityMatrix2:
    if b.norm2 > 1.0 + STATE_TOL:
        raise InvalidStateError(f"|b|^2 = {b.norm2!r} exceeds 1")
    return DensityMatrix2(0.5 * (1.0 + b.sz), 0.5 * (1.0 - b.sz), 0.5 * b.sx, -0.5 * b.sy)


def purity(rho: DensityMatrix2) -> float:
    """Tr(rho^2)."""
    return rho.rho00**2 + rho.rho11**2 + 2.0 * (rho.re01**2 + rho.im01**2)


def bloch_array(states: np.ndarray) -> np.ndarray:
    """Vectorised Bloch components for an ``(M, 4)`` state array -> ``(M, 3)``."""
    s = np.asarray(states)
    return np.stack([2.0 * s[:, 2], -2.0 * s[:, 3], s[:, 0] - s[:, 1]], axis=1)
