"""Two-level Landau-Zener model.

Units: hbar = 1, time in ns, every energy/frequency is an angular frequency in
rad/ns. User-facing inputs in MHz are ordinary frequencies (eps/2pi) and go
through :func:`mhz_to_rad_ns`.

``H(t) = -(1/2) [[eps(t), delta], [delta, -eps(t)]]`` with ``eps(t) = eps_i + v t``.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .state import DensityMatrix2, PureState2, bloch_from_density

TWO_PI = 2.0 * math.pi


def mhz_to_rad_ns(f_mhz: float) -> float:
    """Ordinary frequency in MHz -> angular frequency in rad/ns."""
    return TWO_PI * f_mhz * 1e-3


def rad_ns_to_mhz(w: float) -> float:
    return w / (TWO_PI * 1e-3)


class Scheme(str, enum.Enum):
    A = "A"  # start far below the crossing
    B = "B"  # start at the centre of the crossing


class Prep(str, enum.Enum):
    GROUND = "ground"      # exact |E-> at eps_i
    DIABATIC = "diabatic"  # pulse-prepared |1> (scheme A) or (|0>+|1>)/sqrt2 (scheme B)


class ProtocolError(ValueError):
    pass


@dataclass(frozen=True)
class LZParams:
    delta: float
    eps_i: float
    eps_f: float
    t_lz: float

    def __post_init__(self):
        if not (self.delta > 0 and math.isfinite(self.delta)):
            raise ProtocolError(f"delta must be positive, got {self.delta!r}")
        if not (self.t_lz > 0 and math.isfinite(self.t_lz)):
            raise ProtocolError(f"t_lz must be positive, got {self.t_lz!r}")
        if not math.isfinite(self.v):
            raise ProtocolError("sweep speed is not finite")

    @property
    def v(self) -> float:
        return (self.eps_f - self.eps_i) / self.t_lz

    @property
    def omega_max(self) -> float:
        return math.hypot(self.delta, max(abs(self.eps_i), abs(self.eps_f)))

    @classmethod
    def from_mhz(cls, delta_mhz, eps_i_mhz, eps_f_mhz, t_lz_ns) -> "LZParams":
        return cls(mhz_to_rad_ns(delta_mhz), mhz_to_rad_ns(eps_i_mhz), mhz_to_rad_ns(eps_f_mhz), float(t_lz_ns))


@dataclass(frozen=True)
class ChirpProtocol:
    params: LZParams
    scheme: Scheme = Scheme.A
    prep: Prep = Prep.GROUND

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        object.__setattr__(self, "prep", Prep(self.prep))
        p = self.params
        if self.scheme is Scheme.B and p.eps_i != 0.0:
            raise ProtocolError(f"scheme B starts at eps_i = 0, got {p.eps_i!r}")
        if self.scheme is Scheme.A and not p.eps_i < -p.delta:
            raise ProtocolError(f"scheme A needs eps_i < -delta, got eps_i={p.eps_i!r}, delta={p.delta!r}")

    def initial_state(self) -> DensityMatrix2:
        """Ideal instantaneous preparation; no pulse shapes are simulated."""
        p = self.params
        if self.prep is Prep.DIABATIC:
            if self.scheme is Scheme.A:
                return DensityMatrix2(0.0, 1.0)
            return DensityMatrix2(0.5, 0.5, 0.5, 0.0)
        return DensityMatrix2.from_pure(ground_state(eigen_frame(p.eps_i, p.delta)))

    def with_t_lz(self, t_lz: float) -> "ChirpProtocol":
        return replace(self, params=replace(self.params, t_lz=t_lz))

    def to_json(self) -> dict:
        p = self.params
        return {
            "delta_mhz": rad_ns_to_mhz(p.delta),
            "eps_i_mhz": rad_ns_to_mhz(p.eps_i),
            "eps_f_mhz": rad_ns_to_mhz(p.eps_f),
            "t_lz_ns": p.t_lz,
            "scheme": self.scheme.value,
            "prep": self.prep.value,
        }

    @classmethod
    def from_mapping(cls, d: dict) -> "ChirpProtocol":
        try:
            params = LZParams.from_mhz(d["delta_mhz"], d["eps_i_mhz"], d["eps_f_mhz"], d["t_lz_ns"])
        except KeyError as exc:
            raise ProtocolError(f"protocol is missing field {exc.args[0]!r}") from None
        return cls(params, Scheme(str(d.get("scheme", "A")).upper()), Prep(d.get("prep", "ground")))


def load_protocol(path) -> ChirpProtocol:
    """Read a protocol file (``.json`` or ``.toml``) with MHz/ns fields."""
    path = Path(path)
    if path.suffix.lower() == ".toml":
        from ._toml import load_toml

        data = load_toml(path)
    else:
        data = json.loads(path.read_text())
    return ChirpProtocol.from_mapping(data)


@dataclass(frozen=True)
class EigenFrame:
    theta: float
    omega: float

    @property
    def energies(self) -> tuple[float, float]:
        """(E-, E+)"""
        return -0.5 * self.omega, 0.5 * self.omega


def epsilon_at(p: LZParams, t: float) -> float:
    if not 0.0 <= t <= p.t_lz:
        raise ProtocolError(f"t={t!r} outside [0, {p.t_lz!r}]")
    if t == p.t_lz:
        return p.eps_f
    return p.eps_i + p.v * t


def eigen_frame(eps: float, delta: float) -> EigenFrame:
    if not delta > 0:
        raise ProtocolError("delta must be positive")
    return EigenFrame(math.atan2(delta, eps), math.hypot(delta, eps))


def ground_state(frame: EigenFrame) -> PureState2:
    """|E-> = cos(theta/2)|0> + sin(theta/2)|1>"""
    return PureState2(complex(math.cos(0.5 * frame.theta)), complex(math.sin(0.5 * frame.theta)))


def excited_state(frame: EigenFrame) -> PureState2:
    """|E+> = -sin(theta/2)|0> + cos(theta/2)|1>"""
    return PureState2(complex(-math.sin(0.5 * frame.theta)), complex(math.cos(0.5 * frame.theta)))


def p_plus(rho: DensityMatrix2, frame: EigenFrame) -> float:
    """Occupation of the instantaneous excited state |E+>."""
    b = bloch_from_density(rho, check=False)
    return 0.5 * (1.0 - b.sz * math.cos(frame.theta) - b.sx * math.sin(frame.theta))


def p_minus(rho: DensityMatrix2, frame: EigenFrame) -> float:
    b = bloch_from_density(rho, check=False)
    return 0.5 * (1.0 + b.sz * math.cos(frame.theta) + b.sx * math.sin(frame.theta))


def p_plus_array(states: np.ndarray, eps, delta) -> np.ndarray:
    """Vectorised :func:`p_plus` over an ``(M, 4)`` state array."""
    s = np.asarray(states)
    omega = np.hypot(delta, eps)
    sz = s[:, 0] - s[:, 1]
    sx = 2.0 * s[:, 2]
    return 0.5 * (1.0 - sz * (eps / omega) - sx * (delta / omega))


def lz_probability(delta: float, v: float) -> float:
    """Asymptotic Landau-Zener probability ``exp(-pi delta^2 / (2 v))``."""
    if not v > 0:
        raise ProtocolError(f"sweep rate must be positive, got {v!r}")
    return math.exp(-math.pi * delta * delta / (2.0 * v))


def chirp_to_epsilon(delta_omega_i: float, delta_omega_f: float) -> tuple[float, float]:
    """Microwave detuning endpoints -> diabatic energy endpoints (eps = -delta_omega)."""
    return -delta_omega_i, -delta_omega_f
