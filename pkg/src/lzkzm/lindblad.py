"""Fixed-step RK4 integration of the chirped two-level master equation.

    rho00' = (i/2) delta (rho10 - rho01) + G1 rho11
    rho11' = (i/2) delta (rho01 - rho10) - G1 rho11
    rho01' = (i/2) [delta (rho11 - rho00) + 2 eps rho01] - gamma rho01
    rho10' = conj(rho01')

``gamma`` is the total coherence decay rate 1/T2*, used as is.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Sequence

import numpy as np

from . import kernels
from .lz import ChirpProtocol, LZParams, p_plus_array
from .state import DensityMatrix2, bloch_array

# phase advance per step at the largest gap; ~300 steps per oscillation period
STEP_PHASE = 0.02
MIN_STEPS = 4000
MAX_STEPS = 10**10
TRACE_TOL = 1e-9


class IntegrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class DecoherenceParams:
    gamma1: float = 0.0
    gamma_phi_total: float = 0.0

    def __post_init__(self):
        if not self.gamma1 >= 0:
            raise ValueError(f"gamma1 must be >= 0, got {self.gamma1!r}")
        if not self.gamma_phi_total >= self.gamma1 / 2 - 1e-12:
            raise ValueError("coherence decay rate must be at least gamma1/2 (T2* <= 2 T1)")

    @classmethod
    def from_times(cls, t1_ns: float = math.inf, t2_ns: float = math.inf) -> "DecoherenceParams":
        return cls(0.0 if math.isinf(t1_ns) else 1.0 / t1_ns, 0.0 if math.isinf(t2_ns) else 1.0 / t2_ns)

    @property
    def t1_ns(self) -> float:
        return math.inf if self.gamma1 == 0 else 1.0 / self.gamma1

    @property
    def t2_ns(self) -> float:
        return math.inf if self.gamma_phi_total == 0 else 1.0 / self.gamma_phi_total

    @property
    def is_unitary(self) -> bool:
        return self.gamma1 == 0 and self.gamma_phi_total == 0


NO_DECOHERENCE = DecoherenceParams()
# phase qubit and 3D transmon of the experiment
Q1 = DecoherenceParams.from_times(113.0, 93.0)
Q2 = DecoherenceParams.from_times(2386.0, 2135.0)
DECOHERENCE_PRESETS = {"none": NO_DECOHERENCE, "q1": Q1, "q2": Q2}


class RhoDot(NamedTuple):
    d00: float
    d11: float
    d01: complex
    d10: complex


def rhs(rho: DensityMatrix2, eps: float, delta: float, dec: DecoherenceParams = NO_DECOHERENCE) -> RhoDot:
    r01, r10 = rho.rho01, rho.rho10
    d00 = (0.5j * delta * (r10 - r01)).real + dec.gamma1 * rho.rho11
    d11 = (0.5j * delta * (r01 - r10)).real - dec.gamma1 * rho.rho11
    d01 = 0.5j * (delta * (rho.rho11 - rho.rho00) + 2.0 * eps * r01) - dec.gamma_phi_total * r01
    return RhoDot(d00, d11, d01, d01.conjugate())


def default_step(params: LZParams) -> float:
    return min(params.t_lz / MIN_STEPS, STEP_PHASE / params.omega_max)


def _plan(t_lz: float, h_max: float) -> tuple[int, float]:
    if not h_max > 0 or h_max <= 64 * np.spacing(t_lz):
        raise IntegrationError(f"step {h_max!r} underflows against duration {t_lz!r}")
    n = math.ceil(t_lz / h_max)
    if n > MAX_STEPS:
        raise IntegrationError(f"{n} steps requested (> {MAX_STEPS}); t_lz too long for the step")
    return n, t_lz / n


@dataclass
class Trajectory:
    times: np.ndarray          # (S,) ns
    states: np.ndarray         # (S, 4) rho00, rho11, re01, im01
    protocol: ChirpProtocol
    decoherence: DecoherenceParams
    step: float
    n_steps: int

    def __len__(self):
        return len(self.times)

    def rho(self, i: int) -> DensityMatrix2:
        return DensityMatrix2.from_array(self.states[i])

    @property
    def final(self) -> DensityMatrix2:
        return self.rho(-1)

    @property
    def eps(self) -> np.ndarray:
        p = self.protocol.params
        e = p.eps_i + p.v * self.times
        e[-1] = p.eps_f
        return e

    @property
    def theta(self) -> np.ndarray:
        return np.arctan2(self.protocol.params.delta, self.eps)

    @property
    def bloch(self) -> np.ndarray:
        return bloch_array(self.states)

    @property
    def p_plus(self) -> np.ndarray:
        return p_plus_array(self.states, self.eps, self.protocol.params.delta)

    @property
    def purity(self) -> np.ndarray:
        s = self.states
        return s[:, 0] ** 2 + s[:, 1] ** 2 + 2.0 * (s[:, 2] ** 2 + s[:, 3] ** 2)

    def columns(self) -> dict[str, np.ndarray]:
        b = self.bloch
        return {
            "t_ns": self.times,
            "rho00": self.states[:, 0],
            "rho11": self.states[:, 1],
            "re01": self.states[:, 2],
            "im01": self.states[:, 3],
            "sx": b[:, 0],
            "sy": b[:, 1],
            "sz": b[:, 2],
            "theta": self.theta,
            "p_plus": self.p_plus,
        }


def _check_states(states: np.ndarray) -> None:
    if not np.all(np.isfinite(states)):
        raise IntegrationError("integration produced non-finite values")
    tr = states[..., 0] + states[..., 1]
    if np.max(np.abs(tr - 1.0)) > TRACE_TOL:
        raise IntegrationError(f"trace drift {np.max(np.abs(tr - 1.0)):.3e} exceeds {TRACE_TOL}")


def integrate(
    protocol: ChirpProtocol,
    rho0: DensityMatrix2 | None = None,
    dec: DecoherenceParams = NO_DECOHERENCE,
    sample_every: float | None = None,
    step: float | None = None,
) -> Trajectory:
    """Integrate over ``[0, t_lz]`` and return samples including both ends.

    Samples land on step boundaries: every ``round(sample_every / h)`` steps
    plus the final step. The final state does not depend on ``sample_every``.
    """
    p = protocol.params
    if rho0 is None:
        rho0 = protocol.initial_state()
    n, h = _plan(p.t_lz, default_step(p) if step is None else step)
    if sample_every is None:
        stride = n
    else:
        if not sample_every > 0:
            raise IntegrationError("sample_every must be positive")
        stride = max(1, round(sample_every / h))
    marks = list(range(0, n, stride)) + [n]

    states = np.empty((len(marks), 4))
    states[0] = rho0.as_array()
    cur = states[:1].copy()
    for m, (a, b) in enumerate(zip(marks[:-1], marks[1:]), start=1):
        cur = kernels.lindblad_batch(
            [p.delta], p.eps_i, p.v, h, a, b - a, cur, dec.gamma1, dec.gamma_phi_total
        )
        states[m] = cur[0]
    _check_states(states)
    times = np.array(marks, dtype=float) * h
    times[-1] = p.t_lz
    return Trajectory(times, states, protocol, dec, h, n)


def final_states(
    protocols: Sequence[ChirpProtocol],
    decs: Sequence[DecoherenceParams] | DecoherenceParams = NO_DECOHERENCE,
    rho0s: Sequence[DensityMatrix2] | None = None,
    step_phase: float = STEP_PHASE,
) -> np.ndarray:
    """Final ``(M, 4)`` states for many protocols in one batched kernel call.

    Each row is bit-identical to ``integrate(protocol, ...).states[-1]`` with
    the default step.
    """
    M = len(protocols)
    if isinstance(decs, DecoherenceParams):
        decs = [decs] * M
    if rho0s is None:
        rho0s = [pr.initial_state() for pr in protocols]
    delta = np.empty(M)
    eps_i = np.empty(M)
    v = np.empty(M)
    h = np.empty(M)
    n = np.empty(M, dtype=np.int64)
    for j, pr in enumerate(protocols):
        p = pr.params
        n[j], h[j] = _plan(p.t_lz, min(p.t_lz / MIN_STEPS, step_phase / p.omega_max))
        delta[j], eps_i[j], v[j] = p.delta, p.eps_i, p.v
    st = np.array([r.as_array() for r in rho0s]).reshape(M, 4)
    g1 = np.array([d.gamma1 for d in decs])
    gam = np.array([d.gamma_phi_total for d in decs])
    out = kernels.lindblad_batch(delta, eps_i, v, h, 0, n, st, g1, gam)
    _check_states(out)
    return out


def final_p_plus(
    protocol: ChirpProtocol,
    rho0: DensityMatrix2 | None = None,
    dec: DecoherenceParams = NO_DECOHERENCE,
    step: float | None = None,
) -> float:
    tr = integrate(protocol, rho0, dec, step=step)
    return float(tr.p_plus[-1])


def state_at(
    protocol: ChirpProtocol,
    t: float,
    rho0: DensityMatrix2 | None = None,
    dec: DecoherenceParams = NO_DECOHERENCE,
) -> DensityMatrix2:
    """State at time ``t`` of the sweep, from a run truncated at ``t``.

    The truncated run keeps the start and the sweep speed; its step follows
    the default rule for the shorter duration.
    """
    p = protocol.params
    if not 0 <= t <= p.t_lz:
        raise IntegrationError(f"t={t!r} outside [0, {p.t_lz!r}]")
    if rho0 is None:
        rho0 = protocol.initial_state()
    if t == 0:
        return rho0
    cut = replace(protocol, params=replace(p, eps_f=p.eps_i + p.v * t, t_lz=t))
    return integrate(cut, rho0, dec).final
