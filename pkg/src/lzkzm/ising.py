"""Ising-chain quench as a bundle of independent Landau-Zener problems.

Mode ``k`` of a chain quenched as ``g(t) = -t/tau_q_i`` is an LZ sweep with
``delta = 1`` and rate ``chi_k = 1 / (4 tau_q_i sin^2 k)`` in normalised time.
The defect density is ``N = (k_c/pi) * mean_k P+(k)`` over a midpoint grid on
``(0, k_c]``; the grid never contains ``k = 0`` where ``chi_k`` diverges.
"""

from __future__ import annotations

import enum
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .lindblad import NO_DECOHERENCE, STEP_PHASE, DecoherenceParams, final_states
from .lz import ChirpProtocol, LZParams, Prep, Scheme, p_plus_array

DEFAULT_DELTA_REF = 2.0 * math.pi * 0.02  # 20 MHz gap, rad/ns
# 1/sqrt(tau) = 0.02, 0.03, ..., 0.10; rounded so that e.g. x = 0.1 gives exactly 100
DEFAULT_TAU_GRID = tuple(round(1.0 / (0.01 * m) ** 2, 10) for m in range(2, 11))


class FiniteSizeWarning(UserWarning):
    pass


class RangeKind(str, enum.Enum):
    FIXED = "fixed"
    COTK = "cotk"


@dataclass(frozen=True)
class RangePolicy:
    kind: RangeKind = RangeKind.FIXED
    eps_f_over_delta: float = 10.0

    def __post_init__(self):
        object.__setattr__(self, "kind", RangeKind(self.kind))
        if self.kind is RangeKind.FIXED and not self.eps_f_over_delta > 1.0:
            raise ValueError("fixed sweep range must exceed the gap (eps_f/delta > 1)")

    def eps_f(self, k: float) -> float:
        if self.kind is RangeKind.COTK:
            if not 0 < k < math.pi / 2:
                raise ValueError(f"cot(k) range needs 0 < k < pi/2, got k={k!r}")
            return 1.0 / math.tan(k)
        return self.eps_f_over_delta

    def label(self) -> str:
        return "cotk" if self.kind is RangeKind.COTK else f"fixed:{self.eps_f_over_delta:g}"

    @classmethod
    def parse(cls, text: str) -> "RangePolicy":
        text = str(text).strip().lower()
        if text == "cotk":
            return cls(RangeKind.COTK)
        if text.startswith("fixed"):
            _, _, val = text.partition(":")
            return cls(RangeKind.FIXED, float(val) if val else 10.0)
        return cls(RangeKind.FIXED, float(text))


@dataclass(frozen=True)
class IsingQuenchSpec:
    tau_q_i: float
    k_c: float = 0.2 * math.pi
    n_k: int = 127
    range_policy: RangePolicy = field(default_factory=RangePolicy)
    delta_ref: float = DEFAULT_DELTA_REF
    prep: Prep = Prep.GROUND

    def __post_init__(self):
        if not 0 < self.k_c < math.pi / 4:
            raise ValueError(f"k_c must lie in (0, pi/4), got {self.k_c!r}")
        if int(self.n_k) != self.n_k or self.n_k < 1:
            raise ValueError(f"n_k must be a positive integer, got {self.n_k!r}")
        if not self.tau_q_i > 1.0 / (2.0 * math.pi):
            raise ValueError(f"tau_q_i must be >> 1/2pi, got {self.tau_q_i!r}")
        if not self.delta_ref > 0:
            raise ValueError("delta_ref must be positive")
        object.__setattr__(self, "prep", Prep(self.prep))

    def with_tau(self, tau_q_i: float) -> "IsingQuenchSpec":
        return replace(self, tau_q_i=tau_q_i)


@dataclass(frozen=True)
class ScalingPoint:
    tau_q_i: float
    n_defects: float
    p_plus: tuple = ()

    @property
    def x(self) -> float:
        return 1.0 / math.sqrt(self.tau_q_i)


@dataclass(frozen=True)
class ModeProblem:
    k: float
    chi: float
    normalized: LZParams
    physical: ChirpProtocol


def mode_rate(k: float, tau_q_i: float) -> float:
    if not 0 < abs(k) < math.pi:
        raise ValueError(f"mode rate diverges or is undefined at k={k!r}")
    s = math.sin(k)
    return 1.0 / (4.0 * tau_q_i * s * s)


def mode_grid(k_c: float, n_k: int) -> np.ndarray:
    """Positive midpoints ``(2m-1) k_c / (2 n_k)``, ``m = 1..n_k``."""
    m = np.arange(1, n_k + 1)
    return (2 * m - 1) * k_c / (2 * n_k)


def mode_to_protocol(k: float, spec: IsingQuenchSpec) -> ModeProblem:
    """Normalised LZ problem for mode ``k`` and its physical realisation.

    Normalised: ``delta = 1``, rate ``chi_k``, symmetric sweep ``-R -> R``.
    Physical: energies times ``delta_ref``, times divided by ``delta_ref``.
    """
    chi = mode_rate(k, spec.tau_q_i)
    r = spec.range_policy.eps_f(k)
    norm = LZParams(1.0, -r, r, 2.0 * r / chi)
    d = spec.delta_ref
    phys = LZParams(d, -r * d, r * d, norm.t_lz / d)
    return ModeProblem(k, chi, norm, ChirpProtocol(phys, Scheme.A, spec.prep))


def finite_size_min_rate(n_spins: int) -> float:
    """Smallest ``1/sqrt(tau_q_i)`` for which the continuum picture holds."""
    if n_spins < 2:
        raise ValueError("need at least two spins")
    return 2.0 * math.pi / n_spins


def _final_p_plus(protocols: Sequence[ChirpProtocol], dec: DecoherenceParams, step_phase: float) -> np.ndarray:
    states = final_states(protocols, dec, step_phase=step_phase)
    eps_f = np.array([p.params.eps_f for p in protocols])
    delta = np.array([p.params.delta for p in protocols])
    return p_plus_array(states, eps_f, delta)


def _run_modes(protocols, dec, workers, step_phase):
    if workers <= 1 or len(protocols) < 2 * workers:
        return _final_p_plus(protocols, dec, step_phase)
    chunks = [list(range(w, len(protocols), workers)) for w in range(workers)]
    out = np.empty(len(protocols))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futs = [pool.submit(_final_p_plus, [protocols[i] for i in c], dec, step_phase) for c in chunks]
        for c, fut in zip(chunks, futs):
            out[c] = fut.result()
    return out


def _aggregate(spec: IsingQuenchSpec, p: np.ndarray) -> ScalingPoint:
    n = spec.k_c / math.pi * math.fsum(p) / len(p)
    return ScalingPoint(spec.tau_q_i, n, tuple(float(q) for q in p))


def defect_density(
    spec: IsingQuenchSpec,
    dec: DecoherenceParams = NO_DECOHERENCE,
    workers: int = 1,
    step_phase: float = STEP_PHASE,
) -> ScalingPoint:
    """Defect density for one quench time: ``(k_c/pi) * mean_k P+(k)``."""
    return scaling_scan([spec.tau_q_i], spec, dec, workers=workers, step_phase=step_phase)[0]


def scaling_scan(
    taus: Sequence[float],
    template: IsingQuenchSpec,
    dec: DecoherenceParams = NO_DECOHERENCE,
    workers: int = 1,
    n_spins: int | None = 1000,
    step_phase: float = STEP_PHASE,
) -> list[ScalingPoint]:
    """One :class:`ScalingPoint` per quench time, in input order.

    All (tau, k) modes go through one batched integration; each mode result is
    independent of batching and worker count, and per-tau sums run in grid
    order, so the output is bit-stable.
    """
    taus = [float(t) for t in taus]
    if not taus:
        raise ValueError("empty quench-time list")
    specs = [template.with_tau(t) for t in taus]
    if n_spins is not None:
        bound = finite_size_min_rate(n_spins)
        for t in taus:
            if 1.0 / math.sqrt(t) <= bound:
                warnings.warn(
                    f"finite-size: 1/sqrt(tau_q_i)={1 / math.sqrt(t):.4g} <= 2pi/N={bound:.4g} (N={n_spins})",
                    FiniteSizeWarning,
                    stacklevel=2,
                )
    ks = mode_grid(template.k_c, template.n_k)
    protocols = [mode_to_protocol(float(k), s).physical for s in specs for k in ks]
    p = _run_modes(protocols, dec, workers, step_phase).reshape(len(specs), len(ks))
    return [_aggregate(s, row) for s, row in zip(specs, p)]
