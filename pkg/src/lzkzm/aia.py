"""Adiabatic-impulse approximation: freeze-out time, regions, closed forms.

Both closed forms freeze the state inside the impulse window and project it
onto the instantaneous eigenbasis at the window edge. With
``x = v t_hat / delta = sqrt(tau_0 / (alpha tau_q))``:

* scheme A: frozen |E-(-t_hat)> read at +t_hat, ``P+ = x^2 / (1 + x^2)``
* scheme B: frozen |E-(eps=0)> read at t_hat,   ``P+ = (1 - 1/sqrt(1 + x^2)) / 2``
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .lz import Scheme

ALPHA_A = math.pi / 2
ALPHA_B = math.pi / 4
DEFAULT_ALPHA = {Scheme.A: ALPHA_A, Scheme.B: ALPHA_B}

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class Region(str, enum.Enum):
    ADIABATIC = "adiabatic"
    IMPULSE = "impulse"


class FitError(RuntimeError):
    pass


class DegenerateFitError(FitError):
    pass


@dataclass(frozen=True)
class AIAConfig:
    alpha: float
    tau_q: float
    tau_0: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.tau_q > 0 and self.tau_0 > 0):
            raise ValueError("alpha, tau_q and tau_0 must all be positive")

    @classmethod
    def from_lz(cls, delta: float, v: float, alpha: float) -> "AIAConfig":
        return cls(alpha, delta / v, 1.0 / delta)

    @property
    def t_hat(self) -> float:
        return math.sqrt(self.tau_q * self.tau_0 / self.alpha)


def freeze_out_time(delta: float, v: float, alpha: float) -> float:
    """``sqrt(tau_q tau_0 / alpha)``, which reduces to ``1/sqrt(alpha v)``."""
    if not (v > 0 and alpha > 0):
        raise ValueError("v and alpha must be positive")
    return 1.0 / math.sqrt(alpha * v)


def classify(t: float, t_hat: float, scheme: Scheme | str) -> Region:
    """Region of time ``t`` measured from the crossing."""
    scheme = Scheme(scheme)
    if not t_hat > 0:
        raise ValueError("t_hat must be positive")
    if scheme is Scheme.B:
        if t < 0:
            raise ValueError("scheme B has no t < 0")
        return Region.IMPULSE if t <= t_hat else Region.ADIABATIC
    return Region.IMPULSE if abs(t) <= t_hat else Region.ADIABATIC


def _x2(delta: float, v: float, alpha: float) -> float:
    # x^2 = (v t_hat / delta)^2 = v / (alpha delta^2)
    return v / (alpha * delta * delta)


def aia_p_plus_scheme_a(delta: float, v: float, alpha: float = ALPHA_A) -> float:
    if not (v > 0 and alpha > 0):
        raise ValueError("v and alpha must be positive")
    x2 = _x2(delta, v, alpha)
    if math.isinf(x2):
        return 1.0
    return x2 / (1.0 + x2)


def aia_p_plus_scheme_b(delta: float, v: float, alpha: float = ALPHA_B) -> float:
    if not (v > 0 and alpha > 0):
        raise ValueError("v and alpha must be positive")
    x2 = _x2(delta, v, alpha)
    # 1 - 1/sqrt(1+x2) written to keep precision for small x2
    return 0.5 * x2 / (math.sqrt(1.0 + x2) * (1.0 + math.sqrt(1.0 + x2)))


def aia_p_plus(scheme: Scheme | str, ratio: float, alpha: float) -> float:
    """AIA prediction as a function of ``tau_q / tau_0`` (``delta = 1`` units)."""
    v = 1.0 / ratio
    f = aia_p_plus_scheme_a if Scheme(scheme) is Scheme.A else aia_p_plus_scheme_b
    return f(1.0, v, alpha)


@dataclass(frozen=True)
class AlphaFit:
    alpha: float
    sse: float
    iterations: int
    n_samples: int


def fit_alpha(
    samples: Iterable[tuple[float, float]],
    scheme: Scheme | str = Scheme.B,
    bounds: tuple[float, float] = (0.1, 10.0),
    tol: float = 1e-10,
    max_iter: int = 200,
) -> AlphaFit:
    """Unweighted least-squares fit of ``alpha`` by golden-section search.

    ``samples`` are ``(tau_q / tau_0, P+)`` pairs.
    """
    data = np.asarray(list(samples), dtype=float)
    if data.ndim != 2 or data.shape[0] < 3:
        raise FitError("need at least 3 samples")
    ratio, p = data[:, 0], data[:, 1]
    if np.any(ratio <= 0):
        raise FitError("tau_q/tau_0 must be positive")
    if np.any((p <= 0) | (p >= 0.5)):
        raise FitError("measured P+ must lie in (0, 1/2)")
    if np.ptp(p) == 0 or np.ptp(ratio) == 0:
        raise DegenerateFitError("samples carry no variation; objective is flat in the data direction")

    scheme = Scheme(scheme)

    def sse(alpha):
        model = np.array([aia_p_plus(scheme, r, alpha) for r in ratio])
        return float(np.sum((model - p) ** 2))

    a, b = bounds
    probe = [sse(al) for al in np.geomspace(a, b, 9)]
    if max(probe) - min(probe) <= 1e-15 * max(1.0, max(probe)):
        raise DegenerateFitError("objective is flat over the alpha bracket")

    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = sse(c), sse(d)
    for it in range(1, max_iter + 1):
        if b - a <= tol * max(1.0, abs(c)):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = sse(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = sse(d)
    else:
        raise FitError(f"golden-section search did not converge in {max_iter} iterations "
                       f"(bracket [{a:.6g}, {b:.6g}])")
    alpha = 0.5 * (a + b)
    return AlphaFit(alpha, sse(alpha), it, len(p))
