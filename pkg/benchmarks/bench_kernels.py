"""Time the numba and numpy kernel paths on the same inputs and check they agree.

    python3 benchmarks/bench_kernels.py [--problems 64] [--steps 20000] [--spins 10]
"""

import argparse
import math
import time

import numpy as np

from lzkzm import kernels
from lzkzm._accel import HAVE_NUMBA
from lzkzm.ed import SpinChainSpec, _ed_step, _zz_diag, ising_ground_state


def _best(fn, repeat):
    fn()  # warm-up, includes jit compilation
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_lindblad(m, steps, repeat):
    rng = np.random.default_rng(0)
    d = 2 * math.pi * 0.02
    delta = np.full(m, d)
    eps_i = -10 * d * rng.uniform(0.5, 1.5, m)
    v = -2 * eps_i / (steps * 0.01)
    h = np.full(m, 0.01)
    i0 = np.zeros(m, dtype=np.int64)
    n = np.full(m, steps, dtype=np.int64)
    state = np.tile([0.0, 1.0, 0.0, 0.0], (m, 1))
    g1 = np.full(m, 1 / 2386.0)
    gam = np.full(m, 1 / 2135.0)
    args = (delta, eps_i, v, h, i0, n, state, g1, gam)

    def nb():
        order = np.arange(m)
        out = np.empty_like(state)
        for s in range(0, m, kernels.LANES):
            idx = order[s:s + kernels.LANES]
            out[idx] = kernels._lindblad_lanes_nb(*(a[idx] for a in args))
        return out

    t_np, r_np = _best(lambda: kernels._lindblad_lanes_np(*args), repeat)
    print(f"lindblad  {m} problems x {steps} steps")
    print(f"  numpy  {t_np:8.3f} s  {1e9 * t_np / (m * steps):7.1f} ns/step")
    if HAVE_NUMBA:
        t_nb, r_nb = _best(nb, repeat)
        print(f"  numba  {t_nb:8.3f} s  {1e9 * t_nb / (m * steps):7.1f} ns/step  "
              f"speed-up {t_np / t_nb:5.1f}x  max|diff| {np.max(np.abs(r_nb - r_np)):.1e}")


def bench_ising(n_spins, steps, repeat):
    spec = SpinChainSpec(n_spins, 4.0)
    psi = ising_ground_state(spec).amplitudes
    zz = _zz_diag(n_spins)
    cosk = np.cos(spec.momenta())
    _, h = _ed_step(spec)  # stable step; only the first `steps` are run
    args = (psi, zz, n_spins, cosk, spec.tau_q, -spec.g_start * spec.tau_q, h, 0, steps)
    t_np, r_np = _best(lambda: kernels._ising_rk4_np(*args), repeat)
    print(f"ising     N={n_spins} (dim {1 << n_spins}) x {steps} steps")
    print(f"  numpy  {t_np:8.3f} s")
    if HAVE_NUMBA:
        t_nb, r_nb = _best(lambda: kernels._ising_rk4_nb(*args), repeat)
        print(f"  numba  {t_nb:8.3f} s  speed-up {t_np / t_nb:5.1f}x  max|diff| {np.max(np.abs(r_nb - r_np)):.1e}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--problems", type=int, default=64)
    ap.add_argument("--steps", type=int, default=20000)
    ap.add_argument("--spins", type=int, default=10)
    ap.add_argument("--ising-steps", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    a = ap.parse_args()
    if not HAVE_NUMBA:
        print("numba not importable; timing the numpy path only")
    bench_lindblad(a.problems, a.steps, a.repeat)
    bench_ising(a.spins, a.ising_steps, a.repeat)


if __name__ == "__main__":
    main()
