"""Hot loops: fixed-step RK4 for the chirped two-level master equation and
for the state vector of a small transverse-field Ising ring.

Every kernel has a numba version and a numpy version with the same operation
order; :func:`lzkzm._accel.use_numba` picks one at call time.

Two-level state layout is ``(rho00, rho11, re01, im01)``. Time at step ``i``
of a lane is ``(i0 + i) * h`` so that a run split into segments reproduces an
unsplit run bit for bit.
"""

import numpy as np

from ._accel import njit, use_numba

LANES = 8


@njit(cache=True)
def _lindblad_lanes_nb(delta, eps_i, v, h, i0, nsteps, state, g1, gam):
    L = state.shape[0]
    p0 = state[:, 0].copy()
    p1 = state[:, 1].copy()
    x = state[:, 2].copy()
    y = state[:, 3].copy()
    nmax = 0
    for j in range(L):
        if nsteps[j] > nmax:
            nmax = nsteps[j]
    for n in range(nmax):
        for j in range(L):
            hj = h[j] if n < nsteps[j] else 0.0
            t = (i0[j] + n) * h[j]
            e0 = eps_i[j] + v[j] * t
            e1 = eps_i[j] + v[j] * (t + 0.5 * hj)
            e2 = eps_i[j] + v[j] * (t + hj)
            d = delta[j]
            hd = 0.5 * d
            G = g1[j]
            c = gam[j]
            P0 = p0[j]
            P1 = p1[j]
            X = x[j]
            Y = y[j]

            a0 = d * Y + G * P1
            a2 = -e0 * Y - c * X
            a3 = hd * (P1 - P0) + e0 * X - c * Y
            q0 = P0 + 0.5 * hj * a0
            q1 = P1 - 0.5 * hj * a0
            qx = X + 0.5 * hj * a2
            qy = Y + 0.5 * hj * a3

            b0 = d * qy + G * q1
            b2 = -e1 * qy - c * qx
            b3 = hd * (q1 - q0) + e1 * qx - c * qy
            q0 = P0 + 0.5 * hj * b0
            q1 = P1 - 0.5 * hj * b0
            qx = X + 0.5 * hj * b2
            qy = Y + 0.5 * hj * b3

            c0 = d * qy + G * q1
            c2 = -e1 * qy - c * qx
            c3 = hd * (q1 - q0) + e1 * qx - c * qy
            q0 = P0 + hj * c0
            q1 = P1 - hj * c0
            qx = X + hj * c2
            qy = Y + hj * c3

            d0 = d * qy + G * q1
            d2 = -e2 * qy - c * qx
            d3 = hd * (q1 - q0) + e2 * qx - c * qy

            s0 = hj / 6.0 * (a0 + 2.0 * b0 + 2.0 * c0 + d0)
            p0[j] = P0 + s0
            p1[j] = P1 - s0
            x[j] = X + hj / 6.0 * (a2 + 2.0 * b2 + 2.0 * c2 + d2)
            y[j] = Y + hj / 6.0 * (a3 + 2.0 * b3 + 2.0 * c3 + d3)
    out = np.empty((L, 4))
    out[:, 0] = p0
    out[:, 1] = p1
    out[:, 2] = x
    out[:, 3] = y
    return out


def _lindblad_lanes_np(delta, eps_i, v, h, i0, nsteps, state, g1, gam):
    p0, p1, x, y = (state[:, m].copy() for m in range(4))
    d = delta
    hd = 0.5 * d
    G, c = g1, gam
    nmax = int(nsteps.max()) if len(nsteps) else 0
    for n in range(nmax):
        hj = np.where(n < nsteps, h, 0.0)
        t = (i0 + n) * h
        e0 = eps_i + v * t
        e1 = eps_i + v * (t + 0.5 * hj)
        e2 = eps_i + v * (t + hj)
        P0, P1, X, Y = p0, p1, x, y

        a0 = d * Y + G * P1
        a2 = -e0 * Y - c * X
        a3 = hd * (P1 - P0) + e0 * X - c * Y
        q0 = P0 + 0.5 * hj * a0
        q1 = P1 - 0.5 * hj * a0
        qx = X + 0.5 * hj * a2
        qy = Y + 0.5 * hj * a3

        b0 = d * qy + G * q1
        b2 = -e1 * qy - c * qx
        b3 = hd * (q1 - q0) + e1 * qx - c * qy
        q0 = P0 + 0.5 * hj * b0
        q1 = P1 - 0.5 * hj * b0
        qx = X + 0.5 * hj * b2
        qy = Y + 0.5 * hj * b3

        c0 = d * qy + G * q1
        c2 = -e1 * qy - c * qx
        c3 = hd * (q1 - q0) + e1 * qx - c * qy
        q0 = P0 + hj * c0
        q1 = P1 - hj * c0
        qx = X + hj * c2
        qy = Y + hj * c3

        d0 = d * qy + G * q1
        d2 = -e2 * qy - c * qx
        d3 = hd * (q1 - q0) + e2 * qx - c * qy

        s0 = hj / 6.0 * (a0 + 2.0 * b0 + 2.0 * c0 + d0)
        p0 = P0 + s0
        p1 = P1 - s0
        x = X + hj / 6.0 * (a2 + 2.0 * b2 + 2.0 * c2 + d2)
        y = Y + hj / 6.0 * (a3 + 2.0 * b3 + 2.0 * c3 + d3)
    return np.stack([p0, p1, x, y], axis=1)


def lindblad_batch(delta, eps_i, v, h, i0, nsteps, state, g1, gam, lanes=LANES):
    """Advance a batch of independent two-level problems.

    All arguments except ``state`` (shape ``(M, 4)``) and ``lanes`` are
    length-``M`` arrays. Lanes are filled with problems of similar step count;
    the result for a given problem does not depend on which lane or batch it
    lands in.
    """
    delta = np.ascontiguousarray(delta, dtype=np.float64)
    M = delta.shape[0]
    as_f = lambda a: np.ascontiguousarray(np.broadcast_to(a, (M,)), dtype=np.float64)
    as_i = lambda a: np.ascontiguousarray(np.broadcast_to(a, (M,)), dtype=np.int64)
    eps_i, v, h, g1, gam = map(as_f, (eps_i, v, h, g1, gam))
    i0, nsteps = as_i(i0), as_i(nsteps)
    state = np.ascontiguousarray(state, dtype=np.float64).reshape(M, 4)
    out = np.empty_like(state)
    if M == 0:
        return out

    if not use_numba():
        return _lindblad_lanes_np(delta, eps_i, v, h, i0, nsteps, state, g1, gam)

    order = np.argsort(nsteps, kind="stable")
    for start in range(0, M, lanes):
        idx = order[start:start + lanes]
        out[idx] = _lindblad_lanes_nb(
            delta[idx], eps_i[idx], v[idx], h[idx], i0[idx], nsteps[idx],
            state[idx], g1[idx], gam[idx],
        )
    return out


# --- Ising ring --------------------------------------------------------------


@njit(cache=True)
def _ising_apply_nb(psi, zz, nbits, g, shift, out):
    dim = psi.shape[0]
    for i in range(dim):
        acc = 0.0 + 0.0j
        for b in range(nbits):
            acc += psi[i ^ (1 << b)]
        # -i (H - shift) psi with H = -g X - zz
        out[i] = -1j * (-g * acc - (zz[i] + shift) * psi[i])


@njit(cache=True)
def _ground_energy_nb(g, cosk):
    s = 0.0
    for m in range(cosk.shape[0]):
        s += np.sqrt(g * g - 2.0 * g * cosk[m] + 1.0)
    return -2.0 * s


@njit(cache=True)
def _ising_rk4_nb(psi, zz, nbits, cosk, tau_q, t_start, h, i0, nsteps):
    dim = psi.shape[0]
    k1 = np.empty(dim, dtype=np.complex128)
    k2 = np.empty(dim, dtype=np.complex128)
    k3 = np.empty(dim, dtype=np.complex128)
    k4 = np.empty(dim, dtype=np.complex128)
    tmp = np.empty(dim, dtype=np.complex128)
    psi = psi.copy()
    for n in range(nsteps):
        t = t_start + (i0 + n) * h
        g0 = -t / tau_q
        gm = -(t + 0.5 * h) / tau_q
        g1 = -(t + h) / tau_q
        _ising_apply_nb(psi, zz, nbits, g0, _ground_energy_nb(g0, cosk), k1)
        for i in range(dim):
            tmp[i] = psi[i] + 0.5 * h * k1[i]
        em = _ground_energy_nb(gm, cosk)
        _ising_apply_nb(tmp, zz, nbits, gm, em, k2)
        for i in range(dim):
            tmp[i] = psi[i] + 0.5 * h * k2[i]
        _ising_apply_nb(tmp, zz, nbits, gm, em, k3)
        for i in range(dim):
            tmp[i] = psi[i] + h * k3[i]
        _ising_apply_nb(tmp, zz, nbits, g1, _ground_energy_nb(g1, cosk), k4)
        for i in range(dim):
            psi[i] = psi[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    return psi


def _ground_energy_np(g, cosk):
    return -2.0 * np.sum(np.sqrt(g * g - 2.0 * g * cosk + 1.0))


def _ising_apply_np(psi, zz, nbits, g, shift):
    t = psi.reshape((2,) * nbits)
    acc = sum(np.flip(t, axis=a) for a in range(nbits)).reshape(-1)
    return -1j * (-g * acc - (zz + shift) * psi)


def _ising_rk4_np(psi, zz, nbits, cosk, tau_q, t_start, h, i0, nsteps):
    psi = psi.copy()
    for n in range(nsteps):
        t = t_start + (i0 + n) * h
        g0, gm, g1 = -t / tau_q, -(t + 0.5 * h) / tau_q, -(t + h) / tau_q
        em = _ground_energy_np(gm, cosk)
        k1 = _ising_apply_np(psi, zz, nbits, g0, _ground_energy_np(g0, cosk))
        k2 = _ising_apply_np(psi + 0.5 * h * k1, zz, nbits, gm, em)
        k3 = _ising_apply_np(psi + 0.5 * h * k2, zz, nbits, gm, em)
        k4 = _ising_apply_np(psi + h * k3, zz, nbits, g1, _ground_energy_np(g1, cosk))
        psi = psi + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return psi


def ising_rk4(psi, zz, nbits, cosk, tau_q, t_start, h, i0, nsteps):
    """RK4 for ``i dpsi/dt = (H(g(t)) - E0(g(t))) psi`` with ``g = -t/tau_q``.

    ``E0`` is the exact even-sector ground energy built from ``cosk`` (cosines
    of the positive ring momenta); subtracting it only changes a global phase
    but keeps the dominant amplitude slow, which is what keeps RK4's
    amplitude damping out of the norm.
    """
    psi = np.ascontiguousarray(psi, dtype=np.complex128)
    zz = np.ascontiguousarray(zz, dtype=np.float64)
    cosk = np.ascontiguousarray(cosk, dtype=np.float64)
    args = (psi, zz, int(nbits), cosk, float(tau_q), float(t_start), float(h), int(i0), int(nsteps))
    if use_numba():
        return _ising_rk4_nb(*args)
    return _ising_rk4_np(*args)
