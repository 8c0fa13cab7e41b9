"""Hot inner loops for time-dependent propagation.

The piecewise-constant midpoint stepper applied to the pulsed three-level
scan dominates runtime (millions of 3x3 matrix exponentials). Two
implementations are provided:

* a numba @njit kernel using an exact closed-form propagator for traceless
  Hermitian 3x3 generators (Cayley-Hamilton polynomial form), parallel over
  scan cells;
* a pure-numpy fallback that batches LAPACK eigendecompositions across the
  scan cells, one time step at a time.

The numpy path is selected automatically when numba is unavailable, or can
be forced with the environment variable CCISIM_PURE_NUMPY=1.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit, prange

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(func):
            return func

        if len(args) == 1 and callable(args[0]):
            return args[0]
        return wrap

    prange = range

ENV_FLAG = "CCISIM_PURE_NUMPY"


def pure_numpy_forced() -> bool:
    return os.environ.get(ENV_FLAG, "").strip().lower() in ("1", "true", "yes", "on")


def resolve_backend(backend: str | None = None) -> str:
    """Pick 'numba' or 'numpy'. None means: numba if available and not
    disabled via CCISIM_PURE_NUMPY."""
    if backend is None:
        return "numba" if (HAS_NUMBA and not pure_numpy_forced()) else "numpy"
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend


@njit(cache=True)
def _prop_coeffs(h01, h02, h12, dt):
    """Coefficients (a0, a1, a2) of exp(-i H dt) = a0 I + a1 H + a2 H^2 for a
    Hermitian 3x3 H with zero diagonal and upper entries h01, h02, h12.

    Exact up to rounding: eigenvalues come from the trigonometric solution of
    the (traceless) characteristic polynomial; near-degenerate pairs take a
    reformulated branch that avoids cancellation, and tiny steps use a
    Cayley-Hamilton-reduced Taylor series.
    """
    s2 = abs(h01) ** 2 + abs(h02) ** 2 + abs(h12) ** 2
    d = 2.0 * (h01 * h12 * np.conj(h02)).real
    s = np.sqrt(s2)
    if s * dt < 1e-3:
        a0 = 1.0 + 1j * (dt ** 3) * d / 6.0 + 0.0j
        a1 = -1j * dt + 1j * (dt ** 3) * s2 / 6.0 + (dt ** 4) * d / 24.0
        a2 = -(dt * dt) / 2.0 + (dt ** 4) * s2 / 24.0 + 0.0j
        return a0, a1, a2
    arg = 1.5 * np.sqrt(3.0) * d / (s2 * s)
    if arg > 1.0:
        arg = 1.0
    elif arg < -1.0:
        arg = -1.0
    th = np.arccos(arg) / 3.0
    r = 2.0 * s / np.sqrt(3.0)
    w0 = r * np.cos(th)
    w1 = r * np.cos(th - 2.0 * np.pi / 3.0)
    w2 = r * np.cos(th - 4.0 * np.pi / 3.0)  # w0 >= w1 >= w2
    g01 = w0 - w1
    g12 = w1 - w2
    if g01 > 0.1 * s and g12 > 0.1 * s:
        # well-separated spectrum: Lagrange interpolation of exp(-i w dt)
        a0 = 0.0 + 0.0j
        a1 = 0.0 + 0.0j
        a2 = 0.0 + 0.0j
        f0 = np.exp(-1j * w0 * dt) / ((w0 - w1) * (w0 - w2))
        f1 = np.exp(-1j * w1 * dt) / ((w1 - w0) * (w1 - w2))
        f2 = np.exp(-1j * w2 * dt) / ((w2 - w0) * (w2 - w1))
        a2 = f0 + f1 + f2
        a1 = -(f0 * (w1 + w2) + f1 * (w0 + w2) + f2 * (w0 + w1))
        a0 = f0 * w1 * w2 + f1 * w0 * w2 + f2 * w0 * w1
        return a0, a1, a2
    # one close pair + one isolated eigenvalue (all three close would force
    # s ~ 0, handled by the Taylor branch above)
    if g01 < g12:
        la = w0
        lb = w1
        mu = w2
    else:
        la = w1
        lb = w2
        mu = w0
    lbar = 0.5 * (la + lb)
    delta = 0.5 * (lb - la)
    dd = (mu - la) * (mu - lb)
    pc2 = 1.0 / dd
    pc1 = -2.0 * lbar / dd
    pc0 = la * lb / dd
    qc2 = -pc2
    qc1 = -pc1
    qc0 = 1.0 - pc0
    mc2 = qc1 - lbar * qc2
    mc1 = qc2 * s2 + qc0 - lbar * qc1
    mc0 = qc2 * d - lbar * qc0
    xd = delta * dt
    cd = np.cos(xd)
    if abs(xd) < 1e-8:
        sc = dt * (1.0 - xd * xd / 6.0)
    else:
        sc = np.sin(xd) / delta
    fmu = np.exp(-1j * mu * dt)
    fb = np.exp(-1j * lbar * dt)
    a2 = fmu * pc2 + fb * (cd * qc2 - 1j * sc * mc2)
    a1 = fmu * pc1 + fb * (cd * qc1 - 1j * sc * mc1)
    a0 = fmu * pc0 + fb * (cd * qc0 - 1j * sc * mc0)
    return a0, a1, a2


@njit(cache=True)
def expm_traceless3(h01, h02, h12, dt):
    """exp(-i H dt) as a dense 3x3 array, for testing the coefficient path."""
    a0, a1, a2 = _prop_coeffs(h01, h02, h12, dt)
    h = np.zeros((3, 3), np.complex128)
    h[0, 1] = h01
    h[1, 0] = np.conj(h01)
    h[0, 2] = h02
    h[2, 0] = np.conj(h02)
    h[1, 2] = h12
    h[2, 1] = np.conj(h12)
    return a0 * np.eye(3, dtype=np.complex128) + a1 * h + a2 * (h @ h)


@njit(cache=True, parallel=True)
def _pulsed_scan_numba(omega0, sign, phi, tau, t0, dt, nsteps, record_every, out):
    """Midpoint-rule propagation of the pulsed loop for a batch of scan cells.

    out has shape (B, nrec, 3) with nrec = nsteps // record_every + 1; row 0
    holds the initial populations (state |1>).
    """
    nb = omega0.shape[0]
    cphi = np.cos(phi)
    sphi = np.sin(phi)
    for b in prange(nb):
        p0 = 1.0 + 0.0j
        p1 = 0.0 + 0.0j
        p2 = 0.0 + 0.0j
        out[b, 0, 0] = 1.0
        out[b, 0, 1] = 0.0
        out[b, 0, 2] = 0.0
        rec = 1
        for k in range(nsteps):
            tm = t0 + (k + 0.5) * dt
            gp = np.exp(-((tm - 0.5 * tau) ** 2) / (tau * tau))
            gs = np.exp(-((tm + 0.5 * tau) ** 2) / (tau * tau))
            thdot = 1.0 / (tau * np.cosh(2.0 * tm / tau))
            h01 = 0.5 * omega0[b] * gp
            h12 = 0.5 * omega0[b] * gs
            # upper (1,3) entry is the conjugate of the handed loop coupling
            h02 = sign[b] * thdot * (cphi - 1j * sphi)
            a0, a1, a2 = _prop_coeffs(h01 + 0.0j, h02, h12 + 0.0j, dt)
            # v = H psi, w = H v, psi' = a0 psi + a1 v + a2 w
            v0 = h01 * p1 + h02 * p2
            v1 = np.conj(h01) * p0 + h12 * p2
            v2 = np.conj(h02) * p0 + np.conj(h12) * p1
            w0 = h01 * v1 + h02 * v2
            w1 = np.conj(h01) * v0 + h12 * v2
            w2 = np.conj(h02) * v0 + np.conj(h12) * v1
            p0 = a0 * p0 + a1 * v0 + a2 * w0
            p1 = a0 * p1 + a1 * v1 + a2 * w1
            p2 = a0 * p2 + a1 * v2 + a2 * w2
            if (k + 1) % record_every == 0:
                out[b, rec, 0] = p0.real ** 2 + p0.imag ** 2
                out[b, rec, 1] = p1.real ** 2 + p1.imag ** 2
                out[b, rec, 2] = p2.real ** 2 + p2.imag ** 2
                rec += 1


def _pulsed_scan_numpy(omega0, sign, phi, tau, t0, dt, nsteps, record_every, out):
    """Pure-numpy version of _pulsed_scan_numba: batched eigendecompositions
    across scan cells, stepping through time sequentially."""
    nb = omega0.shape[0]
    psi = np.zeros((nb, 3), dtype=complex)
    psi[:, 0] = 1.0
    out[:, 0, :] = np.abs(psi) ** 2
    eiphi = np.exp(1j * phi)
    h = np.zeros((nb, 3, 3), dtype=complex)
    rec = 1
    for k in range(nsteps):
        tm = t0 + (k + 0.5) * dt
        gp = np.exp(-((tm - 0.5 * tau) ** 2) / (tau * tau))
        gs = np.exp(-((tm + 0.5 * tau) ** 2) / (tau * tau))
        thdot = 1.0 / (tau * np.cosh(2.0 * tm / tau))
        hp = 0.5 * omega0 * gp
        hs = 0.5 * omega0 * gs
        q = sign * thdot * eiphi
        h[:, 0, 1] = hp
        h[:, 1, 0] = hp
        h[:, 1, 2] = hs
        h[:, 2, 1] = hs
        h[:, 2, 0] = q
        h[:, 0, 2] = np.conj(q)
        w, v = np.linalg.eigh(h)
        amp = np.matmul(np.conj(v).swapaxes(1, 2), psi[:, :, None])[:, :, 0]
        amp *= np.exp(-1j * w * dt)
        psi = np.matmul(v, amp[:, :, None])[:, :, 0]
        if (k + 1) % record_every == 0:
            out[:, rec, :] = np.abs(psi) ** 2
            rec += 1


def pulsed_scan(
    omega0: np.ndarray,
    sign: np.ndarray,
    phi: float,
    tau: float,
    t0: float,
    t1: float,
    nsteps: int,
    record_every: int = 1,
    backend: str | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Propagate |1> through the pulsed loop for each scan cell.

    Parameters
    ----------
    omega0, sign : arrays of shape (B,)
        Peak pump/Stokes amplitude and loop-coupling sign (+1 left, -1 right)
        per cell.
    phi : float
        Loop phase of the 1 <-> 3 coupling.
    tau, t0, t1 : float
        Pulse width and integration window.
    nsteps : int
        Number of midpoint steps; must be divisible by record_every.
    record_every : int
        Population recording stride.
    backend : 'numba' | 'numpy' | None
        None picks numba when available (see resolve_backend).

    Returns
    -------
    times : (nrec,) array of recorded times (first entry t0).
    populations : (B, nrec, 3) array.
    """
    omega0 = np.ascontiguousarray(omega0, dtype=float)
    sign = np.ascontiguousarray(sign, dtype=float)
    if omega0.shape != sign.shape:
        raise ValueError("omega0 and sign must have the same shape")
    if nsteps % record_every != 0:
        raise ValueError(f"nsteps={nsteps} not divisible by record_every={record_every}")
    dt = (t1 - t0) / nsteps
    nrec = nsteps // record_every + 1
    out = np.zeros((omega0.shape[0], nrec, 3), dtype=float)
    impl = resolve_backend(backend)
    if impl == "numba":
        _pulsed_scan_numba(omega0, sign, phi, tau, t0, dt, nsteps, record_every, out)
    else:
        _pulsed_scan_numpy(omega0, sign, phi, tau, t0, dt, nsteps, record_every, out)
    times = t0 + np.arange(nrec) * (dt * record_every)
    return times, out
