"""Gaussian pump/Stokes envelopes, the loop-closing counterdiabatic drive,
and time-ordered propagation for the pulsed (handedness-separation)
experiment.

The pulse width tau is the natural time unit here; amplitudes are expressed
through the dimensionless area parameter A with peak amplitude
Omega_0 = A sqrt(pi) / tau, so that the pump/Stokes pulse area is A*pi.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .linalg import expm_i
from .model import Handedness, chiral_hamiltonian, handedness_sign


class ConvergenceError(RuntimeError):
    """Step-halving failed to converge; carries the achieved residual."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class PulseSchedule:
    """Gaussian pump/Stokes pair plus the signed loop-closing drive.

    The window must cover at least +-4 tau around the pulse centers (at
    -+tau/2) so the truncated tails contribute < 1e-6 of the total area.
    """

    omega0: float
    tau: float
    handedness: Handedness = "L"
    phi: float = -np.pi / 2
    t_start: float | None = None
    t_end: float | None = None
    dt: float | None = None

    def __post_init__(self):
        if self.omega0 <= 0 or self.tau <= 0:
            raise ValueError("omega0 and tau must be > 0")
        handedness_sign(self.handedness)  # validates the tag
        if self.t_start is None:
            object.__setattr__(self, "t_start", -5.0 * self.tau)
        if self.t_end is None:
            object.__setattr__(self, "t_end", 5.0 * self.tau)
        if self.dt is None:
            object.__setattr__(self, "dt", self.tau / 2000.0)
        if self.t_start > -self.tau / 2 - 3.5 * self.tau or self.t_end < self.tau / 2 + 3.5 * self.tau:
            raise ValueError(
                f"window [{self.t_start}, {self.t_end}] does not cover +-4 tau "
                "around the pulse centers"
            )

    @property
    def area(self) -> float:
        """Dimensionless pulse-area parameter A = Omega_0 tau / sqrt(pi)."""
        return self.omega0 * self.tau / np.sqrt(np.pi)

    @classmethod
    def from_area(cls, area: float, tau: float = 1.0, **kwargs) -> "PulseSchedule":
        if area <= 0:
            raise ValueError(f"area must be > 0, got {area}")
        return cls(omega0=area * np.sqrt(np.pi) / tau, tau=tau, **kwargs)

    def with_area(self, area: float) -> "PulseSchedule":
        return replace(self, omega0=area * np.sqrt(np.pi) / self.tau)


def gaussian_pair(s: PulseSchedule, t):
    """Pump and Stokes amplitudes at time t (Stokes leads, pump trails)."""
    t = np.asarray(t, dtype=float)
    op = s.omega0 * np.exp(-((t - s.tau / 2.0) ** 2) / s.tau ** 2)
    os_ = s.omega0 * np.exp(-((t + s.tau / 2.0) ** 2) / s.tau ** 2)
    return op, os_


def mixing_angle(s: PulseSchedule, t):
    """Mixing angle theta = arctan(pump/Stokes) and its time derivative.

    For the Gaussian pair the ratio is exp(2t/tau), giving
    theta = arctan(e^{2t/tau}) and theta_dot = sech(2t/tau)/tau.
    """
    t = np.asarray(t, dtype=float)
    x = 2.0 * t / s.tau
    theta = np.arctan(np.exp(x))
    theta_dot = 1.0 / (s.tau * np.cosh(x))
    return theta, theta_dot


def counterdiabatic(s: PulseSchedule, t):
    """Signed loop-closing amplitude +-2 theta_dot(t) (+ for L, - for R)."""
    _, theta_dot = mixing_angle(s, t)
    return handedness_sign(s.handedness) * 2.0 * theta_dot


def dark_state(s: PulseSchedule, t: float) -> np.ndarray:
    """Instantaneous transfer state cos(theta)|1> - sin(theta)|3>."""
    theta, _ = mixing_angle(s, t)
    return np.array([np.cos(theta), 0.0, -np.sin(theta)], dtype=complex)


def hamiltonian_at(s: PulseSchedule, t: float) -> np.ndarray:
    """The pulsed loop Hamiltonian at time t (3x3 Hermitian)."""
    op, os_ = gaussian_pair(s, t)
    _, theta_dot = mixing_angle(s, t)
    return chiral_hamiltonian(float(op), float(os_), 2.0 * float(theta_dot),
                              handedness=s.handedness, phi=s.phi)


def _propagate_fixed(h_of_t, psi0, t0, t1, nsteps, record_every):
    dt = (t1 - t0) / nsteps
    nrec = nsteps // record_every + 1
    states = np.zeros((nrec, psi0.size), dtype=complex)
    times = np.zeros(nrec)
    psi = np.asarray(psi0, dtype=complex).copy()
    states[0] = psi
    times[0] = t0
    rec = 1
    for k in range(nsteps):
        tm = t0 + (k + 0.5) * dt
        psi = expm_i(h_of_t(tm), dt) @ psi
        if (k + 1) % record_every == 0:
            states[rec] = psi
            times[rec] = t0 + (k + 1) * dt
            rec += 1
    return times, states


def propagate_td(
    h_of_t,
    psi0: np.ndarray,
    t0: float,
    t1: float,
    dt: float,
    rtol: float = 1e-6,
    check: bool = True,
    max_halvings: int = 6,
    record_every: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Piecewise-constant midpoint propagation of a time-dependent Hamiltonian.

    Each step applies exp(-i H(t + dt/2) dt), which is exactly unitary. With
    check=True the step is halved until the final populations move by less
    than rtol; a ConvergenceError carrying the achieved residual is raised if
    max_halvings doublings are not enough.

    Returns (times, states) sampled every record_every steps of the accepted
    grid (the initial state included).
    """
    if t1 <= t0:
        raise ValueError("t1 must be > t0")
    psi0 = np.asarray(psi0, dtype=complex)
    nsteps = max(1, round((t1 - t0) / dt))
    nsteps = ((nsteps + record_every - 1) // record_every) * record_every
    times, states = _propagate_fixed(h_of_t, psi0, t0, t1, nsteps, record_every)
    if not check:
        return times, states
    residual = np.inf
    for _ in range(max_halvings):
        times2, states2 = _propagate_fixed(h_of_t, psi0, t0, t1, 2 * nsteps, 2 * record_every)
        residual = float(np.max(np.abs(np.abs(states2[-1]) ** 2 - np.abs(states[-1]) ** 2)))
        if residual < rtol:
            return times2, states2
        nsteps *= 2
        times, states = times2, states2
    raise ConvergenceError(
        f"final populations still moving by {residual:.3e} (> {rtol:.1e}) "
        f"after {max_halvings} step halvings",
        residual,
    )


def transfer_scan(
    s: PulseSchedule,
    areas: np.ndarray,
    record_every: int | None = 50,
    backend: str | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Populations vs time for a grid of pulse areas at the schedule's
    handedness, starting from |1>. Returns (times, populations(B, nrec, 3));
    record_every=None records only the initial and final states."""
    areas = np.asarray(areas, dtype=float)
    if np.any(areas <= 0):
        raise ValueError("all areas must be > 0")
    omega0 = areas * np.sqrt(np.pi) / s.tau
    sign = np.full(areas.shape, handedness_sign(s.handedness))
    nsteps = max(1, round((s.t_end - s.t_start) / s.dt))
    if record_every is None:
        record_every = nsteps
    else:
        nsteps = ((nsteps + record_every - 1) // record_every) * record_every
    return _kernels.pulsed_scan(
        omega0, sign, s.phi, s.tau, s.t_start, s.t_end, nsteps,
        record_every=record_every, backend=backend,
    )
