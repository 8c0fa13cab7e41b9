"""Hamiltonian builders for the driven qutrit, the closed-loop three-level
system it emulates, the chiral-transfer variant, and the coupled qubit pair.

Phase convention: the loop Hamiltonian carries hopping phases such that the
flux picked up around the cycle 1 -> 2 -> 3 -> 1 equals
phi = phi_p + phi_s - phi_q. This is the combination that is invariant under
per-level phase redefinitions and the one the eigenvalue formula
E_k = Omega cos(phi/3 - 2pi(k+1)/3) is written in.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

QUTRIT_BASIS = ("g", "e", "f")
LOOP_BASIS = ("1", "2", "3")
TWO_QUBIT_BASIS = ("gg", "ge", "eg", "ee")

SQRT2 = np.sqrt(2.0)


def wrap_angle(phi: float) -> float:
    """Reduce an angle to (-pi, pi]."""
    w = float(phi) % (2.0 * np.pi)
    if w > np.pi:
        w -= 2.0 * np.pi
    return w


@dataclass(frozen=True)
class DriveParams:
    """The six knobs of the closed-loop drive: three amplitudes (rad/us, >= 0)
    and three phases (rad)."""

    omega_p: float
    omega_q: float
    omega_s: float
    phi_p: float = 0.0
    phi_q: float = 0.0
    phi_s: float = 0.0

    def __post_init__(self):
        for name in ("omega_p", "omega_q", "omega_s"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")

    @property
    def gauge_phi(self) -> float:
        """Loop flux phi_p + phi_s - phi_q, reported in (-pi, pi]."""
        return wrap_angle(self.phi_p + self.phi_s - self.phi_q)

    @classmethod
    def symmetric(cls, omega: float, phi: float = 0.0) -> "DriveParams":
        """Equal amplitudes with the whole loop flux placed on phi_p."""
        return cls(omega, omega, omega, phi_p=phi)


@dataclass(frozen=True)
class PhysicalDrives:
    """Complex amplitudes and detunings of the two physical drive tones.

    The mapping from DriveParams always produces delta_a == delta_b.
    """

    omega_a: complex
    omega_b: complex
    delta_a: float
    delta_b: float


@dataclass(frozen=True)
class TwoQubitParams:
    """Exchange coupling J (rad/us, > 0) and drive phase difference phi for
    the coupled qubit pair; each qubit is driven with amplitude J/sqrt(2)."""

    coupling: float
    phi: float

    def __post_init__(self):
        if self.coupling <= 0:
            raise ValueError(f"coupling must be > 0, got {self.coupling}")

    @property
    def drive_amplitude(self) -> float:
        return self.coupling / SQRT2

    @property
    def t_entangle(self) -> float:
        """Evolution time 2pi/(3 sqrt(3) J) that turns |eg> or |ge> into a
        maximally entangled state at phi = +-pi/2."""
        return 2.0 * np.pi / (3.0 * np.sqrt(3.0) * self.coupling)


def map_drives(p: DriveParams) -> PhysicalDrives:
    """Physical two-tone amplitudes and detunings realizing a target loop drive."""
    oa = (p.omega_p * np.exp(1j * p.phi_p)
          + p.omega_s * np.exp(1j * (p.phi_q - p.phi_s))) / SQRT2
    ob = (-p.omega_p * np.exp(1j * (p.phi_q - p.phi_p))
          + p.omega_s * np.exp(1j * p.phi_s)) / SQRT2
    return PhysicalDrives(omega_a=oa, omega_b=ob, delta_a=-p.omega_q, delta_b=-p.omega_q)


def ladder_hamiltonian(d: PhysicalDrives) -> np.ndarray:
    """Rotating-frame Hamiltonian of the two-tone driven qutrit, basis (g, e, f)."""
    return 0.5 * np.array(
        [
            [-d.delta_a, np.conj(d.omega_a), 0.0],
            [d.omega_a, 0.0, np.conj(d.omega_b)],
            [0.0, d.omega_b, d.delta_b],
        ],
        dtype=complex,
    )


def loop_hamiltonian(p: DriveParams, detuning: tuple[float, float, float] | None = None) -> np.ndarray:
    """Closed-loop three-level Hamiltonian with all three transitions driven.

    Hopping phases follow the flux convention in the module docstring; an
    optional static detuning triple is added to the diagonal as given.
    """
    h = 0.5 * np.array(
        [
            [0.0, p.omega_p * np.exp(-1j * p.phi_p), p.omega_q * np.exp(-1j * p.phi_q)],
            [p.omega_p * np.exp(1j * p.phi_p), 0.0, p.omega_s * np.exp(-1j * p.phi_s)],
            [p.omega_q * np.exp(1j * p.phi_q), p.omega_s * np.exp(1j * p.phi_s), 0.0],
        ],
        dtype=complex,
    )
    if detuning is not None:
        h[np.diag_indices(3)] += np.asarray(detuning, dtype=float)
    return h


PHI0 = 2.0 * np.pi / 3.0


def loop_spectrum(omega: float, phi: float) -> np.ndarray:
    """Eigenvalues E_k = omega cos(phi/3 - 2pi(k+1)/3), k = 1, 2, 3, for the
    equal-amplitude loop with flux phi."""
    k = np.arange(1, 4)
    return omega * np.cos(phi / 3.0 - PHI0 * (k + 1))


def two_qubit_hamiltonian(q: TwoQubitParams) -> np.ndarray:
    """Driven coupled-qubit Hamiltonian in the basis (gg, ge, eg, ee)."""
    e = np.exp(-1j * q.phi)
    return (q.coupling / SQRT2) * np.array(
        [
            [0.0, 1.0, e, 0.0],
            [1.0, 0.0, SQRT2, e],
            [np.conj(e), SQRT2, 0.0, 1.0],
            [0.0, np.conj(e), 1.0, 0.0],
        ],
        dtype=complex,
    )


def triplet_basis(phi: float) -> tuple[np.ndarray, np.ndarray]:
    """Isometry onto the invariant triplet subspace of the driven qubit pair.

    Returns (B, dark) where the columns of B are
    |eg>, |ge>, (|gg> + e^{i phi}|ee>)/sqrt(2) and dark is the decoupled
    state (|gg> - e^{i phi}|ee>)/sqrt(2).
    """
    e = np.exp(1j * phi)
    b = np.zeros((4, 3), dtype=complex)
    b[2, 0] = 1.0                      # |eg>
    b[1, 1] = 1.0                      # |ge>
    b[0, 2] = 1.0 / SQRT2
    b[3, 2] = e / SQRT2
    dark = np.zeros(4, dtype=complex)
    dark[0] = 1.0 / SQRT2
    dark[3] = -e / SQRT2
    return b, dark


def triplet_hamiltonian(q: TwoQubitParams) -> np.ndarray:
    """The 3x3 closed-loop Hamiltonian the qubit pair realizes on its
    invariant triplet subspace (flux = phi, hop amplitude J, so the
    equal-amplitude loop with omega -> 2J)."""
    e = np.exp(1j * q.phi)
    return q.coupling * np.array(
        [
            [0.0, 1.0, e],
            [1.0, 0.0, 1.0],
            [np.conj(e), 1.0, 0.0],
        ],
        dtype=complex,
    )


Handedness = Literal["L", "R"]

_HANDEDNESS_SIGN = {"L": 1.0, "R": -1.0}


def handedness_sign(handedness: Handedness) -> float:
    try:
        return _HANDEDNESS_SIGN[handedness]
    except KeyError:
        raise ValueError(f"handedness must be 'L' or 'R', got {handedness!r}") from None


def chiral_hamiltonian(
    omega_p: float,
    omega_s: float,
    omega_q: float,
    handedness: Handedness = "L",
    phi: float = -np.pi / 2,
) -> np.ndarray:
    """Pump/Stokes ladder plus a loop-closing 1 <-> 3 coupling whose sign
    flips with handedness: H = (1/2)[Omega_p |2><1| + Omega_s |3><2|
    +- Omega_q e^{i phi} |3><1| + h.c.], basis (1, 2, 3)."""
    s = handedness_sign(handedness)
    q = 0.5 * s * omega_q * np.exp(1j * phi)
    return np.array(
        [
            [0.0, 0.5 * omega_p, np.conj(q)],
            [0.5 * omega_p, 0.0, 0.5 * omega_s],
            [q, 0.5 * omega_s, 0.0],
        ],
        dtype=complex,
    )
