"""Numerical-hygiene suites runnable from the command line: Hermiticity and
unitarity of every constructed operator, spectral identities, norm
conservation along trajectories, integrator step-halving, and agreement
between the accelerated and pure-numpy propagation paths."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import _kernels, gates, linalg, pulses
from .model import (
    DriveParams,
    TwoQubitParams,
    ladder_hamiltonian,
    loop_hamiltonian,
    loop_spectrum,
    map_drives,
    triplet_basis,
    triplet_hamiltonian,
    two_qubit_hamiltonian,
)


@dataclass
class SuiteResult:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.residual < self.tolerance


def _random_params(rng: np.random.Generator) -> DriveParams:
    amps = rng.uniform(0.0, 2.0 * np.pi * 20.0, 3)
    phases = rng.uniform(-np.pi, np.pi, 3)
    return DriveParams(amps[0], amps[1], amps[2], phases[0], phases[1], phases[2])


def _random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (m + np.conj(m).T) / 2.0


def suite_hermiticity(rng: np.random.Generator) -> SuiteResult:
    worst = 0.0
    for _ in range(50):
        p = _random_params(rng)
        for h in (
            loop_hamiltonian(p),
            ladder_hamiltonian(map_drives(p)),
            two_qubit_hamiltonian(TwoQubitParams(rng.uniform(0.1, 50.0), rng.uniform(-np.pi, np.pi))),
        ):
            worst = max(worst, linalg.herm_defect(h))
    return SuiteResult("hermiticity of builders", worst, 1e-12)


def suite_unitarity(rng: np.random.Generator) -> SuiteResult:
    worst = 0.0
    for _ in range(50):
        m = _random_hermitian(rng, int(rng.integers(2, 5)))
        t = rng.uniform(-2.0, 2.0)
        u = linalg.expm_i(m, t)
        worst = max(worst, linalg.unitary_defect(u))
        w, v = linalg.eig_hermitian(m)
        worst = max(worst, float(np.max(np.abs((v * w) @ np.conj(v).T - m))))
    for g in (
        gates.ladder_to_loop_gate(rng.uniform(-np.pi, np.pi)),
        gates.bell_frame_gate(rng.uniform(-np.pi, np.pi)),
        gates.iswap_like_gate(),
        *gates.chiral_entangling_gates(),
        *gates.triplet_cycle_gates(),
    ):
        worst = max(worst, linalg.unitary_defect(g))
    return SuiteResult("unitarity (propagators and gates)", worst, 1e-10)


def suite_norm_conservation(rng: np.random.Generator) -> SuiteResult:
    s = pulses.PulseSchedule.from_area(1.23, handedness="R")
    _, states = pulses.propagate_td(
        lambda t: pulses.hamiltonian_at(s, t),
        np.array([1.0, 0.0, 0.0], complex),
        s.t_start, s.t_end, s.tau / 500.0, check=False, record_every=100,
    )
    worst = float(np.max(np.abs(np.sum(np.abs(states) ** 2, axis=1) - 1.0)))
    for _ in range(20):
        m = _random_hermitian(rng, 3)
        psi = rng.normal(size=3) + 1j * rng.normal(size=3)
        psi /= np.linalg.norm(psi)
        worst = max(worst, abs(np.linalg.norm(linalg.expm_i(m, 0.7) @ psi) - 1.0))
    return SuiteResult("norm conservation", worst, 1e-9)


def suite_step_halving() -> SuiteResult:
    worst = 0.0
    for tag in ("L", "R"):
        s = pulses.PulseSchedule.from_area(1.23, handedness=tag)
        _, base = pulses.transfer_scan(s, np.array([1.23]), record_every=None)
        half = pulses.PulseSchedule(omega0=s.omega0, tau=s.tau, handedness=tag,
                                    phi=s.phi, dt=s.dt / 2.0)
        _, fine = pulses.transfer_scan(half, np.array([1.23]), record_every=None)
        worst = max(worst, float(np.max(np.abs(fine[0, -1] - base[0, -1]))))
    return SuiteResult("integrator step-halving", worst, 1e-6)


def suite_sandwich(rng: np.random.Generator) -> SuiteResult:
    worst = 0.0
    psi0 = np.array([0.0, 1.0, 0.0], complex)
    for _ in range(50):
        p = _random_params(rng)
        t = rng.uniform(0.0, 0.5)
        direct = linalg.expm_i(loop_hamiltonian(p), t) @ psi0
        tg = gates.ladder_to_loop_gate(p.phi_q)
        sandwich = tg @ linalg.expm_i(ladder_hamiltonian(map_drives(p)), t) @ np.conj(tg).T @ psi0
        worst = max(worst, float(np.max(np.abs(np.abs(direct) ** 2 - np.abs(sandwich) ** 2))))
    return SuiteResult("hybrid sandwich equivalence", worst, 1e-9)


def suite_spectrum_formula() -> SuiteResult:
    omega = 2.0 * np.pi * 10.0
    worst = 0.0
    for phi in np.linspace(-np.pi, np.pi, 101):
        ev = np.sort(np.linalg.eigvalsh(loop_hamiltonian(DriveParams.symmetric(omega, phi))))
        worst = max(worst, float(np.max(np.abs(ev - np.sort(loop_spectrum(omega, phi))))))
    return SuiteResult("loop eigenvalue formula", worst, 1e-10)


def suite_gate_identities(rng: np.random.Generator) -> SuiteResult:
    worst = 0.0
    for _ in range(20):
        phi_q = rng.uniform(-np.pi, np.pi)
        chain = (gates.rotation(1, 2, np.pi, 0.0)
                 @ gates.rotation(0, 1, np.pi / 2, phi_q)
                 @ gates.rotation(1, 2, np.pi, np.pi))
        worst = max(worst, float(np.max(np.abs(chain - gates.ladder_to_loop_gate(phi_q)))))
    left, right = gates.chiral_entangling_gates()
    u1 = gates.iswap_like_gate()
    cl, cr = gates.triplet_cycle_gates()
    worst = max(worst, float(np.max(np.abs(left - np.conj(u1).T @ cl @ u1))))
    worst = max(worst, float(np.max(np.abs(right - u1 @ cr @ np.conj(u1).T))))
    q = TwoQubitParams(2.0 * np.pi * 6.7, np.pi / 2)
    worst = max(worst, linalg.phase_dist(linalg.expm_i(two_qubit_hamiltonian(q), q.t_entangle), left))
    b, dark = triplet_basis(q.phi)
    h = two_qubit_hamiltonian(q)
    worst = max(worst, float(np.max(np.abs(np.conj(b).T @ h @ b - triplet_hamiltonian(q)))))
    worst = max(worst, float(np.max(np.abs(np.conj(b).T @ h @ dark))))
    return SuiteResult("gate and subspace identities", worst, 1e-10)


def suite_backend_agreement() -> SuiteResult | None:
    if not _kernels.HAS_NUMBA:
        return None
    areas = np.array([0.6, 1.23, 2.0])
    worst = 0.0
    for tag in ("L", "R"):
        sched = pulses.PulseSchedule.from_area(1.0, handedness=tag)
        _, a = pulses.transfer_scan(sched, areas, record_every=200, backend="numba")
        _, b = pulses.transfer_scan(sched, areas, record_every=200, backend="numpy")
        worst = max(worst, float(np.max(np.abs(a - b))))
    return SuiteResult("numba/numpy backend agreement", worst, 1e-7)


def run_selftest(seed: int = 0, printer=print) -> bool:
    """Run every suite, print one line per suite, return overall pass."""
    rng = np.random.default_rng(seed)
    t_start = time.perf_counter()
    results: list[SuiteResult] = [
        suite_hermiticity(rng),
        suite_unitarity(rng),
        suite_norm_conservation(rng),
        suite_step_halving(),
        suite_sandwich(rng),
        suite_spectrum_formula(),
        suite_gate_identities(rng),
    ]
    backend = suite_backend_agreement()
    if backend is not None:
        results.append(backend)
    ok = True
    for r in results:
        status = "ok  " if r.passed else "FAIL"
        printer(f"{status} {r.name}: residual {r.residual:.3e} (tol {r.tolerance:.1e})")
        ok = ok and r.passed
    printer(f"selftest {'passed' if ok else 'FAILED'} in {time.perf_counter() - t_start:.2f} s")
    return ok
