import numpy as np
import pytest

from ccisim import gates, linalg
from ccisim.model import (
    DriveParams,
    TwoQubitParams,
    chiral_hamiltonian,
    ladder_hamiltonian,
    loop_hamiltonian,
    loop_spectrum,
    map_drives,
    triplet_basis,
    triplet_hamiltonian,
    two_qubit_hamiltonian,
    wrap_angle,
)

OMEGA = 2 * np.pi * 10.0


def random_params(rng):
    amps = rng.uniform(0.0, 2 * np.pi * 20.0, 3)
    phases = rng.uniform(-np.pi, np.pi, 3)
    return DriveParams(*amps, *phases)


class TestDriveParams:
    def test_gauge_phi_wraps(self):
        p = DriveParams(1, 1, 1, phi_p=3.0, phi_q=-3.0, phi_s=1.0)
        assert p.gauge_phi == pytest.approx(wrap_angle(7.0))
        assert -np.pi < p.gauge_phi <= np.pi

    def test_rejects_negative_amplitude(self):
        with pytest.raises(ValueError, match="omega_q"):
            DriveParams(1.0, -0.5, 1.0)

    def test_wrap_angle_edges(self):
        assert wrap_angle(np.pi) == pytest.approx(np.pi)
        assert wrap_angle(-np.pi) == pytest.approx(np.pi)
        assert wrap_angle(3 * np.pi) == pytest.approx(np.pi)
        assert wrap_angle(0.0) == 0.0


class TestMapDrives:
    def test_all_zero(self):
        d = map_drives(DriveParams(0, 0, 0))
        assert d.omega_a == 0 and d.omega_b == 0 and d.delta_a == 0

    def test_symmetric_zero_phase(self):
        # direct substitution: omega_a = 2 Omega / sqrt(2), omega_b = 0
        d = map_drives(DriveParams(OMEGA, OMEGA, OMEGA))
        assert d.omega_a == pytest.approx(np.sqrt(2) * OMEGA)
        assert abs(d.omega_b) < 1e-12
        assert d.delta_a == pytest.approx(-OMEGA)
        assert d.delta_b == d.delta_a

    def test_detunings_always_equal(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            d = map_drives(random_params(rng))
            assert d.delta_a == d.delta_b


class TestLadderHamiltonian:
    def test_zero_drives(self):
        from ccisim.model import PhysicalDrives

        h = ladder_hamiltonian(PhysicalDrives(0, 0, 0, 0))
        assert np.max(np.abs(h)) == 0

    def test_single_real_drive(self):
        from ccisim.model import PhysicalDrives

        h = ladder_hamiltonian(PhysicalDrives(OMEGA, 0, 0, 0))
        expected = np.zeros((3, 3), dtype=complex)
        expected[0, 1] = expected[1, 0] = OMEGA / 2
        assert np.max(np.abs(h - expected)) < 1e-12

    def test_entries_by_substitution(self):
        p = DriveParams.symmetric(OMEGA, np.pi / 2)
        d = map_drives(p)
        h = ladder_hamiltonian(d)
        expected = 0.5 * np.array(
            [
                [-d.delta_a, np.conj(d.omega_a), 0],
                [d.omega_a, 0, np.conj(d.omega_b)],
                [0, d.omega_b, d.delta_b],
            ],
            dtype=complex,
        )
        assert np.max(np.abs(h - expected)) < 1e-15
        assert linalg.herm_defect(h) < 1e-12


class TestLoopHamiltonian:
    def test_triangle_at_zero_phase(self):
        h = loop_hamiltonian(DriveParams(OMEGA, OMEGA, OMEGA))
        expected = (OMEGA / 2) * (np.ones((3, 3)) - np.eye(3))
        assert np.max(np.abs(h - expected)) < 1e-12
        w = np.linalg.eigvalsh(h)
        assert np.allclose(w, [-OMEGA / 2, -OMEGA / 2, OMEGA], atol=1e-10)

    def test_open_ladder_spectrum(self):
        # omega_q = 0: ladder with splitting sqrt(op^2 + os^2)/2
        op, os_ = 3.0, 4.0
        w = np.linalg.eigvalsh(loop_hamiltonian(DriveParams(op, 0.0, os_)))
        lam = np.sqrt(op**2 + os_**2) / 2
        assert np.allclose(w, [-lam, 0.0, lam], atol=1e-12)

    def test_two_pi_periodicity(self):
        p1 = DriveParams.symmetric(OMEGA, 0.7)
        p2 = DriveParams.symmetric(OMEGA, 0.7 + 2 * np.pi)
        w1 = np.sort(np.linalg.eigvalsh(loop_hamiltonian(p1)))
        w2 = np.sort(np.linalg.eigvalsh(loop_hamiltonian(p2)))
        assert np.allclose(w1, w2, atol=1e-10)

    def test_gauge_shift_leaves_spectrum(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            p = random_params(rng)
            a, b = rng.uniform(-np.pi, np.pi, 2)
            shifted = DriveParams(
                p.omega_p, p.omega_q, p.omega_s,
                p.phi_p + a, p.phi_q + a + b, p.phi_s + b,
            )
            w1 = np.sort(np.linalg.eigvalsh(loop_hamiltonian(p)))
            w2 = np.sort(np.linalg.eigvalsh(loop_hamiltonian(shifted)))
            assert np.allclose(w1, w2, atol=1e-9)

    def test_detuning_hook(self):
        h = loop_hamiltonian(DriveParams.symmetric(OMEGA, 0.0), detuning=(1.0, 2.0, 3.0))
        assert np.allclose(np.diag(h), [1.0, 2.0, 3.0])
        assert linalg.herm_defect(h) < 1e-12

    def test_all_builders_hermitian(self):
        rng = np.random.default_rng(13)
        for _ in range(30):
            p = random_params(rng)
            assert linalg.herm_defect(loop_hamiltonian(p)) < 1e-12
            assert linalg.herm_defect(ladder_hamiltonian(map_drives(p))) < 1e-12


class TestConjugationIdentity:
    def test_frame_gate_conjugation(self):
        # the central oracle: mapping + ladder builder + frame gate
        # reproduce the loop Hamiltonian, for random parameters
        rng = np.random.default_rng(14)
        for _ in range(50):
            p = random_params(rng)
            t_gate = gates.ladder_to_loop_gate(p.phi_q)
            h0 = ladder_hamiltonian(map_drives(p))
            got = t_gate @ h0 @ t_gate.conj().T
            assert np.max(np.abs(got - loop_hamiltonian(p))) < 1e-10


class TestLoopSpectrum:
    def test_zero_phase(self):
        # cos evaluations: (-1/2, 1, -1/2) * omega
        e = loop_spectrum(OMEGA, 0.0)
        assert np.allclose(e, [-OMEGA / 2, OMEGA, -OMEGA / 2], atol=1e-12)

    def test_quarter_turn(self):
        # cos(pi/6 - 4pi/3), cos(pi/6 - 2pi), cos(pi/6 - 8pi/3)
        e = loop_spectrum(OMEGA, np.pi / 2)
        expected = [-np.sqrt(3) * OMEGA / 2, np.sqrt(3) * OMEGA / 2, 0.0]
        assert np.allclose(e, expected, atol=1e-10)

    def test_even_in_phi(self):
        for phi in np.linspace(0, np.pi, 25):
            a = np.sort(loop_spectrum(OMEGA, phi))
            b = np.sort(loop_spectrum(OMEGA, -phi))
            assert np.allclose(a, b, atol=1e-10)

    def test_matches_eigendecomposition_on_grid(self):
        for phi in np.linspace(-np.pi, np.pi, 101):
            h = loop_hamiltonian(DriveParams.symmetric(OMEGA, phi))
            w = np.sort(np.linalg.eigvalsh(h))
            assert np.max(np.abs(w - np.sort(loop_spectrum(OMEGA, phi)))) < 1e-10


class TestTwoQubit:
    def test_zero_phase_real(self):
        h = two_qubit_hamiltonian(TwoQubitParams(2 * np.pi * 6.7, 0.0))
        assert np.max(np.abs(h.imag)) == 0

    def test_phase_entry(self):
        j = 2 * np.pi * 6.7
        h = two_qubit_hamiltonian(TwoQubitParams(j, np.pi / 2))
        assert h[0, 2] == pytest.approx(j / np.sqrt(2) * np.exp(-1j * np.pi / 2))

    def test_spectrum_even_in_phi(self):
        j = 2 * np.pi * 6.7
        for phi in (0.3, 1.1, 2.9):
            w1 = np.sort(np.linalg.eigvalsh(two_qubit_hamiltonian(TwoQubitParams(j, phi))))
            w2 = np.sort(np.linalg.eigvalsh(two_qubit_hamiltonian(TwoQubitParams(j, -phi))))
            assert np.allclose(w1, w2, atol=1e-10)

    def test_matches_pauli_construction(self):
        # independent oracle: build from explicit Pauli tensor products
        sx = np.array([[0, 1], [1, 0]], dtype=complex)
        sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
        i2 = np.eye(2, dtype=complex)
        j, phi = 2 * np.pi * 6.7, 0.8
        drive_a = np.cos(phi) * sx + np.sin(phi) * sy
        h = (j / np.sqrt(2)) * (np.kron(drive_a, i2) + np.kron(i2, sx)) + (
            j / 2
        ) * (np.kron(sx, sx) + np.kron(sy, sy))
        assert np.max(np.abs(h - two_qubit_hamiltonian(TwoQubitParams(j, phi)))) < 1e-12

    def test_rejects_nonpositive_coupling(self):
        with pytest.raises(ValueError):
            TwoQubitParams(0.0, 0.0)


class TestTripletSubspace:
    def test_zero_phase_triangle(self):
        j = 2 * np.pi * 6.7
        h = triplet_hamiltonian(TwoQubitParams(j, 0.0))
        assert np.max(np.abs(h - j * (np.ones((3, 3)) - np.eye(3)))) < 1e-12
        assert np.allclose(np.linalg.eigvalsh(h), [-j, -j, 2 * j], atol=1e-9)

    def test_isometry_conjugation(self):
        rng = np.random.default_rng(15)
        for _ in range(20):
            q = TwoQubitParams(rng.uniform(1, 60), rng.uniform(-np.pi, np.pi))
            b, dark = triplet_basis(q.phi)
            h = two_qubit_hamiltonian(q)
            assert np.max(np.abs(b.conj().T @ h @ b - triplet_hamiltonian(q))) < 1e-10
            # dark state is annihilated, hence orthogonal to the triplet block
            assert np.max(np.abs(b.conj().T @ h @ dark)) < 1e-10
            assert np.max(np.abs(h @ dark)) < 1e-10

    def test_spectrum_is_doubled_loop_formula(self):
        for phi in np.linspace(-np.pi, np.pi, 21):
            q = TwoQubitParams(2 * np.pi * 6.7, phi)
            w = np.sort(np.linalg.eigvalsh(triplet_hamiltonian(q)))
            expected = np.sort(loop_spectrum(2 * q.coupling, phi))
            assert np.max(np.abs(w - expected)) < 1e-10


class TestChiralHamiltonian:
    def test_no_loop_coupling_no_handedness(self):
        hl = chiral_hamiltonian(1.0, 2.0, 0.0, "L")
        hr = chiral_hamiltonian(1.0, 2.0, 0.0, "R")
        assert np.array_equal(hl, hr)

    def test_loop_entry_signs(self):
        # phi = -pi/2: (3,1) entry is -i Oq/2 for L and +i Oq/2 for R
        oq = 0.8
        hl = chiral_hamiltonian(1.0, 1.0, oq, "L", phi=-np.pi / 2)
        hr = chiral_hamiltonian(1.0, 1.0, oq, "R", phi=-np.pi / 2)
        assert hl[2, 0] == pytest.approx(-1j * oq / 2)
        assert hr[2, 0] == pytest.approx(1j * oq / 2)

    def test_difference_is_twice_loop_term(self):
        hl = chiral_hamiltonian(1.0, 2.0, 0.8, "L", phi=0.4)
        hr = chiral_hamiltonian(1.0, 2.0, 0.8, "R", phi=0.4)
        diff = hl - hr
        assert diff[0, 1] == 0 and diff[1, 2] == 0
        assert diff[2, 0] == pytest.approx(0.8 * np.exp(0.4j))

    def test_rejects_bad_handedness(self):
        with pytest.raises(ValueError, match="handedness"):
            chiral_hamiltonian(1.0, 1.0, 1.0, "X")
