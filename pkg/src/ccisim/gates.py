"""Digital building blocks: qutrit subspace rotations, the frame-change
unitaries that wrap the analog evolutions, and the closed-form two-qubit
entangling gates with their cycle decompositions."""

from __future__ import annotations

import numpy as np

SQRT2 = np.sqrt(2.0)


def rotation(m: int, n: int, theta: float, phi: float, dim: int = 3) -> np.ndarray:
    """Rotation by theta with axis phase phi in the {|m>, |n>} subspace,
    identity elsewhere."""
    if m == n or not (0 <= m < dim) or not (0 <= n < dim):
        raise ValueError(f"invalid subspace indices ({m}, {n}) for dim {dim}")
    c = np.cos(theta / 2.0)
    s = np.sin(theta / 2.0)
    r = np.eye(dim, dtype=complex)
    r[m, m] = c
    r[n, n] = c
    r[m, n] = -np.exp(-1j * phi) * s
    r[n, m] = np.exp(1j * phi) * s
    return r


def ladder_to_loop_gate(phi_q: float) -> np.ndarray:
    """Qutrit unitary whose conjugation turns the two-tone ladder evolution
    into the closed-loop evolution. Decomposes into three subspace rotations:
    rotation(1,2,pi,0) @ rotation(0,1,pi/2,phi_q) @ rotation(1,2,pi,pi).
    """
    e = np.exp(1j * phi_q)
    return np.array(
        [
            [1.0 / SQRT2, 0.0, -np.conj(e) / SQRT2],
            [0.0, 1.0, 0.0],
            [e / SQRT2, 0.0, 1.0 / SQRT2],
        ],
        dtype=complex,
    )


def bell_frame_gate(phi: float) -> np.ndarray:
    """Two-qubit unitary mapping (|gg> + e^{i phi}|ee>)/sqrt(2) to |gg>;
    conjugating the pair evolution with it exposes the three-level loop
    on {gg, ge, eg}. Basis (gg, ge, eg, ee)."""
    e = np.exp(1j * phi)
    return np.array(
        [
            [1.0 / SQRT2, 0.0, 0.0, np.conj(e) / SQRT2],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [-e / SQRT2, 0.0, 0.0, 1.0 / SQRT2],
        ],
        dtype=complex,
    )


def iswap_like_gate() -> np.ndarray:
    """The iSWAP-like gate mixing |gg> and |ee> that conjugates the
    entangling gates into plain cycle-with-phase form."""
    return np.array(
        [
            [1.0 / SQRT2, 0.0, 0.0, 1j / SQRT2],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [1j / SQRT2, 0.0, 0.0, 1.0 / SQRT2],
        ],
        dtype=complex,
    )


def triplet_cycle_gates() -> tuple[np.ndarray, np.ndarray]:
    """The phased 3-cycles the entangling gates reduce to: the left gate
    permutes basis indices {1,2,3} -> {2,3,1}, the right one {1,2,3} -> {3,1,2};
    index 0 is untouched."""
    cl = np.array(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, -1.0],
            [0.0, -1j, 0.0, 0.0],
            [0.0, 0.0, -1j, 0.0],
        ],
        dtype=complex,
    )
    cr = np.array(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, -1j, 0.0],
            [0.0, 0.0, 0.0, -1j],
            [0.0, -1.0, 0.0, 0.0],
        ],
        dtype=complex,
    )
    return cl, cr


def chiral_entangling_gates() -> tuple[np.ndarray, np.ndarray]:
    """Closed forms of the two-qubit gates generated by evolving the driven
    pair for t = 2pi/(3 sqrt(3) J) at phi = +pi/2 (left) and -pi/2 (right).

    With U1 the iSWAP-like gate and (CL, CR) the phased cycles, they satisfy
    left = U1+ CL U1 and right = U1 CR U1+.
    """
    left = np.array(
        [
            [0.5, 0.0, -1.0 / SQRT2, 0.5j],
            [-1j / SQRT2, 0.0, 0.0, -1.0 / SQRT2],
            [0.0, -1j, 0.0, 0.0],
            [-0.5j, 0.0, -1j / SQRT2, 0.5],
        ],
        dtype=complex,
    )
    right = np.array(
        [
            [0.5, -1j / SQRT2, 0.0, -0.5j],
            [0.0, 0.0, -1j, 0.0],
            [-1.0 / SQRT2, 0.0, 0.0, -1j / SQRT2],
            [0.5j, -1.0 / SQRT2, 0.0, 0.5],
        ],
        dtype=complex,
    )
    return left, right
