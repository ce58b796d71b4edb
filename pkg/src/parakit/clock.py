"""Qutrit clock algebra and parafermion operators.

The single-site algebra is generated by the clock matrix sigma (the qutrit
Pauli Z) and the shift matrix tau (the qutrit Pauli X), which obey
sigma tau = omega tau sigma with omega = exp(2 pi i / 3).  Chain operators
live in the 3^L dimensional space built by explicit Kronecker products,
site 1 being the leftmost tensor factor.  Everything here is dense and
exact; nothing is sparse and nothing is approximated.
"""

from __future__ import annotations

from functools import reduce

import numpy as np

from .tolerances import COMPARE_ATOL, HERMITIAN_ATOL, UNITARY_ATOL

DIM = 3
OMEGA = np.exp(2j * np.pi / 3)

#: the nine phase-space points (x, z) of the qutrit Weyl group, row-major
PHASE_POINTS = tuple((x, z) for x in range(3) for z in range(3))


def clock_generators() -> tuple[np.ndarray, np.ndarray]:
    """Return (sigma, tau): the diagonal clock matrix and the cyclic shift.

    sigma = diag(1, omega, omega^2), tau|j> = |j+1 mod 3>, and the pair
    satisfies sigma tau = omega tau sigma.
    """
    sigma = np.diag([OMEGA**j for j in range(DIM)]).astype(complex)
    tau = np.zeros((DIM, DIM), dtype=complex)
    for j in range(DIM):
        tau[(j + 1) % DIM, j] = 1.0
    return sigma, tau


def pauli_z() -> np.ndarray:
    """Qutrit Pauli Z = sum_j omega^j |j><j| (the clock matrix)."""
    return clock_generators()[0]


def pauli_x() -> np.ndarray:
    """Qutrit Pauli X = sum_j |j+1 mod 3><j| (the shift matrix)."""
    return clock_generators()[1]


def site_operator(op: np.ndarray, site: int, length: int) -> np.ndarray:
    """Embed a single-site operator at `site` (1-based) of an L-site chain."""
    if not 1 <= site <= length:
        raise ValueError(f"site {site} out of range for chain of length {length}")
    factors = [np.eye(3, dtype=complex)] * length
    factors[site - 1] = op
    return kron_chain(factors)


def kron_chain(factors: list[np.ndarray]) -> np.ndarray:
    return reduce(np.kron, factors)


def parafermion(site: int, length: int, kind: str = "chi") -> np.ndarray:
    """Parafermion operator chi_j or psi_j on an L-site chain.

    chi_j = (prod_{k<j} tau_k) sigma_j and psi_j = omega (prod_{k<j} tau_k)
    sigma_j tau_j, embedded in the 3^L dimensional space.  Both are unitary,
    cube to the identity, and square to their own Hermitian conjugate.
    """
    if kind not in ("chi", "psi"):
        raise ValueError(f"kind must be 'chi' or 'psi', got {kind!r}")
    if not 1 <= site <= length:
        raise ValueError(f"site {site} out of range for chain of length {length}")
    sigma, tau = clock_generators()
    factors = [tau] * (site - 1)
    factors.append(sigma if kind == "chi" else sigma @ tau)
    factors.extend([np.eye(3, dtype=complex)] * (length - site))
    op = kron_chain(factors)
    return op if kind == "chi" else OMEGA * op


def parity_operator(length: int) -> np.ndarray:
    """Global Z3 symmetry generator prod_j tau_j^dagger.

    Eigenvalues are {1, omega, omega^2}, each with multiplicity 3^(L-1).
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    tau_dag = clock_generators()[1].conj().T
    return kron_chain([tau_dag] * length)


def displacement(x: int, z: int) -> np.ndarray:
    """Weyl-Heisenberg displacement D^{x,z} = omega^{2xz} X^x Z^z."""
    x, z = x % DIM, z % DIM
    X, Z = pauli_x(), pauli_z()
    return OMEGA ** (2 * x * z) * np.linalg.matrix_power(X, x) @ np.linalg.matrix_power(Z, z)


def displacements() -> list[np.ndarray]:
    """All nine displacements, ordered like PHASE_POINTS."""
    return [displacement(x, z) for (x, z) in PHASE_POINTS]


def is_unitary(U: np.ndarray, atol: float = UNITARY_ATOL) -> bool:
    U = np.asarray(U)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        return False
    return np.abs(U @ U.conj().T - np.eye(U.shape[0])).max() <= atol


def is_hermitian(A: np.ndarray, atol: float = HERMITIAN_ATOL) -> bool:
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        return False
    return np.abs(A - A.conj().T).max() <= atol


def equal_up_to_phase(U: np.ndarray, V: np.ndarray, atol: float = COMPARE_ATOL) -> bool:
    """Projective equality of two unitaries: U = c V with |c| = 1.

    Checks that U^dagger V is a unit-modulus multiple of the identity
    within `atol`, which quotients out the global phase.
    """
    if U.shape != V.shape:
        return False
    M = U.conj().T @ V
    s = np.trace(M) / M.shape[0]
    if abs(abs(s) - 1.0) > atol:
        return False
    return np.abs(M - s * np.eye(M.shape[0])).max() <= atol


def is_pauli_up_to_phase(U: np.ndarray, atol: float = COMPARE_ATOL) -> bool:
    """Whether a 3x3 unitary is a displacement D^{x,z} up to global phase."""
    U = np.asarray(U, dtype=complex)
    if U.shape != (3, 3):
        raise ValueError("expected a 3x3 operator")
    if not is_unitary(U):
        raise ValueError("operator is not unitary")
    return any(equal_up_to_phase(U, D, atol) for D in displacements())


def is_clifford(U: np.ndarray, atol: float = COMPARE_ATOL) -> bool:
    """Whether a 3x3 unitary normalizes the Pauli group up to phases.

    X and Z generate the Pauli group and the Pauli-with-phases set is
    closed under multiplication, so conjugating the two generators into
    Paulis is sufficient.
    """
    U = np.asarray(U, dtype=complex)
    if U.shape != (3, 3):
        raise ValueError("expected a 3x3 operator")
    if not is_unitary(U):
        raise ValueError("operator is not unitary")
    Ud = U.conj().T
    return is_pauli_up_to_phase(U @ pauli_x() @ Ud, atol) and is_pauli_up_to_phase(
        U @ pauli_z() @ Ud, atol
    )
