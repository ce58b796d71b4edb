"""Dynamical qutrit gate and Clifford-hierarchy classification.

The edge-mode interaction generates the one-parameter family
exp(-i beta_t H_int) on the encoded qutrit.  Conjugating with the qutrit
Hadamard diagonalizes it, leaving one free phase theta, and the hierarchy
level of the resulting diagonal gate follows the 3-adic structure of its
phases.  Two classifiers are provided: the general recursive membership
test and a closed form for diagonal gates with 3-power phase denominators;
they are required to agree wherever both apply.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .clock import (
    OMEGA,
    PHASE_POINTS,
    displacement,
    equal_up_to_phase,
    is_pauli_up_to_phase,
    is_unitary,
    pauli_x,
    pauli_z,
)
from .effective import edge_interaction_matrix
from .tolerances import COMPARE_ATOL

ZETA = np.exp(2j * np.pi / 9)
K_MAX_LIMIT = 8


def clifford_generators() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """The qutrit Clifford generators (X, S, H).

    X is the cyclic shift, S = diag(1, omega, 1), and H is the qutrit
    Fourier matrix normalized by 1/sqrt(3) so that it is unitary (every
    downstream use needs the unitary form).
    """
    X = pauli_x()
    S = np.diag([1.0, OMEGA, 1.0]).astype(complex)
    w = OMEGA
    H = np.array(
        [[1, 1, 1], [1, w, w.conjugate()], [1, w.conjugate(), w]], dtype=complex
    ) / np.sqrt(3)
    return X, S, H


def qutrit_hadamard() -> np.ndarray:
    return clifford_generators()[2]


def t_gate() -> np.ndarray:
    """diag(zeta^{j^3 mod 9}) = diag(1, zeta, zeta^8), the qutrit T analogue."""
    return np.diag([ZETA ** (j**3 % 9) for j in range(3)]).astype(complex)


@dataclass
class DynamicalGate:
    """exp(-i beta_t H_int) together with its diagonal-form phase theta.

    theta is the relative phase of the non-degenerate eigenvalue after
    factoring the global phase of the degenerate pair; for the interaction
    used here theta = -3 beta_t mod 2 pi.
    """

    beta_t: float
    matrix: np.ndarray
    theta: float


def dynamical_gate(beta_t: float) -> DynamicalGate:
    """Evolve the encoded qutrit under the edge-mode interaction.

    The interaction matrix is circulant, so the Hadamard diagonalizes it:
    U = H U_D H^dag with U_D = diag(e^{i beta_t}, e^{i beta_t},
    e^{-2 i beta_t}) in the Hadamard column order used here.
    """
    H = qutrit_hadamard()
    U = H @ np.diag(np.exp(-1j * beta_t * _hadamard_column_eigenvalues())) @ H.conj().T
    theta = _diagonal_theta(H.conj().T @ U @ H)
    return DynamicalGate(beta_t=float(beta_t), matrix=U, theta=theta)


def _hadamard_column_eigenvalues() -> np.ndarray:
    """Interaction eigenvalue carried by each Hadamard column: (-1, -1, 2)."""
    M = edge_interaction_matrix()
    H = qutrit_hadamard()
    return np.real(np.diag(H.conj().T @ M @ H))


def _diagonal_theta(U_D: np.ndarray, atol: float = 1e-9) -> float:
    """Phase of the non-degenerate diagonal entry relative to the pair.

    The degenerate pair is identified by value multiplicity, not by
    position, since the diagonal form is only fixed up to a column
    permutation.  If all three entries coincide the gate is a global
    phase and theta = 0.
    """
    d = np.diag(U_D)
    pair_same = [
        np.abs(d[(k + 1) % 3] - d[(k + 2) % 3]) < atol for k in range(3)
    ]
    if all(pair_same):
        return 0.0
    if not any(pair_same):
        raise ValueError("diagonal has no degenerate pair; theta is undefined")
    distinct = int(np.argmax(pair_same))  # entry k is distinct iff the other two agree
    ref = d[(distinct + 1) % 3]
    return float(np.angle(d[distinct] / ref) % (2 * np.pi))


def gate_for_theta(theta: float) -> np.ndarray:
    """H diag(1, 1, e^{i theta}) H^dag, the non-Clifford letter of the word sampler."""
    H = qutrit_hadamard()
    return H @ np.diag([1.0, 1.0, np.exp(1j * theta)]) @ H.conj().T


@dataclass
class HierarchyVerdict:
    """Smallest hierarchy level containing the gate, or None above k_max."""

    level: int | None
    k_max: int

    @property
    def exceeded(self) -> bool:
        return self.level is None


_PAULIS = [displacement(x, z) for (x, z) in PHASE_POINTS if (x, z) != (0, 0)]
_GENERATORS = [pauli_x(), pauli_z()]
# plain dict: get/set are atomic under the GIL, so concurrent classifier
# calls may share it; a stale miss only costs a recomputation
_LEVEL_CACHE: dict[tuple[bytes, int], bool] = {}


def _canonical_key(U: np.ndarray) -> bytes:
    """Phase-normalized, rounded fingerprint used for memoization."""
    flat = U.ravel()
    mags = np.abs(flat)
    ref = flat[np.argmax(mags > mags.max() * (1 - 1e-7))]
    normalized = U * (ref.conjugate() / abs(ref))
    return np.round(normalized, 6).tobytes()


def _in_level(U: np.ndarray, k: int) -> bool:
    if k == 1:
        return is_pauli_up_to_phase(U)
    Ud = U.conj().T
    if k == 2:
        # the Pauli-with-phases set is a group, so generators suffice
        return all(is_pauli_up_to_phase(U @ P @ Ud) for P in _GENERATORS)
    key = (_canonical_key(U), k)
    cached = _LEVEL_CACHE.get(key)
    if cached is not None:
        return cached
    # levels above two are not groups, so every Pauli element is conjugated
    ok = all(_in_level(U @ P @ Ud, k - 1) for P in _PAULIS)
    _LEVEL_CACHE[key] = ok
    return ok


def hierarchy_level(U: np.ndarray, k_max: int = 8) -> HierarchyVerdict:
    """Classify a 3x3 unitary in the Clifford hierarchy.

    Returns the smallest k with U in level k; the levels are nested so the
    search from k = 1 upward terminates at the true level.  Gates beyond
    k_max yield the bounded verdict instead of looping.
    """
    U = np.asarray(U, dtype=complex)
    if U.shape != (3, 3):
        raise ValueError("expected a 3x3 operator")
    if not is_unitary(U):
        raise ValueError("operator is not unitary")
    if not 1 <= k_max <= K_MAX_LIMIT:
        raise ValueError(f"k_max must be in [1, {K_MAX_LIMIT}]")
    for k in range(1, k_max + 1):
        if _in_level(U, k):
            return HierarchyVerdict(level=k, k_max=k_max)
    return HierarchyVerdict(level=None, k_max=k_max)


def witness_chain(U: np.ndarray, k_max: int = 8) -> list[dict]:
    """Conjugation path from U down to a Pauli, one step per level.

    Each entry records the level of the current gate and the phase point
    of the Pauli whose conjugation steps down one level; the final entry
    is the Pauli reached (level 1, no further conjugation).
    """
    verdict = hierarchy_level(U, k_max)
    if verdict.exceeded:
        raise ValueError(f"gate exceeds level {k_max}; no witness chain")
    chain = []
    current, level = U, verdict.level
    while level > 1:
        for (x, z) in PHASE_POINTS[1:]:
            D = displacement(x, z)
            child = current @ D @ current.conj().T
            child_level = hierarchy_level(child, k_max).level
            if child_level == level - 1:
                chain.append({"level": level, "pauli": [x, z]})
                current, level = child, child_level
                break
        else:  # pragma: no cover - impossible if the classifier is consistent
            raise RuntimeError("no Pauli steps the gate down one level")
    chain.append({"level": 1, "pauli": None})
    return chain


def diagonal_level(phases: tuple[Fraction, Fraction, Fraction]) -> HierarchyVerdict:
    """Closed-form hierarchy level of diag(e^{2 pi i r_0}, ..., e^{2 pi i r_2}).

    Each phase is a rational multiple of 2 pi whose reduced denominator
    must be a power of 3.  After gauging away the global phase, the phase
    function is interpolated by kappa_1 j + kappa_2 j^2 over Z_{3^M}; a
    monomial kappa_b j^b / 3^m with kappa_b coprime to 3 sits at level
    2 (m - 1) + b, and the gate sits at the maximum over its monomials.
    Agrees with hierarchy_level wherever both apply.
    """
    rs = [Fraction(r) for r in phases]
    M = 0
    for r in rs:
        den = r.denominator
        while den % 3 == 0:
            den //= 3
        if den != 1:
            raise ValueError(f"phase denominator {r.denominator} is not a power of 3")
        M = max(M, _three_adic_exponent(r.denominator))
    if M == 0:
        return HierarchyVerdict(level=1, k_max=K_MAX_LIMIT)
    mod = 3**M
    w = [int((r - rs[0]) * mod) % mod for r in rs]
    # interpolate w(j) = k1 j + k2 j^2 (mod 3^M); the 2x2 system has
    # determinant 2, invertible mod any power of 3
    inv2 = pow(2, -1, mod)
    k2 = ((w[2] - 2 * w[1]) * inv2) % mod
    k1 = (w[1] - k2) % mod
    level = 1
    for b, kappa in ((1, k1), (2, k2)):
        if kappa % mod == 0:
            continue
        m_eff = M - _three_adic_exponent_int(kappa)
        if m_eff <= 0:
            continue
        level = max(level, 2 * (m_eff - 1) + b)
    return HierarchyVerdict(level=level, k_max=K_MAX_LIMIT)


def _three_adic_exponent(denominator: int) -> int:
    e = 0
    while denominator % 3 == 0:
        denominator //= 3
        e += 1
    return e


def _three_adic_exponent_int(value: int) -> int:
    e = 0
    while value % 3 == 0:
        value //= 3
        e += 1
    return e


def uv_gate(z_prime: int, gamma_prime: int, eps_prime: int) -> np.ndarray:
    """Diagonal ninth-root phase gate diag(zeta^{v_0}, zeta^{v_1}, zeta^{v_2}).

    v_0 = 0, v_1 = 6 z' + 2 gamma' + 3 eps' mod 9, v_2 = 6 z' + gamma' +
    6 eps' mod 9 with all arguments in Z_3.  Every output lies at level 3
    or below.
    """
    z_prime, gamma_prime, eps_prime = z_prime % 3, gamma_prime % 3, eps_prime % 3
    v1 = (6 * z_prime + 2 * gamma_prime + 3 * eps_prime) % 9
    v2 = (6 * z_prime + gamma_prime + 6 * eps_prime) % 9
    return np.diag([1.0, ZETA**v1, ZETA**v2]).astype(complex)


def t_from_ud(U_D: np.ndarray) -> np.ndarray:
    """Build X^dag U_D X U_D^dag from a diagonal gate of the form diag(1, 1, e^{i theta}).

    For theta = 2 pi / 9 the result is the T gate; for theta = 2 pi / 3 it
    is Pauli; for theta = 0 the identity.  Raises if U_D is not (up to a
    global phase) diagonal with its first two entries equal.
    """
    U_D = np.asarray(U_D, dtype=complex)
    if U_D.shape != (3, 3):
        raise ValueError("expected a 3x3 operator")
    off = U_D - np.diag(np.diag(U_D))
    if np.abs(off).max() > COMPARE_ATOL:
        raise ValueError("gate is not diagonal")
    d = np.diag(U_D)
    if np.abs(d[0] - d[1]) > COMPARE_ATOL:
        raise ValueError("wrong theta placement: first two diagonal entries must agree")
    X = pauli_x()
    return X.conj().T @ U_D @ X @ U_D.conj().T


def theorem1_check(V: np.ndarray, k_max: int = 8) -> bool:
    """Whether conjugation by the Hadamard preserves the hierarchy level.

    Classifies V and H V H^dag and compares; V must classify within
    level 6 for the check to be meaningful.
    """
    lv = hierarchy_level(V, k_max)
    if lv.exceeded or lv.level > 6:
        raise ValueError("gate must classify at level 6 or below")
    H = qutrit_hadamard()
    lu = hierarchy_level(H @ V @ H.conj().T, k_max)
    return lu.level == lv.level


def pauli_label(x: int, z: int) -> str:
    return f"D[{x % 3},{z % 3}]"


def gates_equal(U: np.ndarray, V: np.ndarray) -> bool:
    return equal_up_to_phase(U, V)
