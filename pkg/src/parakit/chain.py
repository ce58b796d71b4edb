"""Z3 parafermion chain Hamiltonians and exact diagonalization.

The chain couples two parafermions (chi_j, psi_j) per site through bond
terms J_j psi_j^dag chi_{j+1} and on-site flip terms f_j chi_j^dag psi_j,
each dressed with the integrable coefficient alpha_m(phi) and an omega
factor that makes the sum Hermitian.  Two construction routes are kept:
one multiplying the embedded parafermion string operators, one assembling
the equivalent local clock-model terms.  They agree entrywise and the
second stays cheap up to L = 8.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import schur

from .clock import (
    OMEGA,
    clock_generators,
    is_hermitian,
    kron_chain,
    parafermion,
    parity_operator,
)
from .tolerances import DEGENERACY_RTOL

MAX_DENSE_LENGTH = 8  # 3^8 = 6561 is the largest dimension the dense solvers accept


@dataclass(frozen=True)
class ChainSpec:
    """Couplings and chiral angles of an open L-site chain.

    f holds the L on-site flip couplings, J the L-1 bond couplings; both
    must be non-negative.  phi and phi_hat are the chiral angles of the
    bond and flip terms.  The super-integrable point is phi = phi_hat =
    pi/6, which is also the default.
    """

    L: int
    f: tuple[float, ...]
    J: tuple[float, ...]
    phi: float = np.pi / 6
    phi_hat: float = np.pi / 6

    def __post_init__(self):
        object.__setattr__(self, "f", tuple(float(x) for x in np.atleast_1d(self.f)))
        object.__setattr__(self, "J", tuple(float(x) for x in np.atleast_1d(self.J)))
        if self.L < 1:
            raise ValueError("chain length must be >= 1")
        if len(self.f) != self.L:
            raise ValueError(f"expected {self.L} flip couplings, got {len(self.f)}")
        if len(self.J) != self.L - 1:
            raise ValueError(f"expected {self.L - 1} bond couplings, got {len(self.J)}")
        if any(x < 0 for x in self.f) or any(x < 0 for x in self.J):
            raise ValueError("couplings must be non-negative")

    @classmethod
    def uniform(cls, L: int, f: float, J: float = 1.0, phi: float = np.pi / 6,
                phi_hat: float = np.pi / 6) -> "ChainSpec":
        return cls(L=L, f=(f,) * L, J=(J,) * (L - 1), phi=phi, phi_hat=phi_hat)

    @property
    def dim(self) -> int:
        return 3**self.L


def alpha_coefficient(phi: float, m: int) -> complex:
    """Integrable coefficient alpha_m = exp(i phi (2m - 3)) / sin(pi m / 3)."""
    if m not in (1, 2):
        raise ValueError("m must be 1 or 2 for the three-state chain")
    return np.exp(1j * phi * (2 * m - 3)) / np.sin(np.pi * m / 3)


def build_hamiltonian(spec: ChainSpec) -> np.ndarray:
    """Chain Hamiltonian assembled from embedded parafermion operators.

    H = - sum_j J_j (psi_j^dag chi_{j+1} alpha(phi) omega_bar + h.c.)
        - sum_j f_j (chi_j^dag psi_j alpha(phi_hat) omega_bar + h.c.)

    Every string operator is built in the full 3^L space, so this route
    costs dense matrix products; use build_hamiltonian_clock for L > 5.
    """
    a = alpha_coefficient(spec.phi, 1)
    a_hat = alpha_coefficient(spec.phi_hat, 1)
    n = spec.dim
    H = np.zeros((n, n), dtype=complex)
    for j in range(1, spec.L):
        term = spec.J[j - 1] * a * np.conj(OMEGA) * (
            parafermion(j, spec.L, "psi").conj().T @ parafermion(j + 1, spec.L, "chi")
        )
        H -= term + term.conj().T
    for j in range(1, spec.L + 1):
        term = spec.f[j - 1] * a_hat * np.conj(OMEGA) * (
            parafermion(j, spec.L, "chi").conj().T @ parafermion(j, spec.L, "psi")
        )
        H -= term + term.conj().T
    return H


def _embedded_sum(locals_and_sites: list[tuple[np.ndarray, int]], L: int) -> np.ndarray:
    """Sum of local operators (acting on `width` sites starting at `site`)."""
    n = 3**L
    H = np.zeros((n, n), dtype=complex)
    eye = np.eye(3, dtype=complex)
    for op, site in locals_and_sites:
        width = round(np.log(op.shape[0]) / np.log(3))
        factors = [eye] * (site - 1) + [op] + [eye] * (L - site - width + 1)
        H += kron_chain(factors)
    return H


def bond_hamiltonian(spec: ChainSpec) -> np.ndarray:
    """The J part of the chain in the clock picture.

    Substituting the string form of the parafermions, the tau strings of a
    bond term cancel pairwise and psi_j^dag chi_{j+1} = omega sigma_j^dag
    sigma_{j+1}, leaving a nearest-neighbour clock-clock coupling.
    """
    sigma, _ = clock_generators()
    a = alpha_coefficient(spec.phi, 1)
    terms = []
    for j in range(1, spec.L):
        local = -spec.J[j - 1] * a * np.conj(OMEGA) * OMEGA * np.kron(sigma.conj().T, sigma)
        terms.append((local + local.conj().T, j))
    return _embedded_sum(terms, spec.L)


def flip_hamiltonian(spec: ChainSpec) -> np.ndarray:
    """The f part of the chain in the clock picture.

    chi_j^dag psi_j = omega tau_j, so each flip term is a pure shift.
    """
    _, tau = clock_generators()
    a_hat = alpha_coefficient(spec.phi_hat, 1)
    terms = []
    for j in range(1, spec.L + 1):
        local = -spec.f[j - 1] * a_hat * np.conj(OMEGA) * OMEGA * tau
        terms.append((local + local.conj().T, j))
    return _embedded_sum(terms, spec.L)


def build_hamiltonian_clock(spec: ChainSpec) -> np.ndarray:
    """Chain Hamiltonian assembled from local sigma/tau strings.

    Equals build_hamiltonian entrywise; scales to L = 8 because no full
    3^L matrix products are performed.
    """
    return bond_hamiltonian(spec) + flip_hamiltonian(spec)


@dataclass
class SpectrumResult:
    """Full spectrum with a parity label per eigenvector.

    eigenvalues are ascending; eigenvectors[:, i] belongs to eigenvalues[i]
    and is an eigenvector of the Z3 parity with eigenvalue
    omega^parity_labels[i].  ground_projector spans the lowest degenerate
    cluster.
    """

    eigenvalues: np.ndarray
    ground_projector: np.ndarray
    parity_labels: np.ndarray
    eigenvectors: np.ndarray = field(repr=False, default=None)

    @property
    def ground_degeneracy(self) -> int:
        return int(round(np.real(np.trace(self.ground_projector))))


def _degenerate_clusters(eigenvalues: np.ndarray, threshold: float) -> list[slice]:
    clusters = []
    start = 0
    for i in range(1, len(eigenvalues) + 1):
        if i == len(eigenvalues) or eigenvalues[i] - eigenvalues[i - 1] > threshold:
            clusters.append(slice(start, i))
            start = i
    return clusters


def diagonalize(H: np.ndarray, hermitian_atol: float = 1e-10) -> SpectrumResult:
    """Exact spectrum, parity-resolved eigenbasis, and ground projector.

    Eigenvalues closer than DEGENERACY_RTOL times the spectral width are
    grouped into one cluster; inside each cluster the basis is rotated to
    diagonalize the parity operator so every returned eigenvector carries
    a definite Z3 parity label.
    """
    H = np.asarray(H, dtype=complex)
    if not is_hermitian(H, atol=hermitian_atol * max(1.0, np.abs(H).max())):
        raise ValueError("Hamiltonian is not Hermitian")
    n = H.shape[0]
    L = round(np.log(n) / np.log(3))
    if 3**L != n:
        raise ValueError(f"dimension {n} is not a power of 3")
    evals, vecs = np.linalg.eigh(H)
    width = float(evals[-1] - evals[0])
    threshold = DEGENERACY_RTOL * max(width, 1.0)
    omega_p = parity_operator(L)
    labels = np.zeros(n, dtype=int)
    angles = np.angle(OMEGA ** np.arange(3))
    for cl in _degenerate_clusters(evals, threshold):
        block = vecs[:, cl]
        # the parity restricted to a degenerate cluster is unitary (normal),
        # so a complex Schur decomposition gives a unitary simultaneous
        # eigenbasis even when parity eigenvalues repeat inside the cluster
        T, Z = schur(block.conj().T @ omega_p @ block, output="complex")
        pvals = np.diag(T)
        cl_labels = [int(np.argmin(np.abs(np.angle(v / np.abs(v)) - angles))) for v in pvals]
        order = np.argsort(cl_labels, kind="stable")
        vecs[:, cl] = block @ Z[:, order]
        labels[cl] = np.asarray(cl_labels)[order]
    ground = _degenerate_clusters(evals, threshold)[0]
    G = vecs[:, ground]
    projector = G @ G.conj().T
    return SpectrumResult(
        eigenvalues=evals,
        ground_projector=projector,
        parity_labels=labels,
        eigenvectors=vecs,
    )


def edge_mode_first_order(spec: ChainSpec) -> np.ndarray:
    """Left edge-mode operator corrected to first order in f/J.

    Returns chi_1 - 2 i f e^{-i phi_hat} X + 2 i f omega e^{i phi_hat}
    chi_1^dag Y with Y = -X^dag and

        X = (1 / 4J) (1 / sin 3phi) (psi_1 + e^{2 i phi} chi_2
                                      + e^{-2 i phi} omega psi_1^dag chi_2^dag).

    The omega on the third term is required for the first-order commutator
    cancellation under the string convention used here (the correction
    terms must cancel [V, chi_1] type by type); without it the residual
    stays first order in f.  A uniform flip coupling is assumed.
    """
    if spec.L < 2:
        raise ValueError("edge-mode correction needs at least two sites")
    if abs(np.sin(3 * spec.phi)) < 1e-12:
        raise ValueError("sin(3*phi) = 0: first-order correction is singular")
    if len(set(spec.f)) > 1:
        raise ValueError("first-order edge mode assumes a uniform flip coupling")
    f = spec.f[0]
    J = spec.J[0]
    chi1 = parafermion(1, spec.L, "chi")
    psi1 = parafermion(1, spec.L, "psi")
    chi2 = parafermion(2, spec.L, "chi")
    X = (
        psi1
        + np.exp(2j * spec.phi) * chi2
        + np.exp(-2j * spec.phi) * OMEGA * psi1.conj().T @ chi2.conj().T
    ) / (4 * J * np.sin(3 * spec.phi))
    Y = -X.conj().T
    return (
        chi1
        - 2j * f * np.exp(-1j * spec.phi_hat) * X
        + 2j * f * OMEGA * np.exp(1j * spec.phi_hat) * chi1.conj().T @ Y
    )


def commutator_norm(A: np.ndarray, B: np.ndarray) -> float:
    """Frobenius norm of [A, B]; the edge-mode quality figure of merit."""
    return float(np.linalg.norm(A @ B - B @ A))
