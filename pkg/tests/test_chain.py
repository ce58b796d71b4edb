"""Chain Hamiltonian construction, diagonalization, and edge modes."""

import numpy as np
import pytest

from parakit.chain import (
    ChainSpec,
    alpha_coefficient,
    build_hamiltonian,
    build_hamiltonian_clock,
    commutator_norm,
    diagonalize,
    edge_mode_first_order,
)
from parakit.clock import OMEGA, parafermion, parity_operator


def random_spec(rng, L, f_max=0.5, phi=np.pi / 6, phi_hat=np.pi / 6):
    return ChainSpec(
        L=L,
        f=tuple(rng.uniform(0.0, f_max, L)),
        J=tuple(rng.uniform(0.5, 1.5, L - 1)),
        phi=phi,
        phi_hat=phi_hat,
    )


def test_alpha_at_superintegrable_point():
    expected = np.exp(-1j * np.pi / 6) / np.sin(np.pi / 3)
    assert abs(alpha_coefficient(np.pi / 6, 1) - expected) < 1e-15


def test_alpha_zero_phase():
    assert abs(alpha_coefficient(0.0, 1) - 1 / np.sin(np.pi / 3)) < 1e-15


def test_alpha_second_branch():
    expected = np.exp(1j * np.pi / 6) / np.sin(2 * np.pi / 3)
    assert abs(alpha_coefficient(np.pi / 6, 2) - expected) < 1e-15


def test_alpha_rejects_bad_m():
    with pytest.raises(ValueError):
        alpha_coefficient(0.1, 3)


def test_spec_validation():
    with pytest.raises(ValueError):
        ChainSpec(L=2, f=(0.1,), J=(1.0,))
    with pytest.raises(ValueError):
        ChainSpec(L=2, f=(0.1, -0.2), J=(1.0,))
    with pytest.raises(ValueError):
        ChainSpec(L=0, f=(), J=())


def test_bond_only_spectrum_two_sites():
    spec = ChainSpec(L=2, f=(0.0, 0.0), J=(1.0,))
    evals = np.linalg.eigvalsh(build_hamiltonian(spec))
    expected = np.repeat([-2.0, 0.0, 2.0], 3)
    assert np.abs(np.sort(evals) - expected).max() < 1e-10


def test_hermiticity_random_spec():
    H = build_hamiltonian(random_spec(np.random.default_rng(1), 3))
    assert np.abs(H - H.conj().T).max() < 1e-12


def test_parity_commutes_random_spec():
    spec = random_spec(np.random.default_rng(2), 3)
    H = build_hamiltonian(spec)
    P = parity_operator(3)
    assert np.abs(H @ P - P @ H).max() < 1e-12


@pytest.mark.parametrize("L", [2, 3, 4])
def test_construction_routes_agree(L):
    spec = random_spec(np.random.default_rng(10 + L), L)
    diff = np.abs(build_hamiltonian(spec) - build_hamiltonian_clock(spec)).max()
    assert diff < 1e-12


def test_bond_only_commutes_with_edge_parafermions():
    spec = ChainSpec(L=3, f=(0.0, 0.0, 0.0), J=(1.0, 0.7))
    H = build_hamiltonian_clock(spec)
    assert commutator_norm(H, parafermion(1, 3, "chi")) < 1e-12
    assert commutator_norm(H, parafermion(3, 3, "psi")) < 1e-12


def test_spectrum_rescales_with_couplings():
    rng = np.random.default_rng(3)
    spec = random_spec(rng, 3)
    scaled = ChainSpec(L=3, f=tuple(2.0 * x for x in spec.f),
                       J=tuple(2.0 * x for x in spec.J), phi=spec.phi,
                       phi_hat=spec.phi_hat)
    e1 = np.linalg.eigvalsh(build_hamiltonian_clock(spec))
    e2 = np.linalg.eigvalsh(build_hamiltonian_clock(scaled))
    assert np.abs(2.0 * e1 - e2).max() < 1e-10


def test_diagonalize_bond_only_ground_degeneracy():
    spec = ChainSpec(L=2, f=(0.0, 0.0), J=(1.0,))
    result = diagonalize(build_hamiltonian_clock(spec))
    assert result.ground_degeneracy == 3
    P = result.ground_projector
    assert np.abs(P @ P - P).max() < 1e-10
    assert sorted(result.parity_labels[:3]) == [0, 1, 2]


def test_diagonalize_identity():
    result = diagonalize(np.eye(9, dtype=complex))
    assert np.abs(result.eigenvalues - 1.0).max() < 1e-12
    assert result.ground_degeneracy == 9


def test_diagonalize_rejects_non_hermitian():
    M = np.zeros((9, 9), dtype=complex)
    M[0, 1] = 1.0
    with pytest.raises(ValueError):
        diagonalize(M)


def test_diagonalize_eigenvectors_carry_parity():
    spec = random_spec(np.random.default_rng(4), 2, f_max=0.3)
    result = diagonalize(build_hamiltonian_clock(spec))
    P = parity_operator(2)
    for i in range(9):
        v = result.eigenvectors[:, i]
        expected = OMEGA ** result.parity_labels[i]
        assert np.abs(P @ v - expected * v).max() < 1e-8


def test_small_flip_splitting_follows_second_order():
    # oracle: the perturbative splitting pattern (-1, 2, -1) * f^2 / J on the
    # parity sectors (1, w, w^2), derived independently in test_effective
    f, J = 0.1, 1.0
    spec = ChainSpec(L=2, f=(f, f), J=(J,))
    result = diagonalize(build_hamiltonian_clock(spec))
    triplet = np.empty(3)
    for p in range(3):
        triplet[p] = result.eigenvalues[result.parity_labels == p].min()
    centered = triplet - triplet.mean()
    expected = np.array([-1.0, 2.0, -1.0]) * f * f / J
    assert np.abs(centered - expected).max() < 5e-3  # residual is O(f^3)


def test_edge_mode_reduces_to_chi_at_zero_flip():
    spec = ChainSpec(L=2, f=(0.0, 0.0), J=(1.0,))
    assert np.abs(edge_mode_first_order(spec) - parafermion(1, 2, "chi")).max() < 1e-15


def test_edge_mode_commutator_scaling():
    # the corrected operator must commute to O(f^2) while bare chi_1 is O(f)
    fs = np.array([0.01, 0.02, 0.04, 0.08])
    corrected, bare = [], []
    chi1 = parafermion(1, 3, "chi")
    for f in fs:
        spec = ChainSpec.uniform(3, f, 1.0)
        H = build_hamiltonian_clock(spec)
        corrected.append(commutator_norm(H, edge_mode_first_order(spec)))
        bare.append(commutator_norm(H, chi1))
    slope_corrected = np.polyfit(np.log(fs), np.log(corrected), 1)[0]
    slope_bare = np.polyfit(np.log(fs), np.log(bare), 1)[0]
    assert abs(slope_corrected - 2.0) < 0.15
    assert abs(slope_bare - 1.0) < 0.15


def test_edge_mode_correction_coefficient():
    # the psi_1 component of the correction carries weight 2f/(4 J sin 3phi),
    # read off by trace projection against the orthogonal operator basis
    f, J = 0.05, 1.0
    spec = ChainSpec.uniform(2, f, J)
    psi = edge_mode_first_order(spec)
    chi1 = parafermion(1, 2, "chi")
    psi1 = parafermion(1, 2, "psi")
    coeff = np.trace(psi1.conj().T @ (psi - chi1)) / 9.0
    expected = -2j * f * np.exp(-1j * spec.phi_hat) / (4 * J * np.sin(3 * spec.phi))
    assert abs(coeff - expected) < 1e-12
    assert abs(abs(coeff) - 2 * f / (4 * J)) < 1e-12  # sin(pi/2) = 1 at phi = pi/6


def test_edge_mode_rejects_singular_angle():
    spec = ChainSpec(L=2, f=(0.1, 0.1), J=(1.0,), phi=np.pi / 3, phi_hat=np.pi / 6)
    with pytest.raises(ValueError):
        edge_mode_first_order(spec)


def test_edge_mode_rejects_nonuniform_flip():
    spec = ChainSpec(L=2, f=(0.1, 0.2), J=(1.0,))
    with pytest.raises(ValueError):
        edge_mode_first_order(spec)
