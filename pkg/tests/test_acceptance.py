"""Acceptance suite: every criterion at its stated tolerance and budget.

Run with `pytest tests/test_acceptance.py -v -s` to see one PASS/FAIL
line per criterion.  Sampling criteria fix their own seed; the published
reference numbers for the nearest-strange capability are seed dependent
and are reproduced as capability bounds, not as exact values.
"""

import time
from fractions import Fraction

import numpy as np
import pytest

from parakit.chain import (
    ChainSpec,
    build_hamiltonian,
    build_hamiltonian_clock,
    diagonalize,
)
from parakit.clock import parity_operator
from parakit.effective import (
    asymmetric_eigenvalues,
    asymmetric_second,
    closed_form_second,
    perturbative_effective,
    spectrum_comparison,
)
from parakit.gates import (
    diagonal_level,
    hierarchy_level,
    t_gate,
    theorem1_check,
)
from parakit.magic import (
    contextuality_score,
    coverage_stats,
    distinct_states,
    sample_words,
    strange_states,
    wigner,
)
from parakit.rydberg import (
    BerryLoop,
    RydbergParams,
    adiabatic_eliminate,
    berry_phase_closed,
    berry_phase_numeric,
    evolve,
    inverse_design,
    rotating_hamiltonian,
    verify_mapping,
)

ACCEPTANCE_SEED = 482


def _criterion(number, description, budget_seconds, body):
    start = time.monotonic()
    try:
        body()
        elapsed = time.monotonic() - start
        assert elapsed < budget_seconds, (
            f"runtime {elapsed:.1f} s exceeds budget {budget_seconds} s"
        )
    except AssertionError:
        print(f"ACCEPTANCE {number}: FAIL - {description}")
        raise
    print(f"ACCEPTANCE {number}: PASS ({elapsed:.1f} s) - {description}")


def test_criterion_1_exact_degeneracy():
    def body():
        spec = ChainSpec(L=2, f=(0.0, 0.0), J=(1.0,))
        result = diagonalize(build_hamiltonian(spec))
        expected = np.repeat([-2.0, 0.0, 2.0], 3)
        assert np.abs(np.sort(result.eigenvalues) - expected).max() < 1e-10
        for value in (-2.0, 0.0, 2.0):
            assert np.sum(np.abs(result.eigenvalues - value) < 1e-10) == 3
        rng = np.random.default_rng(100)
        for _ in range(20):
            L = int(rng.integers(2, 5))
            spec = ChainSpec(L=L, f=tuple(rng.uniform(0, 1, L)),
                             J=tuple(rng.uniform(0.2, 1.5, L - 1)))
            H = build_hamiltonian_clock(spec)
            P = parity_operator(L)
            assert np.abs(H @ P - P @ H).max() < 1e-12

    _criterion(1, "exact degeneracy and parity symmetry", 5.0, body)


def test_criterion_2_effective_oracle_equivalence():
    def body():
        rng = np.random.default_rng(200)
        for _ in range(20):
            f = rng.uniform(0.01, 0.2, 2)
            spec = ChainSpec(L=2, f=tuple(f), J=(1.0,))
            pert = perturbative_effective(spec, 2)
            closed = closed_form_second(spec)
            residual = np.abs(pert.full_matrix() - closed.full_matrix()).max()
            assert residual < 10 * max(f) ** 4
            eigs = np.sort(np.linalg.eigvalsh(closed.interaction))
            assert np.abs(eigs - np.array([-1.0, -1.0, 2.0])).max() < 1e-9
            scaled = np.sort(np.linalg.eigvalsh(pert.interaction)) / closed.coupling
            assert np.abs(scaled - np.array([-1.0, -1.0, 2.0])).max() < 1e-9

    _criterion(2, "second-order perturbation matches the closed form", 10.0, body)


def test_criterion_3_comparison_table_surrogate():
    def body():
        template = ChainSpec(L=2, f=(0.0, 0.0), J=(1.0,))
        rows = spectrum_comparison(template, [0.05])
        resid = np.abs(np.array(rows[0].exact) - np.array(rows[0].perturbative))
        assert resid.max() < 1e-4
        grid = np.arange(0.02, 0.101, 0.01)
        rows = spectrum_comparison(template, grid)
        residuals = [
            max(abs(np.array(r.exact) - np.array(r.perturbative))) for r in rows
        ]
        slope = np.polyfit(np.log(grid), np.log(residuals), 1)[0]
        assert abs(slope - 4.0) < 0.3

    _criterion(3, "exact-versus-perturbative residual is fourth order", 30.0, body)


def test_criterion_4_asymmetric_chain_eigenvalues():
    def body():
        for phi_hat in (np.pi / 6, np.pi / 4, 0.0):
            spec = ChainSpec(L=2, f=(0.06, 0.09), J=(1.0,), phi=np.pi / 6,
                             phi_hat=phi_hat)
            closed = asymmetric_second(spec)
            pert = perturbative_effective(spec, 2)
            predicted = np.sort(closed.coupling * asymmetric_eigenvalues(phi_hat))
            numeric = np.sort(np.linalg.eigvalsh(pert.interaction))
            assert np.abs(predicted - numeric).max() < 1e-9
        pattern = np.sort(asymmetric_eigenvalues(np.pi / 4)) / np.sqrt(3)
        assert np.abs(pattern - np.array([-1.0, 0.0, 1.0])).max() < 1e-12

    _criterion(4, "free-angle eigenvalue formulas match projected spectra", 10.0, body)


def test_criterion_5_hierarchy_classification():
    def body():
        assert hierarchy_level(np.diag([1, 1, np.exp(2j * np.pi / 3)])).level == 2
        assert hierarchy_level(t_gate()).level == 3
        assert hierarchy_level(np.diag([1, 1, np.exp(2j * np.pi / 9)])).level == 4
        assert hierarchy_level(np.diag([1, 1, np.exp(2j * np.pi / 27)])).level == 6
        for denom in (3, 9, 27):
            for w1 in range(denom):
                for w2 in range(denom):
                    U = np.diag([
                        1.0,
                        np.exp(2j * np.pi * w1 / denom),
                        np.exp(2j * np.pi * w2 / denom),
                    ]).astype(complex)
                    assert (
                        hierarchy_level(U, 8).level
                        == diagonal_level((Fraction(0), Fraction(w1, denom),
                                           Fraction(w2, denom))).level
                    )
        rng = np.random.default_rng(500)
        checked = 0
        while checked < 20:
            w = rng.integers(0, 27, 2)
            U = np.diag([1.0, np.exp(2j * np.pi * w[0] / 27),
                         np.exp(2j * np.pi * w[1] / 27)]).astype(complex)
            level = hierarchy_level(U).level
            if 2 <= level <= 4:
                assert theorem1_check(U)
                checked += 1

    _criterion(5, "hierarchy classifier agrees with the diagonal closed form", 60.0, body)


def test_criterion_6_universality_witness():
    def body():
        clifford = sample_words(seed=ACCEPTANCE_SEED, n=5000, length=50,
                                alphabet="clifford")
        assert distinct_states(clifford) <= 12
        full = sample_words(seed=ACCEPTANCE_SEED, n=5000, length=50, theta=1.0)
        assert distinct_states(full) >= 1000
        big = sample_words(seed=ACCEPTANCE_SEED, n=10000, length=50, theta=1.0)
        report = coverage_stats(big, bins=12)
        assert report.phase_occupancy >= 0.95

    _criterion(6, "word sampling densely covers the state space", 120.0, body)


def test_criterion_7_magic_capability():
    def body():
        for state in strange_states():
            rho = np.outer(state, state.conj())
            assert abs(wigner(rho).min() + 1.0 / 3.0) < 1e-9
        # brute-force closure of |0> under the Clifford generators
        from parakit.gates import clifford_generators
        from parakit.magic import gauge_fixed

        gates = clifford_generators()
        frontier = [np.array([1.0, 0.0, 0.0], dtype=complex)]
        orbit = {}
        while frontier:
            state = gauge_fixed(frontier.pop())
            key = tuple(np.round(np.concatenate([state.real, state.imag]), 8))
            if key in orbit:
                continue
            orbit[key] = state
            frontier.extend(G @ state for G in gates)
        assert len(orbit) == 12
        for state in orbit.values():
            assert wigner(np.outer(state, state.conj())).min() > -1e-10
        records = sample_words(seed=ACCEPTANCE_SEED, n=10000, length=50, theta=1.0)
        oracle_value = contextuality_score(
            np.outer(strange_states()[0], strange_states()[0].conj())
        )
        assert abs(oracle_value - 0.5) < 1e-9
        for k in range(3):
            best = min(records, key=lambda r: r.dist[k])
            assert best.dist[k] <= 0.06
            assert abs(abs(best.score_m) - oracle_value) <= 0.1

    _criterion(7, "strange-state negativity and nearest-sample capability", 180.0, body)


def test_criterion_8_rydberg_scheme():
    def body():
        # resonant two-level Rabi against the closed form
        Om = 1.0
        p = RydbergParams(omega=(Om, 0, 0, 0), delta=(0, 0, 0, 0), phase=(0,) * 4)
        traj = evolve(rotating_hamiltonian(p), np.array([1, 0, 0, 0], complex),
                      duration=np.pi / Om, dt=0.002)
        exact = np.sin(Om * traj.times / 2) ** 2
        assert np.abs(traj.populations()[:, 1] - exact).max() < 1e-6
        # leakage at Delta / Omega = 20
        De = 20.0
        p = RydbergParams(omega=(Om,) * 4, delta=(0, 0, De, De), phase=(0,) * 4)
        traj = evolve(rotating_hamiltonian(p), np.array([1, 0, 0, 0], complex),
                      duration=20.0, dt=0.004)
        assert traj.populations()[:, 3].max() < 0.01
        # eliminated-versus-full fidelity over T = 10 / |Omega_R|
        p = RydbergParams(omega=(0.0, 0.0, Om, Om), delta=(0, 0, De, De),
                          phase=(0.1, 0.4, -0.2, 0.9))
        T = 10.0 / abs(p.effective_rabi)
        full = evolve(rotating_hamiltonian(p), np.array([1, 0, 0, 0], complex),
                      duration=T, dt=0.004, sample_stride=10**9)
        eff = evolve(adiabatic_eliminate(p), np.array([1, 0, 0], complex),
                     duration=T, dt=0.004, sample_stride=10**9)
        projected = full.states[-1][:3]
        projected /= np.linalg.norm(projected)
        assert abs(np.vdot(eff.states[-1], projected)) ** 2 > 0.999
        # the designed parameters reach the target interaction
        from parakit.effective import edge_interaction_matrix

        design = inverse_design(1.0 * edge_interaction_matrix(), seed=0)
        assert design.reachable and design.residual < 1e-6
        # the printed parameter set is checked and its discrepancy documented
        report = verify_mapping(1.0)
        assert len(report.variants) == 16
        if report.best_residual >= 1e-9:
            assert not report.matches_printed
            print(
                "  (printed parameter set misses the target; best residual "
                f"{report.best_residual:.3f} under convention {report.best_convention!r})"
            )

    _criterion(8, "four-level scheme: oracle, leakage, fidelity, design", 120.0, body)


def test_criterion_9_berry_phase():
    def body():
        loop = BerryLoop(envelope=lambda t: 0.6,
                         phase=lambda t: 2 * np.pi * t / 100.0,
                         duration=100.0, splitting=1.6, branch=1)
        gc = berry_phase_closed(loop)
        gap = 2.0
        errors = []
        for Tg in (200.0, 400.0, 800.0):
            gn = berry_phase_numeric(loop, duration=Tg / gap, steps_per_unit_gap=10.0)
            errors.append(abs(float((gn - gc + np.pi) % (2 * np.pi) - np.pi)))
        assert errors[0] / abs(gc) < 0.01
        assert errors[0] > errors[1] > errors[2]
        exponent = -np.polyfit(np.log([200.0, 400.0, 800.0]), np.log(errors), 1)[0]
        assert 0.7 <= exponent <= 1.3

    _criterion(9, "numeric Berry phase converges to the closed form", 60.0, body)
