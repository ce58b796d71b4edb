"""Discrete Wigner functions, contextuality scores, and word sampling.

Phase-point operators A^{x,z} are displaced copies of A^{0,0} =
(1/3) sum_{x,z} D^{x,z}; the Wigner function of a state is W(x,z) =
(1/3) Tr[A^{x,z} rho], normalized so the entries sum to one and the
strange states reach the minimum entry -1/3.  The score reported next to
it is the literal maximum of Tr[A^r rho] over the nine phase points,
whose value on a strange state is 1/2.

The sampler draws random words over the alphabet {X, S, H, U(theta)}
from a counter-based stream keyed by (seed, word index), so results are
reproducible and independent of how the work is partitioned.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox

from .clock import PHASE_POINTS, displacement
from .gates import clifford_generators, gate_for_theta
from .tolerances import PSD_ATOL

STRANGE_LABELS = ("Sa", "Sb", "Sc")
DISTINCT_DECIMALS = 6  # states closer than 1e-6 per amplitude count as one


def phase_point_operator(x: int, z: int) -> np.ndarray:
    """A^{x,z} = D^{x,z} A^{0,0} D^{x,z dagger}; Hermitian with unit trace."""
    A0 = sum(displacement(px, pz) for (px, pz) in PHASE_POINTS) / 3.0
    D = displacement(x, z)
    return D @ A0 @ D.conj().T


def phase_point_operators() -> np.ndarray:
    """All nine phase-point operators stacked in PHASE_POINTS order, shape (9, 3, 3)."""
    return np.stack([phase_point_operator(x, z) for (x, z) in PHASE_POINTS])


def _validate_density_matrix(rho: np.ndarray):
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (3, 3):
        raise ValueError("expected a 3x3 density matrix")
    if np.abs(rho - rho.conj().T).max() > 1e-9:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > 1e-9:
        raise ValueError("density matrix does not have unit trace")
    if np.linalg.eigvalsh(rho).min() < -PSD_ATOL:
        raise ValueError("density matrix is not positive semidefinite")
    return rho


def wigner(rho: np.ndarray) -> np.ndarray:
    """Discrete Wigner table W[x, z] = (1/3) Tr[A^{x,z} rho]; sums to one."""
    rho = _validate_density_matrix(rho)
    table = np.empty((3, 3))
    for (x, z), A in zip(PHASE_POINTS, phase_point_operators()):
        table[x, z] = np.real(np.trace(A @ rho)) / 3.0
    return table


def contextuality_score(rho: np.ndarray) -> float:
    """max over the nine phase points of Tr[A^r rho], taken literally.

    Because the A^r sum to three times the identity, this maximum is at
    least 1/3 for every state; report wigner_min next to it when the sign
    of the violation matters.
    """
    rho = _validate_density_matrix(rho)
    vals = [np.real(np.trace(A @ rho)) for A in phase_point_operators()]
    return float(max(vals))


def wigner_min(rho: np.ndarray) -> float:
    """min over phase points of Tr[A^r rho] = 3 * min W; negative means magic."""
    rho = _validate_density_matrix(rho)
    vals = [np.real(np.trace(A @ rho)) for A in phase_point_operators()]
    return float(min(vals))


def gauge_fixed(amplitudes: np.ndarray, zero_atol: float = 1e-12) -> np.ndarray:
    """Multiply by the global phase making the first nonzero amplitude real positive."""
    amplitudes = np.asarray(amplitudes, dtype=complex)
    for a in amplitudes:
        if abs(a) > zero_atol:
            return amplitudes * (a.conjugate() / abs(a))
    return amplitudes.copy()


def state_coordinates(amplitudes: np.ndarray) -> tuple[float, float, float, float, float]:
    """(alpha, beta, gamma, delta1, delta2) of a normalized qutrit state.

    The magnitudes are the moduli of the three amplitudes; the phases are
    the arguments of the second and third amplitude after gauge fixing,
    folded into [0, 2 pi).  The phase of a numerically vanishing
    amplitude is undefined and reported as zero, so states on the
    coordinate planes land in stable bins.
    """
    psi = gauge_fixed(amplitudes)
    mags = np.abs(psi)
    d1 = _fold_angle(np.angle(psi[1])) if mags[1] > 1e-12 else 0.0
    d2 = _fold_angle(np.angle(psi[2])) if mags[2] > 1e-12 else 0.0
    return float(mags[0]), float(mags[1]), float(mags[2]), d1, d2


def _fold_angle(angle: float) -> float:
    """Fold into [0, 2 pi), mapping the upper rounding boundary back to 0."""
    folded = float(angle) % (2 * np.pi)
    return 0.0 if folded > 2 * np.pi - 1e-9 else folded


def strange_states() -> list[np.ndarray]:
    """The three maximally negative states at the magnitude mid-sections.

    S_a = (|1> - |2>)/sqrt(2) is an eigenstate of the qutrit Fourier
    matrix; S_b and S_c are its images under the shift X (gauge fixed),
    which sit at the other two mid-sections and are eigenstates of the
    correspondingly conjugated Fourier matrix.  Each has one Wigner entry
    equal to -1/3.
    """
    X, _, _ = clifford_generators()
    s = np.array([0.0, 1.0, -1.0], dtype=complex) / np.sqrt(2)
    states = [s]
    for _ in range(2):
        states.append(X @ states[-1])
    return [gauge_fixed(v) for v in states]


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """(1/2) ||rho - sigma||_1 via singular values; in [0, 1]."""
    rho, sigma = np.asarray(rho, dtype=complex), np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise ValueError("dimension mismatch")
    return float(0.5 * np.linalg.svd(rho - sigma, compute_uv=False).sum())


def pure_state_trace_distance(psi: np.ndarray, phi: np.ndarray) -> float:
    """Trace distance between two pure states, sqrt(1 - |<psi|phi>|^2)."""
    overlap = abs(np.vdot(psi, phi)) ** 2
    return float(np.sqrt(max(0.0, 1.0 - overlap)))


@dataclass
class SampleRecord:
    """One sampled word, its final state, and the derived diagnostics."""

    word_index: int
    letters: str
    state: np.ndarray
    alpha: float
    beta: float
    gamma: float
    delta1: float
    delta2: float
    score_m: float
    wigner_min: float
    dist: tuple[float, float, float]  # distances to (S_a, S_b, S_c)


_LETTER_NAMES = "XSHU"


def _word_letters(seed: int, word_index: int, length: int, n_letters: int) -> np.ndarray:
    """Uniform letter indices for one word, keyed by (seed, word index)."""
    gen = Generator(Philox(key=[seed % 2**64, word_index]))
    return gen.integers(0, n_letters, size=length)


def _letter_matrices(theta: float, alphabet: str) -> list[np.ndarray]:
    X, S, H = clifford_generators()
    if alphabet == "full":
        return [X, S, H, gate_for_theta(theta)]
    if alphabet == "clifford":
        return [X, S, H]
    raise ValueError(f"unknown alphabet {alphabet!r}")


def _evaluate_block(args) -> list[SampleRecord]:
    """Evaluate one contiguous block of word indices, vectorized over words."""
    seed, start, count, length, theta, alphabet = args
    matrices = _letter_matrices(theta, alphabet)
    n_letters = len(matrices)
    draws = np.empty((count, length), dtype=np.int64)
    for k in range(count):
        draws[k] = _word_letters(seed, start + k, length, n_letters)
    psi = np.zeros((count, 3), dtype=complex)
    psi[:, 0] = 1.0
    for pos in range(length):
        col = draws[:, pos]
        for letter, M in enumerate(matrices):
            mask = col == letter
            if mask.any():
                psi[mask] = psi[mask] @ M.T
    # gauge fix: first amplitude above threshold becomes real positive
    mags = np.abs(psi)
    first = np.argmax(mags > 1e-12, axis=1)
    ref = psi[np.arange(count), first]
    psi *= (ref.conjugate() / np.abs(ref))[:, None]
    A_stack = phase_point_operators()
    vals = np.einsum("ri,pij,rj->rp", psi.conj(), A_stack, psi).real
    strange = np.stack(strange_states())
    overlap = np.abs(psi @ strange.conj().T) ** 2
    dists = np.sqrt(np.clip(1.0 - overlap, 0.0, None))
    mags = np.abs(psi)
    # phases of vanishing amplitudes are numerical noise; pin them to zero
    # and fold the 2 pi rounding boundary so identical states share a bin
    d1 = np.where(mags[:, 1] > 1e-12, np.angle(psi[:, 1]) % (2 * np.pi), 0.0)
    d2 = np.where(mags[:, 2] > 1e-12, np.angle(psi[:, 2]) % (2 * np.pi), 0.0)
    d1 = np.where(d1 > 2 * np.pi - 1e-9, 0.0, d1)
    d2 = np.where(d2 > 2 * np.pi - 1e-9, 0.0, d2)
    records = []
    for k in range(count):
        records.append(
            SampleRecord(
                word_index=start + k,
                letters="".join(_LETTER_NAMES[i] for i in draws[k]),
                state=psi[k],
                alpha=float(mags[k, 0]), beta=float(mags[k, 1]), gamma=float(mags[k, 2]),
                delta1=float(d1[k]), delta2=float(d2[k]),
                score_m=float(vals[k].max()),
                wigner_min=float(vals[k].min()),
                dist=tuple(float(x) for x in dists[k]),
            )
        )
    return records


def sample_words(seed: int, n: int, length: int, theta: float = 1.0,
                 alphabet: str = "full", workers: int = 1) -> list[SampleRecord]:
    """Sample n random words of the given length applied to |0>.

    Letters are drawn uniformly from {X, S, H, U(theta)} (or the Clifford
    subset), per word from an independent counter-based stream, so the
    output is a deterministic function of (seed, n, length, theta,
    alphabet) no matter how many workers evaluate it.  Zero-length words
    are allowed and reproduce |0>.
    """
    if n <= 0:
        raise ValueError("need a positive number of words")
    if length < 0:
        raise ValueError("word length must be non-negative")
    # fixed block size: the partition (and therefore every floating-point
    # reduction shape) is identical no matter how many workers run it
    chunk = 512
    blocks = [
        (seed, start, min(chunk, n - start), length, theta, alphabet)
        for start in range(0, n, chunk)
    ]
    if workers <= 1:
        pieces = [_evaluate_block(b) for b in blocks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            pieces = list(pool.map(_evaluate_block, blocks))
    records = [r for piece in pieces for r in piece]
    records.sort(key=lambda r: r.word_index)
    return records


def distinct_states(records: list[SampleRecord]) -> int:
    """Number of distinct gauge-fixed states at 1e-6 amplitude resolution."""
    seen = set()
    for r in records:
        key = tuple(np.round(np.concatenate([r.state.real, r.state.imag]), DISTINCT_DECIMALS))
        seen.add(key)
    return len(seen)


@dataclass
class CoverageReport:
    """Occupancy of the phase and magnitude grids plus the negativity count."""

    bins: int
    phase_occupancy: float
    magnitude_occupancy: float
    negative_count: int
    n_records: int
    distinct: int

    def as_dict(self) -> dict:
        return {
            "bins": self.bins,
            "phase_occupancy": self.phase_occupancy,
            "magnitude_occupancy": self.magnitude_occupancy,
            "negative_count": self.negative_count,
            "n_records": self.n_records,
            "distinct_states": self.distinct,
        }


def coverage_stats(records: list[SampleRecord], bins: int = 12) -> CoverageReport:
    """Grid occupancy over (delta1, delta2) and over the magnitude simplex.

    The phase grid tiles [0, 2 pi)^2; the magnitude grid tiles the
    (beta^2, gamma^2) triangle, counting only bins whose center satisfies
    p1 + p2 <= 1.  Also counts the records with a negative Wigner entry.
    """
    if not records:
        raise ValueError("need at least one record")
    two_pi = 2 * np.pi

    def bin_index(u):
        # the nudge assigns values that sit on a boundary up to rounding
        # noise to one bin deterministically
        return min(int(u * bins + 1e-9), bins - 1)

    phase_hits = set()
    mag_hits = set()
    for r in records:
        phase_hits.add((bin_index(r.delta1 / two_pi), bin_index(r.delta2 / two_pi)))
        mag_hits.add((bin_index(r.beta**2), bin_index(r.gamma**2)))
    valid = [
        (i, j)
        for i in range(bins)
        for j in range(bins)
        if (i + 0.5) / bins + (j + 0.5) / bins <= 1.0
    ]
    mag_occ = len(mag_hits & set(valid)) / len(valid)
    negative = sum(1 for r in records if r.wigner_min < 0)
    return CoverageReport(
        bins=bins,
        phase_occupancy=len(phase_hits) / bins**2,
        magnitude_occupancy=mag_occ,
        negative_count=negative,
        n_records=len(records),
        distinct=distinct_states(records),
    )


def nearest_strange_report(records: list[SampleRecord]) -> dict:
    """For each strange state, the sampled record closest in trace distance.

    Reports the distance and the literal contextuality score of that
    record, the capability demonstrated by the sampler at the caller's
    seed.
    """
    if not records:
        raise ValueError("need at least one record")
    report = {}
    for k, label in enumerate(STRANGE_LABELS):
        best = min(records, key=lambda r: r.dist[k])
        report[label] = {
            "word_index": best.word_index,
            "trace_distance": best.dist[k],
            "score_m": best.score_m,
            "wigner_min": best.wigner_min,
        }
    return report
