"""Shared fixtures and independent oracles used across the test modules."""

import numpy as np

import macroscope as ms
from macroscope.linalg import tensor
from macroscope.quantum import DensityMatrix, Povm
from macroscope.random import random_block_frame, random_density_matrix

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def ket(*amplitudes) -> np.ndarray:
    v = np.array(amplitudes, dtype=complex)
    return v / np.linalg.norm(v)


def projector(v: np.ndarray) -> np.ndarray:
    return np.outer(v, v.conj())


def plus_state() -> DensityMatrix:
    return DensityMatrix(projector(ket(1, 1)))


def bell_state() -> DensityMatrix:
    return DensityMatrix(projector(ket(1, 0, 0, 1)))


def smeared_qubit_povm() -> Povm:
    """Binary unsharp qubit measurement with weights (2/3, 1/3)."""
    return Povm([np.diag([2 / 3, 1 / 3]), np.diag([1 / 3, 2 / 3])])


def binary_entropy(p: float) -> float:
    """Scalar oracle for two-outcome entropies."""
    if p <= 0 or p >= 1:
        return 0.0
    return float(-p * np.log2(p) - (1 - p) * np.log2(1 - p))


def shannon(p) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def random_frame(dim: int, rng: np.random.Generator, max_outcomes: int | None = None):
    """Random inferential frame with a nontrivial chance of several blocks."""
    while True:
        povm, prior = random_block_frame(dim, rng)
        if max_outcomes is None or len(povm) <= max_outcomes:
            return ms.compute_mppp(povm, prior)


def random_free_state(frame, rng: np.random.Generator) -> DensityMatrix:
    """Random mixture of the extreme free states of a frame."""
    points = frame.extreme_free_states()
    p = rng.dirichlet(np.ones(len(points)))
    return DensityMatrix(
        sum(w * s.mat for w, s in zip(p, points)), validate=False
    )


def partial_trace_loop(mat: np.ndarray, dims, keep: str) -> np.ndarray:
    """Direct double-loop partial trace, the oracle for the reshape path."""
    da, db = dims
    if keep == "A":
        out = np.zeros((da, da), dtype=complex)
        for a in range(da):
            for a2 in range(da):
                for b in range(db):
                    out[a, a2] += mat[a * db + b, a2 * db + b]
    else:
        out = np.zeros((db, db), dtype=complex)
        for b in range(db):
            for b2 in range(db):
                for a in range(da):
                    out[b, b2] += mat[a * db + b, a * db + b2]
    return out


def proposition_channel(frame, phi: np.ndarray) -> ms.Channel:
    """Measure-and-prepare map sending |phi><phi| to the first free block and
    its complement to the second; microscopicity non-generating but not
    RDM-covariant whenever phi straddles two blocks."""
    sigmas = frame.extreme_free_states()
    eff = projector(phi)
    rest = np.eye(frame.dim) - eff
    superop = np.outer(ms_vec(sigmas[0].mat), ms_vec(eff).conj()) + np.outer(
        ms_vec(sigmas[1].mat), ms_vec(rest).conj()
    )
    return ms.Channel(superop, frame.dim, frame.dim)


def ms_vec(mat: np.ndarray) -> np.ndarray:
    return np.asarray(mat, dtype=complex).reshape(-1, order="F")


def straddling_vector(frame, rng: np.random.Generator) -> np.ndarray:
    """Unit vector with nonzero weight in the first two MPPP blocks."""
    p0 = frame.mppp.elements[0]
    p1 = frame.mppp.elements[1]
    v = rng.standard_normal(frame.dim) + 1j * rng.standard_normal(frame.dim)
    v = (p0 + p1) @ v
    v0, v1 = p0 @ v, p1 @ v
    if np.linalg.norm(v0) < 1e-6 or np.linalg.norm(v1) < 1e-6:
        v = (p0[:, 0] / max(np.linalg.norm(p0[:, 0]), 1e-12)
             + p1 @ rng.standard_normal(frame.dim))
    return v / np.linalg.norm(v)


def correlated_free_state(frame, dim_b: int, rng: np.random.Generator):
    """Locally macroscopic state sum_y p_y sigma_y ⊗ tau_y on A ⊗ B."""
    sigmas = frame.extreme_free_states()
    p = rng.dirichlet(np.ones(len(sigmas)))
    taus = [random_density_matrix(dim_b, rng) for _ in sigmas]
    mat = sum(w * tensor(s.mat, t.mat) for w, s, t in zip(p, sigmas, taus))
    return DensityMatrix(mat, validate=False)
