"""Unitary time evolution of a macroscopic initial state, tracking the
von Neumann entropy, the observational entropy, and the deficit against the
uniform prior along the trajectory."""

from dataclasses import dataclass

import numpy as np

from .entropy import observational_deficit, observational_entropy, von_neumann_entropy
from .errors import ConsistencyError, DimensionMismatch
from .linalg import DEFAULT_TOL, Tolerance, dagger, hermitian_eig
from .mppp import InferentialFrame
from .quantum import DensityMatrix, Povm, maximally_mixed


@dataclass(frozen=True)
class TrajectoryPoint:
    t: float
    von_neumann_bits: float
    observational_entropy_bits: float
    deficit_uniform_bits: float


def macroscopic_initial_state(
    frame: InferentialFrame, weights, tol: Tolerance = DEFAULT_TOL
) -> DensityMatrix:
    """Free state sum_y p_y Pi_y gamma / tr[Pi_y gamma] of the frame."""
    p = np.asarray(weights, dtype=float)
    if p.ndim != 1 or len(p) != frame.n_blocks:
        raise DimensionMismatch(
            f"need {frame.n_blocks} weights, got {p.shape}"
        )
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
        raise ValueError("weights must be a probability vector")
    states = frame.extreme_free_states(tol)
    mat = sum(w * s.mat for w, s in zip(p, states))
    return DensityMatrix(mat, tol, validate=False)


def evolve_trajectory(
    povm: Povm,
    hamiltonian,
    initial: DensityMatrix,
    t_max: float,
    steps: int,
    tol: Tolerance = DEFAULT_TOL,
) -> list[TrajectoryPoint]:
    """rho_t = exp(-iHt) rho_0 exp(iHt) on an even grid of ``steps`` points
    from 0 to ``t_max`` inclusive."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    eig = hermitian_eig(hamiltonian, tol)  # rejects non-Hermitian input
    if initial.dim != len(eig.eigenvalues):
        raise DimensionMismatch("Hamiltonian and state dims differ")
    if povm.dim != initial.dim:
        raise DimensionMismatch("POVM and state dims differ")
    uniform = maximally_mixed(initial.dim, tol)
    v = eig.eigenvectors
    rotated = dagger(v) @ initial.mat @ v
    points = []
    for t in np.linspace(0.0, t_max, steps):
        phases = np.exp(-1j * eig.eigenvalues * t)
        rho_t = DensityMatrix(
            v @ (np.outer(phases, phases.conj()) * rotated) @ dagger(v),
            tol,
            validate=False,
        )
        points.append(
            TrajectoryPoint(
                t=float(t),
                von_neumann_bits=von_neumann_entropy(rho_t, tol).value,
                observational_entropy_bits=observational_entropy(rho_t, povm, tol).value,
                deficit_uniform_bits=observational_deficit(
                    rho_t, uniform, povm, tol
                ).value,
            )
        )
    s0 = points[0].von_neumann_bits
    for p in points:
        if p.observational_entropy_bits < p.von_neumann_bits - 1e-8:
            raise ConsistencyError(
                f"observational entropy fell below the von Neumann entropy at t={p.t}"
            )
        if abs(p.von_neumann_bits - s0) > 1e-8:
            raise ConsistencyError(
                f"von Neumann entropy drifted under unitary evolution at t={p.t}"
            )
    return points
