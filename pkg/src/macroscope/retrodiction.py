"""Petz recovery maps, coarse-graining maps, their adjoint action on POVMs,
and Cesàro averaging of channel iterates.

The coarse-graining map is built twice — once from the closed measure-and-
prepare form, once as Petz-recovery composed after the measurement — and the
two superoperators are compared before either is trusted.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import (
    ConsistencyError,
    DimensionMismatch,
    ImageNotInvertible,
    PriorNotInvertible,
)
from .linalg import DEFAULT_TOL, Tolerance, dagger, frob, hermitize, vec
from .quantum import (
    Channel,
    DensityMatrix,
    Povm,
    StochasticMap,
    apply_channel,
    channel_compose,
    measurement_channel,
    post_process,
)


def petz_map(channel: Channel, gamma: DensityMatrix, tol: Tolerance = DEFAULT_TOL) -> Channel:
    """Petz recovery of ``channel`` with respect to the prior ``gamma``:

        R(x) = gamma^{1/2} E*[ E(gamma)^{-1/2} x E(gamma)^{-1/2} ] gamma^{1/2}

    Materialized as the Kraus family {gamma^{1/2} K† E(gamma)^{-1/2}} and
    cross-validated against the closed-form superoperator composition.
    """
    if channel.dim_in != gamma.dim:
        raise DimensionMismatch(
            f"channel input dim {channel.dim_in} != prior dim {gamma.dim}"
        )
    if not gamma.is_invertible(tol):
        raise PriorNotInvertible("prior must be invertible for the Petz map")
    image = hermitize(channel.apply(gamma.mat))
    w = np.linalg.eigvalsh(image)
    if w[0] <= tol.rank_eps * max(float(w[-1]), 0.0):
        raise ImageNotInvertible(
            f"channel image of the prior has eigenvalue {w[0]:.3e}"
        )
    g = linalg.mat_inv_sqrt(image, tol)
    root = linalg.mat_sqrt(gamma.mat, tol)

    kraus = [root @ dagger(k) @ g for k in channel.kraus_operators(tol)]
    recovered = Channel.from_kraus(kraus, channel.dim_out, channel.dim_in)

    sandwich_out = linalg.tensor(g.conj(), g)
    sandwich_in = linalg.tensor(root.conj(), root)
    closed = sandwich_in @ dagger(channel.superop) @ sandwich_out
    gap = frob(recovered.superop - closed)
    if gap > 1e-9 * max(1.0, frob(closed)):
        raise ConsistencyError(
            f"Petz constructions disagree by {gap:.3e} in superoperator norm"
        )
    return recovered


@dataclass(frozen=True)
class CoarseGrainingMap:
    """Measure-and-prepare channel sum_x tr[P_x (.)] sigma_x with prepared
    states sigma_x = gamma^{1/2} P_x gamma^{1/2} / tr[P_x gamma]."""

    channel: Channel
    povm: Povm
    prior: DensityMatrix
    prepared_states: tuple[DensityMatrix, ...]

    @property
    def dim(self) -> int:
        return self.channel.dim_in


def coarse_graining_map(
    povm: Povm, gamma: DensityMatrix, tol: Tolerance = DEFAULT_TOL
) -> CoarseGrainingMap:
    """Coarse-graining map of a POVM relative to a prior."""
    if povm.dim != gamma.dim:
        raise DimensionMismatch(f"POVM dim {povm.dim} != prior dim {gamma.dim}")
    if not gamma.is_invertible(tol):
        raise PriorNotInvertible("prior must be invertible")
    root = linalg.mat_sqrt(gamma.mat, tol)
    d = gamma.dim
    prepared = []
    superop = np.zeros((d**2, d**2), dtype=complex)
    for _, p in povm:
        weight = float(np.trace(p @ gamma.mat).real)
        sigma = hermitize(root @ p @ root) / weight
        prepared.append(DensityMatrix(sigma, tol, validate=False))
        superop += np.outer(vec(sigma), vec(p).conj())
    direct = Channel(superop, d, d)

    meas = measurement_channel(povm)
    composed = channel_compose(petz_map(meas, gamma, tol), meas)
    gap = frob(direct.superop - composed.superop)
    if gap > 1e-9 * max(1.0, frob(direct.superop)):
        raise ConsistencyError(
            f"closed form and Petz∘measurement disagree by {gap:.3e}"
        )
    fixed_gap = frob(direct.apply(gamma.mat) - gamma.mat)
    if fixed_gap > 1e-9:
        raise ConsistencyError(
            f"coarse-graining moves its own prior by {fixed_gap:.3e}"
        )
    return CoarseGrainingMap(
        channel=direct,
        povm=povm,
        prior=gamma,
        prepared_states=tuple(prepared),
    )


def coarse_grain(rho: DensityMatrix, cg: CoarseGrainingMap, tol: Tolerance = DEFAULT_TOL) -> DensityMatrix:
    """The coarse-grained state corresponding to ``rho``."""
    return apply_channel(cg.channel, rho, tol)


def adjoint_coarse_grain_povm(
    cg: CoarseGrainingMap, povm: Povm, tol: Tolerance = DEFAULT_TOL
) -> tuple[Povm, StochasticMap]:
    """Adjoint action of a coarse-graining on a POVM.

    Returns the post-processed POVM together with the stochastic map
    q(y|x) = tr[Q_y sigma_x] realizing it, so that the output is manifestly
    a classical post-processing of ``cg.povm``.
    """
    if povm.dim != cg.dim:
        raise DimensionMismatch(f"POVM dim {povm.dim} != map dim {cg.dim}")
    q = np.empty((len(cg.povm), len(povm)))
    for x, sigma in enumerate(cg.prepared_states):
        for y, (_, element) in enumerate(povm):
            q[x, y] = max(float(np.trace(element @ sigma.mat).real), 0.0)
    q /= q.sum(axis=1, keepdims=True)
    tmap = StochasticMap(q)
    processed = post_process(cg.povm, tmap, tol)

    adj = cg.channel.adjoint()
    for (_, produced), (_, element) in zip(processed, povm):
        direct = hermitize(adj.apply(element))
        if frob(produced - direct) > 1e-9 * max(1.0, frob(direct)):
            raise ConsistencyError(
                "post-processing does not reproduce the adjoint action"
            )
    return processed, tmap


def cesaro_average(channel: Channel, n: int) -> Channel:
    """(1/n) sum_{k=1..n} E^k, computed by repeated superoperator products."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    if channel.dim_in != channel.dim_out:
        raise DimensionMismatch("Cesàro averaging needs an endomorphic channel")
    power = np.eye(channel.superop.shape[0], dtype=complex)
    total = np.zeros_like(power)
    for _ in range(n):
        power = channel.superop @ power
        total += power
    return Channel(total / n, channel.dim_in, channel.dim_out)
