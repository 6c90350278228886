"""Seeded generators for states, measurements, channels, and whole frames.

Frames with a prescribed block structure are built by rotating a direct sum
of within-block POVMs and a block-diagonal full-rank prior by a common
random unitary; the disconnection partition then equals the block split.
"""

import numpy as np

from . import linalg
from .linalg import dagger, hermitize
from .quantum import Channel, DensityMatrix, Povm


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_pure_state(dim: int, rng: np.random.Generator) -> DensityMatrix:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    v /= np.linalg.norm(v)
    return DensityMatrix(np.outer(v, v.conj()), validate=False)


def random_density_matrix(
    dim: int, rng: np.random.Generator, rank: int | None = None
) -> DensityMatrix:
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    m = g @ dagger(g)
    return DensityMatrix(m / np.trace(m).real, validate=False)


def random_povm(dim: int, n_outcomes: int, rng: np.random.Generator) -> Povm:
    """Generic POVM: normalized random PSD operators.  All cross products are
    generically nonzero, so the disconnection partition is a single block."""
    raw = []
    for _ in range(n_outcomes):
        g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        raw.append(g @ dagger(g))
    total = sum(raw)
    whiten = linalg.mat_inv_sqrt(total)
    return Povm([hermitize(whiten @ a @ whiten) for a in raw])


def random_pvm(dim: int, block_sizes: list[int], rng: np.random.Generator) -> Povm:
    """PVM whose elements project onto random orthogonal subspaces of the
    given sizes."""
    if sum(block_sizes) != dim:
        raise ValueError("block sizes must sum to the dimension")
    u = random_unitary(dim, rng)
    elements, start = [], 0
    for size in block_sizes:
        cols = u[:, start : start + size]
        elements.append(cols @ dagger(cols))
        start += size
    return Povm(elements)


def random_block_frame(
    dim: int,
    rng: np.random.Generator,
    block_sizes: list[int] | None = None,
    outcomes_per_block: list[int] | None = None,
) -> tuple[Povm, DensityMatrix]:
    """POVM and invertible prior whose irreducible disconnected partition is
    the prescribed block split (one partition block per subspace block)."""
    if block_sizes is None:
        n_blocks = int(rng.integers(1, dim + 1))
        cuts = sorted(rng.choice(np.arange(1, dim), size=n_blocks - 1, replace=False))
        block_sizes = [b - a for a, b in zip([0, *cuts], [*cuts, dim])]
    if outcomes_per_block is None:
        outcomes_per_block = [int(rng.integers(1, 3)) for _ in block_sizes]
    u = random_unitary(dim, rng)
    elements = []
    prior = np.zeros((dim, dim), dtype=complex)
    start = 0
    for size, n_out in zip(block_sizes, outcomes_per_block):
        cols = u[:, start : start + size]
        if n_out == 1:
            elements.append(cols @ dagger(cols))
        else:
            sub = random_povm(size, n_out, rng)
            for _, e in sub:
                elements.append(cols @ e @ dagger(cols))
        weight = rng.uniform(0.5, 1.5)
        gamma_block = random_density_matrix(size, rng).mat
        prior += weight * (cols @ gamma_block @ dagger(cols))
        start += size
    prior /= np.trace(prior).real
    return Povm(elements), DensityMatrix(prior, validate=False)


def random_channel(
    dim: int, rng: np.random.Generator, kraus_rank: int | None = None
) -> Channel:
    """Exactly CPTP channel from a Haar-ish random isometry."""
    k = dim if kraus_rank is None else kraus_rank
    g = rng.standard_normal((dim * k, dim)) + 1j * rng.standard_normal((dim * k, dim))
    q, _ = np.linalg.qr(g)
    kraus = [q[i * dim : (i + 1) * dim, :] for i in range(k)]
    return Channel.from_kraus(kraus, dim, dim)


def random_unital_channel(
    dim: int, rng: np.random.Generator, n_terms: int = 3
) -> Channel:
    """Random mixture of unitary conjugations (unital and CPTP)."""
    p = rng.dirichlet(np.ones(n_terms))
    kraus = [
        np.sqrt(w) * random_unitary(dim, rng) for w in p
    ]
    return Channel.from_kraus(kraus, dim, dim)
