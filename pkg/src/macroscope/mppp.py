"""Disconnection graphs, irreducible partitions, the maximal projective
post-processing (MPPP), the resource-destroying map, macroscopicity tests,
and fixed-point analysis of coarse-graining superoperators.

The partition of outcome labels is the single most sensitive judgment the
package makes: two outcomes land in the same block iff either P_x P_x' or
P_x gamma P_x' fails the scale-aware zero test.  The relative tolerance of
that test can be overridden (CLI ``--tol``) to audit borderline frames.
"""

from dataclasses import dataclass

import numpy as np

from .entropy import EntropyValue, observational_deficit
from .errors import (
    ConsistencyError,
    PriorNotInvertible,
    TheoremViolation,
    TooManyOutcomes,
)
from .linalg import DEFAULT_TOL, Tolerance, dagger, frob, hermitize, unvec, vec
from .quantum import (
    Channel,
    DensityMatrix,
    LinearMap,
    Povm,
    is_pvm,
)
from .retrodiction import CoarseGrainingMap, coarse_graining_map


@dataclass(frozen=True)
class Partition:
    """Disjoint blocks of POVM outcome labels, canonically ordered."""

    blocks: tuple[tuple, ...]

    def __len__(self):
        return len(self.blocks)

    def refines(self, other: "Partition") -> bool:
        """True if every block of self lies inside a block of other."""
        lookup = {}
        for i, block in enumerate(other.blocks):
            for label in block:
                lookup[label] = i
        for block in self.blocks:
            owners = {lookup.get(label) for label in block}
            if len(owners) != 1 or None in owners:
                return False
        return True


def _canonical_partition(groups: list[list], label_order: list) -> Partition:
    rank = {label: i for i, label in enumerate(label_order)}
    blocks = [tuple(sorted(g, key=rank.__getitem__)) for g in groups]
    blocks.sort(key=lambda b: rank[b[0]])
    return Partition(tuple(blocks))


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:  # path compression
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


@dataclass(frozen=True)
class DisconnectionGraph:
    """Adjacency structure on the nonzero POVM outcomes."""

    labels: tuple
    edges: frozenset


def _pair_connected(px, px2, gamma_mat, zero_tol: float, tol: Tolerance) -> bool:
    scale_pp = frob(px) * frob(px2)
    scale_pgp = scale_pp * frob(gamma_mat)
    thresh_pp = tol.abs_eps + zero_tol * scale_pp
    thresh_pgp = tol.abs_eps + zero_tol * scale_pgp
    if frob(px @ px2) > thresh_pp:
        return True
    return frob(px @ gamma_mat @ px2) > thresh_pgp


def disconnection_graph(
    povm: Povm,
    gamma: DensityMatrix,
    tol: Tolerance = DEFAULT_TOL,
    zero_tol: float | None = None,
) -> DisconnectionGraph:
    """Edge (x, x') present iff P_x P_x' or P_x gamma P_x' is nonzero."""
    if not gamma.is_invertible(tol):
        raise PriorNotInvertible("prior must be invertible")
    zero_tol = tol.rel_eps if zero_tol is None else zero_tol
    labels = povm.labels
    edges = set()
    for i in range(len(labels)):
        for j in range(i + 1, len(labels)):
            if _pair_connected(
                povm.elements[i], povm.elements[j], gamma.mat, zero_tol, tol
            ):
                edges.add((labels[i], labels[j]))
    return DisconnectionGraph(labels=labels, edges=frozenset(edges))


@dataclass(frozen=True)
class MacroReport:
    """Outcome of testing the four equivalent macroscopicity conditions."""

    deficit: EntropyValue
    deficit_zero: bool
    cg_fixed: bool
    cg_residual: float
    rdm_fixed: bool
    rdm_residual: float
    coefficients: tuple[float, ...] | None
    fit_residual: float
    verdict: bool


@dataclass(frozen=True)
class InferentialFrame:
    """A (POVM, prior) pair with everything derived from it: the irreducible
    disconnected partition, the MPPP, the coarse-graining map and the
    resource-destroying map."""

    povm: Povm
    prior: DensityMatrix
    partition: Partition
    mppp: Povm
    cg: CoarseGrainingMap
    rdm: Channel

    @property
    def dim(self) -> int:
        return self.prior.dim

    @property
    def n_blocks(self) -> int:
        return len(self.partition)

    def block_weights(self) -> np.ndarray:
        """tr[Pi_y gamma] per block."""
        return np.array(
            [np.trace(e @ self.prior.mat).real for _, e in self.mppp]
        )

    def extreme_free_states(self, tol: Tolerance = DEFAULT_TOL) -> tuple[DensityMatrix, ...]:
        """Pi_y gamma / tr[Pi_y gamma], the extreme points of the free set."""
        states = []
        for (_, pi), w in zip(self.mppp, self.block_weights()):
            states.append(DensityMatrix(hermitize(pi @ self.prior.mat) / w, tol, validate=False))
        return tuple(states)


def resource_destroying_map(
    mppp: Povm,
    gamma: DensityMatrix,
    tol: Tolerance = DEFAULT_TOL,
    idem_atol: float = 1e-8,
    prior_atol: float = 1e-9,
) -> Channel:
    """Idempotent channel sum_y tr[Pi_y (.)] Pi_y gamma / tr[Pi_y gamma]."""
    d = gamma.dim
    superop = np.zeros((d**2, d**2), dtype=complex)
    for _, pi in mppp:
        weight = float(np.trace(pi @ gamma.mat).real)
        block = hermitize(pi @ gamma.mat) / weight
        superop += np.outer(vec(block), vec(pi).conj())
    delta = Channel(superop, d, d)
    idem = frob(delta.superop @ delta.superop - delta.superop)
    if idem > idem_atol:
        raise ConsistencyError(f"resource-destroying map not idempotent: {idem:.3e}")
    if frob(delta.apply(gamma.mat) - gamma.mat) > prior_atol:
        raise ConsistencyError("resource-destroying map moves the prior")
    return delta


def compute_mppp(
    povm: Povm,
    gamma: DensityMatrix,
    tol: Tolerance = DEFAULT_TOL,
    zero_tol: float | None = None,
) -> InferentialFrame:
    """Build the inferential frame of (POVM, prior).

    The irreducible gamma-disconnected partition is the connected-component
    partition of the disconnection graph; summing POVM elements over each
    block yields the MPPP, a PVM commuting with the prior.

    An overridden ``zero_tol`` relaxes the derived-frame validations by the
    same amount: declaring larger cross terms to be zero and still demanding
    1e-9-level projectivity would be self-contradictory.
    """
    graph = disconnection_graph(povm, gamma, tol, zero_tol)
    uf = _UnionFind(graph.labels)
    for a, b in graph.edges:
        uf.union(a, b)
    groups: dict = {}
    for label in graph.labels:
        groups.setdefault(uf.find(label), []).append(label)
    partition = _canonical_partition(list(groups.values()), list(graph.labels))

    slack = max(tol.rel_eps, zero_tol or 0.0)
    vtol = Tolerance(abs_eps=tol.abs_eps, rel_eps=slack, rank_eps=tol.rank_eps)
    index = {label: i for i, label in enumerate(povm.labels)}
    elements = [
        sum(povm.elements[index[x]] for x in block) for block in partition.blocks
    ]
    mppp = Povm(elements, labels=range(len(elements)), tol=tol)
    if not is_pvm(mppp, vtol):
        raise ConsistencyError("block sums of the POVM failed the PVM check")
    for y, (_, pi) in enumerate(mppp):
        comm = pi @ gamma.mat - gamma.mat @ pi
        if frob(comm) > max(1e-9, slack * frob(pi) * frob(gamma.mat)):
            raise ConsistencyError(
                f"MPPP element {y} does not commute with the prior: {frob(comm):.3e}"
            )
    cg = coarse_graining_map(povm, gamma, tol)
    delta = resource_destroying_map(
        mppp, gamma, tol,
        idem_atol=max(1e-8, slack), prior_atol=max(1e-9, slack),
    )
    return InferentialFrame(
        povm=povm, prior=gamma, partition=partition, mppp=mppp, cg=cg, rdm=delta
    )


def _set_partitions(items: list):
    """All set partitions, by recursive block assignment."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for sub in _set_partitions(rest):
        for i in range(len(sub)):
            yield sub[:i] + [[first] + sub[i]] + sub[i + 1 :]
        yield [[first]] + sub


def brute_force_mppp(
    povm: Povm,
    gamma: DensityMatrix,
    tol: Tolerance = DEFAULT_TOL,
    zero_tol: float | None = None,
) -> Partition:
    """Oracle for :func:`compute_mppp`: enumerate all set partitions of the
    outcomes, keep the gamma-disconnected ones, and return the finest.

    Also verifies that the finest one refines every other disconnected
    partition found, which is what maximality of the MPPP asserts.
    """
    if len(povm) > 9:
        raise TooManyOutcomes(
            f"{len(povm)} outcomes: Bell-number enumeration refused"
        )
    if not gamma.is_invertible(tol):
        raise PriorNotInvertible("prior must be invertible")
    zero_tol = tol.rel_eps if zero_tol is None else zero_tol
    labels = list(povm.labels)
    n = len(labels)
    connected = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for j in range(i + 1, n):
            connected[i, j] = connected[j, i] = _pair_connected(
                povm.elements[i], povm.elements[j], gamma.mat, zero_tol, tol
            )

    def disconnected(blocks: list[list[int]]) -> bool:
        for bi in range(len(blocks)):
            for bj in range(bi + 1, len(blocks)):
                for x in blocks[bi]:
                    for x2 in blocks[bj]:
                        if connected[x, x2]:
                            return False
        return True

    found = [
        _canonical_partition([[labels[i] for i in blk] for blk in blocks], labels)
        for blocks in _set_partitions(list(range(n)))
        if disconnected(blocks)
    ]
    finest = max(found, key=len)
    ties = [p for p in found if len(p) == len(finest)]
    if len(ties) != 1:
        raise ConsistencyError("finest disconnected partition is not unique")
    for other in found:
        if not finest.refines(other):
            raise ConsistencyError(
                "finest disconnected partition fails to refine another one"
            )
    return finest


def fit_free_coefficients(
    rho: DensityMatrix, frame: InferentialFrame
) -> tuple[np.ndarray, float]:
    """Least-squares fit of rho against the blocks {Pi_y gamma}.

    The blocks are mutually orthogonal, so the fit is a per-block
    projection: c_y = <Pi_y gamma, rho> / ||Pi_y gamma||².
    """
    coeffs = []
    approx = np.zeros_like(rho.mat)
    for _, pi in frame.mppp:
        block = hermitize(pi @ frame.prior.mat)
        c = float(np.trace(dagger(block) @ rho.mat).real / np.trace(dagger(block) @ block).real)
        coeffs.append(c)
        approx = approx + c * block
    return np.array(coeffs), frob(rho.mat - approx)


DEFICIT_ATOL = 1e-8
FIXED_POINT_ATOL = 1e-6
COEFF_ATOL = 1e-9


def macro_test(rho: DensityMatrix, frame: InferentialFrame, tol: Tolerance = DEFAULT_TOL) -> MacroReport:
    """Evaluate all four equivalent macroscopicity conditions and demand
    consensus.

    I   zero observational deficit,
    II  fixed point of the coarse-graining map,
    III fixed point of the resource-destroying map,
    IV  nonnegative decomposition over the blocks {Pi_y gamma}.

    Disagreement between the conditions is not a verdict — it raises, since
    it can only come from a tolerance or implementation bug.
    """
    deficit = observational_deficit(rho, frame.prior, frame.povm, tol)
    deficit_zero = deficit.finite and abs(deficit.value) <= DEFICIT_ATOL

    cg_residual = frob(frame.cg.channel.apply(rho.mat) - rho.mat)
    cg_fixed = cg_residual <= FIXED_POINT_ATOL * max(1.0, frob(rho.mat))

    rdm_residual = frob(frame.rdm.apply(rho.mat) - rho.mat)
    rdm_fixed = rdm_residual <= FIXED_POINT_ATOL * max(1.0, frob(rho.mat))

    coeffs, fit_residual = fit_free_coefficients(rho, frame)
    fit_ok = fit_residual <= FIXED_POINT_ATOL and coeffs.min() >= -COEFF_ATOL

    flags = [deficit_zero, cg_fixed, rdm_fixed, fit_ok]
    if len(set(flags)) != 1:
        raise TheoremViolation(
            "macroscopicity conditions disagree: "
            f"deficit={deficit.as_float():.3e}, cg={cg_residual:.3e}, "
            f"rdm={rdm_residual:.3e}, fit={fit_residual:.3e}"
        )
    return MacroReport(
        deficit=deficit,
        deficit_zero=deficit_zero,
        cg_fixed=cg_fixed,
        cg_residual=cg_residual,
        rdm_fixed=rdm_fixed,
        rdm_residual=rdm_residual,
        coefficients=tuple(coeffs),
        fit_residual=fit_residual,
        verdict=all(flags),
    )


def fixed_point_space_dim(emap: LinearMap, atol: float = 1e-6) -> int:
    """Dimension of the eigenvalue-1 eigenspace of the superoperator.

    Eigenvalues within ``atol`` of 1 are counted; each corresponding
    eigenvector is validated as an actual fixed point.
    """
    w, v = np.linalg.eig(emap.superop)
    count = 0
    for lam, col in zip(w, v.T):
        if abs(lam - 1.0) <= atol:
            fixed = unvec(col, emap.dim_out)
            residual = frob(emap.apply(fixed) - fixed)
            if residual > atol * max(1.0, frob(fixed)):
                raise ConsistencyError(
                    f"eigenvalue {lam:.9f} within tolerance of 1 but residual "
                    f"{residual:.3e}"
                )
            count += 1
    return count


def frame_payload(frame: InferentialFrame) -> dict:
    """JSON-ready dump: partition blocks, MPPP, and the RDM Choi matrix."""
    from .io import matrix_to_json, povm_to_json

    return {
        "partition": [list(block) for block in frame.partition.blocks],
        "mppp": povm_to_json(frame.mppp),
        "rdm_choi": matrix_to_json(frame.rdm.choi),
    }
