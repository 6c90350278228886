"""Resource theory of microscopicity: free states, the relative entropy of
microscopicity, the CCO/RCO/MNO channel hierarchy, and the reduction
scenarios (coherence, athermality/nonuniformity, finite-group asymmetry).
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .entropy import EntropyValue, relative_entropy
from .errors import (
    ConsistencyError,
    DimensionMismatch,
    MpppNotTrivial,
    NontrivialMultiplicity,
    NotARepresentation,
    TheoremViolation,
)
from .linalg import DEFAULT_TOL, Tolerance, dagger, frob, hermitize
from .mppp import FIXED_POINT_ATOL, InferentialFrame, compute_mppp
from .quantum import (
    Channel,
    DensityMatrix,
    Povm,
    apply_channel,
    basis_pvm,
    maximally_mixed,
)

COMMUTATION_ATOL = 1e-7


@dataclass(frozen=True)
class FreeStateSet:
    """The macroscopic states of a frame: the simplex spanned by the
    mutually orthogonal extreme points Pi_y gamma / tr[Pi_y gamma]."""

    frame: InferentialFrame
    extreme_points: tuple[DensityMatrix, ...]

    @staticmethod
    def of(frame: InferentialFrame, tol: Tolerance = DEFAULT_TOL) -> "FreeStateSet":
        points = frame.extreme_free_states(tol)
        for i, a in enumerate(points):
            for b in points[i + 1 :]:
                overlap = abs(np.trace(a.mat @ b.mat).real)
                if overlap > 1e-9:
                    raise ConsistencyError(
                        f"extreme free states overlap by {overlap:.3e}"
                    )
            residual = frob(frame.rdm.apply(a.mat) - a.mat)
            if residual > 1e-8:
                raise ConsistencyError(
                    f"extreme free state moves under the RDM by {residual:.3e}"
                )
        return FreeStateSet(frame=frame, extreme_points=points)

    def mix(self, probabilities) -> DensityMatrix:
        p = np.asarray(probabilities, dtype=float)
        mat = sum(w * s.mat for w, s in zip(p, self.extreme_points))
        return DensityMatrix(mat)


def is_free_state(
    rho: DensityMatrix, free: FreeStateSet, tol: Tolerance = DEFAULT_TOL
) -> bool:
    """Membership via the fixed-point test of the resource-destroying map."""
    if rho.dim != free.frame.dim:
        raise DimensionMismatch(f"dims {rho.dim} != {free.frame.dim}")
    residual = frob(free.frame.rdm.apply(rho.mat) - rho.mat)
    return residual <= FIXED_POINT_ATOL * max(1.0, frob(rho.mat))


def rel_ent_microscopicity(
    rho: DensityMatrix, frame: InferentialFrame, tol: Tolerance = DEFAULT_TOL
) -> EntropyValue:
    """Distance from the free set, D(rho || Delta(rho)); equals the infimum
    of D(rho || sigma) over free sigma."""
    destroyed = apply_channel(frame.rdm, rho, tol)
    return relative_entropy(rho, destroyed, tol)


def _log_gradient(rho_mat: np.ndarray, sigma_mat: np.ndarray, tol: Tolerance) -> np.ndarray:
    """Hermitian gradient of sigma -> tr[rho log2 sigma] at sigma, via the
    Daleckii-Krein divided-difference formula."""
    w, v = np.linalg.eigh(hermitize(sigma_mat))
    cut = tol.rank_eps * max(float(w[-1]), 0.0)
    w = np.clip(w, max(cut, 1e-300), None)
    logw = np.log2(w)
    diff_w = w[:, None] - w[None, :]
    diff_l = logw[:, None] - logw[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        gamma = np.where(np.abs(diff_w) > 1e-14, diff_l / diff_w, 1.0 / (w[:, None] * np.log(2)))
    inner = dagger(v) @ rho_mat @ v
    return hermitize(v @ (gamma * inner) @ dagger(v))


def minimize_divergence_over_simplex(
    rho: DensityMatrix,
    points: tuple[DensityMatrix, ...],
    iterations: int = 10_000,
    step: float = 0.1,
    tol: Tolerance = DEFAULT_TOL,
) -> tuple[float, np.ndarray]:
    """Exponentiated-gradient minimizer of p -> D(rho || sum_y p_y sigma_y).

    Independent confirmation of the closed form D(rho || Delta(rho)); the
    best value found and the final weights are returned.
    """
    k = len(points)
    p = np.full(k, 1.0 / k)
    best = np.inf
    best_p = p.copy()
    for _ in range(iterations):
        sigma = sum(w * s.mat for w, s in zip(p, points))
        grad_sigma = _log_gradient(rho.mat, sigma, tol)
        grad = -np.array(
            [np.trace(grad_sigma @ s.mat).real for s in points]
        )
        value = relative_entropy(
            rho, DensityMatrix(sigma, tol, validate=False), tol
        ).as_float()
        if value < best:
            best, best_p = value, p.copy()
        p = p * np.exp(-step * grad)
        p /= p.sum()
    return best, best_p


@dataclass(frozen=True)
class ChannelClassification:
    """Membership of a channel in the nested free-operation classes."""

    is_cco: bool
    is_rco: bool
    is_mno: bool
    cco_residual: float
    rco_residual: float
    mno_residual: float


def classify_channel(
    channel: Channel, frame: InferentialFrame, tol: Tolerance = DEFAULT_TOL
) -> ChannelClassification:
    """Classify against the frame:

    - CCO: commutes with the coarse-graining map,
    - RCO: commutes with the resource-destroying map,
    - MNO: maps every extreme free state into the free set (enough, by
      convexity and linearity).
    """
    if channel.dim_in != frame.dim or channel.dim_out != frame.dim:
        raise DimensionMismatch("channel must be endomorphic on the frame space")
    s_e = channel.superop
    s_c = frame.cg.channel.superop
    s_d = frame.rdm.superop
    cco_residual = frob(s_e @ s_c - s_c @ s_e)
    rco_residual = frob(s_e @ s_d - s_d @ s_e)
    free = FreeStateSet.of(frame, tol)
    mno_residual = 0.0
    for sigma in free.extreme_points:
        out = hermitize(channel.apply(sigma.mat))
        mno_residual = max(mno_residual, frob(frame.rdm.apply(out) - out))
    is_cco = cco_residual <= COMMUTATION_ATOL
    is_rco = rco_residual <= COMMUTATION_ATOL
    is_mno = mno_residual <= FIXED_POINT_ATOL
    if (is_cco and not is_rco) or (is_rco and not is_mno):
        raise TheoremViolation(
            "hierarchy CCO ⊆ RCO ⊆ MNO violated: "
            f"residuals {cco_residual:.3e}/{rco_residual:.3e}/{mno_residual:.3e}"
        )
    return ChannelClassification(
        is_cco=is_cco,
        is_rco=is_rco,
        is_mno=is_mno,
        cco_residual=cco_residual,
        rco_residual=rco_residual,
        mno_residual=mno_residual,
    )


def scenario_coherence(dim: int, tol: Tolerance = DEFAULT_TOL) -> InferentialFrame:
    """Basis measurement with uniform prior: free states are the diagonal
    states and the RDM is the completely dephasing (pinching) map."""
    if dim < 2:
        raise ValueError("coherence scenario needs dim >= 2")
    frame = compute_mppp(basis_pvm(dim), maximally_mixed(dim, tol), tol)
    if frame.n_blocks != dim:
        raise ConsistencyError("basis measurement did not stay rank-one")
    pinching = np.zeros((dim**2, dim**2), dtype=complex)
    for i in range(dim):
        exx = np.zeros((dim, dim), dtype=complex)
        exx[i, i] = 1.0
        pinching += linalg.tensor(exx.conj(), exx)
    if frob(frame.rdm.superop - pinching) > 1e-8:
        raise ConsistencyError("RDM of the coherence scenario is not the pinching")
    return frame


def gibbs_state(hamiltonian, beta: float, tol: Tolerance = DEFAULT_TOL) -> DensityMatrix:
    """exp(-beta H) / Z via eigendecomposition."""
    eig = linalg.hermitian_eig(hamiltonian, tol)
    w = np.exp(-beta * (eig.eigenvalues - eig.eigenvalues.min()))
    mat = (eig.eigenvectors * w) @ dagger(eig.eigenvectors)
    return DensityMatrix(mat / np.trace(mat).real, tol, validate=False)


def scenario_athermality(
    hamiltonian, beta: float, povm: Povm, tol: Tolerance = DEFAULT_TOL
) -> InferentialFrame:
    """Gibbs prior with a measurement whose MPPP is trivial: the prior is the
    only free state and RCO coincides with MNO.  beta = 0 gives the
    nonuniformity scenario (uniform prior, unital free channels)."""
    gamma = gibbs_state(hamiltonian, beta, tol)
    if povm.dim != gamma.dim:
        raise DimensionMismatch("POVM and Hamiltonian dims differ")
    frame = compute_mppp(povm, gamma, tol)
    if frame.n_blocks != 1:
        raise MpppNotTrivial(
            f"measurement splits into {frame.n_blocks} blocks; the athermality "
            "reduction needs a single block"
        )
    return frame


def _commutant_hermitian_basis(unitaries: list[np.ndarray], tol: Tolerance) -> list[np.ndarray]:
    d = unitaries[0].shape[0]
    eye = np.eye(d)
    rows = [linalg.tensor(eye, u) - linalg.tensor(u.T, eye) for u in unitaries]
    stacked = np.vstack(rows)
    _, svals, vh = np.linalg.svd(stacked)
    svals = np.concatenate([svals, np.zeros(vh.shape[0] - len(svals))])
    kernel = vh[svals <= 1e-10 * max(float(svals[0]), 1.0)].conj()
    mats = [linalg.unvec(row, d) for row in kernel]
    herm = []
    for m in mats:
        herm.append(hermitize(m))
        herm.append(hermitize(1j * m))
    basis, rank = [], 0
    flat = []
    for h in herm:
        candidate = flat + [h.reshape(-1)]
        if np.linalg.matrix_rank(np.array(candidate), tol=1e-8) > rank:
            flat = candidate
            basis.append(h)
            rank += 1
    if rank != len(mats):
        raise ConsistencyError("commutant is not closed under adjoints")
    return basis


def scenario_asymmetry(
    unitaries, seed: int = 0, tol: Tolerance = DEFAULT_TOL
) -> InferentialFrame:
    """Frame whose RDM is the group twirl of a finite multiplicity-free
    unitary representation.

    The blocks of the MPPP are the isotypic projectors, recovered as the
    spectral projectors of a generic element of the (abelian) commutant.
    """
    mats = [linalg.as_square(u, "unitary") for u in unitaries]
    d = mats[0].shape[0]
    eye = np.eye(d)
    for i, u in enumerate(mats):
        if u.shape[0] != d:
            raise DimensionMismatch("representation matrices have mixed dims")
        if frob(dagger(u) @ u - eye) > 1e-8:
            raise NotARepresentation(f"matrix {i} is not unitary")
    if not any(frob(u - eye) <= 1e-8 for u in mats):
        raise NotARepresentation("the identity is missing from the group")
    for a in mats:
        for b in mats:
            prod = a @ b
            if not any(frob(prod - c) <= 1e-8 for c in mats):
                raise NotARepresentation("set is not closed under products")

    basis = _commutant_hermitian_basis(mats, tol)
    for i, a in enumerate(basis):
        for b in basis[i + 1 :]:
            if frob(a @ b - b @ a) > 1e-8:
                raise NontrivialMultiplicity(
                    "commutant is non-abelian: some irrep repeats"
                )

    rng = np.random.default_rng(seed)
    generic = sum(c * h for c, h in zip(rng.standard_normal(len(basis)), basis))
    w, v = np.linalg.eigh(hermitize(generic))
    scale = max(float(np.abs(w).max()), 1.0)
    projectors, start = [], 0
    for i in range(1, d + 1):
        if i == d or w[i] - w[i - 1] > 1e-6 * scale:
            cols = v[:, start:i]
            projectors.append(hermitize(cols @ dagger(cols)))
            start = i
    if len(projectors) != len(basis):
        raise NontrivialMultiplicity(
            f"found {len(projectors)} isotypic blocks for a commutant of "
            f"dimension {len(basis)}"
        )

    frame = compute_mppp(Povm(projectors, tol=tol), maximally_mixed(d, tol), tol)
    twirl = sum(linalg.tensor(u.conj(), u) for u in mats) / len(mats)
    if frob(frame.rdm.superop - twirl) > 1e-8:
        raise ConsistencyError("frame RDM does not reproduce the group twirl")
    return frame
