"""Bipartite structures: locally macroscopic states, observational discord
and its vanishing conditions, and the relative entropy of local
microscopicity (upper bound plus a best-effort convex minimizer).

Only product priors gamma_A ⊗ gamma_B are supported; the characterization
of locally macroscopic states is not established beyond them, so non-product
priors are rejected rather than silently computed with.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .entropy import EntropyValue, mutual_information, relative_entropy
from .errors import (
    DimensionMismatch,
    MarginalNotInvertible,
    TheoremViolation,
)
from .linalg import DEFAULT_TOL, Tolerance, dagger, frob, hermitize
from .mppp import FIXED_POINT_ATOL, InferentialFrame, MacroReport, compute_mppp
from .quantum import (
    Channel,
    DensityMatrix,
    Povm,
    apply_channel,
    channel_tensor_identity,
    measurement_channel,
)
from .resources import COMMUTATION_ATOL, _log_gradient

LOCAL_DIVERGENCE_ATOL = 1e-7
DISCORD_ATOL = 1e-8


@dataclass(frozen=True)
class LocalFrame:
    """An inferential frame on subsystem A, extended by the identity on B."""

    frame_a: InferentialFrame
    dim_b: int
    gamma_b: DensityMatrix
    local_measure: Channel
    local_cg: Channel
    local_rdm: Channel

    @staticmethod
    def of(
        frame_a: InferentialFrame,
        dim_b: int,
        gamma_b: DensityMatrix | None = None,
        tol: Tolerance = DEFAULT_TOL,
    ) -> "LocalFrame":
        from .quantum import maximally_mixed

        gamma_b = maximally_mixed(dim_b, tol) if gamma_b is None else gamma_b
        if gamma_b.dim != dim_b:
            raise DimensionMismatch(f"gamma_B dim {gamma_b.dim} != {dim_b}")
        local_rdm = channel_tensor_identity(frame_a.rdm, dim_b)
        idem = frob(local_rdm.superop @ local_rdm.superop - local_rdm.superop)
        if idem > 1e-8:
            raise TheoremViolation(f"local RDM lost idempotence: {idem:.3e}")
        return LocalFrame(
            frame_a=frame_a,
            dim_b=dim_b,
            gamma_b=gamma_b,
            local_measure=channel_tensor_identity(
                measurement_channel(frame_a.povm), dim_b
            ),
            local_cg=channel_tensor_identity(frame_a.cg.channel, dim_b),
            local_rdm=local_rdm,
        )

    @property
    def dims(self) -> tuple[int, int]:
        return (self.frame_a.dim, self.dim_b)

    def prior_ab(self, tol: Tolerance = DEFAULT_TOL) -> DensityMatrix:
        return DensityMatrix(
            linalg.tensor(self.frame_a.prior.mat, self.gamma_b.mat),
            tol,
            validate=False,
        )


def _traced_against(op_ab: np.ndarray, k_a: np.ndarray, dims: tuple[int, int]) -> np.ndarray:
    """Tr_A[(K ⊗ 1) M] for a bipartite operator M."""
    da, db = dims
    t = op_ab.reshape(da, db, da, db)
    return np.einsum("ij,jaib->ab", k_a, t)


def _block_decomposition_fit(
    rho_ab: np.ndarray, frame_a: InferentialFrame, dims: tuple[int, int]
) -> tuple[list[np.ndarray], float]:
    """Least-squares fit of rho_AB against sum_y (Pi_y gamma_A) ⊗ R_y.

    The A-blocks are orthogonal, so each R_y is an independent projection.
    """
    parts = []
    approx = np.zeros_like(rho_ab)
    for _, pi in frame_a.mppp:
        block = hermitize(pi @ frame_a.prior.mat)
        weight = float(np.trace(dagger(block) @ block).real)
        r = _traced_against(rho_ab, dagger(block), dims) / weight
        parts.append(r)
        approx = approx + linalg.tensor(block, r)
    return parts, frob(rho_ab - approx)


def locally_macro_test(
    rho_ab: DensityMatrix,
    local: LocalFrame,
    tol: Tolerance = DEFAULT_TOL,
    divergence_atol: float = LOCAL_DIVERGENCE_ATOL,
) -> MacroReport:
    """Test the four equivalent conditions for rho_AB to be locally
    macroscopic with respect to (P_A, gamma_A ⊗ gamma_B):

    1. measuring A loses no divergence against the prior,
    2. rho_AB is fixed by C ⊗ 1,
    3. rho_AB is fixed by Delta ⊗ 1,
    4. rho_AB decomposes over the blocks (Pi_y gamma_A) ⊗ (.).
    """
    dims = local.dims
    if rho_ab.dim != dims[0] * dims[1]:
        raise DimensionMismatch(
            f"state of dim {rho_ab.dim} does not factor as {dims[0]}x{dims[1]}"
        )
    prior = local.prior_ab(tol)
    full = relative_entropy(rho_ab, prior, tol)
    measured_rho = apply_channel(local.local_measure, rho_ab, tol)
    measured_prior = apply_channel(local.local_measure, prior, tol)
    measured = relative_entropy(measured_rho, measured_prior, tol)
    if full.finite:
        gap = EntropyValue(full.value - measured.as_float())
        gap_zero = abs(gap.value) <= divergence_atol
    else:
        gap = EntropyValue.infinite()
        gap_zero = False

    cg_residual = frob(local.local_cg.apply(rho_ab.mat) - rho_ab.mat)
    cg_fixed = cg_residual <= FIXED_POINT_ATOL * max(1.0, frob(rho_ab.mat))
    rdm_residual = frob(local.local_rdm.apply(rho_ab.mat) - rho_ab.mat)
    rdm_fixed = rdm_residual <= FIXED_POINT_ATOL * max(1.0, frob(rho_ab.mat))
    _, fit_residual = _block_decomposition_fit(rho_ab.mat, local.frame_a, dims)
    fit_ok = fit_residual <= FIXED_POINT_ATOL

    flags = [gap_zero, cg_fixed, rdm_fixed, fit_ok]
    if len(set(flags)) != 1:
        raise TheoremViolation(
            "locally-macroscopic conditions disagree: "
            f"gap={gap.as_float():.3e}, cg={cg_residual:.3e}, "
            f"rdm={rdm_residual:.3e}, fit={fit_residual:.3e}"
        )
    return MacroReport(
        deficit=gap,
        deficit_zero=gap_zero,
        cg_fixed=cg_fixed,
        cg_residual=cg_residual,
        rdm_fixed=rdm_fixed,
        rdm_residual=rdm_residual,
        coefficients=None,
        fit_residual=fit_residual,
        verdict=all(flags),
    )


@dataclass(frozen=True)
class DiscordReport:
    """Observational discord and, when the A-marginal is invertible, the
    vanishing-condition analysis."""

    total_mi: EntropyValue
    measured_mi: EntropyValue
    discord: EntropyValue
    vanishing: bool | None
    structure: MacroReport | None


def observational_discord(
    rho_ab: DensityMatrix,
    povm_a: Povm,
    dims: tuple[int, int],
    tol: Tolerance = DEFAULT_TOL,
) -> DiscordReport:
    """Mutual information lost by reading A through a fixed POVM:
    I(A;B) - I(X;B) with X the classical record of the measurement.

    The prior is the product of the marginals.  When the A-marginal is
    invertible, the four equivalent vanishing conditions are evaluated too.
    """
    da, db = dims
    if rho_ab.dim != da * db:
        raise DimensionMismatch(
            f"state of dim {rho_ab.dim} does not factor as {da}x{db}"
        )
    if povm_a.dim != da:
        raise DimensionMismatch(f"POVM dim {povm_a.dim} != A dim {da}")
    total = mutual_information(rho_ab, dims, tol)
    measure = channel_tensor_identity(measurement_channel(povm_a), db)
    omega = apply_channel(measure, rho_ab, tol)
    measured = mutual_information(omega, (len(povm_a), db), tol)
    discord = EntropyValue(total.as_float() - measured.as_float())

    rho_a = DensityMatrix(
        linalg.partial_trace(rho_ab.mat, dims, keep="A"), tol, validate=False
    )
    if rho_a.is_invertible(tol):
        structure = discord_vanishing_test(rho_ab, povm_a, dims, tol)
        return DiscordReport(
            total_mi=total,
            measured_mi=measured,
            discord=discord,
            vanishing=structure.verdict,
            structure=structure,
        )
    return DiscordReport(
        total_mi=total,
        measured_mi=measured,
        discord=discord,
        vanishing=None,
        structure=None,
    )


def discord_vanishing_test(
    rho_ab: DensityMatrix,
    povm_a: Povm,
    dims: tuple[int, int],
    tol: Tolerance = DEFAULT_TOL,
) -> MacroReport:
    """Four equivalent conditions for zero observational discord, built on
    the frame of (P_A, rho_A) with the product-of-marginals prior."""
    da, db = dims
    if rho_ab.dim != da * db:
        raise DimensionMismatch(
            f"state of dim {rho_ab.dim} does not factor as {da}x{db}"
        )
    rho_a = DensityMatrix(
        linalg.partial_trace(rho_ab.mat, dims, keep="A"), tol, validate=False
    )
    if not rho_a.is_invertible(tol):
        raise MarginalNotInvertible(
            "A-marginal is singular; the vanishing analysis needs it full rank"
        )
    rho_b = DensityMatrix(
        linalg.partial_trace(rho_ab.mat, dims, keep="B"), tol, validate=False
    )
    frame = compute_mppp(povm_a, rho_a, tol)
    local = LocalFrame.of(frame, db, gamma_b=rho_b, tol=tol)
    return locally_macro_test(rho_ab, local, tol, divergence_atol=DISCORD_ATOL)


@dataclass(frozen=True)
class LocalMicroBound:
    """Closed-form upper bound on the relative entropy of local
    microscopicity, plus the best value a convex minimizer found."""

    bound: EntropyValue
    best_found: float
    iterations: int
    improved: bool


def rel_ent_local_micro_upper(
    rho_ab: DensityMatrix,
    local: LocalFrame,
    iterations: int = 10_000,
    step: float = 0.1,
    tol: Tolerance = DEFAULT_TOL,
) -> LocalMicroBound:
    """Upper bound D(rho_AB || (Delta ⊗ 1) rho_AB) on the distance from the
    locally macroscopic set.

    A best-effort alternating exponentiated-gradient minimizer over states
    sum_y p_y (Pi_y gamma_A / t_y) ⊗ tau_y reports its best value alongside;
    the bound is never overridden.  Whether the two coincide in general is
    an open question, so no equality is asserted.
    """
    dims = local.dims
    da, db = dims
    if rho_ab.dim != da * db:
        raise DimensionMismatch(
            f"state of dim {rho_ab.dim} does not factor as {da}x{db}"
        )
    destroyed = apply_channel(local.local_rdm, rho_ab, tol)
    bound = relative_entropy(rho_ab, destroyed, tol)

    frame = local.frame_a
    sigmas = [s.mat for s in frame.extreme_free_states(tol)]
    k = len(sigmas)
    # warm start from the block structure of the destroyed state
    p = np.array(
        [max(np.trace(linalg.tensor(pi, np.eye(db)) @ rho_ab.mat).real, 1e-12)
         for _, pi in frame.mppp]
    )
    p /= p.sum()
    taus = []
    for _, pi in frame.mppp:
        block = hermitize(_traced_against(rho_ab.mat, pi, dims))
        trace = np.trace(block).real
        taus.append(block / trace if trace > 1e-12 else np.eye(db) / db)

    best = bound.as_float()
    improved = False
    if not bound.finite:
        return LocalMicroBound(bound=bound, best_found=best, iterations=0, improved=False)

    for _ in range(iterations):
        sigma_ab = sum(
            w * linalg.tensor(s, t) for w, s, t in zip(p, sigmas, taus)
        )
        grad_sigma = _log_gradient(rho_ab.mat, sigma_ab, tol)
        value = relative_entropy(
            rho_ab, DensityMatrix(sigma_ab, tol, validate=False), tol
        ).as_float()
        if value < best - 1e-12:
            best, improved = value, True
        grad_p = -np.array(
            [np.trace(grad_sigma @ linalg.tensor(s, t)).real
             for s, t in zip(sigmas, taus)]
        )
        p = p * np.exp(-step * grad_p)
        p /= p.sum()
        new_taus = []
        for w, s, t in zip(p, sigmas, taus):
            grad_t = -w * hermitize(_traced_against(grad_sigma, dagger(s), dims))
            logt = linalg.mat_log2(t + 1e-14 * np.eye(db), tol)
            updated = linalg.hermitian_eig(logt - step * grad_t, tol)
            exps = np.exp2(updated.eigenvalues - updated.eigenvalues.max())
            mat = (updated.eigenvectors * exps) @ dagger(updated.eigenvectors)
            new_taus.append(hermitize(mat) / np.trace(mat).real)
        taus = new_taus
    return LocalMicroBound(
        bound=bound, best_found=min(best, bound.as_float()),
        iterations=iterations, improved=improved,
    )


def classify_local_channel(
    channel: Channel, local: LocalFrame, tol: Tolerance = DEFAULT_TOL
):
    """LCCO/LRCO/LMNO classification against the local maps C ⊗ 1 and
    Delta ⊗ 1; membership booleans reuse the single-system thresholds."""
    from .resources import ChannelClassification

    d = local.dims[0] * local.dims[1]
    if channel.dim_in != d or channel.dim_out != d:
        raise DimensionMismatch("channel must be endomorphic on A ⊗ B")
    s_e = channel.superop
    s_c = local.local_cg.superop
    s_d = local.local_rdm.superop
    cco_residual = frob(s_e @ s_c - s_c @ s_e)
    rco_residual = frob(s_e @ s_d - s_d @ s_e)

    db = local.dim_b
    eye = np.eye(db)
    spanning_b = []
    for b in range(db):
        v = eye[:, b]
        spanning_b.append(np.outer(v, v.conj()))
        for b2 in range(b + 1, db):
            plus = (eye[:, b] + eye[:, b2]) / np.sqrt(2)
            plusi = (eye[:, b] + 1j * eye[:, b2]) / np.sqrt(2)
            spanning_b.append(np.outer(plus, plus.conj()))
            spanning_b.append(np.outer(plusi, plusi.conj()))
    mno_residual = 0.0
    for sigma in local.frame_a.extreme_free_states(tol):
        for tau in spanning_b:
            out = channel.apply(linalg.tensor(sigma.mat, tau))
            mno_residual = max(
                mno_residual, frob(local.local_rdm.apply(out) - out)
            )
    is_cco = cco_residual <= COMMUTATION_ATOL
    is_rco = rco_residual <= COMMUTATION_ATOL
    is_mno = mno_residual <= FIXED_POINT_ATOL
    if (is_cco and not is_rco) or (is_rco and not is_mno):
        raise TheoremViolation(
            "local hierarchy LCCO ⊆ LRCO ⊆ LMNO violated: residuals "
            f"{cco_residual:.3e}/{rco_residual:.3e}/{mno_residual:.3e}"
        )
    return ChannelClassification(
        is_cco=is_cco,
        is_rco=is_rco,
        is_mno=is_mno,
        cco_residual=cco_residual,
        rco_residual=rco_residual,
        mno_residual=mno_residual,
    )
