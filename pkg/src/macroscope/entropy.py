"""Umegaki relative entropy, von Neumann entropy, observational entropy and
deficit, and quantum mutual information.  All values in bits.

Support conditions are explicit: D(rho || sigma) is +infinity exactly when
rho has weight outside the support of sigma, and logarithms are only ever
evaluated on supports, realizing the 0·log 0 = 0 convention.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import (
    DimensionMismatch,
    IndeterminateDifference,
    PriorNotInvertible,
)
from .linalg import DEFAULT_TOL, Tolerance, dagger, hermitize
from .quantum import DensityMatrix, Povm, measure_probabilities


@dataclass(frozen=True)
class EntropyValue:
    """Real value in bits; ``finite=False`` encodes +infinity."""

    value: float
    finite: bool = True

    @staticmethod
    def infinite() -> "EntropyValue":
        return EntropyValue(math.inf, finite=False)

    def as_float(self) -> float:
        return self.value if self.finite else math.inf

    def __float__(self) -> float:
        return self.as_float()


def _eig_state(mat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return np.linalg.eigh(hermitize(mat))


def _entropy_bits(eigenvalues: np.ndarray, cut: float) -> float:
    w = eigenvalues[eigenvalues > cut]
    return float(-(w * np.log2(w)).sum())


def von_neumann_entropy(rho: DensityMatrix, tol: Tolerance = DEFAULT_TOL) -> EntropyValue:
    """S(rho) = -tr[rho log2 rho]."""
    w = rho.eigenvalues()
    cut = tol.rank_eps * max(float(w[-1]), 0.0)
    return EntropyValue(_entropy_bits(w, cut))


def relative_entropy(
    rho: DensityMatrix, sigma: DensityMatrix, tol: Tolerance = DEFAULT_TOL
) -> EntropyValue:
    """Umegaki divergence D(rho || sigma) = tr[rho (log2 rho - log2 sigma)].

    Returns +infinity iff the support of rho is not contained in the
    support of sigma.
    """
    if rho.dim != sigma.dim:
        raise DimensionMismatch(f"dims {rho.dim} != {sigma.dim}")
    ws, vs = _eig_state(sigma.mat)
    cut_s = tol.rank_eps * max(float(ws[-1]), 0.0)
    on_support = ws > cut_s
    if not np.all(on_support):
        kernel = vs[:, ~on_support]
        pker = kernel @ dagger(kernel)
        leak = pker @ rho.mat @ pker
        if not linalg.is_zero(leak, scale=1.0, tol=tol):
            return EntropyValue.infinite()
    log_sigma = (vs[:, on_support] * np.log2(ws[on_support])) @ dagger(vs[:, on_support])
    wr = rho.eigenvalues()
    cut_r = tol.rank_eps * max(float(wr[-1]), 0.0)
    tr_rho_log_rho = -_entropy_bits(wr, cut_r)
    cross = float(np.trace(rho.mat @ log_sigma).real)
    return EntropyValue(tr_rho_log_rho - cross)


def _classical_divergence(p: np.ndarray, q: np.ndarray) -> float:
    mask = p > 0
    if np.any(mask & (q <= 0)):
        return math.inf
    return float((p[mask] * np.log2(p[mask] / q[mask])).sum())


def observational_deficit(
    rho: DensityMatrix,
    gamma: DensityMatrix,
    povm: Povm,
    tol: Tolerance = DEFAULT_TOL,
) -> EntropyValue:
    """Irretrodictability of rho given the prior gamma and measurement:
    D(rho || gamma) - D(measured rho || measured gamma) >= 0.
    """
    if rho.dim != gamma.dim or rho.dim != povm.dim:
        raise DimensionMismatch("state, prior and POVM dims must agree")
    if not gamma.is_invertible(tol):
        raise PriorNotInvertible("prior has numerically vanishing eigenvalues")
    full = relative_entropy(rho, gamma, tol)
    p = measure_probabilities(povm, rho)
    q = measure_probabilities(povm, gamma)
    measured = _classical_divergence(p, q)
    if not full.finite:
        if math.isinf(measured):
            raise IndeterminateDifference(
                "both divergences are infinite; deficit undefined"
            )
        return EntropyValue.infinite()
    return EntropyValue(full.value - measured)


def observational_entropy(
    rho: DensityMatrix, povm: Povm, tol: Tolerance = DEFAULT_TOL
) -> EntropyValue:
    """-sum_x p_x log2(p_x / V_x) with p_x = tr[P_x rho], V_x = tr[P_x].

    Equals S(rho) plus the observational deficit against the uniform prior.
    """
    p = measure_probabilities(povm, rho)
    vols = np.array([np.trace(e).real for _, e in povm])
    mask = p > 0
    return EntropyValue(float(-(p[mask] * np.log2(p[mask] / vols[mask])).sum()))


def mutual_information(
    rho_ab: DensityMatrix, dims: tuple[int, int], tol: Tolerance = DEFAULT_TOL
) -> EntropyValue:
    """I(A;B) = D(rho_AB || rho_A ⊗ rho_B)."""
    da, db = dims
    if rho_ab.dim != da * db:
        raise DimensionMismatch(
            f"state of dim {rho_ab.dim} does not factor as {da}x{db}"
        )
    rho_a = linalg.partial_trace(rho_ab.mat, dims, keep="A")
    rho_b = linalg.partial_trace(rho_ab.mat, dims, keep="B")
    product = DensityMatrix(linalg.tensor(rho_a, rho_b), tol, validate=False)
    return relative_entropy(rho_ab, product, tol)
