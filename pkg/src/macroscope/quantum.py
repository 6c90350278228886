"""Quantum objects and their validation: density matrices, POVMs with the
post-processing preorder, and channels carried in both Choi and
superoperator form.

Vectorization is column-stacking throughout, so the superoperator of
``X -> A X B`` is ``B.T (kron) A`` and the superoperator of a Kraus family
``{K}`` is ``sum_K conj(K) (kron) K``.
"""

import warnings

import numpy as np

from . import linalg
from .errors import (
    DimensionMismatch,
    InvalidPovm,
    InvalidStochasticMap,
    NotPSD,
    PreconditionViolated,
)
from .linalg import DEFAULT_TOL, Tolerance, dagger, frob, hermitize, is_zero, unvec, vec


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.flags.writeable = False
    return arr


class DensityMatrix:
    """Hermitian, PSD, unit-trace operator."""

    __slots__ = ("mat", "dim")

    def __init__(self, mat, tol: Tolerance = DEFAULT_TOL, validate: bool = True):
        m = linalg.as_square(mat, "density matrix")
        if validate:
            eig = linalg.hermitian_eig(m, tol)
            if eig.eigenvalues[0] < -tol.rank_eps:
                raise NotPSD(
                    f"state has negative eigenvalue {eig.eigenvalues[0]:.3e}"
                )
            tr = float(np.trace(m).real)
            if abs(tr - 1.0) > 1e-10:
                raise ValueError(f"state trace is {tr!r}, not 1")
        self.mat = _freeze(hermitize(m))
        self.dim = m.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.mat)

    def is_invertible(self, tol: Tolerance = DEFAULT_TOL) -> bool:
        w = self.eigenvalues()
        return bool(w[0] > tol.rank_eps * max(float(w[-1]), 0.0))

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim})"


class ClassicalState(DensityMatrix):
    """State diagonal in the fixed outcome basis."""

    def __init__(self, mat, tol: Tolerance = DEFAULT_TOL):
        super().__init__(mat, tol)
        off = self.mat - np.diag(np.diag(self.mat))
        if frob(off) > tol.abs_eps:
            raise ValueError(
                f"state has off-diagonal weight {frob(off):.3e} in the outcome basis"
            )

    def probabilities(self) -> np.ndarray:
        return np.diag(self.mat).real.copy()


def maximally_mixed(dim: int, tol: Tolerance = DEFAULT_TOL) -> DensityMatrix:
    return DensityMatrix(np.eye(dim) / dim, tol, validate=False)


class Povm:
    """Labeled family of PSD operators summing to the identity.

    Elements with negligible norm are pruned at construction (with a
    warning) so that downstream maps never divide by a vanishing
    outcome probability.
    """

    __slots__ = ("labels", "elements", "dim")

    def __init__(self, elements, labels=None, tol: Tolerance = DEFAULT_TOL):
        mats = [linalg.as_square(e, f"POVM element {i}") for i, e in enumerate(elements)]
        if not mats:
            raise InvalidPovm("POVM must have at least one element")
        dim = mats[0].shape[0]
        if labels is None:
            labels = list(range(len(mats)))
        labels = list(labels)
        if len(labels) != len(mats):
            raise InvalidPovm(
                f"{len(labels)} labels for {len(mats)} elements"
            )
        if len(set(labels)) != len(labels):
            raise InvalidPovm("labels must be distinct")

        kept_labels, kept = [], []
        for lab, m in zip(labels, mats):
            if m.shape[0] != dim:
                raise DimensionMismatch("POVM elements have mixed dimensions")
            if frob(m) <= tol.rank_eps:
                warnings.warn(f"pruning zero POVM element {lab!r}", stacklevel=2)
                continue
            eig = linalg.hermitian_eig(m, tol)
            if eig.eigenvalues[0] < -tol.rank_eps * max(float(eig.eigenvalues[-1]), 1.0):
                raise InvalidPovm(
                    f"element {lab!r} has negative eigenvalue {eig.eigenvalues[0]:.3e}"
                )
            kept_labels.append(lab)
            kept.append(hermitize(m))
        if not kept:
            raise InvalidPovm("all POVM elements were pruned as zero")
        total = sum(kept)
        if frob(total - np.eye(dim)) > 1e-9:
            raise InvalidPovm(
                f"elements sum to identity only within {frob(total - np.eye(dim)):.3e}"
            )
        self.labels = tuple(kept_labels)
        self.elements = tuple(_freeze(m) for m in kept)
        self.dim = dim

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(zip(self.labels, self.elements))

    def index_of(self, label) -> int:
        return self.labels.index(label)

    def __repr__(self):
        return f"Povm(dim={self.dim}, outcomes={list(self.labels)})"


def basis_pvm(dim: int) -> Povm:
    """Rank-one projective measurement in the computational basis."""
    eye = np.eye(dim)
    return Povm([np.outer(eye[i], eye[i]) for i in range(dim)])


class StochasticMap:
    """Row-stochastic conditional probability matrix p(y|x), rows indexed by x."""

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        m = np.array(matrix, dtype=float)
        if m.ndim != 2:
            raise InvalidStochasticMap(f"expected a 2-D matrix, got shape {m.shape}")
        if np.any(m < -1e-12) or np.any(m > 1 + 1e-12):
            raise InvalidStochasticMap("entries must lie in [0, 1]")
        rows = m.sum(axis=1)
        if np.any(np.abs(rows - 1.0) > 1e-12):
            raise InvalidStochasticMap(
                f"row sums deviate from 1 by up to {np.abs(rows - 1.0).max():.3e}"
            )
        m = np.clip(m, 0.0, 1.0)
        m.flags.writeable = False
        self.matrix = m

    @property
    def n_in(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_out(self) -> int:
        return self.matrix.shape[1]

    def compose(self, then: "StochasticMap") -> "StochasticMap":
        """First self, then ``then``: p(z|x) = sum_y then(z|y) self(y|x)."""
        return StochasticMap(self.matrix @ then.matrix)


# ---------------------------------------------------------------------------
# Superoperator / Choi plumbing


def superop_to_choi(superop: np.ndarray, dim_in: int, dim_out: int) -> np.ndarray:
    """Choi matrix J[(i,o),(j,o')] = E(|i><j|)[o,o'] from the superoperator."""
    s4 = superop.reshape(dim_out, dim_out, dim_in, dim_in)
    return s4.transpose(3, 1, 2, 0).reshape(dim_in * dim_out, dim_in * dim_out)


def choi_to_superop(choi: np.ndarray, dim_in: int, dim_out: int) -> np.ndarray:
    j4 = choi.reshape(dim_in, dim_out, dim_in, dim_out)
    return j4.transpose(3, 1, 2, 0).reshape(dim_out**2, dim_in**2)


def apply_via_choi(choi: np.ndarray, dim_in: int, dim_out: int, mat) -> np.ndarray:
    """E(rho) = Tr_in[(rho^T ⊗ 1) J]; dual-representation cross-check path."""
    j4 = choi.reshape(dim_in, dim_out, dim_in, dim_out)
    return np.einsum("ij,iajb->ab", np.asarray(mat, dtype=complex), j4)


class LinearMap:
    """Linear operator-to-operator map stored as a superoperator matrix.

    Used for maps that are not channels (adjoints, differences); carries no
    CP/TP validation.
    """

    __slots__ = ("superop", "dim_in", "dim_out")

    def __init__(self, superop, dim_in: int, dim_out: int):
        s = np.array(superop, dtype=complex)
        if s.shape != (dim_out**2, dim_in**2):
            raise DimensionMismatch(
                f"superoperator shape {s.shape} does not match dims "
                f"({dim_out}²×{dim_in}²)"
            )
        self.superop = _freeze(s)
        self.dim_in = dim_in
        self.dim_out = dim_out

    def apply(self, mat) -> np.ndarray:
        m = linalg.as_square(mat)
        if m.shape[0] != self.dim_in:
            raise DimensionMismatch(
                f"map expects dim {self.dim_in}, got {m.shape[0]}"
            )
        return unvec(self.superop @ vec(m), self.dim_out)

    def compose(self, inner: "LinearMap") -> "LinearMap":
        """self ∘ inner."""
        if inner.dim_out != self.dim_in:
            raise DimensionMismatch(
                f"cannot compose: inner output dim {inner.dim_out} != "
                f"outer input dim {self.dim_in}"
            )
        return LinearMap(self.superop @ inner.superop, inner.dim_in, self.dim_out)

    def adjoint(self) -> "LinearMap":
        """Adjoint with respect to the Hilbert-Schmidt inner product."""
        return LinearMap(dagger(self.superop), self.dim_out, self.dim_in)

    @property
    def choi(self) -> np.ndarray:
        return superop_to_choi(self.superop, self.dim_in, self.dim_out)

    def is_unital(self, atol: float = 1e-8) -> bool:
        out = self.apply(np.eye(self.dim_in)) if self.dim_in == self.dim_out else None
        return out is not None and frob(out - np.eye(self.dim_out)) <= atol


class Channel(LinearMap):
    """Completely positive trace-preserving map.

    Both the Choi matrix and the superoperator are materialized at
    construction; complete positivity (Choi PSD) and trace preservation
    (output partial trace of the Choi equals the identity) are checked
    eagerly.
    """

    __slots__ = ("_choi",)

    def __init__(self, superop, dim_in: int, dim_out: int, *, _choi=None):
        super().__init__(superop, dim_in, dim_out)
        choi = superop_to_choi(self.superop, dim_in, dim_out) if _choi is None else _choi
        w = np.linalg.eigvalsh(hermitize(choi))
        if w[0] < -1e-8:
            raise NotPSD(f"Choi matrix has eigenvalue {w[0]:.3e}; map is not CP")
        tp = linalg.partial_trace(choi, (dim_in, dim_out), keep="A")
        if frob(tp - np.eye(dim_in)) > 1e-8:
            raise ValueError(
                f"map is not trace preserving: ||Tr_out J - 1|| = "
                f"{frob(tp - np.eye(dim_in)):.3e}"
            )
        self._choi = _freeze(choi)

    @property
    def choi(self) -> np.ndarray:
        return self._choi

    @classmethod
    def from_kraus(cls, kraus, dim_in: int | None = None, dim_out: int | None = None):
        ops = [np.asarray(k, dtype=complex) for k in kraus]
        if not ops:
            raise ValueError("need at least one Kraus operator")
        dout, din = ops[0].shape
        dim_in = din if dim_in is None else dim_in
        dim_out = dout if dim_out is None else dim_out
        s = np.zeros((dim_out**2, dim_in**2), dtype=complex)
        for k in ops:
            if k.shape != (dim_out, dim_in):
                raise DimensionMismatch("Kraus operators have mixed shapes")
            s += linalg.tensor(k.conj(), k)
        return cls(s, dim_in, dim_out)

    @classmethod
    def from_choi(cls, choi, dim_in: int, dim_out: int):
        j = linalg.as_square(choi, "Choi matrix")
        if j.shape[0] != dim_in * dim_out:
            raise DimensionMismatch(
                f"Choi of dim {j.shape[0]} does not match {dim_in}*{dim_out}"
            )
        return cls(choi_to_superop(j, dim_in, dim_out), dim_in, dim_out, _choi=j)

    def kraus_operators(self, tol: Tolerance = DEFAULT_TOL) -> list[np.ndarray]:
        """A Kraus family extracted from the Choi eigendecomposition."""
        w, v = np.linalg.eigh(hermitize(self._choi))
        cut = max(float(w[-1]), 0.0) * tol.rank_eps
        ops = []
        for lam, col in zip(w, v.T):
            if lam > cut:
                ops.append(np.sqrt(lam) * col.reshape(self.dim_in, self.dim_out).T)
        return ops

    def __repr__(self):
        return f"Channel({self.dim_in} -> {self.dim_out})"


def identity_channel(dim: int) -> Channel:
    return Channel(np.eye(dim**2), dim, dim)


def unitary_channel(u) -> Channel:
    u = linalg.as_square(u, "unitary")
    if frob(dagger(u) @ u - np.eye(u.shape[0])) > 1e-8:
        raise ValueError("matrix is not unitary")
    return Channel.from_kraus([u])


def measurement_channel(povm: Povm) -> Channel:
    """Quantum-classical channel rho -> sum_x tr[P_x rho] |x><x|."""
    n, d = len(povm), povm.dim
    s = np.zeros((n**2, d**2), dtype=complex)
    for x, (_, p) in enumerate(povm):
        exx = np.zeros((n, n), dtype=complex)
        exx[x, x] = 1.0
        s += np.outer(vec(exx), vec(p).conj())
    return Channel(s, d, n)


def measure_probabilities(povm: Povm, rho: DensityMatrix) -> np.ndarray:
    """Outcome distribution tr[P_x rho], clipped of round-off dust."""
    if rho.dim != povm.dim:
        raise DimensionMismatch(
            f"state dim {rho.dim} != POVM dim {povm.dim}"
        )
    p = np.array([np.trace(e @ rho.mat).real for _, e in povm])
    return np.clip(p, 0.0, None)


def apply_channel(channel: Channel, rho: DensityMatrix, tol: Tolerance = DEFAULT_TOL) -> DensityMatrix:
    """Apply a channel to a state; the output is re-validated.

    Eigenvalues in [-1e-8, 0) are clamped to 0 and the trace renormalized;
    anything more negative means the map was not CP and raises.
    """
    out = hermitize(channel.apply(rho.mat))
    w, v = np.linalg.eigh(out)
    if w[0] < -1e-8:
        raise NotPSD(
            f"channel output has eigenvalue {w[0]:.3e}; refusing to clamp"
        )
    w = np.clip(w, 0.0, None)
    out = (v * w) @ dagger(v)
    out /= np.trace(out).real
    return DensityMatrix(out, tol, validate=False)


def adjoint_channel(channel: Channel) -> LinearMap:
    """Hilbert-Schmidt adjoint; completely positive and unital, not TP."""
    return channel.adjoint()


def channel_compose(outer: Channel, inner: Channel) -> Channel:
    """outer ∘ inner as a Channel."""
    if inner.dim_out != outer.dim_in:
        raise DimensionMismatch(
            f"cannot compose: {inner.dim_out} -> {outer.dim_in}"
        )
    return Channel(outer.superop @ inner.superop, inner.dim_in, outer.dim_out)


def channel_tensor_identity(channel: Channel, dim_b: int) -> Channel:
    """Extend a channel on A to act as ``E ⊗ 1`` on A ⊗ B."""
    eye = np.eye(dim_b)
    kraus = [linalg.tensor(k, eye) for k in channel.kraus_operators()]
    return Channel.from_kraus(
        kraus, channel.dim_in * dim_b, channel.dim_out * dim_b
    )


def post_process(povm: Povm, tmap: StochasticMap, tol: Tolerance = DEFAULT_TOL) -> Povm:
    """Classical post-processing Q_y = sum_x p(y|x) P_x."""
    if tmap.n_in != len(povm):
        raise InvalidStochasticMap(
            f"stochastic map has {tmap.n_in} rows for a POVM with "
            f"{len(povm)} outcomes"
        )
    elements = []
    for y in range(tmap.n_out):
        q = sum(tmap.matrix[x, y] * e for x, (_, e) in enumerate(povm))
        elements.append(q)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # merged-away outcomes prune silently
        return Povm(elements, tol=tol)


def is_pvm(povm: Povm, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff P_x P_x' = delta_xx' P_x for all pairs, within tolerance."""
    for i, (_, a) in enumerate(povm):
        for j, (_, b) in enumerate(povm):
            target = a if i == j else 0.0
            if not is_zero(a @ b - target, scale=frob(a) * frob(b), tol=tol):
                return False
    return True


def check_deterministic_postprocessing(
    povm: Povm, pvm: Povm, tmap: StochasticMap, tol: Tolerance = DEFAULT_TOL
) -> bool:
    """Check that a post-processing onto a PVM uses only 0/1 weights.

    Preconditions: ``post_process(povm, tmap)`` must reproduce ``pvm`` and
    ``pvm`` must actually be projective; otherwise the question is not
    well-posed and we raise.
    """
    if not is_pvm(pvm, tol):
        raise PreconditionViolated("target POVM is not projective")
    produced = [
        sum(tmap.matrix[x, y] * e for x, (_, e) in enumerate(povm))
        for y in range(tmap.n_out)
    ]
    targets = {lab: e for lab, e in pvm}
    nonzero = [(y, q) for y, q in enumerate(produced) if frob(q) > tol.rank_eps]
    if len(nonzero) != len(pvm):
        raise PreconditionViolated(
            "post-processing does not reproduce the target PVM"
        )
    for (_, q), (_, e) in zip(nonzero, pvm):
        if not is_zero(q - e, scale=frob(e), tol=tol):
            raise PreconditionViolated(
                "post-processing does not reproduce the target PVM"
            )
    m = tmap.matrix
    return bool(np.all(np.minimum(np.abs(m), np.abs(1.0 - m)) <= 1e-9))
