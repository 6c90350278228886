"""Dense complex-matrix kernel: Hermitian eigendecompositions, spectral
matrix functions, tensor products, partial traces, and the scale-aware
zero test used by every comparison in the package.

Everything works on plain ``numpy`` arrays of complex dtype.  Dimensions are
desk scale (tens, not thousands), so all spectral functions go through a full
``eigh`` — no iterative or scaling-and-squaring methods.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotHermitian, NotPSD


@dataclass(frozen=True)
class Tolerance:
    """Global comparison policy.

    ``abs_eps``/``rel_eps`` enter every "is this operator zero" decision as
    ``abs_eps + rel_eps * scale`` where ``scale`` is the product of the input
    Frobenius norms.  ``rank_eps`` is the eigenvalue threshold for support
    and invertibility decisions, relative to the largest eigenvalue.
    """

    abs_eps: float = 1e-10
    rel_eps: float = 1e-9
    rank_eps: float = 1e-9

    def __post_init__(self):
        if min(self.abs_eps, self.rel_eps, self.rank_eps) <= 0:
            raise ValueError("all tolerances must be strictly positive")

    def zero_threshold(self, scale: float) -> float:
        return self.abs_eps + self.rel_eps * scale


DEFAULT_TOL = Tolerance()


def as_square(mat, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite square complex array."""
    m = np.array(mat, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return m


def dagger(mat: np.ndarray) -> np.ndarray:
    return mat.conj().T


def frob(mat: np.ndarray) -> float:
    return float(np.linalg.norm(mat))


def is_zero(mat: np.ndarray, scale: float = 1.0, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Scale-aware zero test: ``||mat||_F <= abs_eps + rel_eps * scale``."""
    return frob(mat) <= tol.zero_threshold(scale)


def hermitize(mat: np.ndarray) -> np.ndarray:
    """Hermitian part (mat + mat†)/2, used to scrub round-off skew."""
    return (mat + dagger(mat)) / 2


@dataclass(frozen=True)
class HermitianEigen:
    """Eigendecomposition with real ascending eigenvalues and unitary columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ dagger(v)


def hermitian_eig(mat, tol: Tolerance = DEFAULT_TOL) -> HermitianEigen:
    """Eigendecompose a Hermitian matrix, rejecting non-Hermitian input."""
    m = as_square(mat)
    if not is_zero(m - dagger(m), scale=frob(m), tol=tol):
        raise NotHermitian(
            f"matrix is not Hermitian: ||M - M†|| = {frob(m - dagger(m)):.3e}"
        )
    w, v = np.linalg.eigh(hermitize(m))
    return HermitianEigen(eigenvalues=w, eigenvectors=v)


def _psd_eig(mat, tol: Tolerance) -> HermitianEigen:
    eig = hermitian_eig(mat, tol)
    lam_max = float(max(eig.eigenvalues[-1], 0.0))
    if eig.eigenvalues[0] < -tol.rank_eps * max(lam_max, 1.0):
        raise NotPSD(f"matrix has negative eigenvalue {eig.eigenvalues[0]:.3e}")
    return eig


def _spectral_apply(mat, fn, tol: Tolerance) -> np.ndarray:
    """Apply ``fn`` to eigenvalues above the support threshold; the rest map
    to 0 (the 0·log 0 = 0 / pseudo-inverse convention)."""
    eig = _psd_eig(mat, tol)
    w = eig.eigenvalues
    cut = tol.rank_eps * max(float(w[-1]), 0.0)
    fw = np.array([fn(x) if x > cut else 0.0 for x in w])
    return hermitize((eig.eigenvectors * fw) @ dagger(eig.eigenvectors))


def mat_sqrt(mat, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Principal square root of a PSD matrix."""
    return _spectral_apply(mat, np.sqrt, tol)


def mat_inv_sqrt(mat, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Inverse square root on the support; zero eigenvalues stay zero."""
    return _spectral_apply(mat, lambda x: 1.0 / np.sqrt(x), tol)


def mat_log2(mat, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Base-2 logarithm on the support; only meaningful inside traces against
    operators living on that support."""
    return _spectral_apply(mat, np.log2, tol)


def mat_pow(mat, t: float, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Real matrix power of a PSD matrix (on the support for negative t)."""
    return _spectral_apply(mat, lambda x: x**t, tol)


def tensor(a, b) -> np.ndarray:
    """Kronecker product with index order (a, b) -> a * dim_b + b."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def partial_trace(mat, dims: tuple[int, int], keep: str) -> np.ndarray:
    """Trace out one factor of a bipartite operator.

    ``dims = (dA, dB)`` with the composite index (a, b) = a * dB + b;
    ``keep`` is ``"A"`` or ``"B"``.
    """
    da, db = dims
    m = as_square(mat)
    if m.shape[0] != da * db:
        raise DimensionMismatch(
            f"matrix of dim {m.shape[0]} does not factor as {da}x{db}"
        )
    t = m.reshape(da, db, da, db)
    if keep == "A":
        return np.einsum("abcb->ac", t)
    if keep == "B":
        return np.einsum("abad->bd", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def partial_transpose(mat, dims: tuple[int, int], sys: str = "B") -> np.ndarray:
    """Transpose one tensor factor of a bipartite operator (PPT checks)."""
    da, db = dims
    m = as_square(mat)
    if m.shape[0] != da * db:
        raise DimensionMismatch(
            f"matrix of dim {m.shape[0]} does not factor as {da}x{db}"
        )
    t = m.reshape(da, db, da, db)
    if sys == "B":
        return t.transpose(0, 3, 2, 1).reshape(da * db, da * db)
    if sys == "A":
        return t.transpose(2, 1, 0, 3).reshape(da * db, da * db)
    raise ValueError(f"sys must be 'A' or 'B', got {sys!r}")


def support_projector(mat, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Projector onto eigenspaces with eigenvalue > rank_eps * lambda_max."""
    eig = _psd_eig(mat, tol)
    w = eig.eigenvalues
    cut = tol.rank_eps * max(float(w[-1]), 0.0)
    cols = eig.eigenvectors[:, w > cut]
    return hermitize(cols @ dagger(cols))


def vec(mat: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization: vec(M)[r + d*c] = M[r, c]."""
    return np.asarray(mat, dtype=complex).reshape(-1, order="F")


def unvec(v: np.ndarray, rows: int, cols: int | None = None) -> np.ndarray:
    """Inverse of :func:`vec`."""
    cols = rows if cols is None else cols
    return np.asarray(v, dtype=complex).reshape(rows, cols, order="F")
