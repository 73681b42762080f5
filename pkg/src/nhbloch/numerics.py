"""Dense numerical oracle: eigen-decomposition, localization fits, Jordan structure."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConvergenceError, InsufficientDataError, NotAnEigenvalueError

TOL_EIG = 1e-10
TOL_CLUSTER = 1e-6
TOL_RANK = 1e-8
ENVELOPE_FLOOR = 1e-13


@dataclass(frozen=True)
class EigResult:
    eigenvalues: np.ndarray
    right_eigenvectors: np.ndarray  # columns, unit norm
    residuals: np.ndarray

    def __len__(self):
        return len(self.eigenvalues)


@dataclass(frozen=True)
class JordanEstimate:
    eigenvalue: complex
    algebraic_mult: int
    geometric_mult: int
    cluster_size: int
    nullity_chain: tuple

    @property
    def ep_order(self) -> int:
        return self.algebraic_mult if self.geometric_mult < self.algebraic_mult else 1


def eigvals_dense(matrix: np.ndarray) -> np.ndarray:
    try:
        return scipy.linalg.eigvals(np.asarray(matrix, dtype=complex), check_finite=True)
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise ConvergenceError(f"eigenvalue iteration failed for {np.shape(matrix)} matrix: {exc}") from exc


def eig_dense(matrix: np.ndarray) -> EigResult:
    """Eigenpairs of a general complex matrix via Hessenberg-QR (LAPACK ``zgeev``).

    Eigenvalues are sorted lexicographically by (real, imag).  Per-vector
    residuals ``||H v - lambda v||`` are reported, not guaranteed: at
    defective points the returned vectors are not a basis.
    """
    h = np.asarray(matrix, dtype=complex)
    try:
        w, v = scipy.linalg.eig(h, check_finite=True)
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise ConvergenceError(f"eigen-decomposition failed for {h.shape} matrix: {exc}") from exc
    order = np.lexsort((w.imag, w.real))
    w, v = w[order], v[:, order]
    v = v / np.linalg.norm(v, axis=0)
    res = np.linalg.norm(h @ v - v * w, axis=0)
    return EigResult(w, v, res)


def cell_envelope(vec: np.ndarray) -> np.ndarray:
    """Per-cell ``max(|psi_(n,A)|, |psi_(n,B)|)``."""
    v = np.abs(np.asarray(vec))
    return np.maximum(v[0::2], v[1::2])


def localization_fit(vec: np.ndarray, n_cells: int) -> tuple[float, float]:
    """Least-squares slope of ``log(envelope_n)`` against ``n`` and its R^2."""
    vec = np.asarray(vec)
    if vec.shape != (2 * n_cells,):
        raise ValueError(f"expected {2 * n_cells} amplitudes, got shape {vec.shape}")
    env = cell_envelope(vec)
    n = np.arange(1, n_cells + 1)
    keep = env > ENVELOPE_FLOOR
    if keep.sum() < 4:
        raise InsufficientDataError(f"only {int(keep.sum())} cells above {ENVELOPE_FLOOR}")
    x, y = n[keep], np.log(env[keep])
    slope, intercept = np.polyfit(x, y, 1)
    ss_res = np.sum((y - (slope * x + intercept)) ** 2)
    ss_tot = np.sum((y - y.mean()) ** 2)
    # a flat log-envelope leaves only rounding noise in ss_tot
    r2 = 1.0 if ss_tot <= 1e-24 * len(x) else 1.0 - ss_res / ss_tot
    return float(slope), float(r2)


def _nullspace(a: np.ndarray, thresh: float) -> np.ndarray:
    _, s, vh = np.linalg.svd(a)
    rank = int(np.sum(s > thresh))
    return vh[rank:].conj().T


def jordan_structure(
    matrix: np.ndarray,
    lam: complex,
    tol_cluster: float | None = None,
    tol_rank: float = TOL_RANK,
) -> JordanEstimate:
    """Multiplicities of ``lam`` as an eigenvalue of ``matrix``.

    The geometric multiplicity is the numerical nullity of ``H - lam I``
    (singular values below ``tol_rank * sigma_max``).  The algebraic
    multiplicity is the dimension at which the chain
    ``ker(A) < ker(A^2) < ...`` stops growing; each step solves
    ``ker((I - Q Q^H) A)`` with ``Q`` an orthonormal basis of the previous
    kernel, so no matrix powers are formed.  The count of computed
    eigenvalues within ``tol_cluster`` (default ``1e-6 * ||H||``) is kept as
    ``cluster_size``; it undercounts high-order exceptional points whose
    eigenvalues split by ``O(eps^(1/k))`` under rounding.
    """
    h = np.asarray(matrix, dtype=complex)
    n = h.shape[0]
    if tol_cluster is None:
        tol_cluster = TOL_CLUSTER * max(np.linalg.norm(h, 2), 1.0)
    cluster = int(np.sum(np.abs(eigvals_dense(h) - lam) <= tol_cluster))

    a = h - lam * np.eye(n)
    thresh = tol_rank * max(np.linalg.norm(a, 2), np.finfo(float).tiny)
    basis = _nullspace(a, thresh)
    geometric = basis.shape[1]
    if geometric == 0:
        raise NotAnEigenvalueError(
            f"{lam} is not an eigenvalue (no singular value below {thresh:.3g}; {cluster} eigenvalues within {tol_cluster:.3g})"
        )
    chain = [geometric]
    while basis.shape[1] < n:
        proj = a - basis @ (basis.conj().T @ a)
        grown = _nullspace(proj, thresh)
        if grown.shape[1] <= basis.shape[1]:
            break
        basis, _ = np.linalg.qr(grown)
        chain.append(basis.shape[1])
    return JordanEstimate(complex(lam), chain[-1], geometric, cluster, tuple(chain))


# -- comparison helpers ----------------------------------------------------

def hausdorff(a, b) -> float:
    """Symmetric Hausdorff distance between two finite point sets in the complex plane."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.size == 0 or b.size == 0:
        return 0.0 if a.size == b.size else float("inf")
    d = np.abs(a[:, None] - b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def canonical_state(vec: np.ndarray) -> np.ndarray:
    """Unit norm, largest-modulus entry real and positive."""
    v = np.asarray(vec, dtype=complex)
    v = v / np.linalg.norm(v)
    k = int(np.argmax(np.abs(v)))
    v = v * (abs(v[k]) / v[k])
    v[k] = abs(v[k])
    return v


def phase_aligned_deviation(reference: np.ndarray, other: np.ndarray) -> float:
    """Max per-site deviation after normalizing both and removing the best global phase."""
    r = np.asarray(reference, dtype=complex)
    o = np.asarray(other, dtype=complex)
    r = r / np.linalg.norm(r)
    o = o / np.linalg.norm(o)
    overlap = np.vdot(o, r)
    if overlap != 0:
        o = o * (overlap / abs(overlap))
    return float(np.max(np.abs(r - o)))
