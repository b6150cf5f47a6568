"""
Dense linear-algebra kernels
============================

Rank-1 inverse updates, a cyclic Jacobi symmetric eigensolver, pseudoinverses
for the over- and under-determined cases, and the direct least-squares solves
that every iterative method in the package is checked against.

Vectors are 1-D ``float64`` arrays and matrices 2-D ``float64`` arrays; the
helpers :func:`as_vector` and :func:`as_matrix` validate shape and finiteness
at the package boundary.
"""
from dataclasses import dataclass

import numpy as np

from .errors import (
    DenominatorNearZero,
    DimensionMismatch,
    NegativeEigenvalue,
    NonFinite,
    NotConverged,
    NotSymmetric,
    RankDeficient,
)

SYMMETRY_RTOL = 1e-12
DEFAULT_RANK_TOL = 1e-10
INVERTIBILITY_RTOL = 1e-12


def as_vector(x, name="vector"):
    """Return ``x`` as a finite 1-D float array (scalars become length 1)."""
    arr = np.array(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1 or arr.size == 0:
        raise DimensionMismatch(f"{name} must be a non-empty 1-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFinite(f"{name} contains NaN or Inf")
    return arr


def as_matrix(M, name="matrix"):
    arr = np.array(M, dtype=float)
    if arr.ndim != 2 or 0 in arr.shape:
        raise DimensionMismatch(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFinite(f"{name} contains NaN or Inf")
    return arr


def is_symmetric(S, rtol=SYMMETRY_RTOL):
    """Entrywise check ``|S[i,j] - S[j,i]| <= rtol * max(1, |S[i,j]|)``."""
    S = np.asarray(S)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        return False
    scale = np.maximum(1.0, np.maximum(np.abs(S), np.abs(S.T)))
    return bool(np.all(np.abs(S - S.T) <= rtol * scale))


def _require_symmetric(S, name="matrix"):
    S = as_matrix(S, name)
    if S.shape[0] != S.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {S.shape}")
    if not is_symmetric(S):
        raise NotSymmetric(f"{name} is not symmetric within {SYMMETRY_RTOL:g}")
    return S


def symmetrize(S):
    return 0.5 * (S + S.T)


@dataclass(frozen=True, eq=False)
class LinearSystem:
    """The data matrix ``A`` (m x n) and observation vector ``b`` (length m)."""

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = as_matrix(self.A, "A")
        b = as_vector(self.b, "b")
        if A.shape[0] != b.shape[0]:
            raise DimensionMismatch(f"A has {A.shape[0]} rows but b has length {b.shape[0]}")
        A.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def m(self):
        return self.A.shape[0]

    @property
    def n(self):
        return self.A.shape[1]

    def gram(self):
        """``A'A``, exactly symmetric."""
        return symmetrize(self.A.T @ self.A)

    def rhs(self):
        """``A'b``."""
        return self.A.T @ self.b

    def rows(self):
        return zip(self.A, self.b)


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """Eigenvalues sorted descending; column ``i`` of ``eigenvectors`` pairs with ``eigenvalues[i]``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        Q = self.eigenvectors
        return (Q * self.eigenvalues) @ Q.T


def sherman_morrison_update(Pinv, u, tol=1e-12):
    r"""Fold a rank-1 term into a maintained inverse.

    Given ``Pinv = M^{-1}`` returns

    .. math::
        (M + u u^T)^{-1} = P - \frac{P u u^T P}{1 + u^T P u}

    in O(n^2) work. The result is re-symmetrized so that long update chains
    do not drift away from symmetry.

    Parameters
    ----------
    Pinv : (n, n) array
        Symmetric inverse being maintained.
    u : (n,) array
        Rank-1 update direction.
    tol : float, optional
        Smallest admissible value of ``1 + u'Pu``.

    Raises
    ------
    DenominatorNearZero
        If ``1 + u'Pu <= tol``.
    """
    return sherman_morrison_gain(Pinv, u, tol)[0]


def sherman_morrison_gain(Pinv, u, tol=1e-12):
    """Rank-1 inverse update that also returns the gain ``(M + u u')^{-1} u``.

    The gain is formed as ``Pu / (1 + u'Pu)`` from the *prior* inverse. This
    equals the updated inverse times ``u`` but avoids the cancellation in
    ``P - Pu u'P / (1 + u'Pu)`` when ``P`` is large (a small ``delta`` start),
    which would otherwise leak into recursive estimates.

    Returns
    -------
    updated : (n, n) array
    gain : (n,) array
    """
    P = _require_symmetric(Pinv, "Pinv")
    u = as_vector(u, "u")
    if u.shape[0] != P.shape[0]:
        raise DimensionMismatch(f"u has length {u.shape[0]}, Pinv is {P.shape}")
    Pu = P @ u
    denom = 1.0 + u @ Pu
    if not denom > tol:
        raise DenominatorNearZero(f"1 + u'Pu = {denom:.3e} <= {tol:g}")
    gain = Pu / denom
    return symmetrize(P - np.outer(Pu, gain)), gain


def _jacobi_rotation(app, aqq, apq):
    # (c, s) annihilating the (p, q) entry of a symmetric 2x2 block
    tau = (aqq - app) / (2.0 * apq)
    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.hypot(1.0, tau))
    c = 1.0 / np.hypot(1.0, t)
    return c, t * c


def symmetric_eigendecompose(S, max_sweeps=100):
    """Cyclic Jacobi eigen-decomposition of a symmetric matrix.

    Sweeps over every off-diagonal pair until the off-diagonal Frobenius norm
    drops below ``1e-12 * ||S||_F``.

    Returns
    -------
    EigenDecomposition
        Eigenvalues in descending order with orthonormal eigenvectors.

    Raises
    ------
    NotSymmetric
        If ``S`` fails the entrywise symmetry tolerance.
    NotConverged
        If ``max_sweeps`` sweeps do not reach the stopping threshold.
    """
    A = symmetrize(_require_symmetric(S, "S"))
    n = A.shape[0]
    V = np.eye(n)
    target = 1e-12 * np.linalg.norm(A)

    off_mask = ~np.eye(n, dtype=bool)

    def off_norm():
        return np.linalg.norm(A[off_mask])

    sweeps = 0
    while off_norm() >= target and target > 0:
        if sweeps == max_sweeps:
            raise NotConverged(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps",
                               residual=off_norm())
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                c, s = _jacobi_rotation(A[p, p], A[q, q], apq)
                R = np.array([[c, s], [-s, c]])
                idx = [p, q]
                A[:, idx] = A[:, idx] @ R
                A[idx, :] = R.T @ A[idx, :]
                A[p, q] = A[q, p] = 0.0
                V[:, idx] = V[:, idx] @ R

    w = np.diag(A).copy()
    order = np.argsort(-w, kind="stable")
    return EigenDecomposition(w[order], V[:, order])


def pinv_psd(S, rank_tol=DEFAULT_RANK_TOL):
    """Moore-Penrose pseudoinverse of a symmetric positive semi-definite matrix.

    Eigenvalues above ``rank_tol * lambda_max`` are inverted; the rest are
    left un-inverted (mapped to zero).

    Raises
    ------
    NotSymmetric
    NegativeEigenvalue
        If some eigenvalue is below ``-rank_tol * max(1, lambda_max)``.
    """
    dec = symmetric_eigendecompose(S)
    w, Q = dec.eigenvalues, dec.eigenvectors
    lam_max = max(w[0], 0.0)
    if w[-1] < -rank_tol * max(1.0, lam_max):
        raise NegativeEigenvalue(f"eigenvalue {w[-1]:.3e} below -{rank_tol:g} (relative)")
    keep = w > rank_tol * lam_max
    inv_w = np.zeros_like(w)
    inv_w[keep] = 1.0 / w[keep]
    return symmetrize((Q * inv_w) @ Q.T)


def numerical_rank(S, rank_tol=DEFAULT_RANK_TOL):
    w = symmetric_eigendecompose(S).eigenvalues
    return int(np.sum(w > rank_tol * max(w[0], 0.0)))


def _require_invertible(K, what):
    w = symmetric_eigendecompose(K).eigenvalues
    if not w[-1] > INVERTIBILITY_RTOL * w[0]:
        raise RankDeficient(f"{what} is numerically singular "
                            f"(eigenvalues {w[0]:.3e} .. {w[-1]:.3e})")


def direct_solve(M, v):
    """Solve ``M x = v`` by Gaussian elimination with partial pivoting."""
    return np.linalg.solve(as_matrix(M, "M"), as_vector(v, "v"))


def direct_inverse(M):
    """Dense inverse by Gaussian elimination with partial pivoting (oracle use)."""
    return np.linalg.inv(as_matrix(M, "M"))


def solve_normal_equations(sys):
    """Least-squares solution ``x = (A'A)^{-1} A'b`` of an over-determined system.

    Raises
    ------
    RankDeficient
        When ``A'A`` fails the invertibility check; use :func:`pinv_psd`
        (or :func:`asp.filters.reduced_rank_solve`) instead.
    """
    G = sys.gram()
    _require_invertible(G, "A'A")
    return np.linalg.solve(G, sys.rhs())


def underdetermined_apply(A, v):
    """Apply the under-determined pseudoinverse ``A'(AA')^{-1}`` to ``v``.

    The result is the minimum-norm solution of ``A x = v`` and lies in the
    row space of ``A``.
    """
    A = as_matrix(A, "A")
    v = as_vector(v, "v")
    if A.shape[0] != v.shape[0]:
        raise DimensionMismatch(f"A has {A.shape[0]} rows but v has length {v.shape[0]}")
    K = symmetrize(A @ A.T)
    _require_invertible(K, "AA'")
    return A.T @ np.linalg.solve(K, v)
