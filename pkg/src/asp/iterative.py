"""
Residual correction, splittings and Krylov iteration
====================================================

``r = b - A x`` is the observable mismatch of a guess and the error
``e = x_true - x`` solves ``A e = r``, a system with the same shape as the
original one. Replacing the exact inverse in ``x + A^{-1} r`` by an easily
inverted ``P`` gives the stationary splittings (Jacobi, Gauss-Seidel, SOR);
with ``P = I`` and ``x0 = b`` every iterate is a combination of the Krylov
vectors ``b, Ab, A^2 b, ...``.
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import DimensionMismatch, NotConverged, ZeroDiagonal
from .linalg import LinearSystem, as_matrix, as_vector, solve_normal_equations


@dataclass(frozen=True)
class SplittingKind:
    """Which easily inverted part of ``A`` serves as the preconditioner."""

    variant: str
    omega: float = 1.0

    def __post_init__(self):
        if self.variant not in ("jacobi", "gauss-seidel", "sor"):
            raise ValueError(f"unknown splitting {self.variant!r}")
        if self.variant == "sor" and not 0.0 < self.omega < 2.0:
            raise ValueError("SOR omega must lie strictly inside (0, 2)")

    @classmethod
    def jacobi(cls):
        return cls("jacobi")

    @classmethod
    def gauss_seidel(cls):
        return cls("gauss-seidel")

    @classmethod
    def sor(cls, omega=1.5):
        return cls("sor", omega)

    def preconditioner(self, A):
        """``D``, ``D + L`` or ``D / omega + L``."""
        D = np.diag(np.diag(A))
        if self.variant == "jacobi":
            return D
        L = np.tril(A, -1)
        if self.variant == "gauss-seidel":
            return D + L
        return D / self.omega + L


@dataclass
class IterationTrace:
    residual_norms: list = field(default_factory=list)
    converged: bool = False

    @property
    def iterations(self):
        return len(self.residual_norms)


@dataclass(frozen=True, eq=False)
class KrylovBasis:
    vectors: list

    @property
    def depth(self):
        return len(self.vectors)

    def matrix(self):
        return np.column_stack(self.vectors)


def compute_residue(sys, x):
    x = as_vector(x, "x")
    if x.shape[0] != sys.n:
        raise DimensionMismatch(f"x has length {x.shape[0]}, system has {sys.n} unknowns")
    return sys.b - sys.A @ x


def lms_error_solve(sys, r, budget, mu=None, e0=None, tol=None):
    """Run LMS on ``A e = r`` cycling through the rows for ``budget`` steps.

    ``mu`` defaults to ``1 / max_i ||a_i||^2`` so every step is an
    under-relaxed row projection.
    """
    A = sys.A
    r = as_vector(r, "r")
    if mu is None:
        mu = 1.0 / np.max(np.einsum("ij,ij->i", A, A))
    e = np.zeros(sys.n) if e0 is None else as_vector(e0, "e0").copy()
    m = sys.m
    for k in range(budget):
        a = A[k % m]
        e += (mu * (r[k % m] - a @ e)) * a
    g = A.T @ (r - A @ e)
    res = float(np.linalg.norm(g))
    if not np.all(np.isfinite(e)):
        raise NotConverged("LMS error solve diverged", residual=float("inf"))
    if tol is not None and res > tol * max(np.linalg.norm(A.T @ r), 1e-300):
        raise NotConverged(f"LMS error solve stalled at normal residual {res:.3e}", residual=res)
    return e


def error_correct(sys, x_guess, inner_solver="direct", budget=1000, mu=None, tol=None):
    """Improve a guess by solving for its error from its residue.

    Parameters
    ----------
    sys : LinearSystem
        Square or over-determined with full column rank.
    x_guess : (n,) array
    inner_solver : {"direct", "lms"}
        ``"direct"`` solves ``A e = r`` by least squares; ``"lms"`` runs
        ``budget`` LMS steps on it.
    budget : int
        Step budget of the LMS inner solver.
    mu : float, optional
        LMS step size (see :func:`lms_error_solve`).
    tol : float, optional
        When given, the LMS inner solve must bring the normal-equation
        residual below ``tol`` relative to ``||A'r||``.

    Raises
    ------
    NotConverged
        From the LMS inner solver.
    """
    x_guess = as_vector(x_guess, "x_guess")
    r = compute_residue(sys, x_guess)
    if not np.any(r):
        return x_guess.copy()
    if inner_solver == "direct":
        e = solve_normal_equations(LinearSystem(sys.A, r))
    elif inner_solver == "lms":
        e = lms_error_solve(sys, r, budget, mu=mu, tol=tol)
    else:
        raise ValueError(f"unknown inner solver {inner_solver!r}")
    return x_guess + e


def split_iterate(A, b, kind, x0=None, tol=1e-10, max_iter=None):
    """Stationary iteration ``P x[k+1] = (P - A) x[k] + b``.

    Rectangular ``A`` is replaced by its normal equations ``A'A x = A'b``,
    since diagonal and triangular parts are only defined for square matrices.
    Stops once ``||b - Ax||_2 < tol ||b||_2``.

    Returns
    -------
    x : (n,) array
    trace : IterationTrace

    Raises
    ------
    ZeroDiagonal
        If some diagonal entry of the (square) matrix is zero.
    NotConverged
        When ``max_iter`` (default ``10 n^2``) is exhausted or the iterates
        blow up; ``err.trace`` carries the residual history.
    """
    A = as_matrix(A, "A")
    b = as_vector(b, "b")
    if A.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"A is {A.shape}, b has length {b.shape[0]}")
    if A.shape[0] != A.shape[1]:
        A, b = A.T @ A, A.T @ b
    n = A.shape[0]
    if np.any(np.diag(A) == 0):
        raise ZeroDiagonal("splitting needs a non-zero diagonal")
    if max_iter is None:
        max_iter = 10 * n * n
    x = np.zeros(n) if x0 is None else as_vector(x0, "x0").copy()
    P = kind.preconditioner(A)
    N = P - A
    if kind.variant == "jacobi":
        d = np.diag(P)
        solve = lambda v: v / d  # noqa: E731
    else:
        solve = lambda v: sla.solve_triangular(P, v, lower=True)  # noqa: E731

    bnorm = np.linalg.norm(b)
    trace = IterationTrace()
    for _ in range(max_iter):
        with np.errstate(over="ignore", invalid="ignore"):
            x = solve(N @ x + b)
            res = float(np.linalg.norm(b - A @ x))
        trace.residual_norms.append(res)
        if not np.isfinite(res):
            break
        if res < tol * bnorm:
            trace.converged = True
            return x, trace
    raise NotConverged(f"{kind.variant} did not reach relative residual {tol:g} "
                       f"in {trace.iterations} iterations", residual=trace.residual_norms[-1],
                       trace=trace)


def iteration_matrix(A, kind):
    """``P^{-1} (P - A)``; its spectral radius governs convergence."""
    A = as_matrix(A, "A")
    P = kind.preconditioner(A)
    return np.linalg.solve(P, P - A)


def krylov_basis(A, b, depth):
    """``[b, Ab, ..., A^(depth-1) b]``."""
    A = as_matrix(A, "A")
    b = as_vector(b, "b")
    if depth < 1:
        raise ValueError("depth must be at least 1")
    vecs = [b]
    for _ in range(depth - 1):
        vecs.append(A @ vecs[-1])
    return KrylovBasis(vecs)


def krylov_iterate(A, b, steps):
    """Iterate ``x <- (I - A) x + b`` from ``x = b``.

    One step gives ``2b - Ab``, two give ``3b - 3Ab + A^2 b``.
    """
    A = as_matrix(A, "A")
    b = as_vector(b, "b")
    if steps < 1:
        raise ValueError("steps must be at least 1")
    x = b.copy()
    for _ in range(steps):
        x = x - A @ x + b
    return x
