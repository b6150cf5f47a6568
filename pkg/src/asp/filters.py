"""
Streaming estimators as gain choices
====================================

Every estimator here advances a parameter vector with the same correction

    x[k+1] = x[k] + gain * residual

and differs only in how the gain is built: a fixed step along the data row
(LMS), the row scaled by its squared norm (NLMS / Kaczmarz), the
under-determined pseudoinverse of a block of rows (affine projection), a
maintained inverse Gram matrix (RLS), or correlation averages (steepest
descent). The direct Wiener solvers are the fixed points those recursions
head for.

Multiply-accumulate (MAC) accounting: an inner product or a scalar-times-
vector update of length n costs n, a scalar subtraction or division costs 1.
"""
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg as sla

from .errors import DimensionMismatch, NegativeEigenvalue, NotConverged, NotSymmetric, RankDeficient
from .linalg import (
    DEFAULT_RANK_TOL,
    LinearSystem,
    _require_invertible,
    as_matrix,
    as_vector,
    is_symmetric,
    pinv_psd,
    sherman_morrison_gain,
    solve_normal_equations,
    symmetric_eigendecompose,
    symmetrize,
)

DEFAULT_DELTA = 1e-6
DEFAULT_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class FilterState:
    """Current estimate plus bookkeeping.

    ``inverse`` is only present for RLS-type filters, where it holds
    ``(delta I + A'A)^{-1}`` over the rows absorbed so far.
    """

    estimate: np.ndarray
    inverse: np.ndarray = None
    step_index: int = 0
    mac_count: int = 0

    @property
    def n(self):
        return self.estimate.shape[0]

    def advanced(self, estimate, macs, inverse=None):
        return replace(self, estimate=estimate,
                       inverse=self.inverse if inverse is None else inverse,
                       step_index=self.step_index + 1,
                       mac_count=self.mac_count + macs)


@dataclass(frozen=True)
class UpdateRecord:
    prior_error: float
    gain_norm: float
    macs: int
    skipped: bool = False


@dataclass(frozen=True, eq=False)
class CorrelationPair:
    """Auto-correlation ``R`` and cross-correlation ``P`` of a data block."""

    R: np.ndarray
    P: np.ndarray

    def __post_init__(self):
        R = as_matrix(self.R, "R")
        P = as_vector(self.P, "P")
        if R.shape != (P.shape[0], P.shape[0]):
            raise DimensionMismatch(f"R is {R.shape} but P has length {P.shape[0]}")
        if not is_symmetric(R):
            raise NotSymmetric("R is not symmetric")
        if symmetric_eigendecompose(R).eigenvalues[-1] < -1e-10:
            raise NegativeEigenvalue("R is not positive semi-definite")
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "P", P)


def initial_state(n, x0=None, delta=None):
    """Fresh filter state of length ``n``.

    Parameters
    ----------
    n : int
        Filter length.
    x0 : array_like, optional
        Starting guess; zeros by default.
    delta : float, optional
        When given, attach the RLS inverse ``(1/delta) I``. ``delta=1`` is the
        plain identity starting candidate.
    """
    x = np.zeros(n) if x0 is None else as_vector(x0, "x0")
    if x.shape[0] != n:
        raise DimensionMismatch(f"x0 has length {x.shape[0]}, expected {n}")
    inverse = None if delta is None else np.eye(n) / delta
    return FilterState(x, inverse)


def _row(state, a):
    a = as_vector(a, "a")
    if a.shape[0] != state.n:
        raise DimensionMismatch(f"row has length {a.shape[0]}, state has length {state.n}")
    return a


def _correct(x, direction, scale):
    return x + scale * direction


def lms_step(state, a, b, mu):
    """One LMS update ``x + mu * (b - a'x) * a``. Costs exactly ``2n + 1`` MACs."""
    if mu < 0:
        raise ValueError("mu must be non-negative")
    a = _row(state, a)
    n = state.n
    e = float(b - a @ state.estimate)
    x = _correct(state.estimate, a, mu * e)
    macs = 2 * n + 1
    rec = UpdateRecord(e, abs(mu) * float(np.linalg.norm(a)), macs)
    return state.advanced(x, macs), rec


def nlms_step(state, a, b, eps=DEFAULT_EPS):
    """One NLMS update: LMS with the step ``1 / (a'a + eps)``.

    Rows with ``a'a < eps`` carry no direction to project on; they are skipped
    (estimate unchanged, ``record.skipped`` set). Costs ``3n + 2`` MACs.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    a = _row(state, a)
    n = state.n
    e = float(b - a @ state.estimate)
    aa = float(a @ a)
    if aa < eps:
        rec = UpdateRecord(e, 0.0, n, skipped=True)
        return state.advanced(state.estimate.copy(), n), rec
    mu = 1.0 / (aa + eps)
    x = _correct(state.estimate, a, mu * e)
    macs = 3 * n + 2
    return state.advanced(x, macs), UpdateRecord(e, mu * np.sqrt(aa), macs)


def kaczmarz_solve(sys, x0=None, max_sweeps=10_000, tol=1e-10, eps=DEFAULT_EPS):
    """Cyclic Kaczmarz row projections for a consistent system.

    Sweeps NLMS projections over rows ``1..m`` in fixed order, returning as
    soon as the largest row residual drops below ``tol``. From ``x0 = 0`` the
    limit is the minimum-norm solution.

    Raises
    ------
    NotConverged
        If ``max_sweeps`` sweeps do not reach ``tol``; ``err.residual`` holds
        the final max row residual.
    """
    state = initial_state(sys.n, x0)
    res = np.inf
    for _ in range(max_sweeps):
        for a, b in sys.rows():
            state, _ = nlms_step(state, a, b, eps)
        res = float(np.max(np.abs(sys.b - sys.A @ state.estimate)))
        if res < tol:
            return state.estimate
    raise NotConverged(f"Kaczmarz did not reach {tol:g} in {max_sweeps} sweeps "
                       f"(max row residual {res:.3e})", residual=res)


def _cholesky_macs(k):
    return k ** 3 // 6 + k * k


def ap_step(state, Ak, bk, gram=None):
    """Affine projection update ``x + Ak'(Ak Ak')^{-1}(bk - Ak x)``.

    The ``k x k`` system is solved afresh by Cholesky each call. ``gram`` may
    carry a caller-maintained ``Ak Ak'`` (see :class:`ProjectionWindow`); its
    maintenance cost is then the caller's to account for.

    Raises
    ------
    RankDeficient
        If ``Ak Ak'`` is numerically singular.
    """
    Ak = as_matrix(Ak, "Ak")
    bk = as_vector(bk, "bk")
    k, n = Ak.shape
    if n != state.n or bk.shape[0] != k:
        raise DimensionMismatch(f"Ak is {Ak.shape}, bk has length {bk.shape[0]}, state has length {state.n}")
    macs = k * n + k
    if gram is None:
        gram = symmetrize(Ak @ Ak.T)
        macs += k * (k + 1) // 2 * n
    e = bk - Ak @ state.estimate
    try:
        c, low = sla.cho_factor(gram, lower=True)
    except np.linalg.LinAlgError as err:
        raise RankDeficient("Ak Ak' is not positive definite") from err
    d = np.diag(c)
    if not d.min() ** 2 > 1e-12 * np.max(np.diag(gram)):
        raise RankDeficient("Ak Ak' is numerically singular")
    w = sla.cho_solve((c, low), e)
    macs += _cholesky_macs(k) + k * n
    return state.advanced(state.estimate + Ak.T @ w, macs)


@dataclass(frozen=True, eq=False)
class ProjectionWindow:
    """Sliding block of the ``order`` most recent rows with their Gram ``AA'``.

    Pushing a row costs one inner product against each retained row.
    """

    order: int
    A: np.ndarray = field(default=None)
    b: np.ndarray = field(default=None)
    gram: np.ndarray = field(default=None)

    def pushed(self, a, b):
        a = as_vector(a, "a")
        if self.A is None:
            A, obs, G = a[None, :], np.array([float(b)]), np.array([[a @ a]])
            return ProjectionWindow(self.order, A, obs, G), a.shape[0]
        keep = 1 if self.A.shape[0] == self.order else 0
        A = np.vstack([self.A[keep:], a])
        obs = np.append(self.b[keep:], float(b))
        cross = A @ a
        k = A.shape[0]
        G = np.empty((k, k))
        G[:-1, :-1] = self.gram[keep:, keep:]
        G[-1, :] = cross
        G[:, -1] = cross
        return ProjectionWindow(self.order, A, obs, G), k * a.shape[0]


def ap_window_step(state, window, a, b):
    """Push ``(a, b)`` into the window and take one affine projection step."""
    window, macs = window.pushed(a, b)
    e = float(b - _row(state, a) @ state.estimate)
    new = ap_step(state, window.A, window.b, gram=window.gram)
    new = replace(new, mac_count=new.mac_count + macs)
    # records the size of the applied correction; the AP gain is a matrix
    step = float(np.linalg.norm(new.estimate - state.estimate))
    return new, window, UpdateRecord(e, step, new.mac_count - state.mac_count)


def rls_step(state, a, b):
    """One RLS update with the matrix inversion lemma.

    ``inverse' = (M + a a')^{-1}`` via the matrix inversion lemma, then
    ``x' = x + inverse' a (b - a'x)``, with ``inverse' a`` evaluated as
    ``Pa / (1 + a'Pa)``. Costs ``2n^2 + 4n + 2`` MACs.

    Raises
    ------
    DenominatorNearZero
        Propagated from the rank-1 update.
    """
    if state.inverse is None:
        raise ValueError("RLS needs a state with an inverse (initial_state(n, delta=...))")
    a = _row(state, a)
    n = state.n
    inv, gain = sherman_morrison_gain(state.inverse, a)
    e = float(b - a @ state.estimate)
    x = _correct(state.estimate, gain, e)
    # Pa, a'Pa + 1, the gain divide, the outer-product downdate, e, x update
    macs = n * n + (n + 1) + n + n * n + (n + 1) + n
    return state.advanced(x, macs, inverse=inv), UpdateRecord(e, float(np.linalg.norm(gain)), macs)


def estimate_correlations(sys):
    """Sample averages ``R = A'A / k`` and ``P = A'b / k`` over the ``k`` rows."""
    k = sys.m
    return CorrelationPair(sys.gram() / k, sys.rhs() / k)


def sd_step(state, corr, mu):
    """Steepest descent ``x + mu (P - R x)``; the bracket is the negative gradient."""
    if mu < 0:
        raise ValueError("mu must be non-negative")
    n = state.n
    if corr.P.shape[0] != n:
        raise DimensionMismatch(f"correlations have size {corr.P.shape[0]}, state has length {n}")
    grad = corr.P - corr.R @ state.estimate
    return state.advanced(state.estimate + mu * grad, n * n + 2 * n)


def wiener_mmse_solve(corr):
    """Solve the Wiener-Hopf equations ``R x = P``.

    Raises
    ------
    RankDeficient
        If ``R`` is singular; use :func:`reduced_rank_solve`.
    """
    _require_invertible(corr.R, "R")
    return np.linalg.solve(corr.R, corr.P)


def wiener_ls_solve(sys, check=True):
    """Least-squares Wiener filter ``(A'A)^{-1} A'b``.

    With ``check`` the result is cross-checked against the MMSE form on the
    sample correlations of the same data (the ``1/k`` factors cancel).
    """
    x = solve_normal_equations(sys)
    if check:
        x_mmse = wiener_mmse_solve(estimate_correlations(sys))
        gap = np.max(np.abs(x - x_mmse))
        if gap > 1e-8 * max(1.0, np.max(np.abs(x))):
            raise ArithmeticError(f"LS and MMSE Wiener solutions disagree by {gap:.3e}")
    return x


def reduced_rank_solve(sys, rank_tol=DEFAULT_RANK_TOL):
    """``(A'A)^+ A'b`` with the eigen pseudoinverse.

    Raising ``rank_tol`` drops small eigen-directions of the Gram matrix
    ("compressing") at the cost of some residual in the normal equations.
    """
    return pinv_psd(sys.gram(), rank_tol) @ sys.rhs()


def reduced_rank_rls_step(state, full_gram, a, b, rank_tol=DEFAULT_RANK_TOL):
    """RLS-style step with the pseudoinverse of the full Gram in place of the inverse.

    ``full_gram`` must already include ``a a'``.
    """
    a = _row(state, a)
    G = as_matrix(full_gram, "full_gram")
    if G.shape != (state.n, state.n):
        raise DimensionMismatch(f"full_gram is {G.shape}, expected {(state.n, state.n)}")
    gain = pinv_psd(G, rank_tol) @ a
    e = float(b - a @ state.estimate)
    n = state.n
    return state.advanced(_correct(state.estimate, gain, e), n * n + 2 * n + 1)
