"""
Kalman filtering by state augmentation
======================================

A change of state ``x_new = F x_old + c`` is written as ``n`` extra equations
``[-F | I] [x_old; x_new] = c`` and appended to the least-squares problem,
which doubles the unknowns. The inverse Gram matrix of the doubled problem is
built from the old one by folding in the ``n`` rows of ``[-F | I]`` with rank-1
inverse updates; solving with it predicts the new state and smooths the old
one. Each later measurement of the new state is an ordinary RLS step in the
doubled space.

There are no noise covariances: the transition rows carry unit weight like
any other equation. The inverse is regularized as ``(delta I + ...)^{-1}`` over
the whole doubled space so that it exists before the transition rows couple
the two blocks.
"""
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DimensionMismatch, UnderdeterminedNewState
from .filters import DEFAULT_DELTA
from .linalg import (
    as_matrix,
    as_vector,
    direct_inverse,
    sherman_morrison_gain,
    sherman_morrison_update,
    symmetrize,
)


@dataclass(frozen=True, eq=False)
class StateTransition:
    F: np.ndarray
    c: np.ndarray = None

    def __post_init__(self):
        F = as_matrix(self.F, "F")
        if F.shape[0] != F.shape[1]:
            raise DimensionMismatch(f"F must be square, got {F.shape}")
        c = np.zeros(F.shape[0]) if self.c is None else as_vector(self.c, "c")
        if c.shape[0] != F.shape[0]:
            raise DimensionMismatch(f"c has length {c.shape[0]}, F is {F.shape}")
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "c", c)

    @property
    def n(self):
        return self.F.shape[0]

    @classmethod
    def identity(cls, n):
        """Random-walk model: ``F = I``, ``c = 0``."""
        return cls(np.eye(n))

    def rows(self):
        """The ``n x 2n`` block ``[-F | I]``."""
        return np.hstack([-self.F, np.eye(self.n)])


@dataclass(frozen=True, eq=False)
class KalmanState:
    """Augmented estimate ``[x_old; x_new]`` with its maintained inverse Gram.

    ``rhs`` is the accumulated right-hand side ``A'b + F_hat'c`` of the doubled
    problem; with exact arithmetic ``estimate == inverse @ rhs``.
    """

    estimate: np.ndarray
    inverse: np.ndarray
    n: int
    measurements_since_transition: int = 0
    rhs: np.ndarray = field(default=None)

    @property
    def new_state(self):
        return self.estimate[self.n:]

    @property
    def old_state(self):
        return self.estimate[:self.n]


@dataclass(frozen=True, eq=False)
class AugmentedRow:
    coeffs: np.ndarray
    observation: float


def kalman_init(n, delta=DEFAULT_DELTA):
    """Filter state before any transition.

    The inverse starts at ``(1/delta) I`` on the doubled space; the old block
    is inert until the first :func:`augment`, so measurements on the new block
    behave exactly like RLS started from ``(1/delta) I``.
    """
    return KalmanState(np.zeros(2 * n), np.eye(2 * n) / delta, n, 0, np.zeros(2 * n))


def augmented_rhs(prior_rhs, trans):
    """Right-hand side ``[A'b; 0] + [-F | I]' c`` of the doubled normal equations."""
    prior_rhs = as_vector(prior_rhs, "prior_rhs")
    h = np.concatenate([prior_rhs, np.zeros(trans.n)])
    return h + trans.rows().T @ trans.c


def embed_inverse(prior_inverse, delta=DEFAULT_DELTA):
    """Block-diagonal ``[[P, 0], [0, I/delta]]``: the old problem with an untouched new block.

    The zero off-diagonal blocks mean the old Gram (and so its inverse) sits
    unchanged in the top-left corner before any transition row is folded in.
    """
    P = as_matrix(prior_inverse, "prior_inverse")
    n = P.shape[0]
    inv = np.zeros((2 * n, 2 * n))
    inv[:n, :n] = P
    inv[n:, n:] = np.eye(n) / delta
    return inv


def augment(prior_inverse, prior_estimate, prior_rhs, trans, delta=DEFAULT_DELTA):
    """Embed an ``n``-unknown problem in ``2n`` unknowns and fold in a transition.

    Parameters
    ----------
    prior_inverse : (n, n) array
        Maintained inverse ``(delta I + A'A)^{-1}`` of the old problem.
    prior_estimate : (n,) array
        Old estimate; only used to recover ``prior_rhs`` when that is None.
    prior_rhs : (n,) array or None
        ``A'b`` accumulated over the old data.
    trans : StateTransition
    delta : float
        Regularization placed on the new block before the transition rows
        are folded in.

    Returns
    -------
    KalmanState
        With ``estimate`` equal to the prediction :func:`predict` returns.
    """
    P = as_matrix(prior_inverse, "prior_inverse")
    n = trans.n
    if P.shape != (n, n):
        raise DimensionMismatch(f"prior_inverse is {P.shape}, transition has n = {n}")
    if prior_rhs is None:
        prior_rhs = np.linalg.solve(P, as_vector(prior_estimate, "prior_estimate"))
    inv = embed_inverse(P, delta)
    for f in trans.rows():
        inv = sherman_morrison_update(inv, f)
    h = augmented_rhs(prior_rhs, trans)
    return KalmanState(inv @ h, inv, n, 0, h)


def predict(state, prior_rhs_augmented=None):
    """Solve the doubled normal equations with the maintained inverse.

    The new-state half is the prediction, the old-state half the smoothed old
    estimate.
    """
    h = state.rhs if prior_rhs_augmented is None else as_vector(prior_rhs_augmented, "prior_rhs_augmented")
    if h.shape[0] != 2 * state.n:
        raise DimensionMismatch(f"rhs has length {h.shape[0]}, expected {2 * state.n}")
    return state.inverse @ h


def measurement_row(a, b, n=None):
    """Place a measurement of the new state: zeros over the old block."""
    a = as_vector(a, "a")
    if n is not None and a.shape[0] != n:
        raise DimensionMismatch(f"row has length {a.shape[0]}, expected {n}")
    return AugmentedRow(np.concatenate([np.zeros(a.shape[0]), a]), float(b))


def kalman_gain(state, coeffs):
    """``(G + a a')^{-1} a`` for the state's Gram ``G`` and row ``a``."""
    return sherman_morrison_gain(state.inverse, as_vector(coeffs, "coeffs"))[1]


def measurement_update(state, row):
    """RLS step in the doubled space (update equation)."""
    coeffs = as_vector(row.coeffs, "coeffs")
    if coeffs.shape[0] != 2 * state.n:
        raise DimensionMismatch(f"row has length {coeffs.shape[0]}, expected {2 * state.n}")
    inv, gain = sherman_morrison_gain(state.inverse, coeffs)
    e = row.observation - coeffs @ state.estimate
    return replace(state, estimate=state.estimate + gain * e, inverse=inv,
                   measurements_since_transition=state.measurements_since_transition + 1,
                   rhs=state.rhs + coeffs * row.observation)


def discard_old_state(state):
    """Marginalize out the old block, keeping only what is known about the new one.

    The new block's inverse is the new-new sub-block of the doubled inverse,
    i.e. the inverse of the Schur complement of the old block in the Gram
    matrix. The returned triple feeds the next :func:`augment`.

    Returns
    -------
    inverse : (n, n) array
    estimate : (n,) array
    rhs : (n,) array
        Schur complement times the estimate.

    Raises
    ------
    UnderdeterminedNewState
        When no measurement has been absorbed since the last transition, or
        the new-block sub-block is numerically singular.
    """
    n = state.n
    if state.measurements_since_transition < 1:
        raise UnderdeterminedNewState("no measurement of the new state since the last transition")
    inv_new = symmetrize(state.inverse[n:, n:])
    w = np.linalg.eigvalsh(inv_new)
    if not (w[0] > 0 and w[0] > 1e-14 * w[-1]):
        raise UnderdeterminedNewState("new-state block of the inverse is numerically singular")
    schur = symmetrize(direct_inverse(inv_new))
    x_new = state.estimate[n:].copy()
    return inv_new, x_new, schur @ x_new


def kalman_filter(A, b, n=None, delta=DEFAULT_DELTA, trans=None, transitions=()):
    """Run the augmented filter over a stream of measurements of the state.

    Parameters
    ----------
    A : (m, n) array
        Measurement rows, one per time step.
    b : (m,) array
        Observations.
    delta : float
    trans : StateTransition, optional
        Transition model applied at each change point; random walk by default.
    transitions : iterable of int or "every"
        Indices ``k`` before whose measurement the state changes (discard the
        old block, then augment). ``"every"`` re-augments before every
        measurement after the first.

    Returns
    -------
    (m, n) array
        New-state estimate after each measurement.
    """
    A = as_matrix(A, "A")
    b = as_vector(b, "b")
    n = A.shape[1] if n is None else n
    trans = StateTransition.identity(n) if trans is None else trans
    every = isinstance(transitions, str) and transitions == "every"
    marks = set() if every else set(transitions)
    state = kalman_init(n, delta)
    out = np.empty((A.shape[0], n))
    for k, (a, obs) in enumerate(zip(A, b)):
        if (every and k > 0) or k in marks:
            inv, x, h = discard_old_state(state)
            state = augment(inv, x, h, trans, delta)
        state = measurement_update(state, measurement_row(a, obs, n))
        out[k] = state.new_state
    return out
