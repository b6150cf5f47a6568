"""
System-identification harness
=============================

Seeded experiments that feed one synthetic identification problem to every
estimator and record learning curves and operation counts.

The unknown system is an impulse response ``x*`` with entries uniform in
``[-1, 1]``; data rows are i.i.d. standard normal and observations carry
additive Gaussian noise. Rows are streamed cyclically, so with ``iters > m``
the data set is revisited. Trial ``t`` uses seed ``seed + t``; the unknown
system and the data come from separate PCG64 streams of that seed.
"""
import csv
import io
from dataclasses import dataclass, replace

import numpy as np

from .errors import ASPError, ConfigError, ConfigMismatch, NotConverged
from .filters import (
    DEFAULT_DELTA,
    DEFAULT_EPS,
    ProjectionWindow,
    ap_window_step,
    estimate_correlations,
    initial_state,
    lms_step,
    nlms_step,
    reduced_rank_solve,
    rls_step,
    sd_step,
    wiener_ls_solve,
    wiener_mmse_solve,
)
from .kalman import kalman_init, measurement_row, measurement_update
from .linalg import DEFAULT_RANK_TOL, LinearSystem

STREAMING = ("lms", "nlms", "kaczmarz", "ap", "rls", "sd", "kalman")
DIRECT = ("wiener-ls", "wiener-mmse", "reduced-rank")
ALGORITHMS = STREAMING + DIRECT
COUNTABLE = ("lms", "nlms", "kaczmarz", "ap", "rls")

CSV_FIELDS = ("iteration", "squared_prediction_error", "parameter_error", "cumulative_macs")

_SYSTEM_STREAM = 0x5157
_DATA_STREAM = 0xDA7A


def _rng(seed, stream):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), stream])))


@dataclass(frozen=True)
class ExperimentConfig:
    """One algorithm on one synthetic problem.

    ``ap_order`` is the affine-projection block size; ``None`` means
    ``max(1, n // 2)``. ``label`` names the curve in merged output and
    defaults to the algorithm name.
    """

    algorithm: str
    n: int = 5
    m: int = 50
    iters: int = 2000
    mu: float = 0.05
    eps: float = DEFAULT_EPS
    delta: float = DEFAULT_DELTA
    noise_std: float = 0.01
    seed: int = 0
    trials: int = 32
    ap_order: int = None
    rank_tol: float = DEFAULT_RANK_TOL
    label: str = None

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}; choose from {', '.join(ALGORITHMS)}")
        for name in ("n", "m", "iters", "trials"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.noise_std < 0:
            raise ConfigError("noise_std must be >= 0")
        if self.mu < 0:
            raise ConfigError("mu must be >= 0")
        if not self.eps > 0 or not self.delta > 0:
            raise ConfigError("eps and delta must be > 0")
        if self.seed < 0:
            raise ConfigError("seed must be a non-negative integer")
        if self.ap_order is not None and not 1 <= self.ap_order <= self.n:
            raise ConfigError("ap_order must lie in [1, n]")

    @property
    def order(self):
        return self.ap_order if self.ap_order is not None else max(1, self.n // 2)

    @property
    def name(self):
        return self.label or self.algorithm


@dataclass(eq=False)
class LearningCurve:
    iteration: np.ndarray
    squared_prediction_error: np.ndarray
    parameter_error: np.ndarray
    cumulative_macs: np.ndarray

    def __len__(self):
        return len(self.iteration)

    def first_below(self, threshold):
        """First iteration whose parameter error is <= ``threshold`` (None if never)."""
        hit = np.nonzero(self.parameter_error <= threshold)[0]
        return int(self.iteration[hit[0]]) if hit.size else None

    def rows(self):
        for k, e2, p, c in zip(self.iteration, self.squared_prediction_error,
                               self.parameter_error, self.cumulative_macs):
            yield int(k), float(e2), float(p), int(c)


def make_system(n, seed):
    """Unknown impulse response: ``n`` i.i.d. draws from ``U[-1, 1]``."""
    if n < 1:
        raise ConfigError("n must be >= 1")
    return _rng(seed, _SYSTEM_STREAM).uniform(-1.0, 1.0, n)


def synthesize_data(x_star, m, noise_std, seed):
    """``m`` standard-normal input rows and their noisy outputs ``A x* + noise``."""
    if m < 1:
        raise ConfigError("m must be >= 1")
    x_star = np.asarray(x_star, dtype=float)
    rng = _rng(seed, _DATA_STREAM)
    A = rng.standard_normal((m, x_star.shape[0]))
    nu = rng.standard_normal(m)
    b = A @ x_star
    if noise_std:
        b = b + noise_std * nu
    return LinearSystem(A, b)


def rls_macs(n):
    return 2 * n * n + 4 * n + 2


def _direct_macs(m, n):
    # Gram (symmetric half) + A'b + Gaussian elimination
    return m * n * (n + 1) // 2 + m * n + n ** 3 // 3 + n * n


def _run_trial(cfg, seed):
    n, m = cfg.n, cfg.m
    x_star = make_system(n, seed)
    sys = synthesize_data(x_star, m, cfg.noise_std, seed)
    alg = cfg.algorithm

    if alg in DIRECT:
        if alg == "wiener-ls":
            x = wiener_ls_solve(sys)
        elif alg == "wiener-mmse":
            x = wiener_mmse_solve(estimate_correlations(sys))
        else:
            x = reduced_rank_solve(sys, cfg.rank_tol)
        r = sys.b - sys.A @ x
        return (np.array([np.mean(r * r)]), np.array([np.sum((x - x_star) ** 2)]),
                np.array([_direct_macs(m, n)]))

    e2 = np.empty(cfg.iters)
    perr = np.empty(cfg.iters)
    macs = np.empty(cfg.iters, dtype=np.int64)
    state = initial_state(n, delta=cfg.delta if alg == "rls" else None)
    window = ProjectionWindow(cfg.order)
    kstate = kalman_init(n, cfg.delta) if alg == "kalman" else None
    corr = None
    extra = 0
    if alg == "sd":
        corr = estimate_correlations(sys)
        extra = m * n * (n + 1) // 2 + m * n
    kalman_total = 0

    for k in range(cfg.iters):
        a, b = sys.A[k % m], sys.b[k % m]
        try:
            if alg == "lms":
                state, rec = lms_step(state, a, b, cfg.mu)
                e = rec.prior_error
            elif alg in ("nlms", "kaczmarz"):
                state, rec = nlms_step(state, a, b, cfg.eps)
                e = rec.prior_error
            elif alg == "ap":
                state, window, rec = ap_window_step(state, window, a, b)
                e = rec.prior_error
            elif alg == "rls":
                state, rec = rls_step(state, a, b)
                e = rec.prior_error
            elif alg == "sd":
                e = b - a @ state.estimate
                state = sd_step(state, corr, cfg.mu)
            else:
                row = measurement_row(a, b)
                e = b - row.coeffs @ kstate.estimate
                kstate = measurement_update(kstate, row)
                kalman_total += rls_macs(2 * n)
        except ASPError as err:
            err.iteration = k + 1
            err.args = (f"{alg} failed at iteration {k + 1}: {err.args[0] if err.args else err}",) + err.args[1:]
            raise
        x = kstate.new_state if alg == "kalman" else state.estimate
        with np.errstate(over="ignore", invalid="ignore"):
            e2[k] = e * e
            perr[k] = np.sum((x - x_star) ** 2)
        if not (np.isfinite(e2[k]) and np.isfinite(perr[k])):
            err = NotConverged(f"{alg} diverged at iteration {k + 1} (try a smaller step size)")
            err.iteration = k + 1
            raise err
        macs[k] = kalman_total if alg == "kalman" else state.mac_count + extra
    return e2, perr, macs


def run_experiment(cfg):
    """Average the learning curve of ``cfg.algorithm`` over ``cfg.trials`` seeds.

    Direct solvers yield a single-point curve. Algorithm errors propagate with
    an ``iteration`` attribute attached; a run whose errors overflow raises
    :class:`NotConverged` rather than emitting non-finite values.
    """
    e2_sum = perr_sum = macs = None
    for t in range(cfg.trials):
        e2, perr, m = _run_trial(cfg, cfg.seed + t)
        if e2_sum is None:
            e2_sum, perr_sum, macs = e2.copy(), perr.copy(), m
        else:
            e2_sum += e2
            perr_sum += perr
    return LearningCurve(np.arange(1, len(e2_sum) + 1), e2_sum / cfg.trials,
                         perr_sum / cfg.trials, macs)


def compare_algorithms(cfgs, shared_seed):
    """Run several configurations on byte-identical data.

    Returns
    -------
    list of (str, LearningCurve)
        Curve name (``cfg.name``) and curve, in input order.

    Raises
    ------
    ConfigMismatch
        If the configurations disagree on ``n``, ``m`` or ``noise_std``.
    """
    cfgs = list(cfgs)
    if not cfgs:
        raise ConfigError("nothing to compare")
    shared = {(c.n, c.m, c.noise_std) for c in cfgs}
    if len(shared) > 1:
        raise ConfigMismatch(f"configurations disagree on (n, m, noise_std): {sorted(shared)}")
    return [(c.name, run_experiment(replace(c, seed=shared_seed))) for c in cfgs]


def count_ops(algorithm, n, seed=0):
    """Measured per-step MAC count of a streaming estimator at filter length ``n``.

    Runs the estimator on seeded data past its warm-up (the affine-projection
    window fill) and returns the per-step increment, which is constant from
    then on.
    """
    if algorithm not in COUNTABLE:
        raise ConfigError(f"operation counts are defined for {', '.join(COUNTABLE)}")
    cfg = ExperimentConfig(algorithm, n=n, m=4 * n + 8, iters=1, trials=1, seed=seed)
    steps = cfg.order + 4
    cfg = replace(cfg, iters=steps)
    _, _, macs = _run_trial(cfg, seed)
    deltas = np.diff(macs)[-3:]
    if np.any(deltas != deltas[-1]):
        raise AssertionError(f"per-step MAC count of {algorithm} is not constant: {deltas}")
    return int(deltas[-1])


def _fmt(v):
    return format(v, ".17g")


def write_curve_csv(curve, fh, algorithm=None):
    """Write one curve; a non-None ``algorithm`` adds a leading ``algorithm`` column."""
    writer = csv.writer(fh, lineterminator="\n")
    head = list(CSV_FIELDS)
    writer.writerow(head if algorithm is None else ["algorithm"] + head)
    _write_rows(writer, curve, algorithm)


def _write_rows(writer, curve, algorithm):
    for k, e2, p, c in curve.rows():
        row = [str(k), _fmt(e2), _fmt(p), str(c)]
        writer.writerow(row if algorithm is None else [algorithm] + row)


def write_comparison_csv(results, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["algorithm"] + list(CSV_FIELDS))
    for name, curve in results:
        _write_rows(writer, curve, name)


def curve_to_csv(curve):
    buf = io.StringIO()
    write_curve_csv(curve, buf)
    return buf.getvalue()


def read_curve_csv(fh):
    """Parse CSV written by this module into ``{algorithm: LearningCurve}``.

    Single-curve files map to the key ``None``.
    """
    reader = csv.DictReader(fh)
    cols = {}
    for row in reader:
        key = row.get("algorithm")
        cols.setdefault(key, []).append(row)
    out = {}
    for key, rows in cols.items():
        out[key] = LearningCurve(
            np.array([int(r["iteration"]) for r in rows]),
            np.array([float(r["squared_prediction_error"]) for r in rows]),
            np.array([float(r["parameter_error"]) for r in rows]),
            np.array([int(r["cumulative_macs"]) for r in rows]),
        )
    return out
