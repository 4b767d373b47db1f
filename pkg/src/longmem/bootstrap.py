"""Pre-filtered sieve bootstrap: draws, bias correction, HPD intervals.

The scheme fractionally differences the data by a preliminary memory
value d_f, fits a long autoregression to the filtered series, resamples
paths from that sieve, and integrates each path back with the inverse
filter. Averaging the estimator over the draws yields a bootstrap bias
estimate; iterating the correction with fresh pre-filters sharpens it,
with stochastic stopping rules deciding when to quit.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from .arsieve import (
    ar_residuals,
    burg_fit,
    default_max_order,
    select_order_aic,
    simulate_ar_path,
)
from .estimators import estimate
from .exceptions import EstimationFailedError, InvalidParameterError, LongmemError
from .fracdiff import apply_frac_filter
from .streams import as_seed_sequence, generator_at

__all__ = [
    "BootstrapConfig",
    "SieveFit",
    "BootstrapOutcome",
    "IterationTrace",
    "IterationRecord",
    "prefilter_sieve",
    "bootstrap_draw",
    "bias_correct",
    "stopping_thresholds",
    "iterate_bias_correct",
    "hpd_interval",
    "DETERMINISTIC_WINDOW",
]

# Updates leaving this window are discarded and iteration stops.
DETERMINISTIC_WINDOW = (-1.0, 1.5)

_MODES = ("parametric", "nonparametric")


@dataclass
class BootstrapConfig:
    """Settings of the sieve bootstrap.

    innovation_mode 'parametric' draws Gaussian innovations scaled by the
    residual standard deviation; 'nonparametric' resamples the
    standardized residuals with replacement. ``rng_stream`` is a
    SeedSequence (or int seed); every draw receives its own child stream,
    so draws are reproducible and order-independent.
    """

    B: int
    innovation_mode: str = "parametric"
    rng_stream: object = 0
    h_max: int = None

    def __post_init__(self):
        if self.B < 2:
            raise InvalidParameterError("need at least B = 2 bootstrap draws")
        if self.innovation_mode not in _MODES:
            raise InvalidParameterError(f"innovation mode must be one of {_MODES}")
        self.rng_stream = as_seed_sequence(self.rng_stream)


@dataclass
class SieveFit:
    """Filtered series and its fitted sieve, reused across all B draws."""

    d_f: float
    filtered: np.ndarray
    fit: object
    residuals: object


@dataclass
class BootstrapOutcome:
    """Result of one bias-correction pass."""

    draws: np.ndarray
    d_f: float
    d_hat: float
    bias_hat: float
    d_tilde: float
    hpd: tuple = None
    retries: int = 0


@dataclass
class IterationRecord:
    """One step of the iterative correction."""

    k: int
    d_current: float
    bias_hat: float
    d_next: float
    tau1: float
    tau2: float
    crit1: float
    crit2: float
    stop_reason: str = None


@dataclass
class IterationTrace:
    """Full history of the iterative bias correction."""

    records: list = field(default_factory=list)
    final: float = math.nan
    stop_reason: str = None
    d_initial: float = math.nan
    outcomes: list = field(default_factory=list)


def prefilter_sieve(y, d_f, config):
    """Filter the data by d_f and fit the autoregressive sieve once.

    The sieve order is chosen by AIC below the cap floor((log T)^2)
    (and T/4), and the parameters come from Burg's algorithm.
    """
    y = np.asarray(y, dtype=float)
    w_f = apply_frac_filter(y, d_f)
    h_cap = config.h_max if config.h_max is not None else default_max_order(y.size)
    h = select_order_aic(w_f, h_cap)
    fit = burg_fit(w_f, h)
    res = ar_residuals(w_f, fit)
    return SieveFit(d_f=float(d_f), filtered=w_f, fit=fit, residuals=res)


def bootstrap_draw(y, d_f, config, sieve, rng):
    """Generate one pre-filtered sieve bootstrap replica of the data.

    Innovations are drawn per ``config.innovation_mode``, the AR path is
    seeded with an h-block of the filtered series starting at a uniform
    random position, and the inverse filter (-d_f) maps the path back to
    the observation scale.

    Parameters
    ----------
    y : array_like
        Original series (defines the length).
    d_f : float
        Pre-filtering value used to build `sieve`.
    config : BootstrapConfig
    sieve : SieveFit
        Output of :func:`prefilter_sieve` for (y, d_f).
    rng : numpy.random.Generator
        Private stream of this draw.

    Returns
    -------
    ndarray
        Bootstrap series of the same length as `y`.
    """
    T = np.asarray(y).size
    res = sieve.residuals
    if config.innovation_mode == "parametric":
        eps = res.scale * rng.standard_normal(T)
    else:
        picks = rng.integers(0, T, size=T)
        eps = res.scale * res.standardized[picks]
    h = sieve.fit.order
    if h > 0:
        tau = int(rng.integers(h, T + 1))  # uniform on {h, ..., T}, 1-based
        init = sieve.filtered[tau - h : tau]
    else:
        init = np.empty(0)
    w_star = simulate_ar_path(sieve.fit, eps, init)
    return apply_frac_filter(w_star, -d_f)


def _estimate_draws(y, spec, d_f, config, iteration, estimator_fn):
    """Run B draws and estimates; failed draws are redrawn once."""
    sieve = prefilter_sieve(y, d_f, config)
    draws = np.empty(config.B)
    retries = 0
    for b in range(config.B):
        attempt = 0
        while True:
            rng = generator_at(config.rng_stream, iteration, b, attempt)
            ystar = bootstrap_draw(y, d_f, config, sieve, rng)
            try:
                draws[b] = estimator_fn(ystar)
                break
            except LongmemError as exc:
                attempt += 1
                retries += 1
                if attempt > 1:
                    raise EstimationFailedError(
                        f"draw {b} failed twice at iteration {iteration}: {exc}"
                    ) from exc
    return draws, retries


def bias_correct(
    y,
    spec,
    d_f,
    config,
    alpha_lower=0.025,
    alpha_upper=0.025,
    estimator_fn=None,
):
    """One-shot bootstrap bias correction of a memory estimator.

    Estimates the bias as (mean of the B bootstrap estimates) - d_f and
    subtracts it from the point estimate on the data. Also returns the
    HPD interval built from the mean-corrected draws.

    Parameters
    ----------
    y : array_like
    spec : EstimatorSpec
        Estimator to correct; also used on every draw.
    d_f : float
        Pre-filtering value (normally the estimate itself).
    config : BootstrapConfig
    alpha_lower, alpha_upper : float
        Tail masses of the HPD interval.
    estimator_fn : callable, optional
        Override mapping a series to d-hat; used by tests.

    Returns
    -------
    BootstrapOutcome
    """
    if not np.isfinite(d_f):
        raise InvalidParameterError("pre-filter value must be finite")
    if estimator_fn is None:
        estimator_fn = lambda s: estimate(s, spec).d_hat
    d_hat = float(estimator_fn(np.asarray(y, dtype=float)))
    draws, retries = _estimate_draws(y, spec, d_f, config, 0, estimator_fn)
    bias_hat = float(draws.mean() - d_f)
    hpd = hpd_interval(draws, d_hat, alpha_lower, alpha_upper)
    return BootstrapOutcome(
        draws=draws,
        d_f=float(d_f),
        d_hat=d_hat,
        bias_hat=bias_hat,
        d_tilde=d_hat - bias_hat,
        hpd=hpd,
        retries=retries,
    )


def _p_schedule(k, P):
    """Continuation probabilities of the stopping rules."""
    if P == 0:
        if k == 0:
            return 0.95
        if k == 1:
            return 0.9
        return 0.1 * 2.0 ** (1 - k)
    if k == 0:
        return 0.9
    return 0.1 * 2.0 ** (-k)


def stopping_thresholds(k, N, B, upsilon, P):
    """Tolerances (tau1, tau2) of the two stochastic stopping rules.

    Rule 1 compares successive iterates; its scale follows the variance
    recursion Var[k] = 2 Var[k-1] + u^2/(N B) started at u^2/N, plus one
    more u^2/(N B) for the fresh bias estimate. Rule 2 compares the
    accumulated correction with the current bias estimate, with variance
    (u^2/N)(1 + 2^{k-1}(1 + 1/B)); at k = 0 the first-iteration form
    (2^{k-1} -> 1) is used. Both are scaled by the normal quantile at a
    continuation probability p_k that shrinks as k grows and depends on
    whether the underlying estimator carries correction terms (P >= 1).

    Parameters
    ----------
    k : int
        Iteration index (>= 0).
    N : int
        Bandwidth of the estimator.
    B : int or float
        Number of bootstrap draws (inf allowed for limits).
    upsilon : float
        omega * psi_P of the corrected estimator.
    P : int
        Correction order; selects the p-schedule.

    Returns
    -------
    (tau1, tau2)
    """
    if k < 0:
        raise InvalidParameterError("iteration index must be >= 0")
    u2 = upsilon * upsilon
    base = u2 / N
    noise = u2 / (N * B)
    var_k = base
    for _ in range(k):
        var_k = 2.0 * var_k + noise
    p_k = _p_schedule(k, P)
    z = norm.ppf(1.0 - p_k / 2.0)
    tau1 = z * math.sqrt(var_k + noise)
    power = 2.0 ** (k - 1) if k >= 1 else 1.0
    tau2 = z * math.sqrt(base * (1.0 + power * (1.0 + 1.0 / B)))
    return tau1, tau2


def iterate_bias_correct(
    y,
    spec,
    config,
    max_iter=10,
    thresholds_fn=None,
    deterministic_window=DETERMINISTIC_WINDOW,
    alpha_lower=0.025,
    alpha_upper=0.025,
    estimator_fn=None,
):
    """Iterative bootstrap bias correction with stochastic stopping rules.

    Starting from the point estimate, each iteration pre-filters with the
    current value, estimates its bias from B fresh draws and subtracts
    it. Iteration continues only while BOTH |change| > tau1 and
    |accumulated correction - current bias| > tau2; when either rule
    binds, the newly corrected value is returned. An update falling
    outside `deterministic_window` is discarded and the previous value
    returned instead.

    Parameters
    ----------
    y : array_like
    spec : EstimatorSpec
    config : BootstrapConfig
    max_iter : int
        Hard cap on iterations (reported as stop reason 'max-iter').
    thresholds_fn : callable, optional
        Override (k, N, B, upsilon, P) -> (tau1, tau2); tests use this to
        force stops or force continuation.
    deterministic_window : tuple or None
        Bounds for the update; None disables the check (fixed-K mode).

    Returns
    -------
    IterationTrace
    """
    if max_iter < 1:
        raise InvalidParameterError("max_iter must be >= 1")
    if thresholds_fn is None:
        thresholds_fn = stopping_thresholds
    if estimator_fn is None:
        estimator_fn = lambda s: estimate(s, spec).d_hat

    y = np.asarray(y, dtype=float)
    first = estimate(y, spec)
    n_band = first.N
    upsilon = first.asymptotic_sd * math.sqrt(n_band)
    d0 = float(estimator_fn(y))

    trace = IterationTrace(d_initial=d0)
    d_cur = d0
    for k in range(max_iter):
        tau1, tau2 = thresholds_fn(k, n_band, config.B, upsilon, spec.P)
        draws, retries = _estimate_draws(y, spec, d_cur, config, k, estimator_fn)
        bias_k = float(draws.mean() - d_cur)
        d_next = d_cur - bias_k
        crit1 = abs(d_next - d_cur)
        crit2 = abs(d0 - d_cur - bias_k)
        record = IterationRecord(
            k=k,
            d_current=d_cur,
            bias_hat=bias_k,
            d_next=d_next,
            tau1=tau1,
            tau2=tau2,
            crit1=crit1,
            crit2=crit2,
        )
        trace.records.append(record)
        if k == 0:
            trace.outcomes.append(
                BootstrapOutcome(
                    draws=draws,
                    d_f=d_cur,
                    d_hat=d0,
                    bias_hat=bias_k,
                    d_tilde=d_next,
                    hpd=hpd_interval(draws, d0, alpha_lower, alpha_upper),
                    retries=retries,
                )
            )
        if deterministic_window is not None and not (
            deterministic_window[0] <= d_next < deterministic_window[1]
        ):
            record.stop_reason = "deterministic"
            trace.final = d_cur
            trace.stop_reason = "deterministic"
            return trace
        if crit1 <= tau1 or crit2 <= tau2:
            record.stop_reason = "rule1" if crit1 <= tau1 else "rule2"
            trace.final = d_next
            trace.stop_reason = record.stop_reason
            return trace
        d_cur = d_next
    trace.records[-1].stop_reason = "max-iter"
    trace.final = d_cur
    trace.stop_reason = "max-iter"
    return trace


def hpd_interval(draws, d_hat, alpha_lower=0.025, alpha_upper=0.025):
    """Highest-density bootstrap interval, recentered at the estimate.

    Mean-corrects the draws, sorts them, scans all windows of
    m = ceil((1 - a_L - a_U) B) consecutive order statistics for the
    narrowest one, and maps its endpoints (q_L, q_U) to the interval
    (d_hat - q_U, d_hat - q_L).

    Parameters
    ----------
    draws : array_like
        Bootstrap estimates, length >= 10.
    d_hat : float
        Point estimate at which the interval is centered.
    alpha_lower, alpha_upper : float
        Tail masses, with alpha_lower + alpha_upper < 1.

    Returns
    -------
    (lo, hi)
    """
    draws = np.asarray(draws, dtype=float)
    B = draws.size
    if B < 10:
        raise InvalidParameterError("need at least 10 draws")
    if not 0.0 <= alpha_lower + alpha_upper < 1.0:
        raise InvalidParameterError("tail masses must satisfy a_L + a_U < 1")
    m = int(math.ceil((1.0 - alpha_lower - alpha_upper) * B))
    if m > B:
        raise InvalidParameterError("window larger than the number of draws")
    centered = np.sort(draws - draws.mean())
    widths = centered[m - 1 :] - centered[: B - m + 1]
    i = int(np.argmin(widths))  # first narrowest window
    q_lo = centered[i]
    q_hi = centered[i + m - 1]
    return (d_hat - q_hi, d_hat - q_lo)
