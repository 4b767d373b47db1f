"""Autoregressive approximation: Levinson-Durbin, Burg, AIC, residuals.

Sign convention throughout: an AR(h) fit is stored as ``phi`` with
phi[0] = 1, so the innovation is eps(t) = sum_{j=0}^{h} phi[j] w(t-j).
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter, lfiltic

from .exceptions import (
    DegenerateInputError,
    InvalidParameterError,
    NumericalDegeneracyError,
)

__all__ = [
    "ArFit",
    "ResidualSet",
    "levinson_durbin",
    "burg_fit",
    "select_order_aic",
    "ar_residuals",
    "simulate_ar_path",
    "default_max_order",
]


@dataclass
class ArFit:
    """Fitted AR(h) filter with unit leading coefficient."""

    order: int
    phi: np.ndarray
    sigma2: float
    reflection: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        self.phi = np.asarray(self.phi, dtype=float)
        if self.phi.size != self.order + 1 or self.phi[0] != 1.0:
            raise InvalidParameterError("phi must have length order+1 with phi[0]=1")
        if not self.sigma2 > 0:
            raise InvalidParameterError("innovation variance must be positive")

    def is_stable(self):
        """True when all zeros of sum_j phi[j] z^j lie outside the unit circle."""
        if self.reflection is not None and self.reflection.size == self.order:
            return bool(np.all(np.abs(self.reflection) < 1.0))
        if self.order == 0:
            return True
        roots = np.roots(self.phi)  # roots of phi[0] u^h + ... + phi[h]
        return bool(np.all(np.abs(roots) < 1.0))


@dataclass
class ResidualSet:
    """Raw and standardized one-step residuals of an AR fit."""

    raw: np.ndarray
    standardized: np.ndarray
    scale: float


def default_max_order(T):
    """Ceiling for the sieve order: floor((log T)^2), capped at T // 4."""
    return max(1, min(int(math.log(T) ** 2), T // 4))


def _coeffs_from_reflections(ks):
    """Assemble AR coefficients (phi convention) from reflection coefficients."""
    a = np.array([1.0])
    for k in ks:
        m = a.size
        nxt = np.empty(m + 1)
        nxt[0] = 1.0
        nxt[1:m] = a[1:m] + k * a[m - 1 : 0 : -1]
        nxt[m] = k
        a = nxt
    return a


def levinson_durbin(acvf):
    """Solve the Yule-Walker equations for all orders 1..h.

    Parameters
    ----------
    acvf : array_like
        Autocovariances gamma(0..h), gamma(0) > 0, with a positive
        definite Toeplitz matrix.

    Returns
    -------
    list of ArFit
        Fits of order 1, 2, ..., h. Prediction-error variances are
        non-increasing and every reflection coefficient lies in (-1, 1).
    """
    g = np.asarray(acvf, dtype=float)
    if g.ndim != 1 or g.size < 2:
        raise InvalidParameterError("need gamma(0..h) with h >= 1")
    if not np.all(np.isfinite(g)):
        raise InvalidParameterError("autocovariances must be finite")
    if g[0] <= 0:
        raise NumericalDegeneracyError("gamma(0) must be positive")

    h = g.size - 1
    fits = []
    a = np.array([1.0])
    ks = []
    sigma2 = g[0]
    for m in range(1, h + 1):
        k = -np.dot(a, g[m::-1][: m]) / sigma2  # a has length m
        if not np.isfinite(k) or abs(k) >= 1.0:
            raise NumericalDegeneracyError(
                f"autocovariance sequence is not positive definite at order {m}"
            )
        nxt = np.empty(m + 1)
        nxt[0] = 1.0
        nxt[1:m] = a[1:m] + k * a[m - 1 : 0 : -1]
        nxt[m] = k
        a = nxt
        ks.append(k)
        sigma2 = sigma2 * (1.0 - k * k)
        fits.append(
            ArFit(order=m, phi=a.copy(), sigma2=sigma2, reflection=np.array(ks))
        )
    return fits


def _burg_reflections(w, h_max):
    """One Burg sweep: reflection coefficients and error variances to h_max."""
    w = np.asarray(w, dtype=float)
    T = w.size
    f = w.copy()
    b = w.copy()
    ks = np.empty(h_max)
    sig = np.empty(h_max)
    e = np.dot(w, w) / T
    for m in range(1, h_max + 1):
        fm = f[m:]
        bm = b[m - 1 : T - 1]
        den = np.dot(fm, fm) + np.dot(bm, bm)
        if den <= 0.0:
            raise NumericalDegeneracyError(f"degenerate input at Burg order {m}")
        k = -2.0 * np.dot(fm, bm) / den
        if abs(k) >= 1.0:
            raise NumericalDegeneracyError(
                f"Burg reflection coefficient hit the unit boundary at order {m}"
            )
        f_new = fm + k * bm
        b_new = bm + k * fm
        f[m:] = f_new
        b[m:] = b_new
        e = e * (1.0 - k * k)
        ks[m - 1] = k
        sig[m - 1] = e
    return ks, sig


def burg_fit(w, h):
    """Fit an AR(h) model by Burg's forward/backward error recursion.

    Parameters
    ----------
    w : array_like
        Series of length T > 2h.
    h : int
        Autoregressive order, h >= 1.

    Returns
    -------
    ArFit
        Stable fit (all reflection coefficients in (-1, 1)).
    """
    w = np.asarray(w, dtype=float)
    h = int(h)
    if h < 1:
        raise InvalidParameterError("Burg order must be >= 1")
    if w.size <= 2 * h:
        raise InvalidParameterError("need T > 2h observations")
    ks, sig = _burg_reflections(w, h)
    phi = _coeffs_from_reflections(ks)
    return ArFit(order=h, phi=phi, sigma2=float(sig[-1]), reflection=ks)


def select_order_aic(w, h_max):
    """Select the sieve order by AIC over h = 1..h_max.

    AIC(h) = T*log(sigma_h^2) + 2h, with all variances taken from a
    single Burg sweep to h_max. Ties break toward the smaller order.
    """
    w = np.asarray(w, dtype=float)
    h_max = int(h_max)
    if h_max < 1:
        raise InvalidParameterError("h_max must be >= 1")
    if w.size <= 2 * h_max:
        raise InvalidParameterError("need T > 2*h_max observations")
    _, sig = _burg_reflections(w, h_max)
    T = w.size
    aic = T * np.log(sig) + 2.0 * np.arange(1, h_max + 1)
    return int(np.argmin(aic)) + 1  # argmin returns the first minimum


def ar_residuals(w, fit):
    """One-step residuals of an AR fit, standardized in-sample.

    Pre-sample values are taken from the end of the series
    (w(1-j) = w(T-j+1), j = 1..h), so exactly T residuals come back.
    Standardization removes the residual mean and divides by the
    maximum-likelihood scale, giving mean 0 and variance 1 in-sample.
    """
    w = np.asarray(w, dtype=float)
    T = w.size
    h = fit.order
    if h >= T:
        raise InvalidParameterError("fit order must be below the sample size")
    if h == 0:
        raw = w.copy()
    else:
        wext = np.concatenate([w[T - h :], w])
        raw = np.convolve(wext, fit.phi, mode="valid")
    mean = raw.mean()
    scale = math.sqrt(np.mean((raw - mean) ** 2))
    if scale == 0.0:
        raise DegenerateInputError("residuals are constant; cannot standardize")
    return ResidualSet(raw=raw, standardized=(raw - mean) / scale, scale=scale)


def simulate_ar_path(fit, innovations, init_block):
    """Run the AR(h) recursion sum_j phi[j] w(t-j) = eps(t) forward.

    Parameters
    ----------
    fit : ArFit
        Stable AR fit.
    innovations : array_like
        eps(1..T).
    init_block : array_like
        Pre-sample values (w(1-h), ..., w(0)) in natural time order;
        length must equal the fit order.

    Returns
    -------
    ndarray of length T
    """
    eps = np.asarray(innovations, dtype=float)
    init = np.asarray(init_block, dtype=float)
    h = fit.order
    if init.size != h:
        raise InvalidParameterError("init block length must equal the fit order")
    if not fit.is_stable():
        raise InvalidParameterError("AR fit is not stable")
    if h == 0:
        return eps.copy()
    zi = lfiltic([1.0], fit.phi, y=init[::-1])
    path, _ = lfilter([1.0], fit.phi, eps, zi=zi)
    return path
