"""Fourier frequencies and the periodogram on the low-frequency band."""

from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidDesignError, InvalidParameterError

__all__ = ["PeriodogramSlice", "bandwidth", "periodogram", "fourier_frequencies"]


@dataclass
class PeriodogramSlice:
    """Periodogram ordinates at the first N nonzero Fourier frequencies."""

    T: int
    freqs: np.ndarray
    ordinates: np.ndarray

    def __post_init__(self):
        n = len(self.ordinates)
        if len(self.freqs) != n:
            raise InvalidParameterError("freqs and ordinates must have equal length")
        if n < 1 or n >= self.T / 2:
            raise InvalidParameterError("need 1 <= N < T/2")
        if not np.all(np.isfinite(self.ordinates)) or np.any(self.ordinates < 0):
            raise InvalidParameterError("ordinates must be finite and nonnegative")
        if np.any(np.diff(self.freqs) <= 0):
            raise InvalidParameterError("frequencies must be strictly increasing")

    @property
    def n_freqs(self):
        return len(self.ordinates)


def fourier_frequencies(T, N):
    """Fourier frequencies 2*pi*j/T for j = 1..N."""
    return 2.0 * np.pi * np.arange(1, N + 1) / T


def bandwidth(T, exponent, P=0):
    """Number of low frequencies used by a semiparametric estimator.

    N = floor(T**exponent), clamped to [P+2, floor((T-1)/2)]: a
    regression with P+2 parameters needs at least that many distinct
    frequencies, and N < T/2 keeps all frequencies below pi.

    Parameters
    ----------
    T : int
        Sample size (>= 8).
    exponent : float
        Bandwidth exponent in (0, 1); 0.7 is the working default.
    P : int, optional
        Number of even-power correction terms in the estimator.

    Returns
    -------
    int
    """
    T = int(T)
    if T < 8:
        raise InvalidDesignError("sample size too small (need T >= 8)")
    if not 0.0 < exponent < 1.0:
        raise InvalidParameterError("bandwidth exponent must lie in (0, 1)")
    lo = int(P) + 2
    hi = (T - 1) // 2
    if lo > hi:
        raise InvalidDesignError(
            f"T={T} leaves only {hi} usable frequencies; need at least {lo}"
        )
    n = int(np.floor(T ** exponent))
    return min(max(n, lo), hi)


def periodogram(y, N):
    """Periodogram of a series at the first N nonzero Fourier frequencies.

    I(l_j) = |sum_t (y_t - ybar) exp(-i l_j t)|^2 / (2 pi T). The sample
    mean is removed first; at nonzero Fourier frequencies this leaves the
    ordinates unchanged in exact arithmetic but keeps them well behaved
    when the level of the series is far from zero.

    Parameters
    ----------
    y : array_like
        Observed series of length T.
    N : int
        Number of ordinates, 1 <= N < T/2.

    Returns
    -------
    PeriodogramSlice
    """
    y = np.asarray(y, dtype=float)
    T = y.size
    N = int(N)
    if not 1 <= N < T / 2:
        raise InvalidParameterError("need 1 <= N < T/2")
    x = y - y.mean()
    dft = np.fft.rfft(x)[1 : N + 1]
    ordinates = (dft.real ** 2 + dft.imag ** 2) / (2.0 * np.pi * T)
    return PeriodogramSlice(T=T, freqs=fourier_frequencies(T, N), ordinates=ordinates)
