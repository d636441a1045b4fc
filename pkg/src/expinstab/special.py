"""Bessel and Hankel functions of integer order on the real line.

J_n is computed by Miller's backward recurrence normalized with
J_0 + 2*sum_k J_2k = 1; Y_n by forward recurrence seeded with Y_0, Y_1 from
their power series (x < 13) or the large-argument P/Q asymptotic expansions
(x >= 13); H_n^(1) = J_n + i*Y_n.  Targets relative accuracy ~1e-10 for
n <= 80 on x in [0.3, 60] (series branches stay accurate down to x -> 0).
"""

from __future__ import annotations

import math

import numpy as np

EULER_GAMMA = 0.577215664901532860606512090082

_SERIES_SPLIT = 13.0
_X_MAX = 200.0


def _check_x(x: np.ndarray) -> None:
    if np.any(x <= 0.0) or np.any(x > _X_MAX):
        raise ValueError(f"argument must lie in (0, {_X_MAX}]")


# ----------------------------------------------------------------------------
# order 0 and 1 by series / asymptotics (vectorized workhorses for kernels)
# ----------------------------------------------------------------------------

def _harmonic_numbers(k_max: int) -> np.ndarray:
    h = np.zeros(k_max + 1)
    h[1:] = np.cumsum(1.0 / np.arange(1, k_max + 1))
    return h


def _j0_j1_series(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    q = 0.25 * x * x
    j0 = np.ones_like(x)
    j1 = np.ones_like(x)
    t0 = np.ones_like(x)
    t1 = np.ones_like(x)
    for k in range(1, 60):
        t0 = t0 * (-q) / (k * k)
        t1 = t1 * (-q) / (k * (k + 1))
        j0 += t0
        j1 += t1
        if max(np.max(np.abs(t0)), np.max(np.abs(t1))) < 1e-18:
            break
    return j0, 0.5 * x * j1


def _y0_y1_series(x: np.ndarray, j0: np.ndarray, j1: np.ndarray):
    q = 0.25 * x * x
    lg = np.log(0.5 * x) + EULER_GAMMA
    h = _harmonic_numbers(61)
    # Y0 = (2/pi) [lg*J0 + sum_{k>=1} (-1)^(k+1) H_k q^k / (k!)^2]
    s0 = np.zeros_like(x)
    tk = np.ones_like(x)
    for k in range(1, 60):
        tk = tk * q / (k * k)
        s0 += (-1.0) ** (k + 1) * h[k] * tk
        if np.max(np.abs(tk)) * h[k] < 1e-18:
            break
    y0 = (2.0 / math.pi) * (lg * j0 + s0)
    # Y1 = (2/pi) lg*J1 - 2/(pi x) - (x/2pi) sum_k (-1)^k (H_k+H_{k+1}) q^k/(k!(k+1)!)
    s1 = np.zeros_like(x)
    tk = np.ones_like(x)
    for k in range(0, 60):
        if k > 0:
            tk = tk * q / (k * (k + 1))
        s1 += (-1.0) ** k * (h[k] + h[k + 1]) * tk
        if np.max(np.abs(tk)) * (h[k] + h[k + 1]) < 1e-18:
            break
    y1 = (2.0 / math.pi) * lg * j1 - 2.0 / (math.pi * x) - (x / (2.0 * math.pi)) * s1
    return y0, y1


def _pq_asymptotic(n: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """P(n, x), Q(n, x) of the Hankel asymptotic expansion, truncated at the
    smallest term."""
    mu = 4.0 * n * n
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    prev = np.full_like(x, np.inf)
    for k in range(1, 40):
        term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        mag = np.max(np.abs(term))
        if mag > np.max(np.abs(prev)):
            break
        if k % 2 == 1:
            q += term * (-1.0) ** ((k - 1) // 2)
        else:
            p += term * (-1.0) ** (k // 2)
        prev = term
        if mag < 1e-18:
            break
    return p, q


def _jy01_asymptotic(x: np.ndarray):
    amp = np.sqrt(2.0 / (math.pi * x))
    out = []
    for n in (0, 1):
        p, q = _pq_asymptotic(n, x)
        chi = x - (0.5 * n + 0.25) * math.pi
        c, s = np.cos(chi), np.sin(chi)
        out.append((amp * (p * c - q * s), amp * (p * s + q * c)))
    (j0, y0), (j1, y1) = out
    return j0, j1, y0, y1


def _jy01(x: np.ndarray):
    """J0, J1, Y0, Y1 on positive arguments, series below 13, asymptotic above."""
    x = np.asarray(x, dtype=float)
    small = x < _SERIES_SPLIT
    j0 = np.empty_like(x)
    j1 = np.empty_like(x)
    y0 = np.empty_like(x)
    y1 = np.empty_like(x)
    if np.any(small):
        xs = x[small]
        j0s, j1s = _j0_j1_series(xs)
        y0s, y1s = _y0_y1_series(xs, j0s, j1s)
        j0[small], j1[small], y0[small], y1[small] = j0s, j1s, y0s, y1s
    if np.any(~small):
        xl = x[~small]
        j0l, j1l, y0l, y1l = _jy01_asymptotic(xl)
        j0[~small], j1[~small], y0[~small], y1[~small] = j0l, j1l, y0l, y1l
    return j0, j1, y0, y1


# ----------------------------------------------------------------------------
# sequences up to order n
# ----------------------------------------------------------------------------

def bessel_j_sequence(n_max: int, x) -> np.ndarray:
    """J_0(x)..J_n_max(x) by backward recurrence with series normalization.

    Shape of the result: (n_max + 1,) + shape(x).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    _check_x(x)
    if n_max <= 1:
        j0, j1, _, _ = _jy01(x)
        return np.stack([j0, j1][: n_max + 1])

    top = max(n_max, int(np.ceil(np.max(x))))
    start = top + max(20, int(math.isqrt(40 * top)))
    out = np.zeros((n_max + 1,) + x.shape)
    jp = np.zeros_like(x)            # J_{k+1}
    jc = np.full_like(x, 1e-30)      # J_k, arbitrary seed
    norm = np.zeros_like(x)
    for k in range(start, -1, -1):
        if k <= n_max:
            out[k] = jc
        if k % 2 == 0 and k >= 2:
            norm += 2.0 * jc
        if k == 0:
            norm += jc
            break
        jm = (2.0 * k / x) * jc - jp
        jp, jc = jc, jm
        big = np.abs(jc) > 1e250
        if np.any(big):
            scale = np.where(big, 1e-250, 1.0)
            jc = jc * scale
            jp = jp * scale
            norm = norm * scale
            out *= scale  # stored rows share the column scale
    return out / norm


def bessel_y_sequence(n_max: int, x) -> np.ndarray:
    """Y_0(x)..Y_n_max(x): series/asymptotic seeds, forward recurrence."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    _check_x(x)
    _, _, y0, y1 = _jy01(x)
    out = np.zeros((n_max + 1,) + x.shape)
    out[0] = y0
    if n_max >= 1:
        out[1] = y1
    for n in range(1, n_max):
        out[n + 1] = (2.0 * n / x) * out[n] - out[n - 1]
    return out


def bessel_j(n: int, x):
    """Bessel function of the first kind, integer order n >= 0."""
    if n < 0:
        raise ValueError("order must be nonnegative")
    seq = bessel_j_sequence(n, np.ravel(x))[n]
    return float(seq[0]) if np.isscalar(x) else seq.reshape(np.shape(x))


def bessel_y(n: int, x):
    """Bessel function of the second kind, integer order n >= 0."""
    if n < 0:
        raise ValueError("order must be nonnegative")
    seq = bessel_y_sequence(n, np.ravel(x))[n]
    return float(seq[0]) if np.isscalar(x) else seq.reshape(np.shape(x))


def hankel1(n: int, x):
    """Hankel function of the first kind: H_n^(1) = J_n + i Y_n."""
    j = bessel_j(n, x)
    y = bessel_y(n, x)
    return j + 1j * y


def hankel1_sequence(n_max: int, x) -> np.ndarray:
    return bessel_j_sequence(n_max, x) + 1j * bessel_y_sequence(n_max, x)


def jy01_kernel(x: np.ndarray):
    """Fast vectorized (J0, J1, Y0, Y1) for boundary-integral kernels."""
    x = np.asarray(x, dtype=float)
    _check_x(x)
    return _jy01(x)
