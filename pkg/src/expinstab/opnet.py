"""Operator matrices in a weighted basis, the Y-norm, quantized delta-nets,
covering counts, and the epsilon/delta bookkeeping of the instability argument.

A class member is a (truncated) matrix b_kl with attached degrees gamma_k and
constants (C2, alpha2, p) such that |b_kl| <= C2 * exp(-alpha2 * max(gamma_k,
gamma_l)) and the degree counting function grows like C2 * (1+n)^p.  The
quantizer rounds all entries below the degree cutoff n_tilde onto the grid
delta' * Z intersected with [-C2, C2] and zeroes the rest; this is a delta-net
in operator norm via the Y-norm comparison constant C4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class OperatorMatrix:
    """Finite truncation of a weighted operator matrix with class constants."""

    entries: np.ndarray
    degrees: np.ndarray
    c2: float
    alpha2: float
    p: float

    def __post_init__(self):
        entries = np.asarray(self.entries)
        degrees = np.asarray(self.degrees, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError("entries must be a square matrix")
        if degrees.shape != (entries.shape[0],):
            raise ValueError("need one degree per basis element")
        entries = entries.copy()
        entries.flags.writeable = False
        degrees = degrees.copy()
        degrees.flags.writeable = False
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "degrees", degrees)

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.entries)

    def max_degree_grid(self) -> np.ndarray:
        return np.maximum.outer(self.degrees, self.degrees)

    def op_norm(self) -> float:
        """Largest singular value of the truncation."""
        return float(np.linalg.norm(self.entries, 2))


def y_norm(matrix: OperatorMatrix) -> float:
    """sup_kl |b_kl| * (2 + max(gamma_k, gamma_l))^(p+1)."""
    weights = (2.0 + matrix.max_degree_grid()) ** (matrix.p + 1)
    return float(np.max(np.abs(matrix.entries) * weights))


@lru_cache(maxsize=1)
def _inverse_square_sum() -> float:
    """sum_{n>=1} (1+n)^-2 by partial sums plus an integral tail bound."""
    n_terms = 200_000
    n = np.arange(1, n_terms + 1, dtype=float)
    partial = float(np.sum((1.0 + n) ** -2))
    # sum_{n>N} (1+n)^-2 lies between 1/(N+2) and 1/(N+1)
    tail = 0.5 * (1.0 / (n_terms + 1) + 1.0 / (n_terms + 2))
    return partial + tail


def c4_constant(c2: float) -> float:
    """Norm-comparison constant C4 = C2 * (sum_{n>=1} (1+n)^-2)^(1/2)."""
    if c2 < 0:
        raise ValueError("C2 must be nonnegative")
    return c2 * math.sqrt(_inverse_square_sum())


def op_norm_bound_check(matrix: OperatorMatrix, tol: float = 1e-12) -> bool:
    """Operator norm of the truncation is controlled by C4 * Y-norm."""
    right = c4_constant(matrix.c2) * y_norm(matrix)
    return matrix.op_norm() <= right + tol * (1.0 + right)


def _envelope(t: float, c2: float, alpha2: float, p: float) -> float:
    return c2 * math.exp(-alpha2 * (t - 1.0)) * (2.0 + t) ** (p + 1.0)


def n_tilde(delta: float, c2: float, alpha2: float, p: float) -> int:
    """Smallest positive integer n with envelope(t) <= delta/(2*C4) for all
    real t >= n.  The envelope has a single maximum at t* = (p+1)/alpha2 - 2,
    so sup_{t>=n} envelope = envelope(max(n, t*))."""
    if not 0.0 < delta < 1.0 / math.e:
        raise ValueError("delta must lie in (0, 1/e)")
    threshold = delta / (2.0 * c4_constant(c2))
    t_star = (p + 1.0) / alpha2 - 2.0
    n = 1
    while _envelope(max(float(n), t_star), c2, alpha2, p) > threshold:
        n += 1
        if n > 10_000_000:
            raise RuntimeError("n_tilde scan failed to terminate")
    return n


def c5_report(delta: float, c2: float, alpha2: float, p: float) -> float:
    """Reported constant with n_tilde <= C5 * log(1/delta)."""
    return n_tilde(delta, c2, alpha2, p) / math.log(1.0 / delta)


@dataclass(frozen=True)
class NetParams:
    """Quantization parameters for one target radius delta."""

    delta: float
    c2: float
    alpha2: float
    p: float
    n_tilde: int
    delta_prime: float
    c4: float

    @classmethod
    def for_delta(cls, delta: float, c2: float, alpha2: float, p: float) -> "NetParams":
        c4 = c4_constant(c2)
        nt = n_tilde(delta, c2, alpha2, p)
        d_prime = (2.0 + nt) ** (-(p + 1.0)) * delta / (2.0 * c4)
        return cls(delta, c2, alpha2, p, nt, d_prime, c4)


def _round_to_grid(values: np.ndarray, step: float, bound: float) -> np.ndarray:
    """Nearest point of step*Z intersected with [-bound, bound], ties toward 0."""
    k = np.ceil(np.abs(values) / step - 0.5)
    k = np.minimum(k, np.floor(bound / step))
    return np.sign(values) * k * step


def quantize(matrix: OperatorMatrix, params: NetParams) -> OperatorMatrix:
    """Round low-degree entries onto the delta' grid and zero the rest.

    For class members this guarantees y_norm(G - quantize(G)) <= delta/(2*C4),
    hence operator-norm distance <= delta/2.  Complex entries are quantized
    component-wise with C2 applying to each component; the component grid step
    shrinks by sqrt(2) so the modulus error stays within delta', which doubles
    the net-size exponent's constant.
    """
    entries = matrix.entries
    bound = params.c2 * (1.0 + 1e-12) + 1e-12
    if matrix.is_complex:
        if np.max(np.abs(entries.real)) > bound or np.max(np.abs(entries.imag)) > bound:
            raise ValueError("entry component outside [-C2, C2]")
        step = params.delta_prime / math.sqrt(2.0)
        rounded = _round_to_grid(entries.real, step, params.c2) + 1j * _round_to_grid(
            entries.imag, step, params.c2
        )
    else:
        if np.max(np.abs(entries)) > bound:
            raise ValueError("entry outside [-C2, C2]")
        rounded = _round_to_grid(entries, params.delta_prime, params.c2)
    keep = matrix.max_degree_grid() <= params.n_tilde
    return OperatorMatrix(
        np.where(keep, rounded, 0.0),
        matrix.degrees,
        matrix.c2,
        matrix.alpha2,
        matrix.p,
    )


@dataclass(frozen=True)
class NetSizeBound:
    """Counted size of the quantized net at one delta."""

    delta: float
    n_tilde: int
    delta_prime: float
    psi_count: int
    pair_count: float
    log_bound: float


def net_size_log_bound(
    delta: float,
    c2: float,
    alpha2: float,
    p: float,
    degrees: np.ndarray | None = None,
) -> NetSizeBound:
    """Log of the counted grid size s * log(#Psi_delta).

    s counts pairs (k, l) with max degree <= n_tilde: exactly when a degree
    sequence is supplied, otherwise through the class growth bound
    C2^2 * (1 + n_tilde)^(2p).  #Psi_delta <= 2*C2/delta' + 1.
    """
    params = NetParams.for_delta(delta, c2, alpha2, p)
    psi_count = 2 * int(math.floor(c2 / params.delta_prime)) + 1
    if degrees is None:
        pair_count = c2**2 * (1.0 + params.n_tilde) ** (2.0 * p)
    else:
        below = int(np.sum(np.asarray(degrees, dtype=float) <= params.n_tilde))
        pair_count = float(below**2)
    return NetSizeBound(
        delta=delta,
        n_tilde=params.n_tilde,
        delta_prime=params.delta_prime,
        psi_count=psi_count,
        pair_count=pair_count,
        log_bound=pair_count * math.log(psi_count),
    )


def c3_report(delta: float, c2: float, alpha2: float, p: float) -> float:
    """Reported constant with counted log net size <= C3 * (-log delta)^(2p+1)."""
    bound = net_size_log_bound(delta, c2, alpha2, p)
    return bound.log_bound / (-math.log(delta)) ** (2.0 * p + 1.0)


def delta_of_epsilon(eps: float, alpha1: float, p: float, alpha3: float = 1.0) -> float:
    """Quantization radius delta(eps) = exp(-eps^(-alpha1/(2p+1+alpha3)));
    the default alpha3 = 1 gives the exponent alpha1/(2(p+1))."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    return math.exp(-(eps ** (-alpha1 / (2.0 * p + 1.0 + alpha3))))


def counting_check(
    eps: float, packing_log_count: float, net_log_bound: float
) -> tuple[bool, float]:
    """Pigeonhole bookkeeping: when the packing log-count exceeds the net
    log-bound, a witness pair with distance >= eps and operator distance
    <= 2*delta(eps) exists.  Returns (exceeds, margin)."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    margin = packing_log_count - net_log_bound
    return margin > 0.0, margin


def random_class_member(
    rng: np.random.Generator,
    c2: float,
    alpha2: float,
    p: float,
    degrees: np.ndarray,
    complex_entries: bool = False,
) -> OperatorMatrix:
    """Draw a matrix uniformly inside the class envelope
    |b_kl| <= C2 * exp(-alpha2 * max(gamma_k, gamma_l))."""
    degrees = np.asarray(degrees, dtype=float)
    k = degrees.size
    envelope = c2 * np.exp(-alpha2 * np.maximum.outer(degrees, degrees))
    entries = rng.uniform(-1.0, 1.0, size=(k, k)) * envelope
    if complex_entries:
        entries = entries + 1j * rng.uniform(-1.0, 1.0, size=(k, k)) * envelope
    return OperatorMatrix(entries, degrees, c2, alpha2, p)


def truncation_size(params: NetParams, minimum: int = 64) -> int:
    """Degree truncation for computed matrices: max(2*n_tilde, minimum)."""
    return max(2 * params.n_tilde, minimum)
