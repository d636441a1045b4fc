"""Discrete families of perturbed defects with certified separation.

The construction partitions the base segment/circle into disjoint cells of
half-width w >= 2*eps and places, per selected bit, one polynomial bump of
height eps in the cell center.  Two families members with different bit
patterns then disagree on a full cell: a bump peak of height eps faces a flat
stretch of half-width >= 2*eps on the other shape, which certifies pairwise
Hausdorff distance >= eps without any case analysis.  The family is indexed
lazily by bit patterns; its certified cardinality 2**cell_count is never
enumerated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial import Polynomial

from expinstab import shapes
from expinstab.shapes import FlatProfile, RadialProfile, Shape

# construction targets 95% of the norm budget: the discrete C^m norm
# under-approximates the true one, so membership keeps this safety margin
NORM_MARGIN = 0.95


def bump_values(m: int, height: float, half_width: float, t: np.ndarray) -> np.ndarray:
    """Samples of the bump b(t) = height * (1 - (t/half_width)^2)^(m+1).

    b has m continuous derivatives, all vanishing at +-half_width.
    """
    s = np.clip(np.abs(np.asarray(t, dtype=float)) / half_width, 0.0, 1.0)
    return height * (1.0 - s**2) ** (m + 1)


def build_bump(m: int, height: float, half_width: float, samples: int = 257) -> np.ndarray:
    """Uniform samples of the order-m bump on [-half_width, half_width]."""
    if height < 0 or half_width <= 0:
        raise ValueError("bump needs height >= 0 and half_width > 0")
    t = np.linspace(-half_width, half_width, samples)
    return bump_values(m, height, half_width, t)


@lru_cache(maxsize=None)
def bump_derivative_maxima(m: int) -> np.ndarray:
    """sup over [-1,1] of |d^k/dt^k (1-t^2)^(m+1)| for k = 0..m.

    Computed exactly from the polynomial coefficients: critical points are
    roots of the next derivative.
    """
    phi = Polynomial([1.0, 0.0, -1.0]) ** (m + 1)
    out = np.empty(m + 1)
    for k in range(m + 1):
        dk = phi.deriv(k)
        roots = dk.deriv().roots()
        cand = roots[np.isreal(roots)].real
        cand = cand[(cand >= -1.0) & (cand <= 1.0)]
        pts = np.concatenate([cand, [-1.0, 1.0]])
        out[k] = np.abs(dk(pts)).max()
    return out


def bump_norm_constant(m: int) -> float:
    """K(m): the order-m derivative maximum, so that the bump of height h and
    half-width w has C^m norm h*K(m)/w^m once w is small enough for the top
    order to dominate."""
    return float(bump_derivative_maxima(m)[m])


def _norm_half_width(m: int, height: float, beta: float) -> float:
    """Smallest half-width keeping the bump's true C^m norm <= NORM_MARGIN*beta."""
    maxima = bump_derivative_maxima(m)
    budget = NORM_MARGIN * beta
    if height > budget:
        raise ValueError(f"bump height {height} exceeds norm budget {budget}")
    w = 0.0
    for k in range(1, m + 1):
        w = max(w, (height * maxima[k] / budget) ** (1.0 / k))
    return w


@dataclass(frozen=True)
class ShapeClass:
    """Parameters of one perturbation class (kind, base geometry, m, beta)."""

    kind: str = shapes.RADIAL_SUBGRAPH
    base: float = 0.5
    m: int = 1
    beta: float = 1.0
    center: tuple[float, float] = (0.0, 0.0)
    grid_size: int = shapes.DEFAULT_GRID

    @property
    def is_radial(self) -> bool:
        return self.kind in (shapes.RADIAL_GRAPH, shapes.RADIAL_SUBGRAPH)

    @property
    def usable_length(self) -> float:
        # flat profiles must vanish near the segment ends; keep 5% clear per side
        if self.is_radial:
            return 2.0 * np.pi * self.base
        return 2.0 * self.base * 0.9


def cell_half_width(cls: ShapeClass, eps: float) -> float:
    """Cell half-width: >= 2*eps for the separation argument and wide enough
    for the height-eps bump to respect the norm budget."""
    return max(2.0 * eps, _norm_half_width(cls.m, eps, cls.beta))


def class_eps0(cls: ShapeClass) -> float:
    """Largest eps for which at least two cells fit on the base."""
    # cell_half_width is strictly increasing in eps; bisect w(eps) = L/4
    target = cls.usable_length / 4.0
    lo, hi = 0.0, cls.usable_length
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        try:
            w = cell_half_width(cls, mid)
        except ValueError:
            hi = mid
            continue
        if w <= target:
            lo = mid
        else:
            hi = mid
    return lo


@dataclass(frozen=True)
class PackingFamily:
    """Lazily indexable eps-discrete family: bit pattern -> Shape."""

    shape_class: ShapeClass
    eps: float
    cell_count: int
    bump_half_width: float
    cell_centers: np.ndarray  # flat: positions on the segment; radial: angles
    _cell_slices: tuple = field(repr=False, default=())
    _cell_bumps: tuple = field(repr=False, default=())

    @property
    def certified_log_cardinality(self) -> float:
        return self.cell_count * math.log(2.0)

    @property
    def eps0(self) -> float:
        return class_eps0(self.shape_class)

    def pattern_bits(self, pattern: int) -> np.ndarray:
        if not 0 <= pattern < (1 << self.cell_count):
            raise ValueError(f"pattern must be in [0, 2^{self.cell_count})")
        return np.array([(pattern >> c) & 1 for c in range(self.cell_count)], dtype=bool)

    def shape(self, pattern: int) -> Shape:
        bits = self.pattern_bits(pattern)
        cls = self.shape_class
        values = np.zeros(cls.grid_size)
        for c in np.nonzero(bits)[0]:
            idx, bump = self._cell_slices[c], self._cell_bumps[c]
            values[idx] = bump
        if cls.is_radial:
            profile = RadialProfile(
                values,
                base_radius=cls.base,
                center=cls.center,
                smoothness_order=cls.m,
                norm_bound=cls.beta,
                amplitude_cap=self.eps,
            )
        else:
            profile = FlatProfile(
                values,
                half_width=cls.base,
                smoothness_order=cls.m,
                norm_bound=cls.beta,
                amplitude_cap=self.eps,
            )
        return Shape(cls.kind, profile)

    def base_shape(self) -> Shape:
        return self.shape(0)

    def sample_patterns(self, rng: np.random.Generator, count: int) -> list[int]:
        """Distinct patterns, deterministic given the generator state."""
        total = 1 << self.cell_count
        if total <= count:
            return list(range(total))
        seen: dict[int, None] = {}
        while len(seen) < count:
            bits = rng.integers(0, 2, size=self.cell_count)
            pattern = int(sum(int(b) << c for c, b in enumerate(bits)))
            seen.setdefault(pattern, None)
        return list(seen)


def build_packing(cls: ShapeClass, eps: float) -> PackingFamily:
    """Construct the eps-discrete family; refuses eps >= eps0 of the class."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    eps0 = class_eps0(cls)
    if eps >= eps0:
        raise ValueError(f"eps={eps} too large for this class: needs eps < eps0={eps0:.6g}")
    w = cell_half_width(cls, eps)
    length = cls.usable_length
    mc = int(length // (2.0 * w))
    if mc < 2:  # unreachable below eps0, kept as a guard
        raise ValueError(f"eps={eps} leaves fewer than two cells (eps0={eps0:.6g})")

    m_grid = cls.grid_size
    slices, bumps = [], []
    if cls.is_radial:
        centers = 2.0 * np.pi * (np.arange(mc) + 0.5) / mc
        theta = 2.0 * np.pi * np.arange(m_grid) / m_grid
        half_angle = w / cls.base
        for theta_c in centers:
            delta = np.angle(np.exp(1j * (theta - theta_c)))
            idx = np.nonzero(np.abs(delta) < half_angle)[0]
            arc = cls.base * delta[idx]
            slices.append(idx)
            bumps.append(bump_values(cls.m, eps, w, arc))
    else:
        centers = (2.0 * np.arange(mc) - (mc - 1)) * w
        grid = np.linspace(-cls.base, cls.base, m_grid)
        for t_c in centers:
            idx = np.nonzero(np.abs(grid - t_c) < w)[0]
            slices.append(idx)
            bumps.append(bump_values(cls.m, eps, w, grid[idx] - t_c))

    return PackingFamily(
        shape_class=cls,
        eps=eps,
        cell_count=mc,
        bump_half_width=w,
        cell_centers=np.asarray(centers),
        _cell_slices=tuple(slices),
        _cell_bumps=tuple(bumps),
    )


def packing_lower_bound(eps: float, m: int, beta: float, N: int, eps0: float) -> float:
    """Certified log-cardinality lower bound for an eps-discrete subset:
    2^-N * eps0^((N-1)/m) * eps^(-(N-1)/m), natural-log scale."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    if not 0 < eps < eps0:
        raise ValueError(f"need 0 < eps < eps0, got eps={eps}, eps0={eps0}")
    power = (N - 1) / m
    return 2.0 ** (-N) * eps0**power * eps ** (-power)


def construction_eps0_prime(cls: ShapeClass, grid: np.ndarray | None = None) -> float:
    """Largest tested eps below which the built family's certified cardinality
    dominates the packing lower bound on the whole test grid."""
    eps0 = class_eps0(cls)
    if grid is None:
        grid = eps0 * np.geomspace(1e-3, 0.999, 60)
    ok_up_to = 0.0
    for eps in np.sort(grid):
        if eps >= eps0:
            break
        fam = build_packing(cls, float(eps))
        bound = packing_lower_bound(float(eps), cls.m, cls.beta, 2, eps0)
        if fam.certified_log_cardinality >= bound:
            ok_up_to = float(eps)
        else:
            break
    return ok_up_to
