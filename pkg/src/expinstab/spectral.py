"""Ordered eigenbases on the disk, half disk and slit disk, with fractional
Sobolev norms on the circle and interior decay of the eigenfunctions.

The eigenpairs come from separation of variables (half-disk families by a
reflection argument, slit-disk families with half-integer degrees); they are
hard-coded and verified numerically rather than obtained from a generalized
eigensolver.  The H^{+-1/2} norms are realized as Fourier multipliers derived
from harmonic-extension energies, so they are bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

FULL_CIRCLE = "full_circle"
HALF_DISK_NEUMANN = "half_disk_neumann"
HALF_DISK_DIRICHLET = "half_disk_dirichlet"
SLIT_DISK_NEUMANN = "slit_disk_neumann"
SLIT_DISK_DIRICHLET = "slit_disk_dirichlet"
DOMAIN_KINDS = (
    FULL_CIRCLE,
    HALF_DISK_NEUMANN,
    HALF_DISK_DIRICHLET,
    SLIT_DISK_NEUMANN,
    SLIT_DISK_DIRICHLET,
)

DIRICHLET_TRACE = "dirichlet_trace"
NEUMANN_TRACE = "neumann_trace"
PLAIN = "plain"


@dataclass(frozen=True)
class BasisSpec:
    domain_kind: str = FULL_CIRCLE
    weighting: str = PLAIN
    n_max: int = 32

    def __post_init__(self):
        if self.domain_kind not in DOMAIN_KINDS:
            raise ValueError(f"unknown domain kind {self.domain_kind!r}")
        if self.weighting not in (DIRICHLET_TRACE, NEUMANN_TRACE, PLAIN):
            raise ValueError(f"unknown weighting {self.weighting!r}")
        if self.n_max < 0:
            raise ValueError("n_max must be >= 0")


@dataclass(frozen=True)
class BasisElement:
    """One trace-normalized eigenfunction.

    degree is the homogeneity exponent of the interior eigenfunction
    (integer on disk/half disk, half-integer on the slit disk); parity is
    "const", "cos" or "sin"; multiplicity is the angular multiplicity tag.
    """

    index: int
    degree: float
    parity: str
    domain_kind: str
    multiplicity: int

    # -- angular factor, L^2-normalized on the accessible boundary -----------

    def trace(self, theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if self.domain_kind == FULL_CIRCLE:
            if self.parity == "const":
                return np.full_like(theta, 1.0 / math.sqrt(2.0 * math.pi))
            scale = 1.0 / math.sqrt(math.pi)
            fn = np.cos if self.parity == "cos" else np.sin
            return scale * fn(self.degree * theta)
        if self.domain_kind in (HALF_DISK_NEUMANN, HALF_DISK_DIRICHLET):
            # accessible boundary: upper semicircle theta in [0, pi]
            if self.parity == "const":
                return np.full_like(theta, 1.0 / math.sqrt(math.pi))
            scale = math.sqrt(2.0 / math.pi)
            fn = np.cos if self.parity == "cos" else np.sin
            return scale * fn(self.degree * theta)
        # slit disk: theta in (0, 2*pi), half-integer frequencies
        if self.parity == "const":
            return np.full_like(theta, 1.0 / math.sqrt(2.0 * math.pi))
        scale = 1.0 / math.sqrt(math.pi)
        fn = np.cos if self.parity == "cos" else np.sin
        return scale * fn(self.degree * theta)

    def interior(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Eigenfunction r^degree * angular(theta) at interior points."""
        r = np.hypot(x, y)
        theta = np.mod(np.arctan2(y, x), 2.0 * np.pi)
        radial = np.where(r > 0, r**self.degree, 1.0 if self.degree == 0 else 0.0)
        return radial * self.trace(theta)


def _half_circle_elements(kind: str, n_max: int) -> list[BasisElement]:
    elements = []
    if kind == HALF_DISK_NEUMANN:
        elements.append(BasisElement(0, 0.0, "const", kind, 1))
        degrees = range(1, n_max + 1)
        parity = "cos"
    else:
        degrees = range(1, n_max + 1)
        parity = "sin"
    for j in degrees:
        elements.append(BasisElement(0, float(j), parity, kind, 1))
    return elements


def enumerate_basis(spec: BasisSpec) -> list[BasisElement]:
    """All elements with degree <= n_max, in nondecreasing degree order."""
    kind, n_max = spec.domain_kind, spec.n_max
    elements: list[BasisElement] = []
    if kind == FULL_CIRCLE:
        elements.append(BasisElement(0, 0.0, "const", kind, 1))
        for j in range(1, n_max + 1):
            elements.append(BasisElement(0, float(j), "cos", kind, 2))
            elements.append(BasisElement(0, float(j), "sin", kind, 2))
    elif kind in (HALF_DISK_NEUMANN, HALF_DISK_DIRICHLET):
        elements = _half_circle_elements(kind, n_max)
    elif kind == SLIT_DISK_NEUMANN:
        # r^(k/2) cos(k theta / 2), k = 0, 1, 2, ...: Neumann on both slit sides
        elements.append(BasisElement(0, 0.0, "const", kind, 1))
        for k in range(1, 2 * n_max + 1):
            elements.append(BasisElement(0, k / 2.0, "cos", kind, 1))
    else:
        # r^(k/2) sin(k theta / 2), k = 1, 2, ...: vanishes on the slit
        elements = [
            BasisElement(0, k / 2.0, "sin", kind, 1) for k in range(1, 2 * n_max + 1)
        ]
    elements = [e for e in elements if e.degree <= n_max + 1e-12]
    return [
        BasisElement(i, e.degree, e.parity, e.domain_kind, e.multiplicity)
        for i, e in enumerate(elements)
    ]


def multiplicity_general_n(j: int, N: int) -> int:
    """Dimension of the space of degree-j spherical harmonics in R^N:
    1 for j = 0, else (2j+N-2)(j+N-3)! / (j!(N-2)!); always <= 2(j+1)^(N-2)."""
    if j < 0 or N < 2:
        raise ValueError("need j >= 0 and N >= 2")
    if j == 0:
        value = 1
    else:
        value = (2 * j + N - 2) * math.factorial(j + N - 3) // (
            math.factorial(j) * math.factorial(N - 2)
        )
    assert value <= 2 * (j + 1) ** (N - 2)
    return value


def gamma_value(elt: BasisElement, convention: str) -> float:
    """Degree weight: 1 + degree for the Dirichlet-trace convention, plain
    degree for the Neumann-trace convention (which excludes degree 0)."""
    if convention == DIRICHLET_TRACE:
        return 1.0 + elt.degree
    if convention == NEUMANN_TRACE:
        if elt.degree == 0:
            raise ValueError("degree-0 element has no Neumann-trace weight")
        return elt.degree
    raise ValueError(f"unknown convention {convention!r}")


def sobolev_weight(j: np.ndarray, s: float) -> np.ndarray:
    """Fourier multiplier on the circle for |s| in {0, 1/2}.

    H^{1/2}: 1 + |j| (Dirichlet energy of the harmonic extension plus L^2
    boundary term); H^{-1/2}: 1/|j| for j != 0, the constant component enters
    with unit weight; L^2: 1.
    """
    j = np.abs(np.asarray(j, dtype=float))
    if s == 0.5:
        return 1.0 + j
    if s == -0.5:
        return np.where(j > 0, 1.0 / np.maximum(j, 1.0), 1.0)
    if s == 0.0:
        return np.ones_like(j)
    raise ValueError("s must be one of 0, +1/2, -1/2")


def sobolev_norm(freqs: np.ndarray, coeffs: np.ndarray, s: float) -> float:
    """Norm of a circle function given coefficients in the L^2-orthonormal
    Fourier basis at integer frequencies."""
    w = sobolev_weight(np.asarray(freqs), s)
    return float(np.sqrt(np.sum(w * np.abs(np.asarray(coeffs)) ** 2)))


# ----------------------------------------------------------------------------
# interior decay
# ----------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _gauss_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _angular_range(kind: str) -> tuple[float, float]:
    if kind in (HALF_DISK_NEUMANN, HALF_DISK_DIRICHLET):
        return 0.0, math.pi
    return 0.0, 2.0 * math.pi


def interior_decay(elt: BasisElement, r0: float, quad: int = 200) -> float:
    """H^1 norm of the trace-normalized eigenfunction on B(0, r0) (intersected
    with the domain).  Closed-form radial integrals on the disk; radial plus,
    Gauss quadrature in the angle for the half and slit disks."""
    if not 0.0 < r0 < 1.0:
        raise ValueError("need 0 < r0 < 1")
    g = elt.degree
    lo, hi = _angular_range(elt.domain_kind)
    if elt.domain_kind == FULL_CIRCLE:
        # exact angular integrals for the normalized trace:
        # int v^2 = 1 and int (v')^2 = g^2
        norm_sq_angular = 1.0
        dnorm_sq_angular = 0.0 if elt.parity == "const" else g**2
    else:
        x, w = _gauss_nodes(quad)
        theta = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
        scale = 0.5 * (hi - lo)
        v = elt.trace(theta)
        norm_sq_angular = scale * float(np.sum(w * v**2))
        if elt.parity == "const":
            dnorm_sq_angular = 0.0
        else:
            dv = _trace_derivative(elt, theta)
            dnorm_sq_angular = scale * float(np.sum(w * dv**2))
    # radial integrals of r^(2g) * r and of r^(2g-2) * r on [0, r0]
    mass_radial = r0 ** (2 * g + 2) / (2 * g + 2)
    if g == 0:
        grad_sq = 0.0
    else:
        grad_radial = r0 ** (2 * g) / (2 * g)
        grad_sq = grad_radial * (g**2 * norm_sq_angular + dnorm_sq_angular)
    return math.sqrt(grad_sq + mass_radial * norm_sq_angular)


def _trace_derivative(elt: BasisElement, theta: np.ndarray) -> np.ndarray:
    if elt.parity == "const":
        return np.zeros_like(theta)
    g = elt.degree
    if elt.domain_kind in (HALF_DISK_NEUMANN, HALF_DISK_DIRICHLET):
        scale = math.sqrt(2.0 / math.pi)
    else:
        scale = 1.0 / math.sqrt(math.pi)
    if elt.parity == "cos":
        return -g * scale * np.sin(g * theta)
    return g * scale * np.cos(g * theta)


def fit_decay_constant(spec: BasisSpec, r0: float) -> float:
    """Smallest single C(r0) with interior_decay <= C(r0) * exp(-log(1/r0) * degree)
    over the enumerated elements."""
    alpha = math.log(1.0 / r0)
    best = 0.0
    for elt in enumerate_basis(spec):
        best = max(best, interior_decay(elt, r0) / math.exp(-alpha * elt.degree))
    return best


def growth_count(spec: BasisSpec, n: int) -> int:
    """#{k : degree_k <= n}; bounded by 2(1+n)^(N-1) at N = 2."""
    return sum(1 for e in enumerate_basis(spec) if e.degree <= n + 1e-12)
