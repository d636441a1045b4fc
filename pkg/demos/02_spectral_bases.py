"""Eigenbases on the disk, half disk and slit disk, and their interior decay.

Traces are orthonormal on the accessible boundary; interior eigenfunctions
are homogeneous of degree gamma and shrink like r0^gamma on the concentric
ball of radius r0, which is the mechanism that makes the forward maps nearly
blind to deep perturbations.
"""

import math

from expinstab import spectral
from expinstab.spectral import BasisSpec, enumerate_basis, interior_decay, sobolev_norm

for kind in spectral.DOMAIN_KINDS:
    elems = enumerate_basis(BasisSpec(kind, n_max=3))
    degrees = ", ".join(f"{e.degree:g}" for e in elems)
    print(f"{kind:22s} degrees up to 3: {degrees}")

print("\ninterior H^1 norm on B(0, 0.7) vs degree (full circle):")
spec = BasisSpec(spectral.FULL_CIRCLE, n_max=24)
elems = [e for e in enumerate_basis(spec) if e.parity in ("const", "cos")]
for e in elems[::4]:
    decay = interior_decay(e, 0.7)
    print(f"  degree {e.degree:4.1f}: {decay:.3e}  (~ 0.7^deg = {0.7 ** e.degree:.3e})")

print("\nfractional Sobolev multipliers on the circle (unit-mass mode j):")
for j in (0, 1, 4, 16):
    h_half = sobolev_norm([j], [1.0], 0.5)
    h_mhalf = sobolev_norm([j], [1.0], -0.5)
    print(f"  j = {j:2d}: ||.||_(1/2) = {h_half:.4f}, ||.||_(-1/2) = {h_mhalf:.4f}")
