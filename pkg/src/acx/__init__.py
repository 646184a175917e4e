"""Exact cohomology engine for invariant almost complex structures.

The engine takes a finite model of a compact almost complex manifold -- a
real Lie algebra with rational structure constants, a rational almost complex
structure J, a rational Hermitian metric and optionally a truncated lattice of
torus Fourier modes -- and computes Dolbeault-type cohomologies (the spectral
Dolbeault numbers h, the refined numbers h-tilde, the hat spaces, harmonic
intersections) together with audits of the operator identities, duality
statements and the taming-form construction.  Every computation is carried
out over the field Q(i); there is no floating point anywhere.
"""

__version__ = "0.1.0"
