"""numguard: stress-tests and cross-verifies two numerical kernels against
exact arithmetic — a cluster task rebalancer (floating-point original,
verified integer revision, exact-rational reference) and the 3D
plane-orientation predicate (single evaluation, majority vote, exact sign)
— with seeded fuzz campaigns, bit-exact fixtures, a minimal convex hull to
exhibit predicate-failure fallout, and an SMT-LIB2 query emitter for the
cases fuzzing cannot reach."""

__version__ = "0.1.0"

from . import formats, geometry, rebalance

__all__ = ["formats", "geometry", "rebalance", "__version__"]
