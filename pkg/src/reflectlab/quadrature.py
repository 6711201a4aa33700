"""Adaptive quadrature with explicit failure reporting.

Thin layer over QUADPACK (``scipy.integrate.quad``): finite ranges are split
at supplied breakpoints (jumps of the integrand), the semi-infinite piece is
handed to QUADPACK's infinite-range rule, and a tolerance miss raises
:class:`QuadratureFailure` instead of a warning.
"""

from __future__ import annotations

import math
import warnings

from scipy import integrate

from .errors import QuadratureFailure

EPSABS = 1e-12
EPSREL = 1e-9


def integrate_1d(f, a, b, breaks=(), epsabs=EPSABS, epsrel=EPSREL, limit=400):
    """Integrate ``f`` over ``[a, b]`` (``b`` may be ``inf``)."""
    if b <= a:
        return 0.0
    cuts = sorted(p for p in breaks if a < p < b and math.isfinite(p))
    edges = [a, *cuts, b]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            val, err, info = integrate.quad(f, lo, hi, epsabs=epsabs, epsrel=epsrel,
                                            limit=limit, full_output=1)[:3]
        if not math.isfinite(val) or err > 10 * max(epsabs, epsrel * abs(val)):
            raise QuadratureFailure(
                f"quadrature on [{lo:g}, {hi:g}] missed tolerance: value={val!r} error={err!r}")
        total += val
    return total
