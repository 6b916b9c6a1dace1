"""Shared numerical kernels: adaptive quadrature, finite differences, erfc.

All semi-infinite integrals in this package decay exponentially or faster,
so the default strategy probes the integrand for an effective truncation
point and integrates the finite remainder adaptively.  An algebraic
substitution (scipy's native infinite-interval handling) is available for
slowly decaying tails.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate as _sp_integrate
from scipy import special as _sp_special


class QuadratureFailure(RuntimeError):
    """Quadrature could not meet the requested tolerance within budget."""

    def __init__(self, message: str, best_estimate: float = float("nan"),
                 error: float = float("inf")):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error = error


class DifferentiationUnstable(RuntimeError):
    """Finite-difference derivative estimates failed to converge."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerance and budget for one adaptive quadrature call."""

    rel_tol: float = 1e-8
    abs_floor: float = 1e-14
    max_subdivisions: int = 200
    tail: str = "exp"  # {"exp", "algebraic"}

    def __post_init__(self):
        if self.rel_tol <= 0:
            raise ValueError("rel_tol must be positive")
        if self.max_subdivisions < 10:
            raise ValueError("max_subdivisions budget too small")
        if self.tail not in ("exp", "algebraic"):
            raise ValueError(f"unknown tail substitution {self.tail!r}")


DEFAULT_SPEC = QuadratureSpec()

# Envelope threshold for truncating exponentially decaying tails: the
# integrand is cut where it falls this far below its observed peak.
TAIL_CUTOFF = 1e-16


class EvalCounter:
    """Counts invocations; used to assert code paths stay cold."""

    def __init__(self):
        self.count = 0

    def bump(self, n: int = 1):
        self.count += n

    def reset(self):
        self.count = 0


#: Incremented on every finite-difference derivative evaluation.  Lets tests
#: assert that shape-1 fading paths never differentiate.
differentiation_counter = EvalCounter()


def _check_result(value: float, err: float, spec: QuadratureSpec, what: str):
    tol = max(spec.rel_tol * abs(value), spec.abs_floor)
    if not np.isfinite(value) or err > tol:
        raise QuadratureFailure(
            f"{what}: error estimate {err:.3e} exceeds tolerance {tol:.3e}",
            best_estimate=value, error=err)
    return value, err


def _quad(f, a: float, b: float, spec: QuadratureSpec):
    """scipy adaptive Gauss-Kronrod core with warnings surfaced as data."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", _sp_integrate.IntegrationWarning)
        value, err = _sp_integrate.quad(
            f, a, b,
            epsabs=spec.abs_floor, epsrel=spec.rel_tol * 0.1,
            limit=spec.max_subdivisions)
    return value, err


def _guarded(f):
    """Non-finite samples are treated as 0 so panels shrink instead of failing."""
    def g(x):
        y = f(x)
        if not np.isfinite(y):
            return 0.0
        return y
    return g


def _find_truncation(f, lower: float) -> float:
    """Probe an exponentially decaying integrand for its effective support."""
    scale = max(abs(lower), 1.0)
    probes = lower + scale * np.logspace(-3, 9, 61)
    peak = 0.0
    cut = probes[-1]
    for x in probes:
        y = abs(f(x))
        if np.isfinite(y) and y > peak:
            peak = y
        if peak > 0 and (not np.isfinite(y) or y <= TAIL_CUTOFF * peak):
            cut = x
            break
    if peak == 0.0:
        # Integrand vanished at every probe; a short interval suffices.
        return lower + scale
    return cut


def integrate_interval(f, a: float, b: float,
                       spec: QuadratureSpec = DEFAULT_SPEC):
    """Adaptive quadrature on [a, b]; returns (value, error bound)."""
    if not b > a:
        return 0.0, 0.0
    value, err = _quad(_guarded(f), a, b, spec)
    return _check_result(value, err, spec, f"integral on [{a:g}, {b:g}]")


def integrate_semi_infinite(f, lower: float = 0.0,
                            spec: QuadratureSpec = DEFAULT_SPEC):
    """Integrate f over (lower, inf); returns (value, error bound).

    tail="exp" truncates where the integrand's envelope falls below
    ``TAIL_CUTOFF`` of its peak, then refines adaptively.  tail="algebraic"
    maps the infinite interval algebraically and is preferred for
    power-law tails.
    """
    g = _guarded(f)
    if spec.tail == "exp":
        upper = _find_truncation(g, lower)
        value, err = _quad(g, lower, upper, spec)
    else:
        value, err = _quad(g, lower, np.inf, spec)
    return _check_result(value, err, spec, "semi-infinite integral")


def erfc(x):
    """Complementary error function (vectorized, relative error < 1e-12)."""
    return _sp_special.erfc(x)


_CENTRAL_STENCILS = {
    # order -> (offsets, coefficients, h exponent)
    1: (np.array([-1.0, 1.0]), np.array([-0.5, 0.5]), 1),
    2: (np.array([-1.0, 0.0, 1.0]), np.array([1.0, -2.0, 1.0]), 2),
    3: (np.array([-2.0, -1.0, 1.0, 2.0]),
        np.array([-0.5, 1.0, -1.0, 0.5]), 3),
}


def _central(f, x: float, h: float, order: int) -> float:
    offsets, coeffs, p = _CENTRAL_STENCILS[order]
    vals = np.array([f(x + o * h) for o in offsets])
    return float(np.dot(coeffs, vals)) / h ** p


def differentiate(f, x: float, order: int, rel_tol: float = 1e-4,
                  scale: float | None = None):
    """Central-difference derivatives of orders 1..order with Richardson.

    Returns a list of (estimate, error_indicator) tuples.  Raises
    DifferentiationUnstable when the Richardson extrapolations of any
    requested order disagree beyond rel_tol.
    """
    if order < 1 or order > 3:
        raise ValueError("order must be in 1..3")
    differentiation_counter.bump()
    if scale is None or scale == 0.0:
        scale = max(abs(x), 1.0)
    eps = np.finfo(float).eps
    results = []
    for k in range(1, order + 1):
        h0 = scale * eps ** (1.0 / (k + 2))
        d1 = _central(f, x, h0, k)
        d2 = _central(f, x, h0 / 2.0, k)
        d4 = _central(f, x, h0 / 4.0, k)
        # Leading error is O(h^2) for all central stencils used here.
        r1 = (4.0 * d2 - d1) / 3.0
        r2 = (4.0 * d4 - d2) / 3.0
        est = r2
        denom = max(abs(est), abs(d4), 1e-300)
        indicator = abs(r2 - r1) / denom
        if indicator > rel_tol:
            raise DifferentiationUnstable(
                f"order-{k} derivative at {x:g}: Richardson estimates "
                f"disagree by {indicator:.3e} (> {rel_tol:g})")
        results.append((est, indicator))
    return results
