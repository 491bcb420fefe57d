"""Frequency aggregation: Matsubara sums at T > 0 and xi-integrals at T = 0.

The free energy of every cavity observable in this package has the form of a
sum over imaginary frequencies,

    F = k_B T [ f(xi_0)/2 + sum_{m>=1} f(xi_m) ],   xi_m = 2 pi m k_B T / hbar,

with the m = 0 term half-weighted, or, at zero temperature, of the integral

    E = (hbar / 2 pi) * integral_0^inf f(xi) dxi.

This module owns the half-weight convention, the adaptive truncation of the
sum (with a geometric tail estimate) and the adaptive quadrature of the
integral.  Integrands are required to decay at least exponentially, which
every round-trip integrand here does through its exp(-2 kappa L) factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .dielectric import HBAR, K_B

__all__ = [
    "MatsubaraGrid",
    "QuadratureSpec",
    "ConvergenceError",
    "ThermalSumInfo",
    "matsubara_frequency",
    "thermal_sum",
    "thermal_sum_info",
    "zero_t_integral",
]

#: hard cap on the number of Matsubara terms before giving up
MAX_TERMS = 5_000_000

_CHUNK_START = 64
_CHUNK_MAX = 262_144


class ConvergenceError(RuntimeError):
    """A sum or quadrature failed to reach the requested tolerance.

    Attributes
    ----------
    partial : float
        Best available partial result (same units as the converged result).
    tail : float
        Estimate of the neglected remainder, or the quadrature error estimate.
    context : str
        Where the failure happened (which frequency, which panel, ...).
    """

    def __init__(self, message, partial=math.nan, tail=math.nan, context=""):
        self.partial = partial
        self.tail = tail
        self.context = context
        if context:
            message = f"{message} [{context}]"
        super().__init__(message)


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances shared by the summation and quadrature engines."""

    rel_tol: float = 1e-8          # dimensionless
    abs_floor: float = 1e-35       # J; results below this count as zero
    max_subdivisions: int = 200

    def __post_init__(self):
        if not (0.0 < self.rel_tol <= 1e-2):
            raise ValueError("rel_tol must lie in (0, 1e-2]")
        if self.abs_floor <= 0:
            raise ValueError("abs_floor must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


DEFAULT_SPEC = QuadratureSpec()


@dataclass(frozen=True)
class MatsubaraGrid:
    """The first m_max + 1 Matsubara frequencies at temperature T."""

    T: float
    m_max: int

    def __post_init__(self):
        if self.T <= 0:
            raise ValueError("temperature must be positive")
        if self.m_max < 1:
            raise ValueError("m_max must be >= 1")

    @property
    def xi(self) -> np.ndarray:
        """Frequencies xi_m = 2 pi m k_B T / hbar for m = 0 .. m_max."""
        return (2.0 * math.pi * K_B * self.T / HBAR) * np.arange(self.m_max + 1)


@dataclass(frozen=True)
class ThermalSumInfo:
    value: float     # J
    terms: int       # highest m actually summed
    tail: float      # J, estimated magnitude of the neglected remainder


def matsubara_frequency(T: float, m: int) -> float:
    """xi_m = 2 pi m k_B T / hbar (rad/s); T must be positive, m >= 0."""
    if T <= 0:
        raise ValueError("temperature must be positive")
    if m < 0:
        raise ValueError("Matsubara index must be >= 0")
    return 2.0 * math.pi * m * K_B * T / HBAR


def _batch_evaluator(f):
    """Wrap f so it maps a 1-d frequency array to a 1-d value array."""
    probed = {"vectorized": None}

    def evaluate(xis: np.ndarray) -> np.ndarray:
        if probed["vectorized"] is None:
            try:
                out = np.asarray(f(xis), dtype=float)
                probed["vectorized"] = out.shape == xis.shape
                if probed["vectorized"]:
                    return out
            except Exception:
                probed["vectorized"] = False
        if probed["vectorized"]:
            return np.asarray(f(xis), dtype=float)
        return np.array([float(f(x)) for x in xis])

    return evaluate


def thermal_sum_info(f, T: float, spec: QuadratureSpec | None = None) -> ThermalSumInfo:
    """Matsubara sum k_B T [f(0)/2 + sum f(xi_m)] with adaptive truncation.

    Terms are accumulated in ascending m (fixed order, reproducible) until the
    last term and the geometric tail estimate both drop below
    rel_tol * |accumulated| + abs_floor.  `f` may accept frequency arrays, in
    which case terms are evaluated in vectorized chunks.
    """
    spec = spec or DEFAULT_SPEC
    if T <= 0:
        raise ValueError("temperature must be positive")
    kT = K_B * T
    f0 = float(f(0.0) if np.isscalar(f(0.0)) else np.asarray(f(0.0), dtype=float))
    if not math.isfinite(f0):
        raise ValueError("f(0) must be finite (half-weighted m = 0 term)")

    dxi = 2.0 * math.pi * kT / HBAR
    evaluate = _batch_evaluator(f)
    floor = spec.abs_floor / kT

    total = 0.5 * f0
    prev_mag = abs(f0) if f0 != 0.0 else math.inf
    m = 1
    chunk = _CHUNK_START
    while m <= MAX_TERMS:
        ms = np.arange(m, min(m + chunk, MAX_TERMS + 1))
        vals = evaluate(ms * dxi)
        if not np.all(np.isfinite(vals)):
            bad = int(ms[np.argmax(~np.isfinite(vals))])
            raise ConvergenceError("integrand not finite", partial=kT * total,
                                   tail=math.nan, context=f"Matsubara term m={bad}")
        csum = total + np.cumsum(vals)
        mags = np.abs(vals)
        budget = spec.rel_tol * np.maximum(np.abs(csum), floor) + floor
        small = mags < budget
        # ratios of consecutive magnitudes, for the geometric tail estimate
        prevs = np.concatenate(([prev_mag], mags[:-1]))
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            ratios = np.where(prevs > 0, mags / prevs, 0.0)
            decaying = ratios < 1.0
            safe = np.where(decaying, ratios, 0.5)
            tails = np.where(decaying, mags * safe / (1.0 - safe), math.inf)
        tails = np.where(mags == 0.0, 0.0, tails)
        done = small & (tails < budget) & (ms >= 3)
        if np.any(done):
            stop = int(np.argmax(done))
            return ThermalSumInfo(value=kT * float(csum[stop]),
                                  terms=int(ms[stop]),
                                  tail=kT * float(tails[stop]))
        total = float(csum[-1])
        prev_mag = float(mags[-1]) if mags[-1] > 0 else prev_mag
        m = int(ms[-1]) + 1
        chunk = min(chunk * 2, _CHUNK_MAX)

    raise ConvergenceError(
        f"Matsubara sum did not converge within {MAX_TERMS} terms",
        partial=kT * total, tail=kT * prev_mag, context=f"T={T} K")


def thermal_sum(f, T: float, spec: QuadratureSpec | None = None) -> float:
    """Value of the Matsubara sum; see thermal_sum_info."""
    return thermal_sum_info(f, T, spec).value


def zero_t_integral(f, spec: QuadratureSpec | None = None,
                    scale: float = 1.0) -> float:
    """(hbar / 2 pi) * integral of f over xi in (0, inf), adaptively.

    The integration runs in the dimensionless variable u = xi / scale, which
    a globally adaptive Gauss-Kronrod scheme then compactifies; pass the
    characteristic decay frequency (c/2L for a cavity of gap L) as `scale` so
    the integrand peaks at u of order one.  Raises ConvergenceError when the
    internal error estimate misses the requested tolerance.
    """
    spec = spec or DEFAULT_SPEC
    if scale <= 0:
        raise ValueError("scale must be positive")
    prefactor = HBAR * scale / (2.0 * math.pi)
    out = integrate.quad(lambda u: f(u * scale), 0.0, np.inf,
                         epsabs=spec.abs_floor / prefactor,
                         epsrel=spec.rel_tol,
                         limit=spec.max_subdivisions,
                         full_output=1)
    value, abserr = out[0], out[1]
    if len(out) > 3:
        raise ConvergenceError(f"quadrature failed: {out[3]}",
                               partial=prefactor * value, tail=prefactor * abserr,
                               context="zero_t_integral")
    tolerance = max(spec.abs_floor / prefactor, spec.rel_tol * abs(value))
    if abserr > 10.0 * max(tolerance, np.finfo(float).eps * abs(value)):
        raise ConvergenceError(
            f"quadrature error estimate {abserr:.2e} exceeds tolerance {tolerance:.2e}",
            partial=prefactor * value, tail=prefactor * abserr,
            context="zero_t_integral")
    return prefactor * value
