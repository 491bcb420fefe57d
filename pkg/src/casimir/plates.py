"""Specular plane-plane Casimir observables and the 1d two-mirror cavity.

The free energy of two parallel bulk mirrors separated by a vacuum gap L is

    F = A * sum_p  k_B T sum_m' (1/2pi) integral_{xi/c}^inf  kappa dkappa
        * ln(1 - r_p1 r_p2 exp(-2 kappa L)),

with the Matsubara sum replaced by (hbar/2pi) * integral dxi at T = 0.  The
transverse integral is evaluated in the variable kappa on [xi/c, inf); the
pressure uses the analytic derivative of the integrand,
d/dL ln d = 2 kappa r1 r2 exp(-2 kappa L) / d.

Sign conventions: `ideal_casimir` returns the textbook magnitudes of the
ideal law (positive force, negative energy); everything else reports
attraction as a negative free energy and a negative pressure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from . import dielectric as diel
from .dielectric import C_LIGHT, HBAR, K_B, Perfect, fresnel, static_fresnel
from .matsubara import ConvergenceError, QuadratureSpec, thermal_sum, zero_t_integral

__all__ = [
    "PlateGeometry",
    "PlanePlaneResult",
    "ideal_casimir",
    "lifshitz_free_energy",
    "casimir_pressure",
    "plane_plane",
    "free_energy_1d",
]

_ZETA3 = special.zeta(3.0)
DEFAULT_NODES = 64


@dataclass(frozen=True)
class PlateGeometry:
    """Gap L (m), plate area A (m^2) and temperature T (K >= 0)."""

    L: float
    A: float = 1.0
    T: float = 0.0

    def __post_init__(self):
        if self.L <= 0:
            raise ValueError("gap L must be positive")
        if self.A <= 0:
            raise ValueError("area A must be positive")
        if self.T < 0:
            raise ValueError("temperature must be >= 0")


@dataclass(frozen=True)
class PlanePlaneResult:
    """Free energy (J), pressure (Pa) and the per-polarization energies (J)."""

    free_energy: float
    pressure: float
    per_polarization: dict


def ideal_casimir(L: float, A: float):
    """Ideal zero-temperature Casimir law between perfect plates.

    Returns ``(force, energy) = (hbar c pi^2 A / 240 L^4,
    -hbar c pi^2 A / 720 L^3)``; the positive number is the magnitude of the
    attraction.
    """
    if L <= 0 or A <= 0:
        raise ValueError("L and A must be positive")
    force = HBAR * C_LIGHT * math.pi**2 * A / (240.0 * L**4)
    energy = -HBAR * C_LIGHT * math.pi**2 * A / (720.0 * L**3)
    return force, energy


# --- polylogarithms on the negative exponential axis -----------------------
#
# Li2(e^-s) and Li3(e^-s) for s >= 0 give closed forms for the kappa
# integrals with r1 r2 = 1; they also anchor the classical (m = 0) limits.

def _li2_exp(s):
    """Li2(e^-s) for s >= 0, vectorized."""
    s = np.asarray(s, dtype=float)
    out = np.empty_like(s)
    small = s < 0.7
    if np.any(small):
        ss = s[small]
        u = -np.expm1(-ss)            # 1 - e^-s, exact for small s
        acc = np.zeros_like(u)
        term = np.ones_like(u)
        for n in range(1, 60):
            term = term * u
            acc += term / n**2
        slogu = np.where(ss > 0, ss * np.log(np.maximum(u, 1e-300)), 0.0)
        out[small] = math.pi**2 / 6.0 + slogu - acc
    if np.any(~small):
        x = np.exp(-s[~small])
        acc = np.zeros_like(x)
        term = np.ones_like(x)
        for n in range(1, 60):
            term = term * x
            acc += term / n**2
        out[~small] = acc
    return out if out.ndim else float(out)


def _li3_exp(s):
    """Li3(e^-s) for s >= 0, vectorized."""
    s = np.asarray(s, dtype=float)
    out = np.empty_like(s)
    small = s < 0.25
    if np.any(small):
        m = s[small]
        logm = np.where(m > 0, np.log(np.maximum(m, 1e-300)), 0.0)
        out[small] = (special.zeta(3.0) - (math.pi**2 / 6.0) * m
                      + 0.5 * m**2 * (1.5 - logm)
                      + m**3 / 12.0 - m**4 / 288.0 + m**6 / 86400.0)
    if np.any(~small):
        x = np.exp(-s[~small])
        acc = np.zeros_like(x)
        term = np.ones_like(x)
        for n in range(1, 170):
            term = term * x
            acc += term / n**3
        out[~small] = acc
    return out if out.ndim else float(out)


def _ln_one_minus_exp(s):
    """ln(1 - e^-s), with the s = 0 entries mapped to 0 after multiplication."""
    s = np.asarray(s, dtype=float)
    return np.where(s > 0, np.log(np.maximum(-np.expm1(-s), 1e-300)), 0.0)


@lru_cache(maxsize=8)
def _laguerre(n: int):
    t, w = special.roots_laguerre(n)
    return t, w


def _log1p_ratio(x):
    """h(x) = -log1p(-x)/x, stable for x in [0, 1); h(0) = 1."""
    x = np.asarray(x, dtype=float)
    tiny = np.abs(x) < 1e-12
    safe = np.where(tiny, 0.5, x)
    return np.where(tiny, 1.0 + x / 2.0, -np.log1p(-safe) / safe)


def _both_perfect(m1, m2) -> bool:
    return isinstance(m1, Perfect) and isinstance(m2, Perfect)


# --- per-frequency transverse integrals -------------------------------------

def _energy_phi_perfect(xi, L):
    """Sum over polarizations of (1/2pi) int kappa ln(1-e^-2kL) dkappa, J/m^2 scale."""
    s = 2.0 * np.asarray(xi, dtype=float) * L / C_LIGHT
    return -(s * _li2_exp(s) + _li3_exp(s)) / (4.0 * math.pi * L * L)


def _pressure_phi_perfect(xi, L):
    """Sum over polarizations of (1/2pi) int 2 kappa^2 e/d dkappa (positive)."""
    s = 2.0 * np.asarray(xi, dtype=float) * L / C_LIGHT
    return (-s * s * _ln_one_minus_exp(s) + 2.0 * s * _li2_exp(s)
            + 2.0 * _li3_exp(s)) / (4.0 * math.pi * L**3)


def _reflection_products(m1, m2, xi, k):
    r1te, r1tm = fresnel(m1, xi, k)
    r2te, r2tm = fresnel(m2, xi, k)
    return r1te * r2te, r1tm * r2tm


def _energy_phi_general(m1, m2, xi, L, nodes):
    """Per-polarization (1/2pi) int kappa ln d dkappa at one xi > 0."""
    K = xi / C_LIGHT
    t, w = _laguerre(nodes)
    half = t / (2.0 * L)
    kappa = K + half
    k = np.sqrt(half * (half + 2.0 * K))
    qte, qtm = _reflection_products(m1, m2, xi, k)
    damp = math.exp(-2.0 * K * L) if 2.0 * K * L < 700 else 0.0
    out = []
    for q in (qte, qtm):
        qq = q * damp
        x = qq * np.exp(-t)
        integrand = -kappa * qq * _log1p_ratio(x)
        out.append(float(np.dot(w, integrand)) / (2.0 * L) / (2.0 * math.pi))
    return out[0], out[1]


def _energy_phi_static(m1, m2, L):
    """Per-polarization (1/2pi) int k ln d dk at xi = 0 (adaptive, u = 2kL)."""
    out = []
    for pol in (0, 1):
        def f(u, pol=pol):
            k = u / (2.0 * L)
            q = static_fresnel(m1, k)[pol] * static_fresnel(m2, k)[pol]
            return u * np.log1p(-q * math.exp(-u))
        val, _ = integrate.quad(f, 0.0, np.inf, epsabs=1e-300, epsrel=1e-11, limit=200)
        out.append(val / (4.0 * L * L) / (2.0 * math.pi))
    return out[0], out[1]


def _pressure_phi_general(m1, m2, xi, L, nodes):
    K = xi / C_LIGHT
    t, w = _laguerre(nodes)
    half = t / (2.0 * L)
    kappa = K + half
    k = np.sqrt(half * (half + 2.0 * K))
    qte, qtm = _reflection_products(m1, m2, xi, k)
    damp = math.exp(-2.0 * K * L) if 2.0 * K * L < 700 else 0.0
    out = []
    for q in (qte, qtm):
        qq = q * damp
        x = qq * np.exp(-t)
        integrand = 2.0 * kappa**2 * qq / (1.0 - x)
        out.append(float(np.dot(w, integrand)) / (2.0 * L) / (2.0 * math.pi))
    return out[0], out[1]


def _pressure_phi_static(m1, m2, L):
    out = []
    for pol in (0, 1):
        def f(u, pol=pol):
            k = u / (2.0 * L)
            q = static_fresnel(m1, k)[pol] * static_fresnel(m2, k)[pol]
            e = math.exp(-u)
            return 2.0 * u * u * q * e / (1.0 - q * e)
        val, _ = integrate.quad(f, 0.0, np.inf, epsabs=1e-300, epsrel=1e-11, limit=200)
        out.append(val / (8.0 * L**3) / (2.0 * math.pi))
    return out[0], out[1]


class _Integrand:
    """Per-frequency integrand, vectorized over xi for perfect mirrors."""

    def __init__(self, m1, m2, L, kind, pol=None, nodes=DEFAULT_NODES):
        self.m1, self.m2, self.L = m1, m2, L
        self.kind = kind          # "energy" or "pressure"
        self.pol = pol            # None (sum), 0 = TE, 1 = TM
        self.nodes = nodes
        self.perfect = _both_perfect(m1, m2)

    def _phi_pair(self, xi):
        if self.kind == "energy":
            if xi == 0.0:
                return _energy_phi_static(self.m1, self.m2, self.L)
            return _energy_phi_general(self.m1, self.m2, xi, self.L, self.nodes)
        if xi == 0.0:
            return _pressure_phi_static(self.m1, self.m2, self.L)
        return _pressure_phi_general(self.m1, self.m2, xi, self.L, self.nodes)

    def __call__(self, xi):
        if self.perfect and self.pol is None:
            phi = (_energy_phi_perfect if self.kind == "energy"
                   else _pressure_phi_perfect)(xi, self.L)
            return phi
        if np.ndim(xi) > 0:
            return np.array([self(x) for x in np.asarray(xi, dtype=float)])
        te, tm = self._phi_pair(float(xi))
        if self.pol is None:
            return te + tm
        return (te, tm)[self.pol]


def _aggregate(f, T, spec, scale):
    """Matsubara sum at T > 0, xi-integral at T = 0."""
    if T > 0:
        return thermal_sum(f, T, spec)
    return zero_t_integral(f, spec, scale=scale)


def lifshitz_free_energy(m1, m2, geom: PlateGeometry,
                         spec: QuadratureSpec | None = None,
                         nodes: int = DEFAULT_NODES) -> float:
    """Casimir free energy (J) of two bulk mirrors; negative for attraction."""
    f = _Integrand(m1, m2, geom.L, "energy", nodes=nodes)
    try:
        return geom.A * _aggregate(f, geom.T, spec, C_LIGHT / (2.0 * geom.L))
    except ConvergenceError as e:
        raise ConvergenceError(str(e), partial=geom.A * e.partial,
                               tail=geom.A * e.tail,
                               context=f"plane-plane energy, L={geom.L}, T={geom.T}") from e


def casimir_pressure(m1, m2, geom: PlateGeometry,
                     spec: QuadratureSpec | None = None,
                     nodes: int = DEFAULT_NODES) -> float:
    """Casimir pressure (Pa), negative = attractive, from the analytic
    derivative of the free-energy integrand."""
    f = _Integrand(m1, m2, geom.L, "pressure", nodes=nodes)
    try:
        return -_aggregate(f, geom.T, spec, C_LIGHT / (2.0 * geom.L))
    except ConvergenceError as e:
        raise ConvergenceError(str(e), partial=-e.partial, tail=e.tail,
                               context=f"plane-plane pressure, L={geom.L}, T={geom.T}") from e


def plane_plane(m1, m2, geom: PlateGeometry,
                spec: QuadratureSpec | None = None,
                nodes: int = DEFAULT_NODES) -> PlanePlaneResult:
    """Free energy, pressure and per-polarization energy breakdown."""
    per_pol = {}
    for pol, name in ((0, "TE"), (1, "TM")):
        f = _Integrand(m1, m2, geom.L, "energy", pol=pol, nodes=nodes)
        per_pol[name] = geom.A * _aggregate(f, geom.T, spec, C_LIGHT / (2.0 * geom.L))
    energy = lifshitz_free_energy(m1, m2, geom, spec, nodes)
    pressure = casimir_pressure(m1, m2, geom, spec, nodes)
    return PlanePlaneResult(free_energy=energy, pressure=pressure,
                            per_polarization=per_pol)


def free_energy_1d(r1, r2, L: float, T: float,
                   spec: QuadratureSpec | None = None) -> float:
    """Free energy (J) of a two-mirror cavity on a 1d line.

    `r1` and `r2` map imaginary frequency (rad/s) to real reflection
    amplitudes with |r1 r2| <= 1.  The cavity integrand is
    ln(1 - r1 r2 exp(-2 xi L / c)).
    """
    if L <= 0:
        raise ValueError("L must be positive")

    def f(xi):
        xi = np.asarray(xi, dtype=float)
        prod = np.asarray(r1(xi), dtype=float) * np.asarray(r2(xi), dtype=float)
        if np.any(np.abs(prod) > 1.0 + 1e-12):
            raise ValueError("|r1*r2| must be <= 1 on the imaginary axis")
        out = np.log1p(-prod * np.exp(-2.0 * xi * L / C_LIGHT))
        return float(out) if out.ndim == 0 else out

    return _aggregate(f, T, spec, C_LIGHT / (2.0 * L))
