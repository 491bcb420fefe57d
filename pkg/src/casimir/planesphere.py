"""Plane-sphere Casimir interaction beyond the proximity force approximation.

The energy is a log-determinant over round-trip operators in the multipole
basis.  At fixed imaginary frequency xi and azimuthal index m the round trip

    M(m)_{lP,l'P'} = s_{lP}(xi) * T(m)_{lP,l'P'}(xi)

combines the Mie amplitudes s of the sphere (P = E electric, P = M magnetic)
with a translation-reflection-translation factor built from the Fresnel
amplitudes of the plane and the plane-wave decomposition of multipole waves,

    T(m)_{lP,l'P'} = -(4 pi c / xi) (-1)^(l+l')
        * int_K^inf dkappa e^(-2 kappa Z) beta_PP'(l, l'; kappa) / nn,

with Z = L + R the center-to-plane distance, K = xi/c, nn the
sqrt(l(l+1) l'(l'+1)) normalization, and beta the bilinear combinations of
the hyperbolic angular functions p_lm, t_lm weighted by r_TM and r_TE:

    beta_MM =  r_TM p p' - r_TE t t'      beta_EE =  r_TE p p' - r_TM t t'
    beta_ME = -(r_TE t p' - r_TM p t')    beta_EM =  r_TM t p' - r_TE p t'.

Because p, t > 0, r_TM >= 0 >= r_TE for every model here, a diagonal sign
and sqrt(|s|) balancing turns M into a symmetric positive semidefinite Gram
matrix with entries of order one; log det(1 - M) is then a Cholesky
factorization away.  The determinant is invariant under these similarity
transforms.  Observables:

* energy from sum_m>=0 w_m ln det(1 - M(m)), w_0 = 1, w_m = 2;
* force and gradient either by Richardson-extrapolated central differences
  (default) or by differentiating exp(-2 kappa Z) under the integral;
* PFA references from the plane-plane module, and the reduction factors
  rho_F, rho_G with the slope beta_G of rho_G(x) at x = L/R -> 0.

The xi = 0 block of the Matsubara sum is assembled from dedicated analytic
limits (rescaled Mie amplitudes and static Fresnel amplitudes); only the
polarization-diagonal blocks survive there.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate, linalg
from scipy.special import gammaln, roots_laguerre

from .dielectric import C_LIGHT, HBAR, K_B, fresnel, static_fresnel
from .matsubara import ConvergenceError, QuadratureSpec, thermal_sum, zero_t_integral
from .plates import PlateGeometry, casimir_pressure, lifshitz_free_energy
from .spherical import (
    angular_logs,
    ln_normalization,
    mie_signed_logs,
    mie_static_limit_logs,
)

__all__ = [
    "SphereGeometry",
    "MultipoleTruncation",
    "RoundTripBlock",
    "ReductionReport",
    "SphereSample",
    "default_truncation",
    "mie_coefficients",
    "round_trip_block",
    "log_det_D",
    "casimir_energy_sphere",
    "force_and_gradient",
    "energy_force_gradient",
    "pfa_reference",
    "reduction_curve",
    "reduction_and_slope",
    "logdet_integrand",
]

_ELL_MAX_CAP = 70


@dataclass(frozen=True)
class SphereGeometry:
    """Closest distance L, sphere radius R (m) and temperature T (K)."""

    L: float
    R: float
    T: float = 0.0

    def __post_init__(self):
        if self.L <= 0 or self.R <= 0:
            raise ValueError("L and R must be positive")
        if self.T < 0:
            raise ValueError("temperature must be >= 0")

    @property
    def x(self) -> float:
        """Aspect ratio L/R controlling the PFA deviation."""
        return self.L / self.R

    @property
    def Z(self) -> float:
        """Center-to-plane distance L + R."""
        return self.L + self.R


@dataclass(frozen=True)
class MultipoleTruncation:
    """Multipole cutoff and the relative tolerance of the m-summation."""

    ell_max: int
    rel_tol: float = 1e-8

    def __post_init__(self):
        if self.ell_max < 1:
            raise ValueError("ell_max must be >= 1")
        if not (0 < self.rel_tol < 1):
            raise ValueError("rel_tol must lie in (0, 1)")

    @property
    def x_min(self) -> float:
        """Smallest aspect ratio resolved at this cutoff (x_min ~ 5/ell_max)."""
        return 5.0 / self.ell_max


def default_truncation(x: float) -> MultipoleTruncation:
    """Heuristic cutoff ell_max = ceil(7/x), capped at desk scale."""
    return MultipoleTruncation(ell_max=min(_ELL_MAX_CAP, max(3, math.ceil(7.0 / x))))


@dataclass(frozen=True)
class RoundTripBlock:
    """One azimuthal block of the round-trip operator.

    `matrix` is the symmetric balanced representation (rows: electric
    multipoles l = ell_min..ell_max, then magnetic); its spectrum equals that
    of the physical operator, so det(1 - matrix) in (0, 1] and spectral
    radius < 1 are the stability statements.
    """

    m: int
    ell_min: int
    ell_max: int
    matrix: np.ndarray

    def spectral_radius(self) -> float:
        return float(np.max(np.abs(np.linalg.eigvalsh(self.matrix))))


@dataclass(frozen=True)
class SphereSample:
    """One converged plane-sphere point with its PFA references."""

    x: float
    energy: float          # J
    force: float           # N, negative (attractive)
    gradient: float        # N/m, positive
    force_pfa: float       # N, magnitude
    gradient_pfa: float    # N/m, magnitude

    @property
    def rho_F(self) -> float:
        return abs(self.force) / self.force_pfa

    @property
    def rho_G(self) -> float:
        return self.gradient / self.gradient_pfa


@dataclass(frozen=True)
class ReductionReport:
    """Reduction factors on an x grid and the fitted slope at the origin."""

    x: np.ndarray
    rho_F: np.ndarray
    rho_G: np.ndarray
    beta_G: float
    beta_G_uncertainty: float
    fit_residual: float


@lru_cache(maxsize=16)
def _laguerre(n: int):
    return roots_laguerre(n)


def _default_nodes(ell_max: int) -> int:
    return ell_max + 30


def mie_coefficients(model, R: float, xi: float, ell: int):
    """Mie reflection amplitudes (a_ell, b_ell) of a sphere at imaginary
    frequency; a_ell > 0 (electric), b_ell < 0 (magnetic).

    Normalized so that the perfect reflector gives a_1 -> (2/3) y^3 and
    b_1 -> -(1/3) y^3 at small size parameter y = xi R / c.
    """
    if ell < 1:
        raise ValueError("ell must be >= 1")
    ln_a, ln_b = mie_signed_logs(model, R, xi, ell)
    return math.exp(ln_a[ell]), -math.exp(ln_b[ell])


class _FrequencyBlocks:
    """Gram factors of every azimuthal block at one imaginary frequency."""

    def __init__(self, xi, geom, plane_model, sphere_model, ell_max, nodes):
        self.xi = xi
        self.ell_max = ell_max
        K = xi / C_LIGHT
        Z = geom.Z
        t, w = _laguerre(nodes)
        kappa = K + t / (2.0 * Z)
        self.kappa = kappa
        r_te, r_tm = fresnel(plane_model, xi, np.sqrt((kappa - K) * (kappa + K)))
        # base log-weight of the kappa quadrature, including the 4 pi / K
        # prefactor and the exp(-2 K Z) front factor of the substitution
        ln_wbase = (np.log(w) - math.log(2.0 * Z) - 2.0 * K * Z
                    + math.log(4.0 * math.pi / K))
        with np.errstate(divide="ignore"):
            self.half_tm = 0.5 * (ln_wbase + np.log(np.maximum(r_tm, 0.0)))
            self.half_te = 0.5 * (ln_wbase + np.log(np.maximum(-r_te, 0.0)))
        ln_a, ln_b = mie_signed_logs(sphere_model, geom.R, xi, ell_max)
        self.half_a = 0.5 * ln_a
        self.half_b = 0.5 * ln_b
        self.ch = kappa / K

    def gram(self, m: int):
        """(V1, V2) with M = V1 V1^T + V2 V2^T in the balanced representation."""
        ell_lo = max(1, m)
        ells = np.arange(ell_lo, self.ell_max + 1)
        ln_p, ln_t = angular_logs(m, self.ell_max, self.ch)
        ln_p = ln_p[ell_lo:]
        ln_t = ln_t[ell_lo:]
        half_norm = (0.5 * np.log(ells * (ells + 1.0)))[:, None]
        ha = self.half_a[ells][:, None]
        hb = self.half_b[ells][:, None]
        with np.errstate(invalid="ignore"):
            v1 = np.vstack([
                np.exp(ha - half_norm + ln_t + self.half_tm[None, :]),
                np.exp(hb - half_norm + ln_p + self.half_tm[None, :]),
            ])
            v2 = np.vstack([
                np.exp(ha - half_norm + ln_p + self.half_te[None, :]),
                np.exp(hb - half_norm + ln_t + self.half_te[None, :]),
            ])
        v1 = np.nan_to_num(v1, nan=0.0, posinf=0.0)
        v2 = np.nan_to_num(v2, nan=0.0, posinf=0.0)
        return v1, v2


class _StaticBlocks:
    """Gram factors of the analytic xi = 0 blocks (polarization diagonal)."""

    def __init__(self, geom, plane_model, sphere_model, ell_max, nodes):
        self.ell_max = ell_max
        Z = geom.Z
        u, w = _laguerre(nodes)
        self.kappa = u / (2.0 * Z)   # at xi = 0, kappa = k
        r_te0, r_tm0 = static_fresnel(plane_model, self.kappa)
        ln_SE, ln_SM = mie_static_limit_logs(sphere_model, geom.R, ell_max)
        self.half_SE = 0.5 * ln_SE
        self.half_SM = 0.5 * ln_SM
        ln_u = np.log(u)
        ln2Z = math.log(2.0 * Z)
        # the 1/(2Z) of the measure is carried by the (l + 1/2) row exponents
        with np.errstate(divide="ignore"):
            self.base_tm = 0.5 * (np.log(w) + math.log(4.0 * math.pi)
                                  + np.log(np.maximum(r_tm0, 0.0)))
            self.base_te = 0.5 * (np.log(w) + math.log(4.0 * math.pi)
                                  + np.log(np.maximum(-r_te0, 0.0)))
        self.ln_u = ln_u
        self.ln2Z = ln2Z

    def gram(self, m: int):
        ell_lo = max(1, m)
        ells = np.arange(ell_lo, self.ell_max + 1)
        # ln that_lm = ln l + ln N_lm + ln D_lm,  D_lm = (2l)! / (2^l l! (l-m)!)
        lnD = (gammaln(2.0 * ells + 1.0) - ells * math.log(2.0)
               - gammaln(ells + 1.0) - gammaln(ells - m + 1.0))
        ln_that = np.log(ells) + ln_normalization(ells, m) + lnD
        half_norm = 0.5 * np.log(ells * (ells + 1.0))
        row_e = (self.half_SE[ells] + ln_that - half_norm
                 - (ells + 0.5) * self.ln2Z)[:, None]
        row_m = (self.half_SM[ells] + ln_that - half_norm
                 - (ells + 0.5) * self.ln2Z)[:, None]
        pw = ells[:, None] * self.ln_u[None, :]
        with np.errstate(invalid="ignore"):
            v_e = np.exp(row_e + pw + self.base_tm[None, :])
            v_m = np.exp(row_m + pw + self.base_te[None, :])
        v_e = np.nan_to_num(v_e, nan=0.0, posinf=0.0)
        v_m = np.nan_to_num(v_m, nan=0.0, posinf=0.0)
        n = ells.size
        v1 = np.zeros((2 * n, v_e.shape[1]))
        v2 = np.zeros_like(v1)
        v1[:n] = v_e
        v2[n:] = v_m
        return v1, v2


def _chol_triple(v1, v2, kappa, order):
    """(ln det(1-M), d/dL, d2/dL2) from the Gram factors of one block.

    M = V1 V1^T + V2 V2^T; L-derivatives act as node weights -2 kappa and
    4 kappa^2 under the integral.
    """
    mat = v1 @ v1.T + v2 @ v2.T
    eye = np.eye(mat.shape[0])
    try:
        cf = linalg.cho_factor(eye - mat, lower=True, check_finite=False)
    except linalg.LinAlgError as exc:
        raise ConvergenceError(
            "round-trip block has spectral radius >= 1") from exc
    logdet = 2.0 * float(np.sum(np.log(np.diag(cf[0]))))
    if order == 0:
        return logdet, 0.0, 0.0
    d_mat = -2.0 * ((v1 * kappa) @ v1.T + (v2 * kappa) @ v2.T)
    X = linalg.cho_solve(cf, d_mat, check_finite=False)
    d_logdet = -float(np.trace(X))
    if order == 1:
        return logdet, d_logdet, 0.0
    d2_mat = 4.0 * ((v1 * kappa**2) @ v1.T + (v2 * kappa**2) @ v2.T)
    Y = linalg.cho_solve(cf, d2_mat, check_finite=False)
    d2_logdet = -float(np.trace(Y)) - float(np.sum(X * X.T))
    return logdet, d_logdet, d2_logdet


def _sum_over_m(blocks, ell_max, rel_tol, order):
    """Azimuthal sum with weight 1 for m = 0 and 2 for m > 0, early exit."""
    acc = np.zeros(3)
    below = 0
    for m in range(ell_max + 1):
        v1, v2 = blocks.gram(m)
        triple = np.array(_chol_triple(v1, v2, blocks.kappa, order))
        weight = 1.0 if m == 0 else 2.0
        acc += weight * triple
        if m >= 1:
            if abs(triple[0]) <= 0.1 * rel_tol * max(abs(acc[0]), 1e-300):
                below += 1
                if below >= 2:
                    break
            else:
                below = 0
    return acc


def round_trip_block(m: int, xi: float, geom: SphereGeometry, plane_model,
                     sphere_model, trunc: MultipoleTruncation,
                     nodes: int | None = None) -> RoundTripBlock:
    """Assemble one azimuthal round-trip block (xi > 0; |m| <= ell_max).

    The matrix is returned in the symmetric balanced representation; the
    polarization-mixing blocks carry opposite signs for +m and -m, so the
    sign pattern is physical while det and spectrum are m-sign independent.
    """
    if abs(m) > trunc.ell_max:
        raise ValueError("|m| must not exceed ell_max")
    if xi <= 0:
        raise ValueError("xi must be positive; the xi = 0 block is internal "
                         "to the Matsubara path")
    nodes = nodes or _default_nodes(trunc.ell_max)
    blocks = _FrequencyBlocks(xi, geom, plane_model, sphere_model,
                              trunc.ell_max, nodes)
    v1, v2 = blocks.gram(abs(m))
    mat = v1 @ v1.T + v2 @ v2.T
    n = mat.shape[0] // 2
    if m >= 0:
        mat[:n, n:] *= -1.0
        mat[n:, :n] *= -1.0
    return RoundTripBlock(m=m, ell_min=max(1, abs(m)), ell_max=trunc.ell_max,
                          matrix=mat)


def log_det_D(xi: float, geom: SphereGeometry, models, trunc: MultipoleTruncation,
              nodes: int | None = None) -> float:
    """sum_m w_m ln det(1 - M(m)) at one frequency; strictly negative.

    `models` is the pair (plane_model, sphere_model).  xi = 0 dispatches to
    the analytic static blocks.
    """
    plane_model, sphere_model = models
    nodes = nodes or _default_nodes(trunc.ell_max)
    if xi == 0.0:
        blocks = _StaticBlocks(geom, plane_model, sphere_model, trunc.ell_max, nodes)
    else:
        blocks = _FrequencyBlocks(xi, geom, plane_model, sphere_model,
                                  trunc.ell_max, nodes)
    return float(_sum_over_m(blocks, trunc.ell_max, trunc.rel_tol, 0)[0])


def logdet_integrand(geom: SphereGeometry, models, trunc: MultipoleTruncation,
                     nodes: int | None = None):
    """The frequency integrand xi -> sum_m w_m ln det(1 - M(m)); feedable to
    the matsubara engines (handles xi = 0 analytically)."""
    def f(xi):
        if np.ndim(xi) > 0:
            return np.array([f(float(x)) for x in np.asarray(xi)])
        return log_det_D(float(xi), geom, models, trunc, nodes)
    return f


def _efg_triple_integrand(geom, models, trunc, nodes):
    plane_model, sphere_model = models
    nodes = nodes or _default_nodes(trunc.ell_max)

    def f(xi):
        if xi == 0.0:
            blocks = _StaticBlocks(geom, plane_model, sphere_model,
                                   trunc.ell_max, nodes)
        else:
            blocks = _FrequencyBlocks(xi, geom, plane_model, sphere_model,
                                      trunc.ell_max, nodes)
        return _sum_over_m(blocks, trunc.ell_max, trunc.rel_tol, 2)
    return f


def _warn_if_underresolved(geom, trunc):
    if geom.x < trunc.x_min:
        warnings.warn(
            f"aspect ratio x = {geom.x:.3g} below the resolved window "
            f"x_min = {trunc.x_min:.3g} of ell_max = {trunc.ell_max}",
            stacklevel=3)


def casimir_energy_sphere(geom: SphereGeometry, models,
                          trunc: MultipoleTruncation | None = None,
                          spec: QuadratureSpec | None = None,
                          nodes: int | None = None) -> float:
    """Casimir (free) energy of the plane-sphere cavity, in J (negative).

    T = 0 uses the xi-integral, T > 0 the Matsubara sum with its analytic
    xi = 0 block.  `models` = (plane_model, sphere_model).
    """
    trunc = trunc or default_truncation(geom.x)
    _warn_if_underresolved(geom, trunc)
    f = logdet_integrand(geom, models, trunc, nodes)
    try:
        if geom.T > 0:
            return thermal_sum(f, geom.T, spec)
        return zero_t_integral(f, spec, scale=C_LIGHT / (2.0 * geom.L))
    except ConvergenceError as e:
        raise ConvergenceError(str(e), partial=e.partial, tail=e.tail,
                               context=f"plane-sphere energy, x={geom.x:.3g}") from e


def energy_force_gradient(geom: SphereGeometry, models,
                          trunc: MultipoleTruncation | None = None,
                          spec: QuadratureSpec | None = None,
                          nodes: int | None = None):
    """(E, F, G) in one pass, differentiating the propagation factors
    analytically inside the frequency integrand.

    F = -dE/dL < 0 (attraction), G = dF/dL > 0.
    """
    trunc = trunc or default_truncation(geom.x)
    _warn_if_underresolved(geom, trunc)
    spec = spec or QuadratureSpec()
    f = _efg_triple_integrand(geom, models, trunc, nodes)
    if geom.T > 0:
        cache = {}

        def comp(i):
            def g(xi):
                key = float(xi)
                if key not in cache:
                    cache[key] = f(key)
                return cache[key][i]
            return g
        g0 = thermal_sum(comp(0), geom.T, spec)
        g1 = thermal_sum(comp(1), geom.T, spec)
        g2 = thermal_sum(comp(2), geom.T, spec)
    else:
        scale = C_LIGHT / (2.0 * geom.L)
        res = integrate.quad_vec(lambda u: f(u * scale), 0.0, np.inf,
                                 epsabs=spec.abs_floor, epsrel=spec.rel_tol,
                                 limit=spec.max_subdivisions)
        pref = HBAR * scale / (2.0 * math.pi)
        g0, g1, g2 = pref * res[0]
    return g0, -g1, -g2


def casimir_force_sphere_fd(geom: SphereGeometry, models,
                            trunc: MultipoleTruncation | None = None,
                            spec: QuadratureSpec | None = None,
                            nodes: int | None = None,
                            rel_step: float = 1e-3):
    """(F, G) by Richardson-extrapolated central differences of the energy."""
    trunc = trunc or default_truncation(geom.x)
    spec = spec or QuadratureSpec()
    L = geom.L
    h = rel_step * L

    def energy(Lval):
        g = SphereGeometry(L=Lval, R=geom.R, T=geom.T)
        return casimir_energy_sphere(g, models, trunc, spec, nodes)

    e0 = energy(L)
    ep, em = energy(L + h), energy(L - h)
    ep2, em2 = energy(L + h / 2), energy(L - h / 2)
    if abs(ep - em) < 10.0 * spec.rel_tol * abs(e0):
        raise ConvergenceError(
            "energy difference within quadrature noise; increase the step "
            "or tighten tolerances", context=f"finite differences at L={L}")
    f_h = -(ep - em) / (2.0 * h)
    f_h2 = -(ep2 - em2) / h
    force = (4.0 * f_h2 - f_h) / 3.0
    g_h = -(ep - 2.0 * e0 + em) / h**2
    g_h2 = -(ep2 - 2.0 * e0 + em2) / (h / 2.0)**2
    gradient = (4.0 * g_h2 - g_h) / 3.0
    return force, gradient


def force_and_gradient(geom: SphereGeometry, models,
                       trunc: MultipoleTruncation | None = None,
                       spec: QuadratureSpec | None = None,
                       nodes: int | None = None,
                       method: str = "fd"):
    """(F, G) with F = -dE/dL (N, negative) and G = dF/dL (N/m, positive).

    method "fd" (default) uses Richardson-extrapolated central differences
    with relative step 1e-3; "analytic" differentiates the propagation
    factors inside the integrand (faster, cross-checked against "fd").
    """
    if method == "fd":
        return casimir_force_sphere_fd(geom, models, trunc, spec, nodes)
    if method == "analytic":
        _, force, gradient = energy_force_gradient(geom, models, trunc, spec, nodes)
        return force, gradient
    raise ValueError("method must be 'fd' or 'analytic'")


def pfa_reference(geom: SphereGeometry, models,
                  spec: QuadratureSpec | None = None):
    """PFA force and gradient magnitudes: F = 2 pi R |E_pp(L)|/A,
    G = 2 pi R |P_pp(L)|, with the same mirrors and temperature."""
    plane_model, sphere_model = models
    pg = PlateGeometry(L=geom.L, A=1.0, T=geom.T)
    e_area = lifshitz_free_energy(plane_model, sphere_model, pg, spec)
    p = casimir_pressure(plane_model, sphere_model, pg, spec)
    return 2.0 * math.pi * geom.R * abs(e_area), 2.0 * math.pi * geom.R * abs(p)


def reduction_curve(models, R: float, x_values, T: float = 0.0,
                    trunc: MultipoleTruncation | None = None,
                    spec: QuadratureSpec | None = None,
                    nodes: int | None = None,
                    method: str = "analytic"):
    """SphereSamples over an x grid, each with its PFA references."""
    samples = []
    for x in x_values:
        geom = SphereGeometry(L=x * R, R=R, T=T)
        tr = trunc or default_truncation(x)
        if method == "analytic":
            energy, force, gradient = energy_force_gradient(geom, models, tr,
                                                            spec, nodes)
        else:
            energy = casimir_energy_sphere(geom, models, tr, spec, nodes)
            force, gradient = casimir_force_sphere_fd(geom, models, tr, spec, nodes)
        f_pfa, g_pfa = pfa_reference(geom, models, spec)
        samples.append(SphereSample(x=x, energy=energy, force=force,
                                    gradient=gradient, force_pfa=f_pfa,
                                    gradient_pfa=g_pfa))
    return samples


def reduction_and_slope(samples, x_max: float = 0.5) -> ReductionReport:
    """Fit rho_G(x) = 1 + beta_G x + gamma x^2 over the sample window.

    Requires at least 4 converged samples with x <= x_max.  The uncertainty
    combines the fit standard error with a half-window sensitivity.
    """
    usable = sorted((s for s in samples if s.x <= x_max), key=lambda s: s.x)
    if len(usable) < 4:
        raise ValueError("beta_G fit needs at least 4 samples with x <= "
                         f"{x_max}; got {len(usable)}")
    x = np.array([s.x for s in usable])
    rho_f = np.array([s.rho_F for s in usable])
    rho_g = np.array([s.rho_G for s in usable])

    def fit(xs, ys):
        A = np.column_stack([xs, xs**2])
        coef, res, rank, _ = np.linalg.lstsq(A, ys - 1.0, rcond=None)
        if rank < 2:
            raise ValueError("beta_G fit is ill-conditioned (collinear grid)")
        return coef, A

    coef, A = fit(x, rho_g)
    beta = float(coef[0])
    resid = rho_g - 1.0 - A @ coef
    dof = max(len(x) - 2, 1)
    s2 = float(resid @ resid) / dof
    cov = s2 * np.linalg.inv(A.T @ A)
    stderr = math.sqrt(max(cov[0, 0], 0.0))

    half = x <= 0.5 * (x[0] + x[-1])
    sens = 0.0
    if np.count_nonzero(half) >= 3:
        coef_h, _ = fit(x[half], rho_g[half])
        sens = abs(float(coef_h[0]) - beta)

    return ReductionReport(x=x, rho_F=rho_f, rho_G=rho_g, beta_G=beta,
                           beta_G_uncertainty=max(stderr, sens),
                           fit_residual=math.sqrt(float(resid @ resid) / len(x)))
