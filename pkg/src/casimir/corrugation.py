"""Perturbative lateral Casimir interaction between corrugated plates.

Both mirrors carry uniaxial sinusoidal profiles h_1 = a_1 cos(q_C x) and
h_2 = a_2 cos(q_C (x - b)) on top of a mean gap L (heights counted positive
when they shrink the gap).  To second order in the amplitudes the
b-dependent part of the energy is

    dE = (A/2) G_C(q_C) a_1 a_2 cos(q_C b),
    F_lat = -d(dE)/db = (A/2) G_C a_1 a_2 q_C sin(q_C b),

with the spectral kernel G_C < 0 obtained from a trace over one scattering
off each corrugation,

    G_C(q_C) = -(hbar/2pi) int_0^inf dxi int d^2k/(2pi)^2 sum_{pp'} s_pp'
        * R(k,p -> k',p') R(k',p' -> k,p) e^{-(kappa+kappa')L}
        / (d_p(k) d_p'(k')),       k' = k + q_C x_hat,

where R is the first-order reflection kernel per unit corrugation height,
d_p the specular round-trip denominator of the plane-plane problem, and
s_pp' = -1 for polarization-mixing terms (the mirror facing down sees the
opposite handedness, flipping its TE<->TM amplitudes).

The perfect-reflector kernel (first-order boundary perturbation of an ideal
mirror) ships in full.  Kernels for other mirror models plug in through the
same two-argument interface; only the zero-wavevector limit, where every
specular model reduces to R = 2 kappa r_p on the diagonal, is built in
(`flat_shift_kernel`).  The q_C -> 0 limit of G_C reproduces the second
L-derivative of the plane-plane energy per area, which ties this module to
an independent computation and fixes every sign and normalization.

Zero temperature only; the second-order expansion is used at T = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .dielectric import C_LIGHT, Perfect, fresnel
from .matsubara import ConvergenceError, QuadratureSpec, zero_t_integral

__all__ = [
    "CorrugationSpec",
    "KernelSample",
    "PerfectReflectorKernel",
    "flat_shift_kernel",
    "first_order_reflection_perfect",
    "response_kernel",
    "lateral_energy",
    "lateral_force",
    "pfa_ratio_curve",
]


@dataclass(frozen=True)
class CorrugationSpec:
    """Corrugation amplitudes (m), wavelength (m) and crest mismatch (m)."""

    a1: float
    a2: float
    lambda_c: float
    b: float = 0.0

    def __post_init__(self):
        if self.a1 < 0 or self.a2 < 0:
            raise ValueError("amplitudes must be >= 0")
        if self.lambda_c <= 0:
            raise ValueError("corrugation wavelength must be positive")

    @property
    def k_c(self) -> float:
        """Corrugation wavevector 2 pi / lambda_c (rad/m)."""
        return 2.0 * math.pi / self.lambda_c

    def is_perturbative(self, L: float, lambda_p: float | None = None) -> bool:
        """Amplitudes small against every length scale: a < min(lambda_c,
        lambda_p, L)/10."""
        scales = [self.lambda_c, L]
        if lambda_p is not None:
            scales.append(lambda_p)
        bound = min(scales) / 10.0
        return self.a1 < bound and self.a2 < bound


@dataclass(frozen=True)
class KernelSample:
    """One point of the spectral kernel: wavevector, G_C and the PFA ratio."""

    k_c: float        # rad/m
    G_C: float        # J/m^4 (negative)
    r_C: float        # dimensionless, G_C(k_c)/G_C(0) in (0, 1]


class PerfectReflectorKernel:
    """First-order reflection of a corrugated ideal mirror, per unit height.

    Amplitudes are stated in the mirror-below convention (cavity above); the
    trace assembly accounts for the second mirror's opposite handedness.
    On the specular diagonal the kernel reduces to -2 kappa (TE) and
    +2 kappa (TM), the height derivative of the reflection phase.
    """

    def __call__(self, xi, kin, kout):
        """2x2 amplitude matrix, rows = incoming (TE, TM), columns = outgoing.

        `kin`, `kout` are transverse wavevectors, either 2-vectors or arrays
        of shape (2, ...); `xi` > 0 is the imaginary frequency.
        """
        kin = np.asarray(kin, dtype=float)
        kout = np.asarray(kout, dtype=float)
        K = xi / C_LIGHT
        kx, ky = kin[0], kin[1]
        kxp, kyp = kout[0], kout[1]
        k = np.hypot(kx, ky)
        kp = np.hypot(kxp, kyp)
        kappa = np.hypot(k, K)
        kappap = np.hypot(kp, K)
        qx, qy = kxp - kx, kyp - ky
        q = np.hypot(qx, qy)

        # unit vectors; at k = 0 the azimuth is irrelevant since every dot
        # product below carries a factor k
        def hat(x, y, mag):
            safe = np.where(mag > 0, mag, 1.0)
            return x / safe, y / safe
        ex, ey = hat(kx, ky, k)
        exp_, eyp = hat(kxp, kyp, kp)
        eqx, eqy = hat(qx, qy, q)
        dot_kk = ex * exp_ + ey * eyp                      # khat . khat'
        dot_ff = dot_kk                                    # phihat . phihat'
        dot_kf = ex * (-eyp) + ey * exp_                   # khat . phihat'
        dot_fk = (-ey) * exp_ + ex * eyp                   # phihat . khat'
        dot_qf = eqx * (-eyp) + eqy * exp_                 # qhat . phihat'... see below
        # phihat_q . phihat' and phihat_q . khat'
        fq_ff = (-eqy) * (-eyp) + eqx * exp_
        fq_fk = (-eqy) * exp_ + eqx * eyp

        te_te = -2.0 * kappa * dot_kk
        te_tm = -(2.0 * kappa * K / kappap) * dot_kf
        tm_te = (2.0 * kappa**2 / K) * dot_fk + (2.0 * k * q / K) * fq_fk
        tm_tm = (2.0 / kappap) * (kappa**2 * dot_ff + k * q * fq_ff)
        return np.array([[te_te, te_tm], [tm_te, tm_tm]])


def flat_shift_kernel(model):
    """Zero-wavevector kernel of an arbitrary specular mirror.

    Translating a flat mirror by h multiplies r_p by exp(2 kappa h), so the
    first-order diagonal amplitude is 2 kappa r_p(xi, k); off-diagonal
    couplings vanish.  Exact only at q_C = 0 (it anchors G_C(0) for models
    whose corrugation kernel is supplied externally).
    """
    class _Flat:
        def __call__(self, xi, kin, kout):
            kin = np.asarray(kin, dtype=float)
            kout = np.asarray(kout, dtype=float)
            if not np.allclose(kin, kout):
                raise ValueError("flat-shift kernel is diagonal: k_out must "
                                 "equal k_in")
            K = xi / C_LIGHT
            k = np.hypot(kin[0], kin[1])
            kappa = np.hypot(k, K)
            r_te, r_tm = fresnel(model, xi, k)
            zero = np.zeros_like(kappa)
            return np.array([[2.0 * kappa * r_te, zero],
                             [zero, 2.0 * kappa * r_tm]])
    return _Flat()


def first_order_reflection_perfect(xi, k_in, pol_in, k_out, pol_out):
    """Single amplitude of the perfect-mirror kernel (1/m per unit height).

    `k_in`, `k_out` are transverse wavevectors (2-vectors, rad/m); the
    transfer must lie along x (sinusoidal corrugation along x couples only
    k -> k +- q_C x_hat).
    """
    if xi <= 0:
        raise ValueError("xi must be positive")
    k_in = np.asarray(k_in, dtype=float)
    k_out = np.asarray(k_out, dtype=float)
    if abs(k_out[1] - k_in[1]) > 1e-12 * max(1.0, abs(k_in[1])):
        raise ValueError("mode mismatch: transverse transfer must be along x")
    idx = {"TE": 0, "TM": 1}
    try:
        i, j = idx[pol_in], idx[pol_out]
    except KeyError:
        raise ValueError("polarizations must be 'TE' or 'TM'") from None
    return float(PerfectReflectorKernel()(xi, k_in, k_out)[i, j])


@lru_cache(maxsize=8)
def _polar_grid(nr: int, na: int):
    from scipy.special import roots_genlaguerre
    tr, wr = roots_genlaguerre(nr, 1.0)   # weight t e^-t for the radial k dk
    phi = math.pi * (np.arange(na) + 0.5) / na
    return tr, wr, phi


def _gc_frequency_integrand(models, L, k_c, kernels, nr=48, na=24):
    """Returns f(xi) >= 0 with G_C = -(hbar/2pi) int f dxi.

    The transverse integral runs on a polar grid: Gauss-Laguerre (weight
    t e^-t, t = kL) radially and midpoint nodes over the half circle (the
    integrand is even in the azimuth measured from the corrugation axis).
    """
    m1, m2 = models
    kern1, kern2 = kernels
    tr, wr, phi = _polar_grid(nr, na)
    k = tr / L
    KX = np.outer(k, np.cos(phi))
    KY = np.outer(k, np.sin(phi))
    kin = np.array([KX, KY])
    kout = np.array([KX + k_c, KY])
    kmag = np.hypot(KX, KY)
    kpmag = np.hypot(KX + k_c, KY)
    # measure: int d^2k/(4pi^2) = 2 * (1/L^2) sum_j wr_j e^{+t_j} [...] *
    #          (pi/na) / (4 pi^2), with the radial t factor inside wr
    W = 2.0 * np.outer(wr, np.ones_like(phi)) * (math.pi / na) \
        / (4.0 * math.pi**2 * L * L)
    T_BACK = tr[:, None]                  # restores the e^{-t} of the weights

    def f(xi):
        xi = max(float(xi), 1e-10 * C_LIGHT / L)
        K = xi / C_LIGHT
        kappa = np.hypot(kmag, K)
        kappap = np.hypot(kpmag, K)
        r1_in = fresnel(m1, xi, kmag)
        r2_in = fresnel(m2, xi, kmag)
        r1_out = fresnel(m1, xi, kpmag)
        r2_out = fresnel(m2, xi, kpmag)
        d_in = [1.0 - r1_in[p] * r2_in[p] * np.exp(-2.0 * kappa * L)
                for p in (0, 1)]
        d_out = [1.0 - r1_out[p] * r2_out[p] * np.exp(-2.0 * kappap * L)
                 for p in (0, 1)]
        R2 = kern2(xi, kin, kout)       # mirror 2 scatters k -> k'
        R1 = kern1(xi, kout, kin)       # mirror 1 brings k' -> k
        expo = np.exp(-(kappa + kappap) * L + T_BACK)
        total = np.zeros_like(KX)
        for p_in in (0, 1):
            for p_out in (0, 1):
                sign = 1.0 if p_in == p_out else -1.0
                total += (sign * R2[p_in, p_out] * R1[p_out, p_in]
                          / (d_in[p_in] * d_out[p_out]))
        return float(np.sum(W * total * expo))
    return f


def response_kernel(models, L: float, k_c: float, kernels,
                    spec: QuadratureSpec | None = None,
                    nr: int = 48, na: int = 24) -> float:
    """Spectral kernel G_C(k_c) in J/m^4 (negative).

    `models` = (mirror1, mirror2) fix the specular denominators; `kernels`
    = (kernel1, kernel2) supply the first-order reflection amplitudes, both
    stated in the mirror-below convention.
    """
    if L <= 0 or k_c < 0:
        raise ValueError("L must be positive and k_c >= 0")
    f = _gc_frequency_integrand(models, L, k_c, kernels, nr, na)
    try:
        val = zero_t_integral(f, spec, scale=C_LIGHT / (2.0 * L))
    except ConvergenceError as e:
        raise ConvergenceError(str(e), partial=e.partial, tail=e.tail,
                               context=f"corrugation kernel at k_c*L={k_c * L:.3g}") from e
    return -val


def lateral_energy(cspec: CorrugationSpec, G_C: float, A: float) -> float:
    """dE = (A/2) G_C a1 a2 cos(k_c b), in J."""
    return 0.5 * A * G_C * cspec.a1 * cspec.a2 * math.cos(cspec.k_c * cspec.b)


def lateral_force(cspec: CorrugationSpec, G_C: float, A: float) -> float:
    """F_lat = -d(dE)/db = (A/2) G_C a1 a2 k_c sin(k_c b), in N."""
    return (0.5 * A * G_C * cspec.a1 * cspec.a2 * cspec.k_c
            * math.sin(cspec.k_c * cspec.b))


def pfa_ratio_curve(models, L: float, k_c_values, kernels,
                    spec: QuadratureSpec | None = None,
                    nr: int = 48, na: int = 24):
    """KernelSamples with r_C(k_c) = G_C(k_c)/G_C(0); r_C(0) = 1 exactly."""
    g0 = response_kernel(models, L, 0.0, kernels, spec, nr, na)
    out = []
    for kc in k_c_values:
        if kc == 0.0:
            out.append(KernelSample(k_c=0.0, G_C=g0, r_C=1.0))
            continue
        g = response_kernel(models, L, kc, kernels, spec, nr, na)
        out.append(KernelSample(k_c=kc, G_C=g, r_C=g / g0))
    return out
