"""Log-scaled special functions for the plane-sphere round trip.

Everything here lives on the imaginary frequency axis, where the spherical
machinery becomes real and sign-definite but spans hundreds of orders of
magnitude.  All quantities are therefore returned as natural logarithms of
positive numbers:

* modified Riccati-Bessel functions psi_l(x) = x i_l(x) (regular) and
  chi_l(x) = (2/pi) x k_l(x) (outgoing), with their derivatives; the
  normalization makes chi_0 = e^-x and the Wronskian psi' chi - psi chi' = 1;
* Mie reflection amplitudes a_l (electric) and b_l (magnetic) of a sphere,
  built from those functions (a_l > 0, b_l < 0);
* the hyperbolic analogues of the Mie angular functions pi_lm, tau_lm,
  evaluated at cos(theta) = kappa c / xi > 1, which carry the plane-wave to
  multipole transformation.

The regular solution is obtained by downward ratio recurrence, the outgoing
one by upward recurrence, both with per-step rescaling so that arguments up
to x ~ 1e4 and orders up to a few hundred stay inside double range.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

from . import dielectric as diel
from .dielectric import C_LIGHT, Perfect, permittivity

__all__ = [
    "riccati_psi_logs",
    "riccati_chi_logs",
    "mie_signed_logs",
    "mie_static_limit_logs",
    "legendre_hat_logs",
    "angular_logs",
    "ln_normalization",
    "ln_double_factorial_odd",
]

_LOG_HUGE = 600.0  # rescale threshold, ~e^600


def ln_double_factorial_odd(n: int) -> float:
    """ln((2n+1)!!) via (2n+1)!! = (2n+1)! / (2^n n!)."""
    return float(gammaln(2 * n + 2) - n * math.log(2.0) - gammaln(n + 1))


def ln_normalization(ell, m):
    """ln N_lm with N_lm = sqrt((2l+1)(l-m)! / (4 pi (l+m)!)), vectorized in ell."""
    ell = np.asarray(ell, dtype=float)
    return 0.5 * (np.log(2.0 * ell + 1.0) + gammaln(ell - m + 1.0)
                  - math.log(4.0 * math.pi) - gammaln(ell + m + 1.0))


_RECURRENCE_TOP_CAP = 300_000


def _ln_scaled_bessel_asymptotic(orders: np.ndarray, x: float) -> np.ndarray:
    """ln(I_nu(x) e^-x sqrt(2 pi x)) from the large-argument expansion.

    Machine accurate for x >~ 3e5 and nu <~ 100 (seven terms); used only
    beyond the reach of the downward recurrence.
    """
    mu = 4.0 * orders**2
    total = np.ones_like(mu)
    term = np.ones_like(mu)
    for k in range(7):
        term = -term * (mu - (2 * k + 1) ** 2) / ((k + 1) * 8.0 * x)
        total += term
    if np.any(total <= 0) or np.max(np.abs(term / total)) > 1e-12:
        raise ValueError(
            f"Bessel asymptotics out of range at x = {x:.3g}, "
            f"max order {orders.max():.1f}")
    return np.log(total)


def riccati_psi_logs(ell_max: int, x: float):
    """(ln psi_l, ln psi_l') for l = 0..ell_max at x > 0.

    psi_l(x) = x i_l(x); both psi and psi' are positive and increasing in x.
    Downward ratio recurrence (the regular solution is minimal upward); for
    extreme arguments, where the recurrence would have to start at order
    ~x, the scaled large-argument expansion takes over.
    """
    if x <= 0:
        raise ValueError("argument must be positive")
    top = ell_max + 30 + int(1.1 * x)
    if top > _RECURRENCE_TOP_CAP:
        orders = np.arange(-1, ell_max + 1) + 0.5
        ln_all = (_ln_scaled_bessel_asymptotic(orders, x)
                  + x - 0.5 * math.log(2.0 * math.pi * x)
                  + 0.5 * math.log(math.pi / (2.0 * x)))
        ln_i = ln_all[1:]                 # i_0 .. i_ell_max
        ln_prev = ln_all[:-1]             # i_{-1} .. i_{ell_max - 1}
    else:
        ratios = np.empty(ell_max + 2)
        rho = x / (2.0 * top + 1.0)  # seed; its relative error dies on the way down
        for ell in range(top, 0, -1):
            rho = x / ((2.0 * ell + 1.0) + x * rho)
            if ell <= ell_max + 1:
                ratios[ell] = rho
        # ln i_0 = ln(sinh x / x), written to avoid overflow
        ln_i0 = x + math.log1p(-math.exp(-2.0 * x) if 2.0 * x < 700 else 0.0) \
            - math.log(2.0 * x)
        ln_i = np.empty(ell_max + 1)
        ln_i[0] = ln_i0
        for ell in range(1, ell_max + 1):
            ln_i[ell] = ln_i[ell - 1] + math.log(ratios[ell])
        ln_im1 = x + math.log1p(math.exp(-2.0 * x) if 2.0 * x < 700 else 0.0) \
            - math.log(2.0 * x)
        ln_prev = np.concatenate(([ln_im1], ln_i[:ell_max]))
    ln_psi = ln_i + math.log(x)
    # psi_l' = x i_{l-1} - l i_l
    ells = np.arange(ell_max + 1, dtype=float)
    rho_l = np.exp(ln_i - ln_prev)
    ln_dpsi = ln_prev + np.log(x - ells * rho_l)
    return ln_psi, ln_dpsi


def riccati_chi_logs(ell_max: int, x: float):
    """(ln chi_l, ln |chi_l'|) for l = 0..ell_max at x > 0; chi_l' < 0.

    chi_l(x) = (2/pi) x k_l(x), so chi_0 = e^-x and chi_{-1} = chi_0.
    Upward recurrence (the outgoing solution is dominant upward), with the
    e^-x prefactor carried in the log offset.
    """
    if x <= 0:
        raise ValueError("argument must be positive")
    ln_chi = np.empty(ell_max + 1)
    offset = -x
    prev = 1.0   # chi_{-1} e^x
    cur = 1.0    # chi_0  e^x
    ln_chi[0] = offset
    ln_prev_arr = np.empty(ell_max + 1)
    ln_prev_arr[0] = offset  # ln chi_{-1}
    for ell in range(1, ell_max + 1):
        nxt = (2.0 * ell - 1.0) / x * cur + prev
        prev, cur = cur, nxt
        if cur > 1e280:
            scale = math.log(cur)
            offset += scale
            cur = 1.0
            prev = math.exp(math.log(prev) - scale)
        ln_prev_arr[ell] = offset + math.log(prev)
        ln_chi[ell] = offset + math.log(cur)
    # chi_l' = -(chi_{l-1} + (l/x) chi_l)
    ells = np.arange(ell_max + 1, dtype=float)
    ln_abs_dchi = ln_prev_arr + np.log1p((ells / x) * np.exp(ln_chi - ln_prev_arr))
    return ln_chi, ln_abs_dchi


def _sub_exp(ln_a, ln_b):
    """log(e^ln_a - e^ln_b) elementwise, requiring a > b; -inf when a <= b."""
    ln_a = np.asarray(ln_a, dtype=float)
    ln_b = np.asarray(ln_b, dtype=float)
    diff = -np.expm1(np.minimum(ln_b - ln_a, 0.0))
    return np.where(diff > 0, ln_a + np.log(np.maximum(diff, 1e-300)), -np.inf)


def mie_signed_logs(model, R: float, xi: float, ell_max: int):
    """Mie reflection amplitudes of a sphere at imaginary frequency.

    Returns ``(ln|a_l|, ln|b_l|)`` for l = 1..ell_max (index 0 unused),
    in the normalization where the perfect reflector gives
    a_l = -psi_l'(y)/chi_l'(y) and b_l = -psi_l(y)/chi_l(y), y = xi R / c.
    Signs are fixed: a_l > 0, b_l < 0 for every passive model here.

    Raises ValueError when the evaluation leaves double range (does not
    happen below y ~ 1e4).
    """
    if xi <= 0 or R <= 0:
        raise ValueError("xi and R must be positive")
    y = xi * R / C_LIGHT
    ln_psi, ln_dpsi = riccati_psi_logs(ell_max, y)
    ln_chi, ln_adchi = riccati_chi_logs(ell_max, y)
    if isinstance(model, Perfect):
        ln_a = ln_dpsi - ln_adchi
        ln_b = ln_psi - ln_chi
    else:
        eps = permittivity(model, xi)
        if eps - 1.0 < 1e-14:
            ln_a = np.full(ell_max + 1, -np.inf)
            ln_b = np.full(ell_max + 1, -np.inf)
            return ln_a[0:] * 1.0, ln_b
        n = math.sqrt(eps)
        ln_n = 0.5 * math.log(eps)
        ln_psi_n, ln_dpsi_n = riccati_psi_logs(ell_max, n * y)
        # a_l = [n psi(ny) psi'(y) - psi(y) psi'(ny)] /
        #       [psi'(ny) chi(y) + n psi(ny) |chi'(y)|]
        num_a = _sub_exp(ln_n + ln_psi_n + ln_dpsi, ln_psi + ln_dpsi_n)
        den_a = np.logaddexp(ln_dpsi_n + ln_chi, ln_n + ln_psi_n + ln_adchi)
        ln_a = num_a - den_a
        # b_l = -[n psi(y) psi'(ny) - psi(ny) psi'(y)] /
        #        [n chi(y) psi'(ny) + psi(ny) |chi'(y)|]
        num_b = _sub_exp(ln_n + ln_psi + ln_dpsi_n, ln_psi_n + ln_dpsi)
        den_b = np.logaddexp(ln_n + ln_chi + ln_dpsi_n, ln_psi_n + ln_adchi)
        ln_b = num_b - den_b
    if not (np.all(np.isfinite(ln_a[1:])) or np.all(ln_a[1:] == -np.inf)):
        raise ValueError(f"Mie recurrence left double range at y = {y:.3g}")
    return ln_a, ln_b


def mie_static_limit_logs(model, R: float, ell_max: int):
    """Rescaled xi -> 0 Mie amplitudes: s_l ~ S_l (xi/c)^(2l+1).

    Returns ``(lnS_E, lnS_M)`` for l = 0..ell_max (index 0 unused) with
    S_E = lim a_l / K^(2l+1) > 0 and |S_M| = -lim b_l / K^(2l+1) >= 0
    (S_M itself is <= 0; the magnetic channel is empty for Drude and for
    non-magnetic dielectrics).
    """
    ells = np.arange(ell_max + 1, dtype=float)
    ln_dfacs = np.array([ln_double_factorial_odd(ell) for ell in range(ell_max + 1)])
    # ln((2l+1)!! (2l-1)!!)
    ln_ff = ln_dfacs + np.concatenate(([0.0], ln_dfacs[:-1]))
    ln_R = np.log(R) * (2.0 * ells + 1.0)

    conductor_E = ln_R + np.log(ells + 1.0) - np.log(np.maximum(ells, 1.0)) - ln_ff

    if isinstance(model, Perfect):
        ln_SE = conductor_E
        ln_SM = ln_R - ln_ff
    elif isinstance(model, diel.Plasma):
        ln_SE = conductor_E
        y_p = model.omega_p * R / C_LIGHT
        ln_psi, ln_dpsi = riccati_psi_logs(ell_max, y_p)
        # |S_M| = R^(2l+1) [y_p psi' - (l+1) psi] / ((2l+1)!!(2l-1)!! [l psi + y_p psi'])
        num = _sub_exp(math.log(y_p) + ln_dpsi, np.log(ells + 1.0) + ln_psi)
        den = np.logaddexp(np.log(np.maximum(ells, 1e-300)) + ln_psi,
                           math.log(y_p) + ln_dpsi)
        ln_SM = ln_R - ln_ff + num - den
    elif isinstance(model, diel.Drude):
        ln_SE = conductor_E
        ln_SM = np.full(ell_max + 1, -np.inf)
    elif isinstance(model, diel.Tabulated):
        if model.has_drude:
            ln_SE = conductor_E
        else:
            eps0 = model.eps_hat(model.xi_grid[0])
            ln_SE = (ln_R + np.log(ells + 1.0) + math.log(max(eps0 - 1.0, 1e-300))
                     - ln_ff - np.log(ells * (eps0 + 1.0) + 1.0))
        ln_SM = np.full(ell_max + 1, -np.inf)
    else:
        raise TypeError(f"unknown dielectric model {model!r}")
    return ln_SE, ln_SM


def legendre_hat_logs(m: int, ell_max: int, x: np.ndarray):
    """ln of Phat_l^m(x) = (x^2-1)^(m/2) d^m P_l/dx^m for x > 1.

    Returns an array of shape (ell_max+1, len(x)); rows with l < m are -inf.
    Upward recurrence in l follows the dominant solution, with per-node
    rescaling into the log offset.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 1.0):
        raise ValueError("hyperbolic Legendre functions need x > 1")
    n = x.size
    out = np.full((ell_max + 1, n), -np.inf)
    if m > ell_max:
        return out
    s = np.sqrt((x - 1.0) * (x + 1.0))
    # starting row l = m: (2m-1)!! s^m
    offset = (ln_double_factorial_odd(m - 1) if m >= 1 else 0.0) + \
        (m * np.log(s) if m >= 1 else np.zeros(n))
    offset = np.broadcast_to(offset, (n,)).astype(float).copy()
    p_prev = np.zeros(n)          # Phat_{m-1} = 0
    p_cur = np.ones(n)            # Phat_m / e^offset
    out[m] = offset
    for ell in range(m, ell_max):
        p_next = ((2.0 * ell + 1.0) * x * p_cur - (ell + m) * p_prev) / (ell - m + 1.0)
        p_prev, p_cur = p_cur, p_next
        big = p_cur > 1e280
        if np.any(big):
            scale = np.where(big, np.log(p_cur), 0.0)
            offset = offset + scale
            norm = np.exp(-scale)
            p_cur = p_cur * norm
            p_prev = p_prev * norm
        out[ell + 1] = offset + np.log(np.maximum(p_cur, 1e-300))
    return out


def angular_logs(m: int, ell_max: int, ch: np.ndarray):
    """Hyperbolic angular functions at cos(theta) = ch > 1, in logs.

    p_lm = m N_lm Phat_l^m(ch) / sh  and
    t_lm = N_lm [l ch Phat_l^m - (l+m) Phat_{l-1}^m] / sh,  sh = sqrt(ch^2-1),

    both positive.  Returns (ln_p, ln_t), arrays of shape (ell_max+1, n);
    rows with l < max(1, m) are -inf, and ln_p is -inf everywhere for m = 0.
    """
    ch = np.asarray(ch, dtype=float)
    n = ch.size
    sh = np.sqrt((ch - 1.0) * (ch + 1.0))
    ln_sh = np.log(sh)
    lnP = legendre_hat_logs(m, ell_max, ch)
    ln_p = np.full((ell_max + 1, n), -np.inf)
    ln_t = np.full((ell_max + 1, n), -np.inf)
    ell_lo = max(1, m)
    ells = np.arange(ell_lo, ell_max + 1)
    lnN = ln_normalization(ells, m)[:, None]
    block = lnP[ell_lo:]
    if m >= 1:
        ln_p[ell_lo:] = math.log(m) + lnN + block - ln_sh[None, :]
    # u = l ch - (l+m) Phat_{l-1}/Phat_l > 0; the row below ell_lo is empty
    prev = np.full((ells.size, n), -np.inf)
    prev[1:] = block[:-1]
    if m == 0:
        prev[0] = lnP[0]
    with np.errstate(invalid="ignore"):
        ratio = np.exp(prev - block)
    ratio = np.nan_to_num(ratio, nan=0.0)
    u = ells[:, None] * ch[None, :] - (ells + m)[:, None] * ratio
    ln_t[ell_lo:] = lnN + block + np.log(np.maximum(u, 1e-300)) - ln_sh[None, :]
    return ln_p, ln_t
