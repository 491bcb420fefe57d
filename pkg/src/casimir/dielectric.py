"""Mirror optical response at imaginary frequency and Fresnel reflection.

All built-in mirror models are evaluated on the imaginary frequency axis
omega = i*xi (xi >= 0, rad/s), where the permittivity of a passive medium is
real and >= 1.  The module provides

* the permittivity eps(i*xi) of perfect, plasma, Drude and tabulated mirrors,
* the specular (Fresnel) reflection amplitudes r_TE, r_TM of a bulk mirror,
* a loader for tabulated interband data.

Units are SI throughout; frequencies are angular (rad/s), wavenumbers rad/m.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

__all__ = [
    "PhysicalConstants",
    "CODATA2018",
    "HBAR",
    "C_LIGHT",
    "K_B",
    "Perfect",
    "Plasma",
    "Drude",
    "Tabulated",
    "DielectricModel",
    "TransverseMode",
    "TabulatedParseError",
    "permittivity",
    "fresnel",
    "static_fresnel",
    "load_tabulated",
    "gold_plasma",
    "gold_drude",
    "GOLD_PLASMA_WAVELENGTH",
]


@dataclass(frozen=True)
class PhysicalConstants:
    """Fundamental constants (CODATA 2018 exact/recommended values)."""

    hbar: float = 1.054571817e-34   # J s
    c: float = 299792458.0          # m/s
    k_B: float = 1.380649e-23       # J/K

    def __post_init__(self):
        if not (self.hbar > 0 and self.c > 0 and self.k_B > 0):
            raise ValueError("physical constants must be strictly positive")


CODATA2018 = PhysicalConstants()
HBAR = CODATA2018.hbar
C_LIGHT = CODATA2018.c
K_B = CODATA2018.k_B

#: plasma wavelength commonly used to parameterize gold mirrors
GOLD_PLASMA_WAVELENGTH = 137e-9


class TabulatedParseError(ValueError):
    """Malformed tabulated optical data; carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Perfect:
    """Perfectly reflecting mirror: r_TE = -1, r_TM = +1 at all frequencies."""


@dataclass(frozen=True)
class Plasma:
    """Lossless metal, eps(i xi) = 1 + omega_p^2 / xi^2."""

    omega_p: float  # rad/s

    def __post_init__(self):
        if not self.omega_p > 0:
            raise ValueError("omega_p must be positive")


@dataclass(frozen=True)
class Drude:
    """Dissipative metal, eps(i xi) = 1 + omega_p^2 / (xi (xi + gamma)).

    The relaxation rate gamma > 0 gives the finite static conductivity
    sigma_0 = omega_p^2 / gamma (measured as a frequency).
    """

    omega_p: float  # rad/s
    gamma: float    # rad/s

    def __post_init__(self):
        if not self.omega_p > 0:
            raise ValueError("omega_p must be positive")
        if not self.gamma > 0:
            raise ValueError("gamma must be positive; use Plasma for gamma = 0")

    @property
    def sigma0(self) -> float:
        """Static conductivity omega_p^2 / gamma (rad/s)."""
        return self.omega_p**2 / self.gamma


@dataclass(frozen=True)
class Tabulated:
    """Interband permittivity sampled on a strictly increasing xi grid.

    eps_hat is interpolated log-log linearly between samples, held constant
    below the first sample (the interband term is regular at xi -> 0) and
    clamped to 1 above the last one (high-frequency transparency).  An
    optional Drude term omega_p^2/(xi(xi+gamma)) may be added on top.
    """

    xi_grid: np.ndarray
    eps_hat_grid: np.ndarray
    omega_p: float = 0.0   # rad/s; 0 disables the Drude term
    gamma: float = 0.0     # rad/s

    def __post_init__(self):
        xi = np.asarray(self.xi_grid, dtype=float)
        eh = np.asarray(self.eps_hat_grid, dtype=float)
        if xi.ndim != 1 or xi.size < 1 or xi.shape != eh.shape:
            raise ValueError("xi_grid and eps_hat_grid must be 1-d arrays of equal size")
        if not np.all(xi > 0) or not np.all(np.diff(xi) > 0):
            raise ValueError("xi grid must be positive and strictly increasing")
        if not np.all(eh >= 1.0):
            raise ValueError("tabulated eps_hat values must be >= 1")
        if self.omega_p < 0 or self.gamma < 0 or (self.omega_p > 0 and self.gamma == 0):
            raise ValueError("Drude term requires omega_p > 0 and gamma > 0")
        object.__setattr__(self, "xi_grid", xi)
        object.__setattr__(self, "eps_hat_grid", eh)
        object.__setattr__(self, "_log_xi", np.log(xi))
        object.__setattr__(self, "_log_eps", np.log(eh))

    @property
    def has_drude(self) -> bool:
        return self.omega_p > 0

    def eps_hat(self, xi):
        """Interband contribution at imaginary frequency xi (scalar or array)."""
        logv = np.interp(np.log(np.maximum(xi, self.xi_grid[0] * 1e-300)),
                         self._log_xi, self._log_eps,
                         left=self._log_eps[0], right=0.0)
        out = np.exp(logv)
        return float(out) if np.isscalar(xi) else out


DielectricModel = Union[Perfect, Plasma, Drude, Tabulated]


@dataclass(frozen=True)
class TransverseMode:
    """Specular scattering channel: transverse wavenumber and polarization."""

    k: float                 # rad/m, magnitude of the transverse wavevector
    polarization: str        # "TE" or "TM"

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("transverse wavenumber must be >= 0")
        if self.polarization not in ("TE", "TM"):
            raise ValueError("polarization must be 'TE' or 'TM'")

    def kappa(self, xi: float) -> float:
        """Imaginary z-wavenumber kappa = sqrt(k^2 + xi^2/c^2) >= max(k, xi/c)."""
        return math.hypot(self.k, xi / C_LIGHT)


def permittivity(model: DielectricModel, xi):
    """Dielectric function eps(i*xi) of a mirror model.

    Parameters
    ----------
    model : DielectricModel
    xi : float
        Imaginary frequency, rad/s.  Must be > 0 for models with a Drude
        term (eps diverges like 1/xi at xi -> 0); >= 0 otherwise.

    Returns
    -------
    float
        eps >= 1; math.inf for the perfect mirror (and for plasma at xi = 0),
        a sentinel that `fresnel` handles analytically.
    """
    if xi < 0:
        raise ValueError("imaginary frequency must be >= 0")
    if isinstance(model, Perfect):
        return math.inf
    if isinstance(model, Plasma):
        if xi == 0.0:
            return math.inf
        return 1.0 + (model.omega_p / xi) ** 2
    if isinstance(model, Drude):
        if xi == 0.0:
            raise ValueError("Drude permittivity diverges like 1/xi at xi = 0; "
                             "use the analytic xi = 0 reflection branch instead")
        return 1.0 + model.omega_p**2 / (xi * (xi + model.gamma))
    if isinstance(model, Tabulated):
        if model.has_drude:
            if xi == 0.0:
                raise ValueError("tabulated model with Drude term diverges at xi = 0")
            return model.eps_hat(xi) + model.omega_p**2 / (xi * (xi + model.gamma))
        return model.eps_hat(xi)
    raise TypeError(f"unknown dielectric model {model!r}")


def static_fresnel(model: DielectricModel, k):
    """Analytic xi = 0 limit of the Fresnel amplitudes.

    This limit cannot be obtained by naive evaluation: the permittivity of
    metals diverges at xi -> 0 while kappa -> k.  The surviving amplitudes are

    * perfect:  (-1, +1)
    * plasma:   r_TE = (k - sqrt(k^2 + omega_p^2/c^2)) / (k + sqrt(...)), r_TM = +1
    * Drude:    (0, +1)  -- the TE channel dies with any finite sigma_0
    * tabulated + Drude term: (0, +1); pure interband: (0, (eps0-1)/(eps0+1))

    `k` may be a scalar or array.
    """
    k = np.asarray(k, dtype=float)
    one = np.ones_like(k)
    if isinstance(model, Perfect):
        r_te, r_tm = -one, one
    elif isinstance(model, Plasma):
        kp = model.omega_p / C_LIGHT
        root = np.hypot(k, kp)
        r_te, r_tm = (k - root) / (k + root), one
    elif isinstance(model, Drude):
        r_te, r_tm = 0.0 * one, one
    elif isinstance(model, Tabulated):
        if model.has_drude:
            r_te, r_tm = 0.0 * one, one
        else:
            eps0 = model.eps_hat(model.xi_grid[0])
            r_te, r_tm = 0.0 * one, (eps0 - 1.0) / (eps0 + 1.0) * one
    else:
        raise TypeError(f"unknown dielectric model {model!r}")
    if k.ndim == 0:
        return float(r_te), float(r_tm)
    return r_te, r_tm


def fresnel(model: DielectricModel, xi: float, k):
    """Specular reflection amplitudes (r_TE, r_TM) of a bulk mirror.

    Standard Lifshitz amplitudes at imaginary frequency,

        r_TE = (kappa - kappa_t) / (kappa + kappa_t),
        r_TM = (eps kappa - kappa_t) / (eps kappa + kappa_t),
        kappa_t = sqrt(k^2 + eps xi^2 / c^2),

    with the analytic limits for the perfect mirror and at xi = 0.  Both
    amplitudes are real with |r| <= 1 (passivity).  `k` may be an array.
    """
    if xi < 0:
        raise ValueError("imaginary frequency must be >= 0")
    if xi == 0.0:
        return static_fresnel(model, k)
    eps = permittivity(model, xi)
    if math.isinf(eps):
        k = np.asarray(k, dtype=float)
        one = np.ones_like(k)
        if k.ndim == 0:
            return -1.0, 1.0
        return -one, one
    k = np.asarray(k, dtype=float)
    K = xi / C_LIGHT
    kappa = np.hypot(k, K)
    kappa_t = np.sqrt(k * k + eps * K * K)
    r_te = (kappa - kappa_t) / (kappa + kappa_t)
    r_tm = (eps * kappa - kappa_t) / (eps * kappa + kappa_t)
    if k.ndim == 0:
        return float(r_te), float(r_tm)
    return r_te, r_tm


def load_tabulated(source, omega_p: float = 0.0, gamma: float = 0.0) -> Tabulated:
    """Parse tabulated optical data into a Tabulated model.

    Format: UTF-8 text, '#' starts a comment, data rows are two
    whitespace-separated columns ``xi_rad_per_s  epsilon_hat`` with strictly
    increasing first column and eps_hat >= 1.  `source` may be a str, bytes,
    or a file-like object.
    """
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    elif hasattr(source, "read"):
        raw = source.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    else:
        raise TypeError("source must be text, bytes or a readable stream")

    xis, epss = [], []
    for lineno, line in enumerate(io.StringIO(text), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.split()
        if len(parts) != 2:
            raise TabulatedParseError(
                f"expected 2 columns, got {len(parts)}", line=lineno)
        try:
            xi, eh = float(parts[0]), float(parts[1])
        except ValueError:
            raise TabulatedParseError(f"non-numeric entry {body!r}", line=lineno)
        if not (math.isfinite(xi) and math.isfinite(eh)):
            raise TabulatedParseError("non-finite entry", line=lineno)
        if xi <= 0:
            raise TabulatedParseError("xi must be > 0", line=lineno)
        if xis and xi <= xis[-1]:
            raise TabulatedParseError(
                f"xi grid not strictly increasing ({xi} after {xis[-1]})", line=lineno)
        if eh < 1.0:
            raise TabulatedParseError(f"epsilon_hat = {eh} < 1", line=lineno)
        xis.append(xi)
        epss.append(eh)
    if not xis:
        raise TabulatedParseError("no data rows found")
    return Tabulated(np.array(xis), np.array(epss), omega_p=omega_p, gamma=gamma)


def gold_plasma() -> Plasma:
    """Gold as a lossless plasma with lambda_p = 137 nm."""
    return Plasma(omega_p=2.0 * math.pi * C_LIGHT / GOLD_PLASMA_WAVELENGTH)


def gold_drude(gamma_ratio: float = 0.01) -> Drude:
    """Gold as a Drude metal; by default gamma = omega_p / 100."""
    omega_p = 2.0 * math.pi * C_LIGHT / GOLD_PLASMA_WAVELENGTH
    return Drude(omega_p=omega_p, gamma=gamma_ratio * omega_p)
