"""Casimir interactions from the scattering approach.

Subpackages by physical role:

* ``dielectric``  -- mirror optical response and Fresnel amplitudes
* ``matsubara``   -- Matsubara sums (T > 0) and xi-integrals (T = 0)
* ``plates``      -- specular plane-plane observables and the 1d cavity
* ``planesphere`` -- plane-sphere multipole log-det, PFA reduction factors
* ``corrugation`` -- perturbative lateral force between corrugated plates
* ``cli``         -- batch sweep front end (``casimir`` command)
"""

from .dielectric import (
    CODATA2018,
    Drude,
    Perfect,
    Plasma,
    Tabulated,
    TransverseMode,
    fresnel,
    gold_drude,
    gold_plasma,
    load_tabulated,
    permittivity,
)
from .matsubara import (
    ConvergenceError,
    MatsubaraGrid,
    QuadratureSpec,
    matsubara_frequency,
    thermal_sum,
    zero_t_integral,
)
from .plates import (
    PlateGeometry,
    PlanePlaneResult,
    casimir_pressure,
    free_energy_1d,
    ideal_casimir,
    lifshitz_free_energy,
    plane_plane,
)

__all__ = [
    "CODATA2018", "Perfect", "Plasma", "Drude", "Tabulated", "TransverseMode",
    "permittivity", "fresnel", "load_tabulated", "gold_plasma", "gold_drude",
    "MatsubaraGrid", "QuadratureSpec", "ConvergenceError",
    "matsubara_frequency", "thermal_sum", "zero_t_integral",
    "PlateGeometry", "PlanePlaneResult", "ideal_casimir",
    "lifshitz_free_energy", "casimir_pressure", "plane_plane",
    "free_energy_1d",
]

__version__ = "0.1.0"
