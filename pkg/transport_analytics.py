"""
DINALOC - Anàlisi de transport
==============================

Variància de distribucions de probabilitat i les seves prediccions:

  σ(z)² = Σ (Δl_i)² P_i(z) / Σ P_i(z)          Δl en unitats de d
  σ²    = 2C²z² J0²(2πωA/L)                      límit de localització 1D
  σ²    = 2C² (u² + v²)                          integrals u/v, qualsevol z
  σ²    = z² Σ_j |H_ij|² Δl_j²                   taxa balística exacta

Eixos: '1D' (índex de cadena), 'horizontal' (Δx/d), 'vertical' (Δy/d).
"""

import math
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad

from coupling_engine import (
    CouplingModel,
    DIRECTION_COSINES,
    bessel_argument,
    bessel_j0,
    normalized_frequency,
)
from errors import DomainError
from evolution_service import HamiltonianMatrix, ProbabilityField
from lattice_geometry import (
    CurvatureProfile,
    Lattice,
    PhysicalParams,
    SPACING_RATIOS,
    center_site,
)

logger = logging.getLogger(__name__)

AXES = ("1D", "horizontal", "vertical")
CURVE_COLUMNS = ["z", "sigma2", "error", "axis"]
BALLISTIC_R2_THRESHOLD = 0.99

_QUAD_OPTS = dict(epsabs=0.0, epsrel=1e-11, limit=400)


# ============================================================================
# TIPUS
# ============================================================================

@dataclass(frozen=True)
class VariancePoint:
    z:      float
    sigma2: float
    error:  Optional[float] = None


@dataclass
class VarianceCurve:
    points: List[VariancePoint] = field(default_factory=list)
    axis:   str = "1D"

    def __post_init__(self):
        if self.axis not in AXES:
            raise DomainError(f"Eix desconegut: {self.axis}")
        for k, pt in enumerate(self.points):
            if pt.sigma2 < 0:
                raise DomainError(f"σ² negatiu al punt {k}: {pt.sigma2}")
            if k and not (pt.z > self.points[k - 1].z):
                raise DomainError("Els z d'una corba han de ser estrictament creixents")

    def z(self) -> np.ndarray:
        return np.array([p.z for p in self.points], dtype=float)

    def sigma2(self) -> np.ndarray:
        return np.array([p.sigma2 for p in self.points], dtype=float)

    def to_rows(self) -> List[dict]:
        return [{"z": p.z, "sigma2": p.sigma2, "error": p.error, "axis": self.axis}
                for p in self.points]


@dataclass(frozen=True)
class BallisticFit:
    slope:     float   # de σ respecte z, cm⁻¹
    r_squared: float


@dataclass(frozen=True)
class UVIntegrals:
    u:      float
    v:      float
    sigma2: float


# ============================================================================
# VARIÀNCIA
# ============================================================================

def _offsets(lattice: Lattice, axis: str, injection_site: Optional[int]) -> np.ndarray:
    if axis not in AXES:
        raise DomainError(f"Eix desconegut: {axis}")
    if lattice.dimension == "1D" and axis != "1D":
        raise DomainError(f"L'eix {axis} no existeix en una xarxa 1D")
    if lattice.dimension == "2D" and axis == "1D":
        raise DomainError("Una xarxa 2D necessita l'eix horizontal o vertical")

    site = center_site(lattice) if injection_site is None else injection_site
    pos = lattice.positions()
    origin = pos[lattice.index_of(site)]
    column = 1 if axis == "vertical" else 0
    return (pos[:, column] - origin[column]) / lattice.d_um


def variance(
    p: ProbabilityField,
    lattice: Lattice,
    axis: str = "1D",
    injection_site: Optional[int] = None,
) -> float:
    """σ² respecte del lloc d'injecció (per defecte el central)."""
    probs = np.asarray(p.p, dtype=float)
    if probs.shape != (lattice.n_sites,):
        raise DomainError(f"Distribució de {probs.size} llocs per a una xarxa de {lattice.n_sites}")
    total = probs.sum()
    if not (total > 0):
        raise DomainError("Distribució buida")
    dl = _offsets(lattice, axis, injection_site)
    return float(np.dot(dl * dl, probs) / total)


def ballistic_rate(
    H: HamiltonianMatrix,
    lattice: Lattice,
    axis: str = "1D",
    injection_site: Optional[int] = None,
) -> float:
    """Σ_j |H_ij|² Δl_j²: coeficient de z² de la variància (2C² a la cadena)."""
    site = center_site(lattice) if injection_site is None else injection_site
    i = lattice.index_of(site)
    dl = _offsets(lattice, axis, site)
    row = np.abs(H.entries[i]) ** 2
    row[i] = 0.0
    return float(np.dot(row, dl * dl))


def variance_analytic_1d(
    coupling: float,
    z: float,
    omega: float,
    amplitude_um: float,
    period_cm: float,
) -> float:
    """σ² = 2C²z² J0²(2πωA/L)."""
    if not (coupling > 0) or not (period_cm > 0):
        raise DomainError("C i L han de ser > 0")
    if z < 0:
        raise DomainError(f"z ha de ser >= 0 (rebut {z})")
    j0 = bessel_j0(bessel_argument(omega, amplitude_um, period_cm))
    return 2.0 * coupling ** 2 * z ** 2 * j0 ** 2


# ============================================================================
# INTEGRALS u / v
# ============================================================================

def _sinusoidal_uv(k_arg: float, period_cm: float, z: float) -> Tuple[float, float]:
    """∫₀ᶻ cos(Kη), ∫₀ᶻ sin(Kη) amb η = 1 − cos(2πz/L); períodes sencers un sol cop."""
    two_pi_l = 2.0 * math.pi / period_cm

    def cos_part(t):
        return math.cos(k_arg * (1.0 - math.cos(two_pi_l * t)))

    def sin_part(t):
        return math.sin(k_arg * (1.0 - math.cos(two_pi_l * t)))

    periods = math.floor(z / period_cm)
    rest = z - periods * period_cm
    u = v = 0.0
    if periods:
        u += periods * quad(cos_part, 0.0, period_cm, **_QUAD_OPTS)[0]
        v += periods * quad(sin_part, 0.0, period_cm, **_QUAD_OPTS)[0]
    if rest > 0:
        u += quad(cos_part, 0.0, rest, **_QUAD_OPTS)[0]
        v += quad(sin_part, 0.0, rest, **_QUAD_OPTS)[0]
    return u, v


def _sampled_uv(profile: CurvatureProfile, omega: float, z: float) -> Tuple[float, float]:
    """Fase constant a cada interval: suma exacta per intervals."""
    slopes = profile.interval_slopes
    step = profile.period_cm / len(slopes)
    phase = omega * (slopes - slopes[0])   # ω(ẋ_d − ẋ_d(0)) = −Kη
    cos_p, sin_p = np.cos(phase), -np.sin(phase)

    periods = math.floor(z / profile.period_cm)
    rest = z - periods * profile.period_cm
    u = periods * step * math.fsum(cos_p)
    v = periods * step * math.fsum(sin_p)

    full = int(rest // step)
    u += step * math.fsum(cos_p[:full])
    v += step * math.fsum(sin_p[:full])
    tail = rest - full * step
    if tail > 0 and full < len(slopes):
        u += tail * cos_p[full]
        v += tail * sin_p[full]
    return u, v


def uv_integrals(
    profile: CurvatureProfile,
    omega: float,
    z: float,
    coupling: float = 1.0,
    direction_class: Optional[str] = None,
) -> UVIntegrals:
    """
    u(z) = ∫₀ᶻ cos[(2πωA/L)η], v(z) = ∫₀ᶻ sin[(2πωA/L)η], σ² = 2C²(u² + v²).

    A i L surten del perfil; `direction_class` projecta A sobre la direcció.
    """
    if z < 0:
        raise DomainError(f"z ha de ser >= 0 (rebut {z})")
    cos_theta = 1.0 if direction_class is None else DIRECTION_COSINES[direction_class]

    if profile.is_straight or cos_theta == 0.0:
        u, v = z, 0.0
    elif profile.kind == "sinusoidal":
        k_arg = bessel_argument(omega, profile.amplitude_um * cos_theta, profile.period_cm)
        u, v = _sinusoidal_uv(k_arg, profile.period_cm, z)
    else:
        u, v = _sampled_uv(profile, omega * cos_theta, z)

    return UVIntegrals(u=u, v=v, sigma2=2.0 * coupling ** 2 * (u * u + v * v))


# ============================================================================
# CAMINS DE LA XARXA TRIANGULAR
# ============================================================================

def path_coupling_factor(
    path: str,
    params: PhysicalParams,
    model: CouplingModel,
    amplitude_um: float,
    period_cm: float,
    z: float,
    segment_lengths: Optional[Sequence[float]] = None,
) -> float:
    """
    Cu(z) d'un camí d'evolució horitzontal a la xarxa triangular.

      I    C_{√3d} ∫₀ᶻ cos[(2π ω_√3d A/L) η]
      II   C_d     ∫₀ᶻ cos[(2π ω_d A cos30°/L) η]
      III  (C_{d,v} + C_{d,h30})/2 · (Δz1 + Δz4) · ∫₀^{Δz2+Δz3} cos[(2π ω_d A cos30°/L) η]

    Al camí III el factor vertical (A cos90° = 0) val exactament 1 i z no intervé.
    """
    profile = CurvatureProfile.sinusoidal(amplitude_um, period_cm)
    d_um = params.d_um
    omega_d = normalized_frequency(params, d_um)
    c_d = model.bare_coupling("d", d_um)

    if path == "I":
        spacing = SPACING_RATIOS["sqrt3d"] * d_um
        c0 = model.bare_coupling("sqrt3d", spacing)
        return c0 * uv_integrals(profile, normalized_frequency(params, spacing), z,
                                 direction_class="h").u
    if path == "II":
        return c_d * uv_integrals(profile, omega_d, z, direction_class="h30").u
    if path == "III":
        if segment_lengths is None or len(segment_lengths) != 4:
            raise DomainError("El camí III necessita quatre longituds de segment Δz1..Δz4")
        if any(s < 0 for s in segment_lengths):
            raise DomainError("Les longituds de segment han de ser >= 0")
        dz1, dz2, dz3, dz4 = segment_lengths
        diagonal = uv_integrals(profile, omega_d, dz2 + dz3, direction_class="h30").u
        # C_{d,v} i C_{d,h30} comparteixen espaiat: mateix acoblament nu
        return (c_d + c_d) / 2.0 * (dz1 + dz4) * diagonal
    raise DomainError(f"Camí desconegut: {path}")


# ============================================================================
# AJUST BALÍSTIC
# ============================================================================

def ballistic_fit(curve: VarianceCurve) -> BallisticFit:
    """Mínims quadrats de σ = slope·z (per l'origen)."""
    if len(curve.points) < 3:
        raise DomainError(f"L'ajust necessita >= 3 punts (rebuts {len(curve.points)})")
    z = curve.z()
    sigma = np.sqrt(curve.sigma2())

    slope = float(np.dot(z, sigma) / np.dot(z, z))
    ss_res = float(np.sum((sigma - slope * z) ** 2))
    ss_tot = float(np.sum((sigma - sigma.mean()) ** 2))
    r2 = 0.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return BallisticFit(slope=slope, r_squared=min(1.0, max(0.0, r2)))


def is_ballistic(fit: BallisticFit, threshold: float = BALLISTIC_R2_THRESHOLD) -> bool:
    return fit.r_squared >= threshold
