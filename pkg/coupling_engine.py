"""
DINALOC - Motor d'acoblaments
=============================

Freqüència òptica normalitzada, J0, amplituds efectives per direcció i
acoblaments efectius de guies rectes i corbades.

  C_eff = C0 · J0(2π ω A_m / L),   A_m = A cos θ,   ω = 2π n0 s / λ

Unitats: A en µm i L en cm; l'argument de J0 es forma sempre després de
passar A a cm.

J0 sense dependències de funcions especials:
  - |x| <= 8   sèrie de potències (suma compensada)
  - |x| >  8   forma de Hankel amb aproximacions racionals de P0/Q0
L'oracle integral (1/π)∫₀^π cos(x sin t) dt serveix de validació creuada.
"""

import math
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional

from scipy.integrate import quad

from errors import ConfigurationError, DomainError
from lattice_geometry import (
    CurvatureProfile,
    PhysicalParams,
    SPACING_RATIOS,
    UM_PER_CM,
)

logger = logging.getLogger(__name__)

J0_FIRST_ZERO = 2.404825557695773

# cos θ exacte per classe (v → 0 exacte, no 6e-17)
DIRECTION_COSINES: Dict[str, float] = {
    "h":   1.0,
    "h30": math.sqrt(3.0) / 2.0,
    "h60": 0.5,
    "v":   0.0,
}

_SERIES_LIMIT = 8.0


# ============================================================================
# BESSEL J0
# ============================================================================

# Coeficients racionals de P0 i Q0 (Cephes j0.c)
_PP = (
    7.96936729297347051624e-4, 8.28352392107440799803e-2, 1.23953371646414299388e0,
    5.44725003058768775090e0,  8.74716500199817011941e0,  5.30324038235394892183e0,
    9.99999999999999997821e-1,
)
_PQ = (
    9.24408810558863637013e-4, 8.56288474354474431428e-2, 1.25352743901058953537e0,
    5.47097740330417105182e0,  8.76190883237069594232e0,  5.30605288235394617618e0,
    1.00000000000000000218e0,
)
_QP = (
    -1.13663838898469149931e-2, -1.28252718670509318512e0, -1.95539544257735972385e1,
    -9.32060152123768231369e1,  -1.77681167980488050595e2, -1.47077505154951170175e2,
    -5.14105326766599330220e1,  -6.05014350600728481186e0,
)
# Polinomi mònic: el coeficient principal 1 és implícit
_QQ = (
    6.43178256118178023184e1, 8.56430025976980587198e2, 3.88240183605401609683e3,
    7.24046774195652478189e3, 5.93072701187316984827e3, 2.06209331660327847417e3,
    2.42005740240291393179e2,
)
_SQ2OPI = 7.9788456080286535587989e-1
_PIO4 = 7.85398163397448309616e-1


def _polevl(x: float, coefs) -> float:
    acc = 0.0
    for c in coefs:
        acc = acc * x + c
    return acc


def _p1evl(x: float, coefs) -> float:
    acc = 1.0
    for c in coefs:
        acc = acc * x + c
    return acc


def _j0_series(x: float) -> float:
    """Σ (−x²/4)^k / (k!)²; per |x| <= 8 el terme més gran és ~114."""
    q = -0.25 * x * x
    term = 1.0
    terms = [term]
    k = 0
    while True:
        k += 1
        term *= q / (k * k)
        terms.append(term)
        if abs(term) < 1e-18:
            break
    return math.fsum(terms)


def _j0_hankel(x: float) -> float:
    w = 5.0 / x
    q = 25.0 / (x * x)
    p = _polevl(q, _PP) / _polevl(q, _PQ)
    q = _polevl(q, _QP) / _p1evl(q, _QQ)
    xn = x - _PIO4
    p = p * math.cos(xn) - w * q * math.sin(xn)
    return p * _SQ2OPI / math.sqrt(x)


def bessel_j0(x: float) -> float:
    """
    J0(x) amb error absolut <= 1e-10 a |x| <= 50.

    Args:
        x: argument real finit

    Returns:
        J0(x)
    """
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"J0 necessita un argument finit (rebut {x})")
    x = abs(x)
    if x <= _SERIES_LIMIT:
        return _j0_series(x)
    return _j0_hankel(x)


def bessel_j0_integral(x: float) -> float:
    """Oracle: (1/π) ∫₀^π cos(x sin t) dt per quadratura adaptativa."""
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"J0 necessita un argument finit (rebut {x})")
    value, _ = quad(lambda t: math.cos(x * math.sin(t)), 0.0, math.pi,
                    epsabs=1e-14, epsrel=1e-13, limit=400)
    return value / math.pi


# ============================================================================
# FREQÜÈNCIA I AMPLITUDS
# ============================================================================

def normalized_frequency(params: PhysicalParams, spacing_um: Optional[float] = None) -> float:
    """ω = 2π n0 s / λ. Sense `spacing_um` es fa servir d."""
    s = params.d_um if spacing_um is None else spacing_um
    if not (s > 0):
        raise DomainError(f"L'espaiat ha de ser > 0 (rebut {s})")
    if not (params.wavelength_um > 0):
        raise DomainError(f"λ ha de ser > 0 (rebut {params.wavelength_um})")
    return 2.0 * math.pi * params.n0 * s / params.wavelength_um


def effective_amplitude(amplitude_um: float, direction_class: str) -> float:
    """A_m = A cos θ de la classe de direcció."""
    if amplitude_um < 0:
        raise DomainError(f"L'amplitud ha de ser >= 0 (rebut {amplitude_um})")
    try:
        return amplitude_um * DIRECTION_COSINES[direction_class]
    except KeyError:
        raise DomainError(f"Classe de direcció desconeguda: {direction_class}")


def localizing_amplitude(omega: float, period_cm: float) -> float:
    """Amplitud (µm) que anul·la C_eff: primer zero de J0."""
    if not (omega > 0) or not (period_cm > 0):
        raise DomainError("ω i L han de ser > 0")
    return J0_FIRST_ZERO * period_cm / (2.0 * math.pi * omega) * UM_PER_CM


def bessel_argument(omega: float, amplitude_um: float, period_cm: float) -> float:
    """2π ω A / L amb A convertit a cm."""
    return 2.0 * math.pi * omega * (amplitude_um / UM_PER_CM) / period_cm


# ============================================================================
# MODEL D'ACOBLAMENT
# ============================================================================

@dataclass(frozen=True)
class ExponentialLaw:
    """C(s) = c_ref · exp(−decay · (s − s_ref)), s en µm."""
    c_ref:        float
    s_ref_um:     float
    decay_per_um: float

    def __post_init__(self):
        if not (self.c_ref > 0):
            raise ConfigurationError(f"exp_law.c_ref ha de ser > 0 (rebut {self.c_ref})")
        if not (self.s_ref_um > 0):
            raise ConfigurationError(f"exp_law.s_ref ha de ser > 0 (rebut {self.s_ref_um})")
        if not (self.decay_per_um > 0):
            raise ConfigurationError("exp_law.decay ha de ser > 0 (llei decreixent)")

    def at(self, spacing_um: float) -> float:
        return self.c_ref * math.exp(-self.decay_per_um * (spacing_um - self.s_ref_um))


@dataclass(frozen=True)
class CouplingModel:
    """
    Acoblament nu C0 per classe d'espaiat: taula explícita o llei exponencial.
    Si hi ha totes dues, la taula té prioritat.
    """
    table:   Dict[str, float] = field(default_factory=dict)
    exp_law: Optional[ExponentialLaw] = None

    def __post_init__(self):
        for name, c0 in self.table.items():
            if name not in SPACING_RATIOS:
                raise ConfigurationError(f"couplings.{name}: classe d'espaiat desconeguda")
            if not (c0 > 0):
                raise ConfigurationError(f"couplings.{name}: C0 ha de ser > 0 (rebut {c0})")
        if not self.table and self.exp_law is None:
            raise ConfigurationError("El model d'acoblament necessita 'couplings' o 'exp_law'")

    @classmethod
    def fallback(cls) -> "CouplingModel":
        """Llei calibrada a 0.15 cm⁻¹ a 13 µm."""
        return cls(exp_law=ExponentialLaw(c_ref=0.15, s_ref_um=13.0, decay_per_um=0.2))

    def covers(self, spacing_class: str) -> bool:
        return spacing_class in self.table or self.exp_law is not None

    def require(self, spacing_classes: Iterable[str]) -> None:
        missing = sorted({s for s in spacing_classes if not self.covers(s)})
        if missing:
            raise ConfigurationError(f"El model d'acoblament no cobreix: {', '.join(missing)}")

    def bare_coupling(self, spacing_class: str, spacing_um: float) -> float:
        if spacing_class in self.table:
            return self.table[spacing_class]
        if self.exp_law is not None:
            return self.exp_law.at(spacing_um)
        raise ConfigurationError(f"El model d'acoblament no cobreix l'espaiat {spacing_class}")


# ============================================================================
# ACOBLAMENT EFECTIU
# ============================================================================

@dataclass(frozen=True)
class EffectiveCoupling:
    value:             float
    modulation_factor: float
    direction_class:   Optional[str] = None
    spacing_class:     Optional[str] = None


def effective_coupling_sinusoidal(
    c0: float,
    omega: float,
    amplitude_um: float,
    period_cm: float,
    direction_class: Optional[str] = None,
    spacing_class: Optional[str] = None,
) -> EffectiveCoupling:
    """
    C_eff = C0 · J0(2π ω A / L).

    `amplitude_um` ja ha d'estar projectada (A_m); `direction_class` i
    `spacing_class` només etiqueten el resultat.
    """
    if not (c0 > 0):
        raise DomainError(f"C0 ha de ser > 0 (rebut {c0})")
    if not (period_cm > 0):
        raise DomainError(f"L ha de ser > 0 (rebut {period_cm})")
    if amplitude_um < 0:
        raise DomainError(f"A ha de ser >= 0 (rebut {amplitude_um})")
    factor = bessel_j0(bessel_argument(omega, amplitude_um, period_cm))
    return EffectiveCoupling(value=c0 * factor, modulation_factor=factor,
                             direction_class=direction_class, spacing_class=spacing_class)


def effective_coupling_general(
    c0: float,
    profile: CurvatureProfile,
    omega: float,
    direction_class: Optional[str] = None,
    spacing_class: Optional[str] = None,
) -> EffectiveCoupling:
    """
    C_eff = (C0/L) ∫₀ᴸ cos[ω cosθ ẋ_d(z)] dz.

    Sinusoïdal: quadratura adaptativa (epsrel 1e-10). Mostrejat: ẋ_d és
    constant a cada interval, la integral és la suma exacta per intervals.
    Sense `direction_class` no es projecta (θ = 0).
    """
    if not (c0 > 0):
        raise DomainError(f"C0 ha de ser > 0 (rebut {c0})")
    cos_theta = 1.0 if direction_class is None else effective_amplitude(1.0, direction_class)

    if profile.is_straight or cos_theta == 0.0:
        return EffectiveCoupling(value=c0, modulation_factor=1.0,
                                 direction_class=direction_class, spacing_class=spacing_class)

    L = profile.period_cm
    drive = omega * cos_theta
    if profile.kind == "sinusoidal":
        integral, _ = quad(lambda z: math.cos(drive * profile.slope(z)), 0.0, L,
                           epsabs=0.0, epsrel=1e-10, limit=400)
        factor = integral / L
    else:
        slopes = profile.interval_slopes
        factor = math.fsum(math.cos(drive * s) for s in slopes) / len(slopes)

    return EffectiveCoupling(value=c0 * factor, modulation_factor=factor,
                             direction_class=direction_class, spacing_class=spacing_class)


def bond_effective_coupling(
    model: CouplingModel,
    params: PhysicalParams,
    profile: CurvatureProfile,
    spacing_class: str,
    direction_class: str,
) -> EffectiveCoupling:
    """C_eff d'una classe d'enllaç: ω del seu propi espaiat i A_m de la seva direcció."""
    spacing_um = SPACING_RATIOS[spacing_class] * params.d_um
    c0 = model.bare_coupling(spacing_class, spacing_um)
    omega = normalized_frequency(params, spacing_um)

    if profile.kind == "sinusoidal":
        a_m = effective_amplitude(profile.amplitude_um, direction_class)
        return effective_coupling_sinusoidal(c0, omega, a_m, profile.period_cm,
                                             direction_class=direction_class,
                                             spacing_class=spacing_class)
    return effective_coupling_general(c0, profile, omega,
                                      direction_class=direction_class,
                                      spacing_class=spacing_class)


# ============================================================================
# INFORME
# ============================================================================

@dataclass
class CouplingReport:
    c0:               float
    omega:            float
    amplitude_um:     float
    period_cm:        float
    bessel_argument:  float
    predicted:        float
    localizing_um:    float
    measured:         Optional[float] = None
    measured_ratio:   Optional[float] = None


def coupling_report(
    c0: float,
    omega: float,
    amplitude_um: float,
    period_cm: float,
    measured: Optional[float] = None,
) -> CouplingReport:
    """Predicció de C_eff al costat d'un valor mesurat, si n'hi ha. No es reconcilien."""
    eff = effective_coupling_sinusoidal(c0, omega, amplitude_um, period_cm)
    ratio = None
    if measured is not None and eff.value != 0.0:
        ratio = measured / eff.value
    report = CouplingReport(
        c0=c0,
        omega=omega,
        amplitude_um=amplitude_um,
        period_cm=period_cm,
        bessel_argument=bessel_argument(omega, amplitude_um, period_cm),
        predicted=eff.value,
        localizing_um=localizing_amplitude(omega, period_cm),
        measured=measured,
        measured_ratio=ratio,
    )
    logger.info(
        f"[COUPLING] C_eff predit={report.predicted:.6g} cm⁻¹"
        + (f", mesurat={measured:.6g} cm⁻¹ (ràtio {ratio:.3g})" if ratio is not None else "")
    )
    return report
