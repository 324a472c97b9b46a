"""
DINALOC - Configuració d'execució
=================================

Un únic document JSON per execució, validat amb pydantic v2. Les claus
desconegudes es rebutgen. Els errors de validació arriben a l'usuari com a
ConfigurationError amb el camí del camp (`scan.z_cm: ...`).

Seccions:
  physical      n0, lambda_um, d_um
  lattice       chain | triangular
  profile       straight | sinusoidal | triangular | sampled
  coupling      couplings {d, sqrt3d, 2d} o exp_law; absent → llei per defecte
  scan          z_cm [..] o {start, stop, count}
  integrator    oracle RK4 opcional
  localization  graella d'amplituds (localization-scan)
  segments      matriu composta (memory)
  gstats        comptatges CSV o flux sintètic
  ingest        fotogrames, màscara, xarxa

Els camins relatius es resolen des del directori del fitxer de configuració.
"""

import json
import logging
from pathlib import Path
from typing import Dict, List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, ValidationError, field_validator, model_validator

from coupling_engine import CouplingModel, ExponentialLaw, localizing_amplitude, normalized_frequency
from errors import ConfigurationError, DomainError
from lattice_geometry import (
    CurvatureProfile,
    Lattice,
    PhysicalParams,
    build_lattice_1d,
    build_lattice_triangular,
    center_site,
    triangular_profile,
)

logger = logging.getLogger(__name__)


class _Spec(BaseModel):
    model_config = ConfigDict(extra="forbid")


# ============================================================================
# FÍSICA, XARXA, PERFIL, ACOBLAMENT
# ============================================================================

class PhysicalSpec(_Spec):
    n0:        float = Field(1.503, ge=1.0)
    lambda_um: float = Field(0.78, gt=0)
    d_um:      float = Field(15.0, gt=0)

    def build(self) -> PhysicalParams:
        return PhysicalParams(n0=self.n0, wavelength_um=self.lambda_um, d_um=self.d_um)


class LatticeSpec(_Spec):
    kind:           Literal["chain", "triangular"]
    n_sites:        Optional[int] = Field(None, ge=2)
    radius_shells:  Optional[int] = Field(None, ge=1)
    injection_site: Optional[int] = None

    @model_validator(mode="after")
    def _size_present(self):
        if self.kind == "chain" and self.n_sites is None:
            raise ValueError("una cadena necessita n_sites")
        if self.kind == "triangular" and self.radius_shells is None:
            raise ValueError("una xarxa triangular necessita radius_shells")
        return self

    def build(self, params: PhysicalParams) -> Lattice:
        if self.kind == "chain":
            return build_lattice_1d(self.n_sites, params.d_um)
        return build_lattice_triangular(self.radius_shells, params.d_um)

    def injection(self, lattice: Lattice) -> int:
        if self.injection_site is None:
            return center_site(lattice)
        lattice.index_of(self.injection_site)
        return self.injection_site


class ProfileSpec(_Spec):
    kind:         Literal["straight", "sinusoidal", "triangular", "sampled"] = "straight"
    amplitude_um: Union[float, Literal["localizing"]] = 0.0
    period_cm:    Optional[float] = Field(None, gt=0)
    samples_um:   Optional[List[float]] = None
    n_samples:    int = Field(400, ge=4)

    @model_validator(mode="after")
    def _consistent(self):
        if self.kind != "straight" and self.period_cm is None:
            raise ValueError(f"el perfil {self.kind} necessita period_cm")
        if self.kind == "sampled" and not self.samples_um:
            raise ValueError("un perfil mostrejat necessita samples_um")
        if isinstance(self.amplitude_um, float) and self.amplitude_um < 0:
            raise ValueError("amplitude_um ha de ser >= 0")
        return self

    def resolve_amplitude(self, params: PhysicalParams) -> float:
        if self.amplitude_um == "localizing":
            if self.period_cm is None:
                raise ConfigurationError("profile.amplitude_um: 'localizing' necessita period_cm")
            return localizing_amplitude(normalized_frequency(params), self.period_cm)
        return float(self.amplitude_um)

    def build(self, params: PhysicalParams) -> CurvatureProfile:
        if self.kind == "straight":
            return CurvatureProfile.straight()
        if self.kind == "sampled":
            return CurvatureProfile.sampled(self.samples_um, self.period_cm)
        amplitude = self.resolve_amplitude(params)
        if self.kind == "triangular":
            return triangular_profile(amplitude, self.period_cm, self.n_samples)
        return CurvatureProfile.sinusoidal(amplitude, self.period_cm)


class ExpLawSpec(_Spec):
    c_ref: float = Field(gt=0)
    s_ref: float = Field(gt=0)
    decay: float = Field(gt=0)


class CouplingSpec(_Spec):
    couplings: Optional[Dict[Literal["d", "sqrt3d", "2d"], float]] = None
    exp_law:   Optional[ExpLawSpec] = None

    @field_validator("couplings")
    @classmethod
    def _positive(cls, v):
        if v is not None:
            for name, c0 in v.items():
                if not (c0 > 0):
                    raise ValueError(f"C0 de {name} ha de ser > 0")
        return v

    def build(self) -> CouplingModel:
        if not self.couplings and self.exp_law is None:
            return CouplingModel.fallback()
        law = None
        if self.exp_law is not None:
            law = ExponentialLaw(c_ref=self.exp_law.c_ref, s_ref_um=self.exp_law.s_ref,
                                 decay_per_um=self.exp_law.decay)
        return CouplingModel(table=dict(self.couplings or {}), exp_law=law)


# ============================================================================
# ESCOMBRATS
# ============================================================================

class RangeSpec(_Spec):
    start: float = Field(gt=0)
    stop:  float = Field(gt=0)
    count: int = Field(ge=1)


class ScanSpec(_Spec):
    z_cm:  Optional[List[float]] = None
    range: Optional[RangeSpec] = None

    @model_validator(mode="after")
    def _valid_grid(self):
        if (self.z_cm is None) == (self.range is None):
            raise ValueError("cal exactament un de z_cm o range")
        grid = self.values()
        if not grid:
            raise ValueError("la llista de z és buida")
        if any(z <= 0 for z in grid):
            raise ValueError("tots els z han de ser > 0")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("els z han d'estar ordenats de forma estrictament creixent")
        return self

    def values(self) -> List[float]:
        if self.z_cm is not None:
            return [float(z) for z in self.z_cm]
        return [float(z) for z in np.linspace(self.range.start, self.range.stop, self.range.count)]


class IntegratorSpec(_Spec):
    enabled: bool = False
    dz_cm:   Optional[float] = Field(None, gt=0)
    frame:   Literal["comoving", "lab"] = "comoving"


class LocalizationSpec(_Spec):
    amplitudes_um:  List[float] = Field(min_length=1)
    z_cm:           float = Field(gt=0)
    measured_c_eff: Optional[float] = Field(None, gt=0)

    @field_validator("amplitudes_um")
    @classmethod
    def _non_negative(cls, v):
        if any(a < 0 for a in v):
            raise ValueError("les amplituds han de ser >= 0")
        return v


class SegmentSpec(_Spec):
    profile:   ProfileSpec
    length_cm: float = Field(gt=0)
    name:      Optional[str] = None


# ============================================================================
# ESTADÍSTICA I INGESTA
# ============================================================================

class SyntheticCountsSpec(_Spec):
    rate_x:     float = Field(ge=0)
    rate_y:     float = Field(ge=0)
    tau:        float = Field(gt=0)
    total_time: float = Field(gt=0)
    pair_rate:  float = Field(0.0, ge=0)
    trials:     int = Field(1, ge=1)


class GStatsSpec(_Spec):
    counts_csv:     Optional[str] = None
    synthetic:      Optional[SyntheticCountsSpec] = None
    quoted_n_sigma: Optional[float] = None

    @model_validator(mode="after")
    def _one_source(self):
        if (self.counts_csv is None) == (self.synthetic is None):
            raise ValueError("cal exactament un de counts_csv o synthetic")
        return self


class StrategySpec(_Spec):
    kind:    str
    patch_w: int = Field(ge=1)
    patch_h: int = Field(ge=1)


class IngestSpec(_Spec):
    frames:       List[str] = Field(min_length=1)
    mask:         str
    lattice_json: Optional[str] = None
    axes:         Optional[List[Literal["1D", "horizontal", "vertical"]]] = None
    strategies:   Optional[List[StrategySpec]] = None


# ============================================================================
# DOCUMENT COMPLET
# ============================================================================

class RunConfig(_Spec):
    name:         str = "run"
    physical:     PhysicalSpec = Field(default_factory=PhysicalSpec)
    lattice:      Optional[LatticeSpec] = None
    profile:      ProfileSpec = Field(default_factory=ProfileSpec)
    coupling:     CouplingSpec = Field(default_factory=CouplingSpec)
    scan:         Optional[ScanSpec] = None
    integrator:   IntegratorSpec = Field(default_factory=IntegratorSpec)
    localization: Optional[LocalizationSpec] = None
    segments:     Optional[List[SegmentSpec]] = None
    reference_length_cm: Optional[float] = Field(None, gt=0)
    gstats:       Optional[GStatsSpec] = None
    ingest:       Optional[IngestSpec] = None

    _base_dir: Path = PrivateAttr(default_factory=Path.cwd)

    def resolve(self, relative: str) -> Path:
        path = Path(relative)
        return path if path.is_absolute() else self._base_dir / path

    def require(self, *sections: str) -> None:
        missing = [s for s in sections if getattr(self, s) is None]
        if missing:
            raise ConfigurationError(f"{', '.join(missing)}: secció obligatòria per a aquesta comanda")


def format_validation_error(err: ValidationError) -> str:
    parts = []
    for e in err.errors():
        loc = ".".join(str(p) for p in e["loc"]) or "<arrel>"
        parts.append(f"{loc}: {e['msg']}")
    return "; ".join(parts)


def parse_run_config(data: Dict, base_dir: Optional[Path] = None) -> RunConfig:
    try:
        cfg = RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigurationError(format_validation_error(e))
    if base_dir is not None:
        cfg._base_dir = Path(base_dir)
    return cfg


def load_run_config(path: Union[str, Path]) -> RunConfig:
    """Llegeix i valida un fitxer de configuració."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"{path.name}: JSON invàlid a la línia {e.lineno}: {e.msg}")
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path.name}: el document ha de ser un objecte JSON")
    cfg = parse_run_config(data, base_dir=path.parent)
    logger.info(f"[CONFIG] {path} carregada ('{cfg.name}')")
    return cfg


def build_domain(cfg: RunConfig):
    """(params, lattice, profile, model) de la configuració; errors de domini → configuració."""
    cfg.require("lattice")
    try:
        params = cfg.physical.build()
        lattice = cfg.lattice.build(params)
        profile = cfg.profile.build(params)
        model = cfg.coupling.build()
    except DomainError as e:
        raise ConfigurationError(str(e))
    return params, lattice, profile, model
