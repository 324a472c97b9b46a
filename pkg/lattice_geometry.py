"""
DINALOC - Geometria de la xarxa
===============================

Seccions transversals de les xarxes de guies d'ona i perfils de curvatura.

  PhysicalParams    n0, λ (µm), d (µm)
  CurvatureProfile  x_d(z): recte | sinusoidal | mostrejat
  Lattice           llocs (µm) + enllaços classificats per
                    espaiat {d, √3d, 2d} i direcció {h, h30, h60, v}

Unitats: secció transversal en µm, propagació en cm.
Tot és immutable després de construir-se.
"""

import math
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError
from scipy.spatial import cKDTree

from errors import DomainError, InvalidLatticeError, ParseError

logger = logging.getLogger(__name__)

UM_PER_CM = 1.0e4

SPACING_RATIOS: Dict[str, float] = {
    "d":      1.0,
    "sqrt3d": math.sqrt(3.0),
    "2d":     2.0,
}

# Angle respecte l'horitzontal; ±θ i θ+180° comparteixen classe
DIRECTION_ANGLES: Dict[str, float] = {
    "h":   0.0,
    "h30": 30.0,
    "h60": 60.0,
    "v":   90.0,
}

PROFILE_KINDS = ("straight", "sinusoidal", "sampled")

_REL_TOL = 1e-9
_ANGLE_TOL_DEG = 1e-9


# ============================================================================
# PARÀMETRES FÍSICS
# ============================================================================

@dataclass(frozen=True)
class PhysicalParams:
    n0:            float = 1.503
    wavelength_um: float = 0.78
    d_um:          float = 15.0

    def __post_init__(self):
        if not (self.n0 >= 1.0):
            raise DomainError(f"n0 ha de ser >= 1 (rebut {self.n0})")
        if not (self.wavelength_um > 0):
            raise DomainError(f"λ ha de ser > 0 (rebut {self.wavelength_um})")
        if not (self.d_um > 0):
            raise DomainError(f"d ha de ser > 0 (rebut {self.d_um})")


# ============================================================================
# PERFIL DE CURVATURA
# ============================================================================

@dataclass(frozen=True)
class CurvatureProfile:
    """
    Desplaçament horitzontal x_d(z) de cada guia.

      straight    x_d = 0
      sinusoidal  x_d = A sin(2πz/L)
      sampled     mostres de x_d sobre un període tancat [0, L], primera = última;
                  x_d lineal a trossos

    slope() retorna ẋ_d (adimensional) i curvature() ẍ_d (cm⁻¹).
    """
    kind:         str
    amplitude_um: float = 0.0
    period_cm:    Optional[float] = None
    samples_um:   Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if self.kind not in PROFILE_KINDS:
            raise DomainError(f"Tipus de perfil desconegut: {self.kind}")

        if self.kind == "straight":
            if self.amplitude_um != 0.0 or self.samples_um is not None:
                raise DomainError("Un perfil recte no té amplitud ni mostres")
            return

        if self.period_cm is None or not (self.period_cm > 0):
            raise DomainError(f"El període L ha de ser > 0 (rebut {self.period_cm})")

        if self.kind == "sinusoidal":
            if not (self.amplitude_um > 0):
                raise DomainError("Un perfil sinusoïdal necessita A > 0 (A = 0 és recte)")
            return

        samples = self.samples_um
        if samples is None or len(samples) < 3:
            raise DomainError("Un perfil mostrejat necessita com a mínim 3 mostres")
        if not all(math.isfinite(s) for s in samples):
            raise DomainError("Mostres no finites al perfil")
        escala = max(1.0, max(abs(s) for s in samples))
        if abs(samples[0] - samples[-1]) > _REL_TOL * escala:
            raise DomainError(
                f"Perfil mostrejat no periòdic: x(0)={samples[0]} != x(L)={samples[-1]}"
            )
        object.__setattr__(self, "amplitude_um", max(abs(s) for s in samples))

    @classmethod
    def straight(cls) -> "CurvatureProfile":
        return cls(kind="straight")

    @classmethod
    def sinusoidal(cls, amplitude_um: float, period_cm: float) -> "CurvatureProfile":
        """A = 0 retorna el perfil recte."""
        if amplitude_um == 0.0:
            return cls(kind="straight")
        return cls(kind="sinusoidal", amplitude_um=amplitude_um, period_cm=period_cm)

    @classmethod
    def sampled(cls, samples_um: Sequence[float], period_cm: float) -> "CurvatureProfile":
        return cls(kind="sampled", samples_um=tuple(float(s) for s in samples_um),
                   period_cm=period_cm)

    @property
    def is_straight(self) -> bool:
        return self.kind == "straight"

    # ------------------------------------------------------------------
    # Discretització del perfil mostrejat
    # ------------------------------------------------------------------

    @cached_property
    def _step_cm(self) -> float:
        return self.period_cm / (len(self.samples_um) - 1)

    @cached_property
    def interval_slopes(self) -> np.ndarray:
        """ẋ_d a cada interval: diferència centrada al punt mig."""
        x_cm = np.asarray(self.samples_um, dtype=float) / UM_PER_CM
        return np.diff(x_cm) / self._step_cm

    @cached_property
    def _node_curvatures(self) -> np.ndarray:
        s = self.interval_slopes
        return (s - np.roll(s, 1)) / self._step_cm

    def _locate(self, z_cm: float) -> Tuple[int, float]:
        n = len(self.interval_slopes)
        u = math.fmod(z_cm, self.period_cm)
        if u < 0:
            u += self.period_cm
        u /= self._step_cm
        k = min(int(u), n - 1)
        return k, u - k

    # ------------------------------------------------------------------
    # Avaluació
    # ------------------------------------------------------------------

    def displacement_um(self, z_cm: float) -> float:
        if self.kind == "straight":
            return 0.0
        if self.kind == "sinusoidal":
            return self.amplitude_um * math.sin(2 * math.pi * z_cm / self.period_cm)
        k, frac = self._locate(z_cm)
        return (1 - frac) * self.samples_um[k] + frac * self.samples_um[k + 1]

    def slope(self, z_cm: float) -> float:
        if self.kind == "straight":
            return 0.0
        if self.kind == "sinusoidal":
            k = 2 * math.pi / self.period_cm
            return (self.amplitude_um / UM_PER_CM) * k * math.cos(k * z_cm)
        idx, _ = self._locate(z_cm)
        return float(self.interval_slopes[idx])

    def curvature(self, z_cm: float) -> float:
        if self.kind == "straight":
            return 0.0
        if self.kind == "sinusoidal":
            k = 2 * math.pi / self.period_cm
            return -(self.amplitude_um / UM_PER_CM) * k * k * math.sin(k * z_cm)
        idx, frac = self._locate(z_cm)
        c = self._node_curvatures
        return float((1 - frac) * c[idx] + frac * c[(idx + 1) % len(c)])


def triangular_profile(amplitude_um: float, period_cm: float, n_samples: int = 400) -> CurvatureProfile:
    """Ona triangular mostrejada, |pendent| = 4A/L. Els vèrtexs cauen sobre mostres."""
    if n_samples < 4 or n_samples % 4 != 0:
        raise DomainError("n_samples ha de ser múltiple de 4")
    if not (amplitude_um > 0):
        raise DomainError("L'amplitud ha de ser > 0")
    t = np.arange(n_samples + 1) / n_samples
    # 0 → A a L/4 → −A a 3L/4 → 0
    x = np.where(t <= 0.25, 4 * t, np.where(t <= 0.75, 2 - 4 * t, 4 * t - 4))
    return CurvatureProfile.sampled(amplitude_um * x, period_cm)


# ============================================================================
# XARXA
# ============================================================================

@dataclass(frozen=True)
class Site:
    id: int
    x:  float   # µm
    y:  float   # µm


@dataclass(frozen=True)
class Bond:
    i:               int
    j:               int
    spacing_class:   str   # d | sqrt3d | 2d
    direction_class: str   # h | h30 | h60 | v


@dataclass(frozen=True)
class Lattice:
    sites:     Tuple[Site, ...]
    bonds:     Tuple[Bond, ...]
    dimension: str            # 1D | 2D
    d_um:      float

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    @cached_property
    def _index(self) -> Dict[int, int]:
        return {s.id: k for k, s in enumerate(self.sites)}

    def index_of(self, site_id: int) -> int:
        try:
            return self._index[site_id]
        except KeyError:
            raise DomainError(f"Lloc inexistent: {site_id}")

    def positions(self) -> np.ndarray:
        return np.array([[s.x, s.y] for s in self.sites], dtype=float)

    def site_ids(self) -> List[int]:
        return [s.id for s in self.sites]


def classify_bond(dx: float, dy: float, d_um: float) -> Tuple[str, str]:
    """(classe d'espaiat, classe de direcció) d'un vector d'enllaç."""
    length = math.hypot(dx, dy)
    spacing = None
    for name, ratio in SPACING_RATIOS.items():
        if abs(length / d_um - ratio) <= _REL_TOL * ratio:
            spacing = name
            break
    if spacing is None:
        raise InvalidLatticeError(f"Longitud d'enllaç fora de classe: {length / d_um:.12f}·d")

    angle = math.degrees(math.atan2(abs(dy), abs(dx)))
    direction = None
    for name, ref in DIRECTION_ANGLES.items():
        if abs(angle - ref) <= _ANGLE_TOL_DEG:
            direction = name
            break
    if direction is None:
        raise InvalidLatticeError(f"Direcció d'enllaç fora de classe: {angle:.9f}°")
    return spacing, direction


def build_lattice_1d(n_sites: int, d_um: float) -> Lattice:
    """Cadena horitzontal centrada a l'origen; només enllaços (d, h)."""
    if n_sites < 2:
        raise InvalidLatticeError(f"Una cadena necessita >= 2 llocs (rebut {n_sites})")
    if not (d_um > 0):
        raise InvalidLatticeError("d ha de ser > 0")

    centre = (n_sites - 1) / 2.0
    sites = tuple(Site(id=k, x=(k - centre) * d_um, y=0.0) for k in range(n_sites))
    bonds = tuple(Bond(i=k, j=k + 1, spacing_class="d", direction_class="h")
                  for k in range(n_sites - 1))
    logger.debug(f"[LATTICE] cadena 1D: {n_sites} llocs, {len(bonds)} enllaços")
    return Lattice(sites=sites, bonds=bonds, dimension="1D", d_um=d_um)


def build_lattice_triangular(radius_shells: int, d_um: float) -> Lattice:
    """
    Xarxa triangular ("hexagonal") amb vectors base a1 = (0, d) i
    a2 = (√3d/2, d/2), retallada a un hexàgon de `radius_shells` capes.
    Enllaços fins a 2d, classificats en les sis combinacions possibles.
    """
    if radius_shells < 1:
        raise InvalidLatticeError(f"radius_shells ha de ser >= 1 (rebut {radius_shells})")
    if not (d_um > 0):
        raise InvalidLatticeError("d ha de ser > 0")

    half_sqrt3 = math.sqrt(3.0) / 2.0
    coords = []
    for i in range(-radius_shells, radius_shells + 1):
        for j in range(-radius_shells, radius_shells + 1):
            if max(abs(i), abs(j), abs(i + j)) <= radius_shells:
                coords.append((j * half_sqrt3 * d_um, (i + 0.5 * j) * d_um))

    sites = tuple(Site(id=k, x=x, y=y) for k, (x, y) in enumerate(coords))
    pos = np.array(coords, dtype=float)

    tree = cKDTree(pos)
    pairs = tree.query_pairs(r=2.0 * d_um * (1 + _REL_TOL), output_type="ndarray")
    pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]

    bonds = []
    for a, b in pairs:
        dx, dy = pos[b] - pos[a]
        spacing, direction = classify_bond(dx, dy, d_um)
        bonds.append(Bond(i=int(a), j=int(b), spacing_class=spacing, direction_class=direction))

    logger.info(f"[LATTICE] triangular R={radius_shells}: {len(sites)} llocs, {len(bonds)} enllaços")
    return Lattice(sites=sites, bonds=tuple(bonds), dimension="2D", d_um=d_um)


def reflect_lattice(lattice: Lattice) -> Lattice:
    """Mirall respecte l'eix vertical (x → −x). Els ids i els enllaços es conserven."""
    sites = tuple(Site(id=s.id, x=-s.x if s.x != 0.0 else 0.0, y=s.y) for s in lattice.sites)
    return Lattice(sites=sites, bonds=lattice.bonds, dimension=lattice.dimension, d_um=lattice.d_um)


def center_site(lattice: Lattice) -> int:
    """Id del lloc més proper a l'origen (lloc d'injecció per defecte)."""
    pos = lattice.positions()
    k = int(np.argmin(np.einsum("ij,ij->i", pos, pos)))
    return lattice.sites[k].id


# ============================================================================
# JSON
# ============================================================================

class SiteDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")
    id: int
    x:  float
    y:  float


class BondDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")
    i:         int
    j:         int
    spacing:   str
    direction: str


class LatticeDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")
    sites:     List[SiteDocument]
    bonds:     List[BondDocument]
    dimension: Optional[str]   = None
    d_um:      Optional[float] = None


def lattice_to_json(lattice: Lattice) -> Dict:
    return LatticeDocument(
        sites=[SiteDocument(id=s.id, x=s.x, y=s.y) for s in lattice.sites],
        bonds=[BondDocument(i=b.i, j=b.j, spacing=b.spacing_class, direction=b.direction_class)
               for b in lattice.bonds],
        dimension=lattice.dimension,
        d_um=lattice.d_um,
    ).model_dump()


def lattice_from_json(data: Dict) -> Lattice:
    """Valida el document i la geometria de cada enllaç contra la seva classe."""
    try:
        doc = LatticeDocument.model_validate(data)
    except ValidationError as e:
        raise ParseError(f"Document de xarxa invàlid: {e}")

    if len(doc.sites) < 2:
        raise InvalidLatticeError("La xarxa necessita >= 2 llocs")
    sites = tuple(Site(id=s.id, x=s.x, y=s.y) for s in doc.sites)
    by_id = {s.id: s for s in sites}
    if len(by_id) != len(sites):
        raise InvalidLatticeError("Ids de lloc duplicats")

    dimension = doc.dimension or ("1D" if all(s.y == sites[0].y for s in sites) else "2D")
    d_um = doc.d_um
    if d_um is None:
        lengths = [math.hypot(by_id[b.j].x - by_id[b.i].x, by_id[b.j].y - by_id[b.i].y)
                   for b in doc.bonds if b.spacing == "d"]
        if not lengths:
            raise InvalidLatticeError("No es pot deduir d: cap enllaç de classe d")
        d_um = min(lengths)

    bonds = []
    seen = set()
    for b in doc.bonds:
        if b.i not in by_id or b.j not in by_id or b.i == b.j:
            raise InvalidLatticeError(f"Enllaç amb llocs invàlids: ({b.i}, {b.j})")
        key = (min(b.i, b.j), max(b.i, b.j))
        if key in seen:
            raise InvalidLatticeError(f"Enllaç duplicat: {key}")
        seen.add(key)
        si, sj = by_id[b.i], by_id[b.j]
        spacing, direction = classify_bond(sj.x - si.x, sj.y - si.y, d_um)
        if (spacing, direction) != (b.spacing, b.direction):
            raise InvalidLatticeError(
                f"Enllaç ({b.i}, {b.j}) declarat ({b.spacing}, {b.direction}) "
                f"però la geometria dona ({spacing}, {direction})"
            )
        bonds.append(Bond(i=key[0], j=key[1], spacing_class=spacing, direction_class=direction))

    return Lattice(sites=sites, bonds=tuple(bonds), dimension=dimension, d_um=d_um)
