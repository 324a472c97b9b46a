"""
DINALOC - Ingesta de fotogrames
===============================

Reducció de dades d'una càmera ICCD a una distribució de probabilitat:

  1. load_frame            text ASCII → matriu de comptatges
  2. estimate_background   mitjana d'un pegat de cantonada (o de diverses)
  3. extract_probabilities suma de max(comptatge − fons, 0) dins de cada ROI
  4. variance_with_errorbars
                           una variància per estratègia de fons;
                           mitjana ± desviació estàndard poblacional

Convenció de píxels: el píxel (fila, columna) té el centre a (cy, cx) =
(fila, columna). Un píxel és dins d'una ROI si el seu centre és a
distància < r del centre del cercle.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, TypeAdapter, ValidationError
from skimage.draw import disk

from errors import DomainError, EmptySignalError, ParseError
from evolution_service import ProbabilityField
from lattice_geometry import Lattice
from transport_analytics import variance

logger = logging.getLogger(__name__)

STRATEGY_KINDS = (
    "up-left", "up-right", "down-left", "down-right",
    "four-corner-mean", "top-corner-mean",
)


# ============================================================================
# TIPUS
# ============================================================================

@dataclass
class Frame:
    counts: np.ndarray   # (height, width), enters >= 0

    def __post_init__(self):
        if self.counts.ndim != 2 or 0 in self.counts.shape:
            raise DomainError("Un fotograma necessita dimensions > 0")
        if (self.counts < 0).any():
            raise DomainError("Comptatges negatius al fotograma")

    @property
    def height(self) -> int:
        return self.counts.shape[0]

    @property
    def width(self) -> int:
        return self.counts.shape[1]


@dataclass(frozen=True)
class ROI:
    site_id: int
    cx:      float
    cy:      float
    r:       float


@dataclass
class Mask:
    rois: List[ROI] = field(default_factory=list)

    def __post_init__(self):
        ids = [roi.site_id for roi in self.rois]
        if len(set(ids)) != len(ids):
            raise DomainError("Ids de lloc repetits a la màscara")
        for roi in self.rois:
            if not (roi.r > 0):
                raise DomainError(f"ROI {roi.site_id}: radi {roi.r} (ha de ser > 0)")

    def check_bounds(self, frame: Frame) -> None:
        for roi in self.rois:
            if (roi.cx - roi.r < -0.5 or roi.cy - roi.r < -0.5
                    or roi.cx + roi.r > frame.width - 0.5
                    or roi.cy + roi.r > frame.height - 0.5):
                raise DomainError(f"ROI {roi.site_id} surt del fotograma {frame.width}×{frame.height}")

    def check_lattice(self, lattice: Lattice) -> None:
        if sorted(r.site_id for r in self.rois) != sorted(lattice.site_ids()):
            raise DomainError("Els ids de la màscara no coincideixen amb els llocs de la xarxa")


@dataclass(frozen=True)
class BackgroundStrategy:
    kind:    str
    patch_w: int
    patch_h: int

    def __post_init__(self):
        if self.kind not in STRATEGY_KINDS:
            raise DomainError(f"Estratègia de fons desconeguda: {self.kind}")
        if self.patch_w < 1 or self.patch_h < 1:
            raise DomainError("El pegat necessita mida >= 1")


@dataclass
class VarianceErrorBar:
    mean:       float
    error:      float
    strategies: List[Dict] = field(default_factory=list)


# ============================================================================
# FOTOGRAMES ASCII
# ============================================================================

def load_frame(text: str) -> Frame:
    """Files d'enters separats per espais. Les files buides del final s'ignoren."""
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise ParseError("Fotograma buit", line=1)

    rows = []
    width = None
    for n, line in enumerate(lines, start=1):
        tokens = line.split()
        if not tokens:
            raise ParseError("Fila buida", line=n)
        try:
            row = [int(t) for t in tokens]
        except ValueError:
            raise ParseError("Valor no enter", line=n)
        if any(v < 0 for v in row):
            raise ParseError("Comptatge negatiu", line=n)
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ParseError(f"Fila de {len(row)} valors, s'esperaven {width}", line=n)
        rows.append(row)

    return Frame(counts=np.array(rows, dtype=np.int64))


def dump_frame(frame: Frame) -> str:
    """Forma canònica: un espai entre valors, cada fila acabada en salt de línia."""
    return "".join(" ".join(str(int(v)) for v in row) + "\n" for row in frame.counts)


# ============================================================================
# MÀSCARES
# ============================================================================

class ROIDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")
    site_id: int
    cx:      float
    cy:      float
    r:       float


_MASK_ADAPTER = TypeAdapter(List[ROIDocument])


def load_mask(text: str) -> Mask:
    """JSON: [{"site_id": .., "cx": .., "cy": .., "r": ..}, ...]"""
    try:
        docs = _MASK_ADAPTER.validate_json(text)
    except ValidationError as e:
        raise ParseError(f"Màscara invàlida: {e}")
    try:
        return Mask(rois=[ROI(**d.model_dump()) for d in docs])
    except DomainError as e:
        raise ParseError(str(e))


def dump_mask(mask: Mask) -> str:
    return json.dumps([{"site_id": r.site_id, "cx": r.cx, "cy": r.cy, "r": r.r} for r in mask.rois],
                      indent=2, sort_keys=True)


def mask_from_lattice(
    lattice: Lattice,
    px_per_um: float,
    origin_px: Tuple[float, float],
    radius_px: float,
) -> Mask:
    """ROI centrada a cada guia; l'eix y de la xarxa apunta cap amunt a la imatge."""
    if not (px_per_um > 0):
        raise DomainError("px_per_um ha de ser > 0")
    ox, oy = origin_px
    return Mask(rois=[
        ROI(site_id=s.id, cx=ox + s.x * px_per_um, cy=oy - s.y * px_per_um, r=radius_px)
        for s in lattice.sites
    ])


def roi_pixels(roi: ROI, shape: Tuple[int, int]) -> Tuple[np.ndarray, np.ndarray]:
    return disk((roi.cy, roi.cx), roi.r, shape=shape)


# ============================================================================
# FONS
# ============================================================================

def _patch_mean(counts: np.ndarray, corner: str, w: int, h: int) -> float:
    H, W = counts.shape
    rows = slice(0, h) if corner.startswith("up") else slice(H - h, H)
    cols = slice(0, w) if corner.endswith("left") else slice(W - w, W)
    return float(counts[rows, cols].mean())


def estimate_background(frame: Frame, strategy: BackgroundStrategy) -> float:
    """Mitjana aritmètica del pegat (o mitjana de les mitjanes de diverses cantonades)."""
    w, h = strategy.patch_w, strategy.patch_h
    if w > frame.width or h > frame.height:
        raise DomainError(f"Pegat {w}×{h} fora del fotograma {frame.width}×{frame.height}")

    if strategy.kind == "four-corner-mean":
        corners = ("up-left", "up-right", "down-left", "down-right")
    elif strategy.kind == "top-corner-mean":
        corners = ("up-left", "up-right")
    else:
        corners = (strategy.kind,)
    return float(np.mean([_patch_mean(frame.counts, c, w, h) for c in corners]))


def default_strategies(dimension: str) -> List[BackgroundStrategy]:
    """2D: quatre cantonades 90×90 + mitjana. 1D: dues cantonades superiors 60×30 + mitjana."""
    if dimension == "2D":
        kinds = ("up-left", "up-right", "down-left", "down-right", "four-corner-mean")
        return [BackgroundStrategy(k, 90, 90) for k in kinds]
    if dimension == "1D":
        kinds = ("up-left", "up-right", "top-corner-mean")
        return [BackgroundStrategy(k, 60, 30) for k in kinds]
    raise DomainError(f"Dimensió desconeguda: {dimension}")


# ============================================================================
# PROBABILITATS
# ============================================================================

def extract_probabilities(
    frame: Frame,
    mask: Mask,
    background: float,
    lattice: Optional[Lattice] = None,
) -> ProbabilityField:
    """
    Probabilitat per ROI, normalitzada a Σ = 1.

    Amb `lattice` la distribució segueix l'ordre dels llocs de la xarxa;
    sense, l'ordre de la màscara.
    """
    mask.check_bounds(frame)
    rois = mask.rois
    if lattice is not None:
        mask.check_lattice(lattice)
        by_id = {r.site_id: r for r in rois}
        rois = [by_id[sid] for sid in lattice.site_ids()]

    signal = np.clip(frame.counts.astype(float) - background, 0.0, None)
    sums = np.array([signal[roi_pixels(r, signal.shape)].sum() for r in rois])

    total = sums.sum()
    if not (total > 0):
        raise EmptySignalError("Totes les ROI queden a zero després de restar el fons")
    return ProbabilityField(p=sums / total, lattice=lattice)


def variance_with_errorbars(
    frame: Frame,
    mask: Mask,
    lattice: Lattice,
    strategies: Sequence[BackgroundStrategy],
    axis: str,
    injection_site: Optional[int] = None,
) -> VarianceErrorBar:
    """Variància per cada estratègia de fons; mitjana i desviació poblacional."""
    if len(strategies) < 2:
        raise DomainError("Calen com a mínim 2 estratègies de fons")

    values = []
    per_strategy = []
    for strat in strategies:
        bg = estimate_background(frame, strat)
        p = extract_probabilities(frame, mask, bg, lattice=lattice)
        s2 = variance(p, lattice, axis, injection_site=injection_site)
        values.append(s2)
        per_strategy.append({"kind": strat.kind, "background": bg, "sigma2": s2})
        logger.debug(f"[INGEST] {strat.kind}: fons={bg:.3f}, σ²={s2:.6g}")

    arr = np.array(values)
    return VarianceErrorBar(mean=float(arr.mean()), error=float(arr.std(ddof=0)),
                            strategies=per_strategy)
