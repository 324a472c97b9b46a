"""
FRAME RENDERER - Fotogrames sintètics per validar la ingesta
============================================================

Estratègia:
1. Una taca gaussiana per lloc, d'amplada comuna, amb pes = probabilitat
2. Fons constant + inclinació lineal opcional
3. Soroll de Poisson opcional (generador amb llavor)
4. Arrodoniment a enters >= 0

Ús a frame_ingest (proves i comanda ingest amb fotogrames sintètics).
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from errors import DomainError
from frame_ingest import Frame, Mask

logger = logging.getLogger(__name__)


class FrameRenderer:
    """
    Renderitzador de taques gaussianes sobre un fons.
    """

    def __init__(
        self,
        sigma_px: float = 3.0,
        offset: float = 0.0,
        tilt: Tuple[float, float] = (0.0, 0.0),
        rng: Optional[np.random.Generator] = None,
    ):
        if not (sigma_px > 0):
            raise DomainError("sigma_px ha de ser > 0")
        if offset < 0:
            raise DomainError("El fons ha de ser >= 0")
        self.sigma_px = sigma_px
        self.offset = offset
        self.tilt = tilt
        self.rng = rng

    def background(self, width: int, height: int) -> np.ndarray:
        """Fons + gx·columna + gy·fila."""
        rows, cols = np.mgrid[0:height, 0:width]
        gx, gy = self.tilt
        return self.offset + gx * cols + gy * rows

    def render(self, width: int, height: int,
               spots: Sequence[Tuple[float, float, float]]) -> Frame:
        """
        Args:
            width, height: mida en píxels
            spots: (cx, cy, amplitud de pic)

        Returns:
            Frame
        """
        if width < 1 or height < 1:
            raise DomainError("Mida de fotograma invàlida")
        rows, cols = np.mgrid[0:height, 0:width]
        image = self.background(width, height).astype(float)
        two_s2 = 2.0 * self.sigma_px ** 2
        for cx, cy, peak in spots:
            image += peak * np.exp(-((cols - cx) ** 2 + (rows - cy) ** 2) / two_s2)

        image = np.clip(image, 0.0, None)
        if self.rng is not None:
            counts = self.rng.poisson(image)
        else:
            counts = np.rint(image)
        return Frame(counts=counts.astype(np.int64))

    def render_field(self, width: int, height: int, mask: Mask,
                     probabilities: Sequence[float], peak: float) -> Frame:
        """Una taca per ROI, al centre de la ROI, amb pic = peak·p."""
        if len(probabilities) != len(mask.rois):
            raise DomainError("Cal una probabilitat per ROI")
        spots = [(roi.cx, roi.cy, peak * p) for roi, p in zip(mask.rois, probabilities)]
        logger.debug(f"[INGEST] fotograma sintètic {width}×{height}, {len(spots)} taques")
        return self.render(width, height, spots)


def render_frame(
    width: int,
    height: int,
    spots: Sequence[Tuple[float, float, float]],
    sigma_px: float = 3.0,
    offset: float = 0.0,
    tilt: Tuple[float, float] = (0.0, 0.0),
    seed: Optional[int] = None,
) -> Frame:
    rng = np.random.default_rng(seed) if seed is not None else None
    return FrameRenderer(sigma_px=sigma_px, offset=offset, tilt=tilt, rng=rng).render(width, height, spots)
