"""
DINALOC - Estadística de fotons
===============================

Correlacions g² a partir de comptatges i violació de la desigualtat de
Cauchy-Schwarz amb incerteses propagades.

  g_xy = N_xy T / (N_x N_y τ)
  δg   = g √(1/N_x + 1/N_y + 1/N_xy)
  R    = g_ec² − g_ee g_cc
  δR   = √[(2 g_ec δg_ec)² + (g_ee δg_ee)² + (g_cc δg_cc)²]

Entrada CSV (una de les dues capçaleres):
  label,n_x,n_y,n_xy,T,tau     comptatges (label opcional: ec | ee | cc)
  label,g,dg                   valors de g² ja publicats
"""

import csv
import math
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np

from errors import DegenerateUncertaintyError, DomainError, ParseError

logger = logging.getLogger(__name__)

CS_LABELS = ("ec", "ee", "cc")
COUNT_COLUMNS = ("n_x", "n_y", "n_xy", "T", "tau")
QUOTED_COLUMNS = ("label", "g", "dg")


# ============================================================================
# TIPUS
# ============================================================================

@dataclass(frozen=True)
class CountRecord:
    n_x:        int
    n_y:        int
    n_xy:       int
    total_time: float   # s
    tau:        float   # s
    label:      Optional[str] = None

    def __post_init__(self):
        if min(self.n_x, self.n_y, self.n_xy) < 0:
            raise DomainError("Els comptatges han de ser >= 0")
        if not (self.tau > 0):
            raise DomainError(f"τ ha de ser > 0 (rebut {self.tau})")
        if self.total_time < self.tau:
            raise DomainError(f"T={self.total_time} ha de ser >= τ={self.tau}")
        if self.n_xy > min(self.n_x, self.n_y):
            raise DomainError(f"N_xy={self.n_xy} supera min(N_x, N_y)")


@dataclass(frozen=True)
class G2Value:
    value:  float
    stddev: Optional[float]   # None: no definit (N_xy = 0)


@dataclass(frozen=True)
class CauchySchwarzResult:
    statistic:   float
    delta_total: float
    n_sigma:     float


@dataclass
class CountSheet:
    records: List[CountRecord] = field(default_factory=list)
    quoted:  Dict[str, G2Value] = field(default_factory=dict)


# ============================================================================
# g²
# ============================================================================

def g2(rec: CountRecord) -> G2Value:
    """
    Correlació normalitzada de segon ordre.

    Args:
        rec: comptatges d'un parell de detectors

    Returns:
        G2Value; si N_xy = 0 el valor és 0 i la desviació queda sense definir
    """
    if rec.n_x == 0 or rec.n_y == 0:
        raise DomainError("g² no definit amb N_x = 0 o N_y = 0")
    value = rec.n_xy * rec.total_time / (rec.n_x * rec.n_y * rec.tau)
    if rec.n_xy == 0:
        logger.warning("[G2] N_xy = 0: desviació no definida")
        return G2Value(value=0.0, stddev=None)
    stddev = value * math.sqrt(1.0 / rec.n_x + 1.0 / rec.n_y + 1.0 / rec.n_xy)
    return G2Value(value=value, stddev=stddev)


def cauchy_schwarz_violation(g_ec: G2Value, g_ee: G2Value, g_cc: G2Value) -> CauchySchwarzResult:
    """R = g_ec² − g_ee·g_cc i el seu nombre de desviacions estàndard."""
    if None in (g_ec.stddev, g_ee.stddev, g_cc.stddev):
        raise DomainError("Cauchy-Schwarz necessita les tres desviacions")
    statistic = g_ec.value ** 2 - g_ee.value * g_cc.value
    delta = math.sqrt(
        (2 * g_ec.value * g_ec.stddev) ** 2
        + (g_ee.value * g_ee.stddev) ** 2
        + (g_cc.value * g_cc.stddev) ** 2
    )
    if delta == 0.0:
        raise DegenerateUncertaintyError("δR = 0: incertesa degenerada")
    return CauchySchwarzResult(statistic=statistic, delta_total=delta, n_sigma=statistic / delta)


# ============================================================================
# DADES SINTÈTIQUES
# ============================================================================

def simulate_counts(
    rate_x: float,
    rate_y: float,
    tau: float,
    total_time: float,
    rng: np.random.Generator,
    pair_rate: float = 0.0,
) -> CountRecord:
    """
    Dos canals de Poisson en finestres de durada τ alineades i sense solapament.
    Un canal "clica" si registra >= 1 esdeveniment a la finestra; una
    coincidència és una finestra on cliquen tots dos. `pair_rate` afegeix
    esdeveniments comuns als dos canals.
    """
    if min(rate_x, rate_y, pair_rate) < 0:
        raise DomainError("Les taxes han de ser >= 0")
    if not (tau > 0) or total_time < tau:
        raise DomainError("Cal τ > 0 i T >= τ")

    n_windows = int(round(total_time / tau))
    pairs = rng.poisson(pair_rate * tau, n_windows) if pair_rate > 0 else 0
    click_x = (rng.poisson(rate_x * tau, n_windows) + pairs) > 0
    click_y = (rng.poisson(rate_y * tau, n_windows) + pairs) > 0

    return CountRecord(
        n_x=int(click_x.sum()),
        n_y=int(click_y.sum()),
        n_xy=int(np.logical_and(click_x, click_y).sum()),
        total_time=n_windows * tau,
        tau=tau,
    )


# ============================================================================
# CSV
# ============================================================================

def _parse_int(raw: str, column: str, line: int) -> int:
    try:
        value = float(raw)
    except ValueError:
        raise ParseError(f"{column}: '{raw}' no és numèric", line=line)
    if not value.is_integer():
        raise ParseError(f"{column}: '{raw}' no és enter", line=line)
    return int(value)


def _parse_float(raw: str, column: str, line: int) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ParseError(f"{column}: '{raw}' no és numèric", line=line)
    if not math.isfinite(value):
        raise ParseError(f"{column}: valor no finit", line=line)
    return value


def parse_count_records(text: str) -> CountSheet:
    """Llegeix comptatges o valors publicats des de text CSV."""
    reader = csv.reader(text.splitlines())
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise ParseError("CSV buit", line=1)

    if all(c in header for c in COUNT_COLUMNS):
        mode = "counts"
    elif all(c in header for c in QUOTED_COLUMNS):
        mode = "quoted"
    else:
        raise ParseError(f"Capçalera no reconeguda: {','.join(header)}", line=1)

    sheet = CountSheet()
    for line, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise ParseError(f"{len(row)} columnes, s'esperaven {len(header)}", line=line)
        cells = dict(zip(header, (c.strip() for c in row)))
        label = cells.get("label") or None

        if mode == "counts":
            try:
                sheet.records.append(CountRecord(
                    n_x=_parse_int(cells["n_x"], "n_x", line),
                    n_y=_parse_int(cells["n_y"], "n_y", line),
                    n_xy=_parse_int(cells["n_xy"], "n_xy", line),
                    total_time=_parse_float(cells["T"], "T", line),
                    tau=_parse_float(cells["tau"], "tau", line),
                    label=label,
                ))
            except DomainError as e:
                raise ParseError(str(e), line=line)
        else:
            if label is None:
                raise ParseError("Falta l'etiqueta", line=line)
            value = _parse_float(cells["g"], "g", line)
            stddev = _parse_float(cells["dg"], "dg", line)
            if value < 0 or stddev < 0:
                raise ParseError("g i dg han de ser >= 0", line=line)
            sheet.quoted[label] = G2Value(value=value, stddev=stddev)

    logger.info(f"[G2] {len(sheet.records)} registres, {len(sheet.quoted)} valors publicats")
    return sheet


def read_count_records(path: Union[str, Path]) -> CountSheet:
    return parse_count_records(Path(path).read_text(encoding="utf-8"))


# ============================================================================
# INFORME
# ============================================================================

def g2_report(sheet: CountSheet, quoted_n_sigma: Optional[float] = None) -> Dict:
    """
    g² per fila i, si hi ha les etiquetes ec/ee/cc, l'avaluació de
    Cauchy-Schwarz. `quoted_n_sigma` es copia a l'informe sense comparar-lo.
    """
    rows = []
    by_label: Dict[str, G2Value] = dict(sheet.quoted)
    for rec in sheet.records:
        g = g2(rec)
        rows.append({
            "label":  rec.label,
            "n_x":    rec.n_x,
            "n_y":    rec.n_y,
            "n_xy":   rec.n_xy,
            "T":      rec.total_time,
            "tau":    rec.tau,
            "g2":     g.value,
            "stddev": g.stddev,
        })
        if rec.label:
            by_label[rec.label] = g
    for label, g in sorted(sheet.quoted.items()):
        rows.append({"label": label, "g2": g.value, "stddev": g.stddev})

    report: Dict = {"rows": rows, "cauchy_schwarz": None, "quoted_n_sigma": quoted_n_sigma}
    if all(lbl in by_label for lbl in CS_LABELS):
        cs = cauchy_schwarz_violation(by_label["ec"], by_label["ee"], by_label["cc"])
        report["cauchy_schwarz"] = {
            "statistic":   cs.statistic,
            "delta_total": cs.delta_total,
            "n_sigma":     cs.n_sigma,
        }
        logger.info(f"[G2] Cauchy-Schwarz: R={cs.statistic:.4f} ± {cs.delta_total:.4f} "
                    f"({cs.n_sigma:.2f} σ)")
    return report
