"""
RESULT WRITER - Sortida determinista de resultats
=================================================

Tots els fitxers de resultats passen per aquí:
- CSV amb floats en format '.12g' i cel·les buides per a None
- JSON amb claus ordenades i sagnat de 2
- Salts de línia '\n' a qualsevol plataforma

Mateixa entrada → fitxers idèntics byte a byte.
"""

import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence

import numpy as np

logger = logging.getLogger(__name__)

FLOAT_FORMAT = ".12g"


def format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), FLOAT_FORMAT)
    return str(value)


def _to_plain(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_to_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(format(float(obj), FLOAT_FORMAT))
    return obj


class ResultWriter:
    """
    Escriptor lligat a un directori de sortida. Guarda la llista de fitxers
    escrits per al manifest.
    """

    def __init__(self, out_dir: Path):
        self.out_dir = Path(out_dir)
        self.written: List[str] = []

    def _path(self, name: str) -> Path:
        path = self.out_dir / name
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Dict[str, Any]]) -> Path:
        path = self._path(name)
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_cell(row.get(col)) for col in header])
        self.written.append(name)
        logger.info(f"[ESCRIPTOR] {path}")
        return path

    def write_json(self, name: str, payload: Any) -> Path:
        path = self._path(name)
        text = json.dumps(_to_plain(payload), indent=2, sort_keys=True, ensure_ascii=False)
        path.write_text(text + "\n", encoding="utf-8")
        self.written.append(name)
        logger.info(f"[ESCRIPTOR] {path}")
        return path
