"""
DINALOC - Errors
================

Jerarquia única d'excepcions. Cada classe porta el codi de sortida que
retorna l'orquestrador quan l'error arriba fins a la línia d'ordres:

  0  èxit
  2  configuració / precondició
  3  precisió numèrica
  4  E/S o parsing
"""

from typing import Optional


class DinalocError(Exception):
    """Arrel de tots els errors del paquet."""
    exit_code = 1


class ConfigurationError(DinalocError):
    """RunConfig invàlida, model d'acoblament incomplet, xarxa massa petita."""
    exit_code = 2


class DomainError(DinalocError, ValueError):
    """Precondició d'una operació violada."""
    exit_code = 2


class InvalidLatticeError(DomainError):
    pass


class EmptySignalError(DomainError):
    """Totes les ROI queden a zero després de restar el fons."""
    pass


class DegenerateUncertaintyError(DomainError):
    """delta_total = 0 a l'avaluació de Cauchy-Schwarz."""
    pass


class AccuracyError(DinalocError):
    """Deriva de norma o pèrdua d'unitarietat per sobre del llindar."""
    exit_code = 3


class ParseError(DinalocError):
    """Fitxer d'entrada mal format. Porta el número de línia si n'hi ha."""
    exit_code = 4

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"línia {line}: {message}"
        super().__init__(message)
