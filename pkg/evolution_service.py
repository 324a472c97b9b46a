"""
DINALOC - Servei d'evolució
===========================

Hamiltonià de la xarxa i evolució d'un fotó únic.

  H = Σ β_i |i⟩⟨i| + Σ_{⟨i,j⟩} C_eff(i,j) (|i⟩⟨j| + |j⟩⟨i|)
  |Ψ(z)⟩ = e^{−iHz} |Ψ(0)⟩

Tres evolucionadors:
  1. evolve_static        exponencial espectral (eigh), exactament unitària
  2. evolve_piecewise     composició de segments (matrius corba/recta)
  3. integrate_coupled_mode
                          RK4 de l'equació de modes acoblats amb impuls
                          periòdic (cadena 1D), oracle dinàmic independent

integrate_coupled_mode té dos marcs:
  - lab       i ψ_m' = −C(ψ_{m+1} + ψ_{m−1}) + ω ẍ_d(z) m ψ_m
  - comoving  ψ_m = φ_m e^{−imΘ},  Θ = ω(ẋ_d(z) − ẋ_d(0))
              i φ_m' = −C(e^{−iΘ} φ_{m+1} + e^{iΘ} φ_{m−1})
El marc comòbil elimina el terme m·ωẍ_d i l'error de pas queda fitat per C.
"""

import math
import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import eigh, expm

from coupling_engine import CouplingModel, bond_effective_coupling, normalized_frequency
from errors import AccuracyError, DomainError
from lattice_geometry import CurvatureProfile, Lattice, PhysicalParams

logger = logging.getLogger(__name__)

UNITARITY_TOL = 1e-9
DRIFT_ERROR = 1e-6
DRIFT_PER_CM_WARNING = 1e-8
DEFAULT_STEPS_PER_PERIOD = 400
MAX_DZ_FRACTION = 1.0 / 200.0


# ============================================================================
# TIPUS
# ============================================================================

@dataclass
class HamiltonianMatrix:
    entries: np.ndarray               # (n, n) hermítica, cm⁻¹
    beta:    np.ndarray               # diagonal, cm⁻¹
    lattice: Optional[Lattice] = None

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass
class StateVector:
    amplitudes: np.ndarray
    z_cm:       float = 0.0

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass
class ProbabilityField:
    p:       np.ndarray
    lattice: Optional[Lattice] = None


def basis_state(n: int, index: int) -> StateVector:
    if not (0 <= index < n):
        raise DomainError(f"Índex {index} fora de rang per a {n} llocs")
    amps = np.zeros(n, dtype=complex)
    amps[index] = 1.0
    return StateVector(amplitudes=amps)


# ============================================================================
# HAMILTONIÀ
# ============================================================================

def build_hamiltonian(
    lattice: Lattice,
    model: CouplingModel,
    profile: CurvatureProfile,
    params: PhysicalParams,
    beta: Optional[Sequence[float]] = None,
) -> HamiltonianMatrix:
    """
    Matriu densa hermítica de la xarxa. Cada classe (espaiat, direcció)
    es calcula una sola vegada.

    Args:
        lattice: xarxa amb enllaços classificats
        model:   acoblaments nus per espaiat
        profile: perfil de curvatura comú a totes les guies
        params:  n0, λ, d
        beta:    constants de propagació per lloc (per defecte 0)

    Returns:
        HamiltonianMatrix
    """
    n = lattice.n_sites
    if n == 0:
        raise DomainError("Xarxa buida")
    model.require(b.spacing_class for b in lattice.bonds)

    if beta is None:
        beta_arr = np.zeros(n)
    else:
        beta_arr = np.asarray(beta, dtype=float)
        if beta_arr.shape != (n,):
            raise DomainError(f"beta necessita {n} valors (rebuts {beta_arr.size})")

    cache: Dict[Tuple[str, str], float] = {}
    H = np.diag(beta_arr).astype(float)
    for bond in lattice.bonds:
        key = (bond.spacing_class, bond.direction_class)
        if key not in cache:
            cache[key] = bond_effective_coupling(model, params, profile, *key).value
        i, j = lattice.index_of(bond.i), lattice.index_of(bond.j)
        H[i, j] = H[j, i] = cache[key]

    logger.info(
        f"[EVOLUTION] H {n}×{n}, perfil {profile.kind}: "
        + ", ".join(f"{s}/{d}={v:.6g}" for (s, d), v in sorted(cache.items()))
    )
    return HamiltonianMatrix(entries=H, beta=beta_arr, lattice=lattice)


# ============================================================================
# EXPONENCIAL
# ============================================================================

class SpectralPropagator:
    """Descomposició H = V diag(w) V† guardada per reutilitzar-la a molts z."""

    def __init__(self, matrix: np.ndarray):
        self.eigenvalues, self.eigenvectors = eigh(matrix)

    def unitary(self, z: float) -> np.ndarray:
        V = self.eigenvectors
        return (V * np.exp(-1j * self.eigenvalues * z)) @ V.conj().T

    def propagate(self, amplitudes: np.ndarray, z: float) -> np.ndarray:
        V = self.eigenvectors
        coeffs = V.conj().T @ amplitudes
        return V @ (np.exp(-1j * self.eigenvalues * z) * coeffs)


def spectral_exponential(matrix: np.ndarray, z: float) -> np.ndarray:
    """e^{−iMz} per descomposició espectral."""
    return SpectralPropagator(matrix).unitary(z)


def expm_exponential(matrix: np.ndarray, z: float) -> np.ndarray:
    """e^{−iMz} per escalat i quadrat (validació creuada)."""
    return expm(-1j * z * np.asarray(matrix))


def _check_norm(before: float, after: float, tol: float, where: str) -> None:
    drift = abs(after - before)
    if drift > tol:
        raise AccuracyError(f"[{where}] deriva de norma {drift:.3e} > {tol:.0e}")


def evolve_static(
    H: HamiltonianMatrix,
    psi0: StateVector,
    z: float,
    propagator: Optional[SpectralPropagator] = None,
) -> StateVector:
    """ψ(z) = e^{−iHz} ψ0. Es pot passar un propagador ja diagonalitzat."""
    amps = np.asarray(psi0.amplitudes, dtype=complex)
    if amps.shape != (H.n,):
        raise DomainError(f"Dimensions incompatibles: H {H.n}, ψ {amps.size}")
    if z < 0:
        raise DomainError(f"z ha de ser >= 0 (rebut {z})")
    if z == 0:
        return StateVector(amplitudes=amps.copy(), z_cm=psi0.z_cm)

    prop = propagator if propagator is not None else SpectralPropagator(H.entries)
    out = prop.propagate(amps, z)
    _check_norm(np.linalg.norm(amps), np.linalg.norm(out), UNITARITY_TOL, "evolve_static")
    return StateVector(amplitudes=out, z_cm=psi0.z_cm + z)


def piecewise_boundaries(
    segments: Sequence[Tuple[HamiltonianMatrix, float]],
    psi0: StateVector,
) -> List[StateVector]:
    """Estat al final de cada segment, d'esquerra a dreta."""
    if not segments:
        raise DomainError("Cal com a mínim un segment")
    first = segments[0][0]
    for k, (H, length) in enumerate(segments):
        if H.n != first.n or (
            H.lattice is not None and first.lattice is not None and H.lattice != first.lattice
        ):
            raise DomainError(f"El segment {k} no comparteix la xarxa del primer")
        if not (length > 0):
            raise DomainError(f"El segment {k} té longitud {length} (ha de ser > 0)")

    states = []
    psi = psi0
    for H, length in segments:
        psi = evolve_static(H, psi, length)
        states.append(psi)
    return states


def evolve_piecewise(
    segments: Sequence[Tuple[HamiltonianMatrix, float]],
    psi0: StateVector,
) -> StateVector:
    """ψ = e^{−iH_k z_k} ··· e^{−iH_1 z_1} ψ0."""
    return piecewise_boundaries(segments, psi0)[-1]


# ============================================================================
# INTEGRADOR DE MODES ACOBLATS
# ============================================================================

def rk4_step(psi: np.ndarray, fun: Callable[[float, np.ndarray], np.ndarray],
             z: float, dz: float) -> np.ndarray:
    """Un pas de Runge-Kutta de quart ordre."""
    dz2 = dz / 2.0

    k1 = fun(z, psi)
    k2 = fun(z + dz2, psi + k1 * dz2)
    k3 = fun(z + dz2, psi + k2 * dz2)
    k4 = fun(z + dz, psi + k3 * dz)

    return psi + (k1 + 2 * k2 + 2 * k3 + k4) / 6.0 * dz


def _hop(psi: np.ndarray, phase: complex) -> np.ndarray:
    """phase·ψ_{m+1} + conj(phase)·ψ_{m−1} amb parets dures."""
    out = np.zeros_like(psi)
    out[:-1] += phase * psi[1:]
    out[1:] += np.conj(phase) * psi[:-1]
    return out


def integrate_coupled_mode(
    c0: float,
    profile: CurvatureProfile,
    params: PhysicalParams,
    psi0: StateVector,
    z_end: float,
    dz: Optional[float] = None,
    frame: str = "comoving",
) -> StateVector:
    """
    Integra la cadena 1D amb impuls de curvatura fins a z_end.

    L'índex de lloc m es compta des del centre de la cadena; un canvi
    d'origen només afegeix una fase global.

    Args:
        c0:      acoblament nu (cm⁻¹)
        profile: perfil de curvatura
        params:  defineix ω amb l'espaiat d
        psi0:    estat inicial sobre la cadena
        z_end:   longitud (cm)
        dz:      pas; per defecte L/400 (perfils periòdics)
        frame:   'comoving' o 'lab'

    Returns:
        StateVector a z_end, al marc del laboratori
    """
    if frame not in ("comoving", "lab"):
        raise DomainError(f"Marc desconegut: {frame}")
    if not (c0 > 0):
        raise DomainError(f"C0 ha de ser > 0 (rebut {c0})")
    if z_end < 0:
        raise DomainError(f"z_end ha de ser >= 0 (rebut {z_end})")

    amps0 = np.asarray(psi0.amplitudes, dtype=complex)
    n = amps0.size
    if n < 2:
        raise DomainError("La cadena necessita >= 2 llocs")
    if z_end == 0:
        return StateVector(amplitudes=amps0.copy(), z_cm=psi0.z_cm)

    if profile.is_straight:
        if dz is None:
            dz = z_end / max(DEFAULT_STEPS_PER_PERIOD, math.ceil(200 * c0 * z_end))
    else:
        L = profile.period_cm
        if dz is None:
            dz = L / DEFAULT_STEPS_PER_PERIOD
        if dz > L * MAX_DZ_FRACTION * (1 + 1e-12):
            raise DomainError(f"dz={dz:g} cm supera L/200={L / 200:g} cm")
    if not (dz > 0):
        raise DomainError(f"dz ha de ser > 0 (rebut {dz})")

    n_steps = max(1, math.ceil(z_end / dz - 1e-9))
    h = z_end / n_steps
    omega = normalized_frequency(params)
    m = np.arange(n) - (n - 1) / 2.0
    slope0 = profile.slope(0.0)

    if frame == "comoving":
        def rhs(z: float, phi: np.ndarray) -> np.ndarray:
            theta = omega * (profile.slope(z) - slope0)
            return 1j * c0 * _hop(phi, np.exp(-1j * theta))
    else:
        def rhs(z: float, psi: np.ndarray) -> np.ndarray:
            return 1j * c0 * _hop(psi, 1.0) - 1j * omega * profile.curvature(z) * m * psi

    psi = amps0.copy()
    z = 0.0
    for k in range(n_steps):
        psi = rk4_step(psi, rhs, z, h)
        z = (k + 1) * h

    if frame == "comoving":
        theta = omega * (profile.slope(z_end) - slope0)
        psi = psi * np.exp(-1j * m * theta)

    norm0 = float(np.linalg.norm(amps0))
    drift = abs(float(np.linalg.norm(psi)) - norm0)
    if drift > DRIFT_ERROR:
        raise AccuracyError(
            f"[EVOLUTION] deriva de norma {drift:.3e} > {DRIFT_ERROR:.0e} (dz={h:g}, marc {frame})"
        )
    if drift / z_end > DRIFT_PER_CM_WARNING:
        logger.warning(f"[EVOLUTION] deriva de norma {drift / z_end:.3e} per cm (marc {frame})")

    logger.debug(f"[EVOLUTION] RK4 {n_steps} passos, dz={h:g} cm, marc {frame}")
    return StateVector(amplitudes=psi, z_cm=psi0.z_cm + z_end)


# ============================================================================
# PROBABILITATS
# ============================================================================

def probability_distribution(psi: StateVector, lattice: Optional[Lattice] = None) -> ProbabilityField:
    """p_i = |ψ_i|², renormalitzat a Σ = 1."""
    p = np.abs(np.asarray(psi.amplitudes)) ** 2
    total = float(p.sum())
    if total == 0.0:
        raise DomainError("Vector d'estat nul")
    return ProbabilityField(p=p / total, lattice=lattice)


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


def minimum_radius_sites(c_max: float, z_end: float) -> int:
    """Llocs necessaris a cada costat de la injecció perquè l'ona no toqui la vora."""
    return math.ceil(4.0 * c_max * z_end) + 5
