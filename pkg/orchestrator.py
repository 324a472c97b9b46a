"""
DINALOC - Orquestrador
======================

Punt d'entrada de línia d'ordres. Cada subcomanda llegeix una
configuració JSON (run_config.RunConfig), executa el pas de càlcul i
escriu resultats deterministes (utils.result_writer).

  simulate           distribucions P_i(z) per a cada z de l'escombrat
  variance-scan      σ²(z) de la matriu configurada + referència recta,
                     predicció analítica i u/v (1D), corbes (z, sigma2, error, axis),
                     ajust balístic
  localization-scan  factor J0 i probabilitat de retorn per amplitud
  memory             matriu composta corba/recta, distribucions a cada frontera
  gstats             g² i violació de Cauchy-Schwarz
  ingest             fotogrames ASCII → probabilitats + variància amb barres d'error

FLUX (simulate):

  config JSON
       │
       ▼
  [PAS 1] build_domain: xarxa, perfil, model d'acoblament
       │
       ▼
  [PAS 2] build_hamiltonian + diagonalització única
       │
       ▼
  [PAS 3] evolve_static per a cada z (fils en paral·lel, ordre fix)
       │
       ▼
  [PAS 4] CSV per z + manifest JSON

Codis de sortida: 0 èxit, 2 configuració, 3 precisió numèrica, 4 E/S o parsing.

Variables d'entorn (.env):
  DINALOC_OUT_DIR    directori de sortida (results)
  DINALOC_THREADS    fils per als escombrats (1)
  DINALOC_LOG_LEVEL  nivell de log (INFO)
"""

import os
import sys
import json
import logging
import argparse
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Sequence

import numpy as np
from dotenv import load_dotenv

from coupling_engine import (
    bond_effective_coupling,
    coupling_report,
    localizing_amplitude,
    normalized_frequency,
)
from errors import ConfigurationError, DinalocError
from evolution_service import (
    SpectralPropagator,
    basis_state,
    build_hamiltonian,
    evolve_static,
    integrate_coupled_mode,
    minimum_radius_sites,
    piecewise_boundaries,
    probability_distribution,
    total_variation,
)
from frame_ingest import (
    BackgroundStrategy,
    default_strategies,
    estimate_background,
    extract_probabilities,
    load_frame,
    load_mask,
    variance_with_errorbars,
)
from lattice_geometry import (
    CurvatureProfile,
    Lattice,
    SPACING_RATIOS,
    lattice_from_json,
)
from photon_statistics import g2, g2_report, read_count_records, simulate_counts
from run_config import RunConfig, build_domain, load_run_config
from transport_analytics import (
    CURVE_COLUMNS,
    VarianceCurve,
    VariancePoint,
    ballistic_fit,
    ballistic_rate,
    is_ballistic,
    uv_integrals,
    variance,
    variance_analytic_1d,
)
from utils.result_writer import ResultWriter

logger = logging.getLogger(__name__)

# ============================================================================
# CONFIGURACIÓ
# ============================================================================

load_dotenv()

DEFAULT_OUT_DIR   = os.getenv("DINALOC_OUT_DIR", "results")
DEFAULT_THREADS   = int(os.getenv("DINALOC_THREADS", "1"))
DEFAULT_LOG_LEVEL = os.getenv("DINALOC_LOG_LEVEL", "INFO")

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"

PROBABILITY_HEADER = ["site_id", "x", "y", "probability"]


@dataclass
class RunContext:
    out:     ResultWriter
    threads: int
    seed:    int

    def map(self, fn: Callable, items: Sequence) -> List:
        """map ordenat; amb més d'un fil, ThreadPoolExecutor."""
        if self.threads <= 1 or len(items) <= 1:
            return [fn(item) for item in items]
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            return list(pool.map(fn, items))


# ============================================================================
# AUXILIARS
# ============================================================================

def _axes(lattice: Lattice) -> List[str]:
    return ["1D"] if lattice.dimension == "1D" else ["horizontal", "vertical"]


def _probability_rows(lattice: Lattice, p: np.ndarray) -> Iterable[Dict]:
    for site, prob in zip(lattice.sites, p):
        yield {"site_id": site.id, "x": site.x, "y": site.y, "probability": float(prob)}


def _z_tag(z: float) -> str:
    return f"{z:g}".replace(".", "p")


def _max_bare_coupling(cfg: RunConfig, lattice: Lattice) -> float:
    model = cfg.coupling.build()
    d_um = cfg.physical.d_um
    classes = {b.spacing_class for b in lattice.bonds}
    model.require(classes)
    return max(model.bare_coupling(s, SPACING_RATIOS[s] * d_um) for s in classes)


def _check_lattice_size(cfg: RunConfig, lattice: Lattice, injection: int, z_end: float) -> None:
    """Distància (en d) de la injecció a la vora més propera >= ceil(4·C_max·z) + 5."""
    need = minimum_radius_sites(_max_bare_coupling(cfg, lattice), z_end)
    degree = np.zeros(lattice.n_sites, dtype=int)
    for b in lattice.bonds:
        degree[lattice.index_of(b.i)] += 1
        degree[lattice.index_of(b.j)] += 1
    edge = degree < degree.max()
    pos = lattice.positions()
    dist = np.hypot(*(pos - pos[lattice.index_of(injection)]).T)
    # sense llocs de vora (cadena de 2, una sola capa): tota la xarxa és vora
    reach = dist[edge].min() if edge.any() else dist.max()
    available = np.floor(reach / lattice.d_um + 1e-9)

    if available < need:
        raise ConfigurationError(
            f"lattice: la xarxa és massa petita per a z={z_end:g} cm "
            f"({int(available)} llocs fins a la vora, se'n necessiten {need})"
        )
    if available < need + 2:
        logger.warning(f"[ORQUESTRADOR] xarxa just al límit: {int(available)} llocs (mínim {need})")


def _profile_amplitude(profile: CurvatureProfile) -> float:
    return 0.0 if profile.is_straight else profile.amplitude_um


def _summary(cfg: RunConfig, command: str, **extra) -> Dict:
    return {"command": command, "name": cfg.name, **extra}


# ============================================================================
# SUBCOMANDES
# ============================================================================

def cmd_simulate(cfg: RunConfig, ctx: RunContext) -> Dict:
    """P_i(z) per a cada z de l'escombrat i manifest."""
    cfg.require("lattice", "scan")
    params, lattice, profile, model = build_domain(cfg)
    injection = cfg.lattice.injection(lattice)
    z_values = cfg.scan.values()
    _check_lattice_size(cfg, lattice, injection, z_values[-1])
    logger.info(f"[PAS 1] xarxa {lattice.dimension} amb {lattice.n_sites} llocs, perfil {profile.kind}")

    H = build_hamiltonian(lattice, model, profile, params)
    propagator = SpectralPropagator(H.entries)
    psi0 = basis_state(lattice.n_sites, lattice.index_of(injection))
    logger.info("[PAS 2] hamiltonià diagonalitzat")

    def run(z: float) -> np.ndarray:
        return probability_distribution(evolve_static(H, psi0, z, propagator=propagator)).p

    fields = ctx.map(run, z_values)
    logger.info(f"[PAS 3] {len(z_values)} propagacions")

    files = []
    checks = []
    for z, p in zip(z_values, fields):
        name = f"probabilities_z{_z_tag(z)}.csv"
        ctx.out.write_csv(name, PROBABILITY_HEADER, _probability_rows(lattice, p))
        files.append({"z_cm": z, "file": name})
        if cfg.integrator.enabled and lattice.dimension == "1D":
            c0 = model.bare_coupling("d", params.d_um)
            psi = integrate_coupled_mode(c0, profile, params, psi0, z,
                                         dz=cfg.integrator.dz_cm, frame=cfg.integrator.frame)
            checks.append({"z_cm": z, "tv_integrator": total_variation(probability_distribution(psi).p, p)})

    manifest = _summary(
        cfg, "simulate",
        dimension=lattice.dimension,
        n_sites=lattice.n_sites,
        injection_site=injection,
        profile=profile.kind,
        files=files,
    )
    if checks:
        manifest["integrator_checks"] = checks
    ctx.out.write_json("manifest.json", manifest)
    logger.info("[PAS 4] resultats escrits")
    return manifest


def cmd_variance_scan(cfg: RunConfig, ctx: RunContext) -> Dict:
    """σ²(z) de la matriu configurada i d'una referència recta sobre la mateixa xarxa."""
    cfg.require("lattice", "scan")
    params, lattice, profile, model = build_domain(cfg)
    injection = cfg.lattice.injection(lattice)
    z_values = cfg.scan.values()
    _check_lattice_size(cfg, lattice, injection, z_values[-1])

    H = build_hamiltonian(lattice, model, profile, params)
    H0 = build_hamiltonian(lattice, model, CurvatureProfile.straight(), params)
    prop, prop0 = SpectralPropagator(H.entries), SpectralPropagator(H0.entries)
    psi0 = basis_state(lattice.n_sites, lattice.index_of(injection))
    logger.info(f"[PAS 1] {len(z_values)} punts, eixos {_axes(lattice)}")

    def run(z: float):
        p = probability_distribution(evolve_static(H, psi0, z, propagator=prop), lattice)
        p0 = probability_distribution(evolve_static(H0, psi0, z, propagator=prop0), lattice)
        return p, p0

    fields = ctx.map(run, z_values)
    logger.info("[PAS 2] propagacions completades")

    omega = normalized_frequency(params)
    c0 = model.bare_coupling("d", params.d_um)
    report: Dict = _summary(cfg, "variance-scan", profile=profile.kind, injection_site=injection, axes={})

    for axis in _axes(lattice):
        rows = []
        curved, straight = [], []
        for z, (p, p0) in zip(z_values, fields):
            s2 = variance(p, lattice, axis, injection)
            s2_0 = variance(p0, lattice, axis, injection)
            row = {
                "z": z,
                "sigma2_simulated": s2,
                "sigma2_straight": s2_0,
                "ratio": s2 / s2_0 if s2_0 > 0 else None,
                "axis": axis,
            }
            if lattice.dimension == "1D":
                if profile.kind == "sinusoidal":
                    row["sigma2_analytic"] = variance_analytic_1d(
                        c0, z, omega, profile.amplitude_um, profile.period_cm)
                elif profile.is_straight:
                    row["sigma2_analytic"] = variance_analytic_1d(c0, z, omega, 0.0, 1.0)
                row["sigma2_uv"] = uv_integrals(profile, omega, z, coupling=c0).sigma2
            rows.append(row)
            curved.append(VariancePoint(z=z, sigma2=s2))
            straight.append(VariancePoint(z=z, sigma2=s2_0))

        header = ["z", "sigma2_simulated", "sigma2_straight", "ratio"]
        if lattice.dimension == "1D":
            header += ["sigma2_analytic", "sigma2_uv"]
        ctx.out.write_csv(f"variance_{axis}.csv", header + ["axis"], rows)

        curve = VarianceCurve(points=curved, axis=axis)
        curve0 = VarianceCurve(points=straight, axis=axis)
        ctx.out.write_csv(f"variance_curve_{axis}.csv", CURVE_COLUMNS, curve.to_rows())
        ctx.out.write_csv(f"variance_curve_{axis}_straight.csv", CURVE_COLUMNS, curve0.to_rows())

        entry: Dict = {
            "ballistic_rate": ballistic_rate(H, lattice, axis, injection),
            "ballistic_rate_straight": ballistic_rate(H0, lattice, axis, injection),
        }
        if len(z_values) >= 3:
            fit = ballistic_fit(curve)
            fit0 = ballistic_fit(curve0)
            entry.update({
                "fit": {**asdict(fit), "ballistic": is_ballistic(fit)},
                "fit_straight": {**asdict(fit0), "ballistic": is_ballistic(fit0)},
                "slope_ratio": fit.slope / fit0.slope if fit0.slope else None,
            })
        else:
            logger.warning(f"[TRANSPORT] {axis}: menys de 3 punts, sense ajust balístic")
        report["axes"][axis] = entry

    ctx.out.write_json("ballistic_fit.json", report)
    logger.info("[PAS 3] corbes de variància escrites")
    return report


def _localization_profile(cfg: RunConfig, amplitude_um: float) -> CurvatureProfile:
    spec = cfg.profile.model_copy(update={"amplitude_um": amplitude_um,
                                          "kind": "triangular" if cfg.profile.kind == "triangular"
                                          else "sinusoidal"})
    if amplitude_um == 0.0:
        return CurvatureProfile.straight()
    return spec.build(cfg.physical.build())


def cmd_localization_scan(cfg: RunConfig, ctx: RunContext) -> Dict:
    """Factor de modulació i probabilitat de retorn per a cada amplitud de la graella."""
    cfg.require("lattice", "localization")
    if cfg.profile.period_cm is None:
        raise ConfigurationError("profile.period_cm: obligatori per a localization-scan")
    params, lattice, _, model = build_domain(cfg)
    loc = cfg.localization
    injection = cfg.lattice.injection(lattice)
    _check_lattice_size(cfg, lattice, injection, loc.z_cm)
    k = lattice.index_of(injection)
    psi0 = basis_state(lattice.n_sites, k)
    omega = normalized_frequency(params)
    c0 = model.bare_coupling("d", params.d_um)
    use_integrator = cfg.integrator.enabled and lattice.dimension == "1D"
    logger.info(f"[PAS 1] {len(loc.amplitudes_um)} amplituds, z={loc.z_cm} cm")

    def run(amplitude: float) -> Dict:
        profile = _localization_profile(cfg, amplitude)
        eff = bond_effective_coupling(model, params, profile, "d", "h")
        H = build_hamiltonian(lattice, model, profile, params)
        p = probability_distribution(evolve_static(H, psi0, loc.z_cm)).p
        row = {
            "amplitude_um": amplitude,
            "c_eff_factor": eff.modulation_factor,
            "c_eff": eff.value,
            "return_probability": float(p[k]),
        }
        if use_integrator:
            psi = integrate_coupled_mode(c0, profile, params, psi0, loc.z_cm,
                                         dz=cfg.integrator.dz_cm, frame=cfg.integrator.frame)
            row["return_probability_integrator"] = float(probability_distribution(psi).p[k])
        return row

    rows = ctx.map(run, loc.amplitudes_um)
    header = ["amplitude_um", "c_eff_factor", "c_eff", "return_probability"]
    if use_integrator:
        header.append("return_probability_integrator")
    ctx.out.write_csv("localization_scan.csv", header, rows)
    logger.info("[PAS 2] escombrat d'amplitud escrit")

    best = min(rows, key=lambda r: abs(r["c_eff_factor"]))
    summary = _summary(
        cfg, "localization-scan",
        z_cm=loc.z_cm,
        localizing_amplitude_um=localizing_amplitude(omega, cfg.profile.period_cm),
        min_factor_amplitude_um=best["amplitude_um"],
    )
    configured = cfg.profile.resolve_amplitude(params)
    if configured > 0:
        summary["coupling_report"] = asdict(coupling_report(
            c0, omega, configured, cfg.profile.period_cm, measured=loc.measured_c_eff))
    ctx.out.write_json("localization_summary.json", summary)
    return summary


def cmd_memory(cfg: RunConfig, ctx: RunContext) -> Dict:
    """Matriu composta: distribució a cada frontera i comparació amb la referència recta."""
    cfg.require("lattice", "segments")
    if not cfg.segments:
        raise ConfigurationError("segments: cal com a mínim un segment")
    params, lattice, _, model = build_domain(cfg)
    injection = cfg.lattice.injection(lattice)
    total = sum(s.length_cm for s in cfg.segments)
    _check_lattice_size(cfg, lattice, injection, total)

    segments = []
    described = []
    for k, seg in enumerate(cfg.segments):
        try:
            profile = seg.profile.build(params)
        except DinalocError as e:
            raise ConfigurationError(f"segments.{k}.profile: {e}")
        H = build_hamiltonian(lattice, model, profile, params)
        segments.append((H, seg.length_cm))
        described.append({
            "name": seg.name or f"segment_{k}",
            "profile": profile.kind,
            "amplitude_um": _profile_amplitude(profile),
            "length_cm": seg.length_cm,
            "c_eff_factor": bond_effective_coupling(model, params, profile, "d", "h").modulation_factor,
        })
    logger.info(f"[PAS 1] {len(segments)} segments, {total:g} cm")

    psi0 = basis_state(lattice.n_sites, lattice.index_of(injection))
    states = piecewise_boundaries(segments, psi0)
    fields = [probability_distribution(s).p for s in states]
    for k, p in enumerate(fields):
        name = f"memory_boundary_{k}.csv"
        ctx.out.write_csv(name, PROBABILITY_HEADER, _probability_rows(lattice, p))
        described[k]["file"] = name
        described[k]["variance"] = {
            axis: variance(probability_distribution(states[k], lattice), lattice, axis, injection)
            for axis in _axes(lattice)
        }
    logger.info("[PAS 2] fronteres escrites")

    ref_length = cfg.reference_length_cm
    if ref_length is None:
        ref_length = sum(d["length_cm"] for d in described if d["profile"] == "straight") or None

    summary = _summary(cfg, "memory", segments=described, injection_site=injection,
                       final_variance=described[-1]["variance"])
    if len(fields) > 1:
        summary["tv_final_vs_previous_boundary"] = total_variation(fields[-1], fields[-2])
    if ref_length is not None:
        H_ref = build_hamiltonian(lattice, model, CurvatureProfile.straight(), params)
        ref = probability_distribution(evolve_static(H_ref, psi0, ref_length), lattice)
        ref_var = {axis: variance(ref, lattice, axis, injection) for axis in _axes(lattice)}
        summary["reference"] = {
            "length_cm": ref_length,
            "variance": ref_var,
            "relative_difference": {
                axis: abs(described[-1]["variance"][axis] - v) / v if v > 0 else None
                for axis, v in ref_var.items()
            },
        }
        ctx.out.write_csv("memory_reference.csv", PROBABILITY_HEADER, _probability_rows(lattice, ref.p))
    ctx.out.write_json("memory_summary.json", summary)
    logger.info("[PAS 3] comparació amb la referència escrita")
    return summary


def cmd_gstats(cfg: Optional[RunConfig], ctx: RunContext, counts: Optional[str] = None) -> Dict:
    """Informe g² des d'un CSV o des de fluxos de Poisson sintètics."""
    quoted = None
    if counts is None and (cfg is None or cfg.gstats is None):
        raise ConfigurationError("gstats: cal --counts o una secció gstats")
    if cfg is not None and cfg.gstats is not None:
        quoted = cfg.gstats.quoted_n_sigma

    if counts is not None or cfg.gstats.counts_csv is not None:
        path = Path(counts) if counts is not None else cfg.resolve(cfg.gstats.counts_csv)
        logger.info(f"[PAS 1] llegint {path}")
        report = g2_report(read_count_records(path), quoted_n_sigma=quoted)
    else:
        syn = cfg.gstats.synthetic
        rng = np.random.default_rng(ctx.seed)
        trials = []
        for _ in range(syn.trials):
            rec = simulate_counts(syn.rate_x, syn.rate_y, syn.tau, syn.total_time, rng,
                                  pair_rate=syn.pair_rate)
            g = g2(rec)
            trials.append({"n_x": rec.n_x, "n_y": rec.n_y, "n_xy": rec.n_xy,
                           "g2": g.value, "stddev": g.stddev})
        values = np.array([t["g2"] for t in trials])
        report = {
            "rows": trials,
            "cauchy_schwarz": None,
            "quoted_n_sigma": quoted,
            "synthetic": {"seed": ctx.seed, "mean_g2": float(values.mean()),
                          "std_g2": float(values.std(ddof=0))},
        }
        logger.info(f"[PAS 1] {syn.trials} assaigs sintètics, g² mitjà {values.mean():.4f}")

    ctx.out.write_json("g2_report.json", report)
    return report


def cmd_ingest(cfg: RunConfig, ctx: RunContext) -> Dict:
    """Fotogrames → probabilitats (estratègia combinada) + variància amb barres d'error."""
    cfg.require("ingest")
    spec = cfg.ingest
    if spec.lattice_json is not None:
        lattice = lattice_from_json(json.loads(cfg.resolve(spec.lattice_json).read_text(encoding="utf-8")))
    else:
        _, lattice, _, _ = build_domain(cfg)
    mask = load_mask(cfg.resolve(spec.mask).read_text(encoding="utf-8"))
    if spec.strategies:
        strategies = [BackgroundStrategy(s.kind, s.patch_w, s.patch_h) for s in spec.strategies]
    else:
        strategies = default_strategies(lattice.dimension)
    axes = spec.axes or _axes(lattice)
    injection = cfg.lattice.injection(lattice) if cfg.lattice is not None else None
    logger.info(f"[PAS 1] {len(spec.frames)} fotogrames, {len(strategies)} estratègies de fons")

    def run(frame_path: str) -> Dict:
        path = cfg.resolve(frame_path)
        frame = load_frame(path.read_text(encoding="utf-8"))
        combined = strategies[-1]
        p = extract_probabilities(frame, mask, estimate_background(frame, combined), lattice=lattice)
        bars = {axis: asdict(variance_with_errorbars(frame, mask, lattice, strategies, axis,
                                                     injection_site=injection))
                for axis in axes}
        return {"frame": path.name, "stem": path.stem, "p": p.p, "variance": bars}

    results = ctx.map(run, spec.frames)
    frames = []
    for res in results:
        name = f"ingest_{res['stem']}_probabilities.csv"
        ctx.out.write_csv(name, ["site_id", "probability"],
                          ({"site_id": s.id, "probability": float(v)} for s, v in zip(lattice.sites, res["p"])))
        frames.append({"frame": res["frame"], "probabilities": name, "variance": res["variance"]})
    report = _summary(cfg, "ingest", frames=frames, strategies=[asdict(s) for s in strategies])
    ctx.out.write_json("ingest_report.json", report)
    logger.info("[PAS 2] informe d'ingesta escrit")
    return report


COMMANDS = {
    "simulate":          cmd_simulate,
    "variance-scan":     cmd_variance_scan,
    "localization-scan": cmd_localization_scan,
    "memory":            cmd_memory,
    "ingest":            cmd_ingest,
}


# ============================================================================
# CLI
# ============================================================================

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="configuració JSON")
    common.add_argument("--out", type=Path, default=None, help=f"directori de sortida ({DEFAULT_OUT_DIR})")
    common.add_argument("--threads", type=int, default=None, help=f"fils ({DEFAULT_THREADS})")
    common.add_argument("--seed", type=int, default=0, help="llavor dels generadors aleatoris")
    common.add_argument("--log-level", default=None, help=f"nivell de log ({DEFAULT_LOG_LEVEL})")

    parser = argparse.ArgumentParser(
        prog="dinaloc",
        description="Localització dinàmica de passejades quàntiques en xarxes fotòniques corbades",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    gs = sub.add_parser("gstats", parents=[common])
    gs.add_argument("--counts", type=Path, default=None, help="CSV de comptatges o de valors g²")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    logging.basicConfig(
        level=getattr(logging, (args.log_level or DEFAULT_LOG_LEVEL).upper(), logging.INFO),
        format=LOG_FORMAT,
    )

    try:
        threads = args.threads if args.threads is not None else DEFAULT_THREADS
        if threads < 1:
            raise ConfigurationError(f"--threads ha de ser >= 1 (rebut {threads})")
        out_dir = args.out if args.out is not None else Path(DEFAULT_OUT_DIR)
        ctx = RunContext(out=ResultWriter(out_dir), threads=threads, seed=args.seed)

        cfg = load_run_config(args.config) if args.config is not None else None
        logger.info(f"[ORQUESTRADOR] {args.command} → {out_dir}")

        if args.command == "gstats":
            cmd_gstats(cfg, ctx, counts=str(args.counts) if args.counts is not None else None)
        else:
            if cfg is None:
                raise ConfigurationError(f"{args.command}: cal --config")
            COMMANDS[args.command](cfg, ctx)

    except DinalocError as e:
        logger.error(f"[ORQUESTRADOR] {type(e).__name__}: {e}")
        return e.exit_code
    except OSError as e:
        logger.error(f"[ORQUESTRADOR] E/S: {e}")
        return 4
    except Exception:
        logger.exception("[ORQUESTRADOR] error inesperat")
        return 1

    logger.info("[ORQUESTRADOR] completat")
    return 0


if __name__ == "__main__":
    sys.exit(main())
