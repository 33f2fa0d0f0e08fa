"""Sweep orchestration and deterministic CSV/JSON emission.

Grid points are independent; they may be evaluated by a process pool but rows
are always emitted in lexicographic grid order.
"""
from __future__ import annotations

import itertools
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import partial

import numpy as np

from . import __version__
from .config import SweepConfig
from .converter import (
    cooperativity_drift_matrix,
    matrix_is_stable,
    max_commutator_defect,
    commutator_defects,
    max_real_eigenvalue,
    output_coefficients,
    output_coefficients_resonant,
)
from .detection import (
    advantage_threshold,
    entanglement_survival_threshold,
    equal_energy_mode_count,
    error_probability,
    evaluate_detection,
    wide_advantage_threshold,
)
from .errors import DomainError, NumericalError
from .gaussian import (
    covariance_matrix,
    entanglement_metric,
    output_moments,
    resource_report,
    symplectic_spectrum,
)
from .system_params import CONSTANTS, Cooperativities, cooperativities, entangled_bandwidth, planck_occupation

REFERENCE_THRESHOLD = 0.115  # quoted threshold, reported beside the computed crossings
PHYSICALITY_TOL = 1e-9
MARGINAL_BAND = 1e-6  # |max Re lambda| / kappa_m below which a point is marginal


@dataclass
class SweepTable:
    name: str
    columns: list
    rows: list
    extra: dict = field(default_factory=dict)


def _map(func, items, workers: int):
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [func(item) for item in items]
    chunk = max(1, len(items) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items, chunksize=chunk))


def _status_row(base: dict, status: str) -> dict:
    row = dict(base)
    row["status"] = status
    return row


def background_occupancy(cfg: SweepConfig) -> float:
    return planck_occupation(cfg.params.microwave_frequency, cfg.room_temperature)


def eom_baths(cfg: SweepConfig) -> tuple:
    p = cfg.params
    return (p.optical_thermal_occupancy, p.microwave_bath_occupancy,
            planck_occupation(cfg.eom_resonator_frequency, p.environment_temperature))


# -- resources -------------------------------------------------------------

def resources_columns(cfg: SweepConfig) -> list:
    cols = ["occupancy", "lambda_a", "lambda_b", "status", "stable", "bandwidth",
            "n_a", "n_b", "cross", "nu_minus", "epsilon",
            "log_negativity", "log_negativity_per_photon",
            "coherent_information", "coherent_information_per_photon"]
    for conv in cfg.discord_conventions:
        cols += [f"discord_{conv}", f"discord_{conv}_per_photon"]
    return cols


def _resources_point(cfg: SweepConfig, coords) -> dict:
    occupancy, la, lb = coords
    base = {"occupancy": occupancy, "lambda_a": la, "lambda_b": lb}
    coop = Cooperativities(la, lb)
    stable = matrix_is_stable(cooperativity_drift_matrix(coop, cfg.params.kappas))
    base["stable"] = int(stable)
    if not stable:
        return _status_row(base, "unstable")
    try:
        coeffs = output_coefficients_resonant(coop)
        moments = output_moments(coeffs, cfg.params.baths(occupancy))
        report = resource_report(moments, cfg.discord_conventions)
        nu = symplectic_spectrum(covariance_matrix(moments))
    except DomainError:
        return _status_row(base, "domain_error")
    except NumericalError:
        return _status_row(base, "numerical_error")
    if nu.nu_minus < 0.5 - PHYSICALITY_TOL:
        return _status_row(base, "unphysical")
    row = dict(base)
    row.update(
        status="ok",
        bandwidth=entangled_bandwidth(cfg.params.magnon_damping, coop),
        n_a=moments.n_a,
        n_b=moments.n_b,
        cross=moments.cross.real,
        nu_minus=nu.nu_minus,
        epsilon=report.epsilon,
        log_negativity=report.log_negativity,
        log_negativity_per_photon=report.log_negativity_per_photon,
        coherent_information=report.coherent_information,
        coherent_information_per_photon=report.coherent_information_per_photon,
    )
    for conv in cfg.discord_conventions:
        row[f"discord_{conv}"] = report.discord[conv]
        row[f"discord_{conv}_per_photon"] = report.discord_per_photon(conv)
    return row


def run_resources_sweep(cfg: SweepConfig, workers: int = 1) -> SweepTable:
    coords = itertools.product(cfg.occupancies, cfg.grid("grid.lambda_a"), cfg.grid("grid.lambda_b"))
    rows = _map(partial(_resources_point, cfg), coords, workers)
    return SweepTable("resources", resources_columns(cfg), rows,
                      extra={"baths": {occ: list(cfg.params.baths(occ)) for occ in cfg.occupancies}})


# -- detection -------------------------------------------------------------

DETECTION_COLUMNS = [
    "occupancy", "mode_count", "status", "mode_count_eom", "energy_magnon", "energy_eom",
    "snr_qi_magnon", "snr_ci_magnon", "snr_qi_eom", "snr_ci_eom",
    "p_qi_magnon", "p_ci_magnon", "p_qi_eom", "p_ci_eom",
]


def detection_points(cfg: SweepConfig, occupancy: str):
    n_t = background_occupancy(cfg)
    magnon = evaluate_detection(Cooperativities(*cfg.operating_point), cfg.eta, n_t, cfg.params.baths(occupancy))
    eom = evaluate_detection(Cooperativities(*cfg.eom_point), cfg.eta, n_t, eom_baths(cfg))
    return magnon, eom


def _detection_row(occupancy, mode_count, magnon, eom) -> dict:
    m_eom = equal_energy_mode_count(mode_count, magnon.output.n_b, eom.output.n_b)
    snr = {
        "snr_qi_magnon": magnon.snr_qi_per_mode * mode_count,
        "snr_ci_magnon": magnon.snr_ci_per_mode * mode_count,
        "snr_qi_eom": eom.snr_qi_per_mode * m_eom,
        "snr_ci_eom": eom.snr_ci_per_mode * m_eom,
    }
    row = {"occupancy": occupancy, "mode_count": mode_count, "status": "ok", "mode_count_eom": m_eom,
           "energy_magnon": mode_count * magnon.output.n_b, "energy_eom": m_eom * eom.output.n_b}
    row.update(snr)
    for key, value in snr.items():
        row["p_" + key[4:]] = error_probability(value)
    return row


def _point_summary(point, n_t) -> dict:
    sill = entanglement_survival_threshold(point.output)
    ci = point.snr_ci_per_mode
    return {
        "n_a": point.output.n_a,
        "n_b": point.output.n_b,
        "epsilon": entanglement_metric(point.output),
        "snr_qi_per_mode": point.snr_qi_per_mode,
        "snr_ci_per_mode": ci,
        "advantage_ratio": point.snr_qi_per_mode / ci if ci > 0 else None,
        "n_t_sill": sill,
        "entanglement_breaking": bool(n_t >= sill),
    }


def run_detection_sweep(cfg: SweepConfig, workers: int = 1) -> SweepTable:
    rows = []
    summary = {"background_occupancy": background_occupancy(cfg), "eom_baths": list(eom_baths(cfg))}
    for occ in cfg.occupancies:
        magnon, eom = detection_points(cfg, occ)
        summary[occ] = {"magnon": _point_summary(magnon, summary["background_occupancy"]),
                        "eom": _point_summary(eom, summary["background_occupancy"]),
                        "baths": list(cfg.params.baths(occ))}
        rows.extend(_detection_row(occ, m, magnon, eom) for m in cfg.mode_counts)
    return SweepTable("detection", list(DETECTION_COLUMNS), rows, extra=summary)


# -- advantage -------------------------------------------------------------

ADVANTAGE_COLUMNS = ["occupancy", "lambda_b", "lambda_a", "status", "stable",
                     "n_b", "snr_qi_per_mode", "snr_ci_per_mode", "advantage_ratio"]


def _advantage_point(cfg: SweepConfig, n_t: float, coords) -> dict:
    occupancy, lb, la = coords
    base = {"occupancy": occupancy, "lambda_b": lb, "lambda_a": la}
    coop = Cooperativities(la, lb)
    stable = matrix_is_stable(cooperativity_drift_matrix(coop, cfg.params.kappas))
    base["stable"] = int(stable)
    if not stable:
        return _status_row(base, "unstable")
    try:
        point = evaluate_detection(coop, cfg.eta, n_t, cfg.params.baths(occupancy))
        ratio = point.ratio
    except (DomainError, ZeroDivisionError):
        return _status_row(base, "domain_error")
    row = dict(base)
    row.update(status="ok", n_b=point.output.n_b, snr_qi_per_mode=point.snr_qi_per_mode,
               snr_ci_per_mode=point.snr_ci_per_mode, advantage_ratio=ratio)
    return row


def _crossing(cfg: SweepConfig, n_t: float, occupancy: str, lb: float, rows: list) -> dict:
    ratios = [(r["lambda_a"], r["advantage_ratio"]) for r in rows
              if r["occupancy"] == occupancy and r["lambda_b"] == lb and r["status"] == "ok"]
    signs = [np.sign(v - 1.0) for _, v in ratios]
    changes = sum(1 for s0, s1 in zip(signs[:-1], signs[1:]) if s0 != s1)
    baths = cfg.params.baths(occupancy)
    lam = [la for la, _ in ratios]
    crossing = None
    if lam:
        crossing = advantage_threshold(lb, cfg.eta, n_t, baths, min(lam), max(lam), xtol=1e-4)
    return {
        "occupancy": occupancy,
        "lambda_b": lb,
        "sign_changes_on_grid": changes,
        "crossing_in_grid": crossing,
        "crossing_wide": wide_advantage_threshold(lb, cfg.eta, n_t, baths),
        "intermediary_occupancy": baths[2],
    }


def run_advantage_sweep(cfg: SweepConfig, workers: int = 1) -> SweepTable:
    n_t = background_occupancy(cfg)
    coords = itertools.product(cfg.occupancies, cfg.grid("advantage.lambda_b"), cfg.grid("advantage.lambda_a"))
    rows = _map(partial(_advantage_point, cfg, n_t), coords, workers)
    crossings = [_crossing(cfg, n_t, occ, lb, rows)
                 for occ in cfg.occupancies for lb in cfg.grid("advantage.lambda_b")]
    lam_a = cfg.grid("advantage.lambda_a")
    extra = {
        "background_occupancy": n_t,
        "crossings": crossings,
        "reference_threshold": REFERENCE_THRESHOLD,
        "grid_resolution": float(np.max(np.diff(lam_a))) if len(lam_a) > 1 else None,
        "occupancy_values": {
            "microwave": cfg.params.intermediary_occupancy("microwave"),
            "magnon": cfg.params.intermediary_occupancy("magnon"),
        },
    }
    return SweepTable("advantage", list(ADVANTAGE_COLUMNS), rows, extra=extra)


# -- spectrum ----------------------------------------------------------------

SPECTRUM_COLUMNS = ["occupancy", "omega", "status", "omega_over_kappa_m", "epsilon", "epsilon_mirror_defect",
                    "d1", "d2", "d12_abs", "n_a", "n_b", "cross_re", "cross_im",
                    "log_negativity", "coherent_information"]


def omega_grid(cfg: SweepConfig) -> tuple:
    coop = Cooperativities(cfg.spectrum["lambda_a"], cfg.spectrum["lambda_b"])
    width = cfg.spectrum["span"] * entangled_bandwidth(cfg.params.magnon_damping, coop)
    n = cfg.spectrum["points"]
    if n % 2 == 0:
        n += 1
    half = np.linspace(0.0, width, n // 2 + 1)[1:]
    return tuple(float(w) for w in np.concatenate([-half[::-1], [0.0], half]))


def _spectrum_values(cfg, occupancy, omega):
    coop = Cooperativities(cfg.spectrum["lambda_a"], cfg.spectrum["lambda_b"])
    coeffs = output_coefficients(coop, cfg.params.kappas, omega)
    moments = output_moments(coeffs, cfg.params.baths(occupancy))
    return coeffs, moments


def _spectrum_point(cfg: SweepConfig, coords) -> dict:
    occupancy, omega = coords
    base = {"occupancy": occupancy, "omega": omega, "omega_over_kappa_m": omega / cfg.params.magnon_damping}
    try:
        coeffs, moments = _spectrum_values(cfg, occupancy, omega)
        _, mirror = _spectrum_values(cfg, occupancy, -omega)
        eps = entanglement_metric(moments)
        d1, d2, d12 = commutator_defects(coeffs)
    except DomainError:
        return _status_row(base, "domain_error")
    row = dict(base)
    row.update(status="ok", epsilon=eps, epsilon_mirror_defect=abs(eps - entanglement_metric(mirror)),
               d1=d1, d2=d2, d12_abs=abs(d12), n_a=moments.n_a, n_b=moments.n_b,
               cross_re=moments.cross.real, cross_im=moments.cross.imag)
    if omega == 0.0:
        report = resource_report(moments, ("half",))
        row.update(log_negativity=report.log_negativity, coherent_information=report.coherent_information)
    return row


def run_spectrum_sweep(cfg: SweepConfig, workers: int = 1) -> SweepTable:
    coords = itertools.product(cfg.occupancies, omega_grid(cfg))
    rows = _map(partial(_spectrum_point, cfg), coords, workers)
    for row in rows:
        if row.get("status") == "ok" and row["epsilon_mirror_defect"] > 1e-9:
            row["status"] = "asymmetric"
    return SweepTable("spectrum", list(SPECTRUM_COLUMNS), rows,
                      extra={"operating_point": [cfg.spectrum["lambda_a"], cfg.spectrum["lambda_b"]]})


# -- stability ---------------------------------------------------------------

STABILITY_COLUMNS = ["lambda_a", "lambda_b", "status", "stable", "denominator",
                     "max_real_eigenvalue_over_kappa_m", "agrees"]


def _stability_point(cfg: SweepConfig, coords) -> dict:
    la, lb = coords
    coop = Cooperativities(la, lb)
    drift = cooperativity_drift_matrix(coop, cfg.params.kappas)
    stable = matrix_is_stable(drift)
    max_re = max_real_eigenvalue(drift)
    # near the boundary neither route resolves the sign of a tiny real part
    marginal = abs(max_re) <= MARGINAL_BAND * cfg.params.magnon_damping
    agrees = marginal or stable == (max_re < 0.0)
    return {"lambda_a": la, "lambda_b": lb, "status": "ok", "stable": int(stable),
            "denominator": coop.denominator,
            "max_real_eigenvalue_over_kappa_m": max_re / cfg.params.magnon_damping,
            "agrees": int(agrees)}


def run_stability_sweep(cfg: SweepConfig, workers: int = 1) -> SweepTable:
    coords = itertools.product(cfg.grid("stability.lambda_a"), cfg.grid("stability.lambda_b"))
    rows = _map(partial(_stability_point, cfg), coords, workers)
    return SweepTable("stability", list(STABILITY_COLUMNS), rows)


# -- params ------------------------------------------------------------------

def run_params(cfg: SweepConfig, workers: int = 1) -> SweepTable:
    p = cfg.params
    coop = cooperativities(p)
    from .system_params import intracavity_pump_photons, optomagnonic_coupling
    values = [
        ("optomagnonic_coupling", optomagnonic_coupling(p.material, p.sphere_radius), "rad/s"),
        ("optical_damping", p.optical_damping, "rad/s"),
        ("intracavity_pump_photons", intracavity_pump_photons(p.pump_power, p.pump_wavelength, p.optical_damping), "1"),
        ("enhanced_optomagnonic_coupling", coop.optomagnonic_enhanced, "rad/s"),
        ("lambda_a", coop.lambda_a, "1"),
        ("lambda_b", coop.lambda_b, "1"),
    ]
    try:
        values.append(("bandwidth", entangled_bandwidth(p.magnon_damping, coop), "rad/s"))
    except DomainError:
        pass
    values += [
        ("microwave_bath_occupancy", p.microwave_bath_occupancy, "1"),
        ("magnon_bath_occupancy", p.magnon_bath_occupancy, "1"),
        ("intermediary_occupancy_microwave", p.intermediary_occupancy("microwave"), "1"),
        ("intermediary_occupancy_magnon", p.intermediary_occupancy("magnon"), "1"),
        ("background_occupancy", background_occupancy(cfg), "1"),
    ]
    rows = [{"quantity": q, "value": v, "unit": u} for q, v, u in values]
    return SweepTable("params", ["quantity", "value", "unit"], rows)


SUBCOMMANDS = {
    "params": run_params,
    "resources": run_resources_sweep,
    "detection": run_detection_sweep,
    "advantage": run_advantage_sweep,
    "spectrum": run_spectrum_sweep,
    "stability": run_stability_sweep,
}


# -- output ------------------------------------------------------------------

def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            return ""
        return f"{value:.11e}"
    return str(value)


def render_csv(table: SweepTable) -> str:
    lines = [",".join(table.columns)]
    for row in table.rows:
        lines.append(",".join(format_value(row.get(col)) for col in table.columns))
    return "\n".join(lines) + "\n"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        return value if math.isfinite(value) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def render_meta(table: SweepTable, cfg: SweepConfig) -> str:
    meta = {
        "subcommand": table.name,
        "version": __version__,
        "columns": table.columns,
        "row_count": len(table.rows),
        "config": cfg.echo,
        "config_hash": cfg.config_hash(),
        "constants": asdict(CONSTANTS),
        "conventions": {
            "angular_frequency_units": "rad/s",
            "vacuum_noise": 0.5,
            "log_negativity_log_base": "e",
            "entropy_log_base": 2,
            "discord_convention": cfg.discord_convention,
            "occupancy": cfg.occupancy,
            "background_approximation": "n_T/(1-eta) ~ n_T",
        },
        "extra": table.extra,
    }
    return json.dumps(_jsonable(meta), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_outputs(table: SweepTable, cfg: SweepConfig, out_dir=None) -> tuple:
    """Write ``<name>.csv`` and ``<name>.meta.json``; returns both paths."""
    out_dir = cfg.output_dir if out_dir is None else str(out_dir)
    csv_path = os.path.join(out_dir, f"{table.name}.csv")
    meta_path = os.path.join(out_dir, f"{table.name}.meta.json")
    try:
        os.makedirs(out_dir, exist_ok=True)
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(render_csv(table))
        with open(meta_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(render_meta(table, cfg))
    except OSError as exc:
        raise OSError(exc.errno, f"failed writing sweep output: {exc.strerror}", exc.filename or out_dir) from exc
    return csv_path, meta_path
